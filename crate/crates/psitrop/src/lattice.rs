//! Exact integer lattice linear algebra: Smith normal form, saturations,
//! quotient coordinates and the transverse generators used by balancing and
//! corner-locus computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Dense column-major-agnostic integer matrix, row major storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Int>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    /// Columns of the matrix as vectors.
    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].clone()).collect()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `d = u * a * v` with `u`, `v` unimodular and `d`
/// diagonal with each entry dividing the next.
pub struct Smith {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

pub fn smith_normal_form(a: &IntMat) -> Smith {
    let mut d = a.clone();
    let mut u = IntMat::identity(a.rows);
    let mut v = IntMat::identity(a.cols);
    let n = a.rows.min(a.cols);

    for k in 0..n {
        loop {
            // Locate the entry of minimal nonzero absolute value in the
            // trailing block and move it to the pivot position.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..d.rows {
                for j in k..d.cols {
                    if !d[(i, j)].is_zero()
                        && pivot.map_or(true, |(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, d, v, k);
            };
            swap_rows(&mut d, &mut u, k, pi);
            swap_cols(&mut d, &mut v, k, pj);
            if d[(k, k)].is_negative() {
                negate_row(&mut d, &mut u, k);
            }

            let mut dirty = false;
            for i in k + 1..d.rows {
                if !d[(i, k)].is_zero() {
                    let q = d[(i, k)].div_floor(&d[(k, k)]);
                    row_axpy(&mut d, &mut u, i, k, &-q);
                    if !d[(i, k)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..d.cols {
                if !d[(k, j)].is_zero() {
                    let q = d[(k, j)].div_floor(&d[(k, k)]);
                    col_axpy(&mut d, &mut v, j, k, &-q);
                    if !d[(k, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }

            // Divisibility condition: the pivot must divide every entry of
            // the trailing block.
            let mut bad: Option<usize> = None;
            for i in k + 1..d.rows {
                for j in k + 1..d.cols {
                    if !(&d[(i, j)] % &d[(k, k)]).is_zero() {
                        bad = Some(i);
                        break;
                    }
                }
                if bad.is_some() {
                    break;
                }
            }
            match bad {
                None => break,
                Some(i) => {
                    // Fold the offending row into row k and retry.
                    row_axpy_one(&mut d, &mut u, k, i);
                }
            }
        }
    }
    let rank = (0..n).take_while(|&k| !d[(k, k)].is_zero()).count();
    Smith { u, d, v, rank }
}

fn finish(u: IntMat, d: IntMat, v: IntMat, rank: usize) -> Smith {
    Smith { u, d, v, rank }
}

fn swap_rows(d: &mut IntMat, u: &mut IntMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..d.cols {
        let (x, y) = (d[(a, j)].clone(), d[(b, j)].clone());
        d[(a, j)] = y;
        d[(b, j)] = x;
    }
    for j in 0..u.cols {
        let (x, y) = (u[(a, j)].clone(), u[(b, j)].clone());
        u[(a, j)] = y;
        u[(b, j)] = x;
    }
}

fn swap_cols(d: &mut IntMat, v: &mut IntMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..d.rows {
        let (x, y) = (d[(i, a)].clone(), d[(i, b)].clone());
        d[(i, a)] = y;
        d[(i, b)] = x;
    }
    for i in 0..v.rows {
        let (x, y) = (v[(i, a)].clone(), v[(i, b)].clone());
        v[(i, a)] = y;
        v[(i, b)] = x;
    }
}

fn negate_row(d: &mut IntMat, u: &mut IntMat, i: usize) {
    for j in 0..d.cols {
        let x = -d[(i, j)].clone();
        d[(i, j)] = x;
    }
    for j in 0..u.cols {
        let x = -u[(i, j)].clone();
        u[(i, j)] = x;
    }
}

/// row i += q * row k
fn row_axpy(d: &mut IntMat, u: &mut IntMat, i: usize, k: usize, q: &Int) {
    for j in 0..d.cols {
        let add = q * &d[(k, j)];
        d[(i, j)] += add;
    }
    for j in 0..u.cols {
        let add = q * &u[(k, j)];
        u[(i, j)] += add;
    }
}

/// row k += row i (unit coefficient)
fn row_axpy_one(d: &mut IntMat, u: &mut IntMat, k: usize, i: usize) {
    for j in 0..d.cols {
        let add = d[(i, j)].clone();
        d[(k, j)] += add;
    }
    for j in 0..u.cols {
        let add = u[(i, j)].clone();
        u[(k, j)] += add;
    }
}

/// col j += q * col k
fn col_axpy(d: &mut IntMat, v: &mut IntMat, j: usize, k: usize, q: &Int) {
    for i in 0..d.rows {
        let add = q * &d[(i, k)];
        d[(i, j)] += add;
    }
    for i in 0..v.rows {
        let add = q * &v[(i, k)];
        v[(i, j)] += add;
    }
}

/// The index of the lattice spanned by the columns of `a` inside the
/// saturation of its rational column span: the product of the Smith
/// invariant factors, i.e. the gcd of all maximal minors. Zero when the
/// matrix does not have full expected rank `min(rows, cols)`.
pub fn lattice_index(a: &IntMat) -> Int {
    if a.rows == 0 || a.cols == 0 {
        // Empty matrices present the identity map of the zero lattice.
        return Int::one();
    }
    let s = smith_normal_form(a);
    if s.rank < a.rows.min(a.cols) {
        return Int::zero();
    }
    let mut idx = Int::one();
    for k in 0..s.rank {
        idx *= s.d[(k, k)].abs();
    }
    idx
}

/// Index of the column lattice of `a` inside `Z^rows`; requires full row
/// rank, returns 0 otherwise. Same invariant-factor product as
/// [`lattice_index`], provided separately for intent at call sites.
pub fn image_index(a: &IntMat) -> Int {
    if a.rows == 0 {
        return Int::one();
    }
    let s = smith_normal_form(a);
    if s.rank < a.rows {
        return Int::zero();
    }
    let mut idx = Int::one();
    for k in 0..s.rank {
        idx *= s.d[(k, k)].abs();
    }
    idx
}

/// A basis (as columns) of the saturation of the column span of `a`
/// inside `Z^rows`: the lattice of all integer points in the rational span.
pub fn saturation_basis(a: &IntMat) -> Vec<Vec<Int>> {
    if a.cols == 0 {
        return vec![];
    }
    let s = smith_normal_form(a);
    // a = u^-1 d v^-1; the saturated column span is spanned by the first
    // `rank` columns of u^-1. Compute u^-1 by inverting the unimodular u.
    let uinv = unimodular_inverse(&s.u);
    (0..s.rank).map(|k| (0..a.rows).map(|i| uinv[(i, k)].clone()).collect()).collect()
}

/// Inverse of a unimodular integer matrix (via rational Gauss, verified integral).
pub fn unimodular_inverse(u: &IntMat) -> IntMat {
    let n = u.rows;
    assert_eq!(n, u.cols);
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        Rat::from(u[(i, j)].clone())
                    } else if j - n == i {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !aug[i][col].is_zero()).expect("singular unimodular?");
        aug.swap(col, piv);
        let p = aug[col][col].clone();
        for j in 0..2 * n {
            aug[col][j] = &aug[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..2 * n {
                    let sub = &f * &aug[col][j];
                    aug[i][j] = &aug[i][j] - &sub;
                }
            }
        }
    }
    let mut out = IntMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let r = &aug[i][n + j];
            assert!(r.is_integer(), "matrix was not unimodular");
            out[(i, j)] = r.to_integer();
        }
    }
    out
}

/// Divide a vector by the gcd of its entries; zero vectors stay zero.
/// Returns (primitive vector, content).
pub fn primitive_part(v: &[Int]) -> (Vec<Int>, Int) {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return (v.to_vec(), Int::zero());
    }
    (v.iter().map(|x| x / &g).collect(), g)
}

/// Rational rank of a set of integer vectors.
pub fn rank(vectors: &[Vec<Int>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = IntMat::from_rows(vectors.to_vec());
    smith_normal_form(&m).rank
}

/// Solve `sum_j c_j * gens[j] = target` over the rationals, if possible.
/// `gens` must be linearly independent for the solution to be unique; the
/// first solution of the echelonized system is returned.
pub fn solve_rational(gens: &[Vec<Int>], target: &[Rat]) -> Option<Vec<Rat>> {
    let m = gens.len();
    if m == 0 {
        return if target.iter().all(|x| x.is_zero()) { Some(vec![]) } else { None };
    }
    let n = gens[0].len();
    // Columns are the generators.
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> =
                (0..m).map(|j| Rat::from(gens[j][i].clone())).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = vec![];
    let mut prow = 0usize;
    for col in 0..m {
        let Some(p) = (prow..n).find(|&i| !aug[i][col].is_zero()) else { continue };
        aug.swap(prow, p);
        let val = aug[prow][col].clone();
        for j in 0..=m {
            aug[prow][j] = &aug[prow][j] / &val;
        }
        for i in 0..n {
            if i != prow && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..=m {
                    let sub = &f * &aug[prow][j];
                    aug[i][j] = &aug[i][j] - &sub;
                }
            }
        }
        pivots.push((prow, col));
        prow += 1;
        if prow == n {
            break;
        }
    }
    // Inconsistency check.
    for i in prow..n {
        if !aug[i][m].is_zero() {
            return None;
        }
    }
    let mut sol = vec![Rat::zero(); m];
    for &(r, c) in &pivots {
        sol[c] = aug[r][m].clone();
    }
    // Verify (guards against dependent generators with a consistent but
    // non-unique system: any solution is fine for our callers).
    for i in 0..n {
        let mut acc = Rat::zero();
        for j in 0..m {
            acc += &sol[j] * &Rat::from(gens[j][i].clone());
        }
        if acc != target[i] {
            return None;
        }
    }
    Some(sol)
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Is `target` in the rational span of `gens`?
pub fn in_span(gens: &[Vec<Int>], target: &[Int]) -> bool {
    solve_rational(gens, &to_rat_vec(target)).is_some()
        || rank(&[gens.to_vec(), vec![target.to_vec()]].concat()) == rank(gens)
}

/// A generator of the rank-one quotient `N_sigma / N_tau`, oriented to point
/// into the cone side spanned by `sigma_rays`.
///
/// `N_sigma` (resp. `N_tau`) is the saturated lattice of integer points in the
/// span of the given generators; `sigma_rays` must span a space of dimension
/// exactly one more than `tau_rays`. This is the lattice normal vector used by
/// the balancing condition and the corner-locus formula.
pub fn transverse_generator(tau_rays: &[Vec<Int>], sigma_rays: &[Vec<Int>]) -> Vec<Int> {
    let ambient = sigma_rays[0].len();
    let tau_mat = IntMat::from_rows(tau_rays.to_vec()).transpose();
    let sigma_mat = IntMat::from_rows(sigma_rays.to_vec()).transpose();
    let tau_basis = if tau_rays.is_empty() {
        vec![]
    } else {
        saturation_basis(&IntMat {
            rows: ambient,
            cols: tau_mat.cols,
            data: tau_mat.data.clone(),
        })
    };
    let sigma_basis = saturation_basis(&sigma_mat);
    let dt = tau_basis.len();
    let ds = sigma_basis.len();
    assert_eq!(ds, dt + 1, "sigma must have one more dimension than tau");

    // Write the tau basis in sigma-basis coordinates (integer, since
    // N_tau is a saturated sublattice of N_sigma).
    let mut tau_in_sigma: Vec<Vec<Int>> = vec![];
    for t in &tau_basis {
        let sol = solve_rational(&sigma_basis, &to_rat_vec(t)).expect("tau not inside sigma span");
        tau_in_sigma.push(
            sol.iter()
                .map(|r| {
                    assert!(r.is_integer(), "tau lattice not integral in sigma lattice");
                    r.to_integer()
                })
                .collect(),
        );
    }
    // Columns: tau basis vectors expressed in Z^ds. Quotient Z^ds / <cols>
    // is free of rank 1 (saturated). SNF: cols = u^-1 d v^-1, quotient
    // coordinate = last row of u.
    let gen_in_sigma: Vec<Int> = if dt == 0 {
        let mut e = vec![Int::zero(); ds];
        e[0] = Int::one();
        e
    } else {
        let m = IntMat::from_rows(tau_in_sigma).transpose(); // ds x dt
        let s = smith_normal_form(&m);
        assert_eq!(s.rank, dt);
        let uinv = unimodular_inverse(&s.u);
        // The quotient is generated by the image of the last column of u^-1.
        (0..ds).map(|i| uinv[(i, ds - 1)].clone()).collect()
    };
    let mut v: Vec<Int> = vec![Int::zero(); ambient];
    for (c, b) in gen_in_sigma.iter().zip(&sigma_basis) {
        for i in 0..ambient {
            let add = c * &b[i];
            v[i] += add;
        }
    }
    // Orient into sigma: the class of v modulo span(tau) must be a positive
    // multiple of the class of a sigma ray transverse to tau.
    let transverse_ray = sigma_rays
        .iter()
        .find(|r| tau_rays.is_empty() || !in_span(tau_rays, r))
        .expect("sigma has a ray outside tau");
    let mut gens: Vec<Vec<Int>> = vec![transverse_ray.clone()];
    gens.extend(tau_basis.iter().cloned());
    let sol = solve_rational(&gens, &to_rat_vec(&v))
        .expect("transverse generator lies in sigma span");
    if sol[0] < Rat::zero() {
        for x in v.iter_mut() {
            *x = -x.clone();
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_i64_rows(rows)
    }

    #[test]
    fn snf_diag() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(lattice_index(&a), Int::from(6));
    }

    #[test]
    fn snf_rank_deficient() {
        let a = m(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(lattice_index(&a), Int::from(0));
    }

    #[test]
    fn snf_invariants_divide() {
        let a = m(&[vec![-6, 111, -36, 6], vec![5, -672, 210, 74], vec![0, -255, 81, 24], vec![
            -7, 255, -81, -10,
        ]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.rank, 3);
        let d: Vec<i64> = (0..4).map(|k| i64::try_from(&s.d[(k, k)]).unwrap()).collect();
        assert_eq!(d, vec![1, 3, 21, 0]);
        // u * a * v == d
        let prod = s.u.mul(&a).mul(&s.v);
        assert_eq!(prod, s.d);
    }

    #[test]
    fn saturation_of_doubled_line() {
        // span((2,4)) has saturation spanned by (1,2)
        let a = IntMat::from_i64_rows(&[vec![2], vec![4]]);
        let b = saturation_basis(&a);
        assert_eq!(b.len(), 1);
        let (p, _) = primitive_part(&b[0]);
        assert!(p == vec![Int::from(1), Int::from(2)] || p == vec![Int::from(-1), Int::from(-2)]);
    }

    #[test]
    fn transverse_generator_halves_index_two_ray() {
        // tau = origin, sigma = ray spanned by (2,2): the saturated ray
        // lattice is generated by (1,1).
        let v = transverse_generator(&[], &[vec![Int::from(2), Int::from(2)]]);
        assert_eq!(v, vec![Int::from(1), Int::from(1)]);
    }

    #[test]
    fn transverse_generator_orients_into_cone() {
        let tau = vec![vec![Int::from(1), Int::from(0)]];
        let sigma = vec![vec![Int::from(1), Int::from(0)], vec![Int::from(1), Int::from(-3)]];
        let v = transverse_generator(&tau, &sigma);
        // Must have negative second coordinate (pointing into sigma).
        assert!(v[1].is_negative());
    }

    #[test]
    fn solve_rational_roundtrip() {
        let gens = vec![vec![Int::from(1), Int::from(2)], vec![Int::from(0), Int::from(5)]];
        let target = to_rat_vec(&[Int::from(3), Int::from(1)]);
        let sol = solve_rational(&gens, &target).unwrap();
        assert_eq!(sol[0], Rat::from(Int::from(3)));
        assert_eq!(sol[1], Rat::new(Int::from(-5), Int::from(5)));
    }
}
