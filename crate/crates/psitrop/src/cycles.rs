//! Tropical cycles on fans: balancing verification, divisor-cycle
//! intersection via the corner locus, push-forwards with lattice-index
//! multiplicities, degrees, and first Chern classes of cocycle data on
//! one-dimensional bases.
//!
//! Sign convention: tropical polynomials use min throughout, so concave
//! local data (e.g. min of linear forms) produce nonnegative corner weights.

use crate::error::Error;
use crate::lattice::{
    self, in_span, lattice_index, primitive_part, rank, solve_rational, to_rat_vec,
    transverse_generator, IntMat,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Int = BigInt;
pub type Rat = BigRational;
pub type ConeId = usize;
pub type RayId = usize;

/// A rational polyhedral fan, stored with all faces. Cones are simplicial
/// with primitive ray generators; face relations are by ray-set inclusion.
#[derive(Clone, Debug)]
pub struct ConeComplex {
    pub ambient_rank: usize,
    pub rays: Vec<Vec<Int>>,
    pub cones: Vec<Cone>,
    /// For each cone, the cones of one dimension higher containing it.
    pub parents: Vec<Vec<ConeId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    /// Sorted ray indices; empty for the origin.
    pub rays: Vec<RayId>,
    pub dim: usize,
}

impl ConeComplex {
    /// Build from ray vectors and cones given as ray index lists. The origin
    /// and all intermediate faces must be included by the caller;
    /// `with_all_faces` closes under subsets for simplicial fans.
    pub fn new(ambient_rank: usize, rays: Vec<Vec<Int>>, cone_rays: Vec<Vec<RayId>>) -> Result<Self, Error> {
        for r in &rays {
            if r.len() != ambient_rank {
                return Err(Error::Structural("ray has wrong ambient rank".into()));
            }
            let (_, content) = primitive_part(r);
            if content.is_zero() {
                return Err(Error::Structural("zero ray generator".into()));
            }
            if content != Int::one() {
                return Err(Error::Structural(format!(
                    "ray generator not primitive (content {content})"
                )));
            }
        }
        let mut cones: Vec<Cone> = vec![];
        for mut rs in cone_rays {
            rs.sort_unstable();
            rs.dedup();
            let vecs: Vec<Vec<Int>> = rs.iter().map(|&i| rays[i].clone()).collect();
            let d = rank(&vecs);
            if d != rs.len() {
                return Err(Error::Structural(
                    "non-simplicial cone: rays are linearly dependent".into(),
                ));
            }
            cones.push(Cone { rays: rs, dim: d });
        }
        let mut parents = vec![vec![]; cones.len()];
        let index: BTreeMap<Vec<RayId>, ConeId> =
            cones.iter().enumerate().map(|(i, c)| (c.rays.clone(), i)).collect();
        for (i, c) in cones.iter().enumerate() {
            for k in 0..c.rays.len() {
                let mut facet = c.rays.clone();
                facet.remove(k);
                if let Some(&f) = index.get(&facet) {
                    parents[f].push(i);
                }
            }
        }
        Ok(ConeComplex { ambient_rank, rays, cones, parents })
    }

    /// Close a list of maximal cones under taking faces (ray subsets) and
    /// build the complex.
    pub fn with_all_faces(
        ambient_rank: usize,
        rays: Vec<Vec<Int>>,
        maximal: Vec<Vec<RayId>>,
    ) -> Result<Self, Error> {
        let mut seen: std::collections::BTreeSet<Vec<RayId>> = Default::default();
        for m in &maximal {
            let k = m.len();
            for mask in 0..(1usize << k) {
                let mut sub: Vec<RayId> =
                    (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| m[b]).collect();
                sub.sort_unstable();
                seen.insert(sub);
            }
        }
        Self::new(ambient_rank, rays, seen.into_iter().collect())
    }

    pub fn cone_ray_vectors(&self, c: ConeId) -> Vec<Vec<Int>> {
        self.cones[c].rays.iter().map(|&r| self.rays[r].clone()).collect()
    }

    pub fn cones_of_dim(&self, d: usize) -> impl Iterator<Item = ConeId> + '_ {
        self.cones.iter().enumerate().filter(move |(_, c)| c.dim == d).map(|(i, _)| i)
    }

    pub fn find_cone(&self, rays: &[RayId]) -> Option<ConeId> {
        let mut rs = rays.to_vec();
        rs.sort_unstable();
        self.cones.iter().position(|c| c.rays == rs)
    }

    /// Membership of a vector in the (simplicial) cone: nonnegative ray
    /// coordinates.
    pub fn cone_contains(&self, c: ConeId, v: &[Int]) -> bool {
        let gens = self.cone_ray_vectors(c);
        match solve_rational(&gens, &to_rat_vec(v)) {
            Some(sol) => sol.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }
}

/// A weighted fan: integer weights on the cones of one fixed dimension.
#[derive(Clone, Debug)]
pub struct WeightedFan {
    pub complex: Arc<ConeComplex>,
    pub dim: usize,
    /// Nonzero weights only.
    pub weights: BTreeMap<ConeId, Int>,
}

impl WeightedFan {
    pub fn new(complex: Arc<ConeComplex>, dim: usize, weights: BTreeMap<ConeId, Int>) -> Result<Self, Error> {
        for (&c, w) in &weights {
            if complex.cones[c].dim != dim && !w.is_zero() {
                return Err(Error::Domain(format!(
                    "weight on cone {c} of dimension {} in a {dim}-cycle",
                    complex.cones[c].dim
                )));
            }
        }
        let weights = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(WeightedFan { complex, dim, weights })
    }

    pub fn constant(complex: Arc<ConeComplex>, dim: usize, w: i64) -> Self {
        let weights = complex
            .cones_of_dim(dim)
            .map(|c| (c, Int::from(w)))
            .filter(|(_, w)| !w.is_zero())
            .collect();
        WeightedFan { complex, dim, weights }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Piecewise-linear data on a fan: one integer covector per cone, valid on
/// the span of that cone, agreeing on shared faces.
#[derive(Clone, Debug)]
pub struct PLFunctionOnFan {
    /// Covector per cone id (ambient coordinates). Cones missing here are
    /// treated as carrying the zero functional.
    pub covectors: BTreeMap<ConeId, Vec<Rat>>,
}

impl PLFunctionOnFan {
    /// Interpolate values on rays over a simplicial complex.
    pub fn from_ray_values(complex: &ConeComplex, values: &[Int]) -> Result<Self, Error> {
        if values.len() != complex.rays.len() {
            return Err(Error::Shape("one value per ray required".into()));
        }
        let mut covectors = BTreeMap::new();
        for (cid, cone) in complex.cones.iter().enumerate() {
            if cone.rays.is_empty() {
                continue;
            }
            let gens = complex.cone_ray_vectors(cid);
            let vals: Vec<Rat> =
                cone.rays.iter().map(|&r| Rat::from(values[r].clone())).collect();
            let cov = solve_covector(&gens, &vals).ok_or_else(|| {
                Error::RefinementRequired(
                    "ray values do not extend linearly over a cone".into(),
                )
            })?;
            covectors.insert(cid, cov);
        }
        Ok(PLFunctionOnFan { covectors })
    }

    /// A single global linear functional.
    pub fn global_linear(complex: &ConeComplex, covector: &[Int]) -> Self {
        let cov: Vec<Rat> = covector.iter().map(|x| Rat::from(x.clone())).collect();
        PLFunctionOnFan {
            covectors: (0..complex.cones.len()).map(|c| (c, cov.clone())).collect(),
        }
    }

    pub fn eval_on(&self, cone: ConeId, v: &[Rat]) -> Rat {
        match self.covectors.get(&cone) {
            None => Rat::zero(),
            Some(cov) => cov.iter().zip(v).map(|(a, b)| a * b).sum(),
        }
    }

    /// Validate continuity: covectors of a cone and each of its facets agree
    /// on the facet span.
    pub fn check_continuity(&self, complex: &ConeComplex) -> Result<(), Error> {
        for (f, parents) in complex.parents.iter().enumerate() {
            for &p in parents {
                for &r in &complex.cones[f].rays {
                    let v = to_rat_vec(&complex.rays[r]);
                    if self.eval_on(f, &v) != self.eval_on(p, &v) {
                        return Err(Error::RefinementRequired(format!(
                            "function is discontinuous across face {f} of cone {p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Solve for a covector with prescribed values on (independent) generators.
/// Returns any solution; callers only evaluate on the span.
pub fn solve_covector(gens: &[Vec<Int>], values: &[Rat]) -> Option<Vec<Rat>> {
    let n = gens[0].len();
    // Transpose system: find F with <F, g_j> = val_j. Treat F as unknown in
    // Q^n: equations indexed by j.
    let cols: Vec<Vec<Int>> = (0..n)
        .map(|i| gens.iter().map(|g| g[i].clone()).collect())
        .collect();
    solve_rational(&cols, values)
}

#[derive(Clone, Debug, Default)]
pub struct BalancingReport {
    /// Codimension-one faces where the weighted normal sum leaves the span.
    pub violations: Vec<ConeId>,
    pub checked_faces: usize,
}

impl BalancingReport {
    pub fn is_balanced(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lattice balancing around every codimension-one face of the support:
/// the weighted sum of transverse lattice generators must lie in the span
/// of the face.
pub fn check_balancing(alpha: &WeightedFan) -> Result<BalancingReport, Error> {
    let cx = &alpha.complex;
    if alpha.weights.keys().any(|&c| cx.cones[c].dim != alpha.dim) {
        return Err(Error::Domain("cycle support is not pure-dimensional".into()));
    }
    let mut report = BalancingReport::default();
    if alpha.dim == 0 {
        return Ok(report);
    }
    for tau in cx.cones_of_dim(alpha.dim - 1) {
        let adjacent: Vec<ConeId> = cx.parents[tau]
            .iter()
            .copied()
            .filter(|p| alpha.weights.contains_key(p))
            .collect();
        if adjacent.is_empty() {
            continue;
        }
        report.checked_faces += 1;
        let tau_rays = cx.cone_ray_vectors(tau);
        let mut total = vec![Int::zero(); cx.ambient_rank];
        for &sigma in &adjacent {
            let v = transverse_generator(&tau_rays, &cx.cone_ray_vectors(sigma));
            let w = &alpha.weights[&sigma];
            for i in 0..total.len() {
                let add = w * &v[i];
                total[i] += add;
            }
        }
        let ok = if tau_rays.is_empty() {
            total.iter().all(|x| x.is_zero())
        } else {
            in_span(&tau_rays, &total)
        };
        if !ok {
            report.violations.push(tau);
        }
    }
    Ok(report)
}

/// Corner locus intersection of a divisor with a cycle. The weight on a
/// codimension-one face tau of the support is
///   phi_tau(sum_sigma w_sigma v_sigma) - sum_sigma w_sigma phi_sigma(v_sigma)
/// with v_sigma the transverse lattice generators (min convention).
pub fn divisor_intersect(phi: &PLFunctionOnFan, alpha: &WeightedFan) -> Result<WeightedFan, Error> {
    let cx = Arc::clone(&alpha.complex);
    if alpha.dim == 0 {
        return Err(Error::Domain("cannot intersect a zero-dimensional cycle".into()));
    }
    let mut out: BTreeMap<ConeId, Int> = BTreeMap::new();
    for tau in cx.cones_of_dim(alpha.dim - 1) {
        let adjacent: Vec<ConeId> = cx.parents[tau]
            .iter()
            .copied()
            .filter(|p| alpha.weights.contains_key(p))
            .collect();
        if adjacent.is_empty() {
            continue;
        }
        let tau_rays = cx.cone_ray_vectors(tau);
        let mut total = vec![Int::zero(); cx.ambient_rank];
        let mut sum_vals = Rat::zero();
        for &sigma in &adjacent {
            let v = transverse_generator(&tau_rays, &cx.cone_ray_vectors(sigma));
            let w = &alpha.weights[&sigma];
            sum_vals += Rat::from(w.clone()) * phi.eval_on(sigma, &to_rat_vec(&v));
            for i in 0..total.len() {
                let add = w * &v[i];
                total[i] += add;
            }
        }
        // Balancing of the input guarantees the total lies in span(tau).
        let ok = if tau_rays.is_empty() {
            total.iter().all(|x| x.is_zero())
        } else {
            in_span(&tau_rays, &total)
        };
        if !ok {
            return Err(Error::Domain(format!(
                "input cycle is not balanced at face {tau}; divisor intersection undefined"
            )));
        }
        let correction = phi.eval_on(tau, &to_rat_vec(&total));
        let weight = correction - sum_vals;
        if !weight.is_integer() {
            return Err(Error::Inconsistent(format!(
                "non-integer corner weight {weight} at face {tau}"
            )));
        }
        let w = weight.to_integer();
        if !w.is_zero() {
            out.insert(tau, w);
        }
    }
    WeightedFan::new(cx, alpha.dim - 1, out)
}

/// An integer-linear map between ambient lattices, together with the target
/// fan the images are measured against.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub matrix: IntMat,
}

impl LatticeMap {
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(v)
    }
}

/// Push a cycle forward along an integer-linear map. Each weighted cone must
/// map onto a cone of the target complex (of the same dimension) or drop
/// dimension; the multiplicity is the index of the image lattice inside the
/// saturated lattice of the target cone span.
pub fn push_forward(
    f: &LatticeMap,
    alpha: &WeightedFan,
    target: Arc<ConeComplex>,
) -> Result<WeightedFan, Error> {
    let cx = &alpha.complex;
    let mut out: BTreeMap<ConeId, Int> = BTreeMap::new();
    let mut result_dim = None;
    for (&c, w) in &alpha.weights {
        let gens = cx.cone_ray_vectors(c);
        let images: Vec<Vec<Int>> = gens.iter().map(|g| f.apply(g)).collect();
        let image_rank = rank(&images);
        if image_rank < alpha.dim {
            continue; // dimension drop: contributes zero
        }
        // Find the target cone spanned by the image.
        let prim_images: Vec<Vec<Int>> = images
            .iter()
            .filter(|v| !v.iter().all(|x| x.is_zero()))
            .map(|v| primitive_part(v).0)
            .collect();
        let tcone = target
            .cones
            .iter()
            .position(|tc| {
                tc.dim == alpha.dim
                    && prim_images.iter().all(|v| {
                        let tid = target.cones.iter().position(|x| x == tc).unwrap();
                        target.cone_contains(tid, v)
                    })
                    && tc.rays.iter().all(|&r| {
                        // target cone inside image cone
                        solve_rational(&images, &to_rat_vec(&target.rays[r]))
                            .map_or(false, |sol| sol.iter().all(|x| !x.is_negative()))
                    })
            })
            .ok_or_else(|| {
                Error::RefinementRequired(
                    "image of a cone is not a cone of the target fan".into(),
                )
            })?;
        // Multiplicity: index of f(N_sigma) in N_{f(sigma)}.
        let source_basis = if gens.is_empty() {
            vec![]
        } else {
            lattice::saturation_basis(&IntMat::from_rows(gens.clone()).transpose())
        };
        let image_of_basis: Vec<Vec<Int>> = source_basis.iter().map(|b| f.apply(b)).collect();
        let target_span = target.cone_ray_vectors(tcone);
        let target_basis = if target_span.is_empty() {
            vec![]
        } else {
            lattice::saturation_basis(&IntMat::from_rows(target_span).transpose())
        };
        let mult = if alpha.dim == 0 {
            Int::one()
        } else {
            // Express images in the target basis; integrality must hold.
            let mut coords: Vec<Vec<Int>> = vec![];
            for v in &image_of_basis {
                let sol = solve_rational(&target_basis, &to_rat_vec(v))
                    .ok_or_else(|| Error::Inconsistent("image leaves target span".into()))?;
                coords.push(
                    sol.iter()
                        .map(|r| {
                            if r.is_integer() {
                                Ok(r.to_integer())
                            } else {
                                Err(Error::Inconsistent(
                                    "image lattice not inside target lattice".into(),
                                ))
                            }
                        })
                        .collect::<Result<_, _>>()?,
                );
            }
            lattice_index(&IntMat::from_rows(coords).transpose())
        };
        let add = w * mult;
        *out.entry(tcone).or_insert_with(Int::zero) += add;
        result_dim = Some(alpha.dim);
    }
    let dim = result_dim.unwrap_or(alpha.dim);
    out.retain(|_, w| !w.is_zero());
    WeightedFan::new(target, dim, out)
}

/// Common refinement of two fans by pairwise cone intersection. Supported
/// for fans whose cones have dimension at most two (rays and planar
/// sectors in arbitrary ambient rank); higher-dimensional refinement is
/// out of scope and reported as unsupported.
pub fn refine(a: &ConeComplex, b: &ConeComplex) -> Result<ConeComplex, Error> {
    if a.ambient_rank != b.ambient_rank {
        return Err(Error::Domain("fans live in different ambient lattices".into()));
    }
    if a.cones.iter().chain(&b.cones).any(|c| c.dim > 2) {
        return Err(Error::Unsupported(
            "common refinement is implemented for cones of dimension at most two".into(),
        ));
    }
    let mut rays: Vec<Vec<Int>> = vec![];
    let mut ray_index = |v: &Vec<Int>, rays: &mut Vec<Vec<Int>>| -> usize {
        match rays.iter().position(|r| r == v) {
            Some(i) => i,
            None => {
                rays.push(v.clone());
                rays.len() - 1
            }
        }
    };
    let mut maximal: Vec<Vec<usize>> = vec![];
    for ca in &a.cones {
        for cb in &b.cones {
            let gens = intersect_small_cones(
                &ca.rays.iter().map(|&r| a.rays[r].clone()).collect::<Vec<_>>(),
                &cb.rays.iter().map(|&r| b.rays[r].clone()).collect::<Vec<_>>(),
            )?;
            let cone: Vec<usize> =
                gens.iter().map(|g| ray_index(g, &mut rays)).collect();
            maximal.push(cone);
        }
    }
    ConeComplex::with_all_faces(a.ambient_rank, rays, maximal)
}

/// Intersection of two simplicial cones of dimension at most two, returned
/// as primitive generators (empty for the origin).
fn intersect_small_cones(a: &[Vec<Int>], b: &[Vec<Int>]) -> Result<Vec<Vec<Int>>, Error> {
    if a.is_empty() || b.is_empty() {
        return Ok(vec![]);
    }
    let in_cone = |gens: &[Vec<Int>], v: &[Int]| -> bool {
        solve_rational(gens, &to_rat_vec(v))
            .map_or(false, |sol| sol.iter().all(|x| !x.is_negative()))
    };
    // Candidate extreme rays: rays of one cone inside the other, plus the
    // intersection line of the two spans when those differ.
    let mut candidates: Vec<Vec<Int>> = vec![];
    for r in a {
        if in_cone(b, r) {
            candidates.push(r.clone());
        }
    }
    for r in b {
        if in_cone(a, r) && !candidates.contains(r) {
            candidates.push(r.clone());
        }
    }
    if a.len() == 2 && b.len() == 2 {
        let span_union = rank(&[a.to_vec(), b.to_vec()].concat());
        if span_union > 2 && span_union < 4 {
            // The spans meet in a line: x = p a0 + q a1 = r b0 + s b1.
            // Solve the homogeneous system for (p, q, r, s).
            let n = a[0].len();
            let rows: Vec<Vec<Int>> = (0..n)
                .map(|i| {
                    vec![a[0][i].clone(), a[1][i].clone(), -b[0][i].clone(), -b[1][i].clone()]
                })
                .collect();
            let m = IntMat::from_rows(rows);
            let s = lattice::smith_normal_form(&m);
            if s.rank == 3 {
                // kernel generated by the last column of v
                let vinv_col: Vec<Int> = (0..4).map(|i| s.v[(i, 3)].clone()).collect();
                let mut dir = vec![Int::zero(); n];
                for i in 0..n {
                    let add =
                        &vinv_col[0] * &a[0][i] + &vinv_col[1] * &a[1][i];
                    dir[i] += add;
                }
                if !dir.iter().all(|x| x.is_zero()) {
                    let (p, _) = primitive_part(&dir);
                    for cand in [p.clone(), p.iter().map(|x| -x.clone()).collect::<Vec<_>>()] {
                        if in_cone(a, &cand) && in_cone(b, &cand) && !candidates.contains(&cand) {
                            candidates.push(cand);
                        }
                    }
                }
            }
        }
    }
    candidates = candidates.into_iter().map(|c| primitive_part(&c).0).collect();
    candidates.dedup();
    match candidates.len() {
        0 => Ok(vec![]),
        1 => Ok(candidates),
        _ => {
            // All candidates lie in a common two-dimensional salient cone;
            // the extremes are the pair spanning all others nonnegatively.
            let mut best: Option<Vec<Vec<Int>>> = None;
            for i in 0..candidates.len() {
                for j in (i + 1)..candidates.len() {
                    let pair = vec![candidates[i].clone(), candidates[j].clone()];
                    if rank(&pair) < 2 {
                        continue;
                    }
                    if candidates.iter().all(|c| in_cone(&pair, c)) {
                        best = Some(pair);
                        break;
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            match best {
                Some(pair) => Ok(pair),
                None => {
                    // All candidates proportional: a single ray.
                    Ok(vec![candidates[0].clone()])
                }
            }
        }
    }
}

/// Transfer the weights of a cycle onto a refinement of its fan: each
/// refined cone inherits the weight of the cone of the original complex
/// containing it.
pub fn restrict_weights(alpha: &WeightedFan, refined: Arc<ConeComplex>) -> Result<WeightedFan, Error> {
    let mut weights = BTreeMap::new();
    for c in refined.cones_of_dim(alpha.dim) {
        let gens = refined.cone_ray_vectors(c);
        let host = alpha.weights.iter().find(|(&orig, _)| {
            gens.iter().all(|g| alpha.complex.cone_contains(orig, g))
        });
        if let Some((_, w)) = host {
            weights.insert(c, w.clone());
        }
    }
    WeightedFan::new(refined, alpha.dim, weights)
}

/// Degree of a zero-dimensional cycle: the sum of its weights.
pub fn degree(alpha: &WeightedFan) -> Result<Int, Error> {
    if alpha.dim != 0 {
        return Err(Error::Domain(format!(
            "degree requires a zero-dimensional cycle, got dimension {}",
            alpha.dim
        )));
    }
    Ok(alpha.weights.values().sum())
}

// ---------------------------------------------------------------------------
// Tropical line bundles on a chain of charts (e.g. the tropical projective
// line), described by a cocycle of integer-affine transition functions.
// ---------------------------------------------------------------------------

/// A cocycle on an ordered chart chain covering a compact 1-dimensional
/// base. `transitions[(i, j)]` is the slope of the affine transition from
/// chart j to chart i on their overlap.
#[derive(Clone, Debug, Default)]
pub struct ChartCocycle {
    pub charts: usize,
    /// (to, from) -> (slope, offset)
    pub transitions: BTreeMap<(usize, usize), (Int, Rat)>,
}

impl ChartCocycle {
    /// The two-chart cocycle on TP^1 with transition slope `a`
    /// (xi_{+infty, -infty} = a x).
    pub fn tp1(a: i64) -> Self {
        let mut transitions = BTreeMap::new();
        transitions.insert((1, 0), (Int::from(a), Rat::zero()));
        transitions.insert((0, 1), (Int::from(-a), Rat::zero()));
        ChartCocycle { charts: 2, transitions }
    }

    pub fn tensor(&self, other: &ChartCocycle) -> Result<ChartCocycle, Error> {
        if self.charts != other.charts {
            return Err(Error::Domain("tensor requires matching chart covers".into()));
        }
        let mut transitions = BTreeMap::new();
        for (&k, (s, o)) in &self.transitions {
            let (s2, o2) = other
                .transitions
                .get(&k)
                .ok_or_else(|| Error::Domain("tensor requires matching overlaps".into()))?;
            transitions.insert(k, (s + s2, o + o2));
        }
        Ok(ChartCocycle { charts: self.charts, transitions })
    }

    fn validate(&self) -> Result<(), Error> {
        for (&(i, j), (s, o)) in &self.transitions {
            if i == j && (!s.is_zero() || !o.is_zero()) {
                return Err(Error::Domain("nonzero self-transition".into()));
            }
            match self.transitions.get(&(j, i)) {
                Some((s2, o2)) => {
                    if !(s + s2).is_zero() || !(o + o2).is_zero() {
                        return Err(Error::Domain(format!(
                            "cocycle antisymmetry fails on overlap ({i},{j})"
                        )));
                    }
                }
                None => {
                    return Err(Error::Domain(format!(
                        "missing inverse transition for overlap ({i},{j})"
                    )))
                }
            }
        }
        // Cocycle identity on triples where all three overlaps are present.
        for i in 0..self.charts {
            for j in 0..self.charts {
                for k in 0..self.charts {
                    if let (Some((sij, oij)), Some((sjk, ojk)), Some((sik, oik))) = (
                        self.transitions.get(&(i, j)),
                        self.transitions.get(&(j, k)),
                        self.transitions.get(&(i, k)),
                    ) {
                        if &(sij + sjk) != sik || &(oij + ojk) != oik {
                            return Err(Error::Domain(format!(
                                "cocycle identity fails on charts ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Degree of the first Chern class: total transition slope accumulated
    /// along the chart chain.
    pub fn c1_degree(&self) -> Result<Int, Error> {
        self.validate()?;
        let mut deg = Int::zero();
        for k in 0..self.charts.saturating_sub(1) {
            let (s, _) = self
                .transitions
                .get(&(k + 1, k))
                .ok_or_else(|| Error::Domain(format!("missing transition {} -> {}", k, k + 1)))?;
            deg += s;
        }
        Ok(deg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    /// The complete fan of R^2 on which min(0, x, y) is piecewise linear,
    /// with the rays of the min-tropical line.
    fn plane_with_line() -> Arc<ConeComplex> {
        let rays = vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])];
        let maximal = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        Arc::new(ConeComplex::with_all_faces(2, rays, maximal).unwrap())
    }

    fn min_line_function(cx: &ConeComplex) -> PLFunctionOnFan {
        // min(0, x, y) evaluated on rays: (1,0) -> 0, (0,1) -> 0, (-1,-1) -> -1
        PLFunctionOnFan::from_ray_values(cx, &iv(&[0, 0, -1])).unwrap()
    }

    #[test]
    fn balancing_tropical_line() {
        let rays = vec![iv(&[1, 1]), iv(&[-1, 0]), iv(&[0, -1])];
        let cx = Arc::new(
            ConeComplex::with_all_faces(2, rays, vec![vec![0], vec![1], vec![2]]).unwrap(),
        );
        let alpha = WeightedFan::constant(Arc::clone(&cx), 1, 1);
        assert!(check_balancing(&alpha).unwrap().is_balanced());
        let mut w = alpha.weights.clone();
        let first = *w.keys().next().unwrap();
        w.insert(first, Int::from(2));
        let bad = WeightedFan::new(cx, 1, w).unwrap();
        assert!(!check_balancing(&bad).unwrap().is_balanced());
    }

    #[test]
    fn corner_locus_of_min_line() {
        let cx = plane_with_line();
        let phi = min_line_function(&cx);
        phi.check_continuity(&cx).unwrap();
        let plane = WeightedFan::constant(Arc::clone(&cx), 2, 1);
        assert!(check_balancing(&plane).unwrap().is_balanced());
        let line = divisor_intersect(&phi, &plane).unwrap();
        assert_eq!(line.dim, 1);
        // Weight one on all three rays.
        assert_eq!(line.weights.len(), 3);
        for w in line.weights.values() {
            assert_eq!(*w, Int::one());
        }
        assert!(check_balancing(&line).unwrap().is_balanced());
    }

    #[test]
    fn globally_linear_gives_zero() {
        let cx = plane_with_line();
        let phi = PLFunctionOnFan::global_linear(&cx, &iv(&[3, -2]));
        let plane = WeightedFan::constant(Arc::clone(&cx), 2, 1);
        let z = divisor_intersect(&phi, &plane).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn line_self_intersection_is_one() {
        let cx = plane_with_line();
        let phi = min_line_function(&cx);
        let plane = WeightedFan::constant(Arc::clone(&cx), 2, 1);
        let line = divisor_intersect(&phi, &plane).unwrap();
        let pt = divisor_intersect(&phi, &line).unwrap();
        assert_eq!(degree(&pt).unwrap(), Int::one());
    }

    #[test]
    fn push_forward_doubling() {
        let rays = vec![iv(&[1]), iv(&[-1])];
        let cx = Arc::new(
            ConeComplex::with_all_faces(1, rays.clone(), vec![vec![0], vec![1]]).unwrap(),
        );
        let alpha = WeightedFan::constant(Arc::clone(&cx), 1, 1);
        let f = LatticeMap { matrix: IntMat::from_i64_rows(&[vec![2]]) };
        let target = Arc::new(ConeComplex::with_all_faces(1, rays, vec![vec![0], vec![1]]).unwrap());
        let pushed = push_forward(&f, &alpha, target).unwrap();
        assert!(pushed.weights.values().all(|w| *w == Int::from(2)));
        assert!(check_balancing(&pushed).unwrap().is_balanced());
    }

    #[test]
    fn push_forward_dimension_drop() {
        let rays = vec![iv(&[0, 1]), iv(&[0, -1])];
        let cx = Arc::new(
            ConeComplex::with_all_faces(2, rays, vec![vec![0], vec![1]]).unwrap(),
        );
        let alpha = WeightedFan::constant(Arc::clone(&cx), 1, 1);
        // project to the x-axis
        let f = LatticeMap { matrix: IntMat::from_i64_rows(&[vec![1, 0]]) };
        let target = Arc::new(
            ConeComplex::with_all_faces(1, vec![iv(&[1]), iv(&[-1])], vec![vec![0], vec![1]])
                .unwrap(),
        );
        let pushed = push_forward(&f, &alpha, target).unwrap();
        assert!(pushed.is_zero());
    }

    #[test]
    fn degree_sums_weights() {
        let cx = Arc::new(ConeComplex::with_all_faces(1, vec![], vec![vec![]]).unwrap());
        let mut w = BTreeMap::new();
        w.insert(0, Int::from(3));
        let alpha = WeightedFan::new(Arc::clone(&cx), 0, w).unwrap();
        assert_eq!(degree(&alpha).unwrap(), Int::from(3));
        let empty = WeightedFan::new(cx, 0, BTreeMap::new()).unwrap();
        assert_eq!(degree(&empty).unwrap(), Int::zero());
    }

    #[test]
    fn refinement_and_stable_intersection() {
        // The fans of min(0, x, y) and min(0, 2x+y, x+2y): refine, put both
        // functions on the refinement, intersect twice. The expected degree
        // 3 is the displacement count: translating the second curve
        // generically, its only crossing with the line is ray (-1,2) against
        // ray (-1,-1), of multiplicity |det| = 3.
        let cx1 = plane_with_line();
        let rays2 = vec![iv(&[-1, 2]), iv(&[2, -1]), iv(&[-1, -1])];
        let cx2 = Arc::new(
            ConeComplex::with_all_faces(2, rays2, vec![vec![0, 1], vec![1, 2], vec![2, 0]])
                .unwrap(),
        );
        let refined = Arc::new(refine(&cx1, &cx2).unwrap());
        assert!(refined.cones_of_dim(2).count() >= 4);
        let plane = WeightedFan::constant(Arc::clone(&refined), 2, 1);
        // Interpolate both functions from their values on the refined rays.
        let vals1: Vec<Int> = refined
            .rays
            .iter()
            .map(|r| {
                [Int::zero(), r[0].clone(), r[1].clone()].into_iter().min().unwrap()
            })
            .collect();
        let vals2: Vec<Int> = refined
            .rays
            .iter()
            .map(|r| {
                [
                    Int::zero(),
                    Int::from(2) * &r[0] + &r[1],
                    r[0].clone() + Int::from(2) * &r[1],
                ]
                .into_iter()
                .min()
                .unwrap()
            })
            .collect();
        let phi1 = PLFunctionOnFan::from_ray_values(&refined, &vals1).unwrap();
        let phi2 = PLFunctionOnFan::from_ray_values(&refined, &vals2).unwrap();
        phi1.check_continuity(&refined).unwrap();
        phi2.check_continuity(&refined).unwrap();
        let ab = divisor_intersect(&phi2, &divisor_intersect(&phi1, &plane).unwrap()).unwrap();
        let ba = divisor_intersect(&phi1, &divisor_intersect(&phi2, &plane).unwrap()).unwrap();
        assert_eq!(degree(&ab).unwrap(), Int::from(3));
        assert_eq!(degree(&ba).unwrap(), Int::from(3));
    }

    #[test]
    fn restrict_weights_onto_refinement() {
        let cx1 = plane_with_line();
        let rays2 = vec![iv(&[-1, 2]), iv(&[2, -1]), iv(&[-1, -1])];
        let cx2 = Arc::new(
            ConeComplex::with_all_faces(2, rays2, vec![vec![0, 1], vec![1, 2], vec![2, 0]])
                .unwrap(),
        );
        let line = {
            let phi = min_line_function(&cx1);
            divisor_intersect(&phi, &WeightedFan::constant(Arc::clone(&cx1), 2, 1)).unwrap()
        };
        let refined = Arc::new(refine(&cx1, &cx2).unwrap());
        let moved = restrict_weights(&line, Arc::clone(&refined)).unwrap();
        assert!(check_balancing(&moved).unwrap().is_balanced());
        assert_eq!(moved.weights.len(), line.weights.len());
    }

    #[test]
    fn cocycle_degrees() {
        assert_eq!(ChartCocycle::tp1(3).c1_degree().unwrap(), Int::from(3));
        assert_eq!(ChartCocycle::tp1(0).c1_degree().unwrap(), Int::zero());
        let t = ChartCocycle::tp1(2).tensor(&ChartCocycle::tp1(-5)).unwrap();
        assert_eq!(t.c1_degree().unwrap(), Int::from(-3));
        // broken cocycle: antisymmetry violated
        let mut bad = ChartCocycle::tp1(1);
        bad.transitions.insert((0, 1), (Int::from(7), Rat::zero()));
        assert!(bad.c1_degree().is_err());
    }

    #[test]
    fn lattice_index_matches_spec_examples() {
        assert_eq!(lattice_index(&IntMat::from_i64_rows(&[vec![2, 0], vec![0, 3]])), Int::from(6));
        assert_eq!(lattice_index(&IntMat::from_i64_rows(&[vec![1, 1], vec![1, 1]])), Int::zero());
    }
}
