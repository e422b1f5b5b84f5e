//! Psi-class representatives and intersections on the genus-zero moduli
//! fans: iterated divisor intersections with locally chosen cross-ratio
//! Cartier data, pull-back comparison along the forgetful map, and the
//! dilaton push-forward.

use crate::cycles::{
    check_balancing, push_forward, degree, Int, LatticeMap, Rat, WeightedFan,
};
use crate::error::Error;
use crate::lattice::{solve_rational, to_rat_vec, transverse_generator};
use crate::moduli::{forgetful_map, ModuliFan, Split, Via};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Local Cartier data on the star of a face: an integer coefficient per
/// split-ray, giving the linear piece of the function on every adjacent cone
/// in its length coordinates.
pub type SplitCoefficients<'a> = Box<dyn Fn(&Split) -> Int + 'a>;

/// One corner-locus step against per-face local data. Min convention:
/// concave data yield nonnegative weights; psi data are fed in negated.
pub fn corner_step<'a>(
    fan: &ModuliFan,
    alpha: &WeightedFan,
    mut local_data: impl FnMut(usize) -> SplitCoefficients<'a>,
) -> Result<WeightedFan, Error> {
    let cx = &fan.complex;
    if alpha.dim == 0 {
        return Err(Error::Domain("cannot intersect a zero-dimensional cycle".into()));
    }
    let mut out: BTreeMap<usize, Int> = BTreeMap::new();
    for tau in cx.cones_of_dim(alpha.dim - 1) {
        let w = corner_weight_at(fan, alpha, tau, local_data(tau))?;
        if !w.is_zero() {
            out.insert(tau, w);
        }
    }
    WeightedFan::new(Arc::clone(cx), alpha.dim - 1, out)
}

/// The corner weight at a single face of the support.
pub fn corner_weight_at(
    fan: &ModuliFan,
    alpha: &WeightedFan,
    tau: usize,
    coeff: SplitCoefficients<'_>,
) -> Result<Int, Error> {
    let cx = &fan.complex;
    let adjacent: Vec<usize> = cx.parents[tau]
        .iter()
        .copied()
        .filter(|p| alpha.weights.contains_key(p))
        .collect();
    if adjacent.is_empty() {
        return Ok(Int::zero());
    }
    let tau_rays = cx.cone_ray_vectors(tau);
    let mut total = vec![Int::zero(); cx.ambient_rank];
    let mut sum_vals = Rat::zero();
    for &sigma in &adjacent {
        let v = transverse_generator(&tau_rays, &cx.cone_ray_vectors(sigma));
        let w = &alpha.weights[&sigma];
        // Coordinates of v in sigma's length basis.
        let coords = solve_rational(&cx.cone_ray_vectors(sigma), &to_rat_vec(&v))
            .ok_or_else(|| Error::Inconsistent("normal vector outside its cone span".into()))?;
        let val: Rat = fan.trees[sigma]
            .splits
            .iter()
            .zip(&coords)
            .map(|(&s, c)| Rat::from(coeff(&fan.splits[s])) * c)
            .sum();
        sum_vals += Rat::from(w.clone()) * val;
        for i in 0..total.len() {
            let add = w * &v[i];
            total[i] += add;
        }
    }
    let correction = if tau_rays.is_empty() {
        if !total.iter().all(|x| x.is_zero()) {
            return Err(Error::Domain(
                "cycle not balanced at the origin; intersection undefined".into(),
            ));
        }
        Rat::zero()
    } else {
        let coords = solve_rational(&tau_rays, &to_rat_vec(&total)).ok_or_else(|| {
            Error::Domain(format!("cycle not balanced at face {tau}; intersection undefined"))
        })?;
        fan.trees[tau]
            .splits
            .iter()
            .zip(&coords)
            .map(|(&s, c)| Rat::from(coeff(&fan.splits[s])) * c)
            .sum()
    };
    let weight = correction - sum_vals;
    if !weight.is_integer() {
        return Err(Error::Inconsistent(format!(
            "non-integer corner weight {weight} at face {tau}"
        )));
    }
    Ok(weight.to_integer())
}

/// The tie-broken flag choice for the psi Cartier representative at a face:
/// the two directions at the vertex carrying leg `i` whose reachable mark
/// sets have the smallest minima; returns those minima (j, k).
pub fn choose_flags(fan: &ModuliFan, cone: usize, i: u32) -> Result<(u32, u32), Error> {
    let tree = &fan.trees[cone];
    let v = tree.leg_vertex[(i - 1) as usize];
    let mut mins: Vec<u32> = tree
        .directions_at(v)
        .into_iter()
        .filter(|d| d.via != Via::Leg(i))
        .map(|d| *d.marks.iter().min().expect("every direction reaches a mark"))
        .collect();
    mins.sort_unstable();
    if mins.len() < 2 {
        return Err(Error::Domain(format!("vertex of leg {i} has too few directions")));
    }
    Ok((mins[0], mins[1]))
}

/// The negated common-path Cartier data for psi_i with marks (j, k): the
/// local function is minus the length of the shared initial segment of the
/// paths from the leg-i vertex towards j and towards k.
pub fn psi_local_data<'a>(i: u32, j: u32, k: u32) -> SplitCoefficients<'a> {
    Box::new(move |s: &Split| {
        if s.separates(i, j) && s.separates(i, k) {
            -Int::one()
        } else {
            Int::zero()
        }
    })
}

/// Negated boundary data: minus the length of the edge realizing `target`.
pub fn boundary_local_data<'a>(target: Split) -> SplitCoefficients<'a> {
    Box::new(move |s: &Split| if *s == target { -Int::one() } else { Int::zero() })
}

/// Intersect a cycle with the psi_i divisor, choosing Cartier flags freshly
/// at every face.
pub fn psi_intersect(fan: &ModuliFan, alpha: &WeightedFan, i: u32) -> Result<WeightedFan, Error> {
    psi_intersect_with(fan, alpha, i, &|fan, cone| choose_flags(fan, cone, i))
}

pub fn psi_intersect_with(
    fan: &ModuliFan,
    alpha: &WeightedFan,
    i: u32,
    chooser: &dyn Fn(&ModuliFan, usize) -> Result<(u32, u32), Error>,
) -> Result<WeightedFan, Error> {
    let mut failure = None;
    let result = corner_step(fan, alpha, |tau| {
        match chooser(fan, tau) {
            Ok((j, k)) => psi_local_data(i, j, k),
            Err(e) => {
                failure = Some(e);
                Box::new(|_| Int::zero())
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => result,
    }
}

/// The weight-1 representative of psi_i on M_{0,n}: supported on the cones
/// whose tree has leg i at a four-valent vertex.
pub struct PsiRepresentative {
    pub n: u32,
    pub i: u32,
    pub fan: WeightedFan,
}

pub fn psi_representative(fan: &ModuliFan, i: u32) -> Result<PsiRepresentative, Error> {
    if fan.n < 4 {
        return Err(Error::Domain("psi representatives need n >= 4".into()));
    }
    if i < 1 || i > fan.n {
        return Err(Error::Domain(format!("mark {i} out of range")));
    }
    let full = WeightedFan::constant(Arc::clone(&fan.complex), fan.top_dim(), 1);
    let fan_cycle = psi_intersect(fan, &full, i)?;
    Ok(PsiRepresentative { n: fan.n, i, fan: fan_cycle })
}

/// Does the tree of this cone have leg i at a four-valent vertex, all other
/// vertices trivalent?
pub fn leg_at_four_valent(fan: &ModuliFan, cone: usize, i: u32) -> bool {
    let tree = &fan.trees[cone];
    let v = tree.leg_vertex[(i - 1) as usize];
    let val_of = |u: usize| tree.directions_at(u).len();
    if val_of(v) != 4 {
        return false;
    }
    (0..tree.vertex_count).all(|u| u == v || val_of(u) == 3)
}

/// Degree of the product psi_1^{a_1} ... psi_n^{a_n} on M_{0,n}.
pub fn psi_product_degree(fan: &ModuliFan, exponents: &[u32]) -> Result<Int, Error> {
    psi_product_degree_with(fan, exponents, &|fan, cone, i| choose_flags(fan, cone, i))
}

pub fn psi_product_degree_with(
    fan: &ModuliFan,
    exponents: &[u32],
    chooser: &dyn Fn(&ModuliFan, usize, u32) -> Result<(u32, u32), Error>,
) -> Result<Int, Error> {
    let n = fan.n;
    if exponents.len() != n as usize {
        return Err(Error::Domain("one exponent per mark required".into()));
    }
    let total: u32 = exponents.iter().sum();
    if total != n - 3 {
        return Err(Error::Domain(format!(
            "exponents must sum to n-3 = {}, got {total}",
            n - 3
        )));
    }
    let mut cycle = WeightedFan::constant(Arc::clone(&fan.complex), fan.top_dim(), 1);
    for (idx, &a) in exponents.iter().enumerate() {
        let i = idx as u32 + 1;
        for _ in 0..a {
            cycle = psi_intersect_with(fan, &cycle, i, &|f, c| chooser(f, c, i))?;
        }
    }
    degree(&cycle)
}

/// Pull-back comparison report: on one-dimensional classes of M_{0,n+1},
/// deg(psi_i . C) = deg(pi*psi_i . C) + deg(D_{i,*} . C).
pub struct PullbackReport {
    pub n: u32,
    pub i: u32,
    pub classes: Vec<PullbackCase>,
}

pub struct PullbackCase {
    pub label: String,
    pub psi: Int,
    pub pulled: Int,
    pub boundary: Int,
}

impl PullbackCase {
    pub fn holds(&self) -> bool {
        self.psi == self.pulled.clone() + self.boundary.clone()
    }
}

/// Degree of a divisor given by local split data against a one-dimensional
/// cycle.
pub fn divisor_degree_on_curve<'a>(
    fan: &ModuliFan,
    curve: &WeightedFan,
    mut local_data: impl FnMut(usize) -> SplitCoefficients<'a>,
) -> Result<Int, Error> {
    if curve.dim != 1 {
        return Err(Error::Domain("expected a one-dimensional class".into()));
    }
    let pt = corner_step(fan, curve, |tau| local_data(tau))?;
    degree(&pt)
}

/// The pulled-back psi data: common-path length measured in the stabilized
/// n-mark world (splits with the star mark removed and renormalized).
pub fn pulled_psi_local_data<'a>(n: u32, i: u32, j: u32, k: u32) -> SplitCoefficients<'a> {
    Box::new(move |s: &Split| {
        // Splits of the (n+1)-fan are normalized not to contain n+1; the
        // stabilized split is the renormalization within 1..n.
        let stab = Split::normalize(&s.0, n);
        if !stab.is_valid(n) {
            return Int::zero();
        }
        if stab.separates(i, j) && stab.separates(i, k) {
            -Int::one()
        } else {
            Int::zero()
        }
    })
}

/// Run the pull-back identity over a library of one-dimensional classes
/// obtained by intersecting psi and boundary divisors down to curves.
pub fn pullback_check(n: u32, i: u32) -> Result<PullbackReport, Error> {
    let fan = ModuliFan::build(n + 1)?;
    let star = n + 1;
    if i < 1 || i > n {
        return Err(Error::Domain("the compared mark must not be the forgotten one".into()));
    }
    // The {i, *} split, normalized away from the star mark.
    let side: std::collections::BTreeSet<u32> = [i, star].into_iter().collect();
    let d_split = Split::normalize(&side, star);

    let full = WeightedFan::constant(Arc::clone(&fan.complex), fan.top_dim(), 1);
    let mut curves: Vec<(String, WeightedFan)> = vec![];
    let divisors: Vec<(String, Box<dyn Fn(&ModuliFan, &WeightedFan) -> Result<WeightedFan, Error>>)> = {
        let mut d: Vec<(String, Box<dyn Fn(&ModuliFan, &WeightedFan) -> Result<WeightedFan, Error>>)> =
            vec![];
        for k in 1..=star {
            d.push((
                format!("psi_{k}"),
                Box::new(move |f: &ModuliFan, a: &WeightedFan| psi_intersect(f, a, k)),
            ));
        }
        for (sid, s) in fan.splits.iter().enumerate() {
            let split = s.clone();
            d.push((
                format!("bd_{sid}"),
                Box::new(move |f: &ModuliFan, a: &WeightedFan| {
                    let split = split.clone();
                    corner_step(f, a, move |_| boundary_local_data(split.clone()))
                }),
            ));
        }
        d
    };
    // All products of top_dim - 1 divisors drawn from the library, cut down
    // from the fundamental cycle.
    let depth = fan.top_dim() - 1;
    let mut stack: Vec<(String, WeightedFan, usize)> = vec![("".into(), full, 0)];
    while let Some((label, cycle, used)) = stack.pop() {
        if cycle.dim == 1 {
            if !cycle.is_zero() {
                curves.push((label.trim_start_matches('.').to_string(), cycle));
            }
            continue;
        }
        if cycle.dim == 0 || used >= depth {
            continue;
        }
        for (name, div) in &divisors {
            let next = div(&fan, &cycle)?;
            if next.is_zero() {
                continue;
            }
            stack.push((format!("{label}.{name}"), next, used + 1));
        }
    }

    let mut classes = vec![];
    for (label, curve) in curves {
        if !check_balancing(&curve)?.is_balanced() {
            return Err(Error::Inconsistent(format!("curve class {label} is not balanced")));
        }
        let psi = divisor_degree_on_curve(&fan, &curve, |tau| {
            let (j, k) = choose_flags(&fan, tau, i).expect("choice exists");
            psi_local_data(i, j, k)
        })?;
        let pulled = divisor_degree_on_curve(&fan, &curve, |_| {
            // Tie-break in the n-mark world at the image of the origin: the
            // two smallest marks different from i.
            let mut marks = (1..=n).filter(|&m| m != i);
            let j = marks.next().unwrap();
            let k = marks.next().unwrap();
            pulled_psi_local_data(n, i, j, k)
        })?;
        let boundary =
            divisor_degree_on_curve(&fan, &curve, |_| boundary_local_data(d_split.clone()))?;
        classes.push(PullbackCase { label, psi, pulled, boundary });
    }
    Ok(PullbackReport { n, i, classes })
}

/// Push psi_* . [M_{0,n+1}] down the forgetful map; equals (n-2) [M_{0,n}].
pub struct DilatonResult {
    pub n: u32,
    pub factor: Int,
    pub pushed: WeightedFan,
    pub matches: bool,
}

pub fn dilaton_pushforward(n: u32) -> Result<DilatonResult, Error> {
    let fan_small = ModuliFan::build(n)?;
    let fan_big = ModuliFan::build(n + 1)?;
    let star = n + 1;
    let full = WeightedFan::constant(Arc::clone(&fan_big.complex), fan_big.top_dim(), 1);
    let psi_star = psi_intersect(&fan_big, &full, star)?;
    let f = forgetful_map(&fan_big, &fan_small)?;
    let pushed = push_forward(
        &LatticeMap { matrix: f.matrix },
        &psi_star,
        Arc::clone(&fan_small.complex),
    )?;
    let expected = Int::from(n as i64 - 2);
    let tops = fan_small.top_cones();
    let matches = pushed.weights.len() == tops.len()
        && tops.iter().all(|c| pushed.weights.get(c) == Some(&expected));
    Ok(DilatonResult { n, factor: expected, pushed, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_on_m04_is_the_origin() {
        let fan = ModuliFan::build(4).unwrap();
        let rep = psi_representative(&fan, 1).unwrap();
        assert_eq!(rep.fan.dim, 0);
        let origin = fan.origin();
        assert_eq!(rep.fan.weights.len(), 1);
        assert_eq!(rep.fan.weights[&origin], Int::one());
        assert_eq!(degree(&rep.fan).unwrap(), Int::one());
    }

    #[test]
    fn psi_representative_support_m05() {
        let fan = ModuliFan::build(5).unwrap();
        let rep = psi_representative(&fan, 1).unwrap();
        for c in fan.complex.cones_of_dim(1) {
            let expected = leg_at_four_valent(&fan, c, 1);
            let w = rep.fan.weights.get(&c);
            if expected {
                assert_eq!(w, Some(&Int::one()), "cone {c}");
            } else {
                assert_eq!(w, None, "cone {c}");
            }
        }
        assert!(check_balancing(&rep.fan).unwrap().is_balanced());
    }

    #[test]
    fn psi_products_small() {
        let fan = ModuliFan::build(5).unwrap();
        assert_eq!(psi_product_degree(&fan, &[2, 0, 0, 0, 0]).unwrap(), Int::one());
        assert_eq!(psi_product_degree(&fan, &[1, 1, 0, 0, 0]).unwrap(), Int::from(2));
        assert!(psi_product_degree(&fan, &[1, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn dilaton_small() {
        for n in [3u32, 4] {
            let r = dilaton_pushforward(n).unwrap();
            assert!(r.matches, "dilaton fails at n={n}");
            assert_eq!(r.factor, Int::from(n as i64 - 2));
        }
    }

    #[test]
    fn pulled_psi_vanishes_on_star_splits() {
        // Splits that collapse under stabilization (fiber directions)
        // contribute nothing to the pulled-back psi data.
        let n = 4u32;
        let data = pulled_psi_local_data(n, 1, 2, 3);
        for j in 1..=n {
            let side: std::collections::BTreeSet<u32> =
                (1..=n).filter(|&m| m != j).collect();
            let s = Split(side);
            assert!(data(&s).is_zero(), "star split at {j}");
        }
    }

    #[test]
    fn forgetful_push_of_fundamental_cycle_drops_dimension() {
        let fan5 = ModuliFan::build(5).unwrap();
        let fan4 = ModuliFan::build(4).unwrap();
        let f = forgetful_map(&fan5, &fan4).unwrap();
        let full = WeightedFan::constant(Arc::clone(&fan5.complex), fan5.top_dim(), 1);
        let pushed = push_forward(
            &LatticeMap { matrix: f.matrix },
            &full,
            Arc::clone(&fan4.complex),
        )
        .unwrap();
        assert!(pushed.is_zero());
    }

    #[test]
    fn pullback_identity_m05() {
        let rep = pullback_check(4, 1).unwrap();
        assert!(!rep.classes.is_empty());
        for c in &rep.classes {
            assert!(c.holds(), "class {}: {} != {} + {}", c.label, c.psi, c.pulled, c.boundary);
        }
    }
}
