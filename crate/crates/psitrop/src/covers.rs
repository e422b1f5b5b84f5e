//! One-dimensional spaces of tropical admissible covers with ramification
//! profile ((d), (d), (2,1^{d-2}), (2,1^{d-2})): the four combinatorial
//! classes of rays, their counts, weights and map slopes, and the resulting
//! source, branch and psi degrees.

use crate::error::Error;
use crate::graph::{Edge, StableGraph, VertexId};
use crate::moduli::ModuliFan;
use crate::psi::psi_product_degree;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoverClass {
    I,
    II,
    III,
    IV,
}

/// Index of the M_{0,4} ray hit by the branch map; marks 1,2 carry the
/// full ramification (d), marks 3,4 carry (2,1^{d-2}).
/// 0 = {12|34}, 1 = {13|24}, 2 = {14|23}.
pub type TargetRay = usize;

/// One combinatorial class of rays of the cover space.
#[derive(Clone, Debug)]
pub struct CoverClassRecord {
    pub class: CoverClass,
    pub d: u32,
    /// Parallel-edge parameter, class III only (1 <= a <= d-1).
    pub a: Option<u32>,
    pub count: Int,
    pub weight: Rat,
    /// Slope of the composite to the one-marked moduli ray (loop length),
    /// including the lcm(2,d) lattice refinement.
    pub source_slope: Rat,
    /// Slope of the branch map onto its target ray of M_{0,4}.
    pub branch_slope: Rat,
    pub target_ray: TargetRay,
}

fn factorial(k: i64) -> Option<Int> {
    if k < 0 {
        return None;
    }
    let mut f = Int::one();
    for i in 2..=k {
        f *= Int::from(i);
    }
    Some(f)
}

fn lcm2(d: u32) -> Int {
    Int::from(2).lcm(&Int::from(d))
}

/// The class table for degree d: counts, weights and slopes for the four
/// classes of rays (absent classes contribute no records).
pub fn cover_class_table(d: u32) -> Result<Vec<CoverClassRecord>, Error> {
    if d < 2 {
        return Err(Error::Domain(format!("cover degree must be at least 2, got {d}")));
    }
    let di = d as i64;
    let lcm = lcm2(d);
    let fd2 = factorial(di - 2).expect("d >= 2");
    let fd2_sq = Rat::from(&fd2 * &fd2);
    let mut records = vec![];

    // Class I: the two d-fold vertices joined through the doubled loop of
    // unit-dilation edges; all bounded edges have dilation one.
    records.push(CoverClassRecord {
        class: CoverClass::I,
        d,
        a: None,
        count: fd2.clone(),
        weight: Rat::from(factorial(di - 1).expect("d >= 2")),
        source_slope: Rat::from(Int::from(2) * &lcm),
        branch_slope: Rat::from(lcm.clone()),
        target_ray: 0,
    });

    // Class II: genus-one vertex with two dilation-two edges; the loop is
    // contracted in the one-marked source, so the source slope vanishes.
    if let Some(fd4) = factorial(di - 4) {
        let choose = Int::from((di - 2) * (di - 3) / 2);
        let count = &choose * &choose * fd4.clone();
        let weight = Rat::new(
            fd4 * Int::from((di - 1) * (di - 2) * (di - 3)),
            Int::from(3),
        );
        if !count.is_zero() {
            records.push(CoverClassRecord {
                class: CoverClass::II,
                d,
                a: None,
                count,
                weight,
                source_slope: Rat::zero(),
                branch_slope: Rat::from(Int::from(2) * &lcm),
                target_ray: 0,
            });
        }
    }

    // Class III: parallel edges of dilations a and d-a joining the two
    // ramified vertices; one ray per (a, pairing of the branch marks).
    for a in 1..d {
        let ai = a as i64;
        let g = Int::from(ai).gcd(&Int::from(di - ai));
        let l = Int::from(ai).lcm(&Int::from(di - ai));
        let weight = Rat::from(&g * Int::one()) * fd2_sq.clone();
        let branch_slope = Rat::from(&lcm * &l);
        let source_slope = branch_slope.clone()
            * (Rat::new(Int::one(), Int::from(ai)) + Rat::new(Int::one(), Int::from(di - ai)));
        for target_ray in [1usize, 2usize] {
            records.push(CoverClassRecord {
                class: CoverClass::III,
                d,
                a: Some(a),
                count: Int::one(),
                weight: weight.clone(),
                source_slope: source_slope.clone(),
                branch_slope: branch_slope.clone(),
                target_ray,
            });
        }
    }

    // Class IV: genus-one vertex with one dilation-three edge whose far
    // vertex carries a double point over each branch mark.
    if let Some(fd3) = factorial(di - 3) {
        let count = Int::from((di - 2) * (di - 2)) * fd3.clone();
        let weight = Rat::new(fd3 * Int::from((di - 1) * (di - 2)), Int::from(3));
        if !count.is_zero() {
            records.push(CoverClassRecord {
                class: CoverClass::IV,
                d,
                a: None,
                count,
                weight,
                source_slope: Rat::zero(),
                branch_slope: Rat::from(Int::from(3) * &lcm),
                target_ray: 0,
            });
        }
    }

    for r in &records {
        debug_assert!(!r.count.is_negative());
        debug_assert!(r.count.is_zero() || r.weight.is_positive());
    }
    Ok(records)
}

/// Degree of the source map: sum of count * weight * source slope, checked
/// against the closed form 2 lcm(2,d) [(d-2)!]^2 (d-1)(d+1).
pub fn source_degree(d: u32) -> Result<Int, Error> {
    let records = cover_class_table(d)?;
    let total: Rat = records
        .iter()
        .map(|r| Rat::from(r.count.clone()) * &r.weight * &r.source_slope)
        .sum();
    let di = d as i64;
    let fd2 = factorial(di - 2).unwrap();
    let closed = Int::from(2) * lcm2(d) * &fd2 * &fd2 * Int::from((di - 1) * (di + 1));
    if total != Rat::from(closed.clone()) {
        return Err(Error::Inconsistent(format!(
            "source degree {total} does not match the closed form {closed} at d={d}"
        )));
    }
    Ok(closed)
}

/// Branch degree: the per-ray push-forward totals onto the three rays of
/// M_{0,4} must agree and match lcm(2,d) [(d-2)!]^2 (d-1) d (d+1) / 6.
pub fn branch_degree(d: u32) -> Result<Int, Error> {
    let records = cover_class_table(d)?;
    let mut per_ray = [Rat::zero(), Rat::zero(), Rat::zero()];
    for r in &records {
        per_ray[r.target_ray] += Rat::from(r.count.clone()) * &r.weight * &r.branch_slope;
    }
    if per_ray[0] != per_ray[1] || per_ray[1] != per_ray[2] {
        return Err(Error::Inconsistent(format!(
            "branch push-forward ray totals disagree at d={d}: {} {} {}",
            per_ray[0], per_ray[1], per_ray[2]
        )));
    }
    let di = d as i64;
    let fd2 = factorial(di - 2).unwrap();
    let closed_num = lcm2(d) * &fd2 * &fd2 * Int::from((di - 1) * di * (di + 1));
    let closed = Rat::new(closed_num, Int::from(6));
    if per_ray[0] != closed {
        return Err(Error::Inconsistent(format!(
            "branch degree {} does not match the closed form {closed} at d={d}",
            per_ray[0]
        )));
    }
    if !closed.is_integer() {
        return Err(Error::Inconsistent("branch degree is not an integer".into()));
    }
    Ok(closed.to_integer())
}

/// Degree of psi against the cover cycle, via the projection formula
/// d psi_1-pullback = branch-pullback of psi on M_{0,4}.
pub fn psi_covers_degree(d: u32) -> Result<Rat, Error> {
    let branch = branch_degree(d)?;
    let fan4 = ModuliFan::build(4)?;
    let psi_m04 = psi_product_degree(&fan4, &[1, 0, 0, 0])?;
    let value = Rat::new(branch * psi_m04, Int::from(d));
    let di = d as i64;
    let fd2 = factorial(di - 2).unwrap();
    let closed = Rat::new(
        lcm2(d) * &fd2 * &fd2 * Int::from((di - 1) * (di + 1)),
        Int::from(6),
    );
    if value != closed {
        return Err(Error::Inconsistent(format!(
            "psi degree {value} does not match the closed form {closed} at d={d}"
        )));
    }
    let source = source_degree(d)?;
    let ratio = value.clone() / Rat::from(source);
    if ratio != Rat::new(Int::one(), Int::from(12)) {
        return Err(Error::Inconsistent(format!("psi/source ratio is {ratio}, not 1/12")));
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Harmonic cover data and the local Riemann-Hurwitz check
// ---------------------------------------------------------------------------

/// A harmonic map of stable graphs with local degrees and edge dilations.
#[derive(Clone, Debug)]
pub struct HarmonicCoverData {
    pub source: StableGraph,
    pub target: StableGraph,
    pub vertex_map: Vec<VertexId>,
    /// Per source edge: the target edge.
    pub edge_map: Vec<usize>,
    /// Per source edge: whether its slot order is reversed over the target.
    pub edge_flip: Vec<bool>,
    /// Local degree d_x per source vertex.
    pub local_degree: Vec<u32>,
    /// Dilation factor per source edge.
    pub dilation: Vec<u32>,
}

/// Verify 2g_x - 2 + val(x) = d_x (2g_{f(x)} - 2 + val(f(x))) at every
/// source vertex, together with harmonicity of the dilation factors over
/// every target flag.
pub fn local_rh_check(data: &HarmonicCoverData) -> Result<bool, Error> {
    let s = &data.source;
    let t = &data.target;
    s.check_structure()?;
    t.check_structure()?;
    if data.vertex_map.len() != s.vertex_count()
        || data.edge_map.len() != s.edges.len()
        || data.edge_flip.len() != s.edges.len()
        || data.local_degree.len() != s.vertex_count()
        || data.dilation.len() != s.edges.len()
    {
        return Err(Error::Shape("cover data arrays do not match the source graph".into()));
    }
    for (e, &te) in data.edge_map.iter().enumerate() {
        if te >= t.edges.len() {
            return Err(Error::Structural(format!("edge {e} maps to missing target edge {te}")));
        }
        if s.edges[e].leg != t.edges[te].leg || s.edges[e].bounded != t.edges[te].bounded {
            return Err(Error::Domain("edge types are not preserved".into()));
        }
        if data.dilation[e] == 0 {
            return Err(Error::Domain(format!("edge {e} is contracted; covers may not contract")));
        }
        // Endpoint compatibility.
        for slot in 0..s.edges[e].ends.len() {
            let tv = data.vertex_map[s.edges[e].ends[slot]];
            let tslot = if data.edge_flip[e] { 1 - slot } else { slot };
            if t.edges[te].ends[tslot] != tv {
                return Err(Error::Domain(format!("edge {e} endpoints do not commute with the map")));
            }
        }
    }
    // Local Riemann-Hurwitz at vertices.
    for x in 0..s.vertex_count() {
        let fx = data.vertex_map[x];
        let lhs = 2 * s.genus_of_vertex[x] as i64 - 2 + s.valence(x) as i64;
        let rhs =
            data.local_degree[x] as i64 * (2 * t.genus_of_vertex[fx] as i64 - 2 + t.valence(fx) as i64);
        if lhs != rhs {
            return Ok(false);
        }
    }
    // Harmonicity: for each source vertex and each target flag at its image,
    // the dilations of the source flags lying over it sum to d_x.
    for x in 0..s.vertex_count() {
        let fx = data.vertex_map[x];
        for tf in t.flags_at(fx) {
            let mut sum = 0u32;
            for (e, slot) in s.flags_at(x) {
                let mapped = (data.edge_map[e], if data.edge_flip[e] { 1 - slot } else { slot });
                if mapped == tf {
                    sum += data.dilation[e];
                }
            }
            if sum != data.local_degree[x] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Build the source and target graphs of one representative cover in each
/// class (used by the enumeration invariants and the CLI examples).
pub fn class_representative(d: u32, class: CoverClass, a: u32) -> Result<HarmonicCoverData, Error> {
    if d < 2 {
        return Err(Error::Domain("degree must be at least 2".into()));
    }
    // Target: two genus-zero vertices joined by one bounded edge; marks
    // 1,2 at the left vertex, 3,4 at the right (classes I, II, IV) or 1,3
    // left and 2,4 right (class III).
    let marks_left: Vec<&str> = match class {
        CoverClass::III => vec!["1", "3"],
        _ => vec!["1", "2"],
    };
    let marks_right: Vec<&str> = match class {
        CoverClass::III => vec!["2", "4"],
        _ => vec!["3", "4"],
    };
    let mut target = StableGraph {
        genus_of_vertex: vec![0, 0],
        edges: vec![Edge { ends: vec![0, 1], bounded: true, leg: false }],
        marks: BTreeMap::new(),
    };
    for m in &marks_left {
        target.edges.push(Edge { ends: vec![0], bounded: false, leg: true });
        target.marks.insert(m.to_string(), target.edges.len() - 1);
    }
    for m in &marks_right {
        target.edges.push(Edge { ends: vec![1], bounded: false, leg: true });
        target.marks.insert(m.to_string(), target.edges.len() - 1);
    }
    let t_edge = 0usize;
    let t_left_leg = |i: usize| 1 + i;
    let t_right_leg = |i: usize| 1 + marks_left.len() + i;

    let mut source = StableGraph { genus_of_vertex: vec![], edges: vec![], marks: BTreeMap::new() };
    let mut vertex_map: Vec<VertexId> = vec![];
    let mut edge_map: Vec<usize> = vec![];
    let mut edge_flip: Vec<bool> = vec![];
    let mut local_degree: Vec<u32> = vec![];
    let mut dilation: Vec<u32> = vec![];
    let mut mark_counter = 0usize;
    let add_vertex = |source: &mut StableGraph,
                          vertex_map: &mut Vec<VertexId>,
                          local_degree: &mut Vec<u32>,
                          genus: u32,
                          image: VertexId,
                          dx: u32| {
        source.genus_of_vertex.push(genus);
        vertex_map.push(image);
        local_degree.push(dx);
        source.genus_of_vertex.len() - 1
    };
    let add_edge = |source: &mut StableGraph,
                        edge_map: &mut Vec<usize>,
                        edge_flip: &mut Vec<bool>,
                        dilation: &mut Vec<u32>,
                        ends: Vec<VertexId>,
                        image: usize,
                        leg: bool,
                        dil: u32,
                        marks: &mut usize| {
        source.edges.push(Edge { ends, bounded: !leg && true, leg });
        if leg {
            source.edges.last_mut().unwrap().bounded = false;
            *marks += 1;
            source.marks.insert(format!("s{marks}"), source.edges.len() - 1);
        }
        edge_map.push(image);
        edge_flip.push(false);
        dilation.push(dil);
    };

    match class {
        CoverClass::I => {
            let v0 = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 0, d);
            // two d-fold legs over the left marks
            for i in 0..2 {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0], t_left_leg(i), true, d, &mut mark_counter);
            }
            // the doubled vertex carrying the two 2-fold leg points
            let w = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 2);
            for e in 0..2 {
                let _ = e;
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, w], t_edge, false, 1, &mut mark_counter);
            }
            for i in 0..2 {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(i), true, 2, &mut mark_counter);
            }
            // d-2 plain sheets
            for _ in 0..d - 2 {
                let u = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 1);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, u], t_edge, false, 1, &mut mark_counter);
                for i in 0..2 {
                    add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![u], t_right_leg(i), true, 1, &mut mark_counter);
                }
            }
        }
        CoverClass::II => {
            if d < 4 {
                return Err(Error::Domain("class II requires d >= 4".into()));
            }
            let v0 = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 1, 0, d);
            for i in 0..2 {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0], t_left_leg(i), true, d, &mut mark_counter);
            }
            for k in 0..2 {
                // dilation-2 edge whose far vertex doubles over one right mark
                let w = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 2);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, w], t_edge, false, 2, &mut mark_counter);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(k), true, 2, &mut mark_counter);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(1 - k), true, 1, &mut mark_counter);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(1 - k), true, 1, &mut mark_counter);
            }
            for _ in 0..d - 4 {
                let u = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 1);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, u], t_edge, false, 1, &mut mark_counter);
                for i in 0..2 {
                    add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![u], t_right_leg(i), true, 1, &mut mark_counter);
                }
            }
        }
        CoverClass::III => {
            if a < 1 || a >= d {
                return Err(Error::Domain("class III needs 1 <= a <= d-1".into()));
            }
            let va = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 0, d);
            let vb = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, d);
            // d-fold legs over the two (d)-marks
            add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![va], t_left_leg(0), true, d, &mut mark_counter);
            add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![vb], t_right_leg(0), true, d, &mut mark_counter);
            // the parallel edges of dilations a, d-a
            add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![va, vb], t_edge, false, a, &mut mark_counter);
            add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![va, vb], t_edge, false, d - a, &mut mark_counter);
            // ramification (2,1^{d-2}) legs at each side
            for (v, leg) in [(va, t_left_leg(1)), (vb, t_right_leg(1))] {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v], leg, true, 2, &mut mark_counter);
                for _ in 0..d - 2 {
                    add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v], leg, true, 1, &mut mark_counter);
                }
            }
        }
        CoverClass::IV => {
            if d < 3 {
                return Err(Error::Domain("class IV requires d >= 3".into()));
            }
            let v0 = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 1, 0, d);
            for i in 0..2 {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0], t_left_leg(i), true, d, &mut mark_counter);
            }
            let w = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 3);
            add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, w], t_edge, false, 3, &mut mark_counter);
            for i in 0..2 {
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(i), true, 2, &mut mark_counter);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![w], t_right_leg(i), true, 1, &mut mark_counter);
            }
            for _ in 0..d - 3 {
                let u = add_vertex(&mut source, &mut vertex_map, &mut local_degree, 0, 1, 1);
                add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![v0, u], t_edge, false, 1, &mut mark_counter);
                for i in 0..2 {
                    add_edge(&mut source, &mut edge_map, &mut edge_flip, &mut dilation, vec![u], t_right_leg(i), true, 1, &mut mark_counter);
                }
            }
        }
    }

    Ok(HarmonicCoverData {
        source,
        target,
        vertex_map,
        edge_map,
        edge_flip,
        local_degree,
        dilation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_d2() {
        let t = cover_class_table(2).unwrap();
        let i: Vec<_> = t.iter().filter(|r| r.class == CoverClass::I).collect();
        assert_eq!(i.len(), 1);
        assert_eq!(i[0].count, Int::one());
        assert_eq!(i[0].weight, Rat::one());
        let iii: Vec<_> = t.iter().filter(|r| r.class == CoverClass::III).collect();
        let total: Int = iii.iter().map(|r| r.count.clone()).sum();
        assert_eq!(total, Int::from(2));
        assert!(iii.iter().all(|r| r.a == Some(1) && r.weight == Rat::one()));
        assert!(t.iter().all(|r| r.class != CoverClass::II && r.class != CoverClass::IV));
    }

    #[test]
    fn class_ii_count_at_d4() {
        let t = cover_class_table(4).unwrap();
        let ii: Vec<_> = t.iter().filter(|r| r.class == CoverClass::II).collect();
        assert_eq!(ii.len(), 1);
        assert_eq!(ii[0].count, Int::one());
    }

    #[test]
    fn class_iii_weights_at_d3() {
        let t = cover_class_table(3).unwrap();
        for r in t.iter().filter(|r| r.class == CoverClass::III) {
            assert_eq!(r.weight, Rat::one());
        }
    }

    #[test]
    fn degrees_small() {
        assert_eq!(source_degree(2).unwrap(), Int::from(12));
        assert_eq!(source_degree(3).unwrap(), Int::from(96));
        assert_eq!(source_degree(4).unwrap(), Int::from(480));
        assert_eq!(branch_degree(2).unwrap(), Int::from(2));
        assert_eq!(branch_degree(3).unwrap(), Int::from(24));
        assert_eq!(branch_degree(4).unwrap(), Int::from(160));
        assert_eq!(psi_covers_degree(2).unwrap(), Rat::from(Int::from(1)));
        assert_eq!(psi_covers_degree(3).unwrap(), Rat::from(Int::from(8)));
        assert_eq!(psi_covers_degree(4).unwrap(), Rat::from(Int::from(40)));
    }

    #[test]
    fn class_iii_ray_contribution_independent_of_a() {
        for d in 2..=8u32 {
            let expected = Rat::from(lcm2(d) * Int::from(d as i64))
                * Rat::from(factorial(d as i64 - 2).unwrap().pow(2));
            for r in cover_class_table(d).unwrap() {
                if r.class == CoverClass::III {
                    assert_eq!(r.weight.clone() * &r.source_slope, expected, "d={d} a={:?}", r.a);
                }
            }
        }
    }

    #[test]
    fn representatives_pass_rh() {
        for d in 2..=6u32 {
            assert!(local_rh_check(&class_representative(d, CoverClass::I, 0).unwrap()).unwrap());
            if d >= 4 {
                assert!(local_rh_check(&class_representative(d, CoverClass::II, 0).unwrap()).unwrap());
            }
            for a in 1..d {
                assert!(
                    local_rh_check(&class_representative(d, CoverClass::III, a).unwrap()).unwrap()
                );
            }
            if d >= 3 {
                assert!(local_rh_check(&class_representative(d, CoverClass::IV, 0).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn broken_harmonicity_is_detected() {
        let mut data = class_representative(3, CoverClass::III, 1).unwrap();
        // Corrupt one dilation: fiber sums no longer match.
        data.dilation[2] = 2;
        data.local_degree[0] = 3;
        assert!(!local_rh_check(&data).unwrap());
    }

    #[test]
    fn source_genus_is_one() {
        for d in 2..=5u32 {
            let data = class_representative(d, CoverClass::I, 0).unwrap();
            assert_eq!(data.source.genus(), 1, "class I source genus at d={d}");
            let data = class_representative(d, CoverClass::III, 1).unwrap();
            assert_eq!(data.source.genus(), 1, "class III source genus at d={d}");
            if d >= 3 {
                let data = class_representative(d, CoverClass::IV, 0).unwrap();
                assert_eq!(data.source.genus(), 1, "class IV source genus at d={d}");
            }
            if d >= 4 {
                let data = class_representative(d, CoverClass::II, 0).unwrap();
                assert_eq!(data.source.genus(), 1, "class II source genus at d={d}");
            }
        }
    }
}
