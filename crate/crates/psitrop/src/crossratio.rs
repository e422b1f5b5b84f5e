//! Cross-ratio data on stable graphs: thickened paths carrying integer
//! one-forms, their evaluation on metric points of specializations, the
//! decomposition into primitive data, and the comparison functional on
//! distance coordinates.

use crate::error::Error;
use crate::graph::{EdgeId, Flag, StableGraph, VertexId};
use crate::moduli::{pair_count, pair_index};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type Rat = BigRational;
pub type Int = BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DatumKind {
    General,
    PrimitiveVertex,
    PrimitiveEdge,
}

/// A thickened path with a one-form along it: the slopes are stored per
/// visited vertex, as maps from the adjacent flags to the integers.
#[derive(Clone, Debug)]
pub struct CrossRatioDatum {
    pub graph: StableGraph,
    /// Visited vertices v_0..v_m.
    pub path_vertices: Vec<VertexId>,
    /// Directed edges: (edge, departing slot at v_i); length m.
    pub path_edges: Vec<(EdgeId, usize)>,
    pub start_flag: Flag,
    pub end_flag: Flag,
    /// One map per visited vertex.
    pub slopes: Vec<BTreeMap<Flag, i64>>,
}

impl CrossRatioDatum {
    /// The flag along which the path departs v_i.
    fn departing_flag(&self, i: usize) -> Flag {
        let (e, s) = self.path_edges[i];
        (e, s)
    }

    /// The flag along which the path arrives at v_{i+1}.
    fn arriving_flag(&self, i: usize) -> Flag {
        let (e, s) = self.path_edges[i];
        (e, 1 - s)
    }

    /// Entry flag of visit i (the start flag, or the arrival tangent).
    fn entry_flag(&self, i: usize) -> Flag {
        if i == 0 {
            self.start_flag
        } else {
            self.arriving_flag(i - 1)
        }
    }

    /// Exit flag of visit i (the end flag, or the departure tangent).
    fn exit_flag(&self, i: usize) -> Flag {
        if i == self.path_edges.len() {
            self.end_flag
        } else {
            self.departing_flag(i)
        }
    }

    /// Slope of the one-form along the directed edge i, measured at the
    /// departing flag.
    pub fn edge_slope(&self, i: usize) -> i64 {
        *self.slopes[i].get(&self.departing_flag(i)).unwrap_or(&0)
    }

    pub fn kind(&self) -> DatumKind {
        let m = self.path_edges.len();
        if m == 0 {
            let nonzero: Vec<i64> =
                self.slopes[0].values().copied().filter(|&x| x != 0).collect();
            if nonzero.len() == 2 && nonzero.contains(&1) && nonzero.contains(&-1) {
                return DatumKind::PrimitiveVertex;
            }
        } else if m == 1 && self.edge_slope(0) == 1 {
            let side = |i: usize, tangent: Flag, anchor: Flag| -> Vec<i64> {
                self.slopes[i]
                    .iter()
                    .filter(|&(&f, &w)| f != tangent && f != anchor && w != 0)
                    .map(|(_, &w)| w)
                    .collect()
            };
            let s0 = side(0, self.departing_flag(0), self.start_flag);
            let s1 = side(1, self.arriving_flag(0), self.end_flag);
            if s0 == vec![-1] && s1 == vec![1] {
                return DatumKind::PrimitiveEdge;
            }
        }
        DatumKind::General
    }

    /// Validate the thickened-path and one-form axioms.
    pub fn validate(&self) -> Result<(), Error> {
        let g = &self.graph;
        g.check_structure()?;
        let m = self.path_edges.len();
        if self.path_vertices.len() != m + 1 || self.slopes.len() != m + 1 {
            return Err(Error::Structural("path arrays have inconsistent lengths".into()));
        }
        for (i, &v) in self.path_vertices.iter().enumerate() {
            if g.genus_of_vertex[v] != 0 {
                return Err(Error::Domain(format!("path visits positive-genus vertex {v}")));
            }
            let flags: BTreeSet<Flag> = g.flags_at(v).into_iter().collect();
            let keys: BTreeSet<Flag> = self.slopes[i].keys().copied().collect();
            if keys != flags {
                return Err(Error::Structural(format!(
                    "slopes at visit {i} must be indexed by the flags of vertex {v}"
                )));
            }
            let total: i64 = self.slopes[i].values().sum();
            if total != 0 {
                return Err(Error::Domain(format!("slopes at visit {i} do not sum to zero")));
            }
        }
        for (i, &(e, s)) in self.path_edges.iter().enumerate() {
            let edge = &g.edges[e];
            if edge.leg || !edge.bounded {
                return Err(Error::Domain(format!("path traverses unbounded edge {e}")));
            }
            if edge.ends[s] != self.path_vertices[i] || edge.ends[1 - s] != self.path_vertices[i + 1]
            {
                return Err(Error::Structural(format!("edge {e} does not join visits {i},{}", i + 1)));
            }
        }
        // Condition (3): w_i(departing) = -w_{i+1}(arriving).
        for i in 0..m {
            let dep = self.slopes[i][&self.departing_flag(i)];
            let arr = self.slopes[i + 1][&self.arriving_flag(i)];
            if dep != -arr {
                return Err(Error::Domain(format!(
                    "one-form incompatible across path edge {i}: {dep} vs {arr}"
                )));
            }
        }
        // Condition (1) and the thickened path simplifying assumptions.
        if g.flag_vertex(self.start_flag) != self.path_vertices[0]
            || g.flag_vertex(self.end_flag) != self.path_vertices[m]
        {
            return Err(Error::Structural("start/end flags not at path endpoints".into()));
        }
        if self.slopes[0][&self.start_flag] != 0 || self.slopes[m][&self.end_flag] != 0 {
            return Err(Error::Domain("one-form must vanish on the start and end flags".into()));
        }
        if m == 0 {
            if self.start_flag == self.end_flag {
                return Err(Error::Domain("constant path needs distinct start and end flags".into()));
            }
        } else {
            if self.start_flag == self.departing_flag(0) {
                return Err(Error::Domain("start flag coincides with the initial tangent".into()));
            }
            if self.end_flag == self.arriving_flag(m - 1) {
                return Err(Error::Domain("end flag coincides with the final tangent".into()));
            }
            for i in 1..m {
                if self.entry_flag(i) == self.exit_flag(i) {
                    return Err(Error::Domain(format!("path backtracks at visit {i}")));
                }
            }
        }
        Ok(())
    }

    /// A primitive vertex-type datum at `v`.
    pub fn vertex(
        graph: &StableGraph,
        v: VertexId,
        start_end: (Flag, Flag),
        minus_plus: (Flag, Flag),
    ) -> Result<CrossRatioDatum, Error> {
        let mut slopes = BTreeMap::new();
        for f in graph.flags_at(v) {
            slopes.insert(f, 0i64);
        }
        *slopes.get_mut(&minus_plus.0).ok_or_else(|| Error::Domain("flag not at vertex".into()))? -= 1;
        *slopes.get_mut(&minus_plus.1).ok_or_else(|| Error::Domain("flag not at vertex".into()))? += 1;
        let d = CrossRatioDatum {
            graph: graph.clone(),
            path_vertices: vec![v],
            path_edges: vec![],
            start_flag: start_end.0,
            end_flag: start_end.1,
            slopes: vec![slopes],
        };
        d.validate()?;
        Ok(d)
    }

    /// A primitive edge-type datum along the directed bounded edge
    /// (e, departing slot).
    pub fn edge(
        graph: &StableGraph,
        e: (EdgeId, usize),
        start_end: (Flag, Flag),
        minus_plus: (Flag, Flag),
    ) -> Result<CrossRatioDatum, Error> {
        let v0 = graph.edges[e.0].ends[e.1];
        let v1 = graph.edges[e.0].ends[1 - e.1];
        let mut s0 = BTreeMap::new();
        for f in graph.flags_at(v0) {
            s0.insert(f, 0i64);
        }
        let mut s1 = BTreeMap::new();
        for f in graph.flags_at(v1) {
            s1.insert(f, 0i64);
        }
        *s0.get_mut(&minus_plus.0).ok_or_else(|| Error::Domain("minus flag not at source".into()))? -= 1;
        *s0.get_mut(&(e.0, e.1)).unwrap() += 1;
        *s1.get_mut(&minus_plus.1).ok_or_else(|| Error::Domain("plus flag not at target".into()))? += 1;
        *s1.get_mut(&(e.0, 1 - e.1)).unwrap() -= 1;
        let d = CrossRatioDatum {
            graph: graph.clone(),
            path_vertices: vec![v0, v1],
            path_edges: vec![e],
            start_flag: start_end.0,
            end_flag: start_end.1,
            slopes: vec![s0, s1],
        };
        d.validate()?;
        Ok(d)
    }
}

/// A specialization map from a finer graph onto a base graph: some edges of
/// the finer graph are contracted, the rest map bijectively.
#[derive(Clone, Debug)]
pub struct Specialization {
    /// Per finer-graph edge: the base edge, or None if contracted.
    pub edge_map: Vec<Option<EdgeId>>,
    pub vertex_map: Vec<VertexId>,
}

impl Specialization {
    pub fn identity(g: &StableGraph) -> Specialization {
        Specialization {
            edge_map: (0..g.edges.len()).map(Some).collect(),
            vertex_map: (0..g.vertex_count()).collect(),
        }
    }

    /// Compose: self maps G2 -> G1, `outer` maps G1 -> G0.
    pub fn then(&self, outer: &Specialization) -> Specialization {
        Specialization {
            edge_map: self
                .edge_map
                .iter()
                .map(|o| o.and_then(|e| outer.edge_map[e]))
                .collect(),
            vertex_map: self.vertex_map.iter().map(|&v| outer.vertex_map[v]).collect(),
        }
    }
}

/// Resolve vertex `v` of `g`: move the flags in `moved` to a fresh vertex
/// carrying genus `moved_genus`, joined to `v` by a fresh bounded edge.
/// Contracting the fresh edge returns `g` verbatim, so the returned
/// specialization maps the resolution onto `g`.
pub fn resolve_vertex(
    g: &StableGraph,
    v: VertexId,
    moved: &BTreeSet<Flag>,
    moved_genus: u32,
) -> Result<(StableGraph, Specialization), Error> {
    if moved_genus > g.genus_of_vertex[v] {
        return Err(Error::Domain("cannot move more genus than the vertex carries".into()));
    }
    for &f in moved {
        if g.flag_vertex(f) != v {
            return Err(Error::Domain("moved flag is not at the vertex".into()));
        }
    }
    let mut fine = g.clone();
    let w = fine.vertex_count();
    fine.genus_of_vertex[v] -= moved_genus;
    fine.genus_of_vertex.push(moved_genus);
    for &(e, s) in moved {
        fine.edges[e].ends[s] = w;
    }
    fine.edges.push(crate::graph::Edge { ends: vec![v, w], bounded: true, leg: false });
    let stay = fine.valence(v) as u32 + 2 * fine.genus_of_vertex[v];
    let go = fine.valence(w) as u32 + 2 * moved_genus;
    if stay < 3 || go < 3 {
        return Err(Error::Domain("resolution violates stability".into()));
    }
    let spec = Specialization {
        edge_map: (0..g.edges.len()).map(Some).chain([None]).collect(),
        vertex_map: (0..g.vertex_count()).chain([v]).collect(),
    };
    debug_assert_eq!(&fine.contract_edge(g.edges.len()).unwrap(), g);
    Ok((fine, spec))
}

/// Evaluate a cross-ratio datum on a metric point of a specialization of its
/// graph: the sum over traversed directed bounded edges of the lifted
/// one-form slope times the edge length.
pub fn evaluate(
    datum: &CrossRatioDatum,
    fine: &StableGraph,
    lengths: &BTreeMap<EdgeId, Rat>,
    spec: &Specialization,
) -> Result<Rat, Error> {
    datum.validate()?;
    let base = &datum.graph;
    if spec.edge_map.len() != fine.edges.len() || spec.vertex_map.len() != fine.vertex_count() {
        return Err(Error::Domain("specialization does not match the fine graph".into()));
    }
    // Lift of each base edge and flag.
    let mut lift_edge = vec![usize::MAX; base.edges.len()];
    for (fe, &img) in spec.edge_map.iter().enumerate() {
        if let Some(be) = img {
            if lift_edge[be] != usize::MAX {
                return Err(Error::Domain("specialization maps two edges onto one".into()));
            }
            lift_edge[be] = fe;
        }
    }
    if lift_edge.iter().any(|&e| e == usize::MAX) {
        return Err(Error::Domain("specialization misses a base edge".into()));
    }
    let lift_flag = |f: Flag| -> Flag { (lift_edge[f.0], f.1) };

    // Clusters: preimage forests of base vertices, spanned by contracted edges.
    let cluster_of = &spec.vertex_map;
    let contracted: Vec<EdgeId> = spec
        .edge_map
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_none())
        .map(|(e, _)| e)
        .collect();

    let len_of = |e: EdgeId| -> Result<Rat, Error> {
        lengths
            .get(&e)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("missing length for bounded edge {e}")))
    };

    let mut total = Rat::zero();
    let m = datum.path_edges.len();
    for i in 0..=m {
        // Lifted tangent edge contribution.
        if i < m {
            let (e, _) = datum.path_edges[i];
            let slope = datum.edge_slope(i);
            if slope != 0 {
                total += Rat::from(Int::from(slope)) * len_of(lift_edge[e])?;
            }
        }
        // Cluster contribution at visit i: Kirchhoff flow along the entry ->
        // exit path in the contracted subtree over v_i.
        let v = datum.path_vertices[i];
        let entry = fine.flag_vertex(lift_flag(datum.entry_flag(i)));
        let exit = fine.flag_vertex(lift_flag(datum.exit_flag(i)));
        if cluster_of[entry] != v || cluster_of[exit] != v {
            return Err(Error::Domain("lifted path leaves its cluster".into()));
        }
        if entry == exit {
            continue;
        }
        let cluster_edges: Vec<EdgeId> = contracted
            .iter()
            .copied()
            .filter(|&e| fine.edges[e].ends.iter().all(|&x| cluster_of[x] == v))
            .collect();
        let path = cluster_path(fine, &cluster_edges, entry, exit).ok_or_else(|| {
            Error::Domain("cluster over a path vertex is not connected by contracted edges".into())
        })?;
        // Positions of the lifted base flags of T_{v_i}.
        let flag_positions: Vec<(Flag, VertexId)> = base
            .flags_at(v)
            .into_iter()
            .map(|f| (f, fine.flag_vertex(lift_flag(f))))
            .collect();
        for &(ce, toward_exit) in &path {
            // Flow across the contracted edge: the sum of slopes of the base
            // flags lifted to the exit side.
            let exit_side = component_after_cut(fine, &cluster_edges, ce, toward_exit);
            let mut flow = 0i64;
            for &(f, pos) in &flag_positions {
                if exit_side.contains(&pos) {
                    flow += datum.slopes[i][&f];
                }
            }
            if flow != 0 {
                total += Rat::from(Int::from(flow)) * len_of(ce)?;
            }
        }
    }
    Ok(total)
}

/// The unique path from `from` to `to` in the forest given by
/// `cluster_edges`: (edge, endpoint on the `to` side).
fn cluster_path(
    g: &StableGraph,
    cluster_edges: &[EdgeId],
    from: VertexId,
    to: VertexId,
) -> Option<Vec<(EdgeId, VertexId)>> {
    let mut prev: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &e in cluster_edges {
            let ends = &g.edges[e].ends;
            for (a, b) in [(ends[0], ends[1]), (ends[1], ends[0])] {
                if a == x && !seen.contains(&b) {
                    seen.insert(b);
                    prev.insert(b, (e, x));
                    queue.push_back(b);
                }
            }
        }
    }
    if !seen.contains(&to) {
        return None;
    }
    let mut path = vec![];
    let mut at = to;
    while at != from {
        let (e, p) = prev[&at];
        path.push((e, at));
        at = p;
    }
    path.reverse();
    Some(path)
}

/// Vertices in the component of `side` after removing `cut` from the forest.
fn component_after_cut(
    g: &StableGraph,
    cluster_edges: &[EdgeId],
    cut: EdgeId,
    side: VertexId,
) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([side]);
    let mut queue = VecDeque::from([side]);
    while let Some(x) = queue.pop_front() {
        for &e in cluster_edges {
            if e == cut {
                continue;
            }
            let ends = &g.edges[e].ends;
            for (a, b) in [(ends[0], ends[1]), (ends[1], ends[0])] {
                if a == x && !seen.contains(&b) {
                    seen.insert(b);
                    queue.push_back(b);
                }
            }
        }
    }
    seen
}

/// Decompose a datum as an integer combination of primitive data: vertex
/// primitives paired against a reference flag at each visit, plus edge
/// primitives carrying the through-flow of the path.
pub fn decompose_primitive(
    datum: &CrossRatioDatum,
) -> Result<Vec<(Int, CrossRatioDatum)>, Error> {
    datum.validate()?;
    if datum.kind() != DatumKind::General {
        return Ok(vec![(Int::from(1), datum.clone())]);
    }
    let g = &datum.graph;
    let m = datum.path_edges.len();
    let mut terms: Vec<(Int, CrossRatioDatum)> = vec![];
    // Reference flag per visit: any flag that is neither the entry nor the
    // exit flag of the visit.
    let reference: Vec<Flag> = (0..=m)
        .map(|i| {
            let v = datum.path_vertices[i];
            let entry = datum.entry_flag(i);
            let exit = datum.exit_flag(i);
            g.flags_at(v)
                .into_iter()
                .find(|&f| f != entry && f != exit)
                .expect("stable vertices have at least three flags")
        })
        .collect();
    for i in 0..=m {
        let v = datum.path_vertices[i];
        let entry = datum.entry_flag(i);
        let exit = datum.exit_flag(i);
        let r = reference[i];
        for f in g.flags_at(v) {
            if f == entry || f == exit || f == r {
                continue;
            }
            let w = datum.slopes[i][&f];
            if w == 0 {
                continue;
            }
            let prim = CrossRatioDatum::vertex(g, v, (entry, exit), (r, f))?;
            terms.push((Int::from(w), prim));
        }
    }
    for i in 0..m {
        let t = datum.edge_slope(i);
        if t == 0 {
            continue;
        }
        let prim = CrossRatioDatum::edge(
            g,
            datum.path_edges[i],
            (datum.entry_flag(i), datum.exit_flag(i + 1)),
            (reference[i], reference[i + 1]),
        )?;
        terms.push((Int::from(t), prim));
    }
    Ok(terms)
}

/// The linear functional x_ij + x_kl - x_ik - x_jl on doubled distance
/// coordinates matching a primitive vertex cross ratio on the star tree,
/// with the doubling factor recorded explicitly.
pub struct DistanceFunctional {
    pub n: u32,
    /// Covector on doubled pair coordinates.
    pub covector: Vec<Int>,
    /// The cross ratio equals covector . doubled / denominator.
    pub denominator: Int,
}

impl DistanceFunctional {
    pub fn eval_doubled(&self, doubled: &[Rat]) -> Rat {
        let num: Rat = self
            .covector
            .iter()
            .zip(doubled)
            .map(|(c, d)| Rat::from(c.clone()) * d)
            .sum();
        num / Rat::from(self.denominator.clone())
    }
}

/// For a primitive vertex datum xi_{((f_i, f_l), (f_k, f_j))} on the star
/// tree of M_{0,n}, the matching functional x_ij + x_kl - x_ik - x_jl.
pub fn pullback_to_distance(datum: &CrossRatioDatum) -> Result<DistanceFunctional, Error> {
    datum.validate()?;
    let g = &datum.graph;
    if g.vertex_count() != 1 || g.bounded_edges().count() != 0 {
        return Err(Error::Domain("pull-back functional requires the star tree".into()));
    }
    if datum.kind() != DatumKind::PrimitiveVertex {
        return Err(Error::Domain("pull-back functional requires a primitive vertex datum".into()));
    }
    let n = g.leg_count() as u32;
    let mark_of_flag = |f: Flag| -> Result<u32, Error> {
        g.marks
            .iter()
            .find(|(_, &e)| e == f.0)
            .and_then(|(k, _)| k.parse::<u32>().ok())
            .ok_or_else(|| Error::Domain("flag is not a marked leg".into()))
    };
    let i = mark_of_flag(datum.start_flag)?;
    let l = mark_of_flag(datum.end_flag)?;
    let (mut k, mut j) = (0u32, 0u32);
    for (f, &w) in &datum.slopes[0] {
        if w == -1 {
            k = mark_of_flag(*f)?;
        } else if w == 1 {
            j = mark_of_flag(*f)?;
        }
    }
    let mut covector = vec![Int::zero(); pair_count(n)];
    covector[pair_index(n, i, j)] += Int::from(1);
    covector[pair_index(n, k, l)] += Int::from(1);
    covector[pair_index(n, i, k)] -= Int::from(1);
    covector[pair_index(n, j, l)] -= Int::from(1);
    Ok(DistanceFunctional { n, covector, denominator: Int::from(2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build;
    use num_traits::{One, Signed};

    fn leg_flag(g: &StableGraph, mark: &str) -> Flag {
        (g.marks[mark], 0)
    }

    /// Star tree with 4 legs, resolved into the {1,2}|{3,4} type.
    fn star4_resolved_12() -> (StableGraph, StableGraph, Specialization) {
        let star = build::star(0, 4);
        let moved: BTreeSet<Flag> =
            [leg_flag(&star, "1"), leg_flag(&star, "2")].into_iter().collect();
        let (fine, spec) = resolve_vertex(&star, 0, &moved, 0).unwrap();
        (star, fine, spec)
    }

    #[test]
    fn m04_figure_values() {
        let (star, fine, spec) = star4_resolved_12();
        let f = |m: &str| leg_flag(&star, m);
        let l = Rat::from(Int::from(7));
        let lengths = BTreeMap::from([(4usize, l.clone())]);
        // xi_{((f1,f3),(f2,f4))} = l_e on the {12|34} type
        let d = CrossRatioDatum::vertex(&star, 0, (f("1"), f("3")), (f("2"), f("4"))).unwrap();
        assert_eq!(evaluate(&d, &fine, &lengths, &spec).unwrap(), l);
        // xi_{((f1,f2),(f3,f4))} = 0
        let d = CrossRatioDatum::vertex(&star, 0, (f("1"), f("2")), (f("3"), f("4"))).unwrap();
        assert_eq!(evaluate(&d, &fine, &lengths, &spec).unwrap(), Rat::zero());
        // xi_{((f1,f4),(f2,f3))} = l_e
        let d = CrossRatioDatum::vertex(&star, 0, (f("1"), f("4")), (f("2"), f("3"))).unwrap();
        assert_eq!(evaluate(&d, &fine, &lengths, &spec).unwrap(), l);
        // identity specialization: constant path, no bounded edges: 0
        let d = CrossRatioDatum::vertex(&star, 0, (f("1"), f("3")), (f("2"), f("4"))).unwrap();
        let id = Specialization::identity(&star);
        assert_eq!(evaluate(&d, &star, &BTreeMap::new(), &id).unwrap(), Rat::zero());
    }

    #[test]
    fn loop_length_cross_ratio() {
        // Edge-type primitive on the one-loop one-leg graph measures the
        // loop length.
        let g = build::loop_with_leg();
        let tail = (1usize, 0usize);
        let d = CrossRatioDatum::edge(&g, (0, 0), (tail, tail), ((0, 1), (0, 0)));
        // minus flag at source = the arriving loop flag, plus flag at target
        // = the departing loop flag; tail serves as start and end.
        let d = d.unwrap();
        let id = Specialization::identity(&g);
        let l = Rat::new(Int::from(22), Int::from(7));
        let val = evaluate(&d, &g, &BTreeMap::from([(0usize, l.clone())]), &id).unwrap();
        assert_eq!(val.clone().abs(), l);
    }

    #[test]
    fn decomposition_matches_by_evaluation() {
        // A non-primitive vertex datum with slopes (2,-1,-1,0) at a 5-valent
        // vertex decomposes into two vertex primitives.
        let star = build::star(0, 5);
        let f = |m: &str| leg_flag(&star, m);
        let mut slopes = BTreeMap::new();
        for fl in star.flags_at(0) {
            slopes.insert(fl, 0i64);
        }
        slopes.insert(f("2"), 2);
        slopes.insert(f("3"), -1);
        slopes.insert(f("4"), -1);
        let datum = CrossRatioDatum {
            graph: star.clone(),
            path_vertices: vec![0],
            path_edges: vec![],
            start_flag: f("1"),
            end_flag: f("5"),
            slopes: vec![slopes],
        };
        datum.validate().unwrap();
        let terms = decompose_primitive(&datum).unwrap();
        assert!(terms.iter().all(|(_, t)| t.kind() != DatumKind::General));
        assert_eq!(terms.len(), 2);
        // Evaluate both sides on all one-edge resolutions.
        for mask in 0..(1u32 << 4) {
            let moved: BTreeSet<Flag> = (0..4)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| leg_flag(&star, &(b + 1).to_string()))
                .collect();
            if moved.len() < 2 || moved.len() > 3 {
                continue;
            }
            let (fine, spec) = resolve_vertex(&star, 0, &moved, 0).unwrap();
            let lengths = BTreeMap::from([(5usize, Rat::new(Int::from(13), Int::from(3)))]);
            let lhs = evaluate(&datum, &fine, &lengths, &spec).unwrap();
            let rhs: Rat = terms
                .iter()
                .map(|(c, t)| {
                    Rat::from(c.clone()) * evaluate(t, &fine, &lengths, &spec).unwrap()
                })
                .sum();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pullback_functional_values() {
        let star = build::star(0, 4);
        let f = |m: &str| leg_flag(&star, m);
        // (i,l,k,j) = (1,4,3,2): functional x_12 + x_34 - x_13 - x_24
        let d = CrossRatioDatum::vertex(&star, 0, (f("1"), f("4")), (f("3"), f("2"))).unwrap();
        let dfun = pullback_to_distance(&d).unwrap();
        let mut expected = vec![Int::zero(); pair_count(4)];
        expected[pair_index(4, 1, 2)] += Int::one();
        expected[pair_index(4, 3, 4)] += Int::one();
        expected[pair_index(4, 1, 3)] -= Int::one();
        expected[pair_index(4, 2, 4)] -= Int::one();
        assert_eq!(dfun.covector, expected);
        // antisymmetric swap of the path negates the functional
        let d2 = CrossRatioDatum::vertex(&star, 0, (f("4"), f("1")), (f("3"), f("2"))).unwrap();
        let dfun2 = pullback_to_distance(&d2).unwrap();
        let neg: Vec<Int> = dfun.covector.iter().map(|x| -x.clone()).collect();
        assert_eq!(dfun2.covector, neg);
    }

    #[test]
    fn rejects_positive_genus_path() {
        let g = build::star(1, 1);
        let f = (0usize, 0usize);
        let mut slopes = BTreeMap::new();
        slopes.insert(f, 0i64);
        let d = CrossRatioDatum {
            graph: g,
            path_vertices: vec![0],
            path_edges: vec![],
            start_flag: f,
            end_flag: f,
            slopes: vec![slopes],
        };
        assert!(d.validate().is_err());
    }
}
