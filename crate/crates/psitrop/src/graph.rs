//! Stable marked graphs with genus: the combinatorial types of tropical
//! curves, together with specializations, automorphisms and cycle
//! rigidifications.

use crate::error::Error;
use crate::lattice::{rank, IntMat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type VertexId = usize;
pub type EdgeId = usize;

/// A flag is an edge endpoint: (edge, slot). Legs have a single slot 0,
/// all other edges have slots 0 and 1. Loops have both slots at the same
/// vertex.
pub type Flag = (EdgeId, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Adjacent vertices, one entry per flag.
    pub ends: Vec<VertexId>,
    pub bounded: bool,
    pub leg: bool,
}

/// A marked weighted graph: the combinatorial type of a tropical curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableGraph {
    pub genus_of_vertex: Vec<u32>,
    pub edges: Vec<Edge>,
    /// Marking: bijection label -> leg edge.
    pub marks: BTreeMap<String, EdgeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub connected: bool,
    /// Vertices violating val(v) + 2 genus(v) >= 3.
    pub unstable_vertices: Vec<VertexId>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.connected && self.unstable_vertices.is_empty()
    }
}

impl StableGraph {
    /// Structural well-formedness; returns a structural error for dangling
    /// references or malformed flag counts, never for stability failures.
    pub fn check_structure(&self) -> Result<(), Error> {
        let nv = self.genus_of_vertex.len();
        for (i, e) in self.edges.iter().enumerate() {
            if e.leg && e.ends.len() != 1 {
                return Err(Error::Structural(format!("leg {i} must have exactly one flag")));
            }
            if !e.leg && e.ends.len() != 2 {
                return Err(Error::Structural(format!("edge {i} must have exactly two flags")));
            }
            if e.leg && e.bounded {
                return Err(Error::Structural(format!("leg {i} must be unbounded")));
            }
            for &v in &e.ends {
                if v >= nv {
                    return Err(Error::Structural(format!("edge {i} references missing vertex {v}")));
                }
            }
        }
        let legs: BTreeSet<EdgeId> =
            self.edges.iter().enumerate().filter(|(_, e)| e.leg).map(|(i, _)| i).collect();
        let marked: BTreeSet<EdgeId> = self.marks.values().copied().collect();
        if marked.len() != self.marks.len() {
            return Err(Error::Structural("marking is not injective".into()));
        }
        for &m in &marked {
            if !legs.contains(&m) {
                return Err(Error::Structural(format!("mark targets non-leg edge {m}")));
            }
        }
        if marked != legs {
            return Err(Error::Structural("marking must hit every leg".into()));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.genus_of_vertex.len()
    }

    pub fn leg_count(&self) -> usize {
        self.edges.iter().filter(|e| e.leg).count()
    }

    pub fn bounded_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.bounded).map(|(i, _)| i)
    }

    pub fn flags(&self) -> Vec<Flag> {
        let mut out = vec![];
        for (i, e) in self.edges.iter().enumerate() {
            for s in 0..e.ends.len() {
                out.push((i, s));
            }
        }
        out
    }

    pub fn flag_vertex(&self, f: Flag) -> VertexId {
        self.edges[f.0].ends[f.1]
    }

    pub fn flags_at(&self, v: VertexId) -> Vec<Flag> {
        self.flags().into_iter().filter(|&f| self.flag_vertex(f) == v).collect()
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.flags_at(v).len()
    }

    /// Stability and connectivity report.
    pub fn validate(&self) -> Result<ValidationReport, Error> {
        self.check_structure()?;
        let nv = self.vertex_count();
        let mut seen = vec![false; nv.max(1)];
        let mut queue = VecDeque::new();
        queue.push_back(0usize);
        if nv > 0 {
            seen[0] = true;
        }
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                if e.ends.len() == 2 {
                    for (a, b) in [(0, 1), (1, 0)] {
                        if e.ends[a] == v && !seen[e.ends[b]] {
                            seen[e.ends[b]] = true;
                            queue.push_back(e.ends[b]);
                        }
                    }
                }
            }
        }
        let connected = seen.iter().all(|&s| s);
        let unstable_vertices = (0..nv)
            .filter(|&v| self.valence(v) as u32 + 2 * self.genus_of_vertex[v] < 3)
            .collect();
        Ok(ValidationReport { connected, unstable_vertices })
    }

    /// g(G) = #E - #L - #V + 1 + sum of vertex genera.
    pub fn genus(&self) -> i64 {
        let e = self.edges.len() as i64;
        let l = self.leg_count() as i64;
        let v = self.vertex_count() as i64;
        let gamma: i64 = self.genus_of_vertex.iter().map(|&g| g as i64).sum();
        e - l - v + 1 + gamma
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> usize {
        (self.edges.len() - self.leg_count() + 1).saturating_sub(self.vertex_count())
    }

    /// Contract a bounded edge: identify endpoints, or for a loop delete it
    /// and add one to the genus of its vertex.
    pub fn contract_edge(&self, e: EdgeId) -> Result<StableGraph, Error> {
        let edge = self.edges.get(e).ok_or_else(|| Error::Domain(format!("no edge {e}")))?;
        if !edge.bounded {
            return Err(Error::Domain(format!("edge {e} is unbounded, cannot contract")));
        }
        let mut g = self.clone();
        let (a, b) = (edge.ends[0], edge.ends[1]);
        if a == b {
            g.genus_of_vertex[a] += 1;
            g.remove_edge(e);
        } else {
            let (keep, gone) = (a.min(b), a.max(b));
            g.genus_of_vertex[keep] += g.genus_of_vertex[gone];
            g.genus_of_vertex.remove(gone);
            for ed in g.edges.iter_mut() {
                for v in ed.ends.iter_mut() {
                    if *v == gone {
                        *v = keep;
                    } else if *v > gone {
                        *v -= 1;
                    }
                }
            }
            g.remove_edge(e);
        }
        Ok(g)
    }

    /// Stretch a bounded edge: move it to the unbounded edges.
    pub fn stretch_edge(&self, e: EdgeId) -> Result<StableGraph, Error> {
        let edge = self.edges.get(e).ok_or_else(|| Error::Domain(format!("no edge {e}")))?;
        if !edge.bounded {
            return Err(Error::Domain(format!("edge {e} is already unbounded")));
        }
        let mut g = self.clone();
        g.edges[e].bounded = false;
        Ok(g)
    }

    fn remove_edge(&mut self, e: EdgeId) {
        self.edges.remove(e);
        let shift = |x: &mut EdgeId| {
            if *x > e {
                *x -= 1;
            }
        };
        for m in self.marks.values_mut() {
            shift(m);
        }
    }

    /// All marking- and genus-preserving automorphisms.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        let nv = self.vertex_count();
        let ne = self.edges.len();
        let mut out = vec![];
        // Vertex invariants for pruning.
        let inv = |v: VertexId| (self.genus_of_vertex[v], self.valence(v));
        let mut vperm = vec![usize::MAX; nv];
        let mut used = vec![false; nv];
        self.search_vertex_maps(0, &mut vperm, &mut used, &inv, &mut |vp| {
            // Group edges by their induced endpoint class; enumerate edge
            // bijections within groups.
            let mut groups: BTreeMap<(Vec<VertexId>, bool, bool, Option<String>), Vec<EdgeId>> =
                BTreeMap::new();
            for (i, e) in self.edges.iter().enumerate() {
                let mut ends = e.ends.clone();
                ends.sort_unstable();
                let mark = self.marks.iter().find(|(_, &m)| m == i).map(|(k, _)| k.clone());
                groups.entry((ends, e.bounded, e.leg, mark)).or_default().push(i);
            }
            // The vertex map must send each group onto the group with mapped
            // endpoints; marked legs must map to themselves.
            let mut source_groups: Vec<Vec<EdgeId>> = vec![];
            let mut target_groups: Vec<Vec<EdgeId>> = vec![];
            for ((ends, bounded, leg, mark), ids) in &groups {
                let mapped: Vec<VertexId> = {
                    let mut m: Vec<VertexId> = ends.iter().map(|&v| vp[v]).collect();
                    m.sort_unstable();
                    m
                };
                let key = (mapped, *bounded, *leg, mark.clone());
                match groups.get(&key) {
                    Some(t) if t.len() == ids.len() => {
                        source_groups.push(ids.clone());
                        target_groups.push(t.clone());
                    }
                    _ => return,
                }
            }
            // Enumerate products of bijections per group.
            let mut eperm = vec![usize::MAX; ne];
            enumerate_group_bijections(&source_groups, &target_groups, &mut eperm, 0, &mut |ep| {
                // Flag data: for each edge with two flags, how slots map.
                // Non-loop: determined by the vertex map. Loop -> loop: both
                // orientations are distinct automorphisms.
                let mut flip_freedom: Vec<EdgeId> = vec![];
                let mut flips = vec![false; ne];
                let mut ok = true;
                for (e, &ei) in ep.iter().enumerate() {
                    let src = &self.edges[e];
                    let dst = &self.edges[ei];
                    if src.ends.len() == 2 {
                        let (a, b) = (vp[src.ends[0]], vp[src.ends[1]]);
                        if a == b && dst.ends[0] == dst.ends[1] {
                            flip_freedom.push(e);
                        } else if dst.ends == vec![a, b] {
                            flips[e] = false;
                        } else if dst.ends == vec![b, a] {
                            flips[e] = true;
                        } else {
                            ok = false;
                            break;
                        }
                    } else if vp[src.ends[0]] != dst.ends[0] {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    return;
                }
                for mask in 0..(1usize << flip_freedom.len()) {
                    let mut f = flips.clone();
                    for (bit, &e) in flip_freedom.iter().enumerate() {
                        f[e] = (mask >> bit) & 1 == 1;
                    }
                    out.push(Automorphism {
                        vertex_map: vp.to_vec(),
                        edge_map: ep.to_vec(),
                        slot_flip: f,
                    });
                }
            });
        });
        out
    }

    fn search_vertex_maps(
        &self,
        v: VertexId,
        vperm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        inv: &dyn Fn(VertexId) -> (u32, usize),
        emit: &mut dyn FnMut(&[usize]),
    ) {
        let nv = self.vertex_count();
        if v == nv {
            emit(vperm);
            return;
        }
        for w in 0..nv {
            if !used[w] && inv(v) == inv(w) {
                vperm[v] = w;
                used[w] = true;
                self.search_vertex_maps(v + 1, vperm, used, inv, emit);
                used[w] = false;
                vperm[v] = usize::MAX;
            }
        }
    }

    /// Isomorphism test via canonical form with backtracking refinement.
    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// A canonical invariant: the lexicographically smallest structure
    /// encoding over all vertex orderings compatible with (genus, valence).
    pub fn canonical_key(&self) -> Vec<u64> {
        let nv = self.vertex_count();
        let inv = |v: VertexId| (self.genus_of_vertex[v], self.valence(v));
        let mut best: Option<Vec<u64>> = None;
        let mut perm = vec![usize::MAX; nv];
        let mut used = vec![false; nv];
        self.search_vertex_maps(0, &mut perm, &mut used, &inv, &mut |p| {
            let key = self.encode_under(p);
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap_or_default()
    }

    fn encode_under(&self, p: &[usize]) -> Vec<u64> {
        let mut enc: Vec<Vec<u64>> = vec![];
        for (i, e) in self.edges.iter().enumerate() {
            let mut ends: Vec<u64> = e.ends.iter().map(|&v| p[v] as u64).collect();
            ends.sort_unstable();
            let mark = self
                .marks
                .iter()
                .find(|(_, &m)| m == i)
                .map(|(k, _)| {
                    let mut h: u64 = 1;
                    for b in k.bytes() {
                        h = h.wrapping_mul(131).wrapping_add(b as u64);
                    }
                    h
                })
                .unwrap_or(0);
            enc.push(vec![ends.len() as u64, e.bounded as u64, e.leg as u64, mark]
                .into_iter()
                .chain(ends)
                .collect());
        }
        enc.sort();
        let mut flat = vec![0u64; self.vertex_count()];
        for v in 0..self.vertex_count() {
            flat[p[v]] = self.genus_of_vertex[v] as u64;
        }
        flat.extend(enc.into_iter().flatten());
        flat
    }

    /// All simple closed walks (primitive cycles) as signed edge chains,
    /// both orientations. Legs never participate.
    pub fn oriented_primitive_cycles(&self) -> Vec<EdgeChain> {
        let ne = self.edges.len();
        let candidates: Vec<EdgeId> =
            (0..ne).filter(|&e| !self.edges[e].leg).collect();
        let mut cycles: BTreeSet<Vec<(EdgeId, i8)>> = BTreeSet::new();
        // Enumerate edge subsets forming a connected subgraph where every
        // touched vertex has degree exactly 2.
        let m = candidates.len();
        for mask in 1..(1usize << m) {
            let subset: Vec<EdgeId> =
                (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
            if let Some(chain) = self.try_cycle(&subset) {
                let rev: Vec<(EdgeId, i8)> =
                    chain.iter().rev().map(|&(e, s)| (e, -s)).collect();
                cycles.insert(normalize_rotation(&chain));
                cycles.insert(normalize_rotation(&rev));
            }
        }
        cycles.into_iter().map(|edges| EdgeChain { edges }).collect()
    }

    /// If the edge subset is a single simple cycle, return one oriented
    /// traversal of it.
    fn try_cycle(&self, subset: &[EdgeId]) -> Option<Vec<(EdgeId, i8)>> {
        let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &e in subset {
            for &v in &self.edges[e].ends {
                *deg.entry(v).or_insert(0) += 1;
            }
        }
        if deg.values().any(|&d| d != 2) {
            return None;
        }
        // Walk the subset starting anywhere.
        let start_edge = subset[0];
        if self.edges[start_edge].ends[0] == self.edges[start_edge].ends[1] {
            // A loop is a cycle only as a singleton subset.
            return if subset.len() == 1 { Some(vec![(start_edge, 1)]) } else { None };
        }
        let mut used = BTreeSet::new();
        let mut chain = vec![(start_edge, 1i8)];
        used.insert(start_edge);
        let origin = self.edges[start_edge].ends[0];
        let mut at = self.edges[start_edge].ends[1];
        while at != origin {
            let mut found = None;
            for &e in subset {
                if used.contains(&e) {
                    continue;
                }
                let ends = &self.edges[e].ends;
                if ends[0] == at {
                    found = Some((e, 1i8, ends[1]));
                    break;
                } else if ends[1] == at {
                    found = Some((e, -1i8, ends[0]));
                    break;
                }
            }
            let (e, s, next) = found?;
            used.insert(e);
            chain.push((e, s));
            at = next;
        }
        if used.len() == subset.len() {
            Some(chain)
        } else {
            None
        }
    }

    /// All cycle rigidifications: ordered g-tuples of zero-or-primitive
    /// oriented cycles generating H1(G; Z). Tuples with fewer nonzero
    /// entries come first.
    pub fn cycle_rigidifications(&self) -> Vec<CycleRigidifiedGraph> {
        let g = self.genus() as usize;
        let b = self.betti();
        let cycles = self.oriented_primitive_cycles();
        let ne = self.edges.len();
        let chain_vec = |c: &EdgeChain| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); ne];
            for &(e, s) in &c.edges {
                v[e] += BigInt::from(s);
            }
            v
        };
        let mut options: Vec<Option<EdgeChain>> = vec![None];
        options.extend(cycles.into_iter().map(Some));
        let mut tuples: Vec<Vec<Option<EdgeChain>>> = vec![vec![]];
        for _ in 0..g {
            let mut next = vec![];
            for t in &tuples {
                for o in &options {
                    let mut t2 = t.clone();
                    t2.push(o.clone());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let mut result: Vec<CycleRigidifiedGraph> = vec![];
        for t in tuples {
            let vecs: Vec<Vec<BigInt>> =
                t.iter().flatten().map(|c| chain_vec(c)).collect();
            if b > 0 {
                if rank(&vecs) != b {
                    continue;
                }
                // Index of the spanned lattice inside the saturated H1 must
                // be one: check via Smith form of the chain matrix restricted
                // to a homology basis.
                if !spans_h1(self, &vecs, b) {
                    continue;
                }
            }
            result.push(CycleRigidifiedGraph { base: self.clone(), cycles: t });
        }
        result.sort_by_key(|r| r.cycles.iter().filter(|c| c.is_some()).count());
        result
    }
}

/// Does the integer span of `vecs` equal H1 (rank `b`, saturated) of `g`?
fn spans_h1(g: &StableGraph, vecs: &[Vec<BigInt>], b: usize) -> bool {
    // H1 basis via spanning tree fundamental cycles.
    let basis = h1_basis(g);
    assert_eq!(basis.len(), b);
    // Express vecs in that basis and require invariant factors all 1.
    let mut coords: Vec<Vec<BigInt>> = vec![];
    for v in vecs {
        match crate::lattice::solve_rational(&basis, &crate::lattice::to_rat_vec(v)) {
            Some(sol) if sol.iter().all(|r| r.is_integer()) => {
                coords.push(sol.iter().map(|r| r.to_integer()).collect())
            }
            _ => return false,
        }
    }
    let m = IntMat::from_rows(coords).transpose();
    crate::lattice::image_index(&m) == BigInt::one()
}

/// Fundamental cycle basis of H1 from a spanning tree (legs excluded).
pub fn h1_basis(g: &StableGraph) -> Vec<Vec<BigInt>> {
    let nv = g.vertex_count();
    let ne = g.edges.len();
    let mut parent: Vec<Option<(VertexId, EdgeId, i8)>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut tree_edges = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    while let Some(v) = queue.pop_front() {
        for (i, e) in g.edges.iter().enumerate() {
            if e.ends.len() != 2 || e.leg {
                continue;
            }
            for (a, b, s) in [(0, 1, 1i8), (1, 0, -1i8)] {
                if e.ends[a] == v && !seen[e.ends[b]] {
                    seen[e.ends[b]] = true;
                    parent[e.ends[b]] = Some((v, i, s));
                    tree_edges.insert(i);
                    queue.push_back(e.ends[b]);
                }
            }
        }
    }
    let path_to_root = |mut v: VertexId| -> Vec<(EdgeId, i8)> {
        let mut p = vec![];
        while let Some((up, e, s)) = parent[v] {
            p.push((e, s));
            v = up;
        }
        p
    };
    let mut basis = vec![];
    for (i, e) in g.edges.iter().enumerate() {
        if e.ends.len() != 2 || e.leg || tree_edges.contains(&i) {
            continue;
        }
        let mut v = vec![BigInt::zero(); ne];
        v[i] += BigInt::one();
        // Close up through the tree; stored signs orient parent -> child,
        // walking child -> parent reverses them.
        for (e2, s) in path_to_root(e.ends[1]) {
            v[e2] -= BigInt::from(s);
        }
        for (e2, s) in path_to_root(e.ends[0]) {
            v[e2] += BigInt::from(s);
        }
        basis.push(v);
    }
    basis
}

fn normalize_rotation(chain: &[(EdgeId, i8)]) -> Vec<(EdgeId, i8)> {
    let n = chain.len();
    let mut best: Option<Vec<(EdgeId, i8)>> = None;
    for r in 0..n {
        let rot: Vec<(EdgeId, i8)> = (0..n).map(|i| chain[(i + r) % n]).collect();
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}

/// An oriented cycle stored as a signed edge chain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeChain {
    pub edges: Vec<(EdgeId, i8)>,
}

impl EdgeChain {
    /// Homology class as a signed edge vector.
    pub fn class(&self, ne: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); ne];
        for &(e, s) in &self.edges {
            v[e] += BigInt::from(s);
        }
        v
    }
}

/// A stable graph with an oriented cycle basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRigidifiedGraph {
    pub base: StableGraph,
    /// Length equals the graph genus; entries are None (the zero class)
    /// or primitive oriented cycles.
    pub cycles: Vec<Option<EdgeChain>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
    /// Whether the slot order of each 2-flag edge is reversed.
    pub slot_flip: Vec<bool>,
}

impl Automorphism {
    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_map.iter().enumerate().all(|(i, &e)| i == e)
            && self.slot_flip.iter().all(|&f| !f)
    }

    pub fn compose(&self, then: &Automorphism) -> Automorphism {
        Automorphism {
            vertex_map: self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&e| then.edge_map[e]).collect(),
            slot_flip: self
                .edge_map
                .iter()
                .enumerate()
                .map(|(e, &img)| self.slot_flip[e] != then.slot_flip[img])
                .collect(),
        }
    }

    /// Push an oriented cycle forward: edges map with sign from slot flips.
    pub fn push_class(&self, class: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); class.len()];
        for (e, c) in class.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if self.slot_flip[e] { -BigInt::one() } else { BigInt::one() };
            let add = c * sign;
            out[self.edge_map[e]] += add;
        }
        out
    }
}

fn enumerate_group_bijections(
    sources: &[Vec<EdgeId>],
    targets: &[Vec<EdgeId>],
    eperm: &mut Vec<usize>,
    group: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if group == sources.len() {
        emit(eperm);
        return;
    }
    let src = &sources[group];
    let tgt = &targets[group];
    permute_assign(src, tgt, 0, &mut BTreeSet::new(), eperm, &mut |ep| {
        enumerate_group_bijections(sources, targets, ep, group + 1, emit)
    });
}

fn permute_assign(
    src: &[EdgeId],
    tgt: &[EdgeId],
    i: usize,
    used: &mut BTreeSet<EdgeId>,
    eperm: &mut Vec<usize>,
    emit: &mut dyn FnMut(&mut Vec<usize>),
) {
    if i == src.len() {
        emit(eperm);
        return;
    }
    for &t in tgt {
        if !used.contains(&t) {
            used.insert(t);
            eperm[src[i]] = t;
            permute_assign(src, tgt, i + 1, used, eperm, emit);
            eperm[src[i]] = usize::MAX;
            used.remove(&t);
        }
    }
}

/// Convenience constructors used across the crate and in tests.
pub mod build {
    use super::*;

    /// Single vertex of genus `g` with legs marked "1".."n".
    pub fn star(genus: u32, n_legs: usize) -> StableGraph {
        let mut edges = vec![];
        let mut marks = BTreeMap::new();
        for i in 0..n_legs {
            edges.push(Edge { ends: vec![0], bounded: false, leg: true });
            marks.insert((i + 1).to_string(), i);
        }
        StableGraph { genus_of_vertex: vec![genus], edges, marks }
    }

    /// One genus-0 vertex with a loop and one marked leg.
    pub fn loop_with_leg() -> StableGraph {
        StableGraph {
            genus_of_vertex: vec![0],
            edges: vec![
                Edge { ends: vec![0, 0], bounded: true, leg: false },
                Edge { ends: vec![0], bounded: false, leg: true },
            ],
            marks: BTreeMap::from([("1".to_string(), 1)]),
        }
    }

    /// Two genus-0 vertices joined by three parallel bounded edges.
    pub fn theta() -> StableGraph {
        StableGraph {
            genus_of_vertex: vec![0, 0],
            edges: (0..3)
                .map(|_| Edge { ends: vec![0, 1], bounded: true, leg: false })
                .collect(),
            marks: BTreeMap::new(),
        }
    }

    /// A trivalent caterpillar tree with legs "1".."n".
    pub fn caterpillar(n: usize) -> StableGraph {
        assert!(n >= 3);
        if n == 3 {
            return star(0, 3);
        }
        let nv = n - 2;
        let mut edges = vec![];
        let mut marks = BTreeMap::new();
        for v in 0..nv - 1 {
            edges.push(Edge { ends: vec![v, v + 1], bounded: true, leg: false });
        }
        let mut leg = |v: usize, label: usize, edges: &mut Vec<Edge>| {
            edges.push(Edge { ends: vec![v], bounded: false, leg: true });
            marks.insert(label.to_string(), edges.len() - 1);
        };
        leg(0, 1, &mut edges);
        leg(0, 2, &mut edges);
        for v in 1..nv - 1 {
            leg(v, v + 2, &mut edges);
        }
        leg(nv - 1, n - 1, &mut edges);
        leg(nv - 1, n, &mut edges);
        StableGraph { genus_of_vertex: vec![0; nv], edges, marks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        // one vertex, genus 1, one leg: valid
        let g = build::star(1, 1);
        assert!(g.validate().unwrap().is_valid());
        // one vertex, genus 0, two legs: invalid
        let g = build::star(0, 2);
        let rep = g.validate().unwrap();
        assert!(!rep.is_valid());
        assert_eq!(rep.unstable_vertices, vec![0]);
        // theta graph: valid
        assert!(build::theta().validate().unwrap().is_valid());
    }

    #[test]
    fn structural_error_is_distinct() {
        let g = StableGraph {
            genus_of_vertex: vec![0],
            edges: vec![Edge { ends: vec![5], bounded: false, leg: true }],
            marks: BTreeMap::from([("1".into(), 0)]),
        };
        assert!(matches!(g.validate(), Err(Error::Structural(_))));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(build::star(1, 1).genus(), 1);
        assert_eq!(build::theta().genus(), 2);
        assert_eq!(build::caterpillar(5).genus(), 0);
    }

    #[test]
    fn contract_loop_preserves_genus() {
        let g = build::loop_with_leg();
        assert_eq!(g.genus(), 1);
        let c = g.contract_edge(0).unwrap();
        assert_eq!(c.genus(), 1);
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.genus_of_vertex[0], 1);
        assert!(c.validate().unwrap().is_valid());
    }

    #[test]
    fn contract_tree_edge() {
        let g = build::caterpillar(4);
        // one internal bounded edge
        let e = g.bounded_edges().next().unwrap();
        let c = g.contract_edge(e).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.valence(0), 4);
        assert_eq!(c.genus(), 0);
    }

    #[test]
    fn stretch_preserves_genus_and_validity() {
        let g = build::theta();
        let s = g.stretch_edge(0).unwrap();
        assert_eq!(s.genus(), g.genus());
        assert!(s.validate().unwrap().is_valid());
        assert!(matches!(s.stretch_edge(0), Err(Error::Domain(_))));
        assert!(matches!(s.contract_edge(0), Err(Error::Domain(_))));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(build::theta().automorphisms().len(), 12);
        assert_eq!(build::caterpillar(5).automorphisms().len(), 1);
        assert_eq!(build::loop_with_leg().automorphisms().len(), 2);
    }

    #[test]
    fn automorphisms_form_group() {
        for g in [build::theta(), build::loop_with_leg(), build::caterpillar(4)] {
            let auts = g.automorphisms();
            assert!(auts.iter().any(|a| a.is_identity()));
            for a in &auts {
                for b in &auts {
                    let c = a.compose(b);
                    assert!(auts.contains(&c), "closure fails");
                }
            }
            // Inverses: composing over the finite group hits the identity.
            for a in &auts {
                assert!(auts.iter().any(|b| a.compose(b).is_identity()));
            }
        }
    }

    #[test]
    fn rigidification_counts() {
        assert_eq!(build::loop_with_leg().cycle_rigidifications().len(), 2);
        assert_eq!(build::caterpillar(5).cycle_rigidifications().len(), 1);
        // theta: brute force count of ordered generating pairs of oriented
        // primitive cycles. The three simple cycles pairwise generate.
        let theta = build::theta();
        let rigs = theta.cycle_rigidifications();
        let oriented = theta.oriented_primitive_cycles();
        assert_eq!(oriented.len(), 6);
        let ne = theta.edges.len();
        let mut expected = 0;
        for a in &oriented {
            for b in &oriented {
                let vecs = vec![a.class(ne), b.class(ne)];
                if rank(&vecs) == 2 && spans_h1(&theta, &vecs, 2) {
                    expected += 1;
                }
            }
        }
        assert_eq!(rigs.len(), expected);
        assert_eq!(expected, 24);
    }

    #[test]
    fn rigidified_graphs_are_rigid() {
        // Only the identity automorphism fixes all oriented cycles.
        for g in [build::theta(), build::loop_with_leg()] {
            let ne = g.edges.len();
            for rig in g.cycle_rigidifications() {
                let fixing: Vec<_> = g
                    .automorphisms()
                    .into_iter()
                    .filter(|a| {
                        rig.cycles.iter().all(|c| match c {
                            None => true,
                            Some(ch) => a.push_class(&ch.class(ne)) == ch.class(ne),
                        })
                    })
                    .collect();
                assert_eq!(fixing.len(), 1);
                assert!(fixing[0].is_identity());
            }
        }
    }

    #[test]
    fn contract_stretch_commute_on_disjoint_edges() {
        let g = build::caterpillar(6); // three internal edges
        let es: Vec<_> = g.bounded_edges().collect();
        let (a, b) = (es[0], es[2]);
        let left = g.contract_edge(a).unwrap();
        // After contracting `a`, edge `b` shifts down by one.
        let left = left.stretch_edge(b - 1).unwrap();
        let right = g.stretch_edge(b).unwrap();
        let right = right.contract_edge(a).unwrap();
        assert!(left.is_isomorphic(&right));
    }
}
