//! The moduli fan of rational tropical curves: M_{0,n} embedded via distance
//! coordinates, cones indexed by marked trees, the forgetful projection, and
//! atlas cones of cycle-rigidified graphs.

use crate::cycles::{ConeComplex, Int, Rat};
use crate::error::Error;
use crate::graph::{CycleRigidifiedGraph, EdgeChain, StableGraph};
use crate::lattice::{smith_normal_form, IntMat};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

/// A split of the marks 1..n: stored as the side not containing n.
/// Both sides have at least two elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Split(pub BTreeSet<u32>);

impl Split {
    pub fn separates(&self, i: u32, j: u32) -> bool {
        self.0.contains(&i) != self.0.contains(&j)
    }

    /// Normalize an arbitrary side of a split of 1..n.
    pub fn normalize(side: &BTreeSet<u32>, n: u32) -> Split {
        if side.contains(&n) {
            Split((1..=n).filter(|m| !side.contains(m)).collect())
        } else {
            Split(side.clone())
        }
    }

    pub fn is_valid(&self, n: u32) -> bool {
        self.0.len() >= 2 && (self.0.len() as u32) <= n - 2 && self.0.iter().all(|&m| m < n && m >= 1)
    }

    fn compatible(&self, other: &Split) -> bool {
        let a = &self.0;
        let b = &other.0;
        a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)
    }
}

/// The combinatorial tree of a cone: vertices, leg positions and one edge
/// per split of the defining laminar family.
#[derive(Clone, Debug)]
pub struct TreeType {
    pub n: u32,
    /// Split ids (indices into `ModuliFan::splits`), sorted.
    pub splits: Vec<usize>,
    pub vertex_count: usize,
    /// Vertex carrying leg m (index m-1).
    pub leg_vertex: Vec<usize>,
    /// Edge per split (aligned with `splits`): (outer vertex, inner vertex),
    /// where inner is the component given by the stored split side.
    pub edge_ends: Vec<(usize, usize)>,
}

impl TreeType {
    /// Number of bounded edges.
    pub fn dim(&self) -> usize {
        self.splits.len()
    }
}

/// M_{0,n} as an embedded fan in reduced coordinates of
/// R^(n choose 2) / R^n, with the half-distance lattice normalization under
/// which split rays are integral.
pub struct ModuliFan {
    pub n: u32,
    pub reduced_rank: usize,
    pub splits: Vec<Split>,
    pub complex: Arc<ConeComplex>,
    /// Tree of each cone (parallel to `complex.cones`).
    pub trees: Vec<TreeType>,
    /// Reduced coordinates: proj maps Z^(n choose 2) onto Z^reduced_rank
    /// killing the saturated image of Z^n; lift is an integer section.
    pub proj: IntMat,
    pub lift: IntMat,
    cone_of_splits: BTreeMap<Vec<usize>, usize>,
}

/// Lexicographic index of the pair {i, j} (1-based marks) among all pairs.
pub fn pair_index(n: u32, i: u32, j: u32) -> usize {
    assert!(i != j && i >= 1 && j >= 1 && i <= n && j <= n);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    let a = (a - 1) as usize;
    let b = (b - 1) as usize;
    let n = n as usize;
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

pub fn pair_count(n: u32) -> usize {
    let n = n as usize;
    n * (n - 1) / 2
}

/// Doubled indicator of separated pairs for a split, in Z^(n choose 2).
fn split_vector(n: u32, s: &Split) -> Vec<Int> {
    let mut v = vec![Int::zero(); pair_count(n)];
    for i in 1..=n {
        for j in (i + 1)..=n {
            if s.separates(i, j) {
                v[pair_index(n, i, j)] = Int::one();
            }
        }
    }
    v
}

impl ModuliFan {
    /// Build the moduli fan for n marks. Cones are indexed by all stable
    /// n-marked genus-zero trees (laminar split families); top cones by
    /// trivalent trees.
    pub fn build(n: u32) -> Result<ModuliFan, Error> {
        if n < 3 {
            return Err(Error::Domain(format!("need n >= 3 marks, got {n}")));
        }
        // All splits: subsets of 1..n-1 of size 2..n-2.
        let mut splits: Vec<Split> = vec![];
        let universe: Vec<u32> = (1..n).collect();
        let m = universe.len();
        for mask in 1usize..(1 << m) {
            let side: BTreeSet<u32> =
                (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| universe[b]).collect();
            let s = Split(side);
            if s.is_valid(n) {
                splits.push(s);
            }
        }
        splits.sort();

        // Enumerate laminar families by DFS over sorted split indices.
        let mut families: Vec<Vec<usize>> = vec![];
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(fam) = stack.pop() {
            families.push(fam.clone());
            let start = fam.last().map_or(0, |&x| x + 1);
            for cand in start..splits.len() {
                if fam.iter().all(|&f| splits[f].compatible(&splits[cand])) {
                    let mut next = fam.clone();
                    next.push(cand);
                    stack.push(next);
                }
            }
        }
        families.sort();

        // Reduced lattice: quotient of Z^(n choose 2) by the saturation of
        // the image of Z^n under e_i -> sum_{j != i} e_{ij}.
        let c = pair_count(n);
        let mut phi = IntMat::zero(c, n as usize);
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    phi[(pair_index(n, i, j), (i - 1) as usize)] = Int::one();
                }
            }
        }
        let s = smith_normal_form(&phi);
        let rank = s.rank;
        let reduced_rank = c - rank;
        let uinv = crate::lattice::unimodular_inverse(&s.u);
        // proj = last reduced_rank rows of u; lift = last columns of u^-1.
        let mut proj = IntMat::zero(reduced_rank, c);
        let mut lift = IntMat::zero(c, reduced_rank);
        for k in 0..reduced_rank {
            for j in 0..c {
                proj[(k, j)] = s.u[(rank + k, j)].clone();
                lift[(j, k)] = uinv[(j, rank + k)].clone();
            }
        }

        // Ray generators: proj(split vector) / 2, the paper's half-distance
        // normalization. Divisibility by two in reduced coordinates is a
        // structural fact of the quotient; verified here.
        let mut ray_gens = vec![];
        for sp in &splits {
            let v = split_vector(n, sp);
            let pv = proj.mul_vec(&v);
            let mut half = vec![];
            for x in &pv {
                if (x % Int::from(2)).is_zero() {
                    half.push(x / Int::from(2));
                } else {
                    return Err(Error::Inconsistent(
                        "split vector not divisible by two in reduced coordinates".into(),
                    ));
                }
            }
            ray_gens.push(half);
        }

        let complex = Arc::new(ConeComplex::new(
            reduced_rank,
            ray_gens,
            families.clone(),
        )?);

        let trees: Vec<TreeType> =
            families.iter().map(|f| build_tree(n, f, &splits)).collect();
        let cone_of_splits: BTreeMap<Vec<usize>, usize> =
            families.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();

        Ok(ModuliFan { n, reduced_rank, splits, complex, trees, proj, lift, cone_of_splits })
    }

    pub fn cone_of(&self, splits: &[usize]) -> Option<usize> {
        let mut s = splits.to_vec();
        s.sort_unstable();
        self.cone_of_splits.get(&s).copied()
    }

    pub fn origin(&self) -> usize {
        self.cone_of(&[]).expect("origin cone exists")
    }

    pub fn top_dim(&self) -> usize {
        (self.n as usize).saturating_sub(3)
    }

    pub fn rays(&self) -> usize {
        self.splits.len()
    }

    pub fn top_cones(&self) -> Vec<usize> {
        self.complex.cones_of_dim(self.top_dim()).collect()
    }

    /// Reduced coordinates of the metric tree with the given lengths on the
    /// bounded edges of cone `c` (aligned with its split list).
    pub fn point(&self, c: usize, lengths: &[Rat]) -> Vec<Rat> {
        let tree = &self.trees[c];
        assert_eq!(lengths.len(), tree.splits.len());
        let mut v = vec![Rat::zero(); self.reduced_rank];
        for (k, &s) in tree.splits.iter().enumerate() {
            let ray_index = s;
            let g = &self.complex.rays[ray_index];
            for i in 0..self.reduced_rank {
                v[i] += &lengths[k] * Rat::from(g[i].clone());
            }
        }
        v
    }
}

/// Build the tree for a laminar family: regions nested by inclusion.
fn build_tree(n: u32, family: &[usize], splits: &[Split]) -> TreeType {
    // children[i]: splits directly contained in split i; roots: maximal.
    let sets: Vec<&BTreeSet<u32>> = family.iter().map(|&f| &splits[f].0).collect();
    let k = sets.len();
    let mut parent: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        // smallest strict superset
        let mut best: Option<usize> = None;
        for j in 0..k {
            if i != j && sets[i].is_subset(sets[j]) && sets[i] != sets[j] {
                if best.map_or(true, |b| sets[j].len() < sets[b].len()) {
                    best = Some(j);
                }
            }
        }
        parent[i] = best;
    }
    // Vertices: the root region (containing mark n), plus one per split.
    let vertex_count = k + 1;
    let vertex_of_split = |i: usize| i + 1;
    let mut edge_ends = vec![(0usize, 0usize); k];
    for i in 0..k {
        let outer = match parent[i] {
            None => 0,
            Some(p) => vertex_of_split(p),
        };
        edge_ends[i] = (outer, vertex_of_split(i));
    }
    // Leg positions: mark m sits at the vertex of the smallest split
    // containing it, or at the root.
    let mut leg_vertex = vec![0usize; n as usize];
    for m in 1..n {
        let mut best: Option<usize> = None;
        for i in 0..k {
            if sets[i].contains(&m) && best.map_or(true, |b| sets[i].len() < sets[b].len()) {
                best = Some(i);
            }
        }
        leg_vertex[(m - 1) as usize] = best.map_or(0, vertex_of_split);
    }
    leg_vertex[(n - 1) as usize] = 0;
    TreeType {
        n,
        splits: family.to_vec(),
        vertex_count,
        leg_vertex,
        edge_ends,
    }
}

impl TreeType {
    /// Marks reachable from vertex `v` through each of its flags, with the
    /// flag described as either a leg or the local edge index crossed first.
    pub fn directions_at(&self, v: usize) -> Vec<Direction> {
        let mut dirs = vec![];
        for (m, &lv) in self.leg_vertex.iter().enumerate() {
            if lv == v {
                dirs.push(Direction { via: Via::Leg(m as u32 + 1), marks: vec![m as u32 + 1] });
            }
        }
        for (e, &(a, b)) in self.edge_ends.iter().enumerate() {
            let other = if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            };
            if let Some(w) = other {
                let marks = self.marks_beyond(v, w);
                dirs.push(Direction { via: Via::Edge(e), marks });
            }
        }
        dirs
    }

    /// Marks in the component of `w` after removing the edge {v, w}.
    fn marks_beyond(&self, v: usize, w: usize) -> Vec<u32> {
        let mut seen = vec![false; self.vertex_count];
        seen[v] = true;
        seen[w] = true;
        let mut queue = VecDeque::from([w]);
        while let Some(x) = queue.pop_front() {
            for &(a, b) in &self.edge_ends {
                for (p, q) in [(a, b), (b, a)] {
                    if p == x && !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        seen[v] = false;
        (1..=self.n).filter(|&m| seen[self.leg_vertex[(m - 1) as usize]]).collect()
    }

    /// Local edge indices (into `splits`) on the path between two vertices.
    pub fn path_edges(&self, from: usize, to: usize) -> Vec<usize> {
        // BFS parents
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for (e, &(a, b)) in self.edge_ends.iter().enumerate() {
                for (p, q) in [(a, b), (b, a)] {
                    if p == x && !seen[q] {
                        seen[q] = true;
                        prev[q] = Some((x, e));
                        queue.push_back(q);
                    }
                }
            }
        }
        let mut path = vec![];
        let mut at = to;
        while at != from {
            let (p, e) = prev[at].expect("tree is connected");
            path.push(e);
            at = p;
        }
        path.reverse();
        path
    }

    /// The stable graph of this tree (legs marked "1".."n").
    pub fn to_stable_graph(&self) -> StableGraph {
        let mut edges = vec![];
        let mut marks = BTreeMap::new();
        for &(a, b) in &self.edge_ends {
            edges.push(crate::graph::Edge { ends: vec![a, b], bounded: true, leg: false });
        }
        for m in 1..=self.n {
            edges.push(crate::graph::Edge {
                ends: vec![self.leg_vertex[(m - 1) as usize]],
                bounded: false,
                leg: true,
            });
            marks.insert(m.to_string(), edges.len() - 1);
        }
        StableGraph { genus_of_vertex: vec![0; self.vertex_count], edges, marks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Via {
    Leg(u32),
    Edge(usize),
}

#[derive(Clone, Debug)]
pub struct Direction {
    pub via: Via,
    pub marks: Vec<u32>,
}

// ---------------------------------------------------------------------------
// Distance coordinates
// ---------------------------------------------------------------------------

/// A metric graph point: a genus-zero stable graph with positive lengths on
/// its bounded edges.
#[derive(Clone, Debug)]
pub struct MetricGraphPoint {
    pub graph: StableGraph,
    /// Length per bounded edge id.
    pub lengths: BTreeMap<usize, Rat>,
}

/// Doubled distance vector: entry {i,j} is the full tree distance between
/// the vertices carrying legs i and j (twice the embedding coordinate).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceVector {
    pub n: u32,
    pub doubled_coords: Vec<Rat>,
}

/// Tree distances between leg vertices, linear in the lengths.
pub fn distance_coordinates(p: &MetricGraphPoint, n: u32) -> Result<DistanceVector, Error> {
    let g = &p.graph;
    if g.genus() != 0 {
        return Err(Error::Domain("distance coordinates require a genus-zero type".into()));
    }
    let rep = g.validate()?;
    if !rep.is_valid() {
        return Err(Error::Domain("invalid stable graph".into()));
    }
    for e in g.bounded_edges() {
        match p.lengths.get(&e) {
            Some(l) if l.is_positive() => {}
            Some(_) => return Err(Error::Domain(format!("length of edge {e} must be positive"))),
            None => return Err(Error::Domain(format!("missing length for bounded edge {e}"))),
        }
    }
    if p.lengths.keys().any(|e| !g.edges[*e].bounded) {
        return Err(Error::Domain("length assigned to an unbounded edge".into()));
    }
    let leg_vertex = |label: u32| -> Result<usize, Error> {
        let e = g
            .marks
            .get(&label.to_string())
            .ok_or_else(|| Error::Domain(format!("missing mark {label}")))?;
        Ok(g.edges[*e].ends[0])
    };
    let mut coords = vec![Rat::zero(); pair_count(n)];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let (vi, vj) = (leg_vertex(i)?, leg_vertex(j)?);
            coords[pair_index(n, i, j)] = graph_distance(g, &p.lengths, vi, vj)?;
        }
    }
    Ok(DistanceVector { n, doubled_coords: coords })
}

fn graph_distance(
    g: &StableGraph,
    lengths: &BTreeMap<usize, Rat>,
    from: usize,
    to: usize,
) -> Result<Rat, Error> {
    if from == to {
        return Ok(Rat::zero());
    }
    let nv = g.vertex_count();
    let mut dist: Vec<Option<Rat>> = vec![None; nv];
    dist[from] = Some(Rat::zero());
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for (i, e) in g.edges.iter().enumerate() {
            if e.ends.len() != 2 || !e.bounded {
                continue;
            }
            for (a, b) in [(0, 1), (1, 0)] {
                if e.ends[a] == v && dist[e.ends[b]].is_none() {
                    let d = dist[v].clone().unwrap() + lengths[&i].clone();
                    dist[e.ends[b]] = Some(d);
                    queue.push_back(e.ends[b]);
                }
            }
        }
    }
    dist[to].clone().ok_or_else(|| Error::Domain("graph is disconnected".into()))
}

/// Reduce a doubled distance vector to the fan's internal coordinates
/// (half-distance normalization).
pub fn reduce_distance(fan: &ModuliFan, d: &DistanceVector) -> Vec<Rat> {
    assert_eq!(d.n, fan.n);
    let mut out = vec![Rat::zero(); fan.reduced_rank];
    for r in 0..fan.reduced_rank {
        let mut acc = Rat::zero();
        for j in 0..pair_count(fan.n) {
            acc += Rat::from(fan.proj[(r, j)].clone()) * &d.doubled_coords[j];
        }
        out[r] = acc / Rat::from(Int::from(2));
    }
    out
}

// ---------------------------------------------------------------------------
// Forgetful map
// ---------------------------------------------------------------------------

/// The combinatorial and linear data of forgetting the last mark
/// (the mark n+1 of M_{0,n+1}, written `*`).
pub struct ForgetfulMap {
    pub n: u32,
    /// Integer matrix from reduced((n+1)-fan) to reduced(n-fan) coordinates.
    pub matrix: IntMat,
}

/// Build the projection M_{0,n+1} -> M_{0,n} forgetting mark n+1.
pub fn forgetful_map(fan_big: &ModuliFan, fan_small: &ModuliFan) -> Result<ForgetfulMap, Error> {
    let n = fan_small.n;
    if fan_big.n != n + 1 {
        return Err(Error::Domain("fans must have n+1 and n marks".into()));
    }
    // Restriction R: Z^(n+1 choose 2) -> Z^(n choose 2) on pairs within 1..n.
    let mut r = IntMat::zero(pair_count(n), pair_count(n + 1));
    for i in 1..=n {
        for j in (i + 1)..=n {
            r[(pair_index(n, i, j), pair_index(n + 1, i, j))] = Int::one();
        }
    }
    let matrix = fan_small.proj.mul(&r).mul(&fan_big.lift);
    Ok(ForgetfulMap { n, matrix })
}

impl ForgetfulMap {
    /// Delete mark n+1 from a split of 1..n+1 and restabilize; None when the
    /// split's edge gets contracted.
    pub fn stabilize_split(&self, s: &Split) -> Option<Split> {
        let n = self.n;
        // Splits of the big fan are normalized not to contain n+1.
        let side: BTreeSet<u32> = s.0.clone();
        let renorm = Split::normalize(&side, n);
        if renorm.is_valid(n) {
            Some(renorm)
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Atlas cones for cycle-rigidified graphs
// ---------------------------------------------------------------------------

/// The cone R_{>=0}^{E_b(G)} of a cycle-rigidified stable graph, with its
/// codimension-one faces given by single-edge contractions carrying the
/// induced rigidifications.
pub struct AtlasCone {
    pub graph: CycleRigidifiedGraph,
    /// Coordinate labels: bounded edge ids of the base graph.
    pub coordinates: Vec<usize>,
    /// (contracted edge, face graph with induced rigidification)
    pub faces: Vec<(usize, CycleRigidifiedGraph)>,
}

pub fn atlas_cone(g: &CycleRigidifiedGraph) -> Result<AtlasCone, Error> {
    let base = &g.base;
    let rep = base.validate()?;
    if !rep.is_valid() {
        return Err(Error::Domain("invalid stable graph".into()));
    }
    let coords: Vec<usize> = base.bounded_edges().collect();
    let mut faces = vec![];
    for &e in &coords {
        let contracted = base.contract_edge(e)?;
        let is_loop = base.edges[e].ends[0] == base.edges[e].ends[1];
        let cycles = g
            .cycles
            .iter()
            .map(|c| induce_cycle(c, e, is_loop))
            .collect();
        faces.push((e, CycleRigidifiedGraph { base: contracted, cycles }));
    }
    Ok(AtlasCone { graph: g.clone(), coordinates: coords, faces })
}

/// Induced oriented cycle after contracting edge `e` of the base.
fn induce_cycle(c: &Option<EdgeChain>, e: usize, is_loop: bool) -> Option<EdgeChain> {
    let chain = c.as_ref()?;
    if is_loop && chain.edges.iter().any(|&(x, _)| x == e) {
        // Contracting a loop kills the cycle through it.
        return None;
    }
    let edges: Vec<(usize, i8)> = chain
        .edges
        .iter()
        .filter(|&&(x, _)| x != e)
        .map(|&(x, s)| (if x > e { x - 1 } else { x }, s))
        .collect();
    if edges.is_empty() {
        None
    } else {
        Some(EdgeChain { edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build;
    use crate::lattice::{primitive_part, saturation_basis};

    #[test]
    fn m04_shape() {
        let fan = ModuliFan::build(4).unwrap();
        assert_eq!(fan.rays(), 3);
        assert_eq!(fan.reduced_rank, 2);
        assert_eq!(fan.top_cones().len(), 3);
        assert_eq!(fan.top_dim(), 1);
        // one vertex: the origin cone's tree is the star
        let origin = fan.origin();
        assert_eq!(fan.trees[origin].vertex_count, 1);
    }

    #[test]
    fn m05_m06_counts() {
        let fan5 = ModuliFan::build(5).unwrap();
        assert_eq!(fan5.rays(), 10);
        assert_eq!(fan5.top_cones().len(), 15);
        let fan6 = ModuliFan::build(6).unwrap();
        assert_eq!(fan6.top_cones().len(), 105);
    }

    #[test]
    fn rejects_small_n() {
        assert!(ModuliFan::build(2).is_err());
    }

    #[test]
    fn face_lattice_matches_contractions() {
        // sigma_{G'} is a face of sigma_G iff the split family of G' is a
        // subfamily of G's.
        let fan = ModuliFan::build(5).unwrap();
        for (i, ci) in fan.complex.cones.iter().enumerate() {
            for (j, cj) in fan.complex.cones.iter().enumerate() {
                let face_of = fan.trees[i]
                    .splits
                    .iter()
                    .all(|s| fan.trees[j].splits.contains(s));
                let rays_subset = ci.rays.iter().all(|r| cj.rays.contains(r));
                assert_eq!(face_of, rays_subset, "cones {i} {j}");
            }
        }
    }

    #[test]
    fn distance_coordinates_split_type() {
        // 4-leg type {1,2}|{3,4} with length l: separated pairs get l.
        let mut g = build::caterpillar(4);
        // caterpillar(4): legs 1,2 at vertex 0; legs 3,4 at vertex 1.
        let l = Rat::from(Int::from(5));
        let p = MetricGraphPoint {
            graph: g.clone(),
            lengths: BTreeMap::from([(0usize, l.clone())]),
        };
        let d = distance_coordinates(&p, 4).unwrap();
        let idx = |i, j| pair_index(4, i, j);
        assert_eq!(d.doubled_coords[idx(1, 2)], Rat::zero());
        assert_eq!(d.doubled_coords[idx(3, 4)], Rat::zero());
        for (i, j) in [(1, 3), (1, 4), (2, 3), (2, 4)] {
            assert_eq!(d.doubled_coords[idx(i, j)], l);
        }
        // star tree: zero vector
        g = build::star(0, 4);
        let p = MetricGraphPoint { graph: g, lengths: BTreeMap::new() };
        let d = distance_coordinates(&p, 4).unwrap();
        assert!(d.doubled_coords.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn distance_additivity_on_caterpillar() {
        let g = build::caterpillar(5); // two internal edges
        let l0 = Rat::from(Int::from(2));
        let l1 = Rat::from(Int::from(7));
        let p = MetricGraphPoint {
            graph: g.clone(),
            lengths: BTreeMap::from([(0usize, l0.clone()), (1usize, l1.clone())]),
        };
        let d = distance_coordinates(&p, 5).unwrap();
        // legs 1,2 at vertex 0, leg 3 at vertex 1, legs 4,5 at vertex 2
        assert_eq!(d.doubled_coords[pair_index(5, 1, 3)], l0);
        assert_eq!(d.doubled_coords[pair_index(5, 3, 4)], l1);
        assert_eq!(d.doubled_coords[pair_index(5, 1, 4)], l0 + l1);
    }

    #[test]
    fn positive_genus_rejected() {
        let p = MetricGraphPoint {
            graph: build::loop_with_leg(),
            lengths: BTreeMap::from([(0usize, Rat::one())]),
        };
        assert!(matches!(distance_coordinates(&p, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn point_on_cone_matches_reduced_distances() {
        let fan = ModuliFan::build(5).unwrap();
        // pick a top cone and rational lengths
        let top = fan.top_cones()[0];
        let lengths = vec![Rat::from(Int::from(3)), Rat::new(Int::from(7), Int::from(2))];
        let via_rays = fan.point(top, &lengths);
        // independently: build the metric tree, doubled distances, reduce.
        let tree = &fan.trees[top];
        let g = tree.to_stable_graph();
        let mut lmap = BTreeMap::new();
        for (k, _) in tree.splits.iter().enumerate() {
            lmap.insert(k, lengths[k].clone());
        }
        let p = MetricGraphPoint { graph: g, lengths: lmap };
        let d = distance_coordinates(&p, 5).unwrap();
        let reduced = reduce_distance(&fan, &d);
        assert_eq!(via_rays, reduced);
    }

    #[test]
    fn forgetful_matrix_sends_rays_to_rays() {
        let fan5 = ModuliFan::build(5).unwrap();
        let fan4 = ModuliFan::build(4).unwrap();
        let f = forgetful_map(&fan5, &fan4).unwrap();
        for (i, s) in fan5.splits.iter().enumerate() {
            let img = f.matrix.mul_vec(&fan5.complex.rays[i]);
            match f.stabilize_split(s) {
                None => assert!(img.iter().all(|x| x.is_zero())),
                Some(t) => {
                    let j = fan4.splits.iter().position(|x| *x == t).unwrap();
                    assert_eq!(img, fan4.complex.rays[j]);
                }
            }
        }
    }

    #[test]
    fn atlas_cone_of_loop_graph() {
        let g = build::loop_with_leg();
        let rigs = g.cycle_rigidifications();
        assert_eq!(rigs.len(), 2, "two orientations: the M_{{1,1}} atlas is two glued rays");
        for rig in &rigs {
            let cone = atlas_cone(rig).unwrap();
            assert_eq!(cone.coordinates.len(), 1);
            // the face contracts the loop: genus moves to the vertex, cycle dies
            let (_, face) = &cone.faces[0];
            assert_eq!(face.base.genus_of_vertex[0], 1);
            assert!(face.cycles[0].is_none());
        }
    }

    #[test]
    fn atlas_cone_tree_dimension() {
        let g = build::caterpillar(5);
        let rig = &g.cycle_rigidifications()[0];
        let cone = atlas_cone(rig).unwrap();
        assert_eq!(cone.coordinates.len(), 2);
        for (_, face) in &cone.faces {
            assert!(face.base.validate().unwrap().is_valid());
        }
    }

    #[test]
    fn quartet_functionals_saturate_dual_lattice() {
        // The functionals x_ij + x_kl - x_ik - x_jl span the full dual of
        // the reduced lattice over Z.
        for n in 4..=7u32 {
            let fan = ModuliFan::build(n).unwrap();
            let mut rows: Vec<Vec<Int>> = vec![];
            let marks: Vec<u32> = (1..=n).collect();
            for &i in &marks {
                for &j in &marks {
                    for &k in &marks {
                        for &l in &marks {
                            let set: BTreeSet<u32> = [i, j, k, l].into_iter().collect();
                            if set.len() != 4 {
                                continue;
                            }
                            let mut f = vec![Int::zero(); pair_count(n)];
                            f[pair_index(n, i, j)] += Int::one();
                            f[pair_index(n, k, l)] += Int::one();
                            f[pair_index(n, i, k)] -= Int::one();
                            f[pair_index(n, j, l)] -= Int::one();
                            // reduced covector: F . lift
                            let red: Vec<Int> = (0..fan.reduced_rank)
                                .map(|c| {
                                    (0..pair_count(n))
                                        .map(|r| &f[r] * &fan.lift[(r, c)])
                                        .sum()
                                })
                                .collect();
                            rows.push(red);
                        }
                    }
                }
            }
            let m = IntMat::from_rows(rows);
            let s = smith_normal_form(&m.transpose());
            assert_eq!(s.rank, fan.reduced_rank);
            for k in 0..s.rank {
                assert_eq!(s.d[(k, k)].clone().abs(), Int::one(), "dual saturation at n={n}");
            }
        }
    }

    #[test]
    fn ray_generators_are_primitive() {
        for n in 4..=6u32 {
            let fan = ModuliFan::build(n).unwrap();
            for r in &fan.complex.rays {
                let (_, content) = primitive_part(r);
                assert_eq!(content, Int::one());
            }
        }
    }

    #[test]
    fn saturation_basis_smoke() {
        // proj . lift = identity
        let fan = ModuliFan::build(5).unwrap();
        let id = fan.proj.mul(&fan.lift);
        assert_eq!(id, IntMat::identity(fan.reduced_rank));
        let _ = saturation_basis(&fan.proj.transpose());
    }
}
