//! Floor diagrams for plane tropical curve counts through generic stretched
//! point configurations: genus-zero enumeration with multiplicities.

use crate::error::Error;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type Int = BigInt;

/// A floor diagram: a connected directed graph on linearly ordered floors
/// 1..d with weighted edges respecting the order, of first Betti number g,
/// and with divergence at most one at every floor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloorDiagram {
    pub d: u32,
    pub g: u32,
    /// Edges (from, to, weight) with from < to, floors 1-based.
    pub edges: Vec<(u32, u32, u32)>,
}

impl FloorDiagram {
    /// Multiplicity: the product of the squared edge weights.
    pub fn multiplicity(&self) -> Int {
        let mut m = Int::one();
        for &(_, _, w) in &self.edges {
            m *= Int::from(w as i64) * Int::from(w as i64);
        }
        m
    }

    fn divergence(&self, v: u32, reversed: bool) -> i64 {
        let mut div = 0i64;
        for &(a, b, w) in &self.edges {
            if a == v {
                div += w as i64;
            }
            if b == v {
                div -= w as i64;
            }
        }
        if reversed {
            -div
        } else {
            div
        }
    }

    fn connected(&self) -> bool {
        if self.d == 1 {
            return true;
        }
        let mut seen = vec![false; self.d as usize + 1];
        seen[1] = true;
        let mut stack = vec![1u32];
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &self.edges {
                for (p, q) in [(a, b), (b, a)] {
                    if p == v && !seen[q as usize] {
                        seen[q as usize] = true;
                        stack.push(q);
                    }
                }
            }
        }
        (1..=self.d).all(|v| seen[v as usize])
    }

    /// Markings: linear orders of floors, bounded elevators, and unbounded
    /// elevators. Floor order is fixed; a bounded elevator (a, b) sits
    /// strictly between its floors; each floor v has 1 - div(v) unbounded
    /// elevators placed after it (before it in the reversed orientation),
    /// indistinguishable among one another.
    pub fn markings(&self, reversed: bool) -> Int {
        let d = self.d as usize;
        let unbounded: Vec<i64> =
            (1..=self.d).map(|v| 1 - self.divergence(v, reversed)).collect();
        if unbounded.iter().any(|&u| u < 0) {
            return Int::zero();
        }
        // Scan left to right; state: (next floor to place, per-pending
        // element counts). Memoized on (floors placed, bounded placed mask,
        // remaining unbounded per already-passed floor).
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
        struct State {
            floors_placed: usize,
            bounded_mask: u64,
            unbounded_left: Vec<i64>,
        }
        let edges = &self.edges;
        let mirror = |v: u32, reversed: bool| -> u32 {
            if reversed {
                self.d + 1 - v
            } else {
                v
            }
        };
        // In the reversed orientation re-express everything as a left-to-
        // right scan of mirrored labels: edge (a,b) becomes
        // (d+1-b, d+1-a); unbounded elevators then again follow their floor.
        let scan_edges: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(a, b, _)| {
                if reversed {
                    (mirror(b, true), mirror(a, true))
                } else {
                    (a, b)
                }
            })
            .collect();
        let scan_unbounded: Vec<i64> = (1..=self.d)
            .map(|v| unbounded[(mirror(v, reversed) - 1) as usize])
            .collect();

        let mut memo: BTreeMap<State, Int> = BTreeMap::new();
        fn count(
            st: State,
            d: usize,
            scan_edges: &[(u32, u32)],
            scan_unbounded: &[i64],
            memo: &mut BTreeMap<State, Int>,
        ) -> Int {
            let done = st.floors_placed == d
                && st.bounded_mask == (1u64 << scan_edges.len()) - 1
                && st.unbounded_left.iter().all(|&u| u == 0);
            if done {
                return Int::one();
            }
            if let Some(v) = memo.get(&st) {
                return v.clone();
            }
            let mut total = Int::zero();
            // Place the next floor f = floors_placed + 1: requires every
            // bounded elevator ending at f to be placed already.
            if st.floors_placed < d {
                let f = st.floors_placed as u32 + 1;
                let ready = scan_edges
                    .iter()
                    .enumerate()
                    .all(|(i, &(_, b))| b != f || st.bounded_mask >> i & 1 == 1);
                if ready {
                    let mut next = st.clone();
                    next.floors_placed += 1;
                    next.unbounded_left.push(scan_unbounded[st.floors_placed]);
                    total += count(next, d, scan_edges, scan_unbounded, memo);
                }
            }
            // Place a bounded elevator whose source floor is placed.
            for (i, &(a, _)) in scan_edges.iter().enumerate() {
                if st.bounded_mask >> i & 1 == 0 && (a as usize) <= st.floors_placed {
                    let mut next = st.clone();
                    next.bounded_mask |= 1 << i;
                    total += count(next, d, scan_edges, scan_unbounded, memo);
                }
            }
            // Place an unbounded elevator of some passed floor (one group
            // per floor; members indistinguishable).
            for v in 0..st.floors_placed {
                if st.unbounded_left[v] > 0 {
                    let mut next = st.clone();
                    next.unbounded_left[v] -= 1;
                    total += count(next, d, scan_edges, scan_unbounded, memo);
                }
            }
            memo.insert(st, total.clone());
            total
        }
        count(
            State { floors_placed: 0, bounded_mask: 0, unbounded_left: vec![] },
            d,
            &scan_edges,
            &scan_unbounded,
            &mut memo,
        )
    }
}

/// All genus-zero floor diagrams of degree d (spanning trees on the ordered
/// floors with admissible weights).
pub fn enumerate(d: u32, reversed: bool) -> Vec<FloorDiagram> {
    let floors = d as usize;
    // All forests of d-1 edges (i, j), i < j, forming a spanning tree.
    let mut pairs = vec![];
    for a in 1..=d {
        for b in (a + 1)..=d {
            pairs.push((a, b));
        }
    }
    let mut out = vec![];
    let k = floors.saturating_sub(1);
    let mut choose = vec![0usize; k];
    fn rec(
        pairs: &[(u32, u32)],
        choose: &mut Vec<usize>,
        pos: usize,
        start: usize,
        d: u32,
        reversed: bool,
        out: &mut Vec<FloorDiagram>,
    ) {
        if pos == choose.len() {
            let edges: Vec<(u32, u32, u32)> =
                choose.iter().map(|&i| (pairs[i].0, pairs[i].1, 1)).collect();
            let mut diag = FloorDiagram { d, g: 0, edges };
            if !diag.connected() {
                return;
            }
            // Assign weights: bounded by the divergence condition
            // div(v) <= 1 (in the scanning orientation).
            fn weights(
                diag: &mut FloorDiagram,
                e: usize,
                d: u32,
                reversed: bool,
                out: &mut Vec<FloorDiagram>,
            ) {
                if e == diag.edges.len() {
                    let ok = (1..=d).all(|v| diag.divergence(v, reversed) <= 1);
                    if ok {
                        out.push(diag.clone());
                    }
                    return;
                }
                // Edge weights are bounded by d in any admissible diagram.
                for w in 1..=d {
                    diag.edges[e].2 = w;
                    // prune: divergence of the source already too large
                    weights(diag, e + 1, d, reversed, out);
                }
                diag.edges[e].2 = 1;
            }
            weights(&mut diag, 0, d, reversed, out);
            return;
        }
        for i in start..pairs.len() {
            choose[pos] = i;
            rec(pairs, choose, pos + 1, i + 1, d, reversed, out);
        }
    }
    if k == 0 {
        out.push(FloorDiagram { d, g: 0, edges: vec![] });
    } else {
        rec(&pairs, &mut choose, 0, 0, d, reversed, &mut out);
    }
    out
}

/// The multiplicity-weighted count of genus-zero degree-d floor diagrams
/// through 3d - 1 stretched points.
pub fn floor_count(d: u32, g: u32) -> Result<Int, Error> {
    floor_count_oriented(d, g, false)
}

pub fn floor_count_oriented(d: u32, g: u32, reversed: bool) -> Result<Int, Error> {
    if g != 0 {
        return Err(Error::Unsupported(format!("only genus zero floor diagrams are supported, got g={g}")));
    }
    if d < 1 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    let mut total = Int::zero();
    for diag in enumerate(d, reversed) {
        total += diag.multiplicity() * diag.markings(reversed);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degrees() {
        assert_eq!(floor_count(1, 0).unwrap(), Int::from(1));
        assert_eq!(floor_count(2, 0).unwrap(), Int::from(1));
        assert_eq!(floor_count(3, 0).unwrap(), Int::from(12));
    }

    #[test]
    fn degree_three_diagram_breakdown() {
        // The three admissible shapes contribute 5 + 4 + 3.
        let diags = enumerate(3, false);
        let contributions: Vec<(Vec<(u32, u32, u32)>, Int)> = diags
            .iter()
            .map(|d| (d.edges.clone(), d.multiplicity() * d.markings(false)))
            .collect();
        let total: Int = contributions.iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, Int::from(12));
        let mut values: Vec<Int> = contributions.into_iter().map(|(_, c)| c).collect();
        values.sort();
        assert_eq!(values, vec![Int::from(3), Int::from(4), Int::from(5)]);
    }

    #[test]
    fn duality_under_reversal() {
        for d in 1..=4u32 {
            assert_eq!(
                floor_count_oriented(d, 0, false).unwrap(),
                floor_count_oriented(d, 0, true).unwrap(),
                "reversal duality at d={d}"
            );
        }
    }

    #[test]
    fn positive_genus_unsupported() {
        assert!(matches!(floor_count(3, 1), Err(Error::Unsupported(_))));
    }
}
