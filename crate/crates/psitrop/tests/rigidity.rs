//! Exhaustive check of the rigidity lemma on a generated graph library:
//! on Mumford graphs (vertex genus identically zero), the only automorphism
//! fixing all oriented cycles of a rigidification is the identity. Graphs
//! whose genus sits in vertex decorations carry extra isotropy, which is why
//! the rigidified atlas covers only the Mumford locus; the boundary case is
//! pinned by its own test below.

use psitrop::graph::{Edge, StableGraph};
use std::collections::BTreeMap;

/// Generate small stable graphs: up to three vertices, up to four bounded
/// edges (loops and parallels included), and the minimum number of marked
/// legs needed for stability, capped at six edges in total.
fn small_stable_graphs(mumford_only: bool) -> Vec<StableGraph> {
    let mut out = vec![];
    for nv in 1..=3usize {
        let mut pairs = vec![];
        for i in 0..nv {
            for j in i..nv {
                pairs.push((i, j));
            }
        }
        let max_bounded = 4usize;
        let mut counts = vec![0usize; pairs.len()];
        enumerate_counts(&mut counts, 0, max_bounded, &mut |counts| {
            let genus_masks = if mumford_only { 0..1u32 } else { 0..(1u32 << nv) };
            for genus_mask in genus_masks {
                let genus: Vec<u32> =
                    (0..nv).map(|v| (genus_mask >> v & 1) as u32).collect();
                let mut edges = vec![];
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    for _ in 0..counts[k] {
                        edges.push(Edge { ends: vec![i, j], bounded: true, leg: false });
                    }
                }
                let mut marks = BTreeMap::new();
                let mut g = StableGraph { genus_of_vertex: genus, edges, marks: BTreeMap::new() };
                let mut label = 1;
                for v in 0..nv {
                    while (g.valence(v) as u32 + 2 * g.genus_of_vertex[v]) < 3 {
                        g.edges.push(Edge { ends: vec![v], bounded: false, leg: true });
                        marks.insert(label.to_string(), g.edges.len() - 1);
                        label += 1;
                    }
                }
                g.marks = marks;
                if g.edges.len() > 6 {
                    continue;
                }
                if let Ok(rep) = g.validate() {
                    if rep.is_valid() {
                        out.push(g);
                    }
                }
            }
        });
    }
    out
}

fn enumerate_counts(
    counts: &mut Vec<usize>,
    idx: usize,
    budget: usize,
    emit: &mut dyn FnMut(&Vec<usize>),
) {
    if idx == counts.len() {
        emit(counts);
        return;
    }
    for c in 0..=budget {
        counts[idx] = c;
        enumerate_counts(counts, idx + 1, budget - c, emit);
    }
    counts[idx] = 0;
}

#[test]
fn rigidified_mumford_graphs_have_no_automorphisms() {
    let graphs = small_stable_graphs(true);
    assert!(graphs.len() > 30, "expected a substantial library, got {}", graphs.len());
    let mut rigidifications_checked = 0usize;
    for g in &graphs {
        let ne = g.edges.len();
        let auts = g.automorphisms();
        for rig in g.cycle_rigidifications() {
            rigidifications_checked += 1;
            let fixing: Vec<_> = auts
                .iter()
                .filter(|a| {
                    rig.cycles.iter().all(|c| match c {
                        None => true,
                        Some(ch) => a.push_class(&ch.class(ne)) == ch.class(ne),
                    })
                })
                .collect();
            assert_eq!(fixing.len(), 1, "non-identity automorphism fixes a rigidification");
            assert!(fixing[0].is_identity());
        }
    }
    assert!(rigidifications_checked > 200, "checked {rigidifications_checked}");
}

/// Genus hidden in vertex decorations leaves isotropy that no cycle
/// rigidification can remove: the two-vertex graph with genus one at both
/// ends has trivial first homology but a vertex swap of order two.
#[test]
fn decorated_genus_keeps_isotropy() {
    let g = StableGraph {
        genus_of_vertex: vec![1, 1],
        edges: vec![Edge { ends: vec![0, 1], bounded: true, leg: false }],
        marks: BTreeMap::new(),
    };
    assert!(g.validate().unwrap().is_valid());
    assert_eq!(g.genus(), 2);
    assert_eq!(g.betti(), 0);
    assert_eq!(g.automorphisms().len(), 2);
    let rigs = g.cycle_rigidifications();
    assert_eq!(rigs.len(), 1);
    assert!(rigs[0].cycles.iter().all(|c| c.is_none()));
}

#[test]
fn contract_and_stretch_preserve_validity_and_genus() {
    for g in small_stable_graphs(false) {
        let genus = g.genus();
        for e in g.bounded_edges().collect::<Vec<_>>() {
            let c = g.contract_edge(e).unwrap();
            assert!(c.validate().unwrap().is_valid());
            assert_eq!(c.genus(), genus);
            let s = g.stretch_edge(e).unwrap();
            assert!(s.validate().unwrap().is_valid());
            assert_eq!(s.genus(), genus);
        }
    }
}
