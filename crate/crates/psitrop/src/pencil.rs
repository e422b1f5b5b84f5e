//! Parameterized plane tropical stable maps: evaluation matrices, the
//! gcd-of-minors edge multiplicities of the pencil-of-cubics cycle, and the
//! assembled degree report for the eight-point genus-one count.

use crate::error::Error;
use crate::floors::floor_count;
use crate::lattice::{lattice_index, IntMat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub type Int = BigInt;
pub type Rat = BigRational;

/// A parameterized stable map type: a rooted tree containing all marks,
/// with an integer displacement per edge (primitive direction times weight)
/// and one length variable per edge. Mark positions are affine in
/// (x, y, l_1, ..., l_E).
#[derive(Clone, Debug)]
pub struct ParamStableMapType {
    /// Displacement per edge, indexed by length variable order.
    pub displacements: Vec<(i64, i64)>,
    /// Per mark: the root-to-mark path as (edge index, direction sign).
    pub marks: Vec<Vec<(usize, i8)>>,
}

#[derive(Deserialize)]
struct FixtureJson {
    v: u32,
    root: Vec<String>,
    edges: Vec<FixtureEdge>,
    marks: Vec<FixtureMark>,
}

#[derive(Deserialize)]
struct FixtureEdge {
    id: u64,
    disp: [i64; 2],
    len: usize,
}

#[derive(Deserialize)]
struct FixtureMark {
    id: u64,
    path: Vec<u64>,
}

impl ParamStableMapType {
    pub fn from_json(text: &str) -> Result<ParamStableMapType, Error> {
        let fx: FixtureJson =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad fixture: {e}")))?;
        if fx.v != 1 {
            return Err(Error::Config(format!("unsupported fixture version {}", fx.v)));
        }
        if fx.root != ["x", "y"] {
            return Err(Error::Config("fixture root must be [\"x\", \"y\"]".into()));
        }
        let ne = fx.edges.len();
        let mut by_len: Vec<Option<(u64, (i64, i64))>> = vec![None; ne];
        for e in &fx.edges {
            if e.len == 0 || e.len > ne || by_len[e.len - 1].is_some() {
                return Err(Error::Config(format!("edge {} has invalid length index {}", e.id, e.len)));
            }
            by_len[e.len - 1] = Some((e.id, (e.disp[0], e.disp[1])));
        }
        let id_to_index: BTreeMap<u64, usize> = by_len
            .iter()
            .enumerate()
            .map(|(i, o)| (o.unwrap().0, i))
            .collect();
        let displacements = by_len.iter().map(|o| o.unwrap().1).collect();
        let mut marks_sorted = fx.marks;
        marks_sorted.sort_by_key(|m| m.id);
        let mut marks = vec![];
        for m in &marks_sorted {
            let mut path = vec![];
            for eid in &m.path {
                let idx = id_to_index
                    .get(eid)
                    .ok_or_else(|| Error::Domain(format!("mark {} references unknown edge {eid}", m.id)))?;
                path.push((*idx, 1i8));
            }
            marks.push(path);
        }
        Ok(ParamStableMapType { displacements, marks })
    }

    pub fn lengths(&self) -> usize {
        self.displacements.len()
    }

    /// Re-root the tree at the position of the given mark: every path is
    /// replaced by the symmetric difference with that mark's path, traversed
    /// edges flipping sign. A unimodular change of coordinates, so all
    /// multiplicities are unchanged.
    pub fn rerooted(&self, at_mark: usize) -> ParamStableMapType {
        let base = &self.marks[at_mark];
        let marks = self
            .marks
            .iter()
            .map(|path| {
                // net signed count per edge
                let mut net: BTreeMap<usize, i32> = BTreeMap::new();
                for &(e, s) in base {
                    *net.entry(e).or_insert(0) -= s as i32;
                }
                for &(e, s) in path {
                    *net.entry(e).or_insert(0) += s as i32;
                }
                net.into_iter()
                    .filter(|(_, c)| *c != 0)
                    .map(|(e, c)| (e, if c > 0 { 1i8 } else { -1 }))
                    .collect()
            })
            .collect();
        ParamStableMapType { displacements: self.displacements.clone(), marks }
    }
}

/// The matrix of the combined evaluation map: one row pair per mark, one
/// column per root coordinate and per length variable.
pub fn evaluation_matrix(t: &ParamStableMapType) -> Result<IntMat, Error> {
    let ne = t.lengths();
    let rows = 2 * t.marks.len();
    let cols = 2 + ne;
    let mut m = IntMat::zero(rows, cols);
    for (i, path) in t.marks.iter().enumerate() {
        m[(2 * i, 0)] = Int::one();
        m[(2 * i + 1, 1)] = Int::one();
        for &(e, s) in path {
            if e >= ne {
                return Err(Error::Domain(format!("mark {} references unknown edge {e}", i + 1)));
            }
            let (dx, dy) = t.displacements[e];
            m[(2 * i, 2 + e)] += Int::from(dx as i64 * s as i64);
            m[(2 * i + 1, 2 + e)] += Int::from(dy as i64 * s as i64);
        }
    }
    Ok(m)
}

/// Multiplicity of a one-parameter family: the gcd of the maximal minors of
/// its evaluation matrix, computed through the Smith normal form.
pub fn edge_multiplicity(t: &ParamStableMapType) -> Result<Int, Error> {
    let m = evaluation_matrix(t)?;
    if m.cols != m.rows + 1 {
        return Err(Error::Shape(format!(
            "one-parameter family needs one more column than rows, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(lattice_index(&m))
}

/// The degree report of the pencil-of-cubics cycle: covering degree onto the
/// one-marked genus-one moduli ray, per-mark psi degrees assembled from the
/// fixture multiplicities, and the final ratio.
#[derive(Clone, Debug)]
pub struct PencilReport {
    pub floor_count: Int,
    pub labeling_factor: Int,
    pub covering_degree: Int,
    /// Per mark: (point count, per-point multiplicity, total degree).
    pub psi_degrees: BTreeMap<u32, (Int, Int, Int)>,
    pub ratio: Rat,
}

/// Names of the fixtures consumed by [`pencil_degrees`].
pub const MANDATORY_FIXTURE: &str = "fig_matrixmult.json";
pub const DILATION2_FIXTURE: &str = "dilation2_loop.json";

pub fn load_fixture(path: &Path) -> Result<ParamStableMapType, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ParamStableMapType::from_json(&text)
}

/// Assemble the pencil degrees from the fixture corpus: marks away from the
/// doubled edge contribute 432 points of multiplicity one, marks on it 216
/// points of multiplicity two.
pub fn pencil_degrees(corpus: &Path) -> Result<PencilReport, Error> {
    let mut missing: Vec<PathBuf> = vec![];
    let fig = corpus.join(MANDATORY_FIXTURE);
    let dil = corpus.join(DILATION2_FIXTURE);
    for p in [&fig, &dil] {
        if !p.exists() {
            missing.push(p.clone());
        }
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "missing fixtures: {}",
            missing.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    let fig_type = load_fixture(&fig)?;
    let dil_type = load_fixture(&dil)?;
    let mult_plain = edge_multiplicity(&fig_type)?;
    let mult_double = edge_multiplicity(&dil_type)?;

    let floors = floor_count(3, 0)?;
    // Orienting the cycle and marking the unbounded edges: 2 * (3!)^3.
    let six = Int::from(6);
    let labeling_factor = Int::from(2) * &six * &six * &six;
    let covering_degree = &floors * &labeling_factor;

    let mut psi_degrees = BTreeMap::new();
    for mark in 1..=8u32 {
        let (points, mult) = if matches!(mark, 1 | 2 | 5) {
            (Int::from(216), mult_double.clone())
        } else {
            (Int::from(432), mult_plain.clone())
        };
        let total = &points * &mult;
        psi_degrees.insert(mark, (points, mult, total));
    }
    // All psi degrees agree; the ratio against twice the covering degree is
    // the genus-one psi evaluation.
    let psi_total = psi_degrees[&1].2.clone();
    for (m, (_, _, t)) in &psi_degrees {
        if *t != psi_total {
            return Err(Error::Inconsistent(format!("psi degree at mark {m} differs")));
        }
    }
    let ratio = Rat::new(psi_total, Int::from(2) * &covering_degree);
    Ok(PencilReport { floor_count: floors, labeling_factor, covering_degree, psi_degrees, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    /// Brute-force determinant for the minor oracle.
    fn det(m: &Vec<Vec<i64>>) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut total = 0i64;
        for j in 0..n {
            if m[0][j] == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            total += sign * m[0][j] * det(&minor);
        }
        total
    }

    fn gcd_of_maximal_minors(m: &IntMat) -> Int {
        use num_integer::Integer;
        let rows = m.rows;
        let cols = m.cols;
        assert_eq!(cols, rows + 1);
        let as_i64: Vec<Vec<i64>> =
            (0..rows).map(|i| (0..cols).map(|j| i64::try_from(&m[(i, j)]).unwrap()).collect()).collect();
        let mut g = Int::zero();
        for omit in 0..cols {
            let sub: Vec<Vec<i64>> = as_i64
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != omit).map(|(_, &v)| v).collect())
                .collect();
            g = g.gcd(&Int::from(det(&sub)));
        }
        g
    }

    fn fixtures_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
    }

    #[test]
    fn single_mark_at_root() {
        let t = ParamStableMapType { displacements: vec![(1, 1)], marks: vec![vec![]] };
        let m = evaluation_matrix(&t).unwrap();
        assert_eq!(m.rows, 2);
        assert_eq!(m.cols, 3);
        assert_eq!(m[(0, 0)], Int::one());
        assert_eq!(m[(1, 1)], Int::one());
        assert!(m[(0, 2)].is_zero() && m[(1, 2)].is_zero());
    }

    #[test]
    fn one_edge_chain_rule() {
        let t = ParamStableMapType { displacements: vec![(1, 1)], marks: vec![vec![(0, 1)]] };
        let m = evaluation_matrix(&t).unwrap();
        assert_eq!(m[(0, 2)], Int::one());
        assert_eq!(m[(1, 2)], Int::one());
    }

    #[test]
    fn figure_fixture_matches_displayed_matrix() {
        let t = load_fixture(&fixtures_dir().join(MANDATORY_FIXTURE)).unwrap();
        let m = evaluation_matrix(&t).unwrap();
        assert_eq!((m.rows, m.cols), (16, 17));
        let expected: Vec<Vec<i64>> = vec![
            vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 2, 0, 1, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, -1, -1, -1, 0, -1, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 2, 0, 1, 1, 1, 1, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, -1, -1, -1, 0, -1, 0, 0, -1, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 2, 0, 1, 1, 1, 1, 1, 1, 0, 0],
            vec![0, 1, 0, -1, 0, -1, -1, -1, 0, -1, 0, 0, -1, -1, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 1, 2, 2, 0, 1, 1, 1, 1, 1, 1, 1, 0],
            vec![0, 1, 0, -1, 0, -1, -1, -1, 0, -1, 0, 0, -1, -1, 0, 0, -1],
        ];
        assert_eq!(m, IntMat::from_i64_rows(&expected));
        assert_eq!(edge_multiplicity(&t).unwrap(), Int::one());
        // Independent oracle: gcd of all 16x16 minors by Laplace expansion.
        assert_eq!(gcd_of_maximal_minors(&m), Int::one());
    }

    #[test]
    fn dilation_two_fixture_has_multiplicity_two() {
        let t = load_fixture(&fixtures_dir().join(DILATION2_FIXTURE)).unwrap();
        assert_eq!(edge_multiplicity(&t).unwrap(), Int::from(2));
        let m = evaluation_matrix(&t).unwrap();
        assert_eq!(gcd_of_maximal_minors(&m), Int::from(2));
    }

    #[test]
    fn toy_line_family_multiplicity() {
        let t = load_fixture(&fixtures_dir().join("line_toy.json")).unwrap();
        let m = evaluation_matrix(&t).unwrap();
        assert_eq!((m.rows, m.cols), (4, 5));
        assert_eq!(gcd_of_maximal_minors(&m), Int::from(2));
        assert_eq!(edge_multiplicity(&t).unwrap(), Int::from(2));
    }

    #[test]
    fn root_choice_invariance() {
        for name in [MANDATORY_FIXTURE, DILATION2_FIXTURE, "line_toy.json"] {
            let t = load_fixture(&fixtures_dir().join(name)).unwrap();
            let base = edge_multiplicity(&t).unwrap();
            for mark in 0..t.marks.len() {
                let r = t.rerooted(mark);
                assert_eq!(edge_multiplicity(&r).unwrap(), base, "{name} rerooted at {mark}");
            }
        }
    }

    #[test]
    fn column_scaling_scales_contributing_minors() {
        let t = load_fixture(&fixtures_dir().join("line_toy.json")).unwrap();
        let m = evaluation_matrix(&t).unwrap();
        for scaled_edge in 0..t.lengths() {
            let mut t2 = t.clone();
            t2.displacements[scaled_edge].0 *= 3;
            t2.displacements[scaled_edge].1 *= 3;
            let m2 = evaluation_matrix(&t2).unwrap();
            for omit in 0..m.cols {
                let minor = |mat: &IntMat| {
                    let rows: Vec<Vec<i64>> = (0..mat.rows)
                        .map(|i| {
                            (0..mat.cols)
                                .filter(|&j| j != omit)
                                .map(|j| i64::try_from(&mat[(i, j)]).unwrap())
                                .collect()
                        })
                        .collect();
                    det(&rows)
                };
                let before = minor(&m);
                let after = minor(&m2);
                if omit == 2 + scaled_edge {
                    assert_eq!(after, before, "omitting the scaled column leaves the minor");
                } else {
                    assert_eq!(after, 3 * before, "contributing minors scale");
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t = ParamStableMapType {
            displacements: vec![(1, 0)],
            marks: vec![vec![(0, 1)], vec![]],
        };
        assert!(matches!(edge_multiplicity(&t), Err(Error::Shape(_))));
    }

    #[test]
    fn pencil_report() {
        let report = pencil_degrees(&fixtures_dir()).unwrap();
        assert_eq!(report.floor_count, Int::from(12));
        assert_eq!(report.labeling_factor, Int::from(432));
        assert_eq!(report.covering_degree, Int::from(5184));
        for mark in 1..=8u32 {
            let (points, mult, total) = &report.psi_degrees[&mark];
            assert_eq!(*total, Int::from(432));
            if matches!(mark, 1 | 2 | 5) {
                assert_eq!(*points, Int::from(216));
                assert_eq!(*mult, Int::from(2));
            } else {
                assert_eq!(*points, Int::from(432));
                assert_eq!(*mult, Int::from(1));
            }
        }
        assert_eq!(report.ratio, Rat::new(Int::one(), Int::from(24)));
    }

    #[test]
    fn missing_corpus_lists_files() {
        let err = pencil_degrees(Path::new("/nonexistent")).unwrap_err();
        match err {
            Error::Config(msg) => {
                assert!(msg.contains(MANDATORY_FIXTURE));
                assert!(msg.contains(DILATION2_FIXTURE));
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }
}
