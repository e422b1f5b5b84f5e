//! JSON schemas for the file formats consumed by the command line: graphs,
//! metric points, cross-ratio data, fans, functions, maps and cocycles.
//! All integers and rationals are decimal strings; no floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use psitrop::crossratio::{CrossRatioDatum, Specialization};
use psitrop::cycles::{ChartCocycle, ConeComplex, WeightedFan};
use psitrop::error::Error;
use psitrop::graph::{Edge, StableGraph};
use psitrop::lattice::IntMat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn parse_int(s: &str) -> Result<BigInt, Error> {
    use std::str::FromStr;
    BigInt::from_str(s).map_err(|e| Error::Config(format!("bad integer {s:?}: {e}")))
}

pub fn parse_rat(s: &str) -> Result<BigRational, Error> {
    match s.split_once('/') {
        None => Ok(BigRational::from(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den == BigInt::from(0) {
                return Err(Error::Config(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
    }
}

pub fn rat_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    pub v: u32,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub marks: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
pub struct VertexJson {
    pub id: u64,
    pub genus: u32,
}

#[derive(Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: u64,
    /// Vertex ids, one per flag (one for legs, two otherwise).
    pub flags: Vec<u64>,
    pub bounded: bool,
    pub leg: bool,
}

pub struct LoadedGraph {
    pub graph: StableGraph,
    pub edge_ids: Vec<u64>,
}

pub fn graph_from_json(j: &GraphJson) -> Result<LoadedGraph, Error> {
    if j.v != 1 {
        return Err(Error::Config(format!("unsupported graph schema version {}", j.v)));
    }
    let mut vmap = BTreeMap::new();
    let mut genus = vec![];
    for v in &j.vertices {
        if vmap.insert(v.id, genus.len()).is_some() {
            return Err(Error::Structural(format!("duplicate vertex id {}", v.id)));
        }
        genus.push(v.genus);
    }
    let mut edges = vec![];
    let mut edge_ids = vec![];
    let mut emap = BTreeMap::new();
    for e in &j.edges {
        let ends = e
            .flags
            .iter()
            .map(|vid| {
                vmap.get(vid)
                    .copied()
                    .ok_or_else(|| Error::Structural(format!("edge {} references missing vertex {vid}", e.id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if emap.insert(e.id, edges.len()).is_some() {
            return Err(Error::Structural(format!("duplicate edge id {}", e.id)));
        }
        edge_ids.push(e.id);
        edges.push(Edge { ends, bounded: e.bounded, leg: e.leg });
    }
    let mut marks = BTreeMap::new();
    for (label, eid) in &j.marks {
        let idx = emap
            .get(eid)
            .copied()
            .ok_or_else(|| Error::Structural(format!("mark {label} targets missing edge {eid}")))?;
        marks.insert(label.clone(), idx);
    }
    let graph = StableGraph { genus_of_vertex: genus, edges, marks };
    graph.check_structure()?;
    Ok(LoadedGraph { graph, edge_ids })
}

pub fn graph_to_json(g: &StableGraph) -> GraphJson {
    GraphJson {
        v: 1,
        vertices: (0..g.vertex_count())
            .map(|i| VertexJson { id: i as u64, genus: g.genus_of_vertex[i] })
            .collect(),
        edges: g
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeJson {
                id: i as u64,
                flags: e.ends.iter().map(|&v| v as u64).collect(),
                bounded: e.bounded,
                leg: e.leg,
            })
            .collect(),
        marks: g.marks.iter().map(|(k, &e)| (k.clone(), e as u64)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Cross-ratio data and metric points
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
pub struct DatumJson {
    pub v: u32,
    pub graph: GraphJson,
    pub path_vertices: Vec<u64>,
    /// (edge id, departing slot)
    pub path_edges: Vec<(u64, usize)>,
    pub start_flag: (u64, usize),
    pub end_flag: (u64, usize),
    /// Per visit: list of [[edge id, slot], slope].
    pub slopes: Vec<Vec<((u64, usize), i64)>>,
}

pub fn datum_from_json(j: &DatumJson) -> Result<CrossRatioDatum, Error> {
    if j.v != 1 {
        return Err(Error::Config("unsupported datum schema version".into()));
    }
    let loaded = graph_from_json(&j.graph)?;
    let eidx = |id: u64| -> Result<usize, Error> {
        loaded
            .edge_ids
            .iter()
            .position(|&x| x == id)
            .ok_or_else(|| Error::Structural(format!("unknown edge id {id}")))
    };
    let vidx = |id: u64| -> Result<usize, Error> {
        let i = id as usize;
        if i < loaded.graph.vertex_count() {
            Ok(i)
        } else {
            Err(Error::Structural(format!("unknown vertex id {id}")))
        }
    };
    let datum = CrossRatioDatum {
        path_vertices: j.path_vertices.iter().map(|&v| vidx(v)).collect::<Result<_, _>>()?,
        path_edges: j
            .path_edges
            .iter()
            .map(|&(e, s)| Ok::<_, Error>((eidx(e)?, s)))
            .collect::<Result<_, _>>()?,
        start_flag: (eidx(j.start_flag.0)?, j.start_flag.1),
        end_flag: (eidx(j.end_flag.0)?, j.end_flag.1),
        slopes: j
            .slopes
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&((e, s), w)| Ok::<_, Error>(((eidx(e)?, s), w)))
                    .collect::<Result<BTreeMap<_, _>, _>>()
            })
            .collect::<Result<_, _>>()?,
        graph: loaded.graph,
    };
    datum.validate()?;
    Ok(datum)
}

#[derive(Deserialize)]
pub struct PointJson {
    pub v: u32,
    pub graph: GraphJson,
    /// Length per bounded edge id, as "p/q" strings.
    pub lengths: BTreeMap<String, String>,
    /// For cross-ratio evaluation: per edge id of this graph, the base edge
    /// id it maps to, or null when contracted. Identity when omitted.
    #[serde(default)]
    pub edge_map: Option<BTreeMap<String, Option<u64>>>,
    /// Vertex map onto the base graph (dense base indices).
    #[serde(default)]
    pub vertex_map: Option<Vec<usize>>,
}

pub struct LoadedPoint {
    pub graph: StableGraph,
    pub lengths: BTreeMap<usize, BigRational>,
    pub edge_ids: Vec<u64>,
    pub raw_edge_map: Option<BTreeMap<String, Option<u64>>>,
    pub raw_vertex_map: Option<Vec<usize>>,
}

pub fn point_from_json(j: &PointJson) -> Result<LoadedPoint, Error> {
    if j.v != 1 {
        return Err(Error::Config("unsupported point schema version".into()));
    }
    let loaded = graph_from_json(&j.graph)?;
    let mut lengths = BTreeMap::new();
    for (eid, val) in &j.lengths {
        let id: u64 =
            eid.parse().map_err(|_| Error::Config(format!("bad edge id {eid:?}")))?;
        let idx = loaded
            .edge_ids
            .iter()
            .position(|&x| x == id)
            .ok_or_else(|| Error::Structural(format!("length for unknown edge {eid}")))?;
        lengths.insert(idx, parse_rat(val)?);
    }
    Ok(LoadedPoint {
        graph: loaded.graph,
        lengths,
        edge_ids: loaded.edge_ids,
        raw_edge_map: j.edge_map.clone(),
        raw_vertex_map: j.vertex_map.clone(),
    })
}

/// Build the specialization onto the datum's base graph.
pub fn specialization_from_point(
    point: &LoadedPoint,
    base_edge_ids: &[u64],
) -> Result<Specialization, Error> {
    match (&point.raw_edge_map, &point.raw_vertex_map) {
        (Some(emap), Some(vmap)) => {
            let mut edge_map = vec![None; point.graph.edges.len()];
            for (eid, target) in emap {
                let id: u64 =
                    eid.parse().map_err(|_| Error::Config(format!("bad edge id {eid:?}")))?;
                let idx = point
                    .edge_ids
                    .iter()
                    .position(|&x| x == id)
                    .ok_or_else(|| Error::Structural(format!("map for unknown edge {eid}")))?;
                edge_map[idx] = match target {
                    None => None,
                    Some(t) => Some(
                        base_edge_ids
                            .iter()
                            .position(|x| x == t)
                            .ok_or_else(|| Error::Structural(format!("unknown base edge {t}")))?,
                    ),
                };
            }
            Ok(Specialization { edge_map, vertex_map: vmap.clone() })
        }
        (None, None) => Ok(Specialization::identity(&point.graph)),
        _ => Err(Error::Config("edge_map and vertex_map must be given together".into())),
    }
}

// ---------------------------------------------------------------------------
// Fans, functions, maps, cocycles, matrices
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct FanJson {
    pub v: u32,
    pub ambient_rank: usize,
    /// Ray generators, entries as decimal strings.
    pub rays: Vec<Vec<String>>,
    /// Maximal cones as ray index lists; faces are closed automatically.
    pub cones: Vec<Vec<usize>>,
    pub dim: usize,
    /// Weighted cones identified by their ray sets.
    pub weights: Vec<WeightEntry>,
}

#[derive(Serialize, Deserialize)]
pub struct WeightEntry {
    pub rays: Vec<usize>,
    pub weight: String,
}

pub fn fan_from_json(j: &FanJson) -> Result<(Arc<ConeComplex>, WeightedFan), Error> {
    if j.v != 1 {
        return Err(Error::Config("unsupported fan schema version".into()));
    }
    let rays = j
        .rays
        .iter()
        .map(|r| r.iter().map(|s| parse_int(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let complex = Arc::new(ConeComplex::with_all_faces(
        j.ambient_rank,
        rays,
        j.cones.clone(),
    )?);
    let mut weights = BTreeMap::new();
    for w in &j.weights {
        let cone = complex
            .find_cone(&w.rays)
            .ok_or_else(|| Error::Config(format!("weighted cone {:?} not in the fan", w.rays)))?;
        weights.insert(cone, parse_int(&w.weight)?);
    }
    let fan = WeightedFan::new(Arc::clone(&complex), j.dim, weights)?;
    Ok((complex, fan))
}

pub fn fan_to_json(fan: &WeightedFan) -> FanJson {
    let cx = &fan.complex;
    FanJson {
        v: 1,
        ambient_rank: cx.ambient_rank,
        rays: cx.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        cones: cx
            .cones
            .iter()
            .filter(|c| !c.rays.is_empty())
            .map(|c| c.rays.clone())
            .collect(),
        dim: fan.dim,
        weights: fan
            .weights
            .iter()
            .map(|(&c, w)| WeightEntry { rays: cx.cones[c].rays.clone(), weight: w.to_string() })
            .collect(),
    }
}

#[derive(Deserialize)]
pub struct FunctionJson {
    pub v: u32,
    pub values_on_rays: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub v: u32,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries as decimal strings.
    pub entries: Vec<String>,
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<IntMat, Error> {
    if j.v != 1 {
        return Err(Error::Config("unsupported matrix schema version".into()));
    }
    if j.entries.len() != j.rows * j.cols {
        return Err(Error::Shape(format!(
            "matrix needs {} entries, got {}",
            j.rows * j.cols,
            j.entries.len()
        )));
    }
    Ok(IntMat {
        rows: j.rows,
        cols: j.cols,
        data: j.entries.iter().map(|s| parse_int(s)).collect::<Result<_, _>>()?,
    })
}

#[derive(Deserialize)]
pub struct MapJson {
    pub v: u32,
    pub matrix: MatrixJson,
    pub target: FanJson,
}

#[derive(Deserialize)]
pub struct CocycleJson {
    pub v: u32,
    pub charts: usize,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Deserialize)]
pub struct TransitionJson {
    pub to: usize,
    pub from: usize,
    pub slope: String,
    #[serde(default)]
    pub offset: Option<String>,
}

pub fn cocycle_from_json(j: &CocycleJson) -> Result<ChartCocycle, Error> {
    if j.v != 1 {
        return Err(Error::Config("unsupported cocycle schema version".into()));
    }
    let mut transitions = BTreeMap::new();
    for t in &j.transitions {
        let slope = parse_int(&t.slope)?;
        let offset = match &t.offset {
            None => BigRational::from(BigInt::from(0)),
            Some(o) => parse_rat(o)?,
        };
        transitions.insert((t.to, t.from), (slope.clone(), offset.clone()));
        // Fill the inverse transition when absent.
        transitions.entry((t.from, t.to)).or_insert((-slope, -offset));
    }
    Ok(ChartCocycle { charts: j.charts, transitions })
}
