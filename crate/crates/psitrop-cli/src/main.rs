//! Command line interface: every library operation behind a subcommand with
//! JSON output, plus the `verify-all` acceptance runner.

mod registry;
mod schema;

use clap::{Parser, Subcommand, ValueEnum};
use psitrop::acceptance::{run_all, Config, Level};
use psitrop::covers;
use psitrop::crossratio::{decompose_primitive, evaluate, pullback_to_distance};
use psitrop::cycles::{
    check_balancing, degree, divisor_intersect, push_forward, LatticeMap, PLFunctionOnFan,
};
use psitrop::elliptic::{isom_balancing, psi_pullback_degree, EllipticFamilySpec};
use psitrop::error::Error;
use psitrop::floors::floor_count;
use psitrop::lattice::lattice_index;
use psitrop::moduli::{
    atlas_cone, distance_coordinates, forgetful_map, pair_index, MetricGraphPoint, ModuliFan,
};
use psitrop::pencil;
use psitrop::psi::{
    dilaton_pushforward, leg_at_four_valent, psi_product_degree, psi_representative,
    pullback_check,
};
use schema::rat_string;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "psitrop", version, about = "Exact tropical geometry on moduli of curves")]
struct Cli {
    /// Emit machine-readable JSON (always on; kept for interface stability).
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized property sampling.
    #[arg(long, global = true, default_value_t = 17)]
    seed: u64,
    /// Verification level.
    #[arg(long, global = true, value_enum, default_value_t = LevelArg::Desk)]
    level: LevelArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Smoke,
    Desk,
}

#[derive(Subcommand)]
enum Command {
    /// Stable graph utilities.
    Graph {
        #[command(subcommand)]
        sub: GraphCmd,
    },
    /// Moduli fans of rational curves.
    Moduli {
        #[command(subcommand)]
        sub: ModuliCmd,
    },
    /// Cross-ratio functions on moduli cones.
    Crossratio {
        #[command(subcommand)]
        sub: CrossratioCmd,
    },
    /// Tropical cycles: balancing, intersections, push-forwards.
    Cycles {
        #[command(subcommand)]
        sub: CyclesCmd,
    },
    /// Psi classes in genus zero.
    Psi {
        #[command(subcommand)]
        sub: PsiCmd,
    },
    /// Admissible cover degrees.
    Covers {
        #[command(subcommand)]
        sub: CoversCmd,
    },
    /// Elliptic families over the tropical projective line.
    Elliptic {
        #[command(subcommand)]
        sub: EllipticCmd,
    },
    /// The pencil-of-cubics cycle.
    Pencil {
        #[command(subcommand)]
        sub: PencilCmd,
    },
    /// Floor diagram counts.
    Floors {
        #[command(subcommand)]
        sub: FloorsCmd,
    },
    /// Run the acceptance suite.
    VerifyAll,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Stability and connectivity report.
    Validate { #[arg(long)] graph: PathBuf },
    /// Total genus.
    Genus { #[arg(long)] graph: PathBuf },
    /// Contract a bounded edge.
    Contract { #[arg(long)] graph: PathBuf, #[arg(long)] edge: u64 },
    /// Stretch a bounded edge to infinite length.
    Stretch { #[arg(long)] graph: PathBuf, #[arg(long)] edge: u64 },
    /// List automorphisms.
    Autos { #[arg(long)] graph: PathBuf },
    /// Enumerate cycle rigidifications.
    Rigidify { #[arg(long)] graph: PathBuf },
}

#[derive(Subcommand)]
enum ModuliCmd {
    /// Fan shape: rays, top cones, dimension.
    Info { #[arg(long)] n: u32 },
    /// Distance coordinates of a metric tree.
    Point {
        #[arg(long = "type")] type_file: PathBuf,
        #[arg(long, value_delimiter = ',')] lengths: Vec<String>,
    },
    /// The forgetful projection matrix for marks n+1 -> n.
    Forget { #[arg(long)] n: u32 },
    /// Atlas cones of the cycle rigidifications of a graph.
    Atlas { #[arg(long)] graph: PathBuf },
}

#[derive(Subcommand)]
enum CrossratioCmd {
    /// Evaluate a datum at a metric point of a specialization.
    Eval { #[arg(long)] datum: PathBuf, #[arg(long)] point: PathBuf },
    /// Decompose into primitive data.
    Decompose { #[arg(long)] datum: PathBuf },
    /// The matching distance functional on the star tree.
    Distfun { #[arg(long)] datum: PathBuf },
}

#[derive(Subcommand)]
enum CyclesCmd {
    /// Balancing report.
    Balance { #[arg(long)] fan: PathBuf },
    /// Corner-locus intersection with a piecewise linear function.
    Intersect { #[arg(long = "fn")] function: PathBuf, #[arg(long)] fan: PathBuf },
    /// Push forward along an integer-linear map.
    Push { #[arg(long)] map: PathBuf, #[arg(long)] fan: PathBuf },
    /// Degree of a zero-dimensional cycle.
    Degree { #[arg(long)] fan: PathBuf },
    /// Lattice index: gcd of maximal minors.
    Index { #[arg(long)] matrix: PathBuf },
    /// First Chern class degree of a chart cocycle.
    Chern { #[arg(long)] cocycle: PathBuf },
}

#[derive(Subcommand)]
enum PsiCmd {
    /// Degree of a psi monomial.
    Degree {
        #[arg(long)] n: u32,
        #[arg(long, value_delimiter = ',')] exp: Vec<u32>,
    },
    /// Dilaton push-forward comparison.
    Dilaton { #[arg(long)] n: u32 },
    /// The weight-one psi representative.
    Represent { #[arg(long)] n: u32, #[arg(long)] i: u32 },
    /// Pull-back comparison along the forgetful map.
    Pullcheck { #[arg(long)] n: u32, #[arg(long)] i: u32 },
}

#[derive(Subcommand)]
enum CoversCmd {
    /// The class table of the degree-d cover space.
    Table { #[arg(long)] d: u32 },
    /// Source, branch and psi degrees with the 1/12 ratio.
    Degrees { #[arg(long)] d: u32 },
    /// Local Riemann-Hurwitz check on a class representative.
    Rh {
        #[arg(long)] d: u32,
        #[arg(long)] class: String,
        #[arg(long, default_value_t = 1)] a: u32,
    },
}

#[derive(Subcommand)]
enum EllipticCmd {
    /// Degree of the pulled-back psi class of the family C^a.
    Psi {
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
    },
    /// Balancing of the Isom fiber-product fan.
    Isom {
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, allow_negative_numbers = true)]
        b: i64,
    },
}

#[derive(Subcommand)]
enum PencilCmd {
    /// Evaluation-matrix multiplicity of a fixture.
    Mult { #[arg(long)] fixture: PathBuf },
    /// The evaluation matrix of a fixture.
    Matrix { #[arg(long)] fixture: PathBuf },
    /// The assembled degree report over a fixture corpus.
    Degrees { #[arg(long)] corpus: Option<PathBuf> },
}

#[derive(Subcommand)]
enum FloorsCmd {
    /// Multiplicity-weighted floor diagram count.
    Count { #[arg(long)] d: u32, #[arg(long, default_value_t = 0)] g: u32 },
}

#[derive(Serialize)]
struct Report {
    command: String,
    inputs: String,
    results: Value,
    checks: Vec<CheckJson>,
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    expected: String,
    actual: String,
    pass: bool,
}

struct Ctx {
    digest: Sha256,
    command: String,
}

impl Ctx {
    fn new(command: String) -> Ctx {
        let mut digest = Sha256::new();
        digest.update(command.as_bytes());
        Ctx { digest, command }
    }

    fn read(&mut self, path: &PathBuf) -> Result<String, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.digest.update(text.as_bytes());
        Ok(text)
    }

    fn finish(self, results: Value, checks: Vec<CheckJson>) -> (Report, bool) {
        let ok = checks.iter().all(|c| c.pass);
        let report = Report {
            command: self.command,
            inputs: hex_digest(self.digest),
            results,
            checks,
        };
        (report, ok)
    }
}

fn hex_digest(d: Sha256) -> String {
    d.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn load_graph(ctx: &mut Ctx, path: &PathBuf) -> Result<schema::LoadedGraph, Error> {
    let text = ctx.read(path)?;
    let j: schema::GraphJson =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad graph JSON: {e}")))?;
    schema::graph_from_json(&j)
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let msg = json!({ "error": e.to_string() });
            println!("{}", serde_json::to_string_pretty(&msg).unwrap());
            3
        }
    });
}

fn run(cli: Cli) -> Result<bool, Error> {
    let level = match cli.level {
        LevelArg::Smoke => Level::Smoke,
        LevelArg::Desk => Level::Desk,
    };
    let fixtures = std::env::var_os("PSITROP_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    let (report, ok) = dispatch(cli, level, fixtures)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(ok)
}

fn dispatch(cli: Cli, level: Level, fixtures: PathBuf) -> Result<(Report, bool), Error> {
    match cli.command {
        Command::Graph { sub } => graph_cmd(sub),
        Command::Moduli { sub } => moduli_cmd(sub),
        Command::Crossratio { sub } => crossratio_cmd(sub),
        Command::Cycles { sub } => cycles_cmd(sub),
        Command::Psi { sub } => psi_cmd(sub),
        Command::Covers { sub } => covers_cmd(sub),
        Command::Elliptic { sub } => elliptic_cmd(sub),
        Command::Pencil { sub } => pencil_cmd(sub, &fixtures),
        Command::Floors { sub } => floors_cmd(sub),
        Command::VerifyAll => verify_all(level, cli.seed, fixtures),
    }
}

fn graph_cmd(sub: GraphCmd) -> Result<(Report, bool), Error> {
    match sub {
        GraphCmd::Validate { graph } => {
            let mut ctx = Ctx::new("graph validate".into());
            let g = load_graph(&mut ctx, &graph)?.graph;
            let rep = g.validate()?;
            let results = json!({
                "connected": rep.connected,
                "unstable_vertices": rep.unstable_vertices,
                "valid": rep.is_valid(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        GraphCmd::Genus { graph } => {
            let mut ctx = Ctx::new("graph genus".into());
            let g = load_graph(&mut ctx, &graph)?.graph;
            let results = json!({ "genus": g.genus() });
            Ok(ctx.finish(results, vec![]))
        }
        GraphCmd::Contract { graph, edge } => {
            let mut ctx = Ctx::new("graph contract".into());
            let loaded = load_graph(&mut ctx, &graph)?;
            let idx = edge_index(&loaded, edge)?;
            let out = loaded.graph.contract_edge(idx)?;
            let results = serde_json::to_value(schema::graph_to_json(&out)).unwrap();
            Ok(ctx.finish(results, vec![]))
        }
        GraphCmd::Stretch { graph, edge } => {
            let mut ctx = Ctx::new("graph stretch".into());
            let loaded = load_graph(&mut ctx, &graph)?;
            let idx = edge_index(&loaded, edge)?;
            let out = loaded.graph.stretch_edge(idx)?;
            let results = serde_json::to_value(schema::graph_to_json(&out)).unwrap();
            Ok(ctx.finish(results, vec![]))
        }
        GraphCmd::Autos { graph } => {
            let mut ctx = Ctx::new("graph autos".into());
            let g = load_graph(&mut ctx, &graph)?.graph;
            let autos = g.automorphisms();
            let results = json!({
                "order": autos.len(),
                "vertex_maps": autos.iter().map(|a| a.vertex_map.clone()).collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        GraphCmd::Rigidify { graph } => {
            let mut ctx = Ctx::new("graph rigidify".into());
            let g = load_graph(&mut ctx, &graph)?.graph;
            let rigs = g.cycle_rigidifications();
            let results = json!({
                "count": rigs.len(),
                "cycles": rigs
                    .iter()
                    .map(|r| r.cycles.iter().map(|c| match c {
                        None => json!(null),
                        Some(ch) => json!(ch.edges),
                    }).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn edge_index(loaded: &schema::LoadedGraph, id: u64) -> Result<usize, Error> {
    loaded
        .edge_ids
        .iter()
        .position(|&x| x == id)
        .ok_or_else(|| Error::Domain(format!("unknown edge id {id}")))
}

fn moduli_cmd(sub: ModuliCmd) -> Result<(Report, bool), Error> {
    match sub {
        ModuliCmd::Info { n } => {
            let ctx = Ctx::new(format!("moduli info --n {n}"));
            let fan = ModuliFan::build(n)?;
            let results = json!({
                "rays": fan.rays(),
                "top_cones": fan.top_cones().len(),
                "dimension": fan.top_dim(),
                "cones": fan.complex.cones.len(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        ModuliCmd::Point { type_file, lengths } => {
            let mut ctx = Ctx::new("moduli point".into());
            let loaded = load_graph(&mut ctx, &type_file)?;
            let g = loaded.graph;
            let bounded: Vec<usize> = g.bounded_edges().collect();
            if lengths.len() != bounded.len() {
                return Err(Error::Domain(format!(
                    "need {} lengths for the bounded edges, got {}",
                    bounded.len(),
                    lengths.len()
                )));
            }
            let mut lmap = BTreeMap::new();
            for (e, s) in bounded.iter().zip(&lengths) {
                lmap.insert(*e, schema::parse_rat(s)?);
            }
            let n = g.leg_count() as u32;
            let p = MetricGraphPoint { graph: g, lengths: lmap };
            let d = distance_coordinates(&p, n)?;
            let mut coords = BTreeMap::new();
            for i in 1..=n {
                for j in (i + 1)..=n {
                    coords.insert(
                        format!("{i},{j}"),
                        rat_string(&d.doubled_coords[pair_index(n, i, j)]),
                    );
                }
            }
            let results = json!({ "n": n, "doubled_distances": coords });
            Ok(ctx.finish(results, vec![]))
        }
        ModuliCmd::Forget { n } => {
            let ctx = Ctx::new(format!("moduli forget --n {n}"));
            let small = ModuliFan::build(n)?;
            let big = ModuliFan::build(n + 1)?;
            let f = forgetful_map(&big, &small)?;
            let results = json!({
                "rows": f.matrix.rows,
                "cols": f.matrix.cols,
                "entries": f.matrix.data.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        ModuliCmd::Atlas { graph } => {
            let mut ctx = Ctx::new("moduli atlas".into());
            let g = load_graph(&mut ctx, &graph)?.graph;
            let rigs = g.cycle_rigidifications();
            let cones = rigs
                .iter()
                .map(|r| {
                    let cone = atlas_cone(r)?;
                    Ok(json!({
                        "dimension": cone.coordinates.len(),
                        "coordinates": cone.coordinates,
                        "faces": cone.faces.iter().map(|(e, f)| json!({
                            "contracted_edge": e,
                            "face_genus": f.base.genus_of_vertex,
                        })).collect::<Vec<_>>(),
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let results = json!({ "rigidifications": rigs.len(), "cones": cones });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn crossratio_cmd(sub: CrossratioCmd) -> Result<(Report, bool), Error> {
    match sub {
        CrossratioCmd::Eval { datum, point } => {
            let mut ctx = Ctx::new("crossratio eval".into());
            let dj: schema::DatumJson = serde_json::from_str(&ctx.read(&datum)?)
                .map_err(|e| Error::Config(format!("bad datum JSON: {e}")))?;
            let d = schema::datum_from_json(&dj)?;
            let pj: schema::PointJson = serde_json::from_str(&ctx.read(&point)?)
                .map_err(|e| Error::Config(format!("bad point JSON: {e}")))?;
            let p = schema::point_from_json(&pj)?;
            let base_ids: Vec<u64> = dj.graph.edges.iter().map(|e| e.id).collect();
            let spec = schema::specialization_from_point(&p, &base_ids)?;
            let value = evaluate(&d, &p.graph, &p.lengths, &spec)?;
            let results = json!({ "value": rat_string(&value) });
            Ok(ctx.finish(results, vec![]))
        }
        CrossratioCmd::Decompose { datum } => {
            let mut ctx = Ctx::new("crossratio decompose".into());
            let dj: schema::DatumJson = serde_json::from_str(&ctx.read(&datum)?)
                .map_err(|e| Error::Config(format!("bad datum JSON: {e}")))?;
            let d = schema::datum_from_json(&dj)?;
            let terms = decompose_primitive(&d)?;
            let results = json!({
                "terms": terms.iter().map(|(c, t)| json!({
                    "coefficient": c.to_string(),
                    "kind": format!("{:?}", t.kind()),
                    "path_vertices": t.path_vertices,
                })).collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        CrossratioCmd::Distfun { datum } => {
            let mut ctx = Ctx::new("crossratio distfun".into());
            let dj: schema::DatumJson = serde_json::from_str(&ctx.read(&datum)?)
                .map_err(|e| Error::Config(format!("bad datum JSON: {e}")))?;
            let d = schema::datum_from_json(&dj)?;
            let f = pullback_to_distance(&d)?;
            let results = json!({
                "n": f.n,
                "covector_on_doubled_pairs": f.covector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "denominator": f.denominator.to_string(),
            });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn cycles_cmd(sub: CyclesCmd) -> Result<(Report, bool), Error> {
    match sub {
        CyclesCmd::Balance { fan } => {
            let mut ctx = Ctx::new("cycles balance".into());
            let fj: schema::FanJson = serde_json::from_str(&ctx.read(&fan)?)
                .map_err(|e| Error::Config(format!("bad fan JSON: {e}")))?;
            let (_, alpha) = schema::fan_from_json(&fj)?;
            let rep = check_balancing(&alpha)?;
            let results = json!({
                "balanced": rep.is_balanced(),
                "checked_faces": rep.checked_faces,
                "violations": rep.violations,
            });
            let checks = vec![CheckJson {
                name: "balanced".into(),
                expected: "true".into(),
                actual: rep.is_balanced().to_string(),
                pass: rep.is_balanced(),
            }];
            Ok(ctx.finish(results, checks))
        }
        CyclesCmd::Intersect { function, fan } => {
            let mut ctx = Ctx::new("cycles intersect".into());
            let fj: schema::FanJson = serde_json::from_str(&ctx.read(&fan)?)
                .map_err(|e| Error::Config(format!("bad fan JSON: {e}")))?;
            let (complex, alpha) = schema::fan_from_json(&fj)?;
            let gj: schema::FunctionJson = serde_json::from_str(&ctx.read(&function)?)
                .map_err(|e| Error::Config(format!("bad function JSON: {e}")))?;
            if gj.v != 1 {
                return Err(Error::Config("unsupported function schema version".into()));
            }
            let values = gj
                .values_on_rays
                .iter()
                .map(|s| schema::parse_int(s))
                .collect::<Result<Vec<_>, _>>()?;
            let phi = PLFunctionOnFan::from_ray_values(&complex, &values)?;
            phi.check_continuity(&complex)?;
            let beta = divisor_intersect(&phi, &alpha)?;
            let results = serde_json::to_value(schema::fan_to_json(&beta)).unwrap();
            Ok(ctx.finish(results, vec![]))
        }
        CyclesCmd::Push { map, fan } => {
            let mut ctx = Ctx::new("cycles push".into());
            let fj: schema::FanJson = serde_json::from_str(&ctx.read(&fan)?)
                .map_err(|e| Error::Config(format!("bad fan JSON: {e}")))?;
            let (_, alpha) = schema::fan_from_json(&fj)?;
            let mj: schema::MapJson = serde_json::from_str(&ctx.read(&map)?)
                .map_err(|e| Error::Config(format!("bad map JSON: {e}")))?;
            if mj.v != 1 {
                return Err(Error::Config("unsupported map schema version".into()));
            }
            let matrix = schema::matrix_from_json(&mj.matrix)?;
            let (target, _) = schema::fan_from_json(&mj.target)?;
            let pushed = push_forward(&LatticeMap { matrix }, &alpha, Arc::clone(&target))?;
            let results = serde_json::to_value(schema::fan_to_json(&pushed)).unwrap();
            Ok(ctx.finish(results, vec![]))
        }
        CyclesCmd::Degree { fan } => {
            let mut ctx = Ctx::new("cycles degree".into());
            let fj: schema::FanJson = serde_json::from_str(&ctx.read(&fan)?)
                .map_err(|e| Error::Config(format!("bad fan JSON: {e}")))?;
            let (_, alpha) = schema::fan_from_json(&fj)?;
            let d = degree(&alpha)?;
            let results = json!({ "degree": d.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
        CyclesCmd::Index { matrix } => {
            let mut ctx = Ctx::new("cycles index".into());
            let mj: schema::MatrixJson = serde_json::from_str(&ctx.read(&matrix)?)
                .map_err(|e| Error::Config(format!("bad matrix JSON: {e}")))?;
            let m = schema::matrix_from_json(&mj)?;
            let results = json!({ "index": lattice_index(&m).to_string() });
            Ok(ctx.finish(results, vec![]))
        }
        CyclesCmd::Chern { cocycle } => {
            let mut ctx = Ctx::new("cycles chern".into());
            let cj: schema::CocycleJson = serde_json::from_str(&ctx.read(&cocycle)?)
                .map_err(|e| Error::Config(format!("bad cocycle JSON: {e}")))?;
            let c = schema::cocycle_from_json(&cj)?;
            let results = json!({ "degree": c.c1_degree()?.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn psi_cmd(sub: PsiCmd) -> Result<(Report, bool), Error> {
    match sub {
        PsiCmd::Degree { n, exp } => {
            let ctx = Ctx::new(format!("psi degree --n {n}"));
            let fan = ModuliFan::build(n)?;
            let d = psi_product_degree(&fan, &exp)?;
            let results = json!({ "degree": d.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
        PsiCmd::Dilaton { n } => {
            let ctx = Ctx::new(format!("psi dilaton --n {n}"));
            let r = dilaton_pushforward(n)?;
            let results = json!({
                "factor": r.factor.to_string(),
                "matches": [r.matches],
            });
            let checks = vec![CheckJson {
                name: format!("push equals {} [M0,{n}]", r.factor),
                expected: "true".into(),
                actual: r.matches.to_string(),
                pass: r.matches,
            }];
            Ok(ctx.finish(results, checks))
        }
        PsiCmd::Represent { n, i } => {
            let ctx = Ctx::new(format!("psi represent --n {n} --i {i}"));
            let fan = ModuliFan::build(n)?;
            let rep = psi_representative(&fan, i)?;
            let support: Vec<usize> = rep.fan.weights.keys().copied().collect();
            let support_ok = support.iter().all(|&c| leg_at_four_valent(&fan, c, i));
            let balanced = check_balancing(&rep.fan)?.is_balanced();
            let results = json!({
                "cones": support.len(),
                "weights_all_one": rep.fan.weights.values().all(|w| w == &psitrop::cycles::Int::from(1)),
                "balanced": balanced,
            });
            let checks = vec![
                CheckJson {
                    name: "supported on four-valent-at-i cones".into(),
                    expected: "true".into(),
                    actual: support_ok.to_string(),
                    pass: support_ok,
                },
                CheckJson {
                    name: "balanced".into(),
                    expected: "true".into(),
                    actual: balanced.to_string(),
                    pass: balanced,
                },
            ];
            Ok(ctx.finish(results, checks))
        }
        PsiCmd::Pullcheck { n, i } => {
            let ctx = Ctx::new(format!("psi pullcheck --n {n} --i {i}"));
            let rep = pullback_check(n, i)?;
            let all = rep.classes.iter().all(|c| c.holds());
            let results = json!({
                "classes": rep.classes.iter().map(|c| json!({
                    "label": c.label,
                    "psi": c.psi.to_string(),
                    "pulled": c.pulled.to_string(),
                    "boundary": c.boundary.to_string(),
                    "holds": c.holds(),
                })).collect::<Vec<_>>(),
            });
            let checks = vec![CheckJson {
                name: format!("psi_{i} = pi*psi_{i} + D on {} classes", rep.classes.len()),
                expected: "true".into(),
                actual: all.to_string(),
                pass: all,
            }];
            Ok(ctx.finish(results, checks))
        }
    }
}

fn covers_cmd(sub: CoversCmd) -> Result<(Report, bool), Error> {
    match sub {
        CoversCmd::Table { d } => {
            let ctx = Ctx::new(format!("covers table --d {d}"));
            let table = covers::cover_class_table(d)?;
            let results = json!({
                "records": table.iter().map(|r| json!({
                    "class": format!("{:?}", r.class),
                    "a": r.a,
                    "count": r.count.to_string(),
                    "weight": rat_string(&r.weight),
                    "source_slope": rat_string(&r.source_slope),
                    "branch_slope": rat_string(&r.branch_slope),
                    "target_ray": r.target_ray,
                })).collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        CoversCmd::Degrees { d } => {
            let ctx = Ctx::new(format!("covers degrees --d {d}"));
            let source = covers::source_degree(d)?;
            let branch = covers::branch_degree(d)?;
            let psi = covers::psi_covers_degree(d)?;
            let ratio = psi.clone() / psitrop::covers::Rat::from(source.clone());
            let results = json!({
                "source": source.to_string(),
                "branch": branch.to_string(),
                "psi": rat_string(&psi),
                "ratio": rat_string(&ratio),
            });
            let pass = ratio == psitrop::covers::Rat::new(1.into(), 12.into());
            let checks = vec![CheckJson {
                name: "psi/source ratio".into(),
                expected: "1/12".into(),
                actual: rat_string(&ratio),
                pass,
            }];
            Ok(ctx.finish(results, checks))
        }
        CoversCmd::Rh { d, class, a } => {
            let ctx = Ctx::new(format!("covers rh --d {d} --class {class}"));
            let cl = match class.as_str() {
                "I" => covers::CoverClass::I,
                "II" => covers::CoverClass::II,
                "III" => covers::CoverClass::III,
                "IV" => covers::CoverClass::IV,
                other => return Err(Error::Domain(format!("unknown class {other:?}"))),
            };
            let data = covers::class_representative(d, cl, a)?;
            let holds = covers::local_rh_check(&data)?;
            let results = json!({ "holds": holds });
            let checks = vec![CheckJson {
                name: "local Riemann-Hurwitz".into(),
                expected: "true".into(),
                actual: holds.to_string(),
                pass: holds,
            }];
            Ok(ctx.finish(results, checks))
        }
    }
}

fn elliptic_cmd(sub: EllipticCmd) -> Result<(Report, bool), Error> {
    match sub {
        EllipticCmd::Psi { a } => {
            let ctx = Ctx::new(format!("elliptic psi --a {a}"));
            let d = psi_pullback_degree(EllipticFamilySpec { a })?;
            let results = json!({ "degree": d.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
        EllipticCmd::Isom { a, b } => {
            let ctx = Ctx::new(format!("elliptic isom --a {a} --b {b}"));
            let rep = isom_balancing(a, b)?;
            let results = json!({
                "balanced": rep.is_balanced(),
                "violations": rep.violations,
            });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn pencil_cmd(sub: PencilCmd, fixtures: &PathBuf) -> Result<(Report, bool), Error> {
    match sub {
        PencilCmd::Mult { fixture } => {
            let mut ctx = Ctx::new("pencil mult".into());
            let text = ctx.read(&fixture)?;
            let t = pencil::ParamStableMapType::from_json(&text)?;
            let m = pencil::edge_multiplicity(&t)?;
            let results = json!({ "multiplicity": m.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
        PencilCmd::Matrix { fixture } => {
            let mut ctx = Ctx::new("pencil matrix".into());
            let text = ctx.read(&fixture)?;
            let t = pencil::ParamStableMapType::from_json(&text)?;
            let m = pencil::evaluation_matrix(&t)?;
            let results = json!({
                "rows": m.rows,
                "cols": m.cols,
                "entries": m.data.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            Ok(ctx.finish(results, vec![]))
        }
        PencilCmd::Degrees { corpus } => {
            let ctx = Ctx::new("pencil degrees".into());
            let dir = corpus.unwrap_or_else(|| fixtures.clone());
            let rep = pencil::pencil_degrees(&dir)?;
            let psi: BTreeMap<String, Value> = rep
                .psi_degrees
                .iter()
                .map(|(m, (pts, mult, total))| {
                    (
                        m.to_string(),
                        json!({
                            "points": pts.to_string(),
                            "multiplicity": mult.to_string(),
                            "degree": total.to_string(),
                        }),
                    )
                })
                .collect();
            let results = json!({
                "floor_count": rep.floor_count.to_string(),
                "labeling_factor": rep.labeling_factor.to_string(),
                "covering_degree": rep.covering_degree.to_string(),
                "psi_degrees": psi,
                "ratio": rat_string(&rep.ratio),
            });
            let pass = rep.ratio == pencil::Rat::new(1.into(), 24.into());
            let checks = vec![CheckJson {
                name: "final ratio".into(),
                expected: "1/24".into(),
                actual: rat_string(&rep.ratio),
                pass,
            }];
            Ok(ctx.finish(results, checks))
        }
    }
}

fn floors_cmd(sub: FloorsCmd) -> Result<(Report, bool), Error> {
    match sub {
        FloorsCmd::Count { d, g } => {
            let ctx = Ctx::new(format!("floors count --d {d}"));
            let c = floor_count(d, g)?;
            let results = json!({ "count": c.to_string() });
            Ok(ctx.finish(results, vec![]))
        }
    }
}

fn verify_all(level: Level, seed: u64, fixtures: PathBuf) -> Result<(Report, bool), Error> {
    let ctx = Ctx::new("verify-all".into());
    let config = Config { level, seed, fixtures };
    let results = run_all(&config)?;
    let mut checks = vec![];
    let mut lines = vec![];
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        eprintln!("criterion {}: {} [{}] ({:.2}s)", r.id, r.name, status, r.seconds);
        lines.push(json!({
            "criterion": r.id,
            "name": r.name,
            "status": status,
            "seconds": format!("{:.2}", r.seconds),
        }));
        for c in &r.checks {
            checks.push(CheckJson {
                name: format!("{}: {}", r.id, c.name),
                expected: c.expected.clone(),
                actual: c.actual.clone(),
                pass: c.pass,
            });
        }
    }
    Ok(ctx.finish(json!({ "criteria": lines }), checks))
}
