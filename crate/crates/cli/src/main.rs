use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use wfrechet_core::io::{self, Mode, ResultDocument};
use wfrechet_core::svg::render_svg;
use wfrechet_core::{
    discrete_frechet, euclidean_frechet, geodesic_run, segment_leash_run, CurveOnMesh, LeashOptions, Location,
    MatchingResult, PolygonalCurve, Solver, Stats, WeightedSubdivision,
};

/// Approximate Fréchet distance between curves in a weighted triangulated region.
#[derive(Parser, Debug)]
#[command(name = "wfrechet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Straight-segment leash whose cost is its weighted length.
    SegmentLeash(LeashArgs),
    /// Leash along weighted shortest paths.
    Geodesic(GeodesicArgs),
    /// Discrete Fréchet distance of the vertex sequences (Euclidean).
    Discrete(ExactArgs),
    /// Continuous Fréchet distance (Euclidean).
    Euclidean(ExactArgs),
    /// Check a mesh for structural problems.
    Validate(ValidateArgs),
    /// Draw a mesh, two curves and optionally a result.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct Inputs {
    /// Mesh document.
    #[arg(short = 's', long)]
    subdivision: PathBuf,
    /// Curve P document.
    #[arg(short = 'p', long)]
    curve_p: PathBuf,
    /// Curve Q document.
    #[arg(short = 'q', long)]
    curve_q: PathBuf,
}

#[derive(Args, Debug)]
struct Outputs {
    /// Result document (stdout when absent).
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Also draw the result.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LeashArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(short = 'e', long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    outputs: Outputs,
    /// Write the Steiner points.
    #[arg(long)]
    dump_steiner: Option<PathBuf>,
    /// Write the per-cell arrangements.
    #[arg(long)]
    dump_arrangement: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolverArg::Sweep)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Sweep,
    ExtensionGraph,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(short = 'e', long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    outputs: Outputs,
    /// Write the Steiner points.
    #[arg(long)]
    dump_steiner: Option<PathBuf>,
    /// Write the distance table between the refined curves.
    #[arg(long)]
    dump_table: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug)]
struct ExactArgs {
    /// Mesh document; only needed for --svg.
    #[arg(short = 's', long)]
    subdivision: Option<PathBuf>,
    #[arg(short = 'p', long)]
    curve_p: PathBuf,
    #[arg(short = 'q', long)]
    curve_q: PathBuf,
    #[command(flatten)]
    outputs: Outputs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(short = 's', long)]
    subdivision: PathBuf,
    /// Also spot-check point location at random points of every triangle.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Result document whose matching is drawn.
    #[arg(short = 'r', long)]
    result: Option<PathBuf>,
    /// Picture (stdout when absent).
    #[arg(long, visible_alias = "output", short = 'o')]
    svg: Option<PathBuf>,
}

/// Failure classified by exit code.
enum Failure {
    /// Bad arguments, unreadable or invalid input: exit 1.
    Input(anyhow::Error),
    /// Numeric or internal failure: exit 2.
    Internal(anyhow::Error),
}

impl From<wfrechet_core::Error> for Failure {
    fn from(e: wfrechet_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.into())
        } else {
            Failure::Internal(e.into())
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::Input)
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::Input)
}

fn in_file(path: &Path, e: wfrechet_core::Error) -> Failure {
    let input = e.is_input_error();
    let e = anyhow::Error::from(e).context(path.display().to_string());
    if input {
        Failure::Input(e)
    } else {
        Failure::Internal(e)
    }
}

fn load_mesh(path: &Path) -> Outcome<WeightedSubdivision> {
    io::parse_mesh(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_curve(path: &Path, mesh: &WeightedSubdivision) -> Outcome<CurveOnMesh> {
    io::parse_curve(&read(path)?, mesh).map_err(|e| in_file(path, e))
}

fn load_free_curve(path: &Path) -> Outcome<PolygonalCurve> {
    io::parse_free_curve(&read(path)?).map_err(|e| in_file(path, e))
}

/// Mesh, both curves resolved on it, and both curves as written (path parameters refer to these).
struct Loaded {
    mesh: WeightedSubdivision,
    p: CurveOnMesh,
    q: CurveOnMesh,
    raw: (PolygonalCurve, PolygonalCurve),
}

fn load(inputs: &Inputs) -> Outcome<Loaded> {
    let mesh = load_mesh(&inputs.subdivision)?;
    let (p, q) = (load_curve(&inputs.curve_p, &mesh)?, load_curve(&inputs.curve_q, &mesh)?);
    let raw = (load_free_curve(&inputs.curve_p)?, load_free_curve(&inputs.curve_q)?);
    Ok(Loaded { mesh, p, q, raw })
}

fn dump<T: Serialize>(path: &Option<PathBuf>, value: Option<&T>) -> Outcome<()> {
    if let (Some(path), Some(v)) = (path, value) {
        let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.into()))?;
        write(path, &text)?;
    }
    Ok(())
}

fn emit(doc: &ResultDocument, outputs: &Outputs, picture: Option<(&WeightedSubdivision, &PolygonalCurve, &PolygonalCurve)>) -> Outcome<()> {
    let text = doc.to_json();
    match &outputs.output {
        Some(path) => {
            write(path, &text)?;
            println!("{} {}", doc.mode.name(), doc.value);
        }
        None => println!("{text}"),
    }
    if let Some(path) = &outputs.svg {
        let (mesh, p, q) = picture.ok_or_else(|| Failure::Input(anyhow!("--svg needs a mesh (-s)")))?;
        write(path, &render_svg(mesh, p, q, Some(&doc.matching())))?;
    }
    Ok(())
}

fn segment_leash(a: &LeashArgs) -> Outcome<()> {
    let l = load(&a.inputs)?;
    let solver = match a.solver {
        SolverArg::Sweep => Solver::Sweep,
        SolverArg::ExtensionGraph => Solver::ExtensionGraph,
    };
    let run = segment_leash_run(&l.mesh, &l.p, &l.q, a.epsilon, LeashOptions { solver, threads: a.threads })?;
    dump(&a.dump_steiner, run.steiner.as_ref())?;
    dump(&a.dump_arrangement, run.grid.as_ref())?;
    let doc = ResultDocument::new(Mode::SegmentLeash, Some(a.epsilon), run.result);
    emit(&doc, &a.outputs, Some((&l.mesh, &l.raw.0, &l.raw.1)))
}

fn geodesic(a: &GeodesicArgs) -> Outcome<()> {
    let l = load(&a.inputs)?;
    let run = geodesic_run(&l.mesh, &l.p, &l.q, a.epsilon, a.threads)?;
    dump(&a.dump_steiner, run.steiner.as_ref())?;
    dump(&a.dump_table, run.table.as_ref())?;
    let doc = ResultDocument::new(Mode::Geodesic, Some(a.epsilon), run.result);
    emit(&doc, &a.outputs, Some((&l.mesh, &l.raw.0, &l.raw.1)))
}

fn exact(a: &ExactArgs, mode: Mode) -> Outcome<()> {
    let mesh = a.subdivision.as_deref().map(load_mesh).transpose()?;
    let (p, q) = (load_free_curve(&a.curve_p)?, load_free_curve(&a.curve_q)?);
    let stats = Stats { p_vertices: p.len(), q_vertices: q.len(), ..Stats::default() };
    let result = match mode {
        Mode::Discrete => {
            let (value, coupling) = discrete_frechet(&p, &q, |a, b| a.dist(b))?;
            let path = coupling.pairs.iter().map(|&(i, j)| (p.vertex_param(i), q.vertex_param(j))).collect();
            MatchingResult { value, path: closed(path), faces: Vec::new(), coupling: coupling.pairs, stats }
        }
        _ => {
            let value = euclidean_frechet(&p, &q, 1e-9);
            MatchingResult { value, path: vec![(0.0, 0.0), (1.0, 1.0)], faces: Vec::new(), coupling: Vec::new(), stats }
        }
    };
    let doc = ResultDocument::new(mode, None, result);
    emit(&doc, &a.outputs, mesh.as_ref().map(|m| (m, &p, &q)))
}

/// Deduplicates a vertex-coupling path and pins its ends to the unit square's corners.
fn closed(raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut path = vec![(0.0, 0.0)];
    for pt in raw {
        if path.last() != Some(&pt) {
            path.push(pt);
        }
    }
    if path.last() != Some(&(1.0, 1.0)) {
        path.push((1.0, 1.0));
    }
    path
}

fn validate(a: &ValidateArgs) -> Outcome<()> {
    let mesh = io::parse_mesh_unchecked(&read(&a.subdivision)?).map_err(|e| in_file(&a.subdivision, e))?;
    let mut problems = mesh.validate().err().unwrap_or_default();
    if let (Some(seed), true) = (a.seed, problems.is_empty()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..mesh.triangle_count() {
            let [x, y, z] = mesh.triangle_points(t);
            let (u, v): (f64, f64) = (rng.gen_range(0.05..0.9), rng.gen_range(0.05..0.9));
            let (u, v) = if u + v > 0.95 { (0.95 - v, 0.95 - u) } else { (u, v) };
            let pt = x + (y - x) * u + (z - x) * v;
            match mesh.locate(pt) {
                Location::Triangle(found) if found == t => {}
                other => problems.push(format!("point ({}, {}) inside triangle {t} located as {other:?}", pt.x, pt.y)),
            }
        }
    }
    if problems.is_empty() {
        println!("ok: {} vertices, {} triangles, {} edges", mesh.vertex_count(), mesh.triangle_count(), mesh.edges().len());
        Ok(())
    } else {
        for p in &problems {
            println!("{p}");
        }
        Err(Failure::Input(anyhow!("{}: {} violation(s)", a.subdivision.display(), problems.len())))
    }
}

fn render(a: &RenderArgs) -> Outcome<()> {
    let l = load(&a.inputs)?;
    let result = match &a.result {
        Some(path) => Some(ResultDocument::from_json(&read(path)?).map_err(|e| in_file(path, e))?.matching()),
        None => None,
    };
    let svg = render_svg(&l.mesh, &l.raw.0, &l.raw.1, result.as_ref());
    match &a.svg {
        Some(path) => write(path, &svg),
        None => {
            print!("{svg}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::SegmentLeash(a) => segment_leash(a),
        Command::Geodesic(a) => geodesic(a),
        Command::Discrete(a) => exact(a, Mode::Discrete),
        Command::Euclidean(a) => exact(a, Mode::Euclidean),
        Command::Validate(a) => validate(a),
        Command::Render(a) => render(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WFRECHET_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
