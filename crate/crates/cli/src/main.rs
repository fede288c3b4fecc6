//! `pstlab`: build hypercube-family graphs and check them for perfect state
//! transfer.
//!
//! Exit codes: 0 ok, 1 negative finding, 2 input error, 3 numerical failure.

mod parse;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pstlab_core::evolution::{Evolution, FidelityTrace};
use pstlab_core::graph::{complement, cubelike, hypercube, set_size_cap, ConnectionSet, Graph};
use pstlab_core::io::{graph_to_json, partition_from_json, read_graph, read_schedule};
use pstlab_core::pst::{
    derivative_report, find_schedule_pst_pairs, pairs_in_propagator, pst_census, Dynamics,
    Family as CensusFamily, PstReport, DEFAULT_PST_TOL,
};
use pstlab_core::spectral::{
    are_cospectral, eigendecompose, is_standard_hadamard_diagonalizable, minimal_polynomial,
    sorted_spectrum, support_obstruction, PstObstruction, DEFAULT_CLUSTER_TOL,
    DEFAULT_INT_TOL, DEFAULT_PROJ_TOL,
};
use pstlab_core::switching::{
    build_block_cube, gm_switch, switched_hypercube, switching_partitions,
    validate_gm_partition, Block, BlockSpec,
};
use pstlab_core::Error;
use serde_json::{json, Value};

use parse::{parse_elements, parse_list, parse_positive, parse_time, time_grid};

#[derive(Parser)]
#[command(name = "pstlab", version, about = "Perfect state transfer on hypercube spin networks")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Relative tolerance for merging eigenvalues into one eigenspace.
    #[arg(long, global = true, default_value_t = DEFAULT_CLUSTER_TOL, value_parser = parse_positive)]
    cluster_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a graph and print it as JSON.
    Build(BuildArgs),
    /// List perfect state transfer pairs of a graph at a time.
    Pst(PstArgs),
    /// Sample the transfer fidelity between two vertices over a time grid.
    Trace(TraceArgs),
    /// Derivatives of the transfer fidelity at a PST time.
    Sensitivity(SensitivityArgs),
    /// Spectral queries.
    #[command(subcommand)]
    Spectral(SpectralCommand),
    /// PST pair census at pi/2 over a family of n-cube variants.
    Census(CensusArgs),
    /// PST pairs of a time-switched schedule at its total duration.
    Schedule(ScheduleArgs),
    /// Apply a switching partition, or list all partitions of a small graph.
    Switch(SwitchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Hypercube,
    Switched,
    Partial,
    Blend,
    Cubelike,
}

#[derive(Args)]
struct BuildArgs {
    kind: BuildKind,
    #[arg(long)]
    n: usize,
    /// Block weights, one per 16-vertex block: 1 plain, 0 switched.
    #[arg(long)]
    blocks: Option<String>,
    /// Connection set for `cubelike`, e.g. `1,2,4,8` or `0b0011,0b1100`.
    #[arg(long)]
    connection: Option<String>,
}

#[derive(Args)]
struct PstArgs {
    graph: PathBuf,
    /// Readout time; accepts `pi/2`-style tokens. With `--scan`, the grid end.
    #[arg(long, default_value = "pi/2", value_parser = parse_time)]
    t: f64,
    /// Pairs need fidelity at least `1 - tol`.
    #[arg(long, default_value_t = DEFAULT_PST_TOL, value_parser = parse_positive)]
    tol: f64,
    /// Scan a uniform grid from `--start` to `--t` instead of a single time.
    #[arg(long)]
    scan: bool,
    #[arg(long, value_parser = parse_time)]
    start: Option<f64>,
    #[arg(long, default_value = "pi/64", value_parser = parse_time)]
    step: f64,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TraceArgs {
    graph: PathBuf,
    #[arg(long)]
    from: usize,
    #[arg(long)]
    to: usize,
    #[arg(long, default_value = "0", value_parser = parse_time)]
    start: f64,
    /// Grid end.
    #[arg(long, default_value = "pi", value_parser = parse_time)]
    t: f64,
    #[arg(long, default_value = "pi/64", value_parser = parse_time)]
    step: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Hypercube,
    Switched,
    Partial,
    Blend,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long, value_enum, required_unless_present_any = ["graph", "schedule"])]
    family: Option<FamilyKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    blocks: Option<String>,
    /// Graph file instead of a family.
    #[arg(long, conflicts_with_all = ["family", "schedule"])]
    graph: Option<PathBuf>,
    /// Schedule file; the readout time is its total duration.
    #[arg(long, conflicts_with = "family")]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// PST time (ignored for schedules).
    #[arg(long, default_value = "pi/2", value_parser = parse_time)]
    t: f64,
    /// Finite-difference step.
    #[arg(long, default_value = "1e-3", value_parser = parse_time)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    from: usize,
    /// Defaults to the complement of `--from`.
    #[arg(long)]
    to: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum SpectralCommand {
    /// Distinct eigenvalues and multiplicities.
    Decompose { graph: PathBuf },
    /// Whether two graphs share a spectrum.
    Cospectral {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
        tol: f64,
    },
    /// Whether the standard Hadamard matrix diagonalizes the adjacency matrix.
    Hadamard {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
        tol: f64,
    },
    /// Minimal polynomial over the distinct eigenvalues.
    Minpoly { graph: PathBuf },
    /// Eigenvalue support of a vertex.
    Support {
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, default_value_t = DEFAULT_PROJ_TOL, value_parser = parse_positive)]
        proj_tol: f64,
    },
    /// Integer/irrational support obstruction to PST, for one or all vertices.
    Obstruction {
        graph: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_INT_TOL, value_parser = parse_positive)]
        int_tol: f64,
        #[arg(long, default_value_t = DEFAULT_PROJ_TOL, value_parser = parse_positive)]
        proj_tol: f64,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: usize,
    /// Block weights for `blend`.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PST_TOL, value_parser = parse_positive)]
    tol: f64,
}

#[derive(Args)]
struct ScheduleArgs {
    schedule: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PST_TOL, value_parser = parse_positive)]
    tol: f64,
}

#[derive(Args)]
struct SwitchArgs {
    graph: PathBuf,
    /// Partition JSON; omit to enumerate all switching partitions.
    #[arg(long)]
    partition: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Numerical(e.to_string()),
            Error::SwitchingConditions(ref report) => Failure::Input(format!(
                "{e}\n{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            )),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

/// Printed text plus whether the finding was positive.
struct Output {
    text: String,
    positive: bool,
}

impl Output {
    fn json(value: &Value, positive: bool) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("value serializes");
        text.push('\n');
        Self { text, positive }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn load(path: &Path) -> Result<Graph, Failure> {
    read_graph(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn weights(blocks: Option<&str>, what: &str) -> Result<Vec<f64>, Failure> {
    match blocks {
        Some(s) => parse_list(s).map_err(Failure::Input),
        None => input(format!("--blocks is required for {what}")),
    }
}

fn plain_switched(n: usize, blocks: Option<&str>) -> Result<BlockSpec, Failure> {
    let blocks = weights(blocks, "partial")?
        .into_iter()
        .map(|w| match w {
            w if w == 1.0 => Ok(Block::Plain),
            w if w == 0.0 => Ok(Block::Switched),
            w => input(format!("partial blocks must be 0 or 1, got {w}")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockSpec::new(n, blocks)?)
}

fn family_graph(kind: FamilyKind, n: usize, blocks: Option<&str>) -> Result<Graph, Failure> {
    Ok(match kind {
        FamilyKind::Hypercube => hypercube(n)?,
        FamilyKind::Switched => switched_hypercube(n)?,
        FamilyKind::Partial => build_block_cube(&plain_switched(n, blocks)?)?,
        FamilyKind::Blend => {
            build_block_cube(&BlockSpec::from_weights(n, &weights(blocks, "blend")?)?)?
        }
    })
}

fn evolution(g: &Graph, cluster_tol: f64) -> Result<Evolution, Failure> {
    Ok(Evolution::from_decomposition(&eigendecompose(g, cluster_tol)?))
}

/// Report JSON with 1-based labels added alongside the 0-based indices.
fn pst_json(report: &PstReport) -> Value {
    let mut v = to_value(report);
    v["paper_labels"] = json!(report
        .pairs
        .iter()
        .map(|&(j, k, _)| [j + 1, k + 1])
        .collect::<Vec<_>>());
    v
}

fn cmd_build(args: &BuildArgs) -> Result<Output, Failure> {
    let n = args.n;
    let g = match args.kind {
        BuildKind::Hypercube => hypercube(n)?,
        BuildKind::Switched => switched_hypercube(n)?,
        BuildKind::Partial => family_graph(FamilyKind::Partial, n, args.blocks.as_deref())?,
        BuildKind::Blend => family_graph(FamilyKind::Blend, n, args.blocks.as_deref())?,
        BuildKind::Cubelike => {
            let elements = match &args.connection {
                Some(s) => parse_elements(s).map_err(Failure::Input)?,
                None => return input("--connection is required for cubelike"),
            };
            cubelike(&ConnectionSet::new(n, elements)?)?
        }
    };
    Ok(Output { text: graph_to_json(&g) + "\n", positive: true })
}

fn cmd_pst(args: &PstArgs, cluster_tol: f64) -> Result<Output, Failure> {
    let g = load(&args.graph)?;
    let evo = evolution(&g, cluster_tol)?;
    if !args.scan {
        let report = pairs_in_propagator(&evo.propagator(args.t)?, args.t, args.tol)?;
        let positive = !report.pairs.is_empty();
        return Ok(Output::json(&pst_json(&report), positive));
    }
    let start = args.start.unwrap_or(args.step);
    let grid = time_grid(start, args.t, args.step).map_err(Failure::Input)?;
    let mut hits = Vec::new();
    for &t in &grid {
        let report = pairs_in_propagator(&evo.propagator(t)?, t, args.tol)?;
        if !report.pairs.is_empty() {
            hits.push(pst_json(&report));
        }
    }
    let positive = !hits.is_empty();
    let value = json!({
        "grid": {"start": start, "stop": args.t, "step": args.step, "count": grid.len()},
        "hits": hits,
    });
    Ok(Output::json(&value, positive))
}

fn cmd_trace(args: &TraceArgs, cluster_tol: f64) -> Result<Output, Failure> {
    let g = load(&args.graph)?;
    g.check_vertex(args.from)?;
    g.check_vertex(args.to)?;
    let times = time_grid(args.start, args.t, args.step).map_err(Failure::Input)?;
    let evo = evolution(&g, cluster_tol)?;
    let trace = FidelityTrace {
        source: args.from,
        target: args.to,
        samples: times.iter().map(|&t| (t, evo.fidelity(args.from, args.to, t))).collect(),
    };
    let text = match args.format {
        Format::Csv => trace.to_csv(),
        Format::Json => {
            let (peak_t, peak_p) = trace.peak().expect("grid is nonempty");
            let value = json!({
                "source": trace.source,
                "target": trace.target,
                "paper_labels": {"source": trace.source + 1, "target": trace.target + 1},
                "samples": trace.samples,
                "peak": {"t": peak_t, "fidelity": peak_p},
            });
            return Ok(Output::json(&value, true));
        }
    };
    Ok(Output { text, positive: true })
}

fn cmd_sensitivity(args: &SensitivityArgs) -> Result<Output, Failure> {
    let schedule = args.schedule.as_deref().map(read_schedule).transpose()?;
    let graph = match (&args.graph, args.family) {
        (Some(path), _) => Some(load(path)?),
        (None, Some(kind)) => {
            let Some(n) = args.n else {
                return input("--n is required with --family");
            };
            Some(family_graph(kind, n, args.blocks.as_deref())?)
        }
        (None, None) => None,
    };
    let (dynamics, order, label) = match (&graph, &schedule) {
        (Some(g), _) => (Dynamics::Graph(g), g.order(), "graph"),
        (None, Some(s)) => (Dynamics::Schedule(s), s.order(), "schedule"),
        (None, None) => return input("one of --family, --graph, --schedule is required"),
    };
    let n = order.trailing_zeros() as usize;
    let target = match args.to {
        Some(k) => k,
        None if order.is_power_of_two() => complement(args.from, n),
        None => return input("--to is required for graphs whose order is not a power of two"),
    };
    let t0 = schedule.as_ref().map_or(args.t, |s| s.total_duration());
    let report = derivative_report(dynamics, args.from, target, t0, &[args.order], args.step)?;
    let family = args.family.map_or(label.to_string(), |f| {
        f.to_possible_value().expect("no skipped variants").get_name().to_string()
    });
    match args.format {
        Format::Json => {
            let mut value = to_value(&report);
            value["family"] = json!(family);
            value["paper_labels"] = json!({"source": report.source + 1, "target": report.target + 1});
            Ok(Output::json(&value, true))
        }
        Format::Csv => {
            let mut text = String::from("order,analytic,numeric\n");
            for (k, a) in &report.analytic {
                let numeric = report.numeric.get(k).map_or(String::new(), |x| x.to_string());
                text.push_str(&format!("{k},{a},{numeric}\n"));
            }
            Ok(Output { text, positive: true })
        }
    }
}

fn cmd_spectral(cmd: &SpectralCommand, cluster_tol: f64) -> Result<Output, Failure> {
    match cmd {
        SpectralCommand::Decompose { graph } => {
            let d = eigendecompose(&load(graph)?, cluster_tol)?;
            let (cross, idem, complete) = d.projector_residuals();
            let mut value = to_value(&d.report());
            value["projector_residuals"] =
                json!({"cross": cross, "idempotence": idem, "completeness": complete});
            Ok(Output::json(&value, true))
        }
        SpectralCommand::Cospectral { a, b, tol } => {
            let (ga, gb) = (load(a)?, load(b)?);
            let same = are_cospectral(&ga, &gb, *tol)?;
            let mut value = json!({"cospectral": same, "tol": tol});
            if ga.order() == gb.order() {
                let sa = sorted_spectrum(ga.adjacency())?;
                let sb = sorted_spectrum(gb.adjacency())?;
                let diff = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                value["max_difference"] = json!(diff);
            }
            Ok(Output::json(&value, same))
        }
        SpectralCommand::Hadamard { graph, tol } => {
            let yes = is_standard_hadamard_diagonalizable(&load(graph)?, *tol)?;
            Ok(Output::json(&json!({"hadamard_diagonalizable": yes, "tol": tol}), yes))
        }
        SpectralCommand::Minpoly { graph } => {
            let p = minimal_polynomial(&load(graph)?, cluster_tol)?;
            let value = json!({
                "polynomial": p.to_string(),
                "degree": p.degree(),
                "coefficients": p.coefficients(),
            });
            Ok(Output::json(&value, true))
        }
        SpectralCommand::Support { graph, vertex, proj_tol } => {
            let g = load(graph)?;
            g.check_vertex(*vertex)?;
            let d = eigendecompose(&g, cluster_tol)?;
            let value = json!({
                "vertex": vertex,
                "paper_label": vertex + 1,
                "support": d.support(*vertex, *proj_tol),
                "proj_tol": proj_tol,
            });
            Ok(Output::json(&value, true))
        }
        SpectralCommand::Obstruction { graph, vertex, int_tol, proj_tol } => {
            let g = load(graph)?;
            let d = eigendecompose(&g, cluster_tol)?;
            let vertices = match vertex {
                Some(v) => {
                    g.check_vertex(*v)?;
                    vec![*v]
                }
                None => (0..g.order()).collect(),
            };
            let mut any_obstructed = false;
            let entries: Vec<Value> = vertices
                .iter()
                .map(|&u| {
                    let support = d.support(u, *proj_tol);
                    let result = support_obstruction(&support, *int_tol);
                    any_obstructed |= result == PstObstruction::Obstructed;
                    json!({"vertex": u, "paper_label": u + 1, "support": support, "result": result})
                })
                .collect();
            let value = json!({"int_tol": int_tol, "vertices": entries});
            Ok(Output::json(&value, vertex.is_none() || !any_obstructed))
        }
    }
}

fn cmd_census(args: &CensusArgs) -> Result<Output, Failure> {
    let family = match args.family {
        FamilyKind::Hypercube => CensusFamily::Hypercube,
        FamilyKind::Switched => CensusFamily::Switched,
        FamilyKind::Partial => CensusFamily::PartialAll,
        FamilyKind::Blend => CensusFamily::Blend(weights(args.blocks.as_deref(), "blend")?),
    };
    let report = pst_census(&family, args.n, args.tol)?;
    Ok(Output::json(&to_value(&report), true))
}

fn cmd_schedule(args: &ScheduleArgs) -> Result<Output, Failure> {
    let s = read_schedule(&args.schedule)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.schedule.display())))?;
    let report = find_schedule_pst_pairs(&s, args.tol)?;
    let mut value = pst_json(&report);
    value["segments"] = json!(s.segments().len());
    Ok(Output::json(&value, !report.pairs.is_empty()))
}

fn cmd_switch(args: &SwitchArgs) -> Result<Output, Failure> {
    let g = load(&args.graph)?;
    match &args.partition {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let p = partition_from_json(&text)?;
            let report = validate_gm_partition(&g, &p)?;
            if !report.ok {
                return Err(Error::SwitchingConditions(Box::new(report)).into());
            }
            Ok(Output { text: graph_to_json(&gm_switch(&g, &p)?) + "\n", positive: true })
        }
        None => {
            let partitions = switching_partitions(&g)?;
            let positive = !partitions.is_empty();
            Ok(Output::json(&json!({"partitions": partitions}), positive))
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let ct = cli.cluster_tol;
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Pst(a) => cmd_pst(a, ct),
        Command::Trace(a) => cmd_trace(a, ct),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Spectral(c) => cmd_spectral(c, ct),
        Command::Census(a) => cmd_census(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Switch(a) => cmd_switch(a),
    }
}

fn apply_size_cap() -> Result<(), Failure> {
    match std::env::var("PSTLAB_SIZE_CAP") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => {
                set_size_cap(cap);
                Ok(())
            }
            _ => input(format!("PSTLAB_SIZE_CAP must be a positive integer, got '{v}'")),
        },
        Err(_) => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = apply_size_cap().and_then(|()| run(&cli)).and_then(|out| {
        match &cli.out {
            Some(path) => fs::write(path, &out.text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
            None => print!("{}", out.text),
        }
        Ok(out.positive)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
