use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lwdp_core::assignment::count_c4_instances;
use lwdp_core::budget::PrivacyBudget;
use lwdp_core::error::{Error, Result};
use lwdp_core::estimators::EstimatorKind;
use lwdp_core::experiments::{
    default_lambda, generate_milan_like, generate_synthetic, read_edge_list, run_sweep,
    write_edge_list, EdgeList, ExperimentConfig, Method, SweepAxis,
};
use lwdp_core::mechanisms::RandomSource;
use lwdp_core::protocol::{
    self, node_view, release_weights, Mechanism, ProtocolContext, RunReport,
};
use lwdp_core::sensitivity::{
    local_sensitivity, smooth_sensitivity, smooth_sensitivity_bruteforce, DEFAULT_RADIUS,
};

/// `println!` into the output buffer.
macro_rules! out {
    ($buf:expr, $($arg:tt)*) => {{
        $buf.push_str(&format!($($arg)*));
        $buf.push('\n');
    }};
}

#[derive(Parser)]
#[command(
    name = "lwdp",
    version,
    about = "Private below-threshold triangle counting on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy triangle-to-node assignment.
    Assign(AssignArgs),
    /// Local, global and smooth sensitivity of one node's count.
    Sensitivity(SensitivityArgs),
    /// Two-step private count.
    Count(CountArgs),
    /// One-round count: full budget on the weights, count the noisy graph.
    Baseline(BaselineArgs),
    /// Error sweep over ε, λ or subgraph size, written as CSV.
    Experiment(ExperimentArgs),
    /// Write a random graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct AssignArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Print summary statistics instead of the per-triangle listing.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Biased,
    Unbiased,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Global,
    Smooth,
}

impl From<MechanismArg> for Mechanism {
    fn from(m: MechanismArg) -> Self {
        match m {
            MechanismArg::Global => Mechanism::GlobalLaplace,
            MechanismArg::Smooth => Mechanism::SmoothSensitivity,
        }
    }
}

fn estimator(arg: EstimatorArg, eps1: f64) -> Result<EstimatorKind> {
    match arg {
        EstimatorArg::Biased => Ok(EstimatorKind::Biased),
        EstimatorArg::Unbiased => EstimatorKind::unbiased_for_epsilon(eps1),
    }
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Node id as written in the edge list.
    #[arg(long)]
    node: i64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    /// Threshold; defaults to the 90th percentile of triangle weights.
    #[arg(long)]
    lambda: Option<i64>,
    /// Step-1 budget used to draw the received noisy weights (and p).
    #[arg(long, default_value_t = 1.0)]
    eps1: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the exhaustive oracle (degree at most 12).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lambda: Option<i64>,
    /// Total budget, split evenly unless --eps1 and --eps2 are given.
    #[arg(long, default_value_t = 2.0)]
    eps: f64,
    #[arg(long, requires = "eps2")]
    eps1: Option<f64>,
    #[arg(long, requires = "eps1")]
    eps2: Option<f64>,
    #[arg(long, value_enum, default_value = "unbiased")]
    estimator: EstimatorArg,
    #[arg(long, value_enum, default_value = "smooth")]
    mechanism: MechanismArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lambda: Option<i64>,
    #[arg(long, default_value_t = 2.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    sweep: String,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Comma-separated methods; all five by default.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed threshold for ε and size sweeps.
    #[arg(long)]
    lambda: Option<i64>,
    /// Fixed total budget for λ and size sweeps.
    #[arg(long, default_value_t = 2.0)]
    eps: f64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    min_weight: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    max_weight: i64,
    /// Mostly-zero telecom-like weights instead of the uniform range.
    #[arg(long, conflicts_with_all = ["min_weight", "max_weight"])]
    milan_like: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn resolve_lambda(el: &EdgeList, lambda: Option<i64>) -> Result<i64> {
    match lambda {
        Some(l) => Ok(l),
        None => default_lambda(&el.graph)
            .ok_or_else(|| Error::Config("graph has no triangles; pass --lambda".into())),
    }
}

fn assign(args: AssignArgs, buf: &mut String) -> Result<()> {
    let el = read_edge_list(&args.graph)?;
    let ctx = ProtocolContext::new(&el.graph);
    let a = ctx.assignment();
    if args.stats {
        out!(buf, "triangles: {}", ctx.triangles().len());
        out!(buf, "squared load: {}", a.squared_load());
        out!(buf, "c4 instances: {}", count_c4_instances(a));
        out!(buf, "load histogram:");
        for (load, nodes) in a
            .load_histogram()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
        {
            out!(buf, "  {load}\t{nodes}");
        }
    } else {
        out!(buf, "a\tb\tc\tresponsible");
        for (t, tri) in ctx.triangles().iter().enumerate() {
            let [x, y, z] = tri.nodes.map(|v| el.labels[v]);
            out!(buf, "{x}\t{y}\t{z}\t{}", el.labels[a.responsible(t)]);
        }
    }
    Ok(())
}

fn sensitivity(args: SensitivityArgs, buf: &mut String) -> Result<()> {
    let el = read_edge_list(&args.graph)?;
    let v = el
        .labels
        .binary_search(&args.node)
        .map_err(|_| Error::Config(format!("node {} not in graph", args.node)))?;
    let lambda = resolve_lambda(&el, args.lambda)?;
    let kind = estimator(args.estimator, args.eps1)?;
    let ctx = ProtocolContext::new(&el.graph);
    let release = release_weights(&el.graph, args.eps1, &RandomSource::new(args.seed))?;
    let inst = node_view(&ctx, &release, v, lambda, args.beta, kind)?;
    out!(
        buf,
        "node: {} (degree {}, {} assigned triangles)",
        args.node,
        inst.degree(),
        inst.triangles().len()
    );
    out!(buf, "lambda: {lambda}");
    out!(buf, "local: {}", local_sensitivity(&inst));
    out!(buf, "global: {}", inst.global_sensitivity());
    out!(buf, "smooth: {}", smooth_sensitivity(&inst));
    if args.oracle {
        out!(
            buf,
            "oracle: {}",
            smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS)?
        );
    }
    Ok(())
}

fn print_run(buf: &mut String, trial: usize, run: &RunReport) {
    let rel = run
        .relative_error()
        .map_or("NA".to_string(), |e| e.to_string());
    out!(buf, "{trial}\t{}\t{}\t{rel}", run.estimate, run.exact);
}

fn print_tallies(buf: &mut String, run: &RunReport) {
    let m = protocol::communication_report(run);
    out!(
        buf,
        "messages per run: weight uploads {}, downloads {}, count uploads {}",
        m.weight_uploads,
        m.downloads,
        m.count_uploads
    );
}

fn run_trials(
    buf: &mut String,
    trials: usize,
    seed: u64,
    mut once: impl FnMut(&RandomSource) -> Result<RunReport>,
) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    out!(buf, "trial\testimate\texact\trelative_error");
    let mut last = None;
    for trial in 0..trials {
        let run = once(&RandomSource::new(seed.wrapping_add(trial as u64)))?;
        print_run(buf, trial, &run);
        last = Some(run);
    }
    print_tallies(buf, &last.expect("at least one trial"));
    Ok(())
}

fn count(args: CountArgs, buf: &mut String) -> Result<()> {
    let el = read_edge_list(&args.graph)?;
    let lambda = resolve_lambda(&el, args.lambda)?;
    let budget = match (args.eps1, args.eps2) {
        (Some(e1), Some(e2)) => PrivacyBudget::from_parts(e1, e2)?,
        _ => PrivacyBudget::even(args.eps)?,
    };
    let kind = estimator(args.estimator, budget.eps1())?;
    let ctx = ProtocolContext::new(&el.graph);
    out!(
        buf,
        "lambda: {lambda}, eps1: {}, eps2: {}, estimator: {}, mechanism: {}",
        budget.eps1(),
        budget.eps2(),
        kind.name(),
        Mechanism::from(args.mechanism).name()
    );
    run_trials(buf, args.trials, args.seed, |rng| {
        protocol::run_two_step_in(&ctx, lambda, budget, kind, args.mechanism.into(), rng)
    })
}

fn baseline(args: BaselineArgs, buf: &mut String) -> Result<()> {
    let el = read_edge_list(&args.graph)?;
    let lambda = resolve_lambda(&el, args.lambda)?;
    let ctx = ProtocolContext::new(&el.graph);
    out!(buf, "lambda: {lambda}, eps: {}", args.eps);
    run_trials(buf, args.trials, args.seed, |rng| {
        protocol::run_baseline_in(&ctx, lambda, args.eps, rng)
    })
}

fn experiment(args: ExperimentArgs, buf: &mut String) -> Result<()> {
    let el = read_edge_list(&args.graph)?;
    let axis: SweepAxis = args.sweep.parse()?;
    let mut cfg = ExperimentConfig::new(axis, args.values);
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.lambda = args.lambda;
    cfg.epsilon = args.eps;
    if !args.methods.is_empty() {
        cfg.methods = args
            .methods
            .iter()
            .map(|m| m.parse())
            .collect::<Result<Vec<Method>>>()?;
    }
    let csv = run_sweep(&cfg, &el.graph)?.to_csv();
    match args.out {
        Some(path) => {
            fs::write(&path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => {
            buf.push_str(&csv);
            Ok(())
        }
    }
}

fn generate(args: GenerateArgs, _: &mut String) -> Result<()> {
    let g = if args.milan_like {
        generate_milan_like(args.nodes, args.density, args.seed)?
    } else {
        generate_synthetic(
            args.nodes,
            args.density,
            (args.min_weight, args.max_weight),
            args.seed,
        )?
    };
    write_edge_list(&g, &args.out)
}

fn main() -> ExitCode {
    let mut buf = String::new();
    let result = match Cli::parse().command {
        Command::Assign(a) => assign(a, &mut buf),
        Command::Sensitivity(a) => sensitivity(a, &mut buf),
        Command::Count(a) => count(a, &mut buf),
        Command::Baseline(a) => baseline(a, &mut buf),
        Command::Experiment(a) => experiment(a, &mut buf),
        Command::Generate(a) => generate(a, &mut buf),
    };
    // a reader that hung up early (`| head`) is not an error
    match io::stdout().lock().write_all(buf.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
        _ => {}
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
