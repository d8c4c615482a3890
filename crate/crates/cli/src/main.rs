//! `rg-lab`: command-line laboratory for resilience of interest-based
//! social networks.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rglab::experiments::{
    coupling_validity_rate, degree_law_test, dominance_test, gap_test, sweep_experiment, with_workers,
    ExperimentConfig, ExperimentResult, Sweep, DEFAULT_DOMINANCE_SLACK,
};
use rglab::generators::{gen_model_graph_with, LayerMode};
use rglab::rng::trial_rng;
use rglab::theory::{
    alpha_from_edge_prob, alpha_from_params, approx_edge_prob_overlap, check_regime, edge_prob_overlap,
    scaling_diagnostics, solve_critical, Axis, ModelParams,
};
use rglab::LabError;
use serde::Serialize;

use config::{list_values, parse_config, range_values, RunConfig};
use output::{csv_document, exact_fraction, sig9, write_csv_with_manifest, RunManifest};

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        Self::validation(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "rg-lab", version, about = "Resilience laboratory for random intersection graph models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and approximate edge probabilities.
    EdgeProb(EdgeProbArgs),
    /// Scaling-law deviation alpha and the predicted limit probability.
    Predict(PredictArgs),
    /// Critical value of one parameter, all others fixed.
    Critical(CriticalArgs),
    /// Monte-Carlo estimate at one parameter point; writes CSV and manifest.
    Simulate(RunArgs),
    /// Monte-Carlo estimates along one axis; writes CSV and manifest.
    Sweep(SweepArgs),
    /// Statistical checks of the constructions behind the limit law.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Draws one model graph and prints it as an edge list.
    Sample(SampleArgs),
}

#[derive(Args, Clone)]
struct EdgeProbArgs {
    /// Ring size K.
    #[arg(short = 'K', long = "ring-size")]
    ring_size: u64,
    /// Pool size P.
    #[arg(short = 'P', long = "pool-size")]
    pool_size: u64,
    /// Minimum overlap d.
    #[arg(short = 'd', long = "overlap")]
    min_overlap: u64,
    #[arg(short = 'f', long = "friendship", default_value_t = 1.0)]
    friendship: f64,
    #[arg(short = 'g', long = "link-survival", default_value_t = 1.0)]
    link_survival: f64,
}

/// Model parameters; any of them may instead come from `--config`.
#[derive(Args, Clone, Default)]
struct ModelFlags {
    /// Number of nodes.
    #[arg(short = 'n', long = "nodes")]
    n: Option<usize>,
    /// Ring size K.
    #[arg(short = 'K', long = "ring-size")]
    ring_size: Option<u64>,
    /// Pool size P.
    #[arg(short = 'P', long = "pool-size")]
    pool_size: Option<u64>,
    /// Minimum overlap d.
    #[arg(short = 'd', long = "overlap")]
    min_overlap: Option<u64>,
    /// Friendship probability f (default 1).
    #[arg(short = 'f', long = "friendship")]
    friendship: Option<f64>,
    /// Link survival probability g (default 1).
    #[arg(short = 'g', long = "link-survival")]
    link_survival: Option<f64>,
}

impl ModelFlags {
    fn resolve(&self, cfg: &RunConfig) -> CliResult<ModelParams> {
        fn pick<T: Copy>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
            flag.or(file)
                .ok_or_else(|| CliError::validation(format!("missing parameter {name}")))
        }
        let params = ModelParams::new(
            pick(self.n, cfg.n, "-n")?,
            pick(self.ring_size, cfg.ring_size, "-K")?,
            pick(self.pool_size, cfg.pool_size, "-P")?,
            pick(self.min_overlap, cfg.min_overlap, "-d")?,
            self.friendship.or(cfg.friendship).unwrap_or(1.0),
            self.link_survival.or(cfg.link_survival).unwrap_or(1.0),
        )?;
        Ok(params)
    }
}

#[derive(Args, Clone)]
struct PredictArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Number of node failures.
    #[arg(short = 'm', long = "failures", default_value_t = 0)]
    m: u64,
}

#[derive(Args, Clone)]
struct CriticalArgs {
    /// One of g, n, m, K, P, f.
    #[arg(long)]
    axis: String,
    #[command(flatten)]
    model: ModelFlags,
    #[arg(short = 'm', long = "failures", default_value_t = 0)]
    m: u64,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelFlags,
    #[arg(short = 'm', long = "failures")]
    m: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; the manifest is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Swept axis (overrides the config file).
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, conflicts_with = "range")]
    values: Option<String>,
    /// Sweep range as start:stop:step, stop included.
    #[arg(long)]
    range: Option<String>,
}

#[derive(Subcommand, Clone)]
enum VerifyCommand {
    /// Poisson law of the number of degree-h nodes, h = 0..3.
    Degree(VerifyDegreeArgs),
    /// Model k-connectivity against an Erdős–Rényi graph of slightly smaller density.
    Dominance(VerifyDominanceArgs),
    /// Frequency of "minimum degree at least k but not k-connected".
    Gap(VerifyGapArgs),
    /// Validity rate of the binomial-to-uniform ring coupling.
    Coupling(VerifyCouplingArgs),
}

#[derive(Args, Clone)]
struct TrialFlags {
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct VerifyDegreeArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Target edge probability; g is solved so that f g s = t.
    #[arg(short = 't', long = "edge-prob")]
    t: Option<f64>,
    #[command(flatten)]
    trials: TrialFlags,
}

#[derive(Args, Clone)]
struct VerifyDominanceArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(short = 'k', default_value_t = 1)]
    k: u64,
    /// Relative density reduction of the comparison graph.
    #[arg(long, default_value_t = DEFAULT_DOMINANCE_SLACK)]
    slack: f64,
    #[command(flatten)]
    trials: TrialFlags,
}

#[derive(Args, Clone)]
struct VerifyGapArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(short = 'k', default_value_t = 2)]
    k: u64,
    #[command(flatten)]
    trials: TrialFlags,
}

#[derive(Args, Clone)]
struct VerifyCouplingArgs {
    #[arg(short = 'n', long = "nodes")]
    n: usize,
    #[arg(short = 'K', long = "ring-size")]
    ring_size: u64,
    #[arg(short = 'P', long = "pool-size")]
    pool_size: u64,
    #[arg(short = 'd', long = "overlap")]
    min_overlap: u64,
    #[command(flatten)]
    trials: TrialFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Thinned,
    TwoLayer,
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial index; the graph equals trial `index` of a simulation with this seed.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Thinned)]
    mode: ModeArg,
    /// Write the edge list here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn worker_count() -> CliResult<usize> {
    match std::env::var("RG_LAB_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(CliError::validation(format!(
                "RG_LAB_THREADS = {raw:?} must be a positive integer"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!("--- json ---");
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn cmd_edge_prob(a: &EdgeProbArgs) -> CliResult {
    let params = ModelParams::new(2, a.ring_size, a.pool_size, a.min_overlap, a.friendship, a.link_survival)?;
    let s = edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap)?;
    let approx = approx_edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap);
    match exact_fraction(&s.exact) {
        Some(frac) => println!("s exact        = {frac}"),
        None => println!("s exact        = (more than {} digits)", output::MAX_EXACT_DIGITS),
    }
    println!("s              = {}", sig9(s.value));
    println!("t              = {}", sig9(params.link_prob() * s.value));
    println!("approx s       = {}", sig9(approx));
    let rel = if s.value > 0.0 { (approx - s.value).abs() / s.value } else { f64::NAN };
    println!("relative error = {}", sig9(rel));
    Ok(())
}

fn print_regime_warnings(params: &ModelParams) {
    for check in check_regime(params).iter().filter(|c| !c.passed) {
        eprintln!(
            "warning: regime check `{}` fails: value {}, threshold {}",
            check.condition,
            sig9(check.value),
            sig9(check.threshold)
        );
    }
}

fn cmd_predict(a: &PredictArgs) -> CliResult {
    let params = a.model.resolve(&RunConfig::default())?;
    let diag = scaling_diagnostics(&params, a.m)?;
    println!("s          = {}", sig9(diag.s));
    println!("t          = {}", sig9(diag.t));
    println!("alpha      = {}", sig9(diag.alpha));
    println!("m          = {}", diag.m);
    println!("prediction = {}", sig9(diag.predicted_limit));
    print_regime_warnings(&params);
    Ok(())
}

/// `α` at the critical value, when that value lies in the parameter domain
/// (or, for `g` and `f`, by plugging in the unclamped value).
fn alpha_at_critical(axis: Axis, params: &ModelParams, m: u64, value: f64) -> Option<f64> {
    match axis {
        Axis::G | Axis::F => {
            let s = edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap).ok()?;
            let other = if axis == Axis::G { params.friendship } else { params.link_survival };
            alpha_from_edge_prob(params.n, value * other * s.value, m).ok()
        }
        _ => {
            let (p, mm) = rglab::experiments::apply_axis(params, m, axis, value).ok()?;
            alpha_from_params(&p, mm).ok()
        }
    }
}

fn cmd_critical(a: &CriticalArgs) -> CliResult {
    let axis: Axis = a.axis.parse()?;
    // The solved parameter is not needed as input; a placeholder inside its
    // domain keeps validation happy.
    let mut flags = a.model.clone();
    match axis {
        Axis::N => flags.n = flags.n.or(Some(3)),
        Axis::K => flags.ring_size = flags.ring_size.or(flags.min_overlap),
        Axis::P => flags.pool_size = flags.pool_size.or(flags.ring_size),
        _ => {}
    }
    let params = flags.resolve(&RunConfig::default())?;
    let crit = solve_critical(axis, &params, a.m)?;
    println!("axis     = {axis}");
    println!("value    = {}", sig9(crit.value));
    println!("status   = {}", if crit.feasible { "feasible" } else { "INFEASIBLE" });
    println!("boundary = {}", if crit.boundary_hit { "yes" } else { "no" });
    match alpha_at_critical(axis, &params, a.m, crit.value) {
        Some(alpha) => println!("alpha    = {}", sig9(alpha)),
        None => println!("alpha    = n/a"),
    }
    Ok(())
}

fn experiment_config(run: &RunArgs, cfg: &RunConfig) -> CliResult<ExperimentConfig> {
    Ok(ExperimentConfig {
        params: run.model.resolve(cfg)?,
        m: run.m.or(cfg.m).unwrap_or(0),
        trials: run.trials.or(cfg.trials).unwrap_or(100),
        base_seed: run.seed.or(cfg.seed).unwrap_or(0),
        sweep: None,
    })
}

fn print_rows(rows: &[ExperimentResult]) {
    println!(
        "{:>12} {:>8} {:>10} {:>12} {:>12} {:>12}",
        "value", "trials", "successes", "empirical", "alpha", "predicted"
    );
    for r in rows {
        println!(
            "{:>12} {:>8} {:>10} {:>12} {:>12} {:>12}",
            r.sweep_value.map(sig9).unwrap_or_else(|| "-".into()),
            r.trials,
            r.successes,
            sig9(r.empirical_prob),
            r.alpha.map(sig9).unwrap_or_else(|| "-".into()),
            r.predicted_limit.map(sig9).unwrap_or_else(|| "-".into()),
        );
    }
}

fn run_and_write(command: &str, cfg: ExperimentConfig, out: &Path, workers: usize) -> CliResult {
    cfg.validate()?;
    let started_at = chrono::Utc::now().to_rfc3339();
    let rows = with_workers(workers, || sweep_experiment(&cfg))?;
    let finished_at = chrono::Utc::now().to_rfc3339();
    let manifest = RunManifest {
        tool: "rg-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_owned(),
        config: &cfg,
        base_seed: cfg.base_seed,
        workers,
        started_at,
        finished_at,
        outputs: Vec::new(),
    };
    let manifest_path =
        write_csv_with_manifest(out, &csv_document(&rows), manifest).map_err(|e| CliError::io(out, e))?;
    print_rows(&rows);
    println!("csv      = {}", out.display());
    println!("manifest = {}", manifest_path.display());
    print_json(&rows);
    Ok(())
}

fn cmd_simulate(a: &RunArgs, workers: usize) -> CliResult {
    let file = load_config(a.config.as_deref())?;
    if file.sweep.is_some() {
        return Err(CliError::validation(
            "the config file has a [sweep] section; use `rg-lab sweep` for it",
        ));
    }
    let cfg = experiment_config(a, &file)?;
    run_and_write("simulate", cfg, &a.out, workers)
}

fn cmd_sweep(a: &SweepArgs, workers: usize) -> CliResult {
    let file = load_config(a.run.config.as_deref())?;
    let mut cfg = experiment_config(&a.run, &file)?;
    let axis = match (&a.axis, &file.sweep) {
        (Some(name), _) => name.parse::<Axis>()?,
        (None, Some(s)) => s.axis,
        (None, None) => return Err(CliError::validation("sweep needs --axis or a [sweep] section")),
    };
    let values = match (&a.values, &a.range, &file.sweep) {
        (Some(list), _, _) => list_values(list).map_err(CliError::validation)?,
        (None, Some(range), _) => {
            let parts: Vec<f64> = range
                .split(':')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::validation(format!("--range `{range}` must be start:stop:step")))?;
            let [start, stop, step] = parts[..] else {
                return Err(CliError::validation(format!("--range `{range}` must be start:stop:step")));
            };
            range_values(start, stop, step).map_err(CliError::validation)?
        }
        (None, None, Some(s)) => s.values.clone(),
        (None, None, None) => return Err(CliError::validation("sweep needs --values, --range or a [sweep] section")),
    };
    cfg.sweep = Some(Sweep { axis, values });
    run_and_write("sweep", cfg, &a.run.out, workers)
}

fn cmd_verify(v: &VerifyCommand, workers: usize) -> CliResult {
    match v {
        VerifyCommand::Degree(a) => {
            let mut params = a.model.resolve(&RunConfig::default())?;
            if let Some(t) = a.t {
                let s = edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap)?.value;
                let reach = params.friendship * s;
                let g = if t == 0.0 { 0.0 } else { t / reach };
                if !(t >= 0.0 && g <= 1.0) {
                    return Err(CliError::validation(format!(
                        "t = {t} is not reachable: f * s = {} bounds it",
                        sig9(reach)
                    )));
                }
                params.link_survival = g;
            }
            let report = with_workers(workers, || degree_law_test(&params, a.trials.trials, a.trials.seed))?;
            println!("n = {}, t = {}, trials = {}", report.n, sig9(report.t), report.trials);
            if let Some(guard) = &report.regime_guard {
                println!("regime guard: {guard}");
            }
            print_regime_warnings(&params);
            println!(
                "{:>2} {:>12} {:>12} {:>12} {:>10} {:>10} {:>4} {:>10}",
                "h", "lambda", "mean", "variance", "tv", "chi2", "dof", "p"
            );
            for r in &report.rows {
                let o = |x: Option<f64>| x.map(sig9).unwrap_or_else(|| "-".into());
                println!(
                    "{:>2} {:>12} {:>12} {:>12} {:>10} {:>10} {:>4} {:>10}",
                    r.h,
                    sig9(r.lambda),
                    sig9(r.empirical_mean),
                    sig9(r.empirical_var),
                    sig9(r.tv_distance),
                    o(r.chi_square),
                    r.chi_square_dof.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                    o(r.p_value),
                );
            }
            print_json(&report);
        }
        VerifyCommand::Dominance(a) => {
            let params = a.model.resolve(&RunConfig::default())?;
            let r = with_workers(workers, || {
                dominance_test(&params, a.trials.trials, a.k, a.slack, a.trials.seed)
            })?;
            println!("k = {}, t = {}, z = {}", r.k, sig9(r.t), sig9(r.z));
            println!("model k-connected: {}/{} = {}", r.model_successes, r.trials, sig9(r.model_prob));
            println!("ER k-connected:    {}/{} = {}", r.er_successes, r.trials, sig9(r.er_prob));
            println!("difference = {}, allowance = {}", sig9(r.difference), sig9(r.allowance));
            println!("dominance {}", if r.holds { "holds" } else { "VIOLATED" });
            print_json(&r);
        }
        VerifyCommand::Gap(a) => {
            let params = a.model.resolve(&RunConfig::default())?;
            let r = with_workers(workers, || gap_test(&params, a.trials.trials, a.k, a.trials.seed))?;
            println!(
                "gap events (min degree >= {} but not {}-connected): {}/{} = {}",
                r.k,
                r.k,
                r.events,
                r.trials,
                sig9(r.frequency)
            );
            println!("95% interval = [{}, {}]", sig9(r.ci.0), sig9(r.ci.1));
            print_json(&r);
        }
        VerifyCommand::Coupling(a) => {
            let r = with_workers(workers, || {
                coupling_validity_rate(
                    a.n,
                    a.ring_size,
                    a.pool_size,
                    a.min_overlap,
                    a.trials.trials,
                    a.trials.seed,
                )
            })?;
            println!(
                "x = {}, ring bound = {}, admissible = {}",
                sig9(r.threshold.x),
                sig9(r.threshold.ring_bound),
                r.threshold.admissible
            );
            println!("validity rate = {}/{} = {}", r.valid, r.trials, sig9(r.rate));
            println!("containment violations = {}", r.containment_violations);
            print_json(&r);
            if r.containment_violations > 0 {
                return Err(CliError {
                    code: EXIT_INVARIANT,
                    message: format!(
                        "{} valid trials broke edge containment",
                        r.containment_violations
                    ),
                });
            }
        }
    }
    Ok(())
}

fn cmd_sample(a: &SampleArgs) -> CliResult {
    let params = a.model.resolve(&RunConfig::default())?;
    let mode = match a.mode {
        ModeArg::Thinned => LayerMode::Thinned,
        ModeArg::TwoLayer => LayerMode::TwoLayer,
    };
    let g = gen_model_graph_with(&params, mode, &mut trial_rng(a.seed, a.index))?;
    let text = g.to_edge_list();
    match &a.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::EdgeProb(a) => cmd_edge_prob(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Simulate(a) => cmd_simulate(a, worker_count()?),
        Command::Sweep(a) => cmd_sweep(a, worker_count()?),
        Command::Verify(v) => cmd_verify(v, worker_count()?),
        Command::Sample(a) => cmd_sample(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
