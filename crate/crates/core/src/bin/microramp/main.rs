//! Command-line front end: validation, capability, scheduling and sweeps.
//!
//! Exit codes: 0 success, 1 model infeasible, 2 invalid input or flags,
//! 3 solver failure or limit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use microramp::io::{self as files, DocumentError};
use microramp::{
    analysis, bundled, AnalysisConfig, AnalysisError, FeederContext, FormulationError, FormulationOptions,
    MicrogridInstance, RampDirection, RampTarget,
};
use microramp_milp::{backend_by_name, default_backend, write_lp};

#[derive(Parser)]
#[command(name = "microramp", version, about = "Microgrid ramping capability and ramp-constrained scheduling")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Independent MILPs solved at once.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    /// MILP backend; defaults to $MICRORAMP_BACKEND, then the built-in one.
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Stop each MILP after this many branch-and-bound nodes.
    #[arg(long, global = true)]
    node_limit: Option<usize>,
    /// Stop each MILP after this many seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Require every storage unit to end the day with at least its initial energy.
    #[arg(long, global = true)]
    terminal_energy: bool,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance (and optionally a feeder file) and print the report.
    Validate {
        instance: Option<PathBuf>,
        #[arg(long)]
        feeder: Option<PathBuf>,
    },
    /// Ramping capability, once or across a range of transfer limits.
    Capability {
        instance: Option<PathBuf>,
        /// Override the transfer limit (MW).
        #[arg(long, conflicts_with = "sweep", allow_negative_numbers = true)]
        line_cap: Option<f64>,
        /// Transfer limits lo:hi:step (MW, inclusive).
        #[arg(long)]
        sweep: Option<Range>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cheapest schedule that keeps the feeder ramp within the target.
    Schedule {
        instance: Option<PathBuf>,
        #[command(flatten)]
        ramp: RampArgs,
        /// Utility ramp target (MW per period); defaults to the feeder file's.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the utility net-load profile.
        #[arg(long)]
        utility_out: Option<PathBuf>,
    },
    /// Operating cost across utility ramp targets.
    SweepRamp {
        instance: Option<PathBuf>,
        #[command(flatten)]
        ramp: RampArgs,
        /// Comma-separated ramp targets, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the cost or ramp model in LP format.
    DumpLp {
        instance: Option<PathBuf>,
        /// `cost`, `up:T` or `down:T`.
        #[arg(long, default_value = "cost")]
        objective: Objective,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RampArgs {
    /// Feeder file; the bundled feeder when omitted.
    #[arg(long)]
    feeder: Option<PathBuf>,
    /// Exchange change the microgrid can guarantee (MW), or `auto` to compute it.
    #[arg(long, default_value = "auto")]
    ramp_cap: RampCap,
}

#[derive(Clone, Copy)]
enum RampCap {
    Auto,
    Fixed(f64),
}

impl FromStr for RampCap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(RampCap::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(RampCap::Fixed(v)),
            _ => Err(format!("expected `auto` or a non-negative number, got `{s}`")),
        }
    }
}

#[derive(Clone)]
struct Range(Vec<f64>);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad range `{s}`: {e}"))?;
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected lo:hi:step, got `{s}`"));
        };
        if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(format!("range `{s}` needs lo <= hi and a positive step"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok(Range((0..count).map(|i| lo + i as f64 * step).collect()))
    }
}

#[derive(Clone, Copy)]
enum Objective {
    Cost,
    Ramp(usize, RampDirection),
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "cost" {
            return Ok(Objective::Cost);
        }
        let parsed = s.split_once(':').and_then(|(d, t)| {
            let direction = match d {
                "up" => RampDirection::Up,
                "down" => RampDirection::Down,
                _ => return None,
            };
            t.parse().ok().map(|t| Objective::Ramp(t, direction))
        });
        parsed.ok_or_else(|| format!("expected `cost`, `up:T` or `down:T`, got `{s}`"))
    }
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match &e {
            e if e.is_infeasible() => 1,
            AnalysisError::SolverLimit { .. } | AnalysisError::Solver(_) | AnalysisError::Certification(_) => 3,
            _ => 2,
        };
        Failure { code, error: e.into() }
    }
}

impl From<FormulationError> for Failure {
    fn from(e: FormulationError) -> Self {
        AnalysisError::from(e).into()
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::invalid(e)
    }
}

/// Write failures are reported like unreadable input.
impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

type Outcome = Result<(), Failure>;

fn load_instance(path: Option<&Path>) -> Result<MicrogridInstance, Failure> {
    match path {
        Some(p) => Ok(files::load_instance(p)?),
        None => Ok(bundled::instance()),
    }
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> csv::Result<()>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write(&mut out).with_context(|| format!("cannot write {}", path.display()))?;
    out.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn config(global: &Global) -> Result<AnalysisConfig, Failure> {
    let backend = match &global.backend {
        Some(name) => backend_by_name(name),
        None => default_backend(),
    }
    .map_err(Failure::invalid)?;
    let mut solve = AnalysisConfig::default().solve;
    solve.node_limit = global.node_limit;
    if let Some(secs) = global.time_limit {
        let limit = Duration::try_from_secs_f64(secs)
            .map_err(|_| Failure::invalid(anyhow::anyhow!("--time-limit must be a non-negative number of seconds")))?;
        solve.time_limit = Some(limit);
    }
    Ok(AnalysisConfig {
        solve,
        workers: global.workers as usize,
        formulation: FormulationOptions {
            terminal_soc_at_least_initial: global.terminal_energy,
        },
        backend: Arc::from(backend),
    })
}

fn resolve_capability(
    cap: RampCap,
    instance: &MicrogridInstance,
    config: &AnalysisConfig,
) -> Result<f64, Failure> {
    match cap {
        RampCap::Fixed(r) => Ok(r),
        RampCap::Auto => {
            let r = analysis::ramping_capability(instance, config)?;
            println!("ramping capability: {} MW (period {})", files::format_number(r.capability), r.argmin_period);
            Ok(r.capability)
        }
    }
}

fn print_report(what: &str, report: &microramp::ValidationReport) {
    if report.violations.is_empty() && report.warnings.is_empty() {
        println!("{what}: valid");
    } else {
        print!("{what}:\n{report}");
    }
}

fn validate(instance: Option<&Path>, feeder: Option<&Path>) -> Outcome {
    let inst = load_instance(instance)?;
    let report = microramp::validate_instance(&inst);
    print_report("instance", &report);
    let mut ok = report.is_valid();
    if let Some(path) = feeder {
        let f = files::load_feeder(path)?;
        let report = microramp::validate_feeder(&f, inst.periods());
        print_report("feeder", &report);
        ok &= report.is_valid();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::invalid(anyhow::anyhow!("validation failed")))
    }
}

fn capability(
    config: &AnalysisConfig,
    instance: Option<&Path>,
    line_cap: Option<f64>,
    sweep: Option<&Range>,
    output: Option<&Path>,
) -> Outcome {
    let mut inst = load_instance(instance)?;
    if let Some(limits) = sweep {
        let s = analysis::capability_vs_line_capacity(&inst, &limits.0, config)?;
        println!("transfer_limit capability cost");
        for (r, c) in s.capability.points.iter().zip(&s.cost.points) {
            let show = |p: &analysis::SweepPoint| p.value.map(files::format_number).unwrap_or(p.status.as_str().into());
            println!("{} {} {}", files::format_number(r.parameter), show(r), show(c));
        }
        if let Some(path) = output {
            write_file(path, |w| files::write_line_capacity_sweep(w, &s))?;
        }
        return Ok(());
    }
    if let Some(limit) = line_cap {
        if !(limit >= 0.0 && limit.is_finite()) {
            return Err(Failure::invalid(anyhow::anyhow!("--line-cap must be a non-negative number, got {limit}")));
        }
        inst = inst.with_transfer_limit(limit);
    }
    let r = analysis::ramping_capability(&inst, config)?;
    println!("ramping capability: {} MW (period {})", files::format_number(r.capability), r.argmin_period);
    if let Some(path) = output {
        write_file(path, |w| files::write_capability(w, &r))?;
    }
    Ok(())
}

fn load_feeder(path: Option<&Path>, delta: Option<f64>) -> Result<FeederContext, Failure> {
    let mut feeder = match path {
        Some(path) => files::load_feeder(path)?,
        None => microramp::bundled::feeder(),
    };
    if let Some(d) = delta {
        feeder.ramp_target = RampTarget::Uniform(d);
    }
    Ok(feeder)
}

fn schedule(
    config: &AnalysisConfig,
    instance: Option<&Path>,
    ramp: &RampArgs,
    delta: Option<f64>,
    output: Option<&Path>,
    utility_out: Option<&Path>,
) -> Outcome {
    let inst = load_instance(instance)?;
    let feeder = load_feeder(ramp.feeder.as_deref(), delta)?;
    let report = microramp::validate_feeder(&feeder, inst.periods());
    if !report.is_valid() {
        return Err(AnalysisError::InvalidInput(report).into());
    }
    let cap = resolve_capability(ramp.ramp_cap, &inst, config)?;
    let out = analysis::optimal_schedule(&inst, &feeder, cap, config)?;
    let c = &out.schedule.cost;
    println!("operating cost: {}", files::format_number(out.cost));
    println!(
        "  generation {}  startup/shutdown {}  energy purchase {}",
        files::format_number(c.generation),
        files::format_number(c.startup_shutdown),
        files::format_number(c.energy_purchase)
    );
    println!("largest utility ramp: {}", files::format_number(out.utility.max_abs_ramp()));
    if let Some(path) = output {
        write_file(path, |w| files::write_schedule(w, &out.schedule))?;
    }
    if let Some(path) = utility_out {
        write_file(path, |w| files::write_utility_profile(w, &out.schedule, &feeder, &out.utility))?;
    }
    Ok(())
}

fn sweep_ramp(
    config: &AnalysisConfig,
    instance: Option<&Path>,
    ramp: &RampArgs,
    deltas: &[f64],
    output: Option<&Path>,
) -> Outcome {
    let inst = load_instance(instance)?;
    let feeder = load_feeder(ramp.feeder.as_deref(), None)?;
    if !deltas.windows(2).all(|w| w[0] < w[1]) || deltas.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(AnalysisError::InvalidSweep.into());
    }
    let cap = resolve_capability(ramp.ramp_cap, &inst, config)?;
    let curve = analysis::cost_vs_ramp_limit(&inst, &feeder, cap, deltas, config)?;
    println!("delta cost status");
    for p in &curve.points {
        let value = p.value.map(files::format_number).unwrap_or_default();
        println!("{} {} {}", files::format_number(p.parameter), value, p.status.as_str());
    }
    if let Some(path) = output {
        write_file(path, |w| files::write_curve(w, &curve))?;
    }
    if curve.points.iter().any(|p| p.value.is_some()) {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            error: anyhow::anyhow!("no ramp target could be met"),
        })
    }
}

fn dump_lp(config: &AnalysisConfig, instance: Option<&Path>, objective: Objective, output: Option<&Path>) -> Outcome {
    let inst = load_instance(instance)?;
    let mut f = microramp::base_formulation(&inst, &config.formulation)?;
    match objective {
        Objective::Cost => f.set_cost_objective(&inst),
        Objective::Ramp(t, direction) => f.set_ramp_objective(t, direction)?,
    }
    let text = write_lp(f.model());
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(anyhow::Error::from(e).into());
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let config = config(&cli.global)?;
    match &cli.command {
        Command::Validate { instance, feeder } => validate(instance.as_deref(), feeder.as_deref()),
        Command::Capability {
            instance,
            line_cap,
            sweep,
            output,
        } => capability(&config, instance.as_deref(), *line_cap, sweep.as_ref(), output.as_deref()),
        Command::Schedule {
            instance,
            ramp,
            delta,
            output,
            utility_out,
        } => schedule(&config, instance.as_deref(), ramp, *delta, output.as_deref(), utility_out.as_deref()),
        Command::SweepRamp {
            instance,
            ramp,
            deltas,
            output,
        } => sweep_ramp(&config, instance.as_deref(), ramp, deltas, output.as_deref()),
        Command::DumpLp {
            instance,
            objective,
            output,
        } => dump_lp(&config, instance.as_deref(), *objective, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
