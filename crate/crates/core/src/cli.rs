//! The `hawkes-smc` command line.
//!
//! A `--config FILE` of `key=value` lines is expanded into `--key value`
//! flags placed before the ones given on the command line, so explicit flags
//! win. Boolean keys take `true` or `false`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io;
use crate::model::{CountData, EventHistory, HawkesParams, KernelFamily};
use crate::pmmh::{self, ChainOutput, FullLikelihood, PmmhConfig};
use crate::rng::{self, tag};
use crate::simulator::{self, SimConfig};
use crate::smc::{self, SmcConfig};

const THREADS_ENV: &str = "HAWKES_SMC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hawkes-smc", version, about = "Hawkes process inference from interval counts")]
#[command(args_override_self = true)]
struct Cli {
    /// key=value file whose entries act as default flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a path on (0, horizon] and write its event times.
    Simulate(SimulateArgs),
    /// Count the events of a path in the intervals of a grid.
    Discretize(DiscretizeArgs),
    /// Particle-filter estimate of the log-likelihood of interval counts.
    Loglik(LoglikArgs),
    /// Brute-force Monte Carlo probability of exact interval counts.
    Oracle(OracleArgs),
    /// Fit a model to interval counts (or event times) by PMMH.
    Fit(FitArgs),
    /// Summarize an existing chain CSV.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    #[arg(long, default_value = "exp")]
    kernel: KernelFamily,
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    eta: f64,
    /// Shape, gamma and Weibull kernels only.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<HawkesParams> {
        let kernel = crate::model::ExcitationKernel::new(self.kernel, self.eta, self.alpha, self.beta)?;
        HawkesParams::new(self.nu, kernel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FastPath {
    /// Excitation-state recursion for the exponential kernel.
    Auto,
    On,
    /// Always carry full event histories.
    Off,
}

#[derive(Debug, Clone, Args)]
struct SmcArgs {
    /// Number of particles.
    #[arg(long = "J", visible_alias = "particles", default_value_t = smc::DEFAULT_PARTICLES)]
    particles: usize,
    #[arg(long, value_enum, default_value = "auto")]
    fast_path: FastPath,
}

impl SmcArgs {
    fn config(&self, family: KernelFamily, seed: u64) -> Result<SmcConfig> {
        let fast = match self.fast_path {
            FastPath::Auto => true,
            FastPath::Off => false,
            FastPath::On if family == KernelFamily::Exponential => true,
            FastPath::On => {
                return Err(Error::Config(format!(
                    "--fast-path on requires the exponential kernel, got {family}"
                )))
            }
        };
        Ok(SmcConfig::new(self.particles, seed)?.with_fast_path(fast))
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = simulator::DEFAULT_EVENT_CAP)]
    max_events: usize,
    /// Events CSV (stdout if absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Regular grid step; needs `--end`.
    #[arg(long, requires = "end", conflicts_with = "grid")]
    step: Option<f64>,
    #[arg(long)]
    end: Option<f64>,
    /// Explicit comma-separated grid starting at 0.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

impl GridArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        match (&self.grid, self.step, self.end) {
            (Some(g), _, _) => {
                crate::model::validate_grid(g)?;
                Ok(g.clone())
            }
            (None, Some(step), Some(end)) => simulator::regular_grid(step, end),
            _ => Err(Error::Config("give either --grid or --step with --end".into())),
        }
    }
}

#[derive(Debug, Args)]
struct DiscretizeArgs {
    #[arg(long)]
    events: PathBuf,
    /// Observation horizon of the path (defaults to the grid end).
    #[arg(long)]
    horizon: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LoglikArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    counts: PathBuf,
    #[command(flatten)]
    smc: SmcArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent replicate estimates, one per line.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Keep runs of zero-count intervals instead of merging them.
    #[arg(long)]
    no_collapse: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Target counts CSV.
    #[arg(long)]
    counts: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    sims: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long, default_value = "exp")]
    kernel: KernelFamily,
    /// Interval counts CSV.
    #[arg(long, conflicts_with = "events", required_unless_present = "events")]
    counts: Option<PathBuf>,
    /// Event times CSV; fits the exact continuous-time likelihood.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Observation horizon for `--events` (defaults to the last event).
    #[arg(long, requires = "events")]
    horizon: Option<f64>,
    #[command(flatten)]
    smc: SmcArgs,
    #[arg(long, default_value_t = pmmh::DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = pmmh::DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Random-walk step on the transformed scale.
    #[arg(long, default_value_t = pmmh::DEFAULT_STEP_SIGMA)]
    sigma: f64,
    /// Starting point `nu,eta[,alpha],beta` (random if absent).
    #[arg(long, value_delimiter = ',')]
    init: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_collapse: bool,
    #[arg(long)]
    chain_out: Option<PathBuf>,
    #[arg(long)]
    summary_out: Option<PathBuf>,
    /// Simulated predictive paths from post-burn-in draws.
    #[arg(long, requires = "predictive_out", requires = "counts")]
    predictive: Option<usize>,
    /// CSV `t,observed,lower,median,upper` of cumulative counts.
    #[arg(long)]
    predictive_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    #[arg(long)]
    chain: PathBuf,
    /// Needed to tell gamma from Weibull chains.
    #[arg(long, default_value = "exp")]
    kernel: KernelFamily,
    #[arg(long, default_value_t = pmmh::DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

/// Runs the CLI with process stdout/stderr and returns the exit status.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run_cli`] but writing to the given streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Splices `--config` entries in right after the subcommand name.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = argv.iter().position(|a| a == "--config");
    let eq = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| s.starts_with("--config=")));
    let (path, mut rest) = match (pos, eq) {
        (Some(i), _) if i + 1 < argv.len() => {
            let mut rest = argv.clone();
            let path = PathBuf::from(rest.remove(i + 1));
            rest.remove(i);
            (path, rest)
        }
        (None, Some(i)) => {
            let mut rest = argv.clone();
            let a = rest.remove(i);
            (PathBuf::from(&a.to_str().unwrap()["--config=".len()..]), rest)
        }
        _ => return Ok(argv),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let entries = io::parse_key_values(&text, &path)?;
    let mut injected = Vec::new();
    for (key, value) in entries {
        let flag = format!("--{}", key.replace('_', "-"));
        match value.as_str() {
            "true" => injected.push(OsString::from(flag)),
            "false" => {}
            _ => {
                injected.push(OsString::from(flag));
                injected.push(OsString::from(value));
            }
        }
    }
    const COMMANDS: [&str; 6] = ["simulate", "discretize", "loglik", "oracle", "fit", "summarize"];
    let at = rest
        .iter()
        .position(|a| a.to_str().is_some_and(|s| COMMANDS.contains(&s)))
        .ok_or_else(|| Error::Config("no subcommand given".into()))?;
    rest.splice(at + 1..at + 1, injected);
    Ok(rest)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let mut buf = Vec::new();
    pool.install(|| match cli.command {
        Command::Simulate(a) => simulate(a, &mut buf),
        Command::Discretize(a) => discretize(a, &mut buf),
        Command::Loglik(a) => loglik(a, &mut buf),
        Command::Oracle(a) => oracle(a, &mut buf),
        Command::Fit(a) => fit(a, &mut buf),
        Command::Summarize(a) => summarize(a, &mut buf),
    })?;
    out.write_all(&buf).and_then(|()| out.flush()).map_err(stdout_err)
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let params = a.model.params()?;
    let config = SimConfig::new(params, a.horizon, a.seed)?.with_max_events(a.max_events);
    let history = simulator::simulate_hawkes(&config)?;
    match &a.out {
        Some(p) => io::save_events(&history, p),
        None => io::write_events(&history, out).map_err(stdout_err),
    }
}

fn discretize(a: DiscretizeArgs, out: &mut dyn Write) -> Result<()> {
    let grid = a.grid.grid()?;
    let times = io::load_events(&a.events)?;
    let horizon = a.horizon.unwrap_or(*grid.last().unwrap());
    let history = EventHistory::new(times, horizon)?;
    let counts = simulator::discretize_counts(&history, &grid)?;
    match &a.out {
        Some(p) => io::save_counts(&counts, p),
        None => io::write_counts(&counts, out).map_err(stdout_err),
    }
}

fn prepare_counts(path: &Path, no_collapse: bool) -> Result<CountData> {
    let data = io::load_counts(path)?;
    Ok(if no_collapse { data } else { smc::collapse_zero_runs(&data) })
}

/// Seed of replicate `r`; a single run uses the seed as given.
fn replicate_seed(seed: u64, reps: usize, r: usize) -> u64 {
    if reps == 1 {
        seed
    } else {
        rng::derive_seed(seed, &[tag::REPLICATE, r as u64])
    }
}

fn loglik(a: LoglikArgs, out: &mut dyn Write) -> Result<()> {
    let params = a.model.params()?;
    let base = a.smc.config(params.family(), a.seed)?;
    if a.reps == 0 {
        return Err(Error::Config("--reps must be at least 1".into()));
    }
    let data = prepare_counts(&a.counts, a.no_collapse)?;
    let estimates: Vec<f64> = (0..a.reps)
        .into_par_iter()
        .map(|r| smc::smc_loglik(&params, &data, &base.with_seed(replicate_seed(a.seed, a.reps, r))))
        .collect();
    for v in estimates {
        writeln!(out, "{}", io::fmt_f64(v)).map_err(stdout_err)?;
    }
    Ok(())
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Result<()> {
    let params = a.model.params()?;
    let data = io::load_counts(&a.counts)?;
    let target: Vec<i64> = data.counts().iter().map(|&n| n as i64).collect();
    let est = simulator::brute_force_prob(&params, data.times(), &target, a.sims, a.seed)?;
    writeln!(
        out,
        "probability={}\nstandard_error={}\nn_sims={}\nhits={}",
        io::fmt_f64(est.probability),
        io::fmt_f64(est.standard_error),
        est.n_sims,
        est.hits
    )
    .map_err(stdout_err)
}

fn fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = PmmhConfig::new(a.kernel, a.seed);
    config.iterations = a.iterations;
    config.burn_in = a.burn_in;
    config.step_sigma = a.sigma;
    config.smc = a.smc.config(a.kernel, a.seed)?;
    if let Some(init) = &a.init {
        config.init = Some(HawkesParams::from_values(a.kernel, init)?.to_transformed());
    }
    config.validate()?;

    let (chain, counts) = match (&a.counts, &a.events) {
        (Some(path), _) => {
            let data = prepare_counts(path, a.no_collapse)?;
            let chain = pmmh::fit_counts(&config, &data)?;
            (chain, Some(io::load_counts(path)?))
        }
        (None, Some(path)) => {
            let times = io::load_events(path)?;
            let horizon = a.horizon.unwrap_or_else(|| times.last().copied().unwrap_or(0.0));
            let history = EventHistory::new(times, horizon)?;
            let chain = pmmh::pmmh_run(&config, &FullLikelihood { history: &history })?;
            (chain, None)
        }
        (None, None) => unreachable!("clap requires one data source"),
    };

    if let Some(path) = &a.chain_out {
        io::save_chain(&chain, path)?;
    }
    let summary = pmmh::summarize_chain(&chain, a.burn_in)?;
    if let Some(path) = &a.summary_out {
        io::save_summary(&summary, path)?;
    }
    out.write_all(io::format_summary(&summary).as_bytes()).map_err(stdout_err)?;

    if let (Some(n), Some(path), Some(data)) = (a.predictive, &a.predictive_out, &counts) {
        write_predictive(&chain, a.burn_in, data, n, a.seed, path)?;
    }
    Ok(())
}

/// Simulates one path per evenly spaced post-burn-in draw and writes the
/// pointwise 95% band of cumulative counts next to the observed ones.
fn write_predictive(chain: &ChainOutput, burn_in: usize, data: &CountData, n: usize, seed: u64, path: &Path) -> Result<()> {
    let draws = &chain.records[burn_in.min(chain.records.len())..];
    if draws.is_empty() || n == 0 {
        return Err(Error::Config("predictive paths need post-burn-in draws and --predictive > 0".into()));
    }
    let grid = data.times();
    let paths = (0..n)
        .into_par_iter()
        .map(|k| {
            let draw = &draws[k * draws.len() / n];
            let s = rng::derive_seed(seed, &[tag::PREDICTIVE, k as u64]);
            simulator::predictive_paths(&draw.params, grid, 1, s).map(|mut v| v.pop().unwrap())
        })
        .collect::<Result<Vec<_>>>()?;
    let band = simulator::predictive_band(&paths, 0.95);
    let observed = data.cumulative();
    let mut text = String::from("t,observed,lower,median,upper\n");
    for i in 0..observed.len() {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            io::fmt_f64(grid[i + 1]),
            observed[i],
            io::fmt_f64(band.lower[i]),
            io::fmt_f64(band.median[i]),
            io::fmt_f64(band.upper[i])
        ));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn summarize(a: SummarizeArgs, out: &mut dyn Write) -> Result<()> {
    let chain = io::load_chain(&a.chain, a.kernel)?;
    let summary = pmmh::summarize_chain(&chain, a.burn_in)?;
    if let Some(path) = &a.summary_out {
        io::save_summary(&summary, path)?;
    }
    out.write_all(io::format_summary(&summary).as_bytes()).map_err(stdout_err)
}
