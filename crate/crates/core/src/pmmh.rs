//! Pseudo-marginal Metropolis–Hastings over transformed parameters, and
//! quantile summaries of the resulting chain.
//!
//! The random walk is Gaussian and symmetric on the transformed scale, so
//! the acceptance ratio is the ratio of likelihood estimates. The estimate
//! for the current state is the one computed when that state was accepted
//! and is never refreshed; only proposals get a new estimate, each from
//! its own random stream keyed by the iteration number.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{CountData, EventHistory, HawkesParams, KernelFamily, TransformedParams};
use crate::rng::{self, tag, StreamRng};
use crate::smc::{smc_loglik, SmcConfig};
use crate::stats::quantile_sorted;

pub const DEFAULT_ITERATIONS: usize = 50_000;
pub const DEFAULT_STEP_SIGMA: f64 = 0.05;
pub const DEFAULT_BURN_IN: usize = 1_000;

/// `2 Φ^{-1}(0.975)`: width of a central 95% normal interval in SDs.
pub const NORMAL_95_WIDTH: f64 = 2.0 * 1.959_963_984_540_054;

/// A (possibly noisy) log-likelihood evaluated at natural-scale parameters.
/// `seed` identifies the random stream for this evaluation.
pub trait LogLikelihood: Sync {
    fn log_likelihood(&self, params: &HawkesParams, seed: u64) -> f64;
}

/// Particle-filter estimate on interval counts.
#[derive(Debug, Clone)]
pub struct SmcLikelihood<'a> {
    pub data: &'a CountData,
    pub smc: SmcConfig,
}

impl LogLikelihood for SmcLikelihood<'_> {
    fn log_likelihood(&self, params: &HawkesParams, seed: u64) -> f64 {
        smc_loglik(params, self.data, &self.smc.with_seed(seed))
    }
}

/// Exact likelihood of a continuously observed path.
#[derive(Debug, Clone)]
pub struct FullLikelihood<'a> {
    pub history: &'a EventHistory,
}

impl LogLikelihood for FullLikelihood<'_> {
    fn log_likelihood(&self, params: &HawkesParams, _seed: u64) -> f64 {
        params.full_loglik(self.history)
    }
}

impl<F> LogLikelihood for F
where
    F: Fn(&HawkesParams) -> f64 + Sync,
{
    fn log_likelihood(&self, params: &HawkesParams, _seed: u64) -> f64 {
        self(params)
    }
}

#[derive(Debug, Clone)]
pub struct PmmhConfig {
    pub family: KernelFamily,
    pub iterations: usize,
    pub step_sigma: f64,
    /// Optional per-coordinate scales multiplying `step_sigma`.
    pub step_scales: Option<Vec<f64>>,
    pub burn_in: usize,
    pub smc: SmcConfig,
    pub init: Option<TransformedParams>,
    pub seed: u64,
}

impl PmmhConfig {
    pub fn new(family: KernelFamily, seed: u64) -> Self {
        Self {
            family,
            iterations: DEFAULT_ITERATIONS,
            step_sigma: DEFAULT_STEP_SIGMA,
            step_scales: None,
            burn_in: DEFAULT_BURN_IN,
            smc: SmcConfig::default(),
            init: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::param("iterations must be at least 1"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::param(format!(
                "burn-in ({}) must be smaller than the number of iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if !(self.step_sigma > 0.0 && self.step_sigma.is_finite()) {
            return Err(Error::param(format!("step sigma must be positive, got {}", self.step_sigma)));
        }
        if let Some(scales) = &self.step_scales {
            if scales.len() != self.family.n_params() || scales.iter().any(|s| !(*s > 0.0)) {
                return Err(Error::param("step scales need one positive entry per coordinate"));
            }
        }
        if let Some(init) = &self.init {
            if init.family() != self.family {
                return Err(Error::param(format!(
                    "initial point is for the {} kernel but the chain uses {}",
                    init.family(),
                    self.family
                )));
            }
        }
        if self.smc.particles == 0 {
            return Err(Error::param("particle count J must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub theta: TransformedParams,
    /// Estimate stored when `theta` was last accepted.
    pub cached_loglik: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub iteration: usize,
    pub theta: TransformedParams,
    pub params: HawkesParams,
    /// Log-likelihood estimate attached to the state after this iteration.
    pub loglik: f64,
    pub accepted: bool,
    /// `log A` of the proposal made at this iteration; absent for records
    /// read back from disk.
    pub log_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub family: KernelFamily,
    pub initial: ChainState,
    pub records: Vec<ChainRecord>,
}

impl ChainOutput {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// `log A = proposed - cached`, with `-∞` for an impossible proposal and
/// `+∞` when only the current state is impossible.
pub fn acceptance_ratio(proposed_loglik: f64, cached_loglik: f64) -> f64 {
    if proposed_loglik.is_nan() || proposed_loglik == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if cached_loglik.is_nan() || cached_loglik == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    proposed_loglik - cached_loglik
}

/// Accept iff `log U <= log A` for `U ~ Uniform(0, 1)`.
pub fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio == f64::NEG_INFINITY {
        return false;
    }
    if log_ratio >= 0.0 {
        // U <= 1 always; still draw so the stream advances uniformly
        let _: f64 = rng.random();
        return true;
    }
    let u: f64 = rng.random();
    u.ln() <= log_ratio
}

/// One PMMH transition. `rng` drives the random walk and the uniform; the
/// likelihood of the proposal is evaluated on the stream keyed by
/// `(config.seed, iteration)`.
pub fn pmmh_step<L: LogLikelihood + ?Sized, R: Rng + ?Sized>(
    state: &ChainState,
    config: &PmmhConfig,
    target: &L,
    iteration: usize,
    rng: &mut R,
) -> (ChainState, ChainRecord) {
    let current = state.theta.values();
    let proposal: Vec<f64> = current
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let z: f64 = StandardNormal.sample(rng);
            let scale = config.step_scales.as_ref().map_or(1.0, |s| s[i]);
            x + config.step_sigma * scale * z
        })
        .collect();
    let theta_star = TransformedParams::new(state.theta.family(), proposal).expect("finite random-walk proposal");
    let params_star = theta_star.to_params();
    let seed = rng::derive_seed(config.seed, &[tag::PROPOSAL, iteration as u64]);
    let proposed_loglik = target.log_likelihood(&params_star, seed);
    let log_ratio = acceptance_ratio(proposed_loglik, state.cached_loglik);
    let accepted = accept(log_ratio, rng);

    let next = if accepted {
        ChainState {
            theta: theta_star,
            cached_loglik: proposed_loglik,
        }
    } else {
        state.clone()
    };
    let record = ChainRecord {
        iteration,
        params: if accepted { params_star } else { next.theta.to_params() },
        theta: next.theta.clone(),
        loglik: next.cached_loglik,
        accepted,
        log_ratio: Some(log_ratio),
    };
    (next, record)
}

/// Runs the chain for `config.iterations` steps after initialisation.
/// Without an explicit `init` the start is a standard-normal draw on the
/// transformed scale.
pub fn pmmh_run<L: LogLikelihood + ?Sized>(config: &PmmhConfig, target: &L) -> Result<ChainOutput> {
    config.validate()?;
    let mut rng: StreamRng = rng::stream(config.seed, &[tag::CHAIN]);
    let theta0 = match &config.init {
        Some(t) => t.clone(),
        None => {
            let v = (0..config.family.n_params()).map(|_| StandardNormal.sample(&mut rng)).collect();
            TransformedParams::new(config.family, v)?
        }
    };
    let seed0 = rng::derive_seed(config.seed, &[tag::PROPOSAL, 0]);
    let initial = ChainState {
        cached_loglik: target.log_likelihood(&theta0.to_params(), seed0),
        theta: theta0,
    };
    let mut state = initial.clone();
    let mut records = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let (next, record) = pmmh_step(&state, config, target, iteration, &mut rng);
        state = next;
        records.push(record);
    }
    Ok(ChainOutput {
        family: config.family,
        initial,
        records,
    })
}

/// Convenience wrapper: PMMH on interval counts with the particle filter.
pub fn fit_counts(config: &PmmhConfig, data: &CountData) -> Result<ChainOutput> {
    if data.is_empty() {
        return Err(Error::data("count data has no intervals"));
    }
    let target = SmcLikelihood { data, smc: config.smc };
    pmmh_run(config, &target)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub family: KernelFamily,
    pub params: Vec<ParamSummary>,
    pub acceptance_rate: f64,
    pub n_draws: usize,
    pub burn_in: usize,
}

impl Summary {
    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Median, 2.5% / 97.5% quantiles and `SE = (q97.5 - q2.5) / 3.92` of every
/// natural-scale parameter over the records after `burn_in`.
pub fn summarize_chain(output: &ChainOutput, burn_in: usize) -> Result<Summary> {
    if burn_in >= output.records.len() {
        return Err(Error::param(format!(
            "burn-in ({burn_in}) must be smaller than the chain length ({})",
            output.records.len()
        )));
    }
    let kept = &output.records[burn_in..];
    let names = output.family.param_names();
    let mut column = Vec::with_capacity(kept.len());
    let params = names
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            column.clear();
            column.extend(kept.iter().map(|r| r.params.values()[i]));
            column.sort_by(f64::total_cmp);
            let lower = quantile_sorted(&column, 0.025);
            let upper = quantile_sorted(&column, 0.975);
            ParamSummary {
                name: name.to_string(),
                estimate: quantile_sorted(&column, 0.5),
                lower,
                upper,
                se: (upper - lower) / NORMAL_95_WIDTH,
            }
        })
        .collect();
    let accepted = kept.iter().filter(|r| r.accepted).count();
    Ok(Summary {
        family: output.family,
        params,
        acceptance_rate: accepted as f64 / kept.len() as f64,
        n_draws: kept.len(),
        burn_in,
    })
}
