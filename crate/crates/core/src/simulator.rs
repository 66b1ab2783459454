//! Sample-path simulation, discretization to counts, and a brute-force
//! Monte Carlo oracle for interval-count probabilities.
//!
//! Paths are drawn by Ogata thinning. After each candidate the bound is
//! rebuilt as `ν + Σ_k sup_{s > t} g(s - τ_k)`, which is finite and valid
//! for every unimodal kernel with a bounded peak. Kernels whose density
//! diverges at the origin (shape below one) have no finite bound right
//! after an event; those are simulated by inverting the compensator
//! instead.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{validate_grid, CountData, EventHistory, HawkesParams, KernelFamily};
use crate::rng::{self, tag, StreamRng};
use crate::stats::quantile_sorted;

pub const DEFAULT_EVENT_CAP: usize = 10_000_000;

const ORACLE_CHUNK: usize = 10_000;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: HawkesParams,
    pub horizon: f64,
    pub seed: u64,
    pub max_events: usize,
}

impl SimConfig {
    pub fn new(params: HawkesParams, horizon: f64, seed: u64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::param(format!("horizon must be finite and non-negative, got {horizon}")));
        }
        Ok(Self {
            params,
            horizon,
            seed,
            max_events: DEFAULT_EVENT_CAP,
        })
    }

    pub fn with_max_events(mut self, cap: usize) -> Self {
        self.max_events = cap;
        self
    }
}

/// Draws one path on `(0, T]`; reproducible from `config.seed`.
pub fn simulate_hawkes(config: &SimConfig) -> Result<EventHistory> {
    let mut rng = rng::stream(config.seed, &[tag::SIMULATE]);
    let times = simulate_path(&config.params, config.horizon, config.max_events, &mut rng)?;
    Ok(EventHistory::from_sorted_unchecked(times, config.horizon))
}

/// Event times of one path on `(0, horizon]` drawn from `rng`.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &HawkesParams,
    horizon: f64,
    max_events: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(horizon > 0.0) {
        return Ok(Vec::new());
    }
    let kernel = params.kernel();
    if kernel.family() == KernelFamily::Exponential {
        thinning_exponential(params, horizon, max_events, rng)
    } else if kernel.is_singular() {
        compensator_inversion(params, horizon, max_events, rng)
    } else {
        thinning(params, horizon, max_events, rng)
    }
}

fn push_event(events: &mut Vec<f64>, t: f64, cap: usize) -> Result<()> {
    if events.len() >= cap {
        return Err(Error::RunawayPath { cap });
    }
    events.push(t);
    Ok(())
}

fn exp_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

// O(1) per candidate: the excitation decays monotonically between events,
// so its current value bounds the intensity until the next acceptance.
fn thinning_exponential<R: Rng + ?Sized>(
    params: &HawkesParams,
    horizon: f64,
    cap: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let nu = params.nu();
    let k = params.kernel();
    let (jump, beta) = (k.eta() / k.beta(), k.beta());
    let mut events = Vec::new();
    let mut t = 0.0;
    let mut excitation = 0.0;
    loop {
        let bound = nu + excitation;
        let gap = exp_draw(rng) / bound;
        t += gap;
        if t > horizon {
            break;
        }
        excitation *= (-gap / beta).exp();
        if rng.random::<f64>() * bound <= nu + excitation {
            push_event(&mut events, t, cap)?;
            excitation += jump;
        }
    }
    Ok(events)
}

fn thinning<R: Rng + ?Sized>(params: &HawkesParams, horizon: f64, cap: usize, rng: &mut R) -> Result<Vec<f64>> {
    let nu = params.nu();
    let k = params.kernel();
    let mut events: Vec<f64> = Vec::new();
    let mut t = 0.0;
    loop {
        let bound = nu + events.iter().map(|&tau| k.sup_after(t - tau)).sum::<f64>();
        t += exp_draw(rng) / bound;
        if t > horizon {
            break;
        }
        let lambda = params.intensity(&events, t);
        debug_assert!(lambda <= bound * (1.0 + 1e-9));
        if rng.random::<f64>() * bound <= lambda {
            push_event(&mut events, t, cap)?;
        }
    }
    Ok(events)
}

// Next event solves Λ(t, s) = E with E ~ Exp(1).
fn compensator_inversion<R: Rng + ?Sized>(
    params: &HawkesParams,
    horizon: f64,
    cap: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut events: Vec<f64> = Vec::new();
    let mut t = 0.0;
    loop {
        let target = exp_draw(rng);
        if params.compensator(&events, t, horizon) < target {
            break;
        }
        let s = solve_compensator(params, &events, t, horizon, target);
        let s = if s > t { s } else { t.next_up() };
        push_event(&mut events, s, cap)?;
        t = s;
    }
    Ok(events)
}

fn solve_compensator(params: &HawkesParams, events: &[f64], from: f64, upper: f64, target: f64) -> f64 {
    let mut lo = from;
    let mut hi = upper;
    let mut s = from + (target / params.intensity(events, upper)).min(upper - from);
    for _ in 0..200 {
        let f = params.compensator(events, from, s) - target;
        if f < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        if f.abs() <= 1e-14 * target.max(1.0) || hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        let slope = params.intensity(events, s);
        let newton = s - f / slope;
        s = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    s
}

/// Counts per interval `(t_{i-1}, t_i]` of the grid.
pub fn discretize_counts(history: &EventHistory, grid: &[f64]) -> Result<CountData> {
    validate_grid(grid)?;
    let end = *grid.last().unwrap();
    if end > history.horizon() {
        return Err(Error::data(format!(
            "grid ends at {end}, beyond the simulation horizon {}",
            history.horizon()
        )));
    }
    let counts = counts_on_grid(history.times(), grid);
    CountData::new(grid.to_vec(), counts)
}

fn counts_on_grid(times: &[f64], grid: &[f64]) -> Vec<u64> {
    let mut prev = 0usize;
    grid[1..]
        .iter()
        .map(|&t| {
            let upto = times.partition_point(|&s| s <= t);
            let n = (upto - prev) as u64;
            prev = upto;
            n
        })
        .collect()
}

/// Regular grid `0, step, 2 step, …` up to and including `end` (a final
/// shorter interval is added if `end` is not a multiple of `step`).
pub fn regular_grid(step: f64, end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !(end > 0.0 && end.is_finite()) {
        return Err(Error::param(format!("grid needs positive step and end, got step={step}, end={end}")));
    }
    let n = (end / step - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    grid.push(end);
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub probability: f64,
    pub standard_error: f64,
    pub n_sims: u64,
    pub hits: u64,
}

impl OracleEstimate {
    pub fn from_hits(hits: u64, n_sims: u64) -> Self {
        let p = hits as f64 / n_sims as f64;
        Self {
            probability: p,
            standard_error: (p * (1.0 - p) / n_sims as f64).sqrt(),
            n_sims,
            hits,
        }
    }
}

/// Fraction of simulated paths whose interval counts equal `target` exactly.
pub fn brute_force_prob(
    params: &HawkesParams,
    grid: &[f64],
    target: &[i64],
    n_sims: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    validate_grid(grid)?;
    if n_sims == 0 {
        return Err(Error::param("n_sims must be at least 1"));
    }
    if target.len() + 1 != grid.len() {
        return Err(Error::data(format!(
            "grid of {} points has {} intervals but {} target counts were given",
            grid.len(),
            grid.len() - 1,
            target.len()
        )));
    }
    if target.iter().any(|&n| n < 0) {
        return Ok(OracleEstimate::from_hits(0, n_sims));
    }
    let target: Vec<u64> = target.iter().map(|&n| n as u64).collect();
    let end = *grid.last().unwrap();
    // a path with more events than the target total can be abandoned early
    let cap = target.iter().sum::<u64>() as usize + 1;
    let n_chunks = n_sims.div_ceil(ORACLE_CHUNK as u64);
    let hits = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| -> Result<u64> {
            let mut rng: StreamRng = rng::stream(seed, &[tag::ORACLE, chunk]);
            let size = (n_sims - chunk * ORACLE_CHUNK as u64).min(ORACLE_CHUNK as u64);
            let mut hits = 0;
            for _ in 0..size {
                match simulate_path(params, end, cap, &mut rng) {
                    Ok(path) if counts_on_grid(&path, grid) == target => hits += 1,
                    Ok(_) | Err(Error::RunawayPath { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(OracleEstimate::from_hits(hits, n_sims))
}

/// Cumulative counts `N(t_1), …, N(t_m)` of `n_paths` simulated paths.
pub fn predictive_paths(params: &HawkesParams, grid: &[f64], n_paths: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    validate_grid(grid)?;
    let end = *grid.last().unwrap();
    (0..n_paths)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, &[tag::PREDICTIVE, r as u64]);
            let path = simulate_path(params, end, DEFAULT_EVENT_CAP, &mut rng)?;
            let mut acc = 0;
            Ok(counts_on_grid(&path, grid)
                .into_iter()
                .map(|n| {
                    acc += n;
                    acc
                })
                .collect())
        })
        .collect()
}

/// Pointwise lower / median / upper quantiles of simulated cumulative paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveBand {
    pub lower: Vec<f64>,
    pub median: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn predictive_band(paths: &[Vec<u64>], coverage: f64) -> PredictiveBand {
    let m = paths.first().map_or(0, Vec::len);
    let tail = 0.5 * (1.0 - coverage);
    let mut band = PredictiveBand {
        lower: Vec::with_capacity(m),
        median: Vec::with_capacity(m),
        upper: Vec::with_capacity(m),
    };
    let mut column = Vec::with_capacity(paths.len());
    for i in 0..m {
        column.clear();
        column.extend(paths.iter().map(|p| p[i] as f64));
        column.sort_by(f64::total_cmp);
        band.lower.push(quantile_sorted(&column, tail));
        band.median.push(quantile_sorted(&column, 0.5));
        band.upper.push(quantile_sorted(&column, 1.0 - tail));
    }
    band
}
