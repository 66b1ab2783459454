//! Bootstrap particle filter for the likelihood of interval counts.
//!
//! Each particle is a hypothesised history of hidden event times. In an
//! interval with `n_i > 0` events the particles are resampled by fitness,
//! the `n_i` new times are proposed from a homogeneous Poisson process
//! whose rate puts the `n_i`-th event inside the interval with probability
//! 0.95, and each particle receives the Radon–Nikodym weight of the Hawkes
//! law against that proposal times the probability of seeing no further
//! events before the interval closes. The per-interval estimate is the
//! weighted particle average, and the product over intervals is an
//! unbiased estimate of the likelihood.
//!
//! Zero-count intervals need no proposal. They do not trigger resampling
//! either: their no-event probabilities are folded into the running
//! fitness until the next interval with events. Consecutive zero-count
//! intervals therefore give the same estimate as their collapsed union,
//! and consume no random numbers.
//!
//! For the exponential kernel each particle can be reduced to the scalar
//! accumulated excitation `ε(t) = λ(t) - ν`, which is Markov; see
//! [`exp_state_step`].

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::model::{CountData, HawkesParams, KernelFamily};
use crate::rng::{self, tag, StreamRng};
use crate::special::gamma_quantile;
use crate::stats::log_sum_exp;

pub const DEFAULT_PARTICLES: usize = 256;

/// Probability that the last proposed event falls inside its interval.
pub const PROPOSAL_COVERAGE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmcConfig {
    pub particles: usize,
    pub seed: u64,
    /// Use the scalar excitation state when the kernel is exponential.
    pub fast_path: bool,
}

impl Default for SmcConfig {
    fn default() -> Self {
        Self {
            particles: DEFAULT_PARTICLES,
            seed: 0,
            fast_path: true,
        }
    }
}

impl SmcConfig {
    pub fn new(particles: usize, seed: u64) -> Result<Self> {
        if particles == 0 {
            return Err(Error::param("particle count J must be at least 1"));
        }
        Ok(Self {
            particles,
            seed,
            fast_path: true,
        })
    }

    pub fn with_fast_path(mut self, fast_path: bool) -> Self {
        self.fast_path = fast_path;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Poisson proposal for the events of one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalSpec {
    pub rate: f64,
    pub count: u64,
    pub start: f64,
    pub end: f64,
}

/// Merges every maximal run of two or more zero-count intervals into one.
pub fn collapse_zero_runs(data: &CountData) -> CountData {
    let mut times = vec![0.0];
    let mut counts: Vec<u64> = Vec::with_capacity(data.len());
    for (_, end, n) in data.intervals() {
        if n == 0 && counts.last() == Some(&0) {
            *times.last_mut().unwrap() = end;
        } else {
            times.push(end);
            counts.push(n);
        }
    }
    CountData::new(times, counts).expect("collapsing preserves a valid grid")
}

/// Proposal rate `ρ = γ_{0.95; n, 1} / (t_cur - t_prev)`.
pub fn poisson_rate(count: u64, t_prev: f64, t_cur: f64) -> Result<ProposalSpec> {
    if count == 0 {
        return Err(Error::param("zero-count intervals need no proposal"));
    }
    if !(t_cur > t_prev) {
        return Err(Error::param(format!("empty interval ({t_prev}, {t_cur}]")));
    }
    let q = gamma_quantile(PROPOSAL_COVERAGE, count as f64, 1.0);
    Ok(ProposalSpec {
        rate: q / (t_cur - t_prev),
        count,
        start: t_prev,
        end: t_cur,
    })
}

/// Appends the first `spec.count` arrival times after `spec.start` of a
/// Poisson process with rate `spec.rate`. Times may overshoot `spec.end`.
pub fn extend_with_proposal<R: Rng + ?Sized>(spec: &ProposalSpec, rng: &mut R, out: &mut Vec<f64>) {
    let mut t = spec.start;
    for _ in 0..spec.count {
        let gap: f64 = Exp1.sample(rng);
        t += gap / spec.rate;
        out.push(t);
    }
}

pub fn propose_interval_events<R: Rng + ?Sized>(spec: &ProposalSpec, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.count as usize);
    extend_with_proposal(spec, rng, &mut out);
    out
}

/// Log of `p(n_i | τ_{1:N_i})`: `-∞` if the last event overshoots `t_cur`,
/// else minus the compensator from `max(t_prev, τ_{N_i})` to `t_cur`.
pub fn log_interval_prob(params: &HawkesParams, history: &[f64], t_prev: f64, t_cur: f64) -> f64 {
    let last = history.last().copied().unwrap_or(f64::NEG_INFINITY);
    if last > t_cur {
        return f64::NEG_INFINITY;
    }
    -params.compensator(history, t_prev.max(last), t_cur)
}

pub fn interval_prob(params: &HawkesParams, history: &[f64], t_prev: f64, t_cur: f64) -> f64 {
    log_interval_prob(params, history, t_prev, t_cur).exp()
}

/// Log importance weight of `proposed` given the particle's earlier events:
/// Hawkes density of the new events over the Poisson proposal density.
pub fn log_particle_weight(params: &HawkesParams, prior: &[f64], proposed: &[f64], spec: &ProposalSpec) -> f64 {
    let Some(&last) = proposed.last() else {
        return 0.0;
    };
    let start = spec.start;
    let end = last.max(start);
    let nu = params.nu();
    let log_lambda_sum: f64 = proposed
        .iter()
        .enumerate()
        .map(|(k, &tau)| (nu + params.excitation(prior, tau) + params.excitation(&proposed[..k], tau)).ln())
        .sum();
    let integral =
        nu * (end - start) + params.excitation_mass(prior, start, end) + params.excitation_mass(proposed, start, end);
    let n = proposed.len() as f64;
    log_lambda_sum - integral - n * spec.rate.ln() + spec.rate * (end - start)
}

pub fn particle_weight(params: &HawkesParams, prior: &[f64], proposed: &[f64], spec: &ProposalSpec) -> f64 {
    log_particle_weight(params, prior, proposed, spec).exp()
}

/// Result of advancing one exponential-kernel particle through an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpStep {
    /// `ε(t_cur+)`; meaningless when `log_prob` is `-∞`.
    pub eps_out: f64,
    pub log_weight: f64,
    pub log_prob: f64,
}

/// Advances the accumulated excitation `ε` across `(t_prev, t_cur]`.
///
/// Between events `ε` decays by `exp(-Δ/β)`, each event adds `η/β`, and
/// `∫ λ` over a gap of length `Δ` starting from excitation `ε` is
/// `νΔ + εβ(1 - exp(-Δ/β))`. `eps_in` is `ε(t_prev+)`. With no proposed
/// events the weight is one and only the decay and the no-event
/// probability are computed.
///
/// The kernel must be exponential.
pub fn exp_state_step(eps_in: f64, params: &HawkesParams, t_prev: f64, t_cur: f64, proposed: &[f64], rate: f64) -> ExpStep {
    let k = params.kernel();
    debug_assert_eq!(k.family(), KernelFamily::Exponential);
    let nu = params.nu();
    let beta = k.beta();
    let jump = k.eta() / beta;

    let mut eps = eps_in;
    let mut prev = t_prev;
    let mut log_weight = 0.0;
    if !proposed.is_empty() {
        let mut log_lambda_sum = 0.0;
        let mut integral = 0.0;
        for &tau in proposed {
            let gap = tau - prev;
            let decay = (-gap / beta).exp();
            let at_event = eps * decay;
            log_lambda_sum += (nu + at_event).ln();
            integral += nu * gap + eps * beta * -(-gap / beta).exp_m1();
            eps = at_event + jump;
            prev = tau;
        }
        let n = proposed.len() as f64;
        log_weight = log_lambda_sum - integral - n * rate.ln() + rate * (prev - t_prev);
    }
    if prev > t_cur {
        return ExpStep {
            eps_out: eps,
            log_weight,
            log_prob: f64::NEG_INFINITY,
        };
    }
    let gap = t_cur - prev;
    ExpStep {
        eps_out: eps * (-gap / beta).exp(),
        log_weight,
        log_prob: -(nu * gap + eps * beta * -(-gap / beta).exp_m1()),
    }
}

/// Draws `n` iid ancestor indices with probabilities proportional to
/// `exp(log_fitness)`. Returns `Ok(None)` when every fitness is equal, in
/// which case the particles pass through unchanged.
pub fn resample_multinomial<R: Rng + ?Sized>(log_fitness: &[f64], n: usize, rng: &mut R) -> Result<Option<Vec<usize>>> {
    let max = log_fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > f64::NEG_INFINITY) {
        return Err(Error::FilterDegenerate);
    }
    if n == log_fitness.len() && log_fitness.iter().all(|&f| f == log_fitness[0]) {
        return Ok(None);
    }
    let weights: Vec<f64> = log_fitness.iter().map(|&f| (f - max).exp()).collect();
    let total: f64 = weights.iter().sum();

    // sorted uniforms from normalised exponential spacings
    let mut spacings: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
    let scale = total / spacings.iter().sum::<f64>();
    let mut out = Vec::with_capacity(n);
    let mut threshold = 0.0;
    let mut cumulative = weights[0];
    let mut j = 0;
    for s in spacings.drain(..n) {
        threshold += s * scale;
        while threshold >= cumulative && j + 1 < weights.len() {
            j += 1;
            cumulative += weights[j];
        }
        // never land on a zero-weight tail particle through rounding
        while weights[j] == 0.0 && j > 0 {
            j -= 1;
        }
        out.push(j);
    }
    Ok(Some(out))
}

/// Per-particle hidden state.
#[derive(Debug, Clone, PartialEq)]
pub enum ParticleState {
    /// Full event-time history of each particle.
    Histories(Vec<Vec<f64>>),
    /// Accumulated excitation `ε(t+)` of each particle (exponential kernel).
    Excitation(Vec<f64>),
}

/// `J` particles with log fitness accumulated since the last resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    state: ParticleState,
    log_fitness: Vec<f64>,
}

impl ParticleSystem {
    pub fn new(state: ParticleState) -> Self {
        let n = match &state {
            ParticleState::Histories(h) => h.len(),
            ParticleState::Excitation(e) => e.len(),
        };
        Self {
            state,
            log_fitness: vec![0.0; n],
        }
    }

    pub fn with_log_fitness(mut self, log_fitness: Vec<f64>) -> Self {
        assert_eq!(log_fitness.len(), self.log_fitness.len());
        self.log_fitness = log_fitness;
        self
    }

    pub fn len(&self) -> usize {
        self.log_fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_fitness.is_empty()
    }

    pub fn state(&self) -> &ParticleState {
        &self.state
    }

    pub fn log_fitness(&self) -> &[f64] {
        &self.log_fitness
    }

    /// Multinomial resampling by fitness, then fitness reset to uniform.
    /// Returns whether any draw was made.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        let n = self.len();
        let Some(ancestors) = resample_multinomial(&self.log_fitness, n, rng)? else {
            self.log_fitness.fill(0.0);
            return Ok(false);
        };
        match &mut self.state {
            ParticleState::Histories(h) => {
                let fresh: Vec<Vec<f64>> = ancestors.iter().map(|&a| h[a].clone()).collect();
                *h = fresh;
            }
            ParticleState::Excitation(e) => {
                let fresh: Vec<f64> = ancestors.iter().map(|&a| e[a]).collect();
                *e = fresh;
            }
        }
        self.log_fitness.fill(0.0);
        Ok(true)
    }
}

/// Output of one filter run.
#[derive(Debug, Clone, PartialEq)]
pub struct SmcEstimate {
    pub log_likelihood: f64,
    /// `log p̂(n_i | n_{1:i-1})` per interval; truncated at the first `-∞`.
    pub log_increments: Vec<f64>,
    pub resamples: usize,
}

/// `log L̂_dis(θ)`; deterministic given `config.seed`, `-∞` when the
/// filter degenerates, never NaN.
pub fn smc_loglik(params: &HawkesParams, data: &CountData, config: &SmcConfig) -> f64 {
    smc_run(params, data, config).log_likelihood
}

pub fn smc_run(params: &HawkesParams, data: &CountData, config: &SmcConfig) -> SmcEstimate {
    let j = config.particles.max(1);
    let mut rng: StreamRng = rng::stream(config.seed, &[tag::SMC]);
    let fast = config.fast_path && params.family() == KernelFamily::Exponential;
    let state = if fast {
        ParticleState::Excitation(vec![0.0; j])
    } else {
        ParticleState::Histories(vec![Vec::new(); j])
    };
    let mut system = ParticleSystem::new(state);
    let mut rates = RateCache::default();
    let mut contrib = vec![0.0; j];
    let mut proposed = Vec::new();
    let mut estimate = SmcEstimate {
        log_likelihood: 0.0,
        log_increments: Vec::with_capacity(data.len()),
        resamples: 0,
    };

    for (t_prev, t_cur, n) in data.intervals() {
        let spec = if n > 0 {
            match system.resample(&mut rng) {
                Ok(true) => estimate.resamples += 1,
                Ok(false) => {}
                Err(_) => return estimate.degenerate(),
            }
            Some(rates.spec(n, t_prev, t_cur))
        } else {
            None
        };

        match &mut system.state {
            ParticleState::Excitation(eps) => {
                for (e, c) in eps.iter_mut().zip(contrib.iter_mut()) {
                    proposed.clear();
                    let rate = match &spec {
                        Some(s) => {
                            extend_with_proposal(s, &mut rng, &mut proposed);
                            s.rate
                        }
                        None => 1.0,
                    };
                    let step = exp_state_step(*e, params, t_prev, t_cur, &proposed, rate);
                    *e = step.eps_out;
                    *c = step.log_weight + step.log_prob;
                }
            }
            ParticleState::Histories(histories) => {
                for (h, c) in histories.iter_mut().zip(contrib.iter_mut()) {
                    let split = h.len();
                    let log_weight = match &spec {
                        Some(s) => {
                            extend_with_proposal(s, &mut rng, h);
                            let (prior, new) = h.split_at(split);
                            log_particle_weight(params, prior, new, s)
                        }
                        None => 0.0,
                    };
                    *c = log_weight + log_interval_prob(params, h, t_prev, t_cur);
                }
            }
        }

        let before = log_sum_exp(&system.log_fitness);
        for (f, &c) in system.log_fitness.iter_mut().zip(&contrib) {
            *f += c;
        }
        let increment = log_sum_exp(&system.log_fitness) - before;
        if !(increment > f64::NEG_INFINITY) {
            return estimate.degenerate();
        }
        estimate.log_increments.push(increment);
        estimate.log_likelihood += increment;
    }
    if estimate.log_likelihood.is_nan() {
        return estimate.degenerate();
    }
    estimate
}

impl SmcEstimate {
    fn degenerate(mut self) -> Self {
        self.log_likelihood = f64::NEG_INFINITY;
        self
    }
}

#[derive(Default)]
struct RateCache {
    quantiles: Vec<f64>,
}

impl RateCache {
    fn spec(&mut self, count: u64, t_prev: f64, t_cur: f64) -> ProposalSpec {
        let idx = count as usize;
        if idx >= self.quantiles.len() {
            self.quantiles.resize(idx + 1, f64::NAN);
        }
        if self.quantiles[idx].is_nan() {
            self.quantiles[idx] = gamma_quantile(PROPOSAL_COVERAGE, count as f64, 1.0);
        }
        ProposalSpec {
            rate: self.quantiles[idx] / (t_cur - t_prev),
            count,
            start: t_prev,
            end: t_cur,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn data(times: &[f64], counts: &[u64]) -> CountData {
        CountData::new(times.to_vec(), counts.to_vec()).unwrap()
    }

    #[test]
    fn collapse_examples() {
        let d = collapse_zero_runs(&data(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1, 0, 0, 2]));
        assert_eq!(d.times(), &[0.0, 1.0, 3.0, 4.0]);
        assert_eq!(d.counts(), &[1, 0, 2]);

        let d0 = data(&[0.0, 1.0, 2.0], &[1, 2]);
        assert_eq!(collapse_zero_runs(&d0), d0);

        let d = collapse_zero_runs(&data(&[0.0, 1.0, 2.0, 3.0], &[0, 0, 0]));
        assert_eq!(d.times(), &[0.0, 3.0]);
        assert_eq!(d.counts(), &[0]);

        let single = data(&[0.0, 1.0, 2.0, 3.0], &[0, 4, 0]);
        assert_eq!(collapse_zero_runs(&single), single);
    }

    #[test]
    fn proposal_rates() {
        let s = poisson_rate(1, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.rate, 2.995_732_273_553_991, max_relative = 1e-12);
        let s = poisson_rate(2, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.rate, 4.743_864_518_390_577, max_relative = 1e-10);
        let s = poisson_rate(1, 3.0, 5.0).unwrap();
        assert_relative_eq!(s.rate, 1.497_866_136_776_995_5, max_relative = 1e-12);
        assert!(poisson_rate(0, 0.0, 1.0).is_err());
        assert!(poisson_rate(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn proposal_is_reproducible_and_ordered() {
        let s = poisson_rate(5, 2.0, 3.0).unwrap();
        let a = propose_interval_events(&s, &mut StreamRng::seed_from_u64(4));
        let b = propose_interval_events(&s, &mut StreamRng::seed_from_u64(4));
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(a[0] > 2.0 && a.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn proposal_overshoot_rate() {
        let s = poisson_rate(1, 0.0, 1.0).unwrap();
        let mut rng = StreamRng::seed_from_u64(21);
        let n = 100_000;
        let over = (0..n).filter(|_| propose_interval_events(&s, &mut rng)[0] > 1.0).count();
        let p = over as f64 / n as f64;
        let se = (0.05f64 * 0.95 / n as f64).sqrt();
        assert!((p - 0.05).abs() <= 3.0 * se, "overshoot {p}");
    }

    #[test]
    fn interval_probability_examples() {
        let p = HawkesParams::exponential(1.0, 0.6, 0.25).unwrap();
        assert_eq!(interval_prob(&p, &[0.2, 1.3], 0.0, 1.0), 0.0);
        let poisson = HawkesParams::exponential(2.0, 0.0, 0.25).unwrap();
        assert_relative_eq!(interval_prob(&poisson, &[], 1.0, 1.5), (-1.0f64).exp(), max_relative = 1e-15);
        // e^{-1.0187988...}
        assert_relative_eq!(interval_prob(&p, &[0.5], 0.0, 1.0), 0.361_028_336_215_480_36, max_relative = 1e-13);
    }

    #[test]
    fn weight_examples() {
        let p = HawkesParams::exponential(1.0, 0.0, 0.25).unwrap();
        let spec = poisson_rate(1, 0.0, 1.0).unwrap();
        assert_eq!(particle_weight(&p, &[], &[], &spec), 1.0);
        // e^{-0.5} / (ρ e^{-ρ/2})
        assert_relative_eq!(particle_weight(&p, &[], &[0.5], &spec), 0.905_450_595_520_847_2, max_relative = 1e-12);
        let w = particle_weight(&p, &[], &[1.7], &spec);
        assert!(w.is_finite() && w > 0.0);
    }

    #[test]
    fn resampling_concentrates_on_single_survivor() {
        let mut rng = StreamRng::seed_from_u64(0);
        let lf = [f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let idx = resample_multinomial(&lf, 4, &mut rng).unwrap().unwrap();
        assert_eq!(idx, vec![1; 4]);
    }

    #[test]
    fn resampling_equal_fitness_passes_through() {
        let mut rng = StreamRng::seed_from_u64(0);
        assert_eq!(resample_multinomial(&[-3.0; 5], 5, &mut rng).unwrap(), None);
        let mut sys = ParticleSystem::new(ParticleState::Excitation(vec![1.0, 2.0, 3.0]));
        assert!(!sys.resample(&mut rng).unwrap());
        assert_eq!(sys.state(), &ParticleState::Excitation(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn resampling_all_zero_is_degenerate() {
        let mut rng = StreamRng::seed_from_u64(0);
        assert!(matches!(
            resample_multinomial(&[f64::NEG_INFINITY; 3], 3, &mut rng),
            Err(Error::FilterDegenerate)
        ));
    }

    #[test]
    fn resampling_frequencies_follow_fitness() {
        let mut rng = StreamRng::seed_from_u64(5);
        let lf = [1f64.ln(), 3f64.ln()];
        let trials = 100_000;
        let mut second = 0usize;
        for _ in 0..trials {
            let idx = resample_multinomial(&lf, 2, &mut rng).unwrap().unwrap();
            second += idx.iter().filter(|&&i| i == 1).count();
        }
        let draws = 2 * trials;
        let p = second as f64 / draws as f64;
        let se = (0.75f64 * 0.25 / draws as f64).sqrt();
        assert!((p - 0.75).abs() <= 3.0 * se, "p = {p}");
    }

    #[test]
    fn exp_step_zero_count_decays() {
        let p = HawkesParams::exponential(1.5, 0.6, 0.25).unwrap();
        let step = exp_state_step(2.0, &p, 1.0, 1.4, &[], 1.0);
        assert_relative_eq!(step.eps_out, 2.0 * (-0.4f64 / 0.25).exp(), max_relative = 1e-15);
        assert_eq!(step.log_weight, 0.0);
        let expected = -(1.5 * 0.4 + 2.0 * 0.25 * (1.0 - (-1.6f64).exp()));
        assert_relative_eq!(step.log_prob, expected, max_relative = 1e-14);
    }

    #[test]
    fn exp_step_jumps_by_eta_over_beta() {
        let p = HawkesParams::exponential(1.0, 0.6, 0.25).unwrap();
        // event at the interval end leaves ε(t_cur+) = ε(τ) + η/β
        let step = exp_state_step(0.8, &p, 0.0, 1.0, &[1.0], 3.0);
        let before = 0.8 * (-4.0f64).exp();
        assert_relative_eq!(step.eps_out - before, 0.6 / 0.25, max_relative = 1e-14);
    }

    #[test]
    fn exp_step_matches_generic_formulas() {
        let p = HawkesParams::exponential(0.7, 0.45, 0.6).unwrap();
        let prior = [0.3, 1.1, 1.9];
        let eps_in: f64 = prior.iter().map(|&t| p.kernel().density(2.0 - t)).sum();
        let proposed = [2.2, 2.25, 2.9];
        let spec = poisson_rate(3, 2.0, 3.0).unwrap();
        let step = exp_state_step(eps_in, &p, 2.0, 3.0, &proposed, spec.rate);
        let mut all = prior.to_vec();
        all.extend_from_slice(&proposed);
        assert_relative_eq!(step.log_weight, log_particle_weight(&p, &prior, &proposed, &spec), max_relative = 1e-12);
        assert_relative_eq!(step.log_prob, log_interval_prob(&p, &all, 2.0, 3.0), max_relative = 1e-12);
    }

    #[test]
    fn all_zero_counts_are_exact() {
        let p = HawkesParams::exponential(1.7, 0.6, 0.25).unwrap();
        let d = data(&[0.0, 1.0, 2.5, 4.0], &[0, 0, 0]);
        for fast in [true, false] {
            for seed in 0..5 {
                let cfg = SmcConfig::new(32, seed).unwrap().with_fast_path(fast);
                let ll = smc_loglik(&p, &d, &cfg);
                assert!((ll + 1.7 * 4.0).abs() < 1e-12, "{ll}");
            }
        }
    }

    #[test]
    fn loglik_is_deterministic() {
        let p = HawkesParams::gamma(1.0, 0.6, 2.0, 0.1).unwrap();
        let d = data(&[0.0, 1.0, 2.0], &[1, 2]);
        let cfg = SmcConfig::new(64, 3).unwrap();
        assert_eq!(smc_loglik(&p, &d, &cfg), smc_loglik(&p, &d, &cfg));
    }

    #[test]
    fn absurd_parameters_give_minus_infinity_not_nan() {
        let p = HawkesParams::exponential(1e-300, 0.999, 1e-9).unwrap();
        let d = data(&[0.0, 1.0, 2.0], &[50, 900]);
        let ll = smc_loglik(&p, &d, &SmcConfig::new(16, 1).unwrap());
        assert!(!ll.is_nan());
        let huge = HawkesParams::exponential(1e300, 0.5, 1.0).unwrap();
        let ll = smc_loglik(&huge, &d, &SmcConfig::new(16, 1).unwrap());
        assert!(!ll.is_nan());
    }

    #[test]
    fn single_particle_runs() {
        let p = HawkesParams::exponential(1.0, 0.5, 0.5).unwrap();
        let d = data(&[0.0, 1.0, 2.0, 3.0], &[1, 0, 2]);
        let ll = smc_loglik(&p, &d, &SmcConfig::new(1, 0).unwrap());
        assert!(!ll.is_nan());
        assert!(SmcConfig::new(0, 0).is_err());
    }
}
