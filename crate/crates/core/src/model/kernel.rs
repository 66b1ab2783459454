use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{gamma_pq, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Exponential,
    Gamma,
    Weibull,
}

impl KernelFamily {
    pub fn has_shape(self) -> bool {
        !matches!(self, KernelFamily::Exponential)
    }

    /// Number of free parameters in the full model, background rate included.
    pub fn n_params(self) -> usize {
        if self.has_shape() {
            4
        } else {
            3
        }
    }

    /// Natural-scale parameter names in storage order.
    pub fn param_names(self) -> &'static [&'static str] {
        if self.has_shape() {
            &["nu", "eta", "alpha", "beta"]
        } else {
            &["nu", "eta", "beta"]
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::Exponential => "exp",
            KernelFamily::Gamma => "gamma",
            KernelFamily::Weibull => "weibull",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Ok(KernelFamily::Exponential),
            "gamma" => Ok(KernelFamily::Gamma),
            "weibull" => Ok(KernelFamily::Weibull),
            other => Err(Error::param(format!(
                "unknown kernel family `{other}` (expected exp, gamma or weibull)"
            ))),
        }
    }
}

/// Excitation kernel `g` scaled so that its total mass is the branching
/// ratio `eta`.
///
/// * Exponential: `g(t) = (eta/beta) exp(-t/beta)`
/// * Gamma: `g(t) = eta t^(alpha-1) exp(-t/beta) / (Gamma(alpha) beta^alpha)`
/// * Weibull: `g(t) = eta (alpha/beta) (t/beta)^(alpha-1) exp(-(t/beta)^alpha)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationKernel {
    family: KernelFamily,
    eta: f64,
    alpha: f64,
    beta: f64,
    // log of the gamma-density normalizer, Gamma(alpha) beta^alpha
    log_norm: f64,
}

impl ExcitationKernel {
    pub fn new(family: KernelFamily, eta: f64, alpha: Option<f64>, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::param(format!("eta must lie in [0, 1), got {eta}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be positive and finite, got {beta}")));
        }
        let alpha = match (family, alpha) {
            (KernelFamily::Exponential, None) => 1.0,
            (KernelFamily::Exponential, Some(_)) => {
                return Err(Error::param("the exponential kernel takes no shape parameter alpha"))
            }
            (_, None) => {
                return Err(Error::param(format!("the {family} kernel requires a shape parameter alpha")))
            }
            (_, Some(a)) if !(a > 0.0 && a.is_finite()) => {
                return Err(Error::param(format!("alpha must be positive and finite, got {a}")))
            }
            (_, Some(a)) => a,
        };
        let log_norm = match family {
            KernelFamily::Gamma => ln_gamma(alpha) + alpha * beta.ln(),
            _ => 0.0,
        };
        Ok(Self {
            family,
            eta,
            alpha,
            beta,
            log_norm,
        })
    }

    pub fn exponential(eta: f64, beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Exponential, eta, None, beta)
    }

    pub fn gamma(eta: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Gamma, eta, Some(alpha), beta)
    }

    pub fn weibull(eta: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Weibull, eta, Some(alpha), beta)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Shape parameter; `None` for the exponential family.
    pub fn alpha(&self) -> Option<f64> {
        self.family.has_shape().then_some(self.alpha)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `g(t)`, zero for `t <= 0`.
    pub fn density(&self, t: f64) -> f64 {
        if !(t > 0.0) || self.eta == 0.0 {
            return 0.0;
        }
        match self.family {
            KernelFamily::Exponential => self.eta / self.beta * (-t / self.beta).exp(),
            KernelFamily::Gamma => {
                self.eta * ((self.alpha - 1.0) * t.ln() - t / self.beta - self.log_norm).exp()
            }
            KernelFamily::Weibull => {
                let z = t / self.beta;
                let zp = z.powf(self.alpha - 1.0);
                self.eta * self.alpha / self.beta * zp * (-(zp * z)).exp()
            }
        }
    }

    /// `G(t) = ∫_0^t g`, zero for `t <= 0` and `eta` at infinity.
    pub fn cdf(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        self.eta * self.unit_cdf(t)
    }

    /// `eta - G(t)`, computed directly so that old events keep full precision.
    pub fn survival(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return self.eta;
        }
        self.eta * self.unit_survival(t)
    }

    /// `G(b) - G(a)` for `a <= b`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if !(b > 0.0) || b <= a {
            return 0.0;
        }
        if a > 0.0 {
            // both in the tail: difference of survivals avoids cancellation near eta
            self.survival(a) - self.survival(b)
        } else {
            self.cdf(b)
        }
    }

    fn unit_cdf(&self, t: f64) -> f64 {
        match self.family {
            KernelFamily::Exponential => -(-t / self.beta).exp_m1(),
            KernelFamily::Gamma => gamma_pq(self.alpha, t / self.beta).0,
            KernelFamily::Weibull => -(-(t / self.beta).powf(self.alpha)).exp_m1(),
        }
    }

    fn unit_survival(&self, t: f64) -> f64 {
        match self.family {
            KernelFamily::Exponential => (-t / self.beta).exp(),
            KernelFamily::Gamma => gamma_pq(self.alpha, t / self.beta).1,
            KernelFamily::Weibull => (-(t / self.beta).powf(self.alpha)).exp(),
        }
    }

    /// Location of the maximum of `g` on `(0, ∞)`.
    pub fn mode(&self) -> f64 {
        if self.alpha <= 1.0 {
            return 0.0;
        }
        match self.family {
            KernelFamily::Exponential => 0.0,
            KernelFamily::Gamma => (self.alpha - 1.0) * self.beta,
            KernelFamily::Weibull => self.beta * ((self.alpha - 1.0) / self.alpha).powf(1.0 / self.alpha),
        }
    }

    /// True when `g(0+)` is infinite (shape below one).
    pub fn is_singular(&self) -> bool {
        self.family.has_shape() && self.alpha < 1.0 && self.eta > 0.0
    }

    /// `sup_{s > a} g(s)` for `a >= 0`. Every family is unimodal, so this is
    /// `g` at `max(a, mode)`, with the right limit at the origin.
    pub fn sup_after(&self, a: f64) -> f64 {
        let at = a.max(self.mode());
        if at > 0.0 {
            return self.density(at);
        }
        if self.eta == 0.0 {
            return 0.0;
        }
        if self.is_singular() {
            f64::INFINITY
        } else if self.alpha == 1.0 {
            self.eta / self.beta
        } else {
            // alpha > 1 has a positive mode, handled above
            0.0
        }
    }
}
