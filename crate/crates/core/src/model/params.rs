use crate::error::{Error, Result};
use crate::model::kernel::{ExcitationKernel, KernelFamily};

/// Full parameter vector: constant background rate plus excitation kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesParams {
    nu: f64,
    kernel: ExcitationKernel,
}

impl HawkesParams {
    pub fn new(nu: f64, kernel: ExcitationKernel) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::param(format!("nu must be positive and finite, got {nu}")));
        }
        Ok(Self { nu, kernel })
    }

    pub fn exponential(nu: f64, eta: f64, beta: f64) -> Result<Self> {
        Self::new(nu, ExcitationKernel::exponential(eta, beta)?)
    }

    pub fn gamma(nu: f64, eta: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(nu, ExcitationKernel::gamma(eta, alpha, beta)?)
    }

    pub fn weibull(nu: f64, eta: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(nu, ExcitationKernel::weibull(eta, alpha, beta)?)
    }

    /// Builds from natural-scale values laid out as in
    /// [`KernelFamily::param_names`].
    pub fn from_values(family: KernelFamily, values: &[f64]) -> Result<Self> {
        if values.len() != family.n_params() {
            return Err(Error::param(format!(
                "{family} model takes {} parameters, got {}",
                family.n_params(),
                values.len()
            )));
        }
        let (alpha, beta) = if family.has_shape() {
            (Some(values[2]), values[3])
        } else {
            (None, values[2])
        };
        Self::new(values[0], ExcitationKernel::new(family, values[1], alpha, beta)?)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kernel(&self) -> &ExcitationKernel {
        &self.kernel
    }

    pub fn family(&self) -> KernelFamily {
        self.kernel.family()
    }

    /// Natural-scale values in [`KernelFamily::param_names`] order.
    pub fn values(&self) -> Vec<f64> {
        let k = &self.kernel;
        match k.alpha() {
            Some(a) => vec![self.nu, k.eta(), a, k.beta()],
            None => vec![self.nu, k.eta(), k.beta()],
        }
    }

    /// Stationary mean event rate `nu / (1 - eta)`.
    pub fn mean_rate(&self) -> f64 {
        self.nu / (1.0 - self.kernel.eta())
    }

    pub fn to_transformed(&self) -> TransformedParams {
        let k = &self.kernel;
        let eta = k.eta();
        let mut values = vec![self.nu.ln(), eta.ln() - (-eta).ln_1p()];
        if let Some(a) = k.alpha() {
            values.push(a.ln());
        }
        values.push(k.beta().ln());
        TransformedParams {
            family: k.family(),
            values,
        }
    }

    /// Inverse of [`to_transformed`](Self::to_transformed). Any real vector
    /// maps to a valid parameter set; coordinates that would overflow or
    /// round onto a boundary are clamped just inside it.
    pub fn from_transformed(theta: &TransformedParams) -> Self {
        let v = &theta.values;
        let positive = |x: f64| x.exp().clamp(f64::MIN_POSITIVE, f64::MAX);
        let nu = positive(v[0]);
        let eta = logistic(v[1]).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        let (alpha, beta) = if theta.family.has_shape() {
            (Some(positive(v[2])), positive(v[3]))
        } else {
            (None, positive(v[2]))
        };
        let kernel = ExcitationKernel::new(theta.family, eta, alpha, beta)
            .expect("clamped transformed coordinates are always valid");
        Self { nu, kernel }
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Unconstrained coordinates `(log nu, logit eta, [log alpha], log beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedParams {
    family: KernelFamily,
    values: Vec<f64>,
}

impl TransformedParams {
    pub fn new(family: KernelFamily, values: Vec<f64>) -> Result<Self> {
        if values.len() != family.n_params() {
            return Err(Error::param(format!(
                "{family} model has {} transformed coordinates, got {}",
                family.n_params(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::param("transformed coordinates must not be NaN"));
        }
        Ok(Self { family, values })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_params(&self) -> HawkesParams {
        HawkesParams::from_transformed(self)
    }
}
