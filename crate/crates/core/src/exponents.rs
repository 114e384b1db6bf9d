//! Exponent algebra of the L-infinity stability estimate and the De Giorgi
//! recurrence. All arithmetic is plain double precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `theta = alpha / (alpha + 4)`, `beta = (1 - theta)/2 + delta`,
/// `gamma = delta / (beta + theta)`, `eta = theta / (beta + theta)` and
/// `gamma0 = 1 / (1 + n(n+1)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub alpha: f64,
    pub n: usize,
    pub theta: f64,
    pub delta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub gamma0: f64,
    /// `0 < delta < theta / (n + 1)`
    pub valid: bool,
}

impl ExponentSet {
    /// Exponent of `t` in the decay envelope.
    pub fn decay_rate(&self) -> f64 {
        self.n as f64 * self.gamma
    }

    /// Open upper limit on `delta`.
    pub fn delta_limit(&self) -> f64 {
        self.theta / (self.n as f64 + 1.0)
    }
}

pub fn compute_theta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1]")));
    }
    Ok(alpha / (alpha + 4.0))
}

pub fn gamma0(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    let n = n as f64;
    Ok(1.0 / (1.0 + n * (n + 1.0) / 2.0))
}

pub fn compute_exponents(alpha: f64, n: usize, delta: f64) -> Result<ExponentSet> {
    if !alpha.is_finite() || !delta.is_finite() {
        return Err(Error::domain("exponent inputs must be finite"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta = {delta} must be positive")));
    }
    let theta = compute_theta(alpha)?;
    let gamma0 = gamma0(n)?;
    let beta = (1.0 - theta) / 2.0 + delta;
    let gamma = delta / (beta + theta);
    let eta = theta / (beta + theta);
    Ok(ExponentSet {
        alpha,
        n,
        theta,
        delta,
        beta,
        gamma,
        eta,
        gamma0,
        valid: delta < theta / (n as f64 + 1.0),
    })
}

/// Exponents at `delta = (1 - margin) * theta / (n + 1)`. `gamma` increases with
/// `delta`, so this is the largest valid `gamma` at the given margin.
pub fn optimize_gamma(alpha: f64, n: usize, margin: f64) -> Result<ExponentSet> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::domain(format!("margin = {margin} outside (0, 1)")));
    }
    let theta = compute_theta(alpha)?;
    compute_exponents(alpha, n, (1.0 - margin) * theta / (n as f64 + 1.0))
}

/// `C (1 + gamma_bar)^eta * l1_norm^gamma / t^(n gamma)`.
///
/// `lambda` names the sup-norm bound the unknown constant depends on; the
/// constant itself is supplied by the caller (typically fitted to data).
pub fn bound_envelope(
    exps: &ExponentSet,
    _lambda: f64,
    gamma_bar: f64,
    l1_norm: f64,
    t: f64,
    c: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    if !(l1_norm >= 0.0) || !(c > 0.0) {
        return Err(Error::domain("need l1_norm >= 0 and C > 0"));
    }
    if !exps.valid {
        return Err(Error::domain("exponent set violates 0 < delta < theta/(n+1)"));
    }
    Ok(c * (1.0 + gamma_bar).powf(exps.eta) * l1_norm.powf(exps.gamma) / t.powf(exps.decay_rate()))
}
