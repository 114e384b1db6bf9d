//! Exact Lipschitz reference solutions: planar rarefaction waves along a
//! coordinate axis, constant states, and the Oleinik one-sided slope diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::grid::SolutionField;
use crate::poly::Polynomial;

/// Centered rarefaction fan along axis `e`, shifted back in time by `t0` so the
/// profile is globally Lipschitz from `t = 0`:
/// `u(t, x) = a_e^{-1}((x_e - x0) / (t + t0))` clamped to `[u_left, u_right]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RarefactionWave {
    pub axis: usize,
    #[serde(rename = "uL")]
    pub u_left: f64,
    #[serde(rename = "uR")]
    pub u_right: f64,
    pub t0: f64,
    pub x0: f64,
    velocity: Polynomial,
    /// `inf a_e'` over `[u_left, u_right]`
    min_slope: f64,
}

impl RarefactionWave {
    pub fn new(flux: &FluxModel, axis: usize, u_left: f64, u_right: f64, t0: f64, x0: f64) -> Result<Self> {
        if axis >= flux.dimension() {
            return Err(Error::config(format!(
                "wave axis {axis} out of range for a {}-component flux",
                flux.dimension()
            )));
        }
        if !(u_left < u_right) {
            return Err(Error::config("rarefaction needs uL < uR"));
        }
        if !(t0 > 0.0) || !x0.is_finite() {
            return Err(Error::config("rarefaction needs t0 > 0 and finite x0"));
        }
        let velocity = flux.velocity_component(axis).clone();
        let min_slope = velocity.derivative().min_on(u_left, u_right);
        if !(min_slope > 0.0) {
            return Err(Error::config(format!(
                "flux component {axis} is not strictly convex on [{u_left}, {u_right}]"
            )));
        }
        Ok(RarefactionWave {
            axis,
            u_left,
            u_right,
            t0,
            x0,
            velocity,
            min_slope,
        })
    }

    fn inverse_velocity(&self, xi: f64) -> f64 {
        let c = self.velocity.coeffs();
        if self.velocity.degree() == 1 {
            return ((xi - c[0]) / c[1]).clamp(self.u_left, self.u_right);
        }
        let (mut lo, mut hi) = (self.u_left, self.u_right);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if self.velocity.eval(mid) < xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn evaluate(&self, t: f64, x: &[f64]) -> f64 {
        let xi = (x[self.axis] - self.x0) / (t + self.t0);
        if xi <= self.velocity.eval(self.u_left) {
            self.u_left
        } else if xi >= self.velocity.eval(self.u_right) {
            self.u_right
        } else {
            self.inverse_velocity(xi)
        }
    }

    /// `sup_x |grad u(t, .)| = 1 / ((t + t0) inf a_e')`
    pub fn lipschitz_envelope(&self, t: f64) -> f64 {
        1.0 / ((t + self.t0) * self.min_slope)
    }

    /// `sup_t t * lipschitz_envelope(t)`, approached as `t -> infinity`.
    pub fn gamma_bar(&self) -> f64 {
        1.0 / self.min_slope
    }
}

/// Lipschitz reference solution used as the stability baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Reference {
    Rarefaction(RarefactionWave),
    Constant { value: f64 },
}

impl Reference {
    pub fn evaluate(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            Reference::Rarefaction(w) => w.evaluate(t, x),
            Reference::Constant { value } => *value,
        }
    }

    pub fn gamma_bar(&self) -> f64 {
        match self {
            Reference::Rarefaction(w) => w.gamma_bar(),
            Reference::Constant { .. } => 0.0,
        }
    }

    pub fn lipschitz_envelope(&self, t: f64) -> f64 {
        match self {
            Reference::Rarefaction(w) => w.lipschitz_envelope(t),
            Reference::Constant { .. } => 0.0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Reference::Rarefaction(w) => w.u_left.abs().max(w.u_right.abs()),
            Reference::Constant { value } => value.abs(),
        }
    }

    /// Value range `[min, max]` of the reference.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Reference::Rarefaction(w) => (w.u_left, w.u_right),
            Reference::Constant { value } => (*value, *value),
        }
    }
}

/// `sup` over snapshots with `t > 0` and adjacent cells of
/// `t (u_{i+1} - u_i)_+ / dx * inf A''`. The Oleinik bound predicts `<= 1`.
pub fn oleinik_ratio(trajectory: &[SolutionField], flux: &FluxModel) -> Result<f64> {
    if flux.dimension() != 1 {
        return Err(Error::config("Oleinik diagnostic is one-dimensional"));
    }
    let curvature = flux.convexity(0);
    if !(curvature > 0.0) {
        return Err(Error::config("Oleinik diagnostic needs a strictly convex flux"));
    }
    let mut ratio = 0.0f64;
    for field in trajectory.iter().filter(|f| f.time > 0.0) {
        if field.grid.dimension() != 1 {
            return Err(Error::config("Oleinik diagnostic is one-dimensional"));
        }
        let dx = field.grid.spacing(0);
        let slope = field
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).max(0.0))
            .fold(0.0, f64::max)
            / dx;
        ratio = ratio.max(field.time * slope * curvature);
    }
    Ok(ratio)
}
