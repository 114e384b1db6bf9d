//! Flux models `A: R -> R^n` with exact velocities `a = A'`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Closed admissible value range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Symmetric interval `[-lambda, lambda]`.
    pub fn symmetric(lambda: f64) -> Result<Self> {
        Interval::new(-lambda, lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FluxKind {
    /// `A_j(v) = v^(j+1) / (j+1)`.
    Burgers,
    /// `A_j(v) = v^(p+j-1) / (p+j-1)`, reducing to Burgers at `p = 2`.
    ConvexPower {
        power: u32,
    },
    CustomPoly,
}

/// Engquist–Osher splitting of one scalar flux component.
///
/// `plus(u) = A(lo) + ∫_lo^u max(a, 0)` and `minus(u) = ∫_lo^u min(a, 0)`, so
/// `plus + minus = A` and the interface flux is `plus(uL) + minus(uR)`.
/// On every piece between sign changes of `a` one of the two is constant, which
/// keeps both exactly monotone in floating point for monotone `A` evaluation.
#[derive(Debug, Clone)]
pub struct UpwindSplit {
    flux: Polynomial,
    breaks: Vec<f64>,
    signs: Vec<i8>,
    flux_at_break: Vec<f64>,
    plus_base: Vec<f64>,
    minus_base: Vec<f64>,
    velocity: Polynomial,
    /// Interior critical points of `a`, where `|a|` may peak.
    critical: Vec<f64>,
}

impl UpwindSplit {
    fn new(flux: &Polynomial, velocity: &Polynomial, iv: Interval) -> Self {
        let mut breaks = vec![iv.lo];
        breaks.extend(velocity.sign_changes(iv.lo, iv.hi));
        breaks.push(iv.hi);
        let pieces = breaks.len() - 1;
        let signs: Vec<i8> = (0..pieces)
            .map(|p| {
                let s = velocity.eval(0.5 * (breaks[p] + breaks[p + 1]));
                if s > 0.0 {
                    1
                } else if s < 0.0 {
                    -1
                } else {
                    0
                }
            })
            .collect();
        let flux_at_break: Vec<f64> = breaks.iter().map(|&b| flux.eval(b)).collect();
        let mut plus_base = vec![flux_at_break[0]];
        let mut minus_base = vec![0.0];
        for p in 0..pieces {
            let rise = flux_at_break[p + 1] - flux_at_break[p];
            let (dp, dm) = match signs[p] {
                1 => (rise, 0.0),
                -1 => (0.0, rise),
                _ => (0.0, 0.0),
            };
            plus_base.push(plus_base[p] + dp);
            minus_base.push(minus_base[p] + dm);
        }
        UpwindSplit {
            flux: flux.clone(),
            breaks,
            signs,
            flux_at_break,
            plus_base,
            minus_base,
            velocity: velocity.clone(),
            critical: velocity.derivative().sign_changes(iv.lo, iv.hi),
        }
    }

    #[inline]
    fn piece(&self, u: f64) -> usize {
        let inner = &self.breaks[1..self.breaks.len() - 1];
        inner.partition_point(|&b| b <= u)
    }

    #[inline]
    pub fn plus(&self, u: f64) -> f64 {
        let p = self.piece(u);
        if self.signs[p] > 0 {
            self.plus_base[p] + (self.flux.eval(u) - self.flux_at_break[p])
        } else {
            self.plus_base[p]
        }
    }

    #[inline]
    pub fn minus(&self, u: f64) -> f64 {
        let p = self.piece(u);
        if self.signs[p] < 0 {
            self.minus_base[p] + (self.flux.eval(u) - self.flux_at_break[p])
        } else {
            self.minus_base[p]
        }
    }

    /// `max |a|` over the closed interval spanned by `u` and `w`.
    pub fn local_speed(&self, u: f64, w: f64) -> f64 {
        let (lo, hi) = if u <= w { (u, w) } else { (w, u) };
        let mut s = self.velocity.eval(lo).abs().max(self.velocity.eval(hi).abs());
        for &c in &self.critical {
            if c > lo && c < hi {
                s = s.max(self.velocity.eval(c).abs());
            }
        }
        s
    }

    /// Local Lax–Friedrichs (Rusanov) interface flux.
    #[inline]
    pub fn rusanov(&self, left: f64, right: f64) -> f64 {
        let s = self.local_speed(left, right);
        0.5 * (self.flux.eval(left) + self.flux.eval(right)) - 0.5 * s * (right - left)
    }

    /// Engquist–Osher interface flux.
    #[inline]
    pub fn interface(&self, left: f64, right: f64) -> f64 {
        self.plus(left) + self.minus(right)
    }
}

/// A polynomial flux on an admissible interval together with its velocity
/// and Lipschitz bound `C1 = max_j sup_I |a_j|`.
#[derive(Debug, Clone, Serialize)]
pub struct FluxModel {
    kind: FluxKind,
    interval: Interval,
    components: Vec<Polynomial>,
    velocities: Vec<Polynomial>,
    lipschitz_bound: f64,
    #[serde(skip)]
    splits: Vec<UpwindSplit>,
}

impl FluxModel {
    /// Multi-dimensional Burgers flux `(v^2/2, v^3/3, ..., v^(n+1)/(n+1))`.
    pub fn burgers(n: usize, interval: Interval) -> Result<Self> {
        let comps = (0..n)
            .map(|j| Polynomial::monomial(j + 2, 1.0 / (j as f64 + 2.0)))
            .collect();
        Self::build(FluxKind::Burgers, comps, interval)
    }

    pub fn convex_power(power: u32, n: usize, interval: Interval) -> Result<Self> {
        if power < 2 {
            return Err(Error::config("convex-power flux needs power >= 2"));
        }
        let comps = (0..n)
            .map(|j| {
                let p = power as usize + j;
                Polynomial::monomial(p, 1.0 / p as f64)
            })
            .collect();
        Self::build(FluxKind::ConvexPower { power }, comps, interval)
    }

    /// One polynomial per spatial component, coefficients in ascending order.
    pub fn custom(components: Vec<Polynomial>, interval: Interval) -> Result<Self> {
        Self::build(FluxKind::CustomPoly, components, interval)
    }

    fn build(kind: FluxKind, components: Vec<Polynomial>, interval: Interval) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::config("flux needs at least one spatial component"));
        }
        if components
            .iter()
            .any(|c| c.coeffs().iter().any(|x| !x.is_finite()))
        {
            return Err(Error::config("flux coefficients must be finite"));
        }
        let velocities: Vec<Polynomial> = components.iter().map(Polynomial::derivative).collect();
        let lipschitz_bound = velocities
            .iter()
            .map(|a| a.max_abs_on(interval.lo, interval.hi))
            .fold(0.0, f64::max);
        let splits = components
            .iter()
            .zip(&velocities)
            .map(|(f, a)| UpwindSplit::new(f, a, interval))
            .collect();
        Ok(FluxModel {
            kind,
            interval,
            components,
            velocities,
            lipschitz_bound,
            splits,
        })
    }

    /// Same flux restricted to another admissible interval.
    pub fn with_interval(&self, interval: Interval) -> Result<Self> {
        Self::build(self.kind.clone(), self.components.clone(), interval)
    }

    pub fn kind(&self) -> &FluxKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn component(&self, j: usize) -> &Polynomial {
        &self.components[j]
    }

    pub fn velocity_component(&self, j: usize) -> &Polynomial {
        &self.velocities[j]
    }

    pub fn upwind(&self, j: usize) -> &UpwindSplit {
        &self.splits[j]
    }

    pub fn flux(&self, v: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(v)).collect()
    }

    /// `a(v)` without the admissibility check.
    pub fn velocity(&self, v: f64) -> Vec<f64> {
        self.velocities.iter().map(|a| a.eval(v)).collect()
    }

    /// `sup_I |a_j|`
    pub fn max_speed(&self, j: usize) -> f64 {
        self.velocities[j].max_abs_on(self.interval.lo, self.interval.hi)
    }

    /// `(sup_I max(a_j, 0), sup_I max(-a_j, 0))`: the fastest rightward and
    /// leftward signal speeds along axis `j`.
    pub fn directional_speeds(&self, j: usize) -> (f64, f64) {
        let a = &self.velocities[j];
        let (lo, hi) = (self.interval.lo, self.interval.hi);
        (a.max_on(lo, hi).max(0.0), (-a.min_on(lo, hi)).max(0.0))
    }

    /// `inf_I A_j''`, the convexity modulus of component `j`.
    pub fn convexity(&self, j: usize) -> f64 {
        self.velocities[j]
            .derivative()
            .min_on(self.interval.lo, self.interval.hi)
    }
}

/// Checked velocity evaluation: `a(v)` for `v` in the admissible interval.
pub fn eval_velocity(model: &FluxModel, v: f64) -> Result<Vec<f64>> {
    if !model.interval.contains(v) {
        return Err(Error::domain(format!(
            "v = {v} outside admissible interval [{}, {}]",
            model.interval.lo, model.interval.hi
        )));
    }
    Ok(model.velocity(v))
}
