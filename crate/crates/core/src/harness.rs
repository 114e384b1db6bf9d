//! Decay experiments: a perturbed wave and its unperturbed numerical
//! counterpart are advanced with identical time steps and compared on a
//! window the boundary cannot reach.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{bound_envelope, optimize_gamma, ExponentSet};
use crate::fit::power_law;
use crate::flux::{FluxModel, Interval};
use crate::grid::{Boundary, Grid, SolutionField};
use crate::scheme::Scheme;
use crate::solver::{default_cfl, solve, Bump, InitialData, SolveConfig, Trajectory};
use crate::waves::{RarefactionWave, Reference};

pub const DEFAULT_RATE_TOLERANCE: f64 = 0.05;
const CONTRACTION_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    /// Flux shape; its interval is replaced by the range of the initial data.
    pub flux: FluxModel,
    pub grid: Grid,
    pub scheme: Scheme,
    pub cfl: f64,
    pub reference: Reference,
    pub bump: Bump,
    /// Increasing positive measurement times; the last one ends the run.
    pub times: Vec<f64>,
    pub fit_window: (f64, f64),
    pub exponents: ExponentSet,
    pub rate_tolerance: f64,
}

impl ExperimentConfig {
    /// 1D Burgers rarefaction `0 -> 1` (`t0 = 1`, `x0 = 0`) on `[-8, 24]` with a
    /// bump of amplitude 0.1 and width 0.5 on the right state, measured at
    /// `t = 1, 2, 4, 8, 16` and fitted over `[4, 16]`.
    pub fn flagship(cells: usize) -> Result<Self> {
        let flux = FluxModel::burgers(1, Interval::new(0.0, 1.0)?)?;
        let wave = RarefactionWave::new(&flux, 0, 0.0, 1.0, 1.0, 0.0)?;
        Self::standard_1d(flux, Reference::Rarefaction(wave), cells)
    }

    /// The same bump on the flat state `u = 0.5`.
    pub fn flat_state(cells: usize) -> Result<Self> {
        let flux = FluxModel::burgers(1, Interval::new(0.0, 1.0)?)?;
        Self::standard_1d(flux, Reference::Constant { value: 0.5 }, cells)
    }

    fn standard_1d(flux: FluxModel, reference: Reference, cells: usize) -> Result<Self> {
        Ok(ExperimentConfig {
            flux,
            grid: Grid::uniform_1d(cells, -8.0, 24.0, Boundary::Outflow)?,
            scheme: Scheme::EngquistOsher,
            cfl: default_cfl(1),
            reference,
            bump: Bump {
                amplitude: 0.1,
                width: 0.5,
                center: vec![2.0],
            },
            times: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            fit_window: (4.0, 16.0),
            exponents: optimize_gamma(1.0, 1, 0.01)?,
            rate_tolerance: DEFAULT_RATE_TOLERANCE,
        })
    }

    /// Smallest interval holding both initial data.
    pub fn data_interval(&self) -> Result<Interval> {
        let (lo, hi) = self.reference.range();
        let a = self.bump.amplitude;
        if lo == hi && a == 0.0 {
            return Interval::new(lo - 0.5, hi + 0.5);
        }
        Interval::new(lo + a.min(0.0), hi + a.max(0.0))
    }

    /// `max(‖u0‖∞, ‖ũ0‖∞)`
    pub fn lambda(&self) -> f64 {
        let (lo, hi) = self.reference.range();
        let a = self.bump.amplitude;
        lo.abs()
            .max(hi.abs())
            .max((lo + a.min(0.0)).abs())
            .max((hi + a.max(0.0)).abs())
    }

    fn solve_config(&self, init: InitialData) -> Result<SolveConfig> {
        let flux = self.flux.with_interval(self.data_interval()?)?;
        let mut snapshots = vec![0.0];
        snapshots.extend(&self.times);
        let end = *self
            .times
            .last()
            .ok_or_else(|| Error::config("no measurement times"))?;
        SolveConfig::new(
            flux,
            self.grid.clone(),
            init,
            end,
            self.cfl,
            snapshots,
            self.scheme,
        )
    }

    /// Configuration of the perturbed run.
    pub fn perturbed_config(&self) -> Result<SolveConfig> {
        self.solve_config(InitialData::RarefactionPlusBump {
            reference: self.reference.clone(),
            bump: self.bump.clone(),
        })
    }

    /// Configuration of the unperturbed run.
    pub fn reference_config(&self) -> Result<SolveConfig> {
        self.solve_config(InitialData::Wave {
            reference: self.reference.clone(),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times[0] <= 0.0 || self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("measurement times must be positive and increasing"));
        }
        let (a, b) = self.fit_window;
        let inside = self.times.iter().filter(|t| (a..=b).contains(*t)).count();
        if inside < 3 {
            return Err(Error::config(
                "fit window holds fewer than three measurement times",
            ));
        }
        if !self.exponents.valid {
            return Err(Error::config("exponent set is not valid"));
        }
        let min_dx = self.grid.min_spacing();
        if self.bump.amplitude != 0.0 && self.bump.width / min_dx < 16.0 {
            return Err(Error::config("grid resolves the bump with fewer than 16 cells"));
        }
        Ok(())
    }
}

mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    /// `‖u - ũ‖∞` over the uncontaminated window.
    pub linf_diff: Vec<f64>,
    /// `‖u - ũ‖₁` over the whole grid.
    pub l1_diff: Vec<f64>,
    /// `‖ũ_numerical - ũ_exact‖∞` over the same window.
    pub reference_error: Vec<f64>,
    pub initial_l1: f64,
    #[serde(with = "inf_as_string")]
    pub fitted_rate: f64,
    /// `n gamma`
    pub gamma_bound: f64,
    pub envelope_constant: f64,
    /// Envelope at `C = envelope_constant`.
    pub bound_envelope: Vec<f64>,
    pub lambda: f64,
    pub gamma_bar: f64,
    pub fit_window: (f64, f64),
    pub cells: usize,
    pub pass: bool,
    pub l1_nonincreasing: bool,
    pub max_principle: bool,
}

/// `-slope` of the least-squares line through `(log t, log value)`.
pub fn fit_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::fit(format!(
            "need at least three points, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::fit("times must be strictly increasing"));
    }
    let (p, _) = power_law(times, values)?;
    Ok(-p)
}

/// Discrete L1 differences per snapshot of two trajectories.
pub fn contraction_audit(a: &[SolutionField], b: &[SolutionField]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::config("trajectories have different snapshot counts"));
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if x.time != y.time {
                return Err(Error::config("trajectories are sampled at different times"));
            }
            x.l1_distance(y)
        })
        .collect()
}

/// Nonincreasing within `1e-12` relative to the first entry.
pub fn is_nonincreasing(series: &[f64]) -> bool {
    is_nonincreasing_within(series, series.first().copied().unwrap_or(0.0).abs())
}

/// Nonincreasing within `1e-12 * scale`. Rounding in the cell updates is
/// proportional to the size of the fields, so long runs of a small difference
/// are audited against the L1 norm of the fields themselves.
pub fn is_nonincreasing_within(series: &[f64], scale: f64) -> bool {
    let slack = CONTRACTION_RTOL * scale;
    series.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// Every snapshot stays within the range of the first one.
pub fn max_principle_holds(trajectory: &[SolutionField]) -> bool {
    let Some(first) = trajectory.first() else {
        return true;
    };
    let (lo, hi) = (first.min(), first.max());
    trajectory.iter().all(|f| f.min() >= lo && f.max() <= hi)
}

/// Cells whose centres lie in `[lo + t a+, hi - t a-]` along every axis, where
/// `a±` are the fastest signal speeds entering from each side.
fn interior_cells(grid: &Grid, flux: &FluxModel, t: f64) -> Result<Vec<usize>> {
    let mut ranges = Vec::new();
    for k in 0..grid.dimension() {
        let axis = grid.axis(k);
        if axis.boundary == Boundary::Periodic {
            ranges.push((f64::NEG_INFINITY, f64::INFINITY));
            continue;
        }
        let (right, left) = flux.directional_speeds(k);
        let (a, b) = (axis.lo + t * right, axis.hi - t * left);
        if !(a < b) {
            return Err(Error::geometry(format!("interior window empty at t = {t}")));
        }
        ranges.push((a, b));
    }
    let cells: Vec<usize> = (0..grid.len())
        .filter(|&idx| {
            grid.cell_center(idx)
                .iter()
                .zip(&ranges)
                .all(|(x, (a, b))| *a <= *x && *x <= *b)
        })
        .collect();
    if cells.is_empty() {
        return Err(Error::geometry(format!("interior window empty at t = {t}")));
    }
    Ok(cells)
}

pub struct DecayRun {
    pub report: DecayReport,
    pub perturbed: Trajectory,
    pub reference: Trajectory,
}

/// Run the experiment and keep both trajectories.
pub fn run_decay_experiment_full(config: &ExperimentConfig) -> Result<DecayRun> {
    config.validate()?;
    let pert_cfg = config.perturbed_config()?;
    let ref_cfg = config.reference_config()?;
    let (perturbed, reference) = rayon::join(|| solve(&pert_cfg), || solve(&ref_cfg));
    let (perturbed, reference) = (perturbed?, reference?);
    let grid = &config.grid;
    let flux = &pert_cfg.flux;

    let l1_all = contraction_audit(&perturbed, &reference)?;
    let initial_l1 = l1_all[0];
    let (mut linf, mut ref_err) = (Vec::new(), Vec::new());
    for (p, r) in perturbed[1..].iter().zip(&reference[1..]) {
        let cells = interior_cells(grid, flux, p.time)?;
        let mut d = 0.0f64;
        let mut e = 0.0f64;
        for idx in cells {
            d = d.max((p.values[idx] - r.values[idx]).abs());
            let exact = config.reference.evaluate(p.time, &grid.cell_center(idx));
            e = e.max((r.values[idx] - exact).abs());
        }
        linf.push(d);
        ref_err.push(e);
    }

    let (a, b) = config.fit_window;
    let window: Vec<usize> = (0..config.times.len())
        .filter(|&i| (a..=b).contains(&config.times[i]))
        .collect();
    let fitted_rate = if window.iter().any(|&i| linf[i] == 0.0) {
        f64::INFINITY
    } else {
        let ts: Vec<f64> = window.iter().map(|&i| config.times[i]).collect();
        let vs: Vec<f64> = window.iter().map(|&i| linf[i]).collect();
        fit_rate(&ts, &vs)?
    };

    let lambda = config.lambda();
    let gamma_bar = config.reference.gamma_bar();
    let exps = &config.exponents;
    let unit: Vec<f64> = config
        .times
        .iter()
        .map(|&t| bound_envelope(exps, lambda, gamma_bar, initial_l1, t, 1.0))
        .collect::<Result<_>>()?;
    let envelope_constant = window
        .iter()
        .map(|&i| if unit[i] > 0.0 { linf[i] / unit[i] } else { 0.0 })
        .fold(0.0, f64::max);
    let bound = unit.iter().map(|u| u * envelope_constant).collect();
    let gamma_bound = exps.decay_rate();
    let max_principle = max_principle_holds(&perturbed) && perturbed.iter().all(|f| f.sup_norm() <= lambda);
    let report = DecayReport {
        times: config.times.clone(),
        linf_diff: linf,
        l1_diff: l1_all[1..].to_vec(),
        reference_error: ref_err,
        initial_l1,
        fitted_rate,
        gamma_bound,
        envelope_constant,
        bound_envelope: bound,
        lambda,
        gamma_bar,
        fit_window: config.fit_window,
        cells: grid.len(),
        pass: fitted_rate >= gamma_bound - config.rate_tolerance,
        l1_nonincreasing: is_nonincreasing_within(
            &l1_all,
            perturbed[0].l1_norm().max(reference[0].l1_norm()),
        ),
        max_principle,
    };
    Ok(DecayRun {
        report,
        perturbed,
        reference,
    })
}

pub fn run_decay_experiment(config: &ExperimentConfig) -> Result<DecayReport> {
    run_decay_experiment_full(config).map(|r| r.report)
}
