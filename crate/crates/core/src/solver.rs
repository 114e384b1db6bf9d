//! Unsplit forward-Euler finite-volume solver with monotone two-point fluxes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{FluxModel, UpwindSplit};
use crate::grid::{Boundary, Grid, SolutionField};
use crate::quad::{GAUSS4_NODES, GAUSS4_WEIGHTS};
use crate::scheme::Scheme;
use crate::waves::Reference;

/// Snapshots of one run, in time order.
pub type Trajectory = Vec<SolutionField>;

const PAR_CHUNK: usize = 2048;

/// Compactly supported perturbation `amplitude (1 - s^2)^3` with
/// `s = |x - center| / (width / 2)`; `width` is the full support diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub width: f64,
    pub center: Vec<f64>,
}

impl Bump {
    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        let s2 = r2 / (0.25 * self.width * self.width);
        if s2 >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - s2).powi(3)
        }
    }

    /// `∫ |bump|` in dimension `d` (1 or 2).
    pub fn l1_mass(&self, d: usize) -> f64 {
        let r = 0.5 * self.width;
        let a = self.amplitude.abs();
        match d {
            // ∫_{-1}^{1} (1 - s^2)^3 ds = 32/35
            1 => a * r * 32.0 / 35.0,
            // 2π ∫_0^1 (1 - s^2)^3 s ds = π/4
            _ => a * r * r * std::f64::consts::PI / 4.0,
        }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.center.len() != grid.dimension() {
            return Err(Error::config("bump center has the wrong dimension"));
        }
        if !(self.width > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::config("bump needs positive width and finite amplitude"));
        }
        for (k, c) in self.center.iter().enumerate() {
            let a = grid.axis(k);
            if c - 0.5 * self.width <= a.lo || c + 0.5 * self.width >= a.hi {
                return Err(Error::geometry("bump support leaves the domain"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialData {
    Constant {
        value: f64,
    },
    /// `left` for `x_axis < position`, `right` otherwise.
    Riemann {
        left: f64,
        right: f64,
        axis: usize,
        position: f64,
    },
    /// The reference solution at `t = 0`.
    Wave {
        reference: Reference,
    },
    /// Reference at `t = 0` plus a compact bump.
    RarefactionPlusBump {
        reference: Reference,
        bump: Bump,
    },
    /// Cell averages given directly, row-major.
    Table {
        values: Vec<f64>,
    },
}

impl InitialData {
    fn point_value(&self, x: &[f64]) -> f64 {
        match self {
            InitialData::Constant { value } => *value,
            InitialData::Riemann {
                left,
                right,
                axis,
                position,
            } => {
                if x[*axis] < *position {
                    *left
                } else {
                    *right
                }
            }
            InitialData::Wave { reference } => reference.evaluate(0.0, x),
            InitialData::RarefactionPlusBump { reference, bump } => {
                reference.evaluate(0.0, x) + bump.value(x)
            }
            InitialData::Table { .. } => unreachable!("tables carry cell averages"),
        }
    }

    /// Cell averages by the tensor four-point Gauss rule, clamped to the range
    /// of the sampled point values so averages never leave the data range.
    pub fn cell_averages(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            InitialData::Table { values } => {
                if values.len() != grid.len() {
                    return Err(Error::config(format!(
                        "table has {} values for {} cells",
                        values.len(),
                        grid.len()
                    )));
                }
                return Ok(values.clone());
            }
            InitialData::Riemann { axis, .. } if *axis >= grid.dimension() => {
                return Err(Error::config("Riemann axis out of range"));
            }
            InitialData::RarefactionPlusBump { bump, .. } => bump.check(grid)?,
            _ => {}
        }
        let d = grid.dimension();
        let values = (0..grid.len())
            .into_par_iter()
            .with_min_len(PAR_CHUNK)
            .map(|idx| {
                let c = grid.cell_center(idx);
                let h: Vec<f64> = (0..d).map(|k| 0.5 * grid.spacing(k)).collect();
                let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
                let mut visit = |x: &[f64], w: f64| {
                    let v = self.point_value(x);
                    sum += w * v;
                    lo = lo.min(v);
                    hi = hi.max(v);
                };
                if d == 1 {
                    for (g, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                        visit(&[c[0] + h[0] * g], 0.5 * w);
                    }
                } else {
                    for (g0, w0) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                        for (g1, w1) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                            visit(&[c[0] + h[0] * g0, c[1] + h[1] * g1], 0.25 * w0 * w1);
                        }
                    }
                }
                sum.clamp(lo, hi)
            })
            .collect();
        Ok(values)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveConfig {
    pub flux: FluxModel,
    pub grid: Grid,
    pub init: InitialData,
    pub end_time: f64,
    pub cfl: f64,
    pub snapshots: Vec<f64>,
    pub scheme: Scheme,
}

/// `count + 1` equally spaced times from 0 to `end`.
pub fn uniform_times(end: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| end * i as f64 / count as f64).collect()
}

/// 0.45 in one dimension, 0.22 in two.
pub fn default_cfl(dimension: usize) -> f64 {
    if dimension <= 1 {
        0.45
    } else {
        0.22
    }
}

impl SolveConfig {
    pub fn new(
        flux: FluxModel,
        grid: Grid,
        init: InitialData,
        end_time: f64,
        cfl: f64,
        snapshots: Vec<f64>,
        scheme: Scheme,
    ) -> Result<Self> {
        if flux.dimension() != grid.dimension() {
            return Err(Error::config(format!(
                "flux has {} components but the grid is {}-dimensional",
                flux.dimension(),
                grid.dimension()
            )));
        }
        if !(end_time > 0.0 && end_time.is_finite()) {
            return Err(Error::config("end time must be positive"));
        }
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(Error::config(format!("CFL number {cfl} outside (0, 1)")));
        }
        if snapshots.iter().any(|t| !(0.0..=end_time).contains(t))
            || snapshots.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::config(
                "snapshot times must be sorted within [0, end time]",
            ));
        }
        Ok(SolveConfig {
            flux,
            grid,
            init,
            end_time,
            cfl,
            snapshots,
            scheme,
        })
    }

    /// `cfl * min spacing / max_j sup_I |a_j|`; infinite for a zero velocity.
    pub fn time_step(&self) -> f64 {
        let speed = (0..self.flux.dimension())
            .map(|j| self.flux.max_speed(j))
            .fold(0.0, f64::max);
        if speed == 0.0 {
            f64::INFINITY
        } else {
            self.cfl * self.grid.min_spacing() / speed
        }
    }

    /// `sum_j dt/dx_j sup_I |a_j| <= 1`, the monotonicity condition.
    pub fn check_stability(&self, dt: f64) -> Result<()> {
        let courant: f64 = (0..self.grid.dimension())
            .map(|j| dt / self.grid.spacing(j) * self.flux.max_speed(j))
            .sum();
        if !(dt > 0.0) || courant > 1.0 + 1e-12 {
            return Err(Error::config(format!(
                "time step {dt} violates the stability bound (Courant sum {courant})"
            )));
        }
        Ok(())
    }

    pub fn initial_field(&self) -> Result<SolutionField> {
        let values = self.init.cell_averages(&self.grid)?;
        let iv = self.flux.interval();
        if let Some(v) = values.iter().find(|v| !iv.contains(**v)) {
            return Err(Error::config(format!(
                "initial value {v} outside flux interval [{}, {}]",
                iv.lo, iv.hi
            )));
        }
        SolutionField::new(self.grid.clone(), values, 0.0)
    }
}

fn interface(split: &UpwindSplit, scheme: Scheme, l: f64, r: f64) -> f64 {
    match scheme {
        Scheme::EngquistOsher => split.interface(l, r),
        Scheme::LaxFriedrichs => split.rusanov(l, r),
    }
}

struct AxisStencil {
    stride: usize,
    cells: usize,
    inner: usize,
    boundary: Boundary,
}

impl AxisStencil {
    fn new(grid: &Grid, k: usize) -> Self {
        let inner = if grid.dimension() == 2 && k == 0 {
            grid.cells(1)
        } else {
            1
        };
        AxisStencil {
            stride: inner,
            cells: grid.cells(k),
            inner,
            boundary: grid.axis(k).boundary,
        }
    }

    #[inline]
    fn position(&self, idx: usize) -> usize {
        (idx / self.inner) % self.cells
    }

    /// Right neighbour; outflow ghosts copy the cell itself.
    #[inline]
    fn right(&self, idx: usize) -> usize {
        if self.position(idx) + 1 < self.cells {
            idx + self.stride
        } else if self.boundary == Boundary::Periodic {
            idx - (self.cells - 1) * self.stride
        } else {
            idx
        }
    }

    #[inline]
    fn left(&self, idx: usize) -> usize {
        if self.position(idx) > 0 {
            idx - self.stride
        } else if self.boundary == Boundary::Periodic {
            idx + (self.cells - 1) * self.stride
        } else {
            idx
        }
    }
}

/// Advance cell averages by `dt` without the stability check.
fn advance(u: &[f64], config: &SolveConfig, dt: f64) -> Vec<f64> {
    let grid = &config.grid;
    let stencils: Vec<AxisStencil> = (0..grid.dimension()).map(|k| AxisStencil::new(grid, k)).collect();
    // Flux through the right face of every cell, per axis.
    let faces: Vec<Vec<f64>> = stencils
        .iter()
        .enumerate()
        .map(|(k, st)| {
            let split = config.flux.upwind(k);
            (0..u.len())
                .into_par_iter()
                .with_min_len(PAR_CHUNK)
                .map(|idx| interface(split, config.scheme, u[idx], u[st.right(idx)]))
                .collect()
        })
        .collect();
    let ratios: Vec<f64> = (0..grid.dimension()).map(|k| dt / grid.spacing(k)).collect();
    (0..u.len())
        .into_par_iter()
        .with_min_len(PAR_CHUNK)
        .map(|idx| {
            let mut update = 0.0;
            let (mut lo, mut hi) = (u[idx], u[idx]);
            for (k, st) in stencils.iter().enumerate() {
                let (l, r) = (st.left(idx), st.right(idx));
                let left_face = if l == idx {
                    interface(config.flux.upwind(k), config.scheme, u[idx], u[idx])
                } else {
                    faces[k][l]
                };
                update += ratios[k] * (faces[k][idx] - left_face);
                lo = lo.min(u[l]).min(u[r]);
                hi = hi.max(u[l]).max(u[r]);
            }
            // A monotone update lies in the stencil range; the clamp only
            // removes rounding excursions.
            (u[idx] - update).clamp(lo, hi)
        })
        .collect()
}

/// One step of size `dt`, rejected if it breaks the stability bound.
pub fn step_by(field: &SolutionField, config: &SolveConfig, dt: f64) -> Result<SolutionField> {
    if field.grid != config.grid {
        return Err(Error::config("field grid differs from the configured grid"));
    }
    config.check_stability(dt)?;
    let values = advance(&field.values, config, dt);
    SolutionField::new(field.grid.clone(), values, field.time + dt)
}

/// One step at the configured CFL time step.
pub fn step(field: &SolutionField, config: &SolveConfig) -> Result<SolutionField> {
    let dt = config.time_step();
    if !dt.is_finite() {
        return Ok(SolutionField {
            time: f64::INFINITY,
            ..field.clone()
        });
    }
    step_by(field, config, dt)
}

/// Evolve `initial` and record the configured snapshot times, landing on each exactly.
pub fn solve_from(config: &SolveConfig, initial: SolutionField) -> Result<Trajectory> {
    if initial.grid != config.grid {
        return Err(Error::config(
            "initial field grid differs from the configured grid",
        ));
    }
    let dt = config.time_step();
    if dt.is_finite() {
        config.check_stability(dt)?;
    }
    let mut out = Vec::with_capacity(config.snapshots.len());
    let mut t = initial.time;
    let mut values = initial.values;
    for &ts in &config.snapshots {
        while t < ts {
            let h = dt.min(ts - t);
            values = advance(&values, config, h);
            t = if t + h >= ts || h == ts - t { ts } else { t + h };
        }
        out.push(SolutionField::new(config.grid.clone(), values.clone(), t)?);
    }
    Ok(out)
}

pub fn solve(config: &SolveConfig) -> Result<Trajectory> {
    if config.snapshots.is_empty() {
        return Ok(Vec::new());
    }
    solve_from(config, config.initial_field()?)
}
