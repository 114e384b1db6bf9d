//! TOML run descriptions for solves and decay experiments.
//!
//! ```toml
//! scheme = "engquist-osher"
//! [flux]
//! kind = "burgers"        # convex-power (with power) | custom-poly (with coeffs)
//! n = 1
//! interval = [0.0, 1.1]   # optional; defaults to the range of the initial data
//! [grid]
//! cells = 8192            # or one entry per axis
//! lo = -8.0
//! hi = 24.0
//! boundary = "outflow"
//! [init]
//! kind = "rarefaction-plus-bump"
//! [init.rarefaction]
//! axis = 0
//! uL = 0.0
//! uR = 1.0
//! t0 = 1.0
//! x0 = 0.0
//! [init.bump]
//! amplitude = 0.1
//! width = 0.5
//! center = [2.0]
//! [time]
//! end = 16.0
//! snapshots = [0.0, 4.0, 16.0]
//! [experiment]
//! times = [1.0, 2.0, 4.0, 8.0, 16.0]
//! fit_window = [4.0, 16.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{compute_exponents, optimize_gamma};
use crate::flux::{FluxModel, Interval};
use crate::grid::{Axis, Boundary, Grid};
use crate::harness::{ExperimentConfig, DEFAULT_RATE_TOLERANCE};
use crate::poly::Polynomial;
use crate::scheme::Scheme;
use crate::solver::{default_cfl, Bump, InitialData, SolveConfig};
use crate::waves::{RarefactionWave, Reference};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn expand(&self, d: usize) -> Result<Vec<T>> {
        match self {
            OneOrMany::One(v) => Ok(vec![v.clone(); d]),
            OneOrMany::Many(v) if v.len() == d => Ok(v.clone()),
            OneOrMany::Many(v) => Err(Error::Parse(format!(
                "expected {d} per-axis entries, found {}",
                v.len()
            ))),
        }
    }

    fn len(&self) -> Option<usize> {
        match self {
            OneOrMany::One(_) => None,
            OneOrMany::Many(v) => Some(v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    pub kind: String,
    #[serde(default = "one")]
    pub n: usize,
    pub power: Option<u32>,
    /// One ascending coefficient list per component.
    pub coeffs: Option<Vec<Vec<f64>>>,
    pub interval: Option<[f64; 2]>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cells: OneOrMany<usize>,
    pub lo: OneOrMany<f64>,
    pub hi: OneOrMany<f64>,
    #[serde(default = "outflow")]
    pub boundary: OneOrMany<Boundary>,
}

fn outflow() -> OneOrMany<Boundary> {
    OneOrMany::One(Boundary::Outflow)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RarefactionSection {
    #[serde(default)]
    pub axis: usize,
    #[serde(rename = "uL")]
    pub u_left: f64,
    #[serde(rename = "uR")]
    pub u_right: f64,
    #[serde(default = "unit")]
    pub t0: f64,
    #[serde(default)]
    pub x0: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: String,
    /// Constant state, or the background of a bump without a rarefaction.
    pub value: Option<f64>,
    #[serde(rename = "uL")]
    pub u_left: Option<f64>,
    #[serde(rename = "uR")]
    pub u_right: Option<f64>,
    pub axis: Option<usize>,
    pub position: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub rarefaction: Option<RarefactionSection>,
    pub bump: Option<Bump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub end: f64,
    pub cfl: Option<f64>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub times: Option<Vec<f64>>,
    pub fit_window: Option<[f64; 2]>,
    pub alpha: Option<f64>,
    pub margin: Option<f64>,
    pub delta: Option<f64>,
    pub rate_tolerance: Option<f64>,
}

/// Parsed run file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(default)]
    pub scheme: Scheme,
    pub flux: FluxSection,
    pub grid: GridSection,
    pub init: InitSection,
    pub time: Option<TimeSection>,
    pub experiment: Option<ExperimentSection>,
}

impl RunFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn dimension(&self) -> usize {
        let g = &self.grid;
        g.cells.len().or(g.lo.len()).or(g.hi.len()).unwrap_or(1)
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let d = self.dimension();
        let (cells, lo, hi, bc) = (
            self.grid.cells.expand(d)?,
            self.grid.lo.expand(d)?,
            self.grid.hi.expand(d)?,
            self.grid.boundary.expand(d)?,
        );
        Grid::new(
            (0..d)
                .map(|k| Axis::new(cells[k], lo[k], hi[k], bc[k]))
                .collect::<Result<_>>()?,
        )
    }

    /// Flux on `interval`, or on the configured interval when one is given.
    fn build_flux(&self, fallback: Interval) -> Result<FluxModel> {
        let f = &self.flux;
        let iv = match f.interval {
            Some([lo, hi]) => Interval::new(lo, hi)?,
            None => fallback,
        };
        match f.kind.as_str() {
            "burgers" => FluxModel::burgers(f.n, iv),
            "convex-power" => {
                let p = f
                    .power
                    .ok_or_else(|| Error::Parse("convex-power needs flux.power".into()))?;
                FluxModel::convex_power(p, f.n, iv)
            }
            "custom-poly" => {
                let c = f
                    .coeffs
                    .as_ref()
                    .ok_or_else(|| Error::Parse("custom-poly needs flux.coeffs".into()))?;
                FluxModel::custom(c.iter().cloned().map(Polynomial::new).collect(), iv)
            }
            other => Err(Error::Parse(format!("unknown flux kind `{other}`"))),
        }
    }

    fn reference(&self, shape: &FluxModel) -> Result<Reference> {
        let init = &self.init;
        match (&init.rarefaction, init.value) {
            (Some(r), _) => Ok(Reference::Rarefaction(RarefactionWave::new(
                shape, r.axis, r.u_left, r.u_right, r.t0, r.x0,
            )?)),
            (None, Some(value)) => Ok(Reference::Constant { value }),
            (None, None) => Err(Error::Parse(
                "init needs [init.rarefaction] or a constant `value`".into(),
            )),
        }
    }

    /// Reference solution described by `[init.rarefaction]` or `init.value`.
    pub fn reference_solution(&self) -> Result<Reference> {
        self.reference(&self.shape_flux()?)
    }

    /// Flux used only for its shape, on a wide interval.
    fn shape_flux(&self) -> Result<FluxModel> {
        self.build_flux(Interval::new(-1e3, 1e3)?)
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        let init = &self.init;
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| Error::Parse(format!("init needs `{k}`")));
        Ok(match init.kind.as_str() {
            "constant" => InitialData::Constant {
                value: need(init.value, "value")?,
            },
            "riemann" => InitialData::Riemann {
                left: need(init.u_left, "uL")?,
                right: need(init.u_right, "uR")?,
                axis: init.axis.unwrap_or(0),
                position: init.position.unwrap_or(0.0),
            },
            "rarefaction" => InitialData::Wave {
                reference: self.reference(&self.shape_flux()?)?,
            },
            "rarefaction-plus-bump" => InitialData::RarefactionPlusBump {
                reference: self.reference(&self.shape_flux()?)?,
                bump: init
                    .bump
                    .clone()
                    .ok_or_else(|| Error::Parse("rarefaction-plus-bump needs [init.bump]".into()))?,
            },
            "table" => InitialData::Table {
                values: init
                    .values
                    .clone()
                    .ok_or_else(|| Error::Parse("table needs `values`".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown init kind `{other}`"))),
        })
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let grid = self.build_grid()?;
        let init = self.initial_data()?;
        let time = self
            .time
            .as_ref()
            .ok_or_else(|| Error::Parse("solve needs a [time] section".into()))?;
        let values = init.cell_averages(&grid)?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let data = if lo < hi {
            Interval::new(lo, hi)?
        } else {
            Interval::new(lo - 0.5, hi + 0.5)?
        };
        let flux = self.build_flux(data)?;
        SolveConfig::new(
            flux,
            grid.clone(),
            init,
            time.end,
            time.cfl.unwrap_or(default_cfl(grid.dimension())),
            time.snapshots.clone(),
            self.scheme,
        )
    }

    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let shape = self.shape_flux()?;
        let reference = self.reference(&shape)?;
        let bump = match (self.init.kind.as_str(), &self.init.bump) {
            ("rarefaction-plus-bump", Some(b)) => b.clone(),
            _ => {
                return Err(Error::Parse(
                    "decay experiments need init.kind = \"rarefaction-plus-bump\" with [init.bump]".into(),
                ))
            }
        };
        let exp = self.experiment.clone().unwrap_or(ExperimentSection {
            times: None,
            fit_window: None,
            alpha: None,
            margin: None,
            delta: None,
            rate_tolerance: None,
        });
        let times = exp.times.unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0, 16.0]);
        let fit_window = match exp.fit_window {
            Some([a, b]) => (a, b),
            None => (
                times.first().copied().unwrap_or(0.0),
                times.last().copied().unwrap_or(0.0),
            ),
        };
        let n = shape.dimension();
        let alpha = match (exp.alpha, self.flux.kind.as_str()) {
            (Some(a), _) => a,
            (None, "burgers") => 1.0 / n as f64,
            _ => return Err(Error::Parse("experiment.alpha is required for this flux".into())),
        };
        let exponents = match exp.delta {
            Some(delta) => compute_exponents(alpha, n, delta)?,
            None => optimize_gamma(alpha, n, exp.margin.unwrap_or(0.01))?,
        };
        let grid = self.build_grid()?;
        let cfl = self
            .time
            .as_ref()
            .and_then(|t| t.cfl)
            .unwrap_or(default_cfl(grid.dimension()));
        let mut cfg = ExperimentConfig {
            flux: shape,
            grid,
            scheme: self.scheme,
            cfl,
            reference,
            bump,
            times,
            fit_window,
            exponents,
            rate_tolerance: exp.rate_tolerance.unwrap_or(DEFAULT_RATE_TOLERANCE),
        };
        if let Some([lo, hi]) = self.flux.interval {
            cfg.flux = cfg.flux.with_interval(Interval::new(lo, hi)?)?;
        }
        Ok(cfg)
    }
}
