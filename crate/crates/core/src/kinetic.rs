//! Kinetic function, the difference function `h`, level-set integrals,
//! De Giorgi energies and entropy-dissipation pairings on computed trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::grid::SolutionField;
use crate::quad::trapezoid_weights;
use crate::waves::Reference;

/// `1` if `0 <= v <= u`, `-1` if `u <= v <= 0`, otherwise `0`; `u = v = 0` gives `0`.
pub fn kinetic_function(u: f64, v: f64) -> i8 {
    if u > 0.0 && 0.0 <= v && v <= u {
        1
    } else if u < 0.0 && u <= v && v <= 0.0 {
        -1
    } else {
        0
    }
}

/// `h(v) = chi(u, v) - chi(u_tilde, v)`.
pub fn difference_function(u: f64, u_tilde: f64, v: f64) -> i8 {
    kinetic_function(u, v) - kinetic_function(u_tilde, v)
}

/// Uniform cell grid in the kinetic variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VGrid {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl VGrid {
    pub const DEFAULT_CELLS: usize = 2048;
    pub const PAD: f64 = 0.05;

    /// `DEFAULT_CELLS` cells on `[-lambda - PAD, lambda + PAD]`.
    pub fn for_bound(lambda: f64) -> Result<Self> {
        Self::with_cells(lambda, Self::DEFAULT_CELLS)
    }

    pub fn with_cells(lambda: f64, cells: usize) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) || cells == 0 {
            return Err(Error::domain("v-grid needs finite lambda >= 0 and cells > 0"));
        }
        Ok(VGrid {
            lo: -lambda - Self::PAD,
            hi: lambda + Self::PAD,
            cells,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let dv = self.spacing();
        (0..self.cells).map(move |i| self.lo + (i as f64 + 0.5) * dv)
    }
}

/// Midpoint-rule `∫ chi(u, v) dv`; recovers `u` to within one v-cell.
pub fn reconstruct_u(u: f64, grid: &VGrid) -> f64 {
    let count: i64 = grid.midpoints().map(|v| kinetic_function(u, v) as i64).sum();
    count as f64 * grid.spacing()
}

/// `(u - u_tilde - ell)_+`, the v-integral of `h` above `u_tilde + ell`.
pub fn level_set_integral(u: f64, u_tilde: f64, ell: f64, lambda: f64) -> Result<f64> {
    if !(u >= 0.0 && u_tilde >= 0.0 && ell >= 0.0) {
        return Err(Error::domain(
            "level-set integral needs nonnegative u, u_tilde, ell",
        ));
    }
    if u > lambda || u_tilde > lambda {
        return Err(Error::domain(format!("states exceed the bound {lambda}")));
    }
    Ok((u - u_tilde - ell).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticLevelData {
    #[serde(rename = "K")]
    pub k_height: f64,
    pub radii: Vec<f64>,
    pub levels: Vec<f64>,
    pub energies: Vec<f64>,
    /// `(t, x...)`
    pub center: Vec<f64>,
    pub scale: f64,
}

fn check_trajectory(trajectory: &[SolutionField]) -> Result<()> {
    let first = trajectory
        .first()
        .ok_or_else(|| Error::config("empty trajectory"))?;
    if trajectory
        .windows(2)
        .any(|w| w[1].time <= w[0].time || w[1].grid != first.grid)
    {
        return Err(Error::config(
            "trajectory snapshots must share a grid and have increasing times",
        ));
    }
    Ok(())
}

/// Space-time box containment of the Euclidean ball of radius `radius` about `center`.
fn check_ball(trajectory: &[SolutionField], center: &[f64], radius: f64) -> Result<()> {
    let grid = &trajectory[0].grid;
    if center.len() != grid.dimension() + 1 {
        return Err(Error::config("center must be (t, x...) in the grid dimension"));
    }
    let (t0, t1) = (trajectory[0].time, trajectory[trajectory.len() - 1].time);
    if center[0] - radius < t0 || center[0] + radius > t1 {
        return Err(Error::geometry(format!(
            "ball [{}, {}] in time leaves the recorded range [{t0}, {t1}]",
            center[0] - radius,
            center[0] + radius
        )));
    }
    for (k, a) in grid.axes().iter().enumerate() {
        let c = center[k + 1];
        if c - radius < a.lo || c + radius > a.hi {
            return Err(Error::geometry(format!("ball leaves the domain along axis {k}")));
        }
    }
    Ok(())
}

/// De Giorgi energies `A_k = ∫_{B_k} (u - u_tilde - ell_k)_+` with
/// `r_k = 1 + 2^-k`, `ell_k = K (1 - 2^-k)` for `k = 0..=k_max`, on Euclidean
/// space-time balls of radius `r_k * scale`. Cells count when their centre lies
/// in the ball; time quadrature is trapezoidal over the snapshots.
pub fn degiorgi_sequence(
    trajectory: &[SolutionField],
    reference: &Reference,
    center: &[f64],
    scale: f64,
    k_height: f64,
    k_max: usize,
) -> Result<KineticLevelData> {
    check_trajectory(trajectory)?;
    if !(scale > 0.0) || !(k_height > 0.0) {
        return Err(Error::config("scale and K must be positive"));
    }
    check_ball(trajectory, center, 2.0 * scale)?;
    let radii: Vec<f64> = (0..=k_max).map(|k| 1.0 + 0.5f64.powi(k as i32)).collect();
    let levels: Vec<f64> = (0..=k_max)
        .map(|k| k_height * (1.0 - 0.5f64.powi(k as i32)))
        .collect();
    let times: Vec<f64> = trajectory.iter().map(|f| f.time).collect();
    let weights = trapezoid_weights(&times);
    let grid = &trajectory[0].grid;
    let vol = grid.cell_volume();
    let outer = 2.0 * scale;

    // Per snapshot, the distance and the difference for every cell in the outer ball.
    let per_snapshot: Vec<Vec<f64>> = trajectory
        .par_iter()
        .zip(&weights)
        .map(|(field, &w)| {
            let mut sums = vec![0.0; k_max + 1];
            let dt = field.time - center[0];
            if dt.abs() > outer {
                return sums;
            }
            for (idx, &u) in field.values.iter().enumerate() {
                let x = grid.cell_center(idx);
                let rho2 = dt * dt
                    + x.iter()
                        .zip(&center[1..])
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum::<f64>();
                if rho2 > outer * outer {
                    continue;
                }
                let diff = u - reference.evaluate(field.time, &x);
                for k in 0..=k_max {
                    let r = radii[k] * scale;
                    let term = if rho2 <= r * r {
                        (diff - levels[k]).max(0.0)
                    } else {
                        0.0
                    };
                    sums[k] += w * vol * term;
                }
            }
            sums
        })
        .collect();
    let mut energies = vec![0.0; k_max + 1];
    for sums in &per_snapshot {
        for (e, s) in energies.iter_mut().zip(sums) {
            *e += s;
        }
    }
    Ok(KineticLevelData {
        k_height,
        radii,
        levels,
        energies,
        center: center.to_vec(),
        scale,
    })
}

/// Quintic smoothstep `6z^5 - 15z^4 + 10z^3` on `[0, 1]`.
fn smoothstep(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    z * z * z * (z * (6.0 * z - 15.0) + 10.0)
}

fn smoothstep_slope(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        30.0 * z * z * (1.0 - z) * (1.0 - z)
    }
}

/// Tensor-product test function in `(t, x...)`: each factor equals one on
/// `|s| <= plateau` and falls to zero at `|s| = 1` through the quintic
/// smoothstep, where `s = (y - center) / halfwidth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothBump {
    pub center: Vec<f64>,
    pub halfwidths: Vec<f64>,
    #[serde(default)]
    pub plateau: f64,
}

impl SmoothBump {
    pub fn new(center: Vec<f64>, halfwidths: Vec<f64>, plateau: f64) -> Result<Self> {
        if center.len() != halfwidths.len() || center.len() < 2 {
            return Err(Error::config(
                "bump needs matching (t, x...) center and half-widths",
            ));
        }
        if halfwidths.iter().any(|h| !(*h > 0.0)) || !(0.0..1.0).contains(&plateau) {
            return Err(Error::config(
                "bump needs positive half-widths and plateau in [0, 1)",
            ));
        }
        Ok(SmoothBump {
            center,
            halfwidths,
            plateau,
        })
    }

    /// Factor value and derivative along coordinate `k`.
    fn factor(&self, k: usize, y: f64) -> (f64, f64) {
        let h = self.halfwidths[k];
        let s = (y - self.center[k]) / h;
        let a = s.abs();
        if a >= 1.0 {
            return (0.0, 0.0);
        }
        if a <= self.plateau {
            return (1.0, 0.0);
        }
        let z = (1.0 - a) / (1.0 - self.plateau);
        let dz_dy = -s.signum() / ((1.0 - self.plateau) * h);
        (smoothstep(z), smoothstep_slope(z) * dz_dy)
    }

    /// `∫ factor_k`, equal to `halfwidth * (1 + plateau)`.
    pub fn factor_integral(&self, k: usize) -> f64 {
        self.halfwidths[k] * (1.0 + self.plateau)
    }

    fn check_inside(&self, trajectory: &[SolutionField]) -> Result<()> {
        let grid = &trajectory[0].grid;
        if self.center.len() != grid.dimension() + 1 {
            return Err(Error::config("bump must be (t, x...) in the grid dimension"));
        }
        let (t0, t1) = (trajectory[0].time, trajectory[trajectory.len() - 1].time);
        if self.center[0] - self.halfwidths[0] < t0 || self.center[0] + self.halfwidths[0] > t1 {
            return Err(Error::geometry("bump support leaves the recorded time range"));
        }
        for (k, a) in grid.axes().iter().enumerate() {
            let (c, h) = (self.center[k + 1], self.halfwidths[k + 1]);
            if c - h < a.lo || c + h > a.hi {
                return Err(Error::geometry(format!(
                    "bump support leaves the domain along axis {k}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub k: f64,
    pub bump: SmoothBump,
    /// `∫∫ |u-k| φ_t + sgn(u-k)(A(u)-A(k))·∇φ`
    pub residual: f64,
    pub cells: usize,
    pub snapshots: usize,
    /// `∫ φ` along the time factor.
    pub time_weight: f64,
}

impl DissipationReport {
    /// Residual per unit of time weight; for a shock crossing the spatial
    /// plateau this is the dissipation mass per unit time.
    pub fn rate_per_unit_time(&self) -> f64 {
        self.residual / self.time_weight
    }
}

/// Test-function values `(φ, φ_t, ∇φ)` at `(t, x)`.
type TestSample = (f64, f64, [f64; 2]);

/// `Σ_s w_s Σ_i |cell| integrand(u, test)`, parallel over snapshots with ordered reduction.
fn pair_with(
    trajectory: &[SolutionField],
    test: &(dyn Fn(f64, &[f64]) -> Option<TestSample> + Sync),
    integrand: &(dyn Fn(f64, &[f64], TestSample) -> f64 + Sync),
) -> f64 {
    let times: Vec<f64> = trajectory.iter().map(|f| f.time).collect();
    let weights = trapezoid_weights(&times);
    let grid = &trajectory[0].grid;
    let vol = grid.cell_volume();
    let partial: Vec<f64> = trajectory
        .par_iter()
        .zip(&weights)
        .map(|(field, &w)| {
            let mut acc = 0.0;
            for (idx, &u) in field.values.iter().enumerate() {
                let x = grid.cell_center(idx);
                if let Some(sample) = test(field.time, &x) {
                    acc += integrand(u, &x, sample);
                }
            }
            w * vol * acc
        })
        .collect();
    partial.iter().sum()
}

/// Kruzhkov pairing of a computed trajectory against a smooth bump.
/// Entropy solutions give a nonnegative value up to discretization error.
pub fn entropy_dissipation_residual(
    trajectory: &[SolutionField],
    flux: &FluxModel,
    k: f64,
    bump: &SmoothBump,
) -> Result<DissipationReport> {
    check_trajectory(trajectory)?;
    bump.check_inside(trajectory)?;
    let d = trajectory[0].grid.dimension();
    if flux.dimension() != d {
        return Err(Error::config("flux and grid dimensions differ"));
    }
    let ak = flux.flux(k);
    let test = |t: f64, x: &[f64]| -> Option<TestSample> {
        let (ft, dft) = bump.factor(0, t);
        if ft == 0.0 && dft == 0.0 {
            return None;
        }
        let mut fx = [1.0; 2];
        let mut dfx = [0.0; 2];
        for j in 0..d {
            (fx[j], dfx[j]) = bump.factor(j + 1, x[j]);
            if fx[j] == 0.0 && dfx[j] == 0.0 {
                return None;
            }
        }
        let space: f64 = fx[..d].iter().product();
        let mut grad = [0.0; 2];
        for j in 0..d {
            let others: f64 = (0..d).filter(|&i| i != j).map(|i| fx[i]).product();
            grad[j] = ft * dfx[j] * others;
        }
        Some((ft * space, dft * space, grad))
    };
    let integrand = |u: f64, _x: &[f64], (_, phi_t, grad): TestSample| -> f64 {
        let sgn = if u > k {
            1.0
        } else if u < k {
            -1.0
        } else {
            0.0
        };
        let mut v = (u - k).abs() * phi_t;
        for j in 0..d {
            v += sgn * (flux.component(j).eval(u) - ak[j]) * grad[j];
        }
        v
    };
    let residual = pair_with(trajectory, &test, &integrand);
    Ok(DissipationReport {
        k,
        bump: bump.clone(),
        residual,
        cells: trajectory[0].grid.len(),
        snapshots: trajectory.len(),
        time_weight: bump.factor_integral(0),
    })
}

/// Lipschitz graph `w(x) = value + gradient · (x - origin)` in space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LipschitzProfile {
    Constant {
        value: f64,
    },
    Affine {
        value: f64,
        gradient: Vec<f64>,
        origin: Vec<f64>,
    },
}

impl LipschitzProfile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LipschitzProfile::Constant { value } => *value,
            LipschitzProfile::Affine {
                value,
                gradient,
                origin,
            } => {
                value
                    + gradient
                        .iter()
                        .zip(x.iter().zip(origin))
                        .map(|(g, (a, o))| g * (a - o))
                        .sum::<f64>()
            }
        }
    }

    pub fn gradient(&self, d: usize) -> Vec<f64> {
        match self {
            LipschitzProfile::Constant { .. } => vec![0.0; d],
            LipschitzProfile::Affine { gradient, .. } => gradient.clone(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            LipschitzProfile::Constant { .. } => 0.0,
            LipschitzProfile::Affine { gradient, .. } => gradient.iter().map(|g| g * g).sum::<f64>().sqrt(),
        }
    }
}

/// Nested space-time balls `B_r ⊂ B_R` (radii in units of `scale`) about `(t, x...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallWindow {
    pub center: Vec<f64>,
    pub scale: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationBoundReport {
    /// Dissipation mass of `u` above the graph of `w` over `B_r`.
    pub lhs: f64,
    /// `‖(1, a)‖_∞ (Lip(w) + 1/((R-r) scale)) ∫_{B_R} |(u-w)_+ - (ũ-w)_+|`
    pub rhs: f64,
    pub ratio: f64,
    /// `rhs = 0` while `lhs > 0`.
    pub violation: bool,
}

/// Localized variation bound: the dissipation measure of `u` above `w` inside
/// `B_r` against the truncated difference on `B_R`, with constant one.
///
/// The measure at level `k` is half the Kruzhkov pairing; it is tested against
/// `φ(t, x) ζ(k - w(x))` where `φ` is one on `B_r` and vanishes outside `B_R`,
/// and `ζ` is a smooth step four v-cells wide, summed over the v-grid levels.
pub fn variation_bound_ratio(
    u: &[SolutionField],
    u_tilde: &[SolutionField],
    flux: &FluxModel,
    w: &LipschitzProfile,
    window: &BallWindow,
    vgrid: &VGrid,
) -> Result<VariationBoundReport> {
    check_trajectory(u)?;
    check_trajectory(u_tilde)?;
    if u.len() != u_tilde.len()
        || u[0].grid != u_tilde[0].grid
        || u.iter().zip(u_tilde).any(|(a, b)| a.time != b.time)
    {
        return Err(Error::config("trajectory pair must share grid and times"));
    }
    let (r, big_r, scale) = (window.r, window.big_r, window.scale);
    if !(0.0 < r && r < big_r && big_r <= 2.0) || !(scale > 0.0) {
        return Err(Error::config(
            "variation bound needs 0 < r < R <= 2 and scale > 0",
        ));
    }
    check_ball(u, &window.center, big_r * scale)?;
    let d = u[0].grid.dimension();
    if flux.dimension() != d {
        return Err(Error::config("flux and grid dimensions differ"));
    }
    let c = &window.center;
    let (inner, outer) = (r * scale, big_r * scale);
    let width = outer - inner;
    let grad_w = w.gradient(d);

    // φ = S((R·scale - ρ) / ((R - r)·scale)), radial in (t, x).
    let test = |t: f64, x: &[f64]| -> Option<TestSample> {
        let mut rho2 = (t - c[0]) * (t - c[0]);
        for j in 0..d {
            rho2 += (x[j] - c[j + 1]) * (x[j] - c[j + 1]);
        }
        if rho2 >= outer * outer {
            return None;
        }
        let rho = rho2.sqrt();
        if rho <= inner {
            return Some((1.0, 0.0, [0.0; 2]));
        }
        let z = (outer - rho) / width;
        let dphi_drho = -smoothstep_slope(z) / width;
        let mut grad = [0.0; 2];
        for j in 0..d {
            grad[j] = dphi_drho * (x[j] - c[j + 1]) / rho;
        }
        Some((smoothstep(z), dphi_drho * (t - c[0]) / rho, grad))
    };

    let dv = vgrid.spacing();
    let ramp = 4.0 * dv;
    let levels: Vec<f64> = vgrid.midpoints().collect();
    let level_flux: Vec<Vec<f64>> = levels.iter().map(|&k| flux.flux(k)).collect();
    let integrand = |uu: f64, x: &[f64], (phi, phi_t, grad): TestSample| -> f64 {
        let wx = w.eval(x);
        let au = flux.flux(uu);
        let mut acc = 0.0;
        for (k, ak) in levels.iter().zip(&level_flux) {
            // ζ(s) = S(s/ramp + 1/2)
            let s = k - wx;
            let z = s / ramp + 0.5;
            if z <= 0.0 {
                continue;
            }
            let zeta = smoothstep(z);
            let dzeta = smoothstep_slope(z) / ramp;
            let sgn = if uu > *k {
                1.0
            } else if uu < *k {
                -1.0
            } else {
                0.0
            };
            let mut v = (uu - k).abs() * phi_t * zeta;
            for j in 0..d {
                let dtest = grad[j] * zeta - phi * dzeta * grad_w[j];
                v += sgn * (au[j] - ak[j]) * dtest;
            }
            acc += v;
        }
        0.5 * dv * acc
    };
    let lhs = pair_with(u, &test, &integrand);

    // ∫_{B_R} |(u - w)_+ - (ũ - w)_+| by cell-centre inclusion.
    let times: Vec<f64> = u.iter().map(|f| f.time).collect();
    let weights = trapezoid_weights(&times);
    let grid = &u[0].grid;
    let vol = grid.cell_volume();
    let partial: Vec<f64> = u
        .par_iter()
        .zip(u_tilde.par_iter())
        .zip(weights.par_iter())
        .map(|((fu, fv), &wt)| {
            let dt = fu.time - c[0];
            let mut acc = 0.0;
            for idx in 0..fu.values.len() {
                let x = grid.cell_center(idx);
                let rho2 = dt * dt + (0..d).map(|j| (x[j] - c[j + 1]).powi(2)).sum::<f64>();
                if rho2 > outer * outer {
                    continue;
                }
                let wx = w.eval(&x);
                acc += ((fu.values[idx] - wx).max(0.0) - (fv.values[idx] - wx).max(0.0)).abs();
            }
            wt * vol * acc
        })
        .collect();
    let mass: f64 = partial.iter().sum();
    let speed = flux.lipschitz_bound().max(1.0);
    let rhs = speed * (w.lipschitz() + 1.0 / width) * mass;
    let (ratio, violation) = if rhs > 0.0 {
        (lhs / rhs, false)
    } else if lhs > 0.0 {
        (f64::INFINITY, true)
    } else {
        (0.0, false)
    };
    Ok(VariationBoundReport {
        lhs,
        rhs,
        ratio,
        violation,
    })
}
