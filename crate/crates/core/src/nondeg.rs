//! Brute-force measurement of the genuine-nonlinearity parameters `(C0, alpha)`:
//! the worst sublevel-set measure `|{v in I : |t + a(v).xi| < delta}|` over the
//! unit sphere `t^2 + |xi|^2 = 1`, followed by a log-log fit.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::power_law;
use crate::flux::FluxModel;

/// Measures above this fraction of `|I|` are treated as saturated and left out of the fit.
pub const SATURATION_FRACTION: f64 = 0.9;
/// Fitted slopes below this are read as "no decay in delta".
pub const MIN_GENUINE_SLOPE: f64 = 0.02;
pub const DEFAULT_REFINE_STARTS: usize = 128;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NondegeneracyProfile {
    /// Strictly decreasing.
    pub delta_grid: Vec<f64>,
    pub worst_measure: Vec<f64>,
    /// Sphere point `(t, xi)` attaining `worst_measure` at each delta.
    pub worst_direction: Vec<Vec<f64>>,
    /// Whether each delta entered the regression.
    pub fitted: Vec<bool>,
    pub alpha_est: f64,
    #[serde(rename = "C0_est")]
    pub c0_est: f64,
    pub genuinely_nonlinear: bool,
    pub sphere_sample_count: usize,
    pub v_sample_count: usize,
    pub refine_starts: usize,
    pub interval_length: f64,
}

impl NondegeneracyProfile {
    /// `C0 * delta^alpha`
    pub fn bound(&self, delta: f64) -> f64 {
        self.c0_est * delta.powf(self.alpha_est)
    }
}

/// Uniform closed grid on `I` with dual-cell weights (half weight at the endpoints),
/// evaluated as rows `(1, a_1(v), ..., a_n(v))`.
struct VelocityTable {
    rows: Vec<f64>,
    weights: Vec<f64>,
    width: usize,
}

impl VelocityTable {
    fn new(model: &FluxModel, samples: usize) -> Self {
        let iv = model.interval();
        let h = iv.len() / (samples - 1) as f64;
        let width = model.dimension() + 1;
        let mut rows = Vec::with_capacity(samples * width);
        let mut weights = Vec::with_capacity(samples);
        for i in 0..samples {
            let v = if i + 1 == samples {
                iv.hi
            } else {
                iv.lo + i as f64 * h
            };
            rows.push(1.0);
            rows.extend(model.velocity(v));
            weights.push(if i == 0 || i + 1 == samples { 0.5 * h } else { h });
        }
        VelocityTable { rows, weights, width }
    }

    /// Sublevel measures for every delta (sorted decreasing) at one sphere point.
    fn measures(&self, dir: &[f64], deltas: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; deltas.len()];
        for (row, &w) in self.rows.chunks_exact(self.width).zip(&self.weights) {
            let val = row.iter().zip(dir).map(|(p, c)| p * c).sum::<f64>().abs();
            for (m, &d) in out.iter_mut().zip(deltas) {
                if val < d {
                    *m += w;
                } else {
                    break;
                }
            }
        }
        out
    }

    fn measure(&self, dir: &[f64], delta: f64) -> f64 {
        self.rows
            .chunks_exact(self.width)
            .zip(&self.weights)
            .filter(|(row, _)| row.iter().zip(dir).map(|(p, c)| p * c).sum::<f64>().abs() < delta)
            .map(|(_, &w)| w)
            .sum()
    }

    /// Unit vector minimizing `sum_i w_i (c . phi_i)^2`, returned only when the
    /// functions `1, a_1, ..., a_n` are linearly dependent on the grid.
    fn null_direction(&self) -> Option<Vec<f64>> {
        let d = self.width;
        let mut gram = DMatrix::<f64>::zeros(d, d);
        for (row, &w) in self.rows.chunks_exact(d).zip(&self.weights) {
            for i in 0..d {
                for j in 0..d {
                    gram[(i, j)] += w * row[i] * row[j];
                }
            }
        }
        let eig = SymmetricEigen::new(gram);
        let (imin, &lmin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l));
        (lmin <= 1e-12 * lmax).then(|| eig.eigenvectors.column(imin).iter().copied().collect())
    }
}

/// Surface area of the unit sphere `S^k` in `R^(k+1)`.
fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// `∫_0^phi sin^m`
fn sin_power_integral(m: usize, phi: f64) -> f64 {
    match m {
        0 => phi,
        1 => 1.0 - phi.cos(),
        _ => {
            -phi.sin().powi(m as i32 - 1) * phi.cos() / m as f64
                + (m as f64 - 1.0) / m as f64 * sin_power_integral(m - 2, phi)
        }
    }
}

/// Inverse CDF of the density proportional to `sin^m` on `[0, pi]`.
fn inverse_sin_power_cdf(m: usize, u: f64) -> f64 {
    if m == 1 {
        return (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    }
    let total = sin_power_integral(m, PI);
    let (mut a, mut b) = (0.0, PI);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if sin_power_integral(m, mid) / total < u {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Quasi-uniform Fibonacci-type lattice on the unit sphere of `R^dim`.
///
/// `dim = 2` gives equally spaced angles, `dim = 3` the golden spiral. Higher
/// dimensions stratify the first hyperspherical angle and drive the others with
/// the Kronecker sequence of the generalized golden ratio.
pub fn fibonacci_sphere(count: usize, dim: usize) -> Vec<Vec<f64>> {
    assert!(dim >= 2, "sphere lattice needs at least two coordinates");
    if dim == 2 {
        return (0..count)
            .map(|i| {
                let th = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    // g^(dim-1) = g + 1
    let k = dim - 1;
    let mut g = 2.0f64;
    for _ in 0..100 {
        g = (1.0 + g).powf(1.0 / k as f64);
    }
    let freqs: Vec<f64> = (1..k).map(|j| g.powi(-(j as i32))).collect();
    (0..count)
        .map(|i| {
            let mut u = Vec::with_capacity(k);
            u.push((i as f64 + 0.5) / count as f64);
            u.extend(freqs.iter().map(|f| (i as f64 * f).fract()));
            // Angles phi_1..phi_{k-1} on [0, pi] with density sin^(k-j), last on [0, 2pi).
            let mut angles: Vec<f64> = (0..k - 1)
                .map(|j| inverse_sin_power_cdf(k - 1 - j, u[j]))
                .collect();
            angles.push(2.0 * PI * u[k - 1]);
            let mut x = Vec::with_capacity(dim);
            let mut s = 1.0;
            for &a in &angles {
                x.push(s * a.cos());
                s *= a.sin();
            }
            x.push(s);
            x
        })
        .collect()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Orthonormal basis of the tangent space at the unit vector `x`.
fn tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let skip = (0..d)
        .max_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
        .unwrap_or(0);
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    for e in (0..d).filter(|&e| e != skip) {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            v.iter_mut().zip(b).for_each(|(p, q)| *p -= dot * q);
        }
        normalize(&mut v);
        basis.push(v);
    }
    basis.remove(0);
    basis
}

/// Deterministic compass search on the sphere maximizing the sublevel measure.
fn refine(table: &VelocityTable, start: &[f64], delta: f64, step0: f64) -> (f64, Vec<f64>) {
    let mut x = start.to_vec();
    let mut fx = table.measure(&x, delta);
    let mut step = step0;
    let floor = delta / 16.0;
    let mut evals = 0usize;
    while step > floor && evals < 20_000 {
        let mut improved = false;
        for b in tangent_basis(&x) {
            for sign in [1.0, -1.0] {
                let mut y: Vec<f64> = x.iter().zip(&b).map(|(p, q)| p + sign * step * q).collect();
                normalize(&mut y);
                let fy = table.measure(&y, delta);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (fx, x)
}

/// Sublevel measures at every delta for each of the given sphere points.
pub fn sublevel_measures(
    model: &FluxModel,
    directions: &[Vec<f64>],
    deltas: &[f64],
    v_samples: usize,
) -> Vec<Vec<f64>> {
    let table = VelocityTable::new(model, v_samples.max(2));
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&i, &j| deltas[j].total_cmp(&deltas[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| deltas[i]).collect();
    directions
        .par_iter()
        .map(|dir| {
            let m = table.measures(dir, &sorted);
            let mut out = vec![0.0; deltas.len()];
            for (k, &i) in order.iter().enumerate() {
                out[i] = m[k];
            }
            out
        })
        .collect()
}

pub fn nondegeneracy_profile(
    model: &FluxModel,
    delta_grid: &[f64],
    sphere_samples: usize,
    v_samples: usize,
) -> Result<NondegeneracyProfile> {
    nondegeneracy_profile_with(
        model,
        delta_grid,
        sphere_samples,
        v_samples,
        DEFAULT_REFINE_STARTS,
    )
}

/// As [`nondegeneracy_profile`], refining the `refine_starts` best lattice points
/// per delta by compass search (`0` keeps the raw lattice supremum).
pub fn nondegeneracy_profile_with(
    model: &FluxModel,
    delta_grid: &[f64],
    sphere_samples: usize,
    v_samples: usize,
    refine_starts: usize,
) -> Result<NondegeneracyProfile> {
    if delta_grid.is_empty() || delta_grid.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::domain(
            "delta grid must be non-empty and strictly positive",
        ));
    }
    if sphere_samples < 100 {
        return Err(Error::domain("need at least 100 sphere samples"));
    }
    if v_samples < 1000 {
        return Err(Error::domain("need at least 1000 v samples"));
    }
    let mut deltas = delta_grid.to_vec();
    deltas.sort_by(|a, b| b.total_cmp(a));
    deltas.dedup();

    let dim = model.dimension() + 1;
    let table = VelocityTable::new(model, v_samples);
    let mut sphere = fibonacci_sphere(sphere_samples, dim);
    let degenerate = table.null_direction();
    if let Some(dir) = &degenerate {
        sphere.push(dir.clone());
    }

    let lattice: Vec<Vec<f64>> = sphere
        .par_iter()
        .map(|dir| table.measures(dir, &deltas))
        .collect();

    let step0 = (sphere_area(dim - 1) / sphere.len() as f64).powf(1.0 / (dim - 1) as f64);
    let mut worst_measure = Vec::with_capacity(deltas.len());
    let mut worst_direction = Vec::with_capacity(deltas.len());
    for (k, &delta) in deltas.iter().enumerate() {
        let mut ranked: Vec<usize> = (0..sphere.len()).collect();
        ranked.sort_by(|&i, &j| lattice[j][k].total_cmp(&lattice[i][k]).then(i.cmp(&j)));
        let best_lattice = ranked[0];
        let mut best = (
            lattice[best_lattice][k],
            best_lattice,
            sphere[best_lattice].clone(),
        );
        let refined: Vec<(f64, usize, Vec<f64>)> = ranked
            .iter()
            .take(refine_starts)
            .enumerate()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(rank, &i)| {
                let (m, x) = refine(&table, &sphere[i], delta, step0);
                (m, rank, x)
            })
            .collect();
        // Ordered reduction: larger measure wins, earlier rank breaks ties.
        for cand in refined {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                best = cand;
            }
        }
        worst_measure.push(best.0);
        worst_direction.push(best.2);
    }
    // Sublevel sets grow with delta, so a maximizer found at a smaller delta is a
    // candidate at every larger one.
    for k in (0..deltas.len().saturating_sub(1)).rev() {
        let m = table.measure(&worst_direction[k + 1], deltas[k]);
        if m > worst_measure[k] {
            worst_measure[k] = m;
            worst_direction[k] = worst_direction[k + 1].clone();
        }
    }

    let len = model.interval().len();
    if worst_measure.iter().all(|&m| m == 0.0) {
        return Err(Error::fit("degenerate grid: every sublevel measure is zero"));
    }
    let fitted: Vec<bool> = worst_measure
        .iter()
        .map(|&m| m > 0.0 && m <= SATURATION_FRACTION * len)
        .collect();
    let smallest_saturated = worst_measure
        .last()
        .is_some_and(|&m| m > SATURATION_FRACTION * len);

    let mut profile = NondegeneracyProfile {
        delta_grid: deltas.clone(),
        worst_measure: worst_measure.clone(),
        worst_direction,
        fitted: fitted.clone(),
        alpha_est: 0.0,
        c0_est: *worst_measure.last().unwrap_or(&0.0),
        genuinely_nonlinear: false,
        sphere_sample_count: sphere.len(),
        v_sample_count: v_samples,
        refine_starts,
        interval_length: len,
    };
    if degenerate.is_some() || smallest_saturated {
        return Ok(profile);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = deltas
        .iter()
        .zip(&worst_measure)
        .zip(&fitted)
        .filter(|(_, &f)| f)
        .map(|((&d, &m), _)| (d, m))
        .unzip();
    let (alpha, c0) = power_law(&xs, &ys)?;
    if alpha < MIN_GENUINE_SLOPE {
        return Ok(profile);
    }
    profile.alpha_est = alpha;
    profile.c0_est = c0;
    profile.genuinely_nonlinear = true;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::Interval;
    use crate::poly::Polynomial;

    fn geometric(from: i32, to: i32) -> Vec<f64> {
        (from..=to).map(|k| 2f64.powi(-k)).collect()
    }

    #[test]
    fn lattice_points_are_unit_and_spread() {
        for dim in 2..=4 {
            let pts = fibonacci_sphere(500, dim);
            let mut mean = vec![0.0; dim];
            for p in &pts {
                let r: f64 = p.iter().map(|x| x * x).sum();
                assert!((r - 1.0).abs() < 1e-12);
                mean.iter_mut().zip(p).for_each(|(m, x)| *m += x / 500.0);
            }
            assert!(mean.iter().all(|m| m.abs() < 0.02), "dim {dim}: {mean:?}");
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let mut x = vec![0.3, -0.5, 0.8];
        normalize(&mut x);
        let b = tangent_basis(&x);
        assert_eq!(b.len(), 2);
        for u in &b {
            assert!(u.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>().abs() < 1e-14);
            assert!((u.iter().map(|p| p * p).sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sublevel_measure_matches_interval_length() {
        // Burgers n = 1 on [-1, 1], direction (t, xi) = (0, 1): |v| < delta.
        let m = FluxModel::burgers(1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
        let got = sublevel_measures(&m, &[vec![0.0, 1.0]], &[0.25, 0.1], 20_001);
        assert!((got[0][0] - 0.5).abs() < 2e-4);
        assert!((got[0][1] - 0.2).abs() < 2e-4);
    }

    #[test]
    fn bad_inputs_rejected() {
        let m = FluxModel::burgers(1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
        assert!(nondegeneracy_profile(&m, &[0.1, -0.1], 200, 2000).is_err());
        assert!(nondegeneracy_profile(&m, &[0.1], 50, 2000).is_err());
        assert!(nondegeneracy_profile(&m, &[0.1], 200, 500).is_err());
    }

    #[test]
    fn linear_flux_is_flagged() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        for n in 1..=2 {
            let comps = vec![Polynomial::new(vec![0.0, 1.0]); n];
            let m = FluxModel::custom(comps, iv).unwrap();
            let p = nondegeneracy_profile_with(&m, &geometric(3, 8), 200, 2000, 8).unwrap();
            assert!(!p.genuinely_nonlinear);
            assert_eq!(p.alpha_est, 0.0);
            assert!(p.worst_measure.iter().all(|&w| (w - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn worst_measure_is_monotone_and_bounded() {
        let m = FluxModel::burgers(2, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let p = nondegeneracy_profile_with(&m, &geometric(2, 9), 300, 3000, 16).unwrap();
        for w in p.worst_measure.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(p.worst_measure.iter().all(|&w| w <= 1.0 + 1e-12));
        assert!(p.delta_grid.windows(2).all(|w| w[0] > w[1]));
    }
}
