#![allow(dead_code)]

use kinlab::solver::{InitialData, SolveConfig};
use kinlab::{Boundary, FluxModel, Grid, Interval, Polynomial, Scheme};
use rand::Rng;

/// Rough periodic data in `[lo, hi]`: a few modes plus random steps.
pub fn rough_table<R: Rng>(rng: &mut R, cells: usize, lo: f64, hi: f64) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64)> = (0..3)
        .map(|k| (rng.gen_range(-1.0..1.0), (k + 1) as f64, rng.gen_range(0.0..6.3)))
        .collect();
    let steps: Vec<(usize, usize, f64)> = (0..3)
        .map(|_| {
            let a = rng.gen_range(0..cells);
            (a, rng.gen_range(a..cells), rng.gen_range(-0.5..0.5))
        })
        .collect();
    (0..cells)
        .map(|i| {
            let x = i as f64 / cells as f64;
            let mut s: f64 = modes
                .iter()
                .map(|(c, k, p)| c * (2.0 * std::f64::consts::PI * k * x + p).sin())
                .sum::<f64>()
                / 3.0;
            for (a, b, h) in &steps {
                if (*a..*b).contains(&i) {
                    s += h;
                }
            }
            let z = 0.5 + 0.5 * s.clamp(-1.0, 1.0);
            lo + (hi - lo) * z
        })
        .collect()
}

/// Burgers, a nonconvex cubic, or a convex quartic, on `[-1, 1]`.
pub fn random_flux<R: Rng>(rng: &mut R) -> FluxModel {
    let iv = Interval::new(-1.0, 1.0).unwrap();
    match rng.gen_range(0..3) {
        0 => FluxModel::burgers(1, iv).unwrap(),
        1 => FluxModel::custom(vec![Polynomial::new(vec![0.0, 0.2, 0.0, -0.6])], iv).unwrap(),
        _ => FluxModel::convex_power(4, 1, iv).unwrap(),
    }
}

pub fn periodic_config(flux: FluxModel, table: Vec<f64>, scheme: Scheme) -> SolveConfig {
    let cells = table.len();
    SolveConfig::new(
        flux,
        Grid::uniform_1d(cells, 0.0, 1.0, Boundary::Periodic).unwrap(),
        InitialData::Table { values: table },
        1.0,
        0.45,
        vec![],
        scheme,
    )
    .unwrap()
}
