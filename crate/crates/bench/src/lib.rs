//! Fixtures shared by the kernel benchmarks.

use kinlab::solver::{InitialData, SolveConfig};
use kinlab::{Boundary, FluxModel, Grid, Interval, Scheme, SolutionField};

/// Periodic 1D Burgers on `[0, 1]` with a two-mode sine start.
pub fn periodic_burgers(cells: usize, scheme: Scheme) -> (SolveConfig, SolutionField) {
    let flux = FluxModel::burgers(1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let grid = Grid::uniform_1d(cells, 0.0, 1.0, Boundary::Periodic).unwrap();
    let values = (0..cells)
        .map(|i| {
            let x = (i as f64 + 0.5) / cells as f64;
            0.6 * (2.0 * std::f64::consts::PI * x).sin() + 0.3 * (6.0 * std::f64::consts::PI * x).cos()
        })
        .collect();
    let cfg = SolveConfig::new(
        flux,
        grid,
        InitialData::Table { values },
        1.0,
        0.45,
        vec![],
        scheme,
    )
    .unwrap();
    let field = cfg.initial_field().unwrap();
    (cfg, field)
}

/// 2D Burgers on the periodic unit square.
pub fn periodic_burgers_2d(cells: usize) -> (SolveConfig, SolutionField) {
    let flux = FluxModel::burgers(2, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let axis = kinlab::Axis::new(cells, 0.0, 1.0, Boundary::Periodic).unwrap();
    let grid = Grid::new(vec![axis.clone(), axis]).unwrap();
    let values = (0..cells * cells)
        .map(|idx| {
            let (i, j) = (idx / cells, idx % cells);
            let (x, y) = ((i as f64 + 0.5) / cells as f64, (j as f64 + 0.5) / cells as f64);
            0.8 * (2.0 * std::f64::consts::PI * (x + 2.0 * y)).sin()
        })
        .collect();
    let cfg = SolveConfig::new(
        flux,
        grid,
        InitialData::Table { values },
        1.0,
        0.22,
        vec![],
        Scheme::EngquistOsher,
    )
    .unwrap();
    let field = cfg.initial_field().unwrap();
    (cfg, field)
}
