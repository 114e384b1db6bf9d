use kinlab::kinetic::{
    degiorgi_sequence, difference_function, entropy_dissipation_residual, level_set_integral, reconstruct_u,
    variation_bound_ratio, BallWindow, LipschitzProfile, SmoothBump, VGrid,
};
use kinlab::solver::{solve, uniform_times, InitialData, SolveConfig};
use kinlab::{
    Boundary, Bump, Error, ExperimentConfig, FluxModel, Grid, Interval, RarefactionWave, Reference, Scheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn roundtrip_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for lambda in [0.5, 1.0, 3.0] {
        let g = VGrid::for_bound(lambda).unwrap();
        for _ in 0..1000 {
            let u = rng.gen_range(-lambda..=lambda);
            assert!((reconstruct_u(u, &g) - u).abs() <= g.spacing(), "{u}");
        }
    }
}

#[test]
fn level_set_matches_v_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = VGrid::with_cells(2.0, 8192).unwrap();
    let dv = g.spacing();
    for _ in 0..200 {
        let (u, ut, ell) = (
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..1.0),
        );
        let quad: f64 = g
            .midpoints()
            .filter(|&v| v > ut + ell)
            .map(|v| difference_function(u, ut, v) as f64 * dv)
            .sum();
        let exact = level_set_integral(u, ut, ell, 2.0).unwrap();
        assert!(
            (quad - exact).abs() <= 2.0 * dv,
            "{u} {ut} {ell}: {quad} vs {exact}"
        );
    }
}

fn flagship_dense(cells: usize) -> (Vec<kinlab::SolutionField>, Reference) {
    let exp = ExperimentConfig::flagship(cells).unwrap();
    let mut cfg = exp.perturbed_config().unwrap();
    cfg.end_time = 6.0;
    cfg.snapshots = uniform_times(6.0, 241);
    (solve(&cfg).unwrap(), exp.reference)
}

#[test]
fn degiorgi_on_perturbed_rarefaction() {
    // Ball about (t, x) = (4, 6), where the bump sits, with scale t/4.
    let center = [4.0, 6.0];
    let mut first = Vec::new();
    for cells in [2048, 4096] {
        let (traj, reference) = flagship_dense(cells);
        let data = degiorgi_sequence(&traj, &reference, &center, 1.0, 0.02, 8).unwrap();
        assert!(data.energies[0] > 0.0);
        assert!(data.energies.windows(2).all(|w| w[1] <= w[0]));
        assert!(data.levels.windows(2).all(|w| w[1] > w[0]));
        first.push(data.energies[0]);
        // Ball outside the recorded times.
        assert!(matches!(
            degiorgi_sequence(&traj, &reference, &[1.0, 2.0], 1.0, 0.02, 4),
            Err(Error::Geometry(_))
        ));
    }
    assert!((first[0] - first[1]).abs() <= 0.1 * first[1], "{first:?}");
}

fn riemann(cells: usize, left: f64, right: f64) -> (Vec<kinlab::SolutionField>, FluxModel) {
    let flux = FluxModel::burgers(1, Interval::new(left.min(right), left.max(right)).unwrap()).unwrap();
    let cfg = SolveConfig::new(
        flux.clone(),
        Grid::uniform_1d(cells, -1.0, 1.0, Boundary::Outflow).unwrap(),
        InitialData::Riemann {
            left,
            right,
            axis: 0,
            position: 0.0,
        },
        1.0,
        0.45,
        uniform_times(1.0, 201),
        Scheme::EngquistOsher,
    )
    .unwrap();
    (solve(&cfg).unwrap(), flux)
}

#[test]
fn dissipation_nonnegative_on_moving_shock() {
    let bump = SmoothBump::new(vec![0.5, 0.25], vec![0.45, 0.7], 0.3).unwrap();
    for cells in [256, 512, 1024] {
        let (traj, flux) = riemann(cells, 1.0, 0.0);
        for k in [0.0, 0.2, 0.5, 0.8, 1.0, -0.3, 1.4] {
            let r = entropy_dissipation_residual(&traj, &flux, k, &bump).unwrap();
            assert!(r.residual >= -1e-3, "{cells} k={k}: {}", r.residual);
        }
        let mid = entropy_dissipation_residual(&traj, &flux, 0.5, &bump).unwrap();
        assert!(mid.residual > 0.01);
    }
}

#[test]
fn rarefaction_dissipation_vanishes_under_refinement() {
    let bump = SmoothBump::new(vec![0.5, 0.2], vec![0.45, 0.6], 0.3).unwrap();
    let mut prev = f64::INFINITY;
    for cells in [256, 512, 1024, 2048] {
        let (traj, flux) = riemann(cells, 0.0, 1.0);
        let r = entropy_dissipation_residual(&traj, &flux, 0.5, &bump).unwrap();
        assert!(r.residual.abs() < prev, "{cells}: {}", r.residual);
        prev = r.residual.abs();
    }
    assert!(prev < 2e-3, "{prev}");
}

#[test]
fn variation_ratio_small_without_shocks() {
    // A shallow wide bump on a rarefaction never steepens into a shock.
    let base = FluxModel::burgers(1, Interval::new(0.0, 1.0).unwrap()).unwrap();
    let wave = RarefactionWave::new(&base, 0, 0.0, 1.0, 1.0, 0.0).unwrap();
    let reference = Reference::Rarefaction(wave);
    let flux = base.with_interval(Interval::new(0.0, 1.05).unwrap()).unwrap();
    let bump = Bump {
        amplitude: 0.05,
        width: 2.0,
        center: vec![0.5],
    };
    let window = BallWindow {
        center: vec![2.0, 1.5],
        scale: 0.5,
        r: 1.0,
        big_r: 2.0,
    };
    let w = LipschitzProfile::Constant { value: 0.4 };
    let mut ratios = Vec::new();
    for cells in [512, 1024, 2048] {
        let grid = Grid::uniform_1d(cells, -4.0, 8.0, Boundary::Outflow).unwrap();
        let mk = |init| {
            let cfg = SolveConfig::new(
                flux.clone(),
                grid.clone(),
                init,
                3.0,
                0.45,
                uniform_times(3.0, 301),
                Scheme::EngquistOsher,
            )
            .unwrap();
            solve(&cfg).unwrap()
        };
        let u = mk(InitialData::RarefactionPlusBump {
            reference: reference.clone(),
            bump: bump.clone(),
        });
        let ut = mk(InitialData::Wave {
            reference: reference.clone(),
        });
        let rep = variation_bound_ratio(
            &u,
            &ut,
            &flux,
            &w,
            &window,
            &VGrid::with_cells(1.05, 256).unwrap(),
        )
        .unwrap();
        assert!(!rep.violation);
        ratios.push(rep.ratio);
    }
    assert!(ratios.windows(2).all(|r| r[1] < r[0]), "{ratios:?}");
    assert!(ratios[2] < 0.05, "{ratios:?}");
}
