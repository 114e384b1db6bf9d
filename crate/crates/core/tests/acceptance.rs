//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::{periodic_config, random_flux, rough_table};
use kinlab::harness::run_decay_experiment_full;
use kinlab::kinetic::{
    degiorgi_sequence, difference_function, entropy_dissipation_residual, level_set_integral, reconstruct_u,
    variation_bound_ratio, BallWindow, LipschitzProfile, SmoothBump, VGrid,
};
use kinlab::solver::{solve, step_by, uniform_times, InitialData, SolveConfig};
use kinlab::{
    compute_exponents, gamma0, nondegeneracy_profile, oleinik_ratio, optimize_gamma, Boundary, Bump,
    ExperimentConfig, FluxModel, Grid, Interval, RarefactionWave, Reference, Scheme, SolutionField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Entry = (&'static str, &'static str, fn() -> Outcome);

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn ac1() -> Outcome {
    let e = compute_exponents(1.0, 1, 0.05).map_err(|e| e.to_string())?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    check(
        close(e.theta, 0.2)
            && close(e.beta, 0.45)
            && close(e.gamma, 0.05 / 0.65)
            && close(e.eta, 0.2 / 0.65)
            && e.valid,
        format!("compute_exponents(1, 1, 0.05) = {e:?}"),
    )?;
    check(gamma0(1).unwrap() == 0.5 && gamma0(2).unwrap() == 0.25, "gamma0")?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let alpha: f64 = rng.gen_range(1e-3..=1.0);
        let n: usize = rng.gen_range(1..=3);
        let theta = alpha / (alpha + 4.0);
        let cap = theta / (n as f64 + 1.0);
        let d1 = rng.gen_range(1e-9..cap);
        let d2 = rng.gen_range(d1..cap);
        let (a, b) = (
            compute_exponents(alpha, n, d1).unwrap(),
            compute_exponents(alpha, n, d2).unwrap(),
        );
        check(a.valid && b.valid, format!("valid ({alpha}, {n}, {d1})"))?;
        check(
            a.eta < alpha / 2.0 && b.eta < alpha / 2.0,
            format!("eta < alpha/2 at ({alpha}, {n})"),
        )?;
        check(
            b.gamma >= a.gamma && b.eta <= a.eta,
            format!("monotone in delta at ({alpha}, {n})"),
        )?;
        let opt = optimize_gamma(alpha, n, 0.001).unwrap();
        check(
            opt.gamma < gamma0(n).unwrap(),
            format!("gamma < gamma0 at ({alpha}, {n})"),
        )?;
    }
    Ok("examples exact, 10000 random property checks".into())
}

fn ac2() -> Outcome {
    let deltas: Vec<f64> = (3..=10).map(|e| 2f64.powi(-e)).collect();
    let one = FluxModel::burgers(1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let p1 = nondegeneracy_profile(&one, &deltas, 2000, 20000).map_err(|e| e.to_string())?;
    let two = FluxModel::burgers(2, Interval::new(0.0, 1.0).unwrap()).unwrap();
    let p2 = nondegeneracy_profile(&two, &deltas, 2000, 20000).map_err(|e| e.to_string())?;
    let msg = format!(
        "n=1 alpha {:.4} C0 {:.4}; n=2 alpha {:.4}",
        p1.alpha_est, p1.c0_est, p2.alpha_est
    );
    check(
        (0.9..=1.05).contains(&p1.alpha_est)
            && (2.0..=3.2).contains(&p1.c0_est)
            && (0.4..=0.62).contains(&p2.alpha_est),
        msg.clone(),
    )?;
    Ok(msg)
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut steps = 0;
    for run in 0..50 {
        let cells = rng.gen_range(256..=1024);
        let flux = random_flux(&mut rng);
        let scheme = if rng.gen_bool(0.5) {
            Scheme::EngquistOsher
        } else {
            Scheme::LaxFriedrichs
        };
        let cfg = periodic_config(flux, rough_table(&mut rng, cells, -1.0, 1.0), scheme);
        let other = rough_table(&mut rng, cells, -1.0, 1.0);
        let mut u = cfg.initial_field().map_err(|e| e.to_string())?;
        let mut v = SolutionField::new(cfg.grid.clone(), other, 0.0).map_err(|e| e.to_string())?;
        let (m0, lo, hi) = (u.mass(), u.min(), u.max());
        let dt = cfg.time_step();
        let d0 = u.l1_distance(&v).unwrap();
        let mut d = d0;
        for _ in 0..200 {
            let tv = u.total_variation();
            u = step_by(&u, &cfg, dt).map_err(|e| e.to_string())?;
            v = step_by(&v, &cfg, dt).map_err(|e| e.to_string())?;
            check(
                (u.mass() - m0).abs() <= 1e-12 * m0.abs().max(1.0),
                format!("run {run}: conservation"),
            )?;
            check(
                u.min() >= lo && u.max() <= hi,
                format!("run {run}: maximum principle"),
            )?;
            check(
                u.total_variation() <= tv * (1.0 + 1e-12),
                format!("run {run}: total variation"),
            )?;
            let dn = u.l1_distance(&v).unwrap();
            check(
                dn <= d + 1e-12 * d0,
                format!("run {run}: L1 contraction {d} -> {dn}"),
            )?;
            d = dn;
            steps += 1;
        }
    }
    Ok(format!("50 runs, {steps} steps"))
}

fn riemann(cells: usize, left: f64, right: f64, end: f64) -> SolveConfig {
    SolveConfig::new(
        FluxModel::burgers(1, Interval::new(left.min(right), left.max(right)).unwrap()).unwrap(),
        Grid::uniform_1d(cells, -1.0, 1.0, Boundary::Outflow).unwrap(),
        InitialData::Riemann {
            left,
            right,
            axis: 0,
            position: 0.0,
        },
        end,
        0.45,
        uniform_times(end, 200),
        Scheme::EngquistOsher,
    )
    .unwrap()
}

fn ac4() -> Outcome {
    let cfg = riemann(1024, 1.0, 0.0, 1.0);
    let mut worst = 0.0f64;
    for f in solve(&cfg)
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|f| f.time >= 0.1)
    {
        let i = f.values.iter().position(|&v| v < 0.5).unwrap();
        let x = f.grid.center(0, i) - 0.5 * f.grid.spacing(0);
        worst = worst.max((x - 0.5 * f.time).abs() / f.grid.spacing(0));
    }
    check(worst <= 1.0, format!("shock off by {worst:.3} cells"))?;
    let mut errs = Vec::new();
    for cells in [512, 1024, 2048, 4096] {
        let cfg = SolveConfig {
            snapshots: vec![1.0],
            ..riemann(cells, 0.0, 1.0, 1.0)
        };
        let f = &solve(&cfg).map_err(|e| e.to_string())?[0];
        let dx = f.grid.spacing(0);
        errs.push(
            f.values
                .iter()
                .enumerate()
                .map(|(i, u)| (u - f.grid.center(0, i).clamp(0.0, 1.0)).abs() * dx)
                .sum::<f64>(),
        );
    }
    let factors: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let msg = format!("shock within {worst:.3} cells; rarefaction L1 factors {factors:.3?}");
    check(factors.iter().all(|f| *f >= 1.3), msg.clone())?;
    Ok(msg)
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = VGrid::for_bound(1.0).unwrap();
    for _ in 0..1000 {
        let u = rng.gen_range(-1.0..=1.0);
        check(
            (reconstruct_u(u, &g) - u).abs() <= g.spacing(),
            format!("roundtrip at {u}"),
        )?;
    }
    let fine = VGrid::with_cells(2.0, 4096).unwrap();
    let dv = fine.spacing();
    for _ in 0..1000 {
        let (u, ut, ell) = (
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..1.0),
        );
        let quad: f64 = fine
            .midpoints()
            .filter(|&v| v > ut + ell)
            .map(|v| difference_function(u, ut, v) as f64 * dv)
            .sum();
        let exact = level_set_integral(u, ut, ell, 2.0).unwrap();
        check(
            (quad - exact).abs() <= dv,
            format!("level set at ({u}, {ut}, {ell})"),
        )?;
    }
    let mut sequences = 0;
    for cells in [2048, 4096] {
        let exp = ExperimentConfig::flagship(cells).unwrap();
        let mut cfg = exp.perturbed_config().unwrap();
        cfg.end_time = 6.0;
        cfg.snapshots = uniform_times(6.0, 241);
        let traj = solve(&cfg).map_err(|e| e.to_string())?;
        for x in [2.0, 4.0, 6.0, 8.0] {
            for k_height in [0.005, 0.02, 0.05] {
                let a = degiorgi_sequence(&traj, &exp.reference, &[4.0, x], 1.0, k_height, 10)
                    .map_err(|e| e.to_string())?;
                check(
                    a.energies.windows(2).all(|w| w[1] <= w[0]),
                    format!("A_k at x={x}, K={k_height}"),
                )?;
                sequences += 1;
            }
        }
    }
    let flux = FluxModel::burgers(1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let shock = SolveConfig {
        flux: flux.clone(),
        snapshots: uniform_times(1.0, 400),
        ..riemann(2048, 1.0, -1.0, 1.0)
    };
    let traj = solve(&shock).map_err(|e| e.to_string())?;
    let bump = SmoothBump::new(vec![0.5, 0.0], vec![0.45, 0.5], 0.5).unwrap();
    let rate = entropy_dissipation_residual(&traj, &flux, 0.0, &bump)
        .map_err(|e| e.to_string())?
        .rate_per_unit_time();
    let msg = format!("roundtrip, level sets, {sequences} A_k sequences; stationary shock rate {rate:.6}");
    check((rate - 1.0).abs() <= 0.1, msg.clone())?;
    Ok(msg)
}

fn ac6() -> Outcome {
    let mut rates = Vec::new();
    let mut notes = Vec::new();
    for cells in [8192, 16384] {
        let run = run_decay_experiment_full(&ExperimentConfig::flagship(cells).unwrap())
            .map_err(|e| e.to_string())?;
        let r = &run.report;
        check(
            r.fitted_rate >= r.gamma_bound - 0.05,
            format!("{cells}: rate {} below n gamma {}", r.fitted_rate, r.gamma_bound),
        )?;
        check(r.l1_nonincreasing, format!("{cells}: l1_diff increases"))?;
        let window = r.fit_window;
        for (i, t) in r.times.iter().enumerate() {
            if (window.0..=window.1).contains(t) {
                check(
                    r.linf_diff[i] <= r.bound_envelope[i] * (1.0 + 1e-12),
                    format!("{cells}: envelope below data at t={t}"),
                )?;
            }
        }
        check(
            (0.4..=0.6).contains(&r.fitted_rate),
            format!("{cells}: rate {} outside [0.4, 0.6]", r.fitted_rate),
        )?;
        rates.push(r.fitted_rate);
        notes.push(format!("{cells}: {:.4}", r.fitted_rate));
    }
    let msg = format!(
        "rates {} (n gamma {:.4})",
        notes.join(", "),
        optimize_gamma(1.0, 1, 0.01).unwrap().gamma
    );
    check((rates[0] - rates[1]).abs() <= 0.05, msg.clone())?;
    Ok(msg)
}

fn ac7() -> Outcome {
    let run =
        run_decay_experiment_full(&ExperimentConfig::flagship(4096).unwrap()).map_err(|e| e.to_string())?;
    let late: Vec<SolutionField> = run.perturbed.into_iter().filter(|f| f.time >= 1.0).collect();
    let flux = ExperimentConfig::flagship(4096)
        .unwrap()
        .perturbed_config()
        .unwrap()
        .flux;
    let per: Vec<String> = late
        .iter()
        .map(|f| {
            format!(
                "t={}: {:.3}",
                f.time,
                oleinik_ratio(std::slice::from_ref(f), &flux).unwrap()
            )
        })
        .collect();
    let ratio = oleinik_ratio(&late, &flux).map_err(|e| e.to_string())?;
    let msg = format!("ratio {ratio:.4} ({})", per.join(", "));
    check(
        ratio <= 1.2,
        format!("{msg}; maximum sits at the sonic edge u = 0 of the fan"),
    )?;
    Ok(msg)
}

fn ac8() -> Outcome {
    let base = FluxModel::burgers(1, Interval::new(0.0, 1.0).unwrap()).unwrap();
    let reference = Reference::Rarefaction(RarefactionWave::new(&base, 0, 0.0, 1.0, 1.0, 0.0).unwrap());
    let bump = Bump {
        amplitude: 0.9,
        width: 0.8,
        center: vec![0.3],
    };
    let flux = base.with_interval(Interval::new(0.0, 1.9).unwrap()).unwrap();
    let window = BallWindow {
        center: vec![2.0, 2.3],
        scale: 0.5,
        r: 1.0,
        big_r: 2.0,
    };
    let w = LipschitzProfile::Affine {
        value: 0.45,
        gradient: vec![0.1],
        origin: vec![2.3],
    };
    let mut ratios = Vec::new();
    for cells in [1024, 2048, 4096] {
        let grid = Grid::uniform_1d(cells, -4.0, 8.0, Boundary::Outflow).unwrap();
        let mk = |init| {
            let cfg = SolveConfig::new(
                flux.clone(),
                grid.clone(),
                init,
                3.5,
                0.45,
                uniform_times(3.5, 700),
                Scheme::EngquistOsher,
            )?;
            solve(&cfg)
        };
        let u = mk(InitialData::RarefactionPlusBump {
            reference: reference.clone(),
            bump: bump.clone(),
        })
        .map_err(|e| e.to_string())?;
        let ut = mk(InitialData::Wave {
            reference: reference.clone(),
        })
        .map_err(|e| e.to_string())?;
        let rep = variation_bound_ratio(&u, &ut, &flux, &w, &window, &VGrid::with_cells(1.9, 256).unwrap())
            .map_err(|e| e.to_string())?;
        check(
            !rep.violation && rep.lhs > 0.0,
            format!("{cells}: lhs {} rhs {}", rep.lhs, rep.rhs),
        )?;
        ratios.push(rep.ratio);
    }
    let msg = format!("ratios {ratios:.5?} at 1024/2048/4096 cells");
    check(ratios.windows(2).all(|r| r[1] <= 1.5 * r[0]), msg.clone())?;
    Ok(msg)
}

fn main() {
    let suite: [Entry; 8] = [
        ("AC1", "exponent algebra", ac1),
        ("AC2", "nondegeneracy", ac2),
        ("AC3", "solver exactness", ac3),
        ("AC4", "solver accuracy", ac4),
        ("AC5", "kinetic layer", ac5),
        ("AC6", "decay flagship", ac6),
        ("AC7", "Oleinik diagnostic", ac7),
        ("AC8", "variation-bound ratio", ac8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (id, name, run) in suite {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("{id} {name}: PASS [{secs:.1} s] {msg}"),
            Err(msg) => {
                failed += 1;
                println!("{id} {name}: FAIL [{secs:.1} s] {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
