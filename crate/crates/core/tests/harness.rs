use kinlab::harness::{is_nonincreasing_within, run_decay_experiment_full};
use kinlab::solver::{solve, uniform_times};
use kinlab::{contraction_audit, oleinik_ratio, run_decay_experiment, Error, ExperimentConfig, Scheme};

#[test]
fn zero_amplitude_gives_no_difference() {
    let mut cfg = ExperimentConfig::flagship(2048).unwrap();
    cfg.bump.amplitude = 0.0;
    let rep = run_decay_experiment(&cfg).unwrap();
    assert!(rep.linf_diff.iter().all(|d| *d == 0.0));
    assert!(rep.l1_diff.iter().all(|d| *d == 0.0));
    assert!(rep.fitted_rate.is_infinite() && rep.pass);
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("\"fitted_rate\":\"inf\""));
}

#[test]
fn flat_state_decays() {
    let rep = run_decay_experiment(&ExperimentConfig::flat_state(4096).unwrap()).unwrap();
    assert!(rep.pass && rep.l1_nonincreasing && rep.max_principle);
    assert!((0.35..0.6).contains(&rep.fitted_rate), "{}", rep.fitted_rate);
    // No fan: the reference is exact.
    assert!(rep.reference_error.iter().all(|e| *e < 1e-12));
}

#[test]
fn flagship_report_is_consistent() {
    let cfg = ExperimentConfig::flagship(4096).unwrap();
    let run = run_decay_experiment_full(&cfg).unwrap();
    let rep = &run.report;
    assert!(rep.pass && rep.l1_nonincreasing && rep.max_principle);
    assert!(rep.fitted_rate >= rep.gamma_bound - 0.05);
    for (i, t) in rep.times.iter().enumerate() {
        if (cfg.fit_window.0..=cfg.fit_window.1).contains(t) {
            assert!(rep.linf_diff[i] <= rep.bound_envelope[i] * (1.0 + 1e-12));
        }
    }
    // The reference error stays below the difference being measured.
    for (e, d) in rep.reference_error.iter().zip(&rep.linf_diff) {
        assert!(e < d, "{e} {d}");
    }
    let l1 = contraction_audit(&run.perturbed, &run.reference).unwrap();
    assert!(is_nonincreasing_within(&l1, run.perturbed[0].l1_norm()));
    assert!(matches!(
        contraction_audit(&run.perturbed, &run.reference[1..]),
        Err(Error::Config(_))
    ));
}

#[test]
fn invalid_experiments_rejected() {
    let mut cfg = ExperimentConfig::flagship(2048).unwrap();
    cfg.times = vec![1.0, 2.0];
    assert!(run_decay_experiment(&cfg).is_err());
    let coarse = ExperimentConfig::flagship(256).unwrap();
    assert!(matches!(run_decay_experiment(&coarse), Err(Error::Config(_))));
}

fn flagship_late(cells: usize, scheme: Scheme) -> (Vec<kinlab::SolutionField>, kinlab::FluxModel) {
    let mut cfg = ExperimentConfig::flagship(cells).unwrap();
    cfg.scheme = scheme;
    let mut solve_cfg = cfg.perturbed_config().unwrap();
    solve_cfg.snapshots = uniform_times(solve_cfg.end_time, 64);
    let traj = solve(&solve_cfg).unwrap();
    (
        traj.into_iter().filter(|f| f.time >= 1.0).collect(),
        solve_cfg.flux,
    )
}

#[test]
fn oleinik_bound_lax_friedrichs() {
    let (traj, flux) = flagship_late(4096, Scheme::LaxFriedrichs);
    let ratio = oleinik_ratio(&traj, &flux).unwrap();
    assert!(ratio <= 1.2, "{ratio}");
}

#[test]
fn oleinik_sonic_corner_engquist_osher() {
    // Upwinding has no viscosity at the sonic edge u = 0 of the fan, so the
    // first cells there settle at slope ~2/(t + 4) independent of dx.
    let (coarse, flux) = flagship_late(2048, Scheme::EngquistOsher);
    let (fine, _) = flagship_late(4096, Scheme::EngquistOsher);
    let a = oleinik_ratio(&coarse, &flux).unwrap();
    let b = oleinik_ratio(&fine, &flux).unwrap();
    assert!((a - b).abs() < 1e-3 && b < 2.0, "{a} {b}");
    for f in fine.iter().filter(|f| f.time >= 4.0) {
        let r = oleinik_ratio(std::slice::from_ref(f), &flux).unwrap();
        let law = 2.0 * f.time / (f.time + 4.0);
        assert!((r - law).abs() <= 0.02 * law, "t={}: {r} vs {law}", f.time);
    }
}
