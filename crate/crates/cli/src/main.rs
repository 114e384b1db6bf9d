use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kinlab::config::RunFile;
use kinlab::harness::{
    contraction_audit, is_nonincreasing_within, max_principle_holds, run_decay_experiment_full,
};
use kinlab::io::{read_trajectory, write_decay_csv, write_trajectory};
use kinlab::kinetic::{
    degiorgi_sequence, entropy_dissipation_residual, kinetic_function, reconstruct_u, SmoothBump, VGrid,
};
use kinlab::nondeg::nondegeneracy_profile_with;
use kinlab::solver::{solve, uniform_times};
use kinlab::{compute_exponents, optimize_gamma, FluxModel, Interval, Polynomial};

#[derive(Parser)]
#[command(
    name = "kinlab",
    version,
    about = "Entropy solvers and kinetic diagnostics for scalar conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the sublevel-set profile (C0, alpha) of a flux.
    Nondeg(NondegArgs),
    /// Print the exponent set for (alpha, n, delta).
    Exponents(ExponentArgs),
    /// Run a solve described by a TOML file and write snapshots.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Kinetic-layer diagnostics.
    Kinetic {
        #[command(subcommand)]
        action: KineticAction,
    },
    /// Run a decay experiment.
    Decay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Contraction and maximum-principle audit of a trajectory pair.
    Audit {
        /// Run the experiment in this file and audit its two trajectories.
        #[arg(long, conflicts_with = "pair")]
        config: Option<PathBuf>,
        /// Two stored trajectory manifests.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        pair: Option<Vec<PathBuf>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FluxChoice {
    Burgers,
    ConvexPower,
    CustomPoly,
}

#[derive(Args)]
struct NondegArgs {
    #[arg(long, value_enum, default_value = "burgers")]
    flux: FluxChoice,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Exponent of the first component for convex-power.
    #[arg(long)]
    power: Option<u32>,
    /// Ascending coefficients per component, components separated by `;`.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long, default_value = "-1,1")]
    interval: String,
    /// Comma list, or `2^-3..2^-10` for consecutive powers.
    #[arg(long, default_value = "2^-3..2^-10")]
    deltas: String,
    #[arg(long, default_value_t = 2000)]
    sphere_samples: usize,
    #[arg(long, default_value_t = 20000)]
    v_samples: usize,
    #[arg(long, default_value_t = 128)]
    refine_starts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "optimize")]
    delta: Option<f64>,
    #[arg(long)]
    optimize: bool,
    #[arg(long, default_value_t = 0.01)]
    margin: f64,
}

#[derive(Subcommand)]
enum KineticAction {
    /// Check `∫ chi(u, v) dv = u` on random states.
    RoundtripCheck {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = VGrid::DEFAULT_CELLS)]
        v_cells: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// De Giorgi energies on nested space-time balls.
    Degiorgi {
        #[arg(long)]
        config: PathBuf,
        /// `t,x[,y]`
        #[arg(long)]
        center: String,
        #[arg(long)]
        scale: f64,
        #[arg(long = "K")]
        k_height: f64,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, default_value_t = 400)]
        snapshots: usize,
    },
    /// Kruzhkov pairing against a smooth bump.
    Dissipation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: f64,
        /// Bump centre `t,x[,y]`.
        #[arg(long)]
        bump: String,
        /// Half-widths `t,x[,y]`.
        #[arg(long)]
        halfwidths: String,
        #[arg(long, default_value_t = 0.0)]
        plateau: f64,
        #[arg(long, default_value_t = 400)]
        snapshots: usize,
    },
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{p}`"))
        })
        .collect()
}

/// `a,b,c` or `B^e1..B^e2` with unit exponent steps.
fn parse_deltas(s: &str) -> Result<Vec<f64>> {
    if let Some((a, b)) = s.split_once("..") {
        let pow = |t: &str| -> Result<(f64, i32)> {
            let (base, e) = t.trim().split_once('^').context("expected B^e")?;
            Ok((base.parse()?, e.parse()?))
        };
        let ((b1, e1), (b2, e2)) = (pow(a)?, pow(b)?);
        if b1 != b2 {
            bail!("geometric delta range needs one base");
        }
        let step = if e2 >= e1 { 1 } else { -1 };
        let mut out = Vec::new();
        let mut e = e1;
        loop {
            out.push(b1.powi(e));
            if e == e2 {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    parse_list(s)
}

fn build_flux(args: &NondegArgs) -> Result<FluxModel> {
    let iv = parse_list(&args.interval)?;
    if iv.len() != 2 {
        bail!("--interval takes lo,hi");
    }
    let iv = Interval::new(iv[0], iv[1])?;
    Ok(match args.flux {
        FluxChoice::Burgers => FluxModel::burgers(args.n, iv)?,
        FluxChoice::ConvexPower => {
            FluxModel::convex_power(args.power.context("--power is required")?, args.n, iv)?
        }
        FluxChoice::CustomPoly => {
            let text = args.coeffs.as_deref().context("--coeffs is required")?;
            let comps = text
                .split(';')
                .map(|c| parse_list(c).map(Polynomial::new))
                .collect::<Result<Vec<_>>>()?;
            FluxModel::custom(comps, iv)?
        }
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct RoundtripReport {
    samples: usize,
    v_cells: usize,
    cell_width: f64,
    max_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct AuditReport {
    l1_series: Vec<f64>,
    contraction: bool,
    max_principle_a: bool,
    max_principle_b: bool,
    pass: bool,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Nondeg(args) => {
            let flux = build_flux(&args)?;
            let deltas = parse_deltas(&args.deltas)?;
            let profile = nondegeneracy_profile_with(
                &flux,
                &deltas,
                args.sphere_samples,
                args.v_samples,
                args.refine_starts,
            )?;
            emit(&profile, args.out.as_deref())?;
            Ok(true)
        }
        Command::Exponents(args) => {
            let set = match (args.delta, args.optimize) {
                (Some(d), _) => compute_exponents(args.alpha, args.n, d)?,
                (None, true) => optimize_gamma(args.alpha, args.n, args.margin)?,
                (None, false) => bail!("give --delta or --optimize"),
            };
            emit(&set, None)?;
            Ok(set.valid)
        }
        Command::Solve { config, out_prefix } => {
            let file = RunFile::load(&config)?;
            let cfg = file.solve_config()?;
            let traj = solve(&cfg)?;
            if traj.is_empty() {
                eprintln!("no snapshots requested");
                return Ok(true);
            }
            let echo = serde_json::to_value(&file)?;
            let manifest = write_trajectory(&out_prefix, &traj, echo)?;
            eprintln!("wrote {} snapshots, manifest {}", traj.len(), manifest.display());
            Ok(true)
        }
        Command::Kinetic { action } => kinetic(action),
        Command::Decay { config, out, csv } => {
            let cfg = RunFile::load(&config)?.experiment_config()?;
            let run = run_decay_experiment_full(&cfg)?;
            let r = &run.report;
            emit(r, out.as_deref())?;
            if let Some(p) = csv {
                write_decay_csv(&p, r)?;
            }
            Ok(r.pass && r.l1_nonincreasing && r.max_principle)
        }
        Command::Audit { config, pair, out } => {
            let (a, b) = match (config, pair) {
                (Some(c), _) => {
                    let run = run_decay_experiment_full(&RunFile::load(&c)?.experiment_config()?)?;
                    (run.perturbed, run.reference)
                }
                (None, Some(p)) => (read_trajectory(&p[0])?, read_trajectory(&p[1])?),
                (None, None) => bail!("give --config or --pair"),
            };
            let l1 = contraction_audit(&a, &b)?;
            let report = AuditReport {
                contraction: is_nonincreasing_within(&l1, a[0].l1_norm().max(b[0].l1_norm())),
                max_principle_a: max_principle_holds(&a),
                max_principle_b: max_principle_holds(&b),
                l1_series: l1,
                pass: false,
            };
            let report = AuditReport {
                pass: report.contraction && report.max_principle_a && report.max_principle_b,
                ..report
            };
            emit(&report, out.as_deref())?;
            Ok(report.pass)
        }
    }
}

fn kinetic(action: KineticAction) -> Result<bool> {
    match action {
        KineticAction::RoundtripCheck {
            lambda,
            v_cells,
            samples,
            seed,
        } => {
            let grid = VGrid::with_cells(lambda, v_cells)?;
            // Deterministic low-discrepancy states in [-lambda, lambda].
            let phi = 0.618_033_988_749_894_9;
            let mut max_error = 0.0f64;
            for i in 0..samples {
                let s = ((i as f64 + 1.0 + seed as f64) * phi).fract();
                let u = lambda * (2.0 * s - 1.0);
                max_error = max_error.max((reconstruct_u(u, &grid) - u).abs());
                debug_assert!(kinetic_function(u, 0.5 * u).abs() <= 1);
            }
            let report = RoundtripReport {
                samples,
                v_cells,
                cell_width: grid.spacing(),
                max_error,
                pass: max_error <= grid.spacing(),
            };
            emit(&report, None)?;
            Ok(report.pass)
        }
        KineticAction::Degiorgi {
            config,
            center,
            scale,
            k_height,
            kmax,
            snapshots,
        } => {
            let file = RunFile::load(&config)?;
            let mut cfg = file.solve_config()?;
            cfg.snapshots = uniform_times(cfg.end_time, snapshots);
            let traj = solve(&cfg)?;
            let reference = file.reference_solution()?;
            let data = degiorgi_sequence(&traj, &reference, &parse_list(&center)?, scale, k_height, kmax)?;
            emit(&data, None)?;
            Ok(data.energies.windows(2).all(|w| w[1] <= w[0]))
        }
        KineticAction::Dissipation {
            config,
            k,
            bump,
            halfwidths,
            plateau,
            snapshots,
        } => {
            let file = RunFile::load(&config)?;
            let mut cfg = file.solve_config()?;
            cfg.snapshots = uniform_times(cfg.end_time, snapshots);
            let traj = solve(&cfg)?;
            let bump = SmoothBump::new(parse_list(&bump)?, parse_list(&halfwidths)?, plateau)?;
            let report = entropy_dissipation_residual(&traj, &cfg.flux, k, &bump)?;
            emit(&report, None)?;
            Ok(report.residual.is_finite())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
