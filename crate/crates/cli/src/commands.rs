//! Subcommand implementations: scan, sweep, swap-demo, verify and yields.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use triradical::analysis::{run_full_verification, VerificationConfig};
use triradical::correlations::{DiscordObservable, DiscordOpts, HolevoObservable, MutualObservable};
use triradical::dynamics::{horizon_periods, trajectory};
use triradical::model::{FieldAngles, InteractionKind};
use triradical::states::{
    coherence_c1, composite_environment, composite_system, qubit_from_bloch, sample_bloch,
    BlochVector, DensityMatrix, InitialFamily,
};
use triradical::yields::{
    angle_scan, anisotropy, anisotropy_of_grid, scan_many, weighted_yields_multi, AnisotropyStats,
    ScanResult, StateObservable, SystemC1Star, YieldMap,
};
use triradical::SensorError;

use crate::config::{ObservableKey, RunConfig};
use crate::output::{fmt_f64, scatter_svg, write_csv, ScatterPoint};

/// Command failure with the process exit code mandated for it.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or I/O problem (exit 1).
    Config(String),
    /// A numerical invariant failed during computation (exit 2).
    Numerical(String),
    /// The certification suite reported a failing verdict (exit 3).
    Verification,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical invariant violated: {m}"),
            CliError::Verification => write!(f, "verification failed"),
        }
    }
}

impl From<SensorError> for CliError {
    fn from(e: SensorError) -> Self {
        match e {
            SensorError::RejectedInput(m) => CliError::Config(m),
            SensorError::NumericalConsistency(m) | SensorError::DegenerateNormalization(m) => {
                CliError::Numerical(m)
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<(), CliError>;

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.out_dir).join(name)
}

fn ensure_out_dir(cfg: &RunConfig) -> CmdResult {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(())
}

/// splitmix64, used to derive independent per-state seeds from the master.
fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// The configured initial system state: explicit Bloch vector or a single
/// family draw from the master seed.
fn initial_state(cfg: &RunConfig) -> Result<(BlochVector, DensityMatrix), CliError> {
    let bloch = match cfg.init_bloch {
        Some(b) => b,
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            sample_bloch(&mut rng, cfg.init_family)
        }
    };
    let qubit = qubit_from_bloch(&bloch)?;
    Ok((bloch, composite_system(&qubit)))
}

fn environment_state(cfg: &RunConfig) -> Result<DensityMatrix, CliError> {
    let qubit = qubit_from_bloch(&cfg.env_bloch)?;
    Ok(composite_environment(&qubit))
}

fn discord_opts(cfg: &RunConfig) -> DiscordOpts {
    DiscordOpts {
        seed: cfg.seed,
        ..cfg.discord_opts
    }
}

fn build_observables(cfg: &RunConfig) -> Vec<Box<dyn StateObservable>> {
    let opts = discord_opts(cfg);
    cfg.observables
        .iter()
        .map(|k| -> Box<dyn StateObservable> {
            match k {
                ObservableKey::C1Star => Box::new(SystemC1Star),
                ObservableKey::Mutual => Box::new(MutualObservable),
                ObservableKey::Discord => Box::new(DiscordObservable { opts }),
                ObservableKey::Holevo => Box::new(HolevoObservable { opts }),
            }
        })
        .collect()
}

/// Scan one initial state over the angle grid; writes scan.csv and
/// scan_summary.csv.
pub fn cmd_scan(cfg: &RunConfig) -> CmdResult {
    ensure_out_dir(cfg)?;
    let (_, rho_s) = initial_state(cfg)?;
    let rho_e = environment_state(cfg)?;
    let observables = build_observables(cfg);
    let obs_refs: Vec<&dyn StateObservable> = observables.iter().map(|b| b.as_ref()).collect();

    let scan = angle_scan(
        &cfg.params,
        &rho_s,
        &rho_e,
        cfg.n_theta,
        cfg.n_phi,
        &obs_refs,
        cfg.n_sub,
        cfg.eps_tail,
    )?;
    let stats = anisotropy(&scan)?;
    write_scan_csv(cfg, &scan, &stats, "scan.csv")?;
    write_summary_csv(cfg, &stats, "scan_summary.csv")?;
    println!(
        "scan: {} points, delta={:.6e} ra={:.6e} mean={:.8}",
        scan.points.len(),
        stats.delta,
        stats.ra,
        stats.mean
    );
    Ok(())
}

fn write_scan_csv(
    cfg: &RunConfig,
    scan: &ScanResult,
    stats: &AnisotropyStats,
    name: &str,
) -> CmdResult {
    let yields: Vec<f64> = scan.points.iter().map(|p| p.singlet_yield).collect();
    let max = yields.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = yields.iter().copied().fold(f64::INFINITY, f64::min);
    let argmax = yields.iter().position(|&y| y == max);
    let argmin = yields.iter().position(|&y| y == min);
    let flag = |i: usize| -> String {
        if stats.delta <= 1e-12 {
            String::new()
        } else if Some(i) == argmax {
            "max".to_string()
        } else if Some(i) == argmin {
            "min".to_string()
        } else {
            String::new()
        }
    };

    let mut columns: Vec<String> = vec![
        "theta".to_string(),
        "phi".to_string(),
        "yield".to_string(),
        "delta_flag".to_string(),
    ];
    for n in scan.aux_names.iter() {
        columns.push(format!("{n}_yield"));
    }
    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();

    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![
                fmt_f64(p.angles.theta),
                fmt_f64(p.angles.phi),
                fmt_f64(p.singlet_yield),
                flag(i),
            ];
            row.extend(p.aux.iter().map(|v| fmt_f64(*v)));
            row
        })
        .collect();
    write_csv(&out_path(cfg, name), cfg, &col_refs, &rows)?;
    Ok(())
}

fn write_summary_csv(cfg: &RunConfig, stats: &AnisotropyStats, name: &str) -> CmdResult {
    write_csv(
        &out_path(cfg, name),
        cfg,
        &["delta", "ra", "mean", "objective"],
        &[vec![
            fmt_f64(stats.delta),
            fmt_f64(stats.ra),
            fmt_f64(stats.mean),
            fmt_f64(stats.objective),
        ]],
    )?;
    Ok(())
}

struct SweepRow {
    seed: u64,
    family: String,
    bloch: BlochVector,
    c1_initial: f64,
    stats: AnisotropyStats,
    c1star_yield: f64,
    chi_yield: f64,
    discord_yield: f64,
}

/// Sweep over random initial system states. Row 0 is always the maximally
/// mixed reference draw (family "reference"); the sensor signal must vanish
/// there. Fully reproducible from the master seed.
pub fn cmd_sweep(cfg: &RunConfig) -> CmdResult {
    ensure_out_dir(cfg)?;
    let rho_e = environment_state(cfg)?;

    // Draws: (seed, family name, bloch, system state).
    let mut draws: Vec<(u64, String, BlochVector, DensityMatrix)> = Vec::new();
    let mixed = DensityMatrix::maximally_mixed(8);
    draws.push((0, "reference".to_string(), BlochVector::new(0.0, 0.0, 0.0), mixed));
    for i in 0..cfg.sweep_states {
        let seed = derive_seed(cfg.seed, i as u64);
        let family = cfg.sweep_family.family_for(i);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let bloch = sample_bloch(&mut rng, family);
        let qubit = qubit_from_bloch(&bloch)?;
        draws.push((
            seed,
            family.name().to_string(),
            bloch,
            composite_system(&qubit),
        ));
    }

    let systems: Vec<DensityMatrix> = draws.iter().map(|d| d.3.clone()).collect();
    let yield_rows = scan_many(
        &cfg.params,
        &systems,
        &rho_e,
        cfg.n_theta,
        cfg.n_phi,
        cfg.eps_tail,
    )?;

    let want_c1star = cfg.observables.contains(&ObservableKey::C1Star);
    let want_chi = cfg.observables.contains(&ObservableKey::Holevo);
    let want_discord = cfg.observables.contains(&ObservableKey::Discord);
    let reference_angle = FieldAngles::new(cfg.yields_theta, cfg.yields_phi);
    let opts = discord_opts(cfg);

    let rows: Result<Vec<SweepRow>, CliError> = draws
        .par_iter()
        .zip(yield_rows.par_iter())
        .map(|((seed, family, bloch, system), yields)| {
            let stats = anisotropy_of_grid(yields, cfg.n_theta, cfg.n_phi)?;
            let c1_initial = coherence_c1(system)?;

            let mut observables: Vec<Box<dyn StateObservable>> = Vec::new();
            if want_c1star {
                observables.push(Box::new(SystemC1Star));
            }
            if want_chi {
                observables.push(Box::new(HolevoObservable { opts }));
            }
            if want_discord {
                observables.push(Box::new(DiscordObservable { opts }));
            }
            let (mut c1star_yield, mut chi_yield, mut discord_yield) =
                (f64::NAN, f64::NAN, f64::NAN);
            if !observables.is_empty() {
                let refs: Vec<&dyn StateObservable> =
                    observables.iter().map(|b| b.as_ref()).collect();
                let (_, values) = weighted_yields_multi(
                    &cfg.params,
                    system,
                    &rho_e,
                    &reference_angle,
                    &refs,
                    cfg.n_sub,
                    cfg.eps_tail,
                )?;
                let mut it = values.into_iter();
                if want_c1star {
                    c1star_yield = it.next().unwrap_or(f64::NAN);
                }
                if want_chi {
                    chi_yield = it.next().unwrap_or(f64::NAN);
                }
                if want_discord {
                    discord_yield = it.next().unwrap_or(f64::NAN);
                }
            }
            Ok(SweepRow {
                seed: *seed,
                family: family.clone(),
                bloch: *bloch,
                c1_initial,
                stats,
                c1star_yield,
                chi_yield,
                discord_yield,
            })
        })
        .collect();
    let rows = rows?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.seed.to_string(),
                r.family.clone(),
                fmt_f64(r.bloch.x),
                fmt_f64(r.bloch.y),
                fmt_f64(r.bloch.z),
                fmt_f64(r.c1_initial),
                fmt_f64(r.stats.mean),
                fmt_f64(r.stats.delta),
                fmt_f64(r.stats.ra),
                fmt_f64(r.stats.objective),
                fmt_f64(r.c1star_yield),
                fmt_f64(r.chi_yield),
                fmt_f64(r.discord_yield),
            ]
        })
        .collect();
    write_csv(
        &out_path(cfg, "sweep.csv"),
        cfg,
        &[
            "seed",
            "family",
            "bloch_x",
            "bloch_y",
            "bloch_z",
            "c1_initial",
            "yield_mean",
            "delta",
            "ra",
            "objective",
            "c1star_yield",
            "chi_yield",
            "discord_yield",
        ],
        &csv_rows,
    )?;

    if cfg.svg {
        let points: Vec<ScatterPoint> = rows
            .iter()
            .map(|r| {
                let diagonal = r.bloch.is_z_diagonal();
                let class = match (diagonal, r.bloch.z >= 0.0) {
                    (true, true) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (false, false) => 3,
                };
                ScatterPoint {
                    x: r.c1_initial,
                    y: r.stats.delta,
                    class,
                }
            })
            .collect();
        let svg = scatter_svg(
            "Initial coherence vs anisotropy",
            "C1 of initial system state (bits)",
            "absolute anisotropy of the singlet yield",
            &["diagonal, z >= 0", "diagonal, z < 0", "off-diagonal, z >= 0", "off-diagonal, z < 0"],
            &points,
        );
        // Provenance comment before the root element, like every other file.
        let header = format!("<!-- {} -->\n", crate::output::provenance_header(cfg).trim_start_matches("# ").trim_end());
        std::fs::write(out_path(cfg, "sweep.svg"), header + &svg)?;
    }

    println!(
        "sweep: {} states (+1 reference), delta range [{:.3e}, {:.3e}]",
        cfg.sweep_states,
        rows.iter().map(|r| r.stats.delta).fold(f64::INFINITY, f64::min),
        rows.iter().map(|r| r.stats.delta).fold(0.0, f64::max),
    );
    Ok(())
}

/// Swap-interaction demonstration: maximally mixed system, random coherent
/// environments. The mixed-environment reference must show no anisotropy;
/// coherent environments must produce some.
pub fn cmd_swap_demo(cfg: &RunConfig) -> CmdResult {
    ensure_out_dir(cfg)?;
    let mut params = cfg.params;
    if params.interaction_kind != InteractionKind::Swap {
        params.interaction_kind = InteractionKind::Swap;
        params.j_se_tau = std::f64::consts::FRAC_PI_4;
    }
    let system = DensityMatrix::maximally_mixed(8);

    let mut draws: Vec<(u64, BlochVector)> = vec![(0, BlochVector::new(0.0, 0.0, 0.0))];
    for i in 0..cfg.swap_demo_states {
        let seed = derive_seed(cfg.seed, i as u64);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        draws.push((seed, sample_bloch(&mut rng, InitialFamily::BallUniform)));
    }

    let rows: Result<Vec<(u64, BlochVector, f64, AnisotropyStats)>, CliError> = draws
        .iter()
        .map(|(seed, bloch)| {
            let qubit = qubit_from_bloch(bloch)?;
            let rho_e = composite_environment(&qubit);
            let c1_env = coherence_c1(&rho_e)?;
            let yields = scan_many(
                &params,
                std::slice::from_ref(&system),
                &rho_e,
                cfg.n_theta,
                cfg.n_phi,
                cfg.eps_tail,
            )?;
            let stats = anisotropy_of_grid(&yields[0], cfg.n_theta, cfg.n_phi)?;
            Ok((*seed, *bloch, c1_env, stats))
        })
        .collect();
    let rows = rows?;

    // Structural expectations of the demonstration itself.
    let reference_delta = rows[0].3.delta;
    if reference_delta > 1e-9 {
        return Err(CliError::Numerical(format!(
            "mixed-environment reference has delta {reference_delta:.3e} > 1e-9"
        )));
    }
    if cfg.swap_demo_states > 0 {
        let best = rows[1..].iter().map(|r| r.3.delta).fold(0.0, f64::max);
        if best <= 1e-9 {
            return Err(CliError::Numerical(format!(
                "no coherent environment draw produced anisotropy (max delta {best:.3e})"
            )));
        }
    }

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, (seed, bloch, c1_env, stats))| {
            vec![
                i.to_string(),
                seed.to_string(),
                fmt_f64(bloch.x),
                fmt_f64(bloch.y),
                fmt_f64(bloch.z),
                fmt_f64(*c1_env),
                fmt_f64(stats.mean),
                fmt_f64(stats.delta),
                fmt_f64(stats.ra),
                fmt_f64(stats.objective),
            ]
        })
        .collect();
    write_csv(
        &out_path(cfg, "swap_demo.csv"),
        cfg,
        &[
            "index", "seed", "bloch_x", "bloch_y", "bloch_z", "c1_env", "yield_mean", "delta",
            "ra", "objective",
        ],
        &csv_rows,
    )?;
    println!(
        "swap-demo: {} environment draws, reference delta {:.3e}, max delta {:.3e}",
        cfg.swap_demo_states,
        reference_delta,
        rows[1..].iter().map(|r| r.3.delta).fold(0.0, f64::max)
    );
    Ok(())
}

/// Run the certification suite; returns exit code 3 when any verdict fails.
pub fn cmd_verify(cfg: &RunConfig) -> CmdResult {
    ensure_out_dir(cfg)?;
    let vcfg = VerificationConfig {
        samples: cfg.verify_samples,
        angles: cfg.verify_angles,
        seed: cfg.seed,
    };
    let report = run_full_verification(&vcfg)?;

    println!("{:<34} {:>8} {:>14}  verdict", "check", "samples", "residual");
    for c in report.checks.iter() {
        println!(
            "{:<34} {:>8} {:>14.6e}  {}",
            c.name,
            c.samples,
            c.residual,
            if c.passed { "pass" } else { "FAIL" }
        );
    }

    let mut text = crate::output::provenance_header(cfg);
    text.push_str(&report.summary());
    std::fs::write(out_path(cfg, "verify_summary.txt"), text)?;

    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

/// Weighted-yield study of the configured observables at one field angle,
/// with an optional trajectory dump at segment boundaries.
pub fn cmd_yields(cfg: &RunConfig) -> CmdResult {
    ensure_out_dir(cfg)?;
    let (_, rho_s) = initial_state(cfg)?;
    let rho_e = environment_state(cfg)?;
    let angle = FieldAngles::new(cfg.yields_theta, cfg.yields_phi);

    let observables: Vec<Box<dyn StateObservable>> = if cfg.observables.is_empty() {
        vec![Box::new(SystemC1Star)]
    } else {
        build_observables(cfg)
    };
    let refs: Vec<&dyn StateObservable> = observables.iter().map(|b| b.as_ref()).collect();

    let map = YieldMap::build(&cfg.params, &angle, &rho_e, cfg.eps_tail)?;
    let phi_analytic = map.singlet_yield(&rho_s)?;
    let (phi_quad, values) = weighted_yields_multi(
        &cfg.params,
        &rho_s,
        &rho_e,
        &angle,
        &refs,
        cfg.n_sub,
        cfg.eps_tail,
    )?;

    let mut rows = vec![
        vec!["phi_singlet".to_string(), fmt_f64(phi_analytic)],
        vec!["phi_singlet_quadrature".to_string(), fmt_f64(phi_quad)],
    ];
    for (obs, v) in refs.iter().zip(values.iter()) {
        rows.push(vec![format!("{}_yield", obs.name()), fmt_f64(*v)]);
    }
    write_csv(&out_path(cfg, "yields.csv"), cfg, &["name", "value"], &rows)?;

    if cfg.trajectory {
        let periods = horizon_periods(&cfg.params, cfg.eps_tail)?;
        let traj = trajectory(&cfg.params, &angle, &rho_s, &rho_e, periods)?;
        let traj_rows: Vec<Vec<String>> = traj
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.t),
                    fmt_f64(r.trace),
                    fmt_f64(r.singlet_population),
                    fmt_f64(r.c1_star),
                ]
            })
            .collect();
        write_csv(
            &out_path(cfg, "trajectory.csv"),
            cfg,
            &["t", "trace", "singlet_population", "c1_star"],
            &traj_rows,
        )?;
    }
    println!(
        "yields: phi_singlet={:.8} ({} observables)",
        phi_analytic,
        refs.len()
    );
    Ok(())
}
