//! Subcommand implementations: flag/config resolution and row building.

use hyperent::cavity::{
    fidelity_closed_form_p, fidelity_closed_form_s, reflection_coefficient, CavityParams,
    ReflectionPair,
};
use hyperent::protocols::{
    ecp_success_probability, epp_iterate, sample_protocol, EppEnsemble, ProtocolRun,
};

use crate::config::{pick, ConfigMap};
use crate::output::{write_table, Field, Format, Table};
use crate::{CliError, CommonArgs, EcpArgs, EppArgs, QndFidelityArgs, SweepArgs};

/// Starting fidelities swept when `epp` is run without `--f1`.
const EPP_GRID: [f64; 4] = [0.6, 0.7, 0.8, 0.9];

fn load_config(common: &CommonArgs) -> Result<ConfigMap, CliError> {
    match &common.config {
        Some(path) => ConfigMap::from_file(path),
        None => Ok(ConfigMap::empty()),
    }
}

fn resolve_format(common: &CommonArgs) -> Result<Format, CliError> {
    match &common.format {
        Some(raw) => Format::parse(raw),
        None => Ok(Format::Csv),
    }
}

/// Shots/seed resolution for the sampling commands: a positive shot count
/// needs an explicit seed so that runs stay reproducible.
fn resolve_sampling(common: &CommonArgs, cfg: &ConfigMap) -> Result<Option<(u64, u64)>, CliError> {
    let shots = pick(common.shots, cfg.get_u64("shots"))?.unwrap_or(0);
    if shots == 0 {
        return Ok(None);
    }
    match pick(common.seed, cfg.get_u64("seed"))? {
        Some(seed) => Ok(Some((shots, seed))),
        None => Err(CliError::Config(
            "--seed is required when --shots > 0".into(),
        )),
    }
}

/// The table-of-constants commands never sample.
fn reject_sampling(common: &CommonArgs, name: &str) -> Result<(), CliError> {
    if common.shots.is_some_and(|shots| shots > 0) {
        return Err(CliError::Config(format!(
            "`{name}` is deterministic; --shots does not apply"
        )));
    }
    Ok(())
}

pub fn epp(args: &EppArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.common)?;
    cfg.check_keys(&["f1", "f2", "rounds", "shots", "seed"])?;
    let f1 = pick(args.f1, cfg.get_f64("f1"))?;
    let f2 = pick(args.f2, cfg.get_f64("f2"))?;
    let rounds = pick(args.rounds, cfg.get_usize("rounds"))?.unwrap_or(5);
    let sampling = resolve_sampling(&args.common, &cfg)?;
    let starts: Vec<(f64, f64)> = match (f1, f2) {
        (None, None) => EPP_GRID.iter().map(|&f| (f, f)).collect(),
        (Some(a), None) => vec![(a, a)],
        (Some(a), Some(b)) => vec![(a, b)],
        (None, Some(_)) => {
            return Err(CliError::Config(
                "--f2 without --f1 is ambiguous; give both or neither".into(),
            ))
        }
    };
    let mut table = Table::new(&[
        "f1_start",
        "f2_start",
        "round",
        "f1",
        "f2",
        "hyper_fidelity",
        "cumulative_yield",
    ]);
    for &(a, b) in &starts {
        match sampling {
            None => {
                for point in epp_iterate(a, b, rounds)? {
                    table.push_row(&[
                        Field::Num(a),
                        Field::Num(b),
                        Field::Int(point.round as u64),
                        Field::Num(point.f1),
                        Field::Num(point.f2),
                        Field::Num(point.hyper_fidelity),
                        Field::Num(point.cumulative_yield),
                    ]);
                }
            }
            Some((shots, seed)) => epp_sampled(&mut table, a, b, rounds, shots, seed)?,
        }
    }
    write_table(
        &table,
        resolve_format(&args.common)?,
        args.common.out.as_deref(),
    )
}

fn epp_sampled(
    table: &mut Table,
    f1: f64,
    f2: f64,
    rounds: usize,
    shots: u64,
    seed: u64,
) -> Result<(), CliError> {
    let ensemble = EppEnsemble::bit_flip_mixture(f1, f2)?;
    let report = sample_protocol(&ProtocolRun::Epp { ensemble, rounds }, shots, seed)?;
    // Round 0 is the known starting point, not an estimate.
    table.push_row(&[
        Field::Num(f1),
        Field::Num(f2),
        Field::Int(0),
        Field::Num(f1),
        Field::Num(f2),
        Field::Num(f1 * f2),
        Field::Num(1.0),
    ]);
    let mut cumulative = 1.0;
    for round in &report.rounds {
        let (Some(e1), Some(e2)) = (round.f1, round.f2) else {
            eprintln!(
                "warning: no samples survived round {} for start ({f1}, {f2}); \
                 trajectory truncated",
                round.round
            );
            break;
        };
        cumulative *= round.success_rate;
        table.push_row(&[
            Field::Num(f1),
            Field::Num(f2),
            Field::Int(round.round as u64),
            Field::Num(e1),
            Field::Num(e2),
            Field::Num(e1 * e2),
            Field::Num(cumulative),
        ]);
    }
    Ok(())
}

pub fn ecp(args: &EcpArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.common)?;
    cfg.check_keys(&["two-alpha-sq", "rounds", "shots", "seed"])?;
    let two_alpha_sq = pick(args.two_alpha_sq, cfg.get_f64("two-alpha-sq"))?;
    let rounds = pick(args.rounds, cfg.get_usize("rounds"))?.unwrap_or(5);
    let sampling = resolve_sampling(&args.common, &cfg)?;
    let targets: Vec<f64> = match two_alpha_sq {
        Some(t) => vec![t],
        None => (1..=10).map(|k| k as f64 / 10.0).collect(),
    };
    let mut table = Table::new(&["two_alpha_sq", "round", "p_round", "p_cumulative"]);
    for &t in &targets {
        let amplitude = (t / 2.0).sqrt();
        match sampling {
            None => {
                let success = ecp_success_probability(amplitude, amplitude, rounds)?;
                let mut cumulative = 0.0;
                for (index, &p) in success.per_round.iter().enumerate() {
                    cumulative += p;
                    table.push_row(&[
                        Field::Num(t),
                        Field::Int(index as u64 + 1),
                        Field::Num(p),
                        Field::Num(cumulative),
                    ]);
                }
            }
            Some((shots, seed)) => {
                let run = ProtocolRun::Ecp {
                    alpha: amplitude,
                    gamma: amplitude,
                    rounds,
                };
                let report = sample_protocol(&run, shots, seed)?;
                let mut cumulative = 0.0;
                for round in &report.rounds {
                    cumulative += round.success_rate;
                    table.push_row(&[
                        Field::Num(t),
                        Field::Int(round.round as u64),
                        Field::Num(round.success_rate),
                        Field::Num(cumulative),
                    ]);
                }
            }
        }
    }
    write_table(
        &table,
        resolve_format(&args.common)?,
        args.common.out.as_deref(),
    )
}

pub fn qnd_fidelity(args: &QndFidelityArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.common)?;
    cfg.check_keys(&["g", "kappa", "eta", "gamma"])?;
    reject_sampling(&args.common, "qnd-fidelity")?;
    let g = pick(args.g, cfg.get_f64("g"))?.unwrap_or(1.0);
    let kappa = pick(args.kappa, cfg.get_f64("kappa"))?.unwrap_or(1.0);
    let eta = pick(args.eta, cfg.get_f64("eta"))?.unwrap_or(10.0);
    let gamma = pick(args.gamma, cfg.get_f64("gamma"))?.unwrap_or(0.015);
    let params = CavityParams::resonant(g, gamma, eta, kappa)?;
    let pair = ReflectionPair::evaluate(&params, 0.0)?;
    let (abs_r0, abs_r) = (pair.r0().norm(), pair.r().norm());
    let mut table = Table::new(&[
        "g",
        "kappa",
        "eta",
        "gamma",
        "abs_r0",
        "abs_r",
        "fidelity_p",
        "fidelity_s",
    ]);
    table.push_row(&[
        Field::Num(g),
        Field::Num(kappa),
        Field::Num(eta),
        Field::Num(gamma),
        Field::Num(abs_r0),
        Field::Num(abs_r),
        Field::Num(fidelity_closed_form_p(abs_r0, abs_r)?),
        Field::Num(fidelity_closed_form_s(abs_r0, abs_r)?),
    ]);
    write_table(
        &table,
        resolve_format(&args.common)?,
        args.common.out.as_deref(),
    )
}

pub fn reflection_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.common)?;
    cfg.check_keys(&[
        "g",
        "kappa",
        "eta",
        "gamma",
        "omega-min",
        "omega-max",
        "points",
    ])?;
    reject_sampling(&args.common, "reflection-sweep")?;
    let g = pick(args.g, cfg.get_f64("g"))?.unwrap_or(1.0);
    let kappa = pick(args.kappa, cfg.get_f64("kappa"))?.unwrap_or(1.0);
    let eta = pick(args.eta, cfg.get_f64("eta"))?.unwrap_or(10.0);
    let gamma = pick(args.gamma, cfg.get_f64("gamma"))?.unwrap_or(0.015);
    let omega_min = pick(args.omega_min, cfg.get_f64("omega-min"))?.unwrap_or(-5.0);
    let omega_max = pick(args.omega_max, cfg.get_f64("omega-max"))?.unwrap_or(5.0);
    let points = pick(args.points, cfg.get_usize("points"))?.unwrap_or(101);
    if points == 0 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    if !omega_min.is_finite() || !omega_max.is_finite() {
        return Err(CliError::Config(format!(
            "sweep bounds must be finite, got {omega_min} and {omega_max}"
        )));
    }
    if omega_min > omega_max {
        return Err(CliError::Config(format!(
            "--omega-min ({omega_min}) must not exceed --omega-max ({omega_max})"
        )));
    }
    let params = CavityParams::resonant(g, gamma, eta, kappa)?;
    let empty = params.decoupled();
    let mut table = Table::new(&["omega", "re_r", "im_r", "abs_r", "re_r0", "im_r0", "abs_r0"]);
    for k in 0..points {
        let omega = if points == 1 {
            omega_min
        } else {
            omega_min + (omega_max - omega_min) * k as f64 / (points - 1) as f64
        };
        let r = reflection_coefficient(&params, omega)?;
        let r0 = reflection_coefficient(&empty, omega)?;
        table.push_row(&[
            Field::Num(omega),
            Field::Num(r.re),
            Field::Num(r.im),
            Field::Num(r.norm()),
            Field::Num(r0.re),
            Field::Num(r0.im),
            Field::Num(r0.norm()),
        ]);
    }
    write_table(
        &table,
        resolve_format(&args.common)?,
        args.common.out.as_deref(),
    )
}
