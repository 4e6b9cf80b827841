//! Seeded Monte Carlo front end over the exact branch distributions.
//!
//! Sampling never approximates the physics: outcome probabilities come
//! from the same exact enumerations as the analytic routes, and the
//! generator is an explicitly seeded stream cipher, so a report is a pure
//! function of (run, shots, seed).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optics::{BellLabel, HyperBellLabel};

use super::ecp::{ecp_dof_step, EcpDofState};
use super::epp::{epp_component_round, epp_round_simulated, ComponentRound, EppEnsemble};

/// A protocol to sample: purification of an ensemble or concentration of
/// a partially entangled pair, each over a number of rounds.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolRun {
    Epp {
        ensemble: EppEnsemble,
        rounds: usize,
    },
    Ecp {
        alpha: f64,
        gamma: f64,
        rounds: usize,
    },
}

/// Empirical statistics of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSample {
    pub round: usize,
    pub successes: u64,
    pub trials: u64,
    /// Purification: fraction of pair-pairs surviving this round's
    /// comparisons. Concentration: fraction of trajectories whose first
    /// success lands exactly here.
    pub success_rate: f64,
    /// Binomial standard error of the rate.
    pub std_err: f64,
    /// Purification only: polarization fidelity of the kept samples.
    pub f1: Option<f64>,
    /// Purification only: spatial fidelity of the kept samples.
    pub f2: Option<f64>,
}

/// Full report of a sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub shots: u64,
    pub seed: u64,
    pub rounds: Vec<RoundSample>,
    /// Purification: product of the per-round survival rates.
    /// Concentration: fraction succeeding within the round budget.
    pub cumulative: f64,
    pub cumulative_std_err: f64,
}

fn binomial_std_err(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Draws `shots` outcome sequences from the exact branch distributions of
/// a protocol, using one dedicated generator seeded from `seed`. Identical
/// arguments produce identical reports.
pub fn sample_protocol(run: &ProtocolRun, shots: u64, seed: u64) -> Result<SampleReport> {
    if shots == 0 {
        return Err(Error::Domain("sampling needs at least one shot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match run {
        ProtocolRun::Epp { ensemble, rounds } => {
            sample_epp(ensemble, *rounds, shots, seed, &mut rng)
        }
        ProtocolRun::Ecp {
            alpha,
            gamma,
            rounds,
        } => sample_ecp(*alpha, *gamma, *rounds, shots, seed, &mut rng),
    }
}

fn draw_component(ensemble: &EppEnsemble, rng: &mut ChaCha8Rng) -> HyperBellLabel {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = None;
    for (label, w) in ensemble.iter() {
        acc += w;
        last = Some(label);
        if u < acc {
            return label;
        }
    }
    last.expect("a valid ensemble has at least one component")
}

fn draw_output(outputs: &BTreeMap<HyperBellLabel, f64>, rng: &mut ChaCha8Rng) -> HyperBellLabel {
    let total: f64 = outputs.values().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (label, w) in outputs {
        acc += w;
        last = Some(*label);
        if u < acc {
            return *label;
        }
    }
    last.expect("kept branches always have at least one output")
}

fn sample_epp(
    initial: &EppEnsemble,
    rounds: usize,
    shots: u64,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SampleReport> {
    // Exact surviving ensembles: round k samples pairs drawn from the
    // exact distribution of round k-1 survivors.
    let mut sources = vec![initial.clone()];
    for _ in 1..rounds {
        let next = epp_round_simulated(sources.last().expect("nonempty"))?;
        sources.push(next.kept_ensemble);
    }
    let mut cache: BTreeMap<(HyperBellLabel, HyperBellLabel), ComponentRound> = BTreeMap::new();
    let mut round_samples = Vec::with_capacity(rounds);
    let mut cumulative = 1.0;
    let mut rel_var = 0.0;
    for (index, source) in sources.iter().take(rounds).enumerate() {
        let mut successes = 0u64;
        let mut pol_hits = 0u64;
        let mut spat_hits = 0u64;
        for _ in 0..shots {
            let ab = draw_component(source, rng);
            let cd = draw_component(source, rng);
            if let Entry::Vacant(slot) = cache.entry((ab, cd)) {
                slot.insert(epp_component_round(ab, cd)?);
            }
            let component = &cache[&(ab, cd)];
            if rng.gen::<f64>() < component.kept_probability {
                successes += 1;
                let label = draw_output(&component.outputs, rng);
                if label.pol == BellLabel::PHI_PLUS {
                    pol_hits += 1;
                }
                if label.spat == BellLabel::PHI_PLUS {
                    spat_hits += 1;
                }
            }
        }
        let rate = successes as f64 / shots as f64;
        let std_err = binomial_std_err(rate, shots);
        round_samples.push(RoundSample {
            round: index + 1,
            successes,
            trials: shots,
            success_rate: rate,
            std_err,
            f1: (successes > 0).then(|| pol_hits as f64 / successes as f64),
            f2: (successes > 0).then(|| spat_hits as f64 / successes as f64),
        });
        cumulative *= rate;
        if rate > 0.0 {
            rel_var += (std_err / rate).powi(2);
        }
    }
    let cumulative_std_err = if cumulative > 0.0 {
        cumulative * rel_var.sqrt()
    } else {
        0.0
    };
    Ok(SampleReport {
        shots,
        seed,
        rounds: round_samples,
        cumulative,
        cumulative_std_err,
    })
}

fn sample_ecp(
    alpha: f64,
    gamma: f64,
    rounds: usize,
    shots: u64,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SampleReport> {
    let pol_start = EcpDofState::residual(alpha, (1.0 - alpha * alpha).sqrt())?;
    let spat_start = EcpDofState::residual(gamma, (1.0 - gamma * gamma).sqrt())?;
    let mut first_success = vec![0u64; rounds];
    for _ in 0..shots {
        let mut pol = pol_start;
        let mut spat = spat_start;
        for slot in first_success.iter_mut() {
            let [pol_odd, pol_even] = ecp_dof_step(&pol);
            let [spat_odd, spat_even] = ecp_dof_step(&spat);
            let pol_is_odd = rng.gen::<f64>() < pol_odd.probability;
            let spat_is_odd = rng.gen::<f64>() < spat_odd.probability;
            let pol_pass = matches!(pol, EcpDofState::Maximal) || pol_is_odd;
            let spat_pass = matches!(spat, EcpDofState::Maximal) || spat_is_odd;
            pol = if pol_is_odd {
                pol_odd.next
            } else {
                pol_even.next
            };
            spat = if spat_is_odd {
                spat_odd.next
            } else {
                spat_even.next
            };
            if pol_pass && spat_pass {
                *slot += 1;
                break;
            }
        }
    }
    let mut round_samples = Vec::with_capacity(rounds);
    let mut total = 0u64;
    for (index, &count) in first_success.iter().enumerate() {
        let rate = count as f64 / shots as f64;
        round_samples.push(RoundSample {
            round: index + 1,
            successes: count,
            trials: shots,
            success_rate: rate,
            std_err: binomial_std_err(rate, shots),
            f1: None,
            f2: None,
        });
        total += count;
    }
    let cumulative = total as f64 / shots as f64;
    Ok(SampleReport {
        shots,
        seed,
        rounds: round_samples,
        cumulative,
        cumulative_std_err: binomial_std_err(cumulative, shots),
    })
}
