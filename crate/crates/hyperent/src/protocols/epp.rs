//! Purification of Bell-diagonal hyperentangled mixtures.
//!
//! One round consumes two pairs, AB and CD, drawn independently from the
//! same ensemble. Parity checks compare AC against BD in each degree of
//! freedom; the pairs are kept only when both comparisons agree. The kept
//! CD pair is then rotated to the diagonal basis and detected, and its
//! outcome steers a phase correction on B, leaving AB as the distilled
//! pair. Components whose error pattern differs between AB and CD can
//! never pass both comparisons, which is what boosts the dominant-state
//! weight from `f` to `f^2 / (f^2 + (1-f)^2)` per degree of freedom.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{PhotonId, PureState, QubitLabel};
use crate::optics::{
    hadamard_pol, hadamard_spatial, hyper_bell_state, identify_hyper_bell, sigma_x_pol,
    sigma_x_spatial, sigma_z_pol, sigma_z_spatial, BellLabel, Dof, HyperBellLabel,
};
use crate::qnd::{p_qnd, s_qnd, QndMode};
use crate::{TOL_ALGEBRAIC, TOL_CHAINED};

use super::BRANCH_EPS;

const A: PhotonId = PhotonId::A;
const B: PhotonId = PhotonId::B;
const C: PhotonId = PhotonId::C;
const D: PhotonId = PhotonId::D;

/// A classical mixture over the sixteen hyperentangled Bell states of one
/// photon pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EppEnsemble {
    weights: BTreeMap<HyperBellLabel, f64>,
}

impl EppEnsemble {
    /// A mixture from explicit nonnegative weights summing to one.
    pub fn new(weights: BTreeMap<HyperBellLabel, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (label, w) in &weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::Domain(format!(
                    "weight {w} of component {label} is not a probability"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::Domain(format!(
                "ensemble weights sum to {total}, not 1"
            )));
        }
        Ok(EppEnsemble { weights })
    }

    /// The mixture in which each degree of freedom independently carries
    /// the even state with its fidelity weight and the odd (bit-flipped)
    /// state otherwise: `phi+` with `f1` against `psi+` in polarization,
    /// and likewise `f2` in the spatial modes.
    pub fn bit_flip_mixture(f1: f64, f2: f64) -> Result<Self> {
        for f in [f1, f2] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Domain(format!("fidelity {f} outside [0, 1]")));
            }
        }
        let mut weights = BTreeMap::new();
        for (pol, wp) in [(BellLabel::PHI_PLUS, f1), (BellLabel::PSI_PLUS, 1.0 - f1)] {
            for (spat, ws) in [(BellLabel::PHI_PLUS, f2), (BellLabel::PSI_PLUS, 1.0 - f2)] {
                let w = wp * ws;
                if w > 0.0 {
                    weights.insert(HyperBellLabel::new(pol, spat), w);
                }
            }
        }
        EppEnsemble::new(weights)
    }

    pub fn weight(&self, label: HyperBellLabel) -> f64 {
        self.weights.get(&label).copied().unwrap_or(0.0)
    }

    /// Components in canonical label order.
    pub fn iter(&self) -> impl Iterator<Item = (HyperBellLabel, f64)> + '_ {
        self.weights.iter().map(|(l, w)| (*l, *w))
    }

    /// Marginal weight of the even `phi+` state in one degree of freedom.
    pub fn fidelity_in(&self, dof: Dof) -> f64 {
        self.weights
            .iter()
            .filter(|(l, _)| {
                let part = match dof {
                    Dof::Polarization => l.pol,
                    Dof::Spatial => l.spat,
                };
                part == BellLabel::PHI_PLUS
            })
            .map(|(_, w)| w)
            .sum()
    }
}

/// One purification round in closed form: the updated per-DOF fidelities
/// and the probability that a pair of pairs survives the parity
/// comparison.
pub fn epp_recurrence(f1: f64, f2: f64) -> Result<(f64, f64, f64)> {
    for f in [f1, f2] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain(format!("fidelity {f} outside [0, 1]")));
        }
    }
    let pass1 = f1 * f1 + (1.0 - f1) * (1.0 - f1);
    let pass2 = f2 * f2 + (1.0 - f2) * (1.0 - f2);
    Ok((f1 * f1 / pass1, f2 * f2 / pass2, pass1 * pass2))
}

/// One point of a purification trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EppTrajectoryPoint {
    pub round: usize,
    pub f1: f64,
    pub f2: f64,
    /// Weight of the fully even hyperentangled state, `f1 * f2`.
    pub hyper_fidelity: f64,
    /// Probability that one pair has survived every round so far.
    pub cumulative_yield: f64,
}

/// Iterates the closed-form recurrence, returning the initial point
/// followed by one point per round.
pub fn epp_iterate(f1: f64, f2: f64, rounds: usize) -> Result<Vec<EppTrajectoryPoint>> {
    let (mut f1, mut f2) = (f1, f2);
    let mut cumulative_yield = 1.0;
    let mut trajectory = vec![EppTrajectoryPoint {
        round: 0,
        f1,
        f2,
        hyper_fidelity: f1 * f2,
        cumulative_yield,
    }];
    for round in 1..=rounds {
        let (next1, next2, yield_prob) = epp_recurrence(f1, f2)?;
        f1 = next1;
        f2 = next2;
        cumulative_yield *= yield_prob;
        trajectory.push(EppTrajectoryPoint {
            round,
            f1,
            f2,
            hyper_fidelity: f1 * f2,
            cumulative_yield,
        });
    }
    Ok(trajectory)
}

/// Outcome of pushing one ordered component pair (AB-state, CD-state)
/// through a full purification round.
#[derive(Debug, Clone)]
pub struct ComponentRound {
    /// Probability that the parity comparisons agree in both DOFs.
    pub kept_probability: f64,
    /// Probability mass discarded by disagreeing comparisons.
    pub discarded_probability: f64,
    /// Distilled AB components with their weights; sums to the kept
    /// probability.
    pub outputs: BTreeMap<HyperBellLabel, f64>,
}

/// Runs the full detector-level circuit for one ordered pair of pure
/// hyper-Bell components: parity checks on AC and BD in both degrees of
/// freedom, the keep/discard comparison, the corrective bit flips for odd
/// parities, and the diagonal-basis detection of C and D with its phase
/// correction on B.
pub fn epp_component_round(ab: HyperBellLabel, cd: HyperBellLabel) -> Result<ComponentRound> {
    let state = hyper_bell_state((A, B), ab)?.tensor(&hyper_bell_state((C, D), cd)?)?;
    let mut kept = 0.0;
    let mut discarded = 0.0;
    let mut outputs: BTreeMap<HyperBellLabel, f64> = BTreeMap::new();

    for pol_ac in p_qnd(&state, (A, C), &QndMode::Ideal)? {
        if pol_ac.probability < BRANCH_EPS {
            continue;
        }
        for pol_bd in p_qnd(&pol_ac.post_state, (B, D), &QndMode::Ideal)? {
            if pol_bd.probability < BRANCH_EPS {
                continue;
            }
            for spat_ac in s_qnd(&pol_bd.post_state, (A, C), &QndMode::Ideal)? {
                if spat_ac.probability < BRANCH_EPS {
                    continue;
                }
                for spat_bd in s_qnd(&spat_ac.post_state, (B, D), &QndMode::Ideal)? {
                    if spat_bd.probability < BRANCH_EPS {
                        continue;
                    }
                    let joint = pol_ac.probability
                        * pol_bd.probability
                        * spat_ac.probability
                        * spat_bd.probability;
                    if pol_ac.parity != pol_bd.parity || spat_ac.parity != spat_bd.parity {
                        discarded += joint;
                        continue;
                    }
                    kept += joint;
                    let mut st = spat_bd.post_state.clone();
                    if pol_ac.parity == crate::optics::Parity::Odd {
                        st = sigma_x_pol(&sigma_x_pol(&st, C)?, D)?;
                    }
                    if spat_ac.parity == crate::optics::Parity::Odd {
                        st = sigma_x_spatial(&sigma_x_spatial(&st, C)?, D)?;
                    }
                    for photon in [C, D] {
                        st = hadamard_spatial(&hadamard_pol(&st, photon)?, photon)?;
                    }
                    for branch in detect_and_correct(&st)? {
                        let (weight, distilled) = branch;
                        let label = identify_hyper_bell(&distilled, (A, B), TOL_CHAINED)?
                            .ok_or_else(|| {
                                Error::Domain(
                                    "a kept purification branch left AB outside the \
                                     hyper-Bell family"
                                        .into(),
                                )
                            })?;
                        *outputs.entry(label).or_insert(0.0) += joint * weight;
                    }
                }
            }
        }
    }
    Ok(ComponentRound {
        kept_probability: kept,
        discarded_probability: discarded,
        outputs,
    })
}

/// Measures all four detector qubits of C and D, applies the conditional
/// phase flips on B, and returns the live branches as (weight, AB state).
pub(crate) fn detect_and_correct(state: &PureState) -> Result<Vec<(f64, PureState)>> {
    let identity = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let labels = [
        QubitLabel::polarization(C),
        QubitLabel::polarization(D),
        QubitLabel::spatial(C),
        QubitLabel::spatial(D),
    ];
    let mut live = Vec::new();
    for branch in state.measure(&labels, &[identity; 4])? {
        if branch.probability < BRANCH_EPS {
            continue;
        }
        let bits: Vec<u8> = branch.outcome.iter().map(|(_, b)| *b).collect();
        let mut ab = branch.post_state;
        if bits[0] != bits[1] {
            ab = sigma_z_pol(&ab, B)?;
        }
        if bits[2] != bits[3] {
            ab = sigma_z_spatial(&ab, B)?;
        }
        live.push((branch.probability, ab));
    }
    Ok(live)
}

/// Result of one purification round on a whole ensemble.
#[derive(Debug, Clone)]
pub struct EppRoundResult {
    pub kept_ensemble: EppEnsemble,
    /// Probability that a pair of pairs survives the comparisons.
    pub yield_prob: f64,
    /// Complementary discarded mass; with the yield it sums to one.
    pub discarded_prob: f64,
    pub f1_prime: f64,
    pub f2_prime: f64,
}

/// One purification round by exhaustive branch enumeration: every ordered
/// pair of input components is pushed through [`epp_component_round`] with
/// its product weight.
pub fn epp_round_simulated(ensemble: &EppEnsemble) -> Result<EppRoundResult> {
    let mut yield_prob = 0.0;
    let mut discarded_prob = 0.0;
    let mut kept: BTreeMap<HyperBellLabel, f64> = BTreeMap::new();
    for (ab, w_ab) in ensemble.iter() {
        for (cd, w_cd) in ensemble.iter() {
            let weight = w_ab * w_cd;
            if weight == 0.0 {
                continue;
            }
            let round = epp_component_round(ab, cd)?;
            yield_prob += weight * round.kept_probability;
            discarded_prob += weight * round.discarded_probability;
            for (label, w) in round.outputs {
                *kept.entry(label).or_insert(0.0) += weight * w;
            }
        }
    }
    for w in kept.values_mut() {
        *w /= yield_prob;
    }
    let kept_ensemble = EppEnsemble::new(kept)?;
    let f1_prime = kept_ensemble.fidelity_in(Dof::Polarization);
    let f2_prime = kept_ensemble.fidelity_in(Dof::Spatial);
    Ok(EppRoundResult {
        kept_ensemble,
        yield_prob,
        discarded_prob,
        f1_prime,
        f2_prime,
    })
}
