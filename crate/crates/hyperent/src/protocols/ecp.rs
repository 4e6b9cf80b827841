//! Concentration of partially hyperentangled pure pairs.
//!
//! Each degree of freedom of a pair carries either a maximal Bell state or
//! a residual `a|00> + b|11>` with known real amplitudes. A round takes
//! two identical pairs, compares polarization parity across Alice's
//! photons and spatial parity across Bob's, and succeeds when every
//! still-residual degree of freedom lands in the odd-parity group, whose
//! cross-pair state is maximally entangled. Even-parity groups are not
//! wasted: measuring out the second pair leaves the first in a residual
//! state with squared amplitudes, and the round repeats on fresh copies of
//! that narrower state.
//!
//! The per-degree-of-freedom Markov step is [`ecp_dof_step`]; the round
//! tree built from it yields success probabilities in closed form, while
//! [`ecp_round_simulated`] reproduces one round at the detector level.

use crate::error::{Error, Result};
use crate::hilbert::fidelity;
use crate::hilbert::{basis, PhotonId, PureState, QubitLabel};
use crate::optics::{hadamard_pol, hadamard_spatial, Parity};
use crate::qnd::{p_qnd, s_qnd, QndMode};
use crate::{TOL_ALGEBRAIC, TOL_CHAINED};
use num_complex::Complex64;

use super::epp::detect_and_correct;
use super::BRANCH_EPS;

const A: PhotonId = PhotonId::A;
const B: PhotonId = PhotonId::B;
const C: PhotonId = PhotonId::C;
const D: PhotonId = PhotonId::D;

/// What one degree of freedom of a pair currently holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EcpDofState {
    /// The maximal Bell state; nothing left to concentrate.
    Maximal,
    /// `a|00> + b|11>` with real positive amplitudes.
    Residual { a: f64, b: f64 },
}

impl EcpDofState {
    /// A validated residual state: both amplitudes in (0, 1), normalized.
    pub fn residual(a: f64, b: f64) -> Result<Self> {
        for x in [a, b] {
            if !x.is_finite() || x <= 0.0 || x >= 1.0 {
                return Err(Error::Domain(format!(
                    "residual amplitude {x} outside (0, 1)"
                )));
            }
        }
        if (a * a + b * b - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::Domain(format!(
                "residual amplitudes are unnormalized: {a}^2 + {b}^2 != 1"
            )));
        }
        Ok(EcpDofState::Residual { a, b })
    }
}

/// One branch of a parity comparison in a single degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcpStep {
    pub parity: Parity,
    pub probability: f64,
    pub next: EcpDofState,
}

/// The two parity branches of one round for one degree of freedom, odd
/// first. A residual state lands odd with probability `2 a^2 b^2` and is
/// then maximal; landing even squares its amplitudes. A maximal state
/// splits evenly and stays maximal either way.
pub fn ecp_dof_step(state: &EcpDofState) -> [EcpStep; 2] {
    match *state {
        EcpDofState::Maximal => {
            let half = |parity| EcpStep {
                parity,
                probability: 0.5,
                next: EcpDofState::Maximal,
            };
            [half(Parity::Odd), half(Parity::Even)]
        }
        EcpDofState::Residual { a, b } => {
            let even = a.powi(4) + b.powi(4);
            let norm = even.sqrt();
            [
                EcpStep {
                    parity: Parity::Odd,
                    probability: 2.0 * a * a * b * b,
                    next: EcpDofState::Maximal,
                },
                EcpStep {
                    parity: Parity::Even,
                    probability: even,
                    next: EcpDofState::Residual {
                        a: a * a / norm,
                        b: b * b / norm,
                    },
                },
            ]
        }
    }
}

/// One node of the round tree: the per-DOF states of the surviving pair
/// and the probability of having reached them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcpNode {
    pub pol: EcpDofState,
    pub spat: EcpDofState,
    pub reach_prob: f64,
}

/// One round applied to a tree node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeExpansion {
    /// Mass that terminates successfully at this round: both degrees of
    /// freedom pass, a residual one only via the odd parity, a maximal one
    /// via either.
    pub success_probability: f64,
    /// Surviving failure nodes, identical states merged.
    pub children: Vec<EcpNode>,
}

/// Expands one node by a round of parity comparisons in both degrees of
/// freedom.
pub fn ecp_expand_node(node: &EcpNode) -> NodeExpansion {
    let mut success_probability = 0.0;
    let mut children: Vec<EcpNode> = Vec::new();
    for pol_step in ecp_dof_step(&node.pol) {
        for spat_step in ecp_dof_step(&node.spat) {
            let reach = node.reach_prob * pol_step.probability * spat_step.probability;
            let pol_pass =
                matches!(node.pol, EcpDofState::Maximal) || pol_step.parity == Parity::Odd;
            let spat_pass =
                matches!(node.spat, EcpDofState::Maximal) || spat_step.parity == Parity::Odd;
            if pol_pass && spat_pass {
                success_probability += reach;
                continue;
            }
            let child = EcpNode {
                pol: pol_step.next,
                spat: spat_step.next,
                reach_prob: reach,
            };
            if let Some(existing) = children
                .iter_mut()
                .find(|c| c.pol == child.pol && c.spat == child.spat)
            {
                existing.reach_prob += reach;
            } else {
                children.push(child);
            }
        }
    }
    NodeExpansion {
        success_probability,
        children,
    }
}

/// Success probabilities of the concentration recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct EcpSuccess {
    /// Probability of first success at round 1, 2, ..., n.
    pub per_round: Vec<f64>,
    /// Their sum: the probability of success within n rounds.
    pub total: f64,
}

/// Expands the round tree from a fresh pair with polarization amplitudes
/// `(alpha, sqrt(1 - alpha^2))` and spatial amplitudes
/// `(gamma, sqrt(1 - gamma^2))` for `rounds` rounds.
pub fn ecp_success_probability(alpha: f64, gamma: f64, rounds: usize) -> Result<EcpSuccess> {
    let beta = (1.0 - alpha * alpha).sqrt();
    let delta = (1.0 - gamma * gamma).sqrt();
    let root = EcpNode {
        pol: EcpDofState::residual(alpha, beta)?,
        spat: EcpDofState::residual(gamma, delta)?,
        reach_prob: 1.0,
    };
    let mut frontier = vec![root];
    let mut per_round = Vec::with_capacity(rounds);
    let mut total = 0.0;
    for _ in 0..rounds {
        let mut round_mass = 0.0;
        let mut next: Vec<EcpNode> = Vec::new();
        for node in &frontier {
            let expansion = ecp_expand_node(node);
            round_mass += expansion.success_probability;
            for child in expansion.children {
                if let Some(existing) = next
                    .iter_mut()
                    .find(|c| c.pol == child.pol && c.spat == child.spat)
                {
                    existing.reach_prob += child.reach_prob;
                } else {
                    next.push(child);
                }
            }
        }
        per_round.push(round_mass);
        total += round_mass;
        frontier = next;
    }
    Ok(EcpSuccess { per_round, total })
}

/// The closed-form branch probabilities of the first two rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcpRoundFormulas {
    /// Round-1 success: both parities odd.
    pub p1: f64,
    /// Round-1 failure with both parities even.
    pub p1_even_even: f64,
    /// Polarization odd (now maximal), spatial even (still residual).
    pub p1_mixed_pol: f64,
    /// Spatial odd, polarization even.
    pub p1_mixed_spat: f64,
    /// Round-2 success out of the even-even branch.
    pub p2_1: f64,
    /// Round-2 success out of the polarization-maximal branch.
    pub p2_2: f64,
    /// Round-2 success out of the spatial-maximal branch.
    pub p2_3: f64,
}

fn check_amplitude_pair(a: f64, b: f64) -> Result<()> {
    for x in [a, b] {
        if !x.is_finite() || x <= 0.0 || x >= 1.0 {
            return Err(Error::Domain(format!("amplitude {x} outside (0, 1)")));
        }
    }
    if (a * a + b * b - 1.0).abs() > TOL_ALGEBRAIC {
        return Err(Error::Domain(format!(
            "amplitude pair ({a}, {b}) is unnormalized"
        )));
    }
    Ok(())
}

/// Evaluates the first- and second-round branch probabilities in closed
/// form for polarization amplitudes `(alpha, beta)` and spatial amplitudes
/// `(gamma, delta)`.
pub fn ecp_round_formulas(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<EcpRoundFormulas> {
    check_amplitude_pair(alpha, beta)?;
    check_amplitude_pair(gamma, delta)?;
    let ab = alpha * alpha * beta * beta;
    let gd = gamma * gamma * delta * delta;
    let pol_even = alpha.powi(4) + beta.powi(4);
    let spat_even = gamma.powi(4) + delta.powi(4);
    Ok(EcpRoundFormulas {
        p1: 4.0 * ab * gd,
        p1_even_even: pol_even * spat_even,
        p1_mixed_pol: 2.0 * ab * spat_even,
        p1_mixed_spat: 2.0 * gd * pol_even,
        p2_1: 4.0 * ab * ab * gd * gd / (pol_even * spat_even),
        p2_2: 4.0 * gd * gd * ab / spat_even,
        p2_3: 4.0 * ab * ab * gd / pol_even,
    })
}

/// One parity class of a detector-level concentration round.
#[derive(Debug, Clone)]
pub struct EcpClassOutcome {
    pub pol_parity: Parity,
    pub spat_parity: Parity,
    pub probability: f64,
    /// The AB pair after C and D are rotated, detected, and compensated;
    /// maximal for a passed degree of freedom, amplitude-squared residual
    /// for a failed one.
    pub residual: PureState,
}

fn partial_pair(
    pair: (PhotonId, PhotonId),
    pol: (f64, f64),
    spat: (f64, f64),
) -> Result<PureState> {
    let pol_reg = [
        QubitLabel::polarization(pair.0),
        QubitLabel::polarization(pair.1),
    ];
    let spat_reg = [QubitLabel::spatial(pair.0), QubitLabel::spatial(pair.1)];
    let rr = PureState::basis_ket(&pol_reg, &[basis::R, basis::R])?;
    let ll = PureState::basis_ket(&pol_reg, &[basis::L, basis::L])?;
    let pol_state = PureState::superpose(&[
        (Complex64::new(pol.0, 0.0), &rr),
        (Complex64::new(pol.1, 0.0), &ll),
    ])?;
    let p11 = PureState::basis_ket(&spat_reg, &[basis::PATH_1, basis::PATH_1])?;
    let p22 = PureState::basis_ket(&spat_reg, &[basis::PATH_2, basis::PATH_2])?;
    let spat_state = PureState::superpose(&[
        (Complex64::new(spat.0, 0.0), &p11),
        (Complex64::new(spat.1, 0.0), &p22),
    ])?;
    pol_state.tensor(&spat_state)
}

/// One concentration round at the detector level: two identical partially
/// entangled pairs, polarization parity compared across (A, C), spatial
/// parity across (B, D), then C and D rotated to the diagonal basis,
/// detected, and compensated by phase flips on B. Returns the four parity
/// classes with their probabilities and residual AB states; every
/// detection branch of a class must agree on the residual.
pub fn ecp_round_simulated(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<Vec<EcpClassOutcome>> {
    check_amplitude_pair(alpha, beta)?;
    check_amplitude_pair(gamma, delta)?;
    let full = partial_pair((A, B), (alpha, beta), (gamma, delta))?.tensor(&partial_pair(
        (C, D),
        (alpha, beta),
        (gamma, delta),
    )?)?;
    let mut classes = Vec::with_capacity(4);
    for pol in p_qnd(&full, (A, C), &QndMode::Ideal)? {
        if pol.probability < BRANCH_EPS {
            continue;
        }
        for spat in s_qnd(&pol.post_state, (B, D), &QndMode::Ideal)? {
            if spat.probability < BRANCH_EPS {
                continue;
            }
            let mut st = spat.post_state.clone();
            for photon in [C, D] {
                st = hadamard_spatial(&hadamard_pol(&st, photon)?, photon)?;
            }
            let branches = detect_and_correct(&st)?;
            let (_, residual) = branches.first().ok_or_else(|| {
                Error::Domain("a parity class lost all detection branches".into())
            })?;
            let mut detection_mass = 0.0;
            for (weight, state) in &branches {
                detection_mass += weight;
                if (fidelity(state, residual)? - 1.0).abs() > TOL_CHAINED {
                    return Err(Error::Domain(
                        "detection branches of one parity class disagree".into(),
                    ));
                }
            }
            if (detection_mass - 1.0).abs() > TOL_CHAINED {
                return Err(Error::Domain(
                    "detection branches of one parity class lost probability".into(),
                ));
            }
            classes.push(EcpClassOutcome {
                pol_parity: pol.parity,
                spat_parity: spat.parity,
                probability: pol.probability * spat.probability,
                residual: residual.clone(),
            });
        }
    }
    Ok(classes)
}
