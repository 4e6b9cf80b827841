//! The two pair-distillation protocols, each in two independent forms.
//!
//! * Purification ([`epp_recurrence`], [`epp_round_simulated`]) distills a
//!   Bell-diagonal mixture of hyperentangled pairs by sacrificing one pair
//!   per round in cross-pair parity checks.
//! * Concentration ([`ecp_success_probability`], [`ecp_round_simulated`])
//!   converts partially entangled pure pairs into maximal ones, recursing
//!   on the residual of every failed round.
//!
//! The analytic forms are closed recurrences; the simulated forms push
//! explicit four-photon states through the [`crate::qnd`] detectors and
//! enumerate every measurement branch, so each route independently checks
//! the other. [`sample_protocol`] adds a seeded Monte Carlo front end over
//! the exact branch distributions.

mod ecp;
mod epp;
mod sample;

pub use ecp::{
    ecp_dof_step, ecp_expand_node, ecp_round_formulas, ecp_round_simulated,
    ecp_success_probability, EcpClassOutcome, EcpDofState, EcpNode, EcpRoundFormulas, EcpStep,
    EcpSuccess, NodeExpansion,
};
pub use epp::{
    epp_component_round, epp_iterate, epp_recurrence, epp_round_simulated, ComponentRound,
    EppEnsemble, EppRoundResult, EppTrajectoryPoint,
};
pub use sample::{sample_protocol, ProtocolRun, RoundSample, SampleReport};

/// Branches below this probability are numerically extinct: live branches
/// of the enumerated protocols carry at least 1/256, dead ones only
/// rounding residue (~1e-30).
pub(crate) const BRANCH_EPS: f64 = 1e-9;
