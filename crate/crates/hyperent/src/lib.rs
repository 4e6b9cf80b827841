//! Exact simulation and closed-form analytics for photon pairs entangled in
//! two degrees of freedom at once (polarization and spatial mode).
//!
//! The crate is organised in five layers:
//!
//! * [`hilbert`] — a dense state-vector register over labelled qubits
//!   (photonic polarization, photonic spatial mode, electron spin), with
//!   exhaustive Born-rule measurement branching.
//! * [`optics`] — Bell and hyper-Bell state constructors, single-photon
//!   wave plates and mode flips, and fidelity-based state identification.
//! * [`cavity`] — the input-output reflection coefficient of a one-sided
//!   optical cavity coupled to a single electron spin, and the closed-form
//!   detector fidelities derived from it.
//! * [`qnd`] — parity-check detectors built from cavity reflections: a
//!   polarization parity check and a spatial-mode parity check, both
//!   nondemolition on the photons, plus the spin readout they rely on.
//! * [`protocols`] — the two entanglement-distillation protocols the parity
//!   checks enable: recurrence purification of bit-flip errors in both
//!   degrees of freedom, and concentration of partially entangled pairs,
//!   each available both as closed-form recurrences and as exhaustive
//!   circuit-level enumeration, with optional Monte Carlo sampling.
//!
//! All angular frequencies and rates are expressed in units of 2π×GHz.
//! Exact algebraic identities are verified to [`TOL_ALGEBRAIC`]; quantities
//! chained through many floating-point operations to [`TOL_CHAINED`].

pub mod cavity;
pub mod error;
pub mod hilbert;
pub mod optics;
pub mod protocols;
pub mod qnd;

pub use error::{Error, Result};

/// Tolerance for exact algebraic identities (norms, orthogonality, parities).
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Tolerance for quantities accumulated across long operation chains.
pub const TOL_CHAINED: f64 = 1e-9;
