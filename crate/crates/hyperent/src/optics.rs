//! Bell states, hyper-Bell states, and the linear-optical elements that act
//! on them.
//!
//! A photon pair carries one Bell state per degree of freedom. In the
//! polarization basis the four Bell states are
//! `phi+- = (|RR> +- |LL>)/sqrt(2)` and `psi+- = (|RL> +- |LR>)/sqrt(2)`;
//! the spatial-mode quartet is identical with `R, L` replaced by the two
//! paths. A [`HyperBellLabel`] names one Bell state in each degree of
//! freedom, giving the sixteen hyperentangled basis states of a pair.
//!
//! The gates in this module act on a single photon and a single degree of
//! freedom: half-wave-plate Hadamards, bit flips, and phase flips, each
//! available for polarization and for spatial modes (where beam splitters
//! and path swaps play the same roles).

use crate::error::Result;
use crate::hilbert::{fidelity, PhotonId, PureState, QubitLabel};
use num_complex::Complex64;
use std::fmt;

/// Parity of a Bell state: even (`phi`-type) or odd (`psi`-type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Relative phase of a Bell state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellPhase {
    Plus,
    Minus,
}

/// One of the four Bell states of a single degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BellLabel {
    pub parity: Parity,
    pub phase: BellPhase,
}

impl BellLabel {
    pub const PHI_PLUS: BellLabel = BellLabel {
        parity: Parity::Even,
        phase: BellPhase::Plus,
    };
    pub const PHI_MINUS: BellLabel = BellLabel {
        parity: Parity::Even,
        phase: BellPhase::Minus,
    };
    pub const PSI_PLUS: BellLabel = BellLabel {
        parity: Parity::Odd,
        phase: BellPhase::Plus,
    };
    pub const PSI_MINUS: BellLabel = BellLabel {
        parity: Parity::Odd,
        phase: BellPhase::Minus,
    };

    /// The four labels in a fixed canonical order.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PHI_PLUS,
        BellLabel::PHI_MINUS,
        BellLabel::PSI_PLUS,
        BellLabel::PSI_MINUS,
    ];
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parity = match self.parity {
            Parity::Even => "phi",
            Parity::Odd => "psi",
        };
        let phase = match self.phase {
            BellPhase::Plus => "+",
            BellPhase::Minus => "-",
        };
        write!(f, "{parity}{phase}")
    }
}

/// The two photonic degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dof {
    Polarization,
    Spatial,
}

impl Dof {
    fn label(self, photon: PhotonId) -> QubitLabel {
        match self {
            Dof::Polarization => QubitLabel::polarization(photon),
            Dof::Spatial => QubitLabel::spatial(photon),
        }
    }
}

/// A Bell label for each degree of freedom of one photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperBellLabel {
    pub pol: BellLabel,
    pub spat: BellLabel,
}

impl HyperBellLabel {
    pub fn new(pol: BellLabel, spat: BellLabel) -> Self {
        HyperBellLabel { pol, spat }
    }

    /// All sixteen hyper-Bell labels in canonical order.
    pub fn all() -> impl Iterator<Item = HyperBellLabel> {
        BellLabel::ALL.into_iter().flat_map(|pol| {
            BellLabel::ALL
                .into_iter()
                .map(move |spat| HyperBellLabel { pol, spat })
        })
    }
}

impl fmt::Display for HyperBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.pol, self.spat)
    }
}

/// The Bell state of `label` over one degree of freedom of the pair
/// `(x, y)`, on the two-qubit register `[x.dof, y.dof]`.
pub fn bell_state(pair: (PhotonId, PhotonId), dof: Dof, label: BellLabel) -> Result<PureState> {
    let register = [dof.label(pair.0), dof.label(pair.1)];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sign = match label.phase {
        BellPhase::Plus => h,
        BellPhase::Minus => -h,
    };
    let (first, second) = match label.parity {
        Parity::Even => ([0, 0], [1, 1]),
        Parity::Odd => ([0, 1], [1, 0]),
    };
    let a = PureState::basis_ket(&register, &first)?;
    let b = PureState::basis_ket(&register, &second)?;
    PureState::superpose(&[(h, &a), (sign, &b)])
}

/// The hyperentangled state of one pair, on the four-qubit register
/// `[x.pol, y.pol, x.spatial, y.spatial]`.
pub fn hyper_bell_state(pair: (PhotonId, PhotonId), label: HyperBellLabel) -> Result<PureState> {
    let pol = bell_state(pair, Dof::Polarization, label.pol)?;
    let spat = bell_state(pair, Dof::Spatial, label.spat)?;
    pol.tensor(&spat)
}

fn hadamard_matrix() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn sigma_x_matrix() -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [[zero, one], [one, zero]]
}

fn sigma_z_matrix() -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [[one, zero], [zero, -one]]
}

/// Half-wave-plate Hadamard on the polarization of one photon.
pub fn hadamard_pol(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::polarization(photon), &hadamard_matrix())
}

/// 50:50 beam-splitter Hadamard on the spatial mode of one photon.
pub fn hadamard_spatial(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::spatial(photon), &hadamard_matrix())
}

/// Polarization bit flip `|R> <-> |L>` on one photon.
pub fn sigma_x_pol(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::polarization(photon), &sigma_x_matrix())
}

/// Polarization phase flip `|R> -> |R>, |L> -> -|L>` on one photon.
pub fn sigma_z_pol(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::polarization(photon), &sigma_z_matrix())
}

/// Path exchange on the spatial mode of one photon.
pub fn sigma_x_spatial(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::spatial(photon), &sigma_x_matrix())
}

/// Path-dependent phase flip on the spatial mode of one photon.
pub fn sigma_z_spatial(state: &PureState, photon: PhotonId) -> Result<PureState> {
    state.apply_local_unitary(QubitLabel::spatial(photon), &sigma_z_matrix())
}

/// Hadamards on both degrees of freedom of one photon. Applied to both
/// photons of a pair this exchanges phase information with bit information,
/// turning relative-sign errors into flip errors that parity checks see:
/// per degree of freedom, `phi+ -> phi+`, `phi- -> psi+`, `psi+ -> phi-`,
/// and `psi-` is invariant up to a global sign.
pub fn phase_to_bit_frame(state: &PureState, photon: PhotonId) -> Result<PureState> {
    hadamard_spatial(&hadamard_pol(state, photon)?, photon)
}

/// Identifies a two-qubit state as a Bell state of the given pair and
/// degree of freedom, if its fidelity with one of the four is within
/// `tol` of unity.
pub fn identify_bell(
    state: &PureState,
    pair: (PhotonId, PhotonId),
    dof: Dof,
    tol: f64,
) -> Result<Option<BellLabel>> {
    let register = [dof.label(pair.0), dof.label(pair.1)];
    let aligned = state.permuted(&register)?;
    for label in BellLabel::ALL {
        let reference = bell_state(pair, dof, label)?;
        if (fidelity(&aligned, &reference)? - 1.0).abs() <= tol {
            return Ok(Some(label));
        }
    }
    Ok(None)
}

/// Identifies a four-qubit state as a hyper-Bell state of the given pair,
/// if its fidelity with one of the sixteen is within `tol` of unity.
pub fn identify_hyper_bell(
    state: &PureState,
    pair: (PhotonId, PhotonId),
    tol: f64,
) -> Result<Option<HyperBellLabel>> {
    let register = [
        QubitLabel::polarization(pair.0),
        QubitLabel::polarization(pair.1),
        QubitLabel::spatial(pair.0),
        QubitLabel::spatial(pair.1),
    ];
    let aligned = state.permuted(&register)?;
    for label in HyperBellLabel::all() {
        let reference = hyper_bell_state(pair, label)?;
        if (fidelity(&aligned, &reference)? - 1.0).abs() <= tol {
            return Ok(Some(label));
        }
    }
    Ok(None)
}
