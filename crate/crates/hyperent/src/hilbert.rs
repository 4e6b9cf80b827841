//! Dense state vectors over small registers of labelled qubits.
//!
//! Every qubit carries a [`QubitLabel`] naming its owner (a photon or an
//! electron spin) and the degree of freedom it encodes. A [`PureState`]
//! stores one complex amplitude per computational basis state of its
//! register; the first label in the register is the most significant bit
//! of the basis index.
//!
//! Basis index conventions, fixed once for the whole crate:
//!
//! * polarization: 0 = right circular `R`, 1 = left circular `L`;
//! * spatial mode: 0 = path 1, 1 = path 2;
//! * electron spin: 0 = `|-1>`, 1 = `|+1>`, so that
//!   `|+-> = (|-1> +- |+1>)/sqrt(2)` are the spin superposition states.
//!
//! Registers are capped at 14 qubits (16384 amplitudes), comfortably above
//! the 9 qubits the protocols in this crate ever hold at once.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// Largest register a dense state vector may hold.
pub const MAX_QUBITS: usize = 14;

/// Basis index constants for the three qubit kinds.
pub mod basis {
    /// Right-circular polarization.
    pub const R: u8 = 0;
    /// Left-circular polarization.
    pub const L: u8 = 1;
    /// First spatial mode of a photon.
    pub const PATH_1: u8 = 0;
    /// Second spatial mode of a photon.
    pub const PATH_2: u8 = 1;
    /// Electron spin eigenstate `|-1>`.
    pub const SPIN_MINUS_ONE: u8 = 0;
    /// Electron spin eigenstate `|+1>`.
    pub const SPIN_PLUS_ONE: u8 = 1;
}

/// The photons that appear across the protocols: two nonlocal pairs
/// `(A, B)` and `(C, D)`, the fresh-copy pair `(A', B')`, and the
/// auxiliary readout photon `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhotonId {
    A,
    B,
    C,
    D,
    APrime,
    BPrime,
    /// Auxiliary photon used to read out an electron spin.
    Aux,
}

impl fmt::Display for PhotonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhotonId::A => "A",
            PhotonId::B => "B",
            PhotonId::C => "C",
            PhotonId::D => "D",
            PhotonId::APrime => "A'",
            PhotonId::BPrime => "B'",
            PhotonId::Aux => "p",
        };
        write!(f, "{s}")
    }
}

/// The two electron spins hosted by the parity-check detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NvId {
    E1,
    E2,
}

impl fmt::Display for NvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NvId::E1 => write!(f, "e1"),
            NvId::E2 => write!(f, "e2"),
        }
    }
}

/// Who physically carries a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    Photon(PhotonId),
    Nv(NvId),
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Photon(p) => write!(f, "{p}"),
            Owner::Nv(e) => write!(f, "{e}"),
        }
    }
}

/// The degree of freedom a qubit encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QubitKind {
    Polarization,
    Spatial,
    Spin,
}

impl fmt::Display for QubitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QubitKind::Polarization => "pol",
            QubitKind::Spatial => "spatial",
            QubitKind::Spin => "spin",
        };
        write!(f, "{s}")
    }
}

/// A qubit identity: owner plus degree of freedom.
///
/// The constructors enforce that photons carry polarization or spatial-mode
/// qubits and electron spins carry spin qubits, so mismatched combinations
/// are unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitLabel {
    owner: Owner,
    kind: QubitKind,
}

impl QubitLabel {
    /// Polarization qubit of a photon.
    pub fn polarization(photon: PhotonId) -> Self {
        QubitLabel {
            owner: Owner::Photon(photon),
            kind: QubitKind::Polarization,
        }
    }

    /// Spatial-mode qubit of a photon.
    pub fn spatial(photon: PhotonId) -> Self {
        QubitLabel {
            owner: Owner::Photon(photon),
            kind: QubitKind::Spatial,
        }
    }

    /// Spin qubit of an electron.
    pub fn spin(nv: NvId) -> Self {
        QubitLabel {
            owner: Owner::Nv(nv),
            kind: QubitKind::Spin,
        }
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn kind(&self) -> QubitKind {
        self.kind
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.kind)
    }
}

/// One branch of an exhaustive projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    /// Measured labels with their basis outcome indices, in request order.
    pub outcome: Vec<(QubitLabel, u8)>,
    /// Born-rule probability of this branch.
    pub probability: f64,
    /// State of the unmeasured qubits, renormalized when the probability is
    /// nonzero; a zero vector on impossible branches.
    pub post_state: PureState,
}

/// A dense, not necessarily normalized state vector over a labelled register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Vec<QubitLabel>,
    amps: Vec<Complex64>,
}

fn check_register(register: &[QubitLabel]) -> Result<()> {
    if register.len() > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(register.len()));
    }
    for (i, a) in register.iter().enumerate() {
        if register[i + 1..].contains(a) {
            return Err(Error::DuplicateLabel(*a));
        }
    }
    Ok(())
}

fn check_unitary(u: &[[Complex64; 2]; 2]) -> Result<()> {
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if (dot - target).norm() > crate::TOL_ALGEBRAIC {
                return Err(Error::NonUnitary);
            }
        }
    }
    Ok(())
}

impl PureState {
    /// Builds a state from a register and a full amplitude vector.
    pub fn new(register: Vec<QubitLabel>, amps: Vec<Complex64>) -> Result<Self> {
        check_register(&register)?;
        let dim = 1usize << register.len();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                qubits: register.len(),
                got: amps.len(),
            });
        }
        Ok(PureState { register, amps })
    }

    /// The computational basis state selected by one index per label.
    pub fn basis_ket(register: &[QubitLabel], indices: &[u8]) -> Result<Self> {
        check_register(register)?;
        if indices.len() != register.len() {
            return Err(Error::DimensionMismatch {
                qubits: register.len(),
                got: indices.len(),
            });
        }
        let mut idx = 0usize;
        for &b in indices {
            if b > 1 {
                return Err(Error::IndexOutOfRange { index: b as usize });
            }
            idx = (idx << 1) | b as usize;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << register.len()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            register: register.to_vec(),
            amps,
        })
    }

    /// Linear combination of states sharing one register. The result is not
    /// normalized automatically; see [`PureState::normalized`].
    pub fn superpose(terms: &[(Complex64, &PureState)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::RegisterMismatch("superpose needs at least one term".into()))?;
        let register = first.register.clone();
        let mut amps = vec![Complex64::new(0.0, 0.0); first.amps.len()];
        for (coeff, state) in terms {
            if state.register != register {
                return Err(Error::RegisterMismatch(
                    "superpose terms must share one register".into(),
                ));
            }
            for (acc, a) in amps.iter_mut().zip(&state.amps) {
                *acc += coeff * a;
            }
        }
        Ok(PureState { register, amps })
    }

    pub fn register(&self) -> &[QubitLabel] {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    /// Position of a label in the register, if present.
    pub fn position_of(&self, label: QubitLabel) -> Option<usize> {
        self.register.iter().position(|l| *l == label)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// The same ray with unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        let scale = 1.0 / n.sqrt();
        let mut out = self.clone();
        for a in &mut out.amps {
            *a *= scale;
        }
        Ok(out)
    }

    /// Tensor product with a state over disjoint labels; `self` supplies the
    /// more significant bits.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut register = self.register.clone();
        register.extend_from_slice(&other.register);
        check_register(&register)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { register, amps })
    }

    fn shift_of(&self, position: usize) -> usize {
        self.register.len() - 1 - position
    }

    /// Applies a single-qubit unitary to the named qubit.
    pub fn apply_local_unitary(&self, label: QubitLabel, u: &[[Complex64; 2]; 2]) -> Result<Self> {
        check_unitary(u)?;
        let pos = self.position_of(label).ok_or(Error::MissingLabel(label))?;
        let shift = self.shift_of(pos);
        let mask = 1usize << shift;
        let mut amps = self.amps.clone();
        for idx in 0..amps.len() {
            if idx & mask == 0 {
                let a0 = amps[idx];
                let a1 = amps[idx | mask];
                amps[idx] = u[0][0] * a0 + u[0][1] * a1;
                amps[idx | mask] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(PureState {
            register: self.register.clone(),
            amps,
        })
    }

    /// Multiplies each amplitude by `factor(joint)` where `joint` is the
    /// basis index over `labels` (first listed label most significant).
    /// Returns the mapped state together with its squared norm, which is
    /// below one exactly when the map is lossy.
    pub fn apply_diagonal_map<F>(&self, labels: &[QubitLabel], factor: F) -> Result<(Self, f64)>
    where
        F: Fn(usize) -> Complex64,
    {
        let mut shifts = Vec::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if labels[i + 1..].contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
            let pos = self.position_of(*l).ok_or(Error::MissingLabel(*l))?;
            shifts.push(self.shift_of(pos));
        }
        let mut amps = self.amps.clone();
        let mut norm_sqr = 0.0;
        for (idx, a) in amps.iter_mut().enumerate() {
            let mut joint = 0usize;
            for &s in &shifts {
                joint = (joint << 1) | ((idx >> s) & 1);
            }
            *a *= factor(joint);
            norm_sqr += a.norm_sqr();
        }
        Ok((
            PureState {
                register: self.register.clone(),
                amps,
            },
            norm_sqr,
        ))
    }

    /// Projective measurement of `labels`, each in its own orthonormal basis
    /// given as a 2x2 unitary whose columns are the basis vectors.
    ///
    /// Returns all `2^k` branches in ascending joint-outcome order; the
    /// measured labels are removed from every post state.
    pub fn measure(
        &self,
        labels: &[QubitLabel],
        bases: &[[[Complex64; 2]; 2]],
    ) -> Result<Vec<MeasurementBranch>> {
        if labels.len() != bases.len() {
            return Err(Error::DimensionMismatch {
                qubits: labels.len(),
                got: bases.len(),
            });
        }
        if !self.is_normalized(crate::TOL_ALGEBRAIC) {
            return Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr(),
            });
        }
        // Rotate each measured qubit into its measurement basis; outcome k
        // then corresponds to computational index k of the rotated state.
        let mut rotated = self.clone();
        for (label, b) in labels.iter().zip(bases) {
            check_unitary(b)?;
            let dagger = [
                [b[0][0].conj(), b[1][0].conj()],
                [b[0][1].conj(), b[1][1].conj()],
            ];
            rotated = rotated.apply_local_unitary(*label, &dagger)?;
        }
        let measured_shifts: Vec<usize> = labels
            .iter()
            .map(|l| rotated.shift_of(rotated.position_of(*l).expect("label checked above")))
            .collect();
        let kept: Vec<QubitLabel> = rotated
            .register
            .iter()
            .copied()
            .filter(|l| !labels.contains(l))
            .collect();
        let kept_shifts: Vec<usize> = kept
            .iter()
            .map(|l| rotated.shift_of(rotated.position_of(*l).expect("kept label present")))
            .collect();

        let k = labels.len();
        let mut branches = Vec::with_capacity(1 << k);
        for joint in 0..1usize << k {
            let mut post = vec![Complex64::new(0.0, 0.0); 1 << kept.len()];
            let mut probability = 0.0;
            for (idx, a) in rotated.amps.iter().enumerate() {
                let mut matches = true;
                for (b, &s) in measured_shifts.iter().enumerate() {
                    if (idx >> s) & 1 != (joint >> (k - 1 - b)) & 1 {
                        matches = false;
                        break;
                    }
                }
                if !matches {
                    continue;
                }
                let mut sub = 0usize;
                for &s in &kept_shifts {
                    sub = (sub << 1) | ((idx >> s) & 1);
                }
                post[sub] += a;
                probability += a.norm_sqr();
            }
            if probability > 0.0 {
                let scale = 1.0 / probability.sqrt();
                for a in &mut post {
                    *a *= scale;
                }
            }
            let outcome = labels
                .iter()
                .enumerate()
                .map(|(b, l)| (*l, ((joint >> (k - 1 - b)) & 1) as u8))
                .collect();
            branches.push(MeasurementBranch {
                outcome,
                probability,
                post_state: PureState {
                    register: kept.clone(),
                    amps: post,
                },
            });
        }
        Ok(branches)
    }

    /// The same state with its register reordered to `new_register`.
    pub fn permuted(&self, new_register: &[QubitLabel]) -> Result<Self> {
        if new_register.len() != self.register.len() {
            return Err(Error::RegisterMismatch(
                "permutation must keep the register size".into(),
            ));
        }
        let mut positions = Vec::with_capacity(new_register.len());
        for l in new_register {
            positions.push(self.position_of(*l).ok_or(Error::MissingLabel(*l))?);
        }
        check_register(new_register)?;
        let n = self.register.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for &pos in &positions {
                new_idx = (new_idx << 1) | ((idx >> (n - 1 - pos)) & 1);
            }
            amps[new_idx] = *a;
        }
        Ok(PureState {
            register: new_register.to_vec(),
            amps,
        })
    }
}

/// Inner product `<a|b>` of two states over identical registers.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.register != b.register {
        return Err(Error::RegisterMismatch(
            "inner product needs identical registers".into(),
        ));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Squared overlap `|<a|b>|^2`; insensitive to global phases.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL_ALGEBRAIC;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
    }

    fn identity() -> [[Complex64; 2]; 2] {
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
    }

    fn a_pol() -> QubitLabel {
        QubitLabel::polarization(PhotonId::A)
    }

    fn b_pol() -> QubitLabel {
        QubitLabel::polarization(PhotonId::B)
    }

    #[test]
    fn basis_ket_places_unit_amplitude() {
        let state = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        assert_eq!(state.amplitudes().len(), 2);
        assert_eq!(state.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(state.amplitudes()[1], c(0.0, 0.0));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = PureState::basis_ket(&[a_pol(), a_pol()], &[0, 0]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(_)));
    }

    #[test]
    fn out_of_range_basis_index_rejected() {
        let err = PureState::basis_ket(&[a_pol()], &[2]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn register_size_cap_enforced() {
        let labels: Vec<QubitLabel> = vec![
            QubitLabel::polarization(PhotonId::A),
            QubitLabel::spatial(PhotonId::A),
            QubitLabel::polarization(PhotonId::B),
            QubitLabel::spatial(PhotonId::B),
            QubitLabel::polarization(PhotonId::C),
            QubitLabel::spatial(PhotonId::C),
            QubitLabel::polarization(PhotonId::D),
            QubitLabel::spatial(PhotonId::D),
            QubitLabel::polarization(PhotonId::APrime),
            QubitLabel::spatial(PhotonId::APrime),
            QubitLabel::polarization(PhotonId::BPrime),
            QubitLabel::spatial(PhotonId::BPrime),
            QubitLabel::polarization(PhotonId::Aux),
            QubitLabel::spatial(PhotonId::Aux),
            QubitLabel::spin(NvId::E1),
        ];
        assert_eq!(labels.len(), 15);
        let err = PureState::basis_ket(&labels, &[0; 15]).unwrap_err();
        assert!(matches!(err, Error::RegisterTooLarge(15)));
    }

    #[test]
    fn superpose_requires_shared_register() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let rb = PureState::basis_ket(&[b_pol()], &[basis::R]).unwrap();
        let err = PureState::superpose(&[(c(1.0, 0.0), &ra), (c(1.0, 0.0), &rb)]).unwrap_err();
        assert!(matches!(err, Error::RegisterMismatch(_)));
    }

    #[test]
    fn superpose_is_not_auto_normalized() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let la = PureState::basis_ket(&[a_pol()], &[basis::L]).unwrap();
        let s = PureState::superpose(&[(c(1.0, 0.0), &ra), (c(1.0, 0.0), &la)]).unwrap();
        assert!((s.norm_sqr() - 2.0).abs() < TOL_ALGEBRAIC);
        let n = s.normalized().unwrap();
        assert!(n.is_normalized(TOL_ALGEBRAIC));
    }

    #[test]
    fn hadamard_on_r_gives_equal_superposition() {
        let state = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let out = state.apply_local_unitary(a_pol(), &hadamard()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - c(h, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!((out.amplitudes()[1] - c(h, 0.0)).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let state = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let bad = [[c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            state.apply_local_unitary(a_pol(), &bad),
            Err(Error::NonUnitary)
        ));
    }

    #[test]
    fn missing_label_reported() {
        let state = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        assert!(matches!(
            state.apply_local_unitary(b_pol(), &hadamard()),
            Err(Error::MissingLabel(_))
        ));
    }

    #[test]
    fn diagonal_map_flips_phase_of_selected_component() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let la = PureState::basis_ket(&[a_pol()], &[basis::L]).unwrap();
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = PureState::superpose(&[(h, &ra), (h, &la)]).unwrap();
        let (out, norm_sqr) = s
            .apply_diagonal_map(
                &[a_pol()],
                |j| if j == 1 { c(-1.0, 0.0) } else { c(1.0, 0.0) },
            )
            .unwrap();
        assert!((norm_sqr - 1.0).abs() < TOL_ALGEBRAIC);
        assert!((out.amplitudes()[1] + h).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn lossy_diagonal_map_reports_shrunken_norm() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let la = PureState::basis_ket(&[a_pol()], &[basis::L]).unwrap();
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = PureState::superpose(&[(h, &ra), (h, &la)]).unwrap();
        let (_, norm_sqr) = s
            .apply_diagonal_map(
                &[a_pol()],
                |j| if j == 1 { c(0.5, 0.0) } else { c(1.0, 0.0) },
            )
            .unwrap();
        assert!((norm_sqr - 0.625).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn measuring_basis_state_is_deterministic() {
        let state = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let branches = state.measure(&[a_pol()], &[identity()]).unwrap();
        assert_eq!(branches.len(), 2);
        let live: Vec<_> = branches.iter().filter(|b| b.probability > 0.0).collect();
        assert_eq!(live.len(), 1);
        assert_eq!(live[0].outcome, vec![(a_pol(), basis::R)]);
        assert!((live[0].probability - 1.0).abs() < TOL_ALGEBRAIC);
        assert!(live[0].post_state.register().is_empty());
    }

    #[test]
    fn measuring_half_a_bell_pair_collapses_the_other_half() {
        let rr = PureState::basis_ket(&[a_pol(), b_pol()], &[basis::R, basis::R]).unwrap();
        let ll = PureState::basis_ket(&[a_pol(), b_pol()], &[basis::L, basis::L]).unwrap();
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = PureState::superpose(&[(h, &rr), (h, &ll)]).unwrap();
        let branches = bell.measure(&[a_pol()], &[identity()]).unwrap();
        assert_eq!(branches.len(), 2);
        for branch in &branches {
            assert!((branch.probability - 0.5).abs() < TOL_ALGEBRAIC);
            let expect = PureState::basis_ket(&[b_pol()], &[branch.outcome[0].1]).unwrap();
            assert!((fidelity(&branch.post_state, &expect).unwrap() - 1.0).abs() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn measurement_requires_normalized_input() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let s = PureState::superpose(&[(c(2.0, 0.0), &ra)]).unwrap();
        assert!(matches!(
            s.measure(&[a_pol()], &[identity()]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn fidelity_requires_identical_registers() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let rb = PureState::basis_ket(&[b_pol()], &[basis::R]).unwrap();
        assert!(matches!(
            fidelity(&ra, &rb),
            Err(Error::RegisterMismatch(_))
        ));
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let minus = PureState::superpose(&[(c(-1.0, 0.0), &ra)]).unwrap();
        assert!((fidelity(&ra, &minus).unwrap() - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn permuted_register_reorders_amplitudes() {
        let rl = PureState::basis_ket(&[a_pol(), b_pol()], &[basis::R, basis::L]).unwrap();
        let swapped = rl.permuted(&[b_pol(), a_pol()]).unwrap();
        let expect = PureState::basis_ket(&[b_pol(), a_pol()], &[basis::L, basis::R]).unwrap();
        assert!((fidelity(&swapped, &expect).unwrap() - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn tensor_concatenates_registers_msb_first() {
        let ra = PureState::basis_ket(&[a_pol()], &[basis::R]).unwrap();
        let lb = PureState::basis_ket(&[b_pol()], &[basis::L]).unwrap();
        let joint = ra.tensor(&lb).unwrap();
        assert_eq!(joint.register(), &[a_pol(), b_pol()]);
        assert_eq!(joint.amplitudes()[0b01], c(1.0, 0.0));
    }

    fn arb_unitary() -> impl Strategy<Value = [[Complex64; 2]; 2]> {
        (
            0.0..std::f64::consts::PI,
            0.0..std::f64::consts::TAU,
            0.0..std::f64::consts::TAU,
        )
            .prop_map(|(theta, phi, lam)| {
                let (s, co) = theta.sin_cos();
                [
                    [c(co, 0.0), -Complex64::from_polar(s, lam)],
                    [
                        Complex64::from_polar(s, phi),
                        Complex64::from_polar(co, phi + lam),
                    ],
                ]
            })
    }

    fn arb_two_qubit_state() -> impl Strategy<Value = PureState> {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4).prop_filter_map(
            "state must have nonzero norm",
            |parts| {
                let amps: Vec<Complex64> = parts.iter().map(|(re, im)| c(*re, *im)).collect();
                let state = PureState::new(vec![a_pol(), b_pol()], amps).unwrap();
                state.normalized().ok()
            },
        )
    }

    proptest! {
        #[test]
        fn local_unitaries_preserve_norm(state in arb_two_qubit_state(), u in arb_unitary()) {
            let out = state.apply_local_unitary(a_pol(), &u).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn diagonal_maps_compose_by_pointwise_product(state in arb_two_qubit_state()) {
            let f = |j: usize| if j == 1 { c(0.25, 0.5) } else { c(1.0, 0.0) };
            let g = |j: usize| if j == 0 { c(0.0, -1.0) } else { c(1.0, 0.0) };
            let (fg, _) = state
                .apply_diagonal_map(&[a_pol()], |j| f(j) * g(j))
                .unwrap();
            let (step, _) = state.apply_diagonal_map(&[a_pol()], f).unwrap();
            let (two, _) = step.apply_diagonal_map(&[a_pol()], g).unwrap();
            for (x, y) in fg.amplitudes().iter().zip(two.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn measurement_branches_cover_all_probability(
            state in arb_two_qubit_state(),
            u in arb_unitary(),
        ) {
            let branches = state.measure(&[a_pol(), b_pol()], &[u, hadamard()]).unwrap();
            prop_assert_eq!(branches.len(), 4);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for b in &branches {
                if b.probability > 1e-12 {
                    prop_assert!(b.post_state.is_normalized(1e-9));
                }
            }
        }

        #[test]
        fn basis_ket_round_trips_through_measurement(bits in proptest::collection::vec(0u8..2, 2)) {
            let state = PureState::basis_ket(&[a_pol(), b_pol()], &bits).unwrap();
            let branches = state.measure(&[a_pol(), b_pol()], &[identity(), identity()]).unwrap();
            let live: Vec<_> = branches.iter().filter(|b| b.probability > 0.5).collect();
            prop_assert_eq!(live.len(), 1);
            let outcome: Vec<u8> = live[0].outcome.iter().map(|(_, b)| *b).collect();
            prop_assert_eq!(outcome, bits);
        }
    }
}
