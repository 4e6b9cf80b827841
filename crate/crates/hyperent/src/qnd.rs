//! Quantum nondemolition parity checks on photon pairs, built from cavity
//! reflections off a single electron spin.
//!
//! Both detectors follow the same template. A fresh ancilla spin is
//! prepared in `|+> = (|-1> + |+1>)/sqrt(2)`, each photon of the pair
//! bounces off the cavity once, and the spin is then measured in the
//! `|+->` basis. A photon component routed into the cavity picks up the
//! reflection amplitude of [`crate::cavity::lossy_reflection_rule`]; the
//! component routed around it is untouched.
//!
//! * The polarization check sends only the `R` component of each photon to
//!   the cavity. Two photons with even polarization parity flip the spin
//!   twice or not at all, odd parity flips it once: the spin outcome `|+>`
//!   announces even, `|->` announces odd.
//! * The spatial check sends whatever occupies path 2 to the cavity and
//!   follows it with a polarization phase flip, which cancels the
//!   polarization dependence of the reflection. The spin bookkeeping is
//!   then identical with path parity in place of polarization parity.
//!
//! Neither check reveals anything except the parity, and neither consumes
//! the photons; in the lossless limit every Bell state passes through
//! unchanged. With realistic reflection amplitudes the checks stay
//! passive but imprint `r`, `r0` on the interacting components;
//! [`qnd_process_fidelity`] quantifies the resulting error per heralded
//! branch.

use crate::cavity::{lossy_reflection_rule, ReflectionPair};
use crate::error::{Error, Result};
use crate::hilbert::{basis, fidelity, NvId, Owner, PhotonId, PureState, QubitKind, QubitLabel};
use crate::optics::Parity;
use num_complex::Complex64;

/// Which parity a detector checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QndKind {
    Polarization,
    Spatial,
}

/// Detector model: lossless phases, or reflection amplitudes from a
/// concrete cavity operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QndMode {
    Ideal,
    Lossy(ReflectionPair),
}

impl QndMode {
    fn pair(&self) -> ReflectionPair {
        match self {
            QndMode::Ideal => ReflectionPair::ideal(),
            QndMode::Lossy(pair) => *pair,
        }
    }
}

/// The spin-basis result a parity check records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvOutcome {
    /// Ancilla found in `|+>`; heralds even parity.
    Plus,
    /// Ancilla found in `|->`; heralds odd parity.
    Minus,
}

/// One heralded branch of a parity check.
#[derive(Debug, Clone)]
pub struct ParityOutcome {
    pub parity: Parity,
    pub nv_outcome: NvOutcome,
    /// Probability of this herald. In lossy mode the probabilities are
    /// conditioned on the photons surviving the cavity bounces.
    pub probability: f64,
    /// The photons after the check, ancilla removed; renormalized whenever
    /// the probability is nonzero.
    pub post_state: PureState,
}

/// Result of reading out an electron spin in its energy basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinReadout {
    MinusOne,
    PlusOne,
}

fn plus_spin(nv: NvId) -> PureState {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(vec![QubitLabel::spin(nv)], vec![h, h]).expect("one-qubit state")
}

fn plus_minus_basis() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// One cavity bounce of a photon's `R` component, with its `L` component
/// bypassing the cavity. Also the readout interaction for an auxiliary
/// photon. Returns the mapped state and its squared norm.
fn polarization_unit(
    state: &PureState,
    photon: PhotonId,
    spin: QubitLabel,
    pair: &ReflectionPair,
) -> Result<(PureState, f64)> {
    let pair = *pair;
    state.apply_diagonal_map(&[QubitLabel::polarization(photon), spin], move |joint| {
        let pol = ((joint >> 1) & 1) as u8;
        let s = (joint & 1) as u8;
        if pol == basis::R {
            lossy_reflection_rule(&pair, pol, s)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// One cavity bounce of whatever occupies a photon's path 2, followed by
/// the polarization phase flip that makes the lossless limit independent
/// of polarization.
fn spatial_unit(
    state: &PureState,
    photon: PhotonId,
    spin: QubitLabel,
    mode: &QndMode,
) -> Result<(PureState, f64)> {
    match mode {
        QndMode::Ideal => state.apply_diagonal_map(&[QubitLabel::spatial(photon), spin], |joint| {
            let path = (joint >> 1) & 1;
            let s = joint & 1;
            if path == 1 && s == 1 {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        }),
        QndMode::Lossy(pair) => {
            let pair = *pair;
            state.apply_diagonal_map(
                &[
                    QubitLabel::polarization(photon),
                    QubitLabel::spatial(photon),
                    spin,
                ],
                move |joint| {
                    let pol = ((joint >> 2) & 1) as u8;
                    let path = (joint >> 1) & 1;
                    let s = (joint & 1) as u8;
                    if path == 0 {
                        return Complex64::new(1.0, 0.0);
                    }
                    let sign = if pol == basis::L { -1.0 } else { 1.0 };
                    sign * lossy_reflection_rule(&pair, pol, s)
                },
            )
        }
    }
}

fn require_label(state: &PureState, label: QubitLabel) -> Result<()> {
    if state.position_of(label).is_none() {
        return Err(Error::MissingLabel(label));
    }
    Ok(())
}

fn run_qnd(
    state: &PureState,
    pair: (PhotonId, PhotonId),
    mode: &QndMode,
    kind: QndKind,
) -> Result<Vec<ParityOutcome>> {
    if pair.0 == pair.1 {
        return Err(Error::Domain(
            "a parity check needs two distinct photons".into(),
        ));
    }
    for photon in [pair.0, pair.1] {
        match kind {
            QndKind::Polarization => require_label(state, QubitLabel::polarization(photon))?,
            QndKind::Spatial => {
                require_label(state, QubitLabel::spatial(photon))?;
                if matches!(mode, QndMode::Lossy(_)) {
                    require_label(state, QubitLabel::polarization(photon))?;
                }
            }
        }
    }
    let nv = match kind {
        QndKind::Polarization => NvId::E1,
        QndKind::Spatial => NvId::E2,
    };
    let spin = QubitLabel::spin(nv);
    let mut work = state.tensor(&plus_spin(nv))?;
    let mut norm_sqr = 1.0;
    for photon in [pair.0, pair.1] {
        let (next, n) = match kind {
            QndKind::Polarization => polarization_unit(&work, photon, spin, &mode.pair())?,
            QndKind::Spatial => spatial_unit(&work, photon, spin, mode)?,
        };
        work = next;
        norm_sqr = n;
    }
    if matches!(mode, QndMode::Lossy(_)) {
        if norm_sqr < 1e-300 {
            return Err(Error::Domain(
                "photons are fully absorbed at this operating point".into(),
            ));
        }
        work = work.normalized()?;
    }
    let branches = work.measure(&[spin], &[plus_minus_basis()])?;
    Ok(branches
        .into_iter()
        .map(|b| {
            let (parity, nv_outcome) = if b.outcome[0].1 == 0 {
                (Parity::Even, NvOutcome::Plus)
            } else {
                (Parity::Odd, NvOutcome::Minus)
            };
            ParityOutcome {
                parity,
                nv_outcome,
                probability: b.probability,
                post_state: b.post_state,
            }
        })
        .collect())
}

/// Polarization parity check on two photons. Returns the even and odd
/// heralds with their probabilities and post states.
pub fn p_qnd(
    state: &PureState,
    pair: (PhotonId, PhotonId),
    mode: &QndMode,
) -> Result<Vec<ParityOutcome>> {
    run_qnd(state, pair, mode, QndKind::Polarization)
}

/// Spatial-mode parity check on two photons.
pub fn s_qnd(
    state: &PureState,
    pair: (PhotonId, PhotonId),
    mode: &QndMode,
) -> Result<Vec<ParityOutcome>> {
    run_qnd(state, pair, mode, QndKind::Spatial)
}

/// Reads out a single spin in its `{|-1>, |+1>}` basis by bouncing an
/// auxiliary photon prepared in `(|R> + |L>)/sqrt(2)` off the cavity and
/// detecting it in the linear basis. A `+` detection heralds `|-1>`, a `-`
/// detection heralds `|+1>`. Any spin rotation (such as the Hadamard that
/// maps `|+->` onto the energy basis) must precede this call.
pub fn nv_readout(spin_state: &PureState) -> Result<Vec<(SpinReadout, f64)>> {
    let ok = spin_state.register().len() == 1 && spin_state.register()[0].kind() == QubitKind::Spin;
    if !ok {
        return Err(Error::RegisterMismatch(
            "readout takes a state over exactly one spin qubit".into(),
        ));
    }
    let spin = spin_state.register()[0];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let photon = PureState::new(vec![QubitLabel::polarization(PhotonId::Aux)], vec![h, h])
        .expect("one-qubit state");
    let work = spin_state.tensor(&photon)?;
    let (bounced, _) = polarization_unit(&work, PhotonId::Aux, spin, &ReflectionPair::ideal())?;
    let branches = bounced.measure(
        &[QubitLabel::polarization(PhotonId::Aux)],
        &[plus_minus_basis()],
    )?;
    Ok(branches
        .into_iter()
        .map(|b| {
            let readout = if b.outcome[0].1 == 0 {
                SpinReadout::MinusOne
            } else {
                SpinReadout::PlusOne
            };
            (readout, b.probability)
        })
        .collect())
}

/// Branch-averaged fidelity of a lossy parity check against its lossless
/// counterpart, for a normalized photonic input whose two photons are the
/// first two distinct ones in its register.
///
/// The lossy check is run with branch probabilities conditioned on photon
/// survival; each heralded post state is compared with the lossless post
/// state for the same herald, or with the input itself when the lossless
/// check can never produce that herald (the nondemolition reference), and
/// the fidelities are averaged with the branch probabilities as weights.
pub fn qnd_process_fidelity(
    kind: QndKind,
    pair: &ReflectionPair,
    input: &PureState,
) -> Result<f64> {
    let mut photons = Vec::new();
    for label in input.register() {
        if let Owner::Photon(p) = label.owner() {
            if !photons.contains(&p) {
                photons.push(p);
            }
        }
    }
    if photons.len() != 2 {
        return Err(Error::RegisterMismatch(format!(
            "process fidelity needs a two-photon input, found {} photons",
            photons.len()
        )));
    }
    if !input.is_normalized(crate::TOL_ALGEBRAIC) {
        return Err(Error::NotNormalized {
            norm_sqr: input.norm_sqr(),
        });
    }
    let photon_pair = (photons[0], photons[1]);
    let lossy = run_qnd(input, photon_pair, &QndMode::Lossy(*pair), kind)?;
    let ideal = run_qnd(input, photon_pair, &QndMode::Ideal, kind)?;
    let mut total = 0.0;
    for branch in &lossy {
        if branch.probability == 0.0 {
            continue;
        }
        let reference = ideal
            .iter()
            .find(|b| b.parity == branch.parity)
            .filter(|b| b.probability > crate::TOL_ALGEBRAIC)
            .map(|b| &b.post_state)
            .unwrap_or(input);
        total += branch.probability * fidelity(&branch.post_state, reference)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{fidelity_closed_form_p, fidelity_closed_form_s};
    use crate::hilbert::inner_product;
    use crate::optics::{bell_state, hyper_bell_state, BellLabel, Dof, HyperBellLabel};
    use crate::TOL_ALGEBRAIC;

    const AB: (PhotonId, PhotonId) = (PhotonId::A, PhotonId::B);

    fn reference_pair() -> ReflectionPair {
        ReflectionPair::new(
            Complex64::new(773.0 / 833.0, 0.0),
            Complex64::new(-9.0 / 11.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn parity_table_is_deterministic_and_nondemolition() {
        for label in HyperBellLabel::all() {
            let state = hyper_bell_state(AB, label).unwrap();
            for (check, expected) in [
                (QndKind::Polarization, label.pol.parity),
                (QndKind::Spatial, label.spat.parity),
            ] {
                let run = match check {
                    QndKind::Polarization => p_qnd(&state, AB, &QndMode::Ideal).unwrap(),
                    QndKind::Spatial => s_qnd(&state, AB, &QndMode::Ideal).unwrap(),
                };
                assert_eq!(run.len(), 2);
                for outcome in &run {
                    let expect_p = if outcome.parity == expected { 1.0 } else { 0.0 };
                    assert!(
                        (outcome.probability - expect_p).abs() < TOL_ALGEBRAIC,
                        "{label}: {check:?} parity {:?} had probability {}",
                        outcome.parity,
                        outcome.probability
                    );
                    if outcome.probability > 0.5 {
                        let f = fidelity(&outcome.post_state, &state).unwrap();
                        assert!((f - 1.0).abs() < TOL_ALGEBRAIC, "{label} was demolished");
                    }
                }
            }
        }
    }

    #[test]
    fn even_heralds_plus_and_odd_heralds_minus() {
        let even = bell_state(AB, Dof::Polarization, BellLabel::PHI_MINUS).unwrap();
        let odd = bell_state(AB, Dof::Polarization, BellLabel::PSI_PLUS).unwrap();
        for (state, parity, nv) in [
            (&even, Parity::Even, NvOutcome::Plus),
            (&odd, Parity::Odd, NvOutcome::Minus),
        ] {
            let run = p_qnd(state, AB, &QndMode::Ideal).unwrap();
            let live = run.iter().find(|o| o.probability > 0.5).unwrap();
            assert_eq!(live.parity, parity);
            assert_eq!(live.nv_outcome, nv);
        }
    }

    #[test]
    fn polarization_check_leaves_spatial_statistics_alone() {
        let spat_labels = [
            QubitLabel::spatial(PhotonId::A),
            QubitLabel::spatial(PhotonId::B),
        ];
        let identity = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for label in HyperBellLabel::all() {
            let state = hyper_bell_state(AB, label).unwrap();
            let run = p_qnd(&state, AB, &QndMode::Ideal).unwrap();
            let live = run.iter().find(|o| o.probability > 0.5).unwrap();
            let before = state.measure(&spat_labels, &[identity, identity]).unwrap();
            let after = live
                .post_state
                .measure(&spat_labels, &[identity, identity])
                .unwrap();
            for (x, y) in before.iter().zip(&after) {
                assert!((x.probability - y.probability).abs() < TOL_ALGEBRAIC);
            }
        }
    }

    #[test]
    fn lossless_pair_in_lossy_mode_matches_ideal_mode() {
        let phi = hyper_bell_state(
            AB,
            HyperBellLabel::new(BellLabel::PHI_PLUS, BellLabel::PSI_MINUS),
        )
        .unwrap();
        let psi = hyper_bell_state(
            AB,
            HyperBellLabel::new(BellLabel::PSI_PLUS, BellLabel::PSI_MINUS),
        )
        .unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input = PureState::superpose(&[(h, &phi), (h, &psi)]).unwrap();
        let lossless = QndMode::Lossy(ReflectionPair::ideal());
        for (a, b) in p_qnd(&input, AB, &QndMode::Ideal)
            .unwrap()
            .iter()
            .zip(&p_qnd(&input, AB, &lossless).unwrap())
        {
            assert_eq!(a.parity, b.parity);
            assert!((a.probability - b.probability).abs() < TOL_ALGEBRAIC);
            if a.probability > TOL_ALGEBRAIC {
                assert!(
                    (fidelity(&a.post_state, &b.post_state).unwrap() - 1.0).abs() < TOL_ALGEBRAIC
                );
            }
        }
    }

    #[test]
    fn single_occupied_path_flips_the_spin_once_and_spares_polarization() {
        // Photon A in path 2, photon B in path 1; A carries a polarization
        // superposition that the spatial check must not disturb.
        let pol = PureState::new(
            vec![QubitLabel::polarization(PhotonId::A)],
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)],
        )
        .unwrap();
        let paths = PureState::basis_ket(
            &[
                QubitLabel::spatial(PhotonId::A),
                QubitLabel::spatial(PhotonId::B),
            ],
            &[basis::PATH_2, basis::PATH_1],
        )
        .unwrap();
        let input = pol.tensor(&paths).unwrap();
        let run = s_qnd(&input, AB, &QndMode::Ideal).unwrap();
        let live = run.iter().find(|o| o.probability > 0.5).unwrap();
        assert_eq!(live.parity, Parity::Odd);
        assert_eq!(live.nv_outcome, NvOutcome::Minus);
        assert!((live.probability - 1.0).abs() < TOL_ALGEBRAIC);
        assert!((fidelity(&live.post_state, &input).unwrap() - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn lossy_branch_probabilities_follow_the_reflection_amplitudes() {
        let pair = reference_pair();
        let (r, r0) = (pair.r().re, pair.r0().re);
        let input = bell_state(AB, Dof::Polarization, BellLabel::PHI_PLUS).unwrap();
        let run = p_qnd(&input, AB, &QndMode::Lossy(pair)).unwrap();
        // Conditioned on survival, the even herald carries
        // ((r^2 + r0^2)^2 + 4) / (2 (r^4 + r0^4 + 2)).
        let s2 = r * r + r0 * r0;
        let s4 = r.powi(4) + r0.powi(4);
        let expect_even = (s2 * s2 + 4.0) / (2.0 * (s4 + 2.0));
        let even = run.iter().find(|o| o.parity == Parity::Even).unwrap();
        let odd = run.iter().find(|o| o.parity == Parity::Odd).unwrap();
        assert!((even.probability - expect_even).abs() < TOL_ALGEBRAIC);
        assert!((even.probability + odd.probability - 1.0).abs() < TOL_ALGEBRAIC);
    }

    #[test]
    fn readout_heralds_follow_the_spin_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cases: [(Vec<Complex64>, f64); 3] = [
            (
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                1.0,
            ),
            (
                vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                0.0,
            ),
            (vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)], 0.5),
        ];
        for (amps, p_minus_one) in cases {
            let spin = PureState::new(vec![QubitLabel::spin(NvId::E1)], amps).unwrap();
            let run = nv_readout(&spin).unwrap();
            assert_eq!(run.len(), 2);
            assert_eq!(run[0].0, SpinReadout::MinusOne);
            assert_eq!(run[1].0, SpinReadout::PlusOne);
            assert!((run[0].1 - p_minus_one).abs() < TOL_ALGEBRAIC);
            assert!((run[0].1 + run[1].1 - 1.0).abs() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn readout_rejects_non_spin_registers() {
        let photon =
            PureState::basis_ket(&[QubitLabel::polarization(PhotonId::A)], &[basis::R]).unwrap();
        assert!(matches!(
            nv_readout(&photon),
            Err(Error::RegisterMismatch(_))
        ));
    }

    #[test]
    fn checks_reject_missing_labels_and_identical_photons() {
        let state = bell_state(AB, Dof::Polarization, BellLabel::PHI_PLUS).unwrap();
        assert!(matches!(
            s_qnd(&state, AB, &QndMode::Ideal),
            Err(Error::MissingLabel(_))
        ));
        assert!(matches!(
            p_qnd(&state, (PhotonId::A, PhotonId::A), &QndMode::Ideal),
            Err(Error::Domain(_))
        ));
    }

    /// Fidelity between two unnormalized vectors over one register.
    fn ray_fidelity(a: &PureState, b: &PureState) -> f64 {
        let overlap = inner_product(a, b).unwrap().norm_sqr();
        overlap / (a.norm_sqr() * b.norm_sqr())
    }

    /// Runs the two stages of each detector as bare circuits (no herald)
    /// and checks that their fidelity product reproduces the closed forms.
    #[test]
    fn stagewise_circuit_fidelities_reproduce_the_closed_forms() {
        let pairs = [
            reference_pair(),
            ReflectionPair::new(Complex64::new(0.7, 0.0), Complex64::new(-0.3, 0.0)).unwrap(),
            ReflectionPair::new(Complex64::new(0.95, 0.0), Complex64::new(-0.6, 0.0)).unwrap(),
        ];
        let spin = QubitLabel::spin(NvId::E1);
        for pair in pairs {
            let ideal = ReflectionPair::ideal();

            // Polarization parity stage on an even pair, spin included.
            let input = bell_state(AB, Dof::Polarization, BellLabel::PHI_PLUS)
                .unwrap()
                .tensor(&plus_spin(NvId::E1))
                .unwrap();
            let bounce = |state: &PureState, p: &ReflectionPair| {
                let (one, _) = polarization_unit(state, PhotonId::A, spin, p).unwrap();
                let (two, _) = polarization_unit(&one, PhotonId::B, spin, p).unwrap();
                two
            };
            let parity_p = ray_fidelity(&bounce(&input, &pair), &bounce(&input, &ideal));

            // Readout stage: spin superposition probed by the auxiliary photon.
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let probe = plus_spin(NvId::E1)
                .tensor(
                    &PureState::new(vec![QubitLabel::polarization(PhotonId::Aux)], vec![h, h])
                        .unwrap(),
                )
                .unwrap();
            let read =
                |p: &ReflectionPair| polarization_unit(&probe, PhotonId::Aux, spin, p).unwrap().0;
            let readout = ray_fidelity(&read(&pair), &read(&ideal));

            // Spatial parity stage, averaged over the two path components of
            // an even spatial pair riding on an even polarization pair.
            let spat_stage = |paths: [u8; 2], p: &ReflectionPair| {
                let comp = bell_state(AB, Dof::Polarization, BellLabel::PHI_PLUS)
                    .unwrap()
                    .tensor(
                        &PureState::basis_ket(
                            &[
                                QubitLabel::spatial(PhotonId::A),
                                QubitLabel::spatial(PhotonId::B),
                            ],
                            &paths,
                        )
                        .unwrap(),
                    )
                    .unwrap()
                    .tensor(&plus_spin(NvId::E1))
                    .unwrap();
                let mode = QndMode::Lossy(*p);
                let (one, _) = spatial_unit(&comp, PhotonId::A, spin, &mode).unwrap();
                let (two, _) = spatial_unit(&one, PhotonId::B, spin, &mode).unwrap();
                two
            };
            let f_bypass = ray_fidelity(
                &spat_stage([basis::PATH_1, basis::PATH_1], &pair),
                &spat_stage([basis::PATH_1, basis::PATH_1], &ideal),
            );
            let f_bounce = ray_fidelity(
                &spat_stage([basis::PATH_2, basis::PATH_2], &pair),
                &spat_stage([basis::PATH_2, basis::PATH_2], &ideal),
            );
            let parity_s = 0.5 * (f_bypass + f_bounce);

            let (a0, a) = (pair.r0().norm(), pair.r().norm());
            let fp = fidelity_closed_form_p(a0, a).unwrap();
            let fs = fidelity_closed_form_s(a0, a).unwrap();
            assert!(
                (parity_p * readout - fp).abs() < TOL_ALGEBRAIC,
                "polarization stages {} x {} missed {fp}",
                parity_p,
                readout
            );
            assert!(
                (parity_s * readout - fs).abs() < TOL_ALGEBRAIC,
                "spatial stages {} x {} missed {fs}",
                parity_s,
                readout
            );
        }
    }

    #[test]
    fn branch_averaged_process_fidelities_at_the_reference_point() {
        let pair = reference_pair();
        let (r, r0) = (pair.r().re, pair.r0().re);

        let pol_input = bell_state(AB, Dof::Polarization, BellLabel::PHI_PLUS).unwrap();
        let got_p = qnd_process_fidelity(QndKind::Polarization, &pair, &pol_input).unwrap();
        // Even herald: ((s2+2)^2)/(2(s2^2+4)); odd herald collapses to one
        // product component, fidelity 1/2 against the unchanged input.
        let s2 = r * r + r0 * r0;
        let p_even = (s2 * s2 + 4.0) / 8.0;
        let p_odd = (r * r - r0 * r0).powi(2) / 8.0;
        let f_even = (s2 + 2.0).powi(2) / (2.0 * (s2 * s2 + 4.0));
        let expect = (p_even * f_even + p_odd * 0.5) / (p_even + p_odd);
        assert!((got_p - expect).abs() < TOL_ALGEBRAIC);
        assert!((got_p - 0.9798463717672545).abs() < TOL_ALGEBRAIC);

        let hyper_input = hyper_bell_state(
            AB,
            HyperBellLabel::new(BellLabel::PHI_PLUS, BellLabel::PHI_PLUS),
        )
        .unwrap();
        let got_s = qnd_process_fidelity(QndKind::Spatial, &pair, &hyper_input).unwrap();
        // The spatial odd herald is orthogonal to the input, so its term
        // drops out: (s2 + 2)^2 / (4 (s4 + 2)).
        let s4 = r.powi(4) + r0.powi(4);
        let expect_s = (s2 + 2.0).powi(2) / (4.0 * (s4 + 2.0));
        assert!((got_s - expect_s).abs() < TOL_ALGEBRAIC);
        assert!((got_s - 0.9769657959443275).abs() < TOL_ALGEBRAIC);

        // Both sit within one percent of the closed forms; the exact gap is
        // the difference between branch averaging and stagewise averaging.
        let fp = fidelity_closed_form_p(pair.r0().norm(), pair.r().norm()).unwrap();
        let fs = fidelity_closed_form_s(pair.r0().norm(), pair.r().norm()).unwrap();
        assert!((got_p - fp).abs() < 0.01);
        assert!((got_s - fs).abs() < 0.01);
    }

    #[test]
    fn equal_reflection_amplitudes_make_the_spatial_check_polarization_free() {
        let r = 773.0 / 833.0;
        let pair = ReflectionPair::new(Complex64::new(r, 0.0), Complex64::new(r, 0.0)).unwrap();
        let input = hyper_bell_state(
            AB,
            HyperBellLabel::new(BellLabel::PHI_PLUS, BellLabel::PHI_PLUS),
        )
        .unwrap();
        let got = qnd_process_fidelity(QndKind::Spatial, &pair, &input).unwrap();
        // The spin never flips, so the even herald is certain and carries
        // (1 + r^2)^2 / (2 (1 + r^4)).
        let expect = (1.0 + r * r).powi(2) / (2.0 * (1.0 + r.powi(4)));
        assert!((got - expect).abs() < TOL_ALGEBRAIC);
        assert!((got - 0.9944633294142157).abs() < TOL_ALGEBRAIC);
    }
}
