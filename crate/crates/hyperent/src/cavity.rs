//! Reflection off a one-sided cavity containing a single electron spin, and
//! the closed-form parity-check fidelities that follow from it.
//!
//! A photon at angular frequency `omega` reflecting off the cavity acquires
//! the input-output amplitude
//!
//! ```text
//!         [i(omega_e - omega) + gamma/2][i(omega_c - omega) - eta/2 + kappa/2] + g^2
//! r(omega) = -----------------------------------------------------------------------
//!         [i(omega_e - omega) + gamma/2][i(omega_c - omega) + eta/2 + kappa/2] + g^2
//! ```
//!
//! where `g` is the spin-cavity coupling, `gamma` the spin dipole decay
//! rate, `eta` the cavity damping into the input-output mode, and `kappa`
//! the cavity side leakage. All of them, and all frequencies, are given in
//! units of 2π×GHz. The coupled transition (`g` as given) yields `r`; a
//! photon whose polarization does not address the spin sees an empty cavity
//! (`g = 0`) and yields `r0`. On resonance with no side leakage the two
//! limits are `r -> 1` and `r0 -> -1`, which is the phase relation the
//! parity checks in [`crate::qnd`] are built on: with spin states indexed
//! `0 = |-1>`, `1 = |+1>` and polarization `0 = R`, `1 = L`, the photon
//! couples when the two indices agree and sees the empty cavity otherwise.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Physical parameters of the spin-cavity system, in units of 2π×GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Spin-cavity coupling strength.
    pub g: f64,
    /// Spin dipole decay rate.
    pub gamma: f64,
    /// Cavity damping rate into the input-output mode.
    pub eta: f64,
    /// Cavity side leakage rate.
    pub kappa: f64,
    /// Cavity resonance frequency.
    pub omega_c: f64,
    /// Spin transition frequency.
    pub omega_e: f64,
}

impl CavityParams {
    /// Validates that every rate and frequency is nonnegative and finite.
    pub fn new(
        g: f64,
        gamma: f64,
        eta: f64,
        kappa: f64,
        omega_c: f64,
        omega_e: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("g", g),
            ("gamma", gamma),
            ("eta", eta),
            ("kappa", kappa),
            ("omega_c", omega_c),
            ("omega_e", omega_e),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "cavity parameter {name} must be a nonnegative finite number, got {v}"
                )));
            }
        }
        Ok(CavityParams {
            g,
            gamma,
            eta,
            kappa,
            omega_c,
            omega_e,
        })
    }

    /// A doubly resonant system (`omega_c = omega_e = 0`), probed at its
    /// shared resonance by `omega = 0`.
    pub fn resonant(g: f64, gamma: f64, eta: f64, kappa: f64) -> Result<Self> {
        CavityParams::new(g, gamma, eta, kappa, 0.0, 0.0)
    }

    /// The same system with the spin decoupled from the cavity mode.
    pub fn decoupled(&self) -> Self {
        CavityParams { g: 0.0, ..*self }
    }
}

/// Input-output reflection amplitude of the cavity at probe frequency
/// `omega` (same 2π×GHz units as the parameters).
pub fn reflection_coefficient(params: &CavityParams, omega: f64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let spin = i * (params.omega_e - omega) + params.gamma / 2.0;
    let g2 = Complex64::new(params.g * params.g, 0.0);
    let num = spin * (i * (params.omega_c - omega) - params.eta / 2.0 + params.kappa / 2.0) + g2;
    let den = spin * (i * (params.omega_c - omega) + params.eta / 2.0 + params.kappa / 2.0) + g2;
    if den.norm() < 1e-300 {
        return Err(Error::Domain(
            "reflection coefficient denominator vanishes for these parameters".into(),
        ));
    }
    Ok(num / den)
}

/// The pair of reflection amplitudes a parity check works with: `r` for the
/// coupled transition and `r0` for the empty cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    r: Complex64,
    r0: Complex64,
}

impl ReflectionPair {
    /// Builds a pair from explicit amplitudes; both must be passive
    /// (magnitude at most one).
    pub fn new(r: Complex64, r0: Complex64) -> Result<Self> {
        for (name, v) in [("r", r), ("r0", r0)] {
            if !v.re.is_finite() || !v.im.is_finite() || v.norm() > 1.0 + crate::TOL_CHAINED {
                return Err(Error::Domain(format!(
                    "reflection amplitude {name} = {v} is not passive"
                )));
            }
        }
        Ok(ReflectionPair { r, r0 })
    }

    /// The lossless limit `r = 1`, `r0 = -1`.
    pub fn ideal() -> Self {
        ReflectionPair {
            r: Complex64::new(1.0, 0.0),
            r0: Complex64::new(-1.0, 0.0),
        }
    }

    /// Evaluates both amplitudes at one probe frequency: `r` with the
    /// coupling as given and `r0` with the spin decoupled.
    pub fn evaluate(params: &CavityParams, omega: f64) -> Result<Self> {
        let r = reflection_coefficient(params, omega)?;
        let r0 = reflection_coefficient(&params.decoupled(), omega)?;
        ReflectionPair::new(r, r0)
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn r0(&self) -> Complex64 {
        self.r0
    }
}

/// Lossless reflection phase for one photon bounce: `+1` when the
/// polarization index matches the spin index (coupled transition), `-1`
/// otherwise.
pub fn ideal_reflection_rule(pol: u8, spin: u8) -> Complex64 {
    if pol == spin {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    }
}

/// Reflection amplitude for one photon bounce with realistic cavity
/// parameters: `r` on the coupled combinations, `r0` on the uncoupled ones.
/// With the ideal pair this reduces to [`ideal_reflection_rule`].
pub fn lossy_reflection_rule(pair: &ReflectionPair, pol: u8, spin: u8) -> Complex64 {
    if pol == spin {
        pair.r
    } else {
        pair.r0
    }
}

fn check_magnitude(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!(
            "reflection magnitude {name} = {v} must lie in [0, 1]"
        )));
    }
    Ok(())
}

/// Closed-form fidelity of the polarization parity check, as a function of
/// the reflection magnitudes `|r0|` and `|r|`:
///
/// ```text
/// F_P = (|r0|^2 + |r|^2 + 2)^2 (|r0| + |r| + 2)^2
///       / [16 (|r0|^4 + |r|^4 + 2)(|r0|^2 + |r|^2 + 2)]
/// ```
pub fn fidelity_closed_form_p(abs_r0: f64, abs_r: f64) -> Result<f64> {
    check_magnitude("|r0|", abs_r0)?;
    check_magnitude("|r|", abs_r)?;
    let s1 = abs_r0 + abs_r;
    let s2 = abs_r0 * abs_r0 + abs_r * abs_r;
    let s4 = abs_r0.powi(4) + abs_r.powi(4);
    Ok((s2 + 2.0).powi(2) * (s1 + 2.0).powi(2) / (16.0 * (s4 + 2.0) * (s2 + 2.0)))
}

/// Closed-form fidelity of the spatial-mode parity check:
///
/// ```text
/// F_S = [1/2 + (|r0|^2 + |r|^2)^2 / (4 (|r0|^4 + |r|^4))]
///       * (|r0| + |r| + 2)^2 / [4 (|r0|^2 + |r|^2 + 2)]
/// ```
///
/// Undefined when both magnitudes vanish.
pub fn fidelity_closed_form_s(abs_r0: f64, abs_r: f64) -> Result<f64> {
    check_magnitude("|r0|", abs_r0)?;
    check_magnitude("|r|", abs_r)?;
    let s1 = abs_r0 + abs_r;
    let s2 = abs_r0 * abs_r0 + abs_r * abs_r;
    let s4 = abs_r0.powi(4) + abs_r.powi(4);
    if s4 == 0.0 {
        return Err(Error::Domain(
            "spatial closed form is undefined at |r0| = |r| = 0".into(),
        ));
    }
    Ok((0.5 + s2 * s2 / (4.0 * s4)) * (s1 + 2.0).powi(2) / (4.0 * (s2 + 2.0)))
}
