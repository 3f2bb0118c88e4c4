//! Coherent-state dynamics of a single oscillator and its tapped version.
//!
//! A coherent state is the minimal-spread Gaussian wavepacket parametrized
//! by one complex number alpha; free evolution rotates alpha at the
//! oscillator frequency while the packet center follows the classical
//! trajectory. The tapped oscillator lives in the half potential with a
//! hard wall at x = 0; the node there is enforced by subtracting the
//! mirrored packet (method of images), which leaves only odd number states
//! in the superposition.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Minimal-uncertainty Gaussian wavepacket, tracked by its complex center
/// parameter plus an explicit global phase (free evolution contributes
/// -omega t / 2, each reflection contributes pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentState {
    pub alpha: Complex64,
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
    pub global_phase: f64,
}

impl CoherentState {
    /// Natural units: unit mass and unit action quantum.
    pub fn new(alpha: Complex64, omega: f64) -> Result<Self> {
        Self::with_units(alpha, omega, 1.0, 1.0)
    }

    pub fn with_units(alpha: Complex64, omega: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, value) in [("omega", omega), ("mass", mass), ("hbar", hbar)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "must be positive and finite",
                });
            }
        }
        Ok(Self {
            alpha,
            omega,
            mass,
            hbar,
            global_phase: 0.0,
        })
    }
}

/// Expectation values and spreads of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectations {
    pub pos: f64,
    pub mom: f64,
    pub pos_spread: f64,
    pub mom_spread: f64,
    pub energy: f64,
}

/// Free evolution by dt: alpha rotates by -omega dt, the global phase
/// advances by -omega dt / 2. The modulus of alpha and the energy are
/// conserved.
pub fn evolve_coherent(state: &CoherentState, dt: f64) -> CoherentState {
    let mut out = *state;
    out.alpha *= Complex64::from_polar(1.0, -state.omega * dt);
    out.global_phase -= 0.5 * state.omega * dt;
    out
}

/// Position/momentum means and spreads: the packet center sits at
/// (2 dx Re alpha, 2 dp Im alpha) with dx = sqrt(hbar / 2 m omega),
/// dp = sqrt(m hbar omega / 2); the energy is hbar omega (|alpha|^2 + 1/2).
pub fn expectations(state: &CoherentState) -> Expectations {
    let pos_spread = (state.hbar / (2.0 * state.mass * state.omega)).sqrt();
    let mom_spread = (state.mass * state.hbar * state.omega / 2.0).sqrt();
    Expectations {
        pos: 2.0 * pos_spread * state.alpha.re,
        mom: 2.0 * mom_spread * state.alpha.im,
        pos_spread,
        mom_spread,
        energy: state.hbar * state.omega * (state.alpha.norm_sqr() + 0.5),
    }
}

/// Wavefunction value at x: a normalized Gaussian centered on the classical
/// position with a plane-wave factor exp(i x <p> / hbar), carrying the
/// explicit global phase.
pub fn wavepacket_at(state: &CoherentState, x: f64) -> Complex64 {
    let e = expectations(state);
    let prefactor = (state.mass * state.omega / (std::f64::consts::PI * state.hbar)).powf(0.25);
    let half_width = 2.0 * e.pos_spread;
    let gauss = -((x - e.pos) / half_width).powi(2);
    let phase = x * e.mom / state.hbar + state.global_phase;
    prefactor * (Complex64::new(gauss, phase)).exp()
}

/// The tap: swaps the packet for its mirror image (alpha -> -alpha), which
/// reverses both expectation values, and adds the reflection sign to the
/// global phase.
pub fn tap_coherent(state: &CoherentState) -> CoherentState {
    let mut out = *state;
    out.alpha = -out.alpha;
    out.global_phase += std::f64::consts::PI;
    out
}

/// Coherent state of the tapped (half-potential) oscillator: the odd image
/// superposition of |alpha> and |-alpha>, normalized on the physical
/// half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TappedCoherentState {
    pub base: CoherentState,
    /// (1 - exp(-2 |alpha|^2))^(-1/2)
    pub normalization: f64,
}

/// Builds the image superposition C (|alpha> - |-alpha>). Fails at
/// alpha = 0, where the odd combination vanishes identically.
pub fn tapped_state(base: &CoherentState) -> Result<TappedCoherentState> {
    let mod_sq = base.alpha.norm_sqr();
    if mod_sq == 0.0 {
        return Err(Error::DegenerateState);
    }
    Ok(TappedCoherentState {
        base: *base,
        normalization: (1.0 - (-2.0 * mod_sq).exp()).powf(-0.5),
    })
}

impl TappedCoherentState {
    /// Free evolution between reflections; both images rotate together, so
    /// the normalization is untouched.
    pub fn evolve(&self, dt: f64) -> Self {
        Self {
            base: evolve_coherent(&self.base, dt),
            normalization: self.normalization,
        }
    }

    /// Number-state coefficients of the superposition, truncated where the
    /// term magnitude |alpha|^n / sqrt(n!) falls below 1e-16. Even entries
    /// vanish identically.
    pub fn number_coefficients(&self) -> Vec<Complex64> {
        let alpha = self.base.alpha;
        let weight = self.normalization * (-0.5 * alpha.norm_sqr()).exp();
        let mut coefficients = Vec::new();
        let mut term = Complex64::new(1.0, 0.0); // alpha^n / sqrt(n!)
        let mut n = 0usize;
        loop {
            let sign = if n % 2 == 0 { 0.0 } else { 2.0 }; // 1 - (-1)^n
            coefficients.push(weight * sign * term);
            n += 1;
            term *= alpha / (n as f64).sqrt();
            if term.norm() < 1e-16 && n > alpha.norm_sqr() as usize + 1 {
                break;
            }
        }
        coefficients
    }
}

/// Wavefunction of the tapped state: C (psi_alpha(x) - psi_{-alpha}(x)).
/// Exactly zero at the wall x = 0 for every alpha and time.
pub fn tapped_wavefunction_at(tapped: &TappedCoherentState, x: f64) -> Complex64 {
    let mirror = CoherentState {
        alpha: -tapped.base.alpha,
        ..tapped.base
    };
    tapped.normalization * (wavepacket_at(&tapped.base, x) - wavepacket_at(&mirror, x))
}
