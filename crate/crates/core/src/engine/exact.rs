//! Closed-form evolution of the undamped system.
//!
//! The state is projected onto the two coupled eigenmodes of the
//! (big mode, mean mode) block and onto the per-oscillator deviations from
//! the mean, each of which is an independent harmonic oscillator. A mode of
//! zero frequency (free big oscillator) advances as a uniform translation.

use crate::error::{Error, Result};
use crate::oscillator::{spectral, OscillatorParams, PhaseSpaceState};

/// Reusable propagator; builds the eigenbasis once.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    sqrt_big_mass: f64,
    sqrt_n: f64,
    /// Orthonormal eigenvector of the fast mode in (Y, ybar) coordinates.
    u_plus: [f64; 2],
    /// Orthonormal eigenvector of the slow mode (perpendicular to u_plus).
    u_minus: [f64; 2],
    omega_plus: f64,
    omega_minus: f64,
}

impl ExactPropagator {
    pub fn new(params: &OscillatorParams) -> Result<Self> {
        if params.damping() > 0.0 {
            return Err(Error::UnsupportedDamped {
                gamma: params.damping(),
            });
        }
        let s = spectral(params);
        let norm = (s.mode_plus[0] * s.mode_plus[0] + s.mode_plus[1] * s.mode_plus[1]).sqrt();
        let u_plus = [s.mode_plus[0] / norm, s.mode_plus[1] / norm];
        // rotate by 90 degrees so orthogonality is exact in floating point
        let u_minus = [-u_plus[1], u_plus[0]];
        Ok(Self {
            sqrt_big_mass: params.big_mass().sqrt(),
            sqrt_n: (params.n_items() as f64).sqrt(),
            u_plus,
            u_minus,
            omega_plus: s.omega_plus,
            omega_minus: s.omega_minus,
        })
    }

    /// Advances the state in place by dt.
    pub fn advance(&self, state: &mut PhaseSpaceState, dt: f64) {
        if dt == 0.0 {
            return;
        }
        let n = state.n_items();
        let xbar = state.mean_pos();
        let vbar = state.mean_vel();

        // coupled block, in (Y, ybar) coordinates
        let y = [self.sqrt_big_mass * state.big_pos, self.sqrt_n * xbar];
        let yd = [self.sqrt_big_mass * state.big_vel, self.sqrt_n * vbar];
        let mut coords = [0.0f64; 2];
        let mut vels = [0.0f64; 2];
        for (u, omega) in [(self.u_plus, self.omega_plus), (self.u_minus, self.omega_minus)] {
            let q = u[0] * y[0] + u[1] * y[1];
            let qd = u[0] * yd[0] + u[1] * yd[1];
            let (q_new, qd_new) = advance_mode(q, qd, omega, dt);
            coords[0] += q_new * u[0];
            coords[1] += q_new * u[1];
            vels[0] += qd_new * u[0];
            vels[1] += qd_new * u[1];
        }
        state.big_pos = coords[0] / self.sqrt_big_mass;
        state.big_vel = vels[0] / self.sqrt_big_mass;
        let xbar_new = coords[1] / self.sqrt_n;
        let vbar_new = vels[1] / self.sqrt_n;

        // every deviation from the mean rotates at unit frequency
        let (cos_t, sin_t) = (dt.cos(), dt.sin());
        for i in 0..n {
            let d = state.pos[i] - xbar;
            let dv = state.vel[i] - vbar;
            state.pos[i] = xbar_new + d * cos_t + dv * sin_t;
            state.vel[i] = vbar_new - d * sin_t + dv * cos_t;
        }
        state.time += dt;
    }
}

/// One independent harmonic mode over time dt; frequencies at or below the
/// degeneracy threshold advance as free translation.
fn advance_mode(q: f64, qd: f64, omega: f64, dt: f64) -> (f64, f64) {
    if omega > 1e-9 {
        let (c, s) = ((omega * dt).cos(), (omega * dt).sin());
        (q * c + qd / omega * s, -q * omega * s + qd * c)
    } else {
        (q + qd * dt, qd)
    }
}

/// Evolves a copy of the state by dt using the closed form. Fails when the
/// parameters carry damping.
pub fn evolve_exact(
    state: &PhaseSpaceState,
    params: &OscillatorParams,
    dt: f64,
) -> Result<PhaseSpaceState> {
    let prop = ExactPropagator::new(params)?;
    let mut out = state.clone();
    prop.advance(&mut out, dt);
    Ok(out)
}
