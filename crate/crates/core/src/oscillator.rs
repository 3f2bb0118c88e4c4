//! The coupled-oscillator register: N identical unit-mass oscillators, each
//! attached by a unit spring to one big oscillator, which may itself be
//! anchored by a spring K. The big oscillator couples only to the
//! center-of-mass displacement of the register.
//!
//! In the coordinates Y = sqrt(M) X, ybar = sqrt(N) xbar, y_t = x_t - xbar
//! the potential decouples into a 2x2 block on (Y, ybar) with frequencies
//! omega_+/- and a unit-frequency relative block; the remaining N-2
//! directions (differences among non-target oscillators) are free unit
//! oscillators that never talk to the rest.

use crate::error::{Error, Result};

/// Small-oscillator mass in natural units.
pub const SMALL_MASS: f64 = 1.0;
/// Small-oscillator spring constant in natural units.
pub const SMALL_SPRING: f64 = 1.0;

/// System constants. Small mass and spring are pinned to 1 (natural units);
/// the big oscillator carries the tunable mass and anchor spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    n_items: usize,
    big_mass: f64,
    big_spring: f64,
    damping: f64,
}

impl OscillatorParams {
    pub fn new(n_items: usize, big_mass: f64, big_spring: f64) -> Result<Self> {
        if n_items < 2 {
            return Err(Error::InvalidSize {
                got: n_items,
                min: 2,
            });
        }
        if !(big_mass > 0.0) || !big_mass.is_finite() {
            return Err(Error::InvalidParameter {
                name: "big_mass",
                value: big_mass,
                requirement: "must be positive and finite",
            });
        }
        if !(big_spring >= 0.0) || !big_spring.is_finite() {
            return Err(Error::InvalidParameter {
                name: "big_spring",
                value: big_spring,
                requirement: "must be non-negative and finite",
            });
        }
        Ok(Self {
            n_items,
            big_mass,
            big_spring,
            damping: 0.0,
        })
    }

    /// Adds a velocity-proportional damping rate applied to every coordinate.
    pub fn with_damping(mut self, damping: f64) -> Result<Self> {
        if !(damping >= 0.0) || !damping.is_finite() {
            return Err(Error::InvalidParameter {
                name: "damping",
                value: damping,
                requirement: "must be non-negative and finite",
            });
        }
        self.damping = damping;
        Ok(self)
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn small_mass(&self) -> f64 {
        SMALL_MASS
    }

    pub fn small_spring(&self) -> f64 {
        SMALL_SPRING
    }

    pub fn big_mass(&self) -> f64 {
        self.big_mass
    }

    pub fn big_spring(&self) -> f64 {
        self.big_spring
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// True when the big oscillator is unanchored; the system then has a
    /// rigid translation mode instead of a second oscillation mode.
    pub fn is_free(&self) -> bool {
        self.big_spring == 0.0
    }
}

/// The two tuned parameter families. Both make every mode frequency
/// rational so the whole system is periodic.
///
/// * `A`: anchored big oscillator, mode frequencies (2p+1)/2 and 1/2,
///   system period 4*pi, reflection in the mean every 2*pi.
/// * `B`: free big oscillator, mode frequencies 2p and 0, system period
///   2*pi, reflection in the mean every pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    A,
    B,
}

impl Family {
    /// Time between taps that realizes one search iteration.
    pub fn tap_interval(self) -> f64 {
        match self {
            Family::A => 2.0 * std::f64::consts::PI,
            Family::B => std::f64::consts::PI,
        }
    }

    /// Full period of the untapped system.
    pub fn period(self) -> f64 {
        2.0 * self.tap_interval()
    }
}

/// Big-oscillator mass and spring for the given family and order p.
pub fn family_params(family: Family, p: u32, n_items: usize) -> Result<OscillatorParams> {
    if p == 0 {
        return Err(Error::InvalidParameter {
            name: "p",
            value: 0.0,
            requirement: "family order must be a positive integer",
        });
    }
    let n = n_items as f64;
    let p = p as f64;
    match family {
        Family::A => {
            let denom = 3.0 * (2.0 * p + 3.0) * (2.0 * p - 1.0);
            OscillatorParams::new(
                n_items,
                16.0 * n / denom,
                (2.0 * p + 1.0) * (2.0 * p + 1.0) * n / denom,
            )
        }
        Family::B => {
            OscillatorParams::new(n_items, n / ((2.0 * p + 1.0) * (2.0 * p - 1.0)), 0.0)
        }
    }
}

/// Mode frequencies and eigenmode coefficients of the (Y, ybar) block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Frequency of the relative (target minus mean) mode; always 1.
    pub omega_relative: f64,
    /// Coefficients (on Y, on ybar) of the fast eigenmode
    /// e_+ = (1 - omega_+^2) Y + sqrt(N/M) ybar.
    pub mode_plus: [f64; 2],
    /// Coefficients (on Y, on ybar) of the slow eigenmode.
    pub mode_minus: [f64; 2],
}

/// Closed-form spectrum of the coupled block.
///
/// The (Y, ybar) stiffness matrix [[ (K+N)/M, -s ], [ -s, 1 ]] with
/// s = sqrt(N/M) has trace 1 + (K+N)/M and determinant K/M; the larger root
/// comes from the quadratic formula and the smaller from the product
/// identity, which stays exact when K = 0.
pub fn spectral(params: &OscillatorParams) -> SpectralData {
    let n = params.n_items as f64;
    let (m_big, k_big) = (params.big_mass, params.big_spring);
    let trace = 1.0 + (k_big + n) / m_big;
    let det = k_big / m_big;
    let disc = (0.25 * trace * trace - det).max(0.0);
    let w_plus_sq = 0.5 * trace + disc.sqrt();
    let w_minus_sq = if w_plus_sq > 0.0 { det / w_plus_sq } else { 0.0 };
    let s = (n / m_big).sqrt();
    SpectralData {
        omega_plus: w_plus_sq.sqrt(),
        omega_minus: w_minus_sq.sqrt(),
        omega_relative: 1.0,
        mode_plus: [1.0 - w_plus_sq, s],
        mode_minus: [1.0 - w_minus_sq, s],
    }
}

/// Full configuration of the system at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceState {
    pub time: f64,
    pub big_pos: f64,
    pub big_vel: f64,
    pub pos: Vec<f64>,
    pub vel: Vec<f64>,
}

impl PhaseSpaceState {
    pub fn new(
        time: f64,
        big_pos: f64,
        big_vel: f64,
        pos: Vec<f64>,
        vel: Vec<f64>,
    ) -> Result<Self> {
        if pos.len() != vel.len() || pos.is_empty() {
            return Err(Error::InvalidSize {
                got: pos.len().min(vel.len()),
                min: 1,
            });
        }
        let state = Self {
            time,
            big_pos,
            big_vel,
            pos,
            vel,
        };
        if !state.is_finite() {
            return Err(Error::InvalidParameter {
                name: "state",
                value: f64::NAN,
                requirement: "all coordinates must be finite",
            });
        }
        Ok(state)
    }

    /// All-zero state for a register of n items.
    pub fn zeros(n_items: usize) -> Self {
        Self {
            time: 0.0,
            big_pos: 0.0,
            big_vel: 0.0,
            pos: vec![0.0; n_items],
            vel: vec![0.0; n_items],
        }
    }

    pub fn n_items(&self) -> usize {
        self.pos.len()
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.big_pos.is_finite()
            && self.big_vel.is_finite()
            && self.pos.iter().all(|x| x.is_finite())
            && self.vel.iter().all(|x| x.is_finite())
    }

    pub fn mean_pos(&self) -> f64 {
        self.pos.iter().sum::<f64>() / self.pos.len() as f64
    }

    pub fn mean_vel(&self) -> f64 {
        self.vel.iter().sum::<f64>() / self.vel.len() as f64
    }
}

/// The same state in mode coordinates, split around one target index.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub time: f64,
    pub target: usize,
    /// Y = sqrt(M) X
    pub big_mode: f64,
    pub big_mode_vel: f64,
    /// ybar = sqrt(N) xbar
    pub mean_mode: f64,
    pub mean_mode_vel: f64,
    /// y_t = x_t - xbar
    pub rel_target: f64,
    pub rel_target_vel: f64,
    /// x_i - xbar for every i != target, in register order (N-1 entries).
    /// They sum to -rel_target because deviations from the mean cancel.
    pub residuals: Vec<f64>,
    pub residual_vels: Vec<f64>,
}

/// Linear change of coordinates into (big mode, mean mode, relative target,
/// residuals).
pub fn to_modes(
    state: &PhaseSpaceState,
    params: &OscillatorParams,
    target: usize,
) -> Result<ModeState> {
    let n = state.n_items();
    if target >= n {
        return Err(Error::IndexOutOfRange { index: target, len: n });
    }
    let sqrt_m = params.big_mass.sqrt();
    let sqrt_n = (n as f64).sqrt();
    let xbar = state.mean_pos();
    let vbar = state.mean_vel();
    let mut residuals = Vec::with_capacity(n - 1);
    let mut residual_vels = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i != target {
            residuals.push(state.pos[i] - xbar);
            residual_vels.push(state.vel[i] - vbar);
        }
    }
    Ok(ModeState {
        time: state.time,
        target,
        big_mode: sqrt_m * state.big_pos,
        big_mode_vel: sqrt_m * state.big_vel,
        mean_mode: sqrt_n * xbar,
        mean_mode_vel: sqrt_n * vbar,
        rel_target: state.pos[target] - xbar,
        rel_target_vel: state.vel[target] - vbar,
        residuals,
        residual_vels,
    })
}

/// Inverse of [`to_modes`].
pub fn from_modes(modes: &ModeState, params: &OscillatorParams) -> PhaseSpaceState {
    let n = modes.residuals.len() + 1;
    let sqrt_m = params.big_mass.sqrt();
    let sqrt_n = (n as f64).sqrt();
    let xbar = modes.mean_mode / sqrt_n;
    let vbar = modes.mean_mode_vel / sqrt_n;
    let mut pos = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        if i == modes.target {
            pos.push(xbar + modes.rel_target);
            vel.push(vbar + modes.rel_target_vel);
        } else {
            pos.push(xbar + modes.residuals[k]);
            vel.push(vbar + modes.residual_vels[k]);
            k += 1;
        }
    }
    PhaseSpaceState {
        time: modes.time,
        big_pos: modes.big_mode / sqrt_m,
        big_vel: modes.big_mode_vel / sqrt_m,
        pos,
        vel,
    }
}

/// How a run is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// Every register oscillator moving together at speed A, big oscillator
    /// at rest.
    Uniform,
    /// Same, plus a big-oscillator counter-velocity -(N/M) A that removes
    /// the rigid translation mode. Only defined for a free big oscillator.
    TranslationFree,
}

/// Builds the starting state: zero displacements, register velocity A.
pub fn initial_conditions(
    kind: InitialKind,
    amplitude: f64,
    params: &OscillatorParams,
) -> Result<PhaseSpaceState> {
    let n = params.n_items;
    let big_vel = match kind {
        InitialKind::Uniform => 0.0,
        InitialKind::TranslationFree => {
            if !params.is_free() {
                return Err(Error::InvalidCombination {
                    big_spring: params.big_spring,
                });
            }
            -(n as f64 / params.big_mass) * amplitude
        }
    };
    Ok(PhaseSpaceState {
        time: 0.0,
        big_pos: 0.0,
        big_vel,
        pos: vec![0.0; n],
        vel: vec![amplitude; n],
    })
}

/// Largest possible energy amplification of the target oscillator,
/// [N vbar^2 + N/(N-1) (v_t - vbar)^2] / v_t^2, evaluated on the given
/// velocities. Equals N for a uniform start.
pub fn max_gain(state: &PhaseSpaceState, target: usize) -> Result<f64> {
    let n = state.n_items();
    if target >= n {
        return Err(Error::IndexOutOfRange { index: target, len: n });
    }
    let v_t = state.vel[target];
    if v_t == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let nf = n as f64;
    let vbar = state.mean_vel();
    let rel = v_t - vbar;
    Ok((nf * vbar * vbar + nf / (nf - 1.0) * rel * rel) / (v_t * v_t))
}

/// Energy bookkeeping: the big oscillator's own energy, the register's
/// kinetic energy, and the coupling-spring potential (which includes every
/// small displacement term).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLedger {
    pub big_kinetic: f64,
    pub big_potential: f64,
    pub register_kinetic: f64,
    pub coupling_potential: f64,
    pub total: f64,
}

impl EnergyLedger {
    /// Everything that is not the big oscillator's: the register share.
    pub fn register_energy(&self) -> f64 {
        self.register_kinetic + self.coupling_potential
    }
}

/// Total energy 1/2 M Xd^2 + 1/2 K X^2 + sum_i [ 1/2 xd_i^2 + 1/2 (x_i - X)^2 ].
pub fn total_energy(state: &PhaseSpaceState, params: &OscillatorParams) -> EnergyLedger {
    let big_kinetic = 0.5 * params.big_mass * state.big_vel * state.big_vel;
    let big_potential = 0.5 * params.big_spring * state.big_pos * state.big_pos;
    let register_kinetic = 0.5 * state.vel.iter().map(|v| v * v).sum::<f64>();
    let coupling_potential = 0.5
        * state
            .pos
            .iter()
            .map(|x| (x - state.big_pos) * (x - state.big_pos))
            .sum::<f64>();
    EnergyLedger {
        big_kinetic,
        big_potential,
        register_kinetic,
        coupling_potential,
        total: big_kinetic + big_potential + register_kinetic + coupling_potential,
    }
}

/// Gain bookkeeping for one run. Gains are ratios against the target
/// oscillator's starting energy and are undefined when that energy is zero;
/// the absolute energies are always reported.
#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub max_gain: Option<f64>,
    pub realized_gain: Option<f64>,
    /// (time, gain) at every tap instant; empty when the ratio is undefined.
    pub gain_vs_time: Vec<(f64, f64)>,
    /// Instant at which the realized gain is attained.
    pub stop_time: f64,
    pub initial_target_energy: f64,
    pub peak_target_energy: f64,
}
