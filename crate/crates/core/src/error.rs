use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register needs at least {min} item(s), got {got}")]
    InvalidSize { got: usize, min: usize },

    #[error("index {index} is out of range for a register of {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter `{name}` = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error(
        "translation-free start requires a free big oscillator (big_spring = 0), got big_spring = {big_spring}"
    )]
    InvalidCombination { big_spring: f64 },

    #[error("target oscillator has zero velocity; the gain ratio is undefined")]
    UndefinedRatio,

    #[error("closed-form evolution does not support damping (gamma = {gamma}); use the numeric integrator")]
    UnsupportedDamped { gamma: f64 },

    #[error(
        "mistimed tap at t = {time}: displacement {displacement:.6e} exceeds tolerance {tolerance:.6e}"
    )]
    MistimedTap {
        displacement: f64,
        tolerance: f64,
        time: f64,
    },

    #[error("register kinetic energy is zero; velocities define no amplitude state")]
    UndefinedState,

    #[error("tapped state is degenerate at alpha = 0: the odd superposition vanishes")]
    DegenerateState,
}

pub type Result<T> = std::result::Result<T, Error>;
