//! Database search on coupled harmonic oscillators.
//!
//! The same search algorithm in three coupled representations:
//!
//! * [`search`] — the abstract iteration on an N-item amplitude register:
//!   oracle reflection, reflection in the mean, optimal stopping, and the
//!   classical probe baselines it beats.
//! * [`oscillator`] and [`engine`] — a classical realization on N identical
//!   oscillators coupled to one big oscillator. An elastic tap on the target
//!   plays the oracle; free evolution over half a system period plays the
//!   reflection in the mean; energy focuses into the tapped oscillator
//!   N-fold.
//! * [`quantum`] — the coherent-state version of a single tapped
//!   oscillator, with the hard-wall node enforced by the method of images.
//!
//! [`experiments`] scripts the robustness studies (damping, scaling,
//! detuning) and the rate-enhancement model built on the energy focusing.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod oscillator;
pub mod quantum;
pub mod search;

pub use error::{Error, Result};
