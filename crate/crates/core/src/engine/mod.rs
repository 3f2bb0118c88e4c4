//! Time evolution of the coupled system with the tapping oracle.
//!
//! A search run alternates an elastic tap (velocity sign flip of the target
//! oscillator, applied when no spring is stretched) with free evolution over
//! half a system period. At tap instants the register velocities, read as a
//! unit vector, reproduce the abstract amplitude iteration step for step, so
//! every run carries its own closed-form prediction alongside the measured
//! energies.

mod exact;
mod numeric;

pub use exact::{evolve_exact, ExactPropagator};
pub use numeric::{evolve_numeric, NumericSystem};

use crate::error::{Error, Result};
use crate::oscillator::{
    initial_conditions, max_gain, total_energy, EnergyLedger, GainReport, InitialKind,
    OscillatorParams, PhaseSpaceState,
};
use crate::search::{
    self, reflect_complement, reflect_mean, reflect_targets, rotation_angle, AmplitudeVector,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Which velocities a tap reverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapVariant {
    /// Flip the targets (the plain binary oracle).
    Standard,
    /// Flip everything except the targets; equal to the plain oracle up to a
    /// global velocity flip, and it is then the untapped oscillator that
    /// collects the energy.
    Complement,
}

/// Tap timing and target set for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TapSchedule {
    pub interval: f64,
    pub count: usize,
    pub targets: Vec<usize>,
    pub variant: TapVariant,
}

impl TapSchedule {
    pub fn new(
        interval: f64,
        count: usize,
        targets: Vec<usize>,
        variant: TapVariant,
    ) -> Result<Self> {
        if !(interval > 0.0) || !interval.is_finite() {
            return Err(Error::InvalidParameter {
                name: "interval",
                value: interval,
                requirement: "must be positive and finite",
            });
        }
        if targets.is_empty() {
            return Err(Error::InvalidSize { got: 0, min: 1 });
        }
        let mut targets = targets;
        targets.sort_unstable();
        targets.dedup();
        Ok(Self {
            interval,
            count,
            targets,
            variant,
        })
    }

    /// Schedule at the family's iteration interval.
    pub fn for_family(
        family: crate::oscillator::Family,
        count: usize,
        targets: Vec<usize>,
    ) -> Result<Self> {
        Self::new(family.tap_interval(), count, targets, TapVariant::Standard)
    }

    fn check_targets(&self, n_items: usize) -> Result<()> {
        for &t in &self.targets {
            if t >= n_items {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    len: n_items,
                });
            }
        }
        Ok(())
    }
}

/// Evolution backend for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    /// Mode-space closed form; undamped systems only.
    Exact,
    /// Fixed-step symplectic integration; the only path when damping is on.
    Numeric { step: f64 },
}

/// How strictly tap instants must coincide with an unstretched configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TapTolerance {
    /// 1e-6 of the initial velocity scale times the system period.
    Auto,
    Fixed(f64),
    /// Skip the check; for deliberately detuned systems.
    Unchecked,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub evolution: Evolution,
    /// Extra trajectory samples recorded inside each tap interval.
    pub samples_per_interval: usize,
    pub tap_tolerance: TapTolerance,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            evolution: Evolution::Exact,
            samples_per_interval: 0,
            tap_tolerance: TapTolerance::Auto,
        }
    }
}

/// Snapshot taken at a tap instant (before the tap; taps change no energy).
#[derive(Debug, Clone, PartialEq)]
pub struct TapInstantRecord {
    pub index: usize,
    pub time: f64,
    pub ledger: EnergyLedger,
    /// Total energy minus the big oscillator's share.
    pub register_energy: f64,
    /// Kinetic energy of the targets as a fraction of the register energy.
    pub target_fraction: f64,
    /// Same fraction predicted by the abstract amplitude iteration.
    pub predicted_fraction: Option<f64>,
    pub register_velocities: Vec<f64>,
}

/// Sampled run history plus the per-instant records.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<PhaseSpaceState>,
    pub instants: Vec<TapInstantRecord>,
}

impl Trajectory {
    /// Largest gap between measured and predicted target fractions.
    pub fn max_fraction_deviation(&self) -> Option<f64> {
        self.instants
            .iter()
            .filter_map(|r| r.predicted_fraction.map(|p| (r.target_fraction - p).abs()))
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }
}

/// Spring stretch that must vanish for a tap to be well-timed. An anchored
/// system must sit at absolute zero displacement; a free one may have
/// drifted rigidly, so only displacements relative to the big oscillator
/// count.
pub fn tap_displacement(state: &PhaseSpaceState, params: &OscillatorParams) -> f64 {
    let rel = state
        .pos
        .iter()
        .map(|x| (x - state.big_pos).abs())
        .fold(0.0f64, f64::max);
    if params.is_free() {
        rel
    } else {
        rel.max(state.big_pos.abs())
    }
}

fn flip_velocities(state: &mut PhaseSpaceState, schedule: &TapSchedule) {
    match schedule.variant {
        TapVariant::Standard => {
            for &t in &schedule.targets {
                state.vel[t] = -state.vel[t];
            }
        }
        TapVariant::Complement => {
            for v in state.vel.iter_mut() {
                *v = -*v;
            }
            for &t in &schedule.targets {
                state.vel[t] = -state.vel[t];
            }
        }
    }
}

/// Elastic tap: reverses the scheduled velocities. Total energy is exactly
/// unchanged. Fails when any spring is stretched beyond `tolerance`.
pub fn apply_tap(
    state: &PhaseSpaceState,
    params: &OscillatorParams,
    schedule: &TapSchedule,
    tolerance: f64,
) -> Result<PhaseSpaceState> {
    schedule.check_targets(state.n_items())?;
    let displacement = tap_displacement(state, params);
    if displacement > tolerance {
        return Err(Error::MistimedTap {
            displacement,
            tolerance,
            time: state.time,
        });
    }
    let mut out = state.clone();
    flip_velocities(&mut out, schedule);
    Ok(out)
}

/// Tap without the timing check, for deliberately detuned systems.
pub fn apply_tap_unchecked(state: &PhaseSpaceState, schedule: &TapSchedule) -> Result<PhaseSpaceState> {
    schedule.check_targets(state.n_items())?;
    let mut out = state.clone();
    flip_velocities(&mut out, schedule);
    Ok(out)
}

/// Register velocities as a unit amplitude vector. Fails when the register
/// carries no kinetic energy; meaningful at unstretched instants, where all
/// register energy is kinetic.
pub fn velocity_amplitude_map(state: &PhaseSpaceState) -> Result<AmplitudeVector> {
    AmplitudeVector::normalized(state.vel.clone())
}

enum Backend {
    Exact(ExactPropagator),
    Numeric(NumericSystem, f64),
}

impl Backend {
    fn new(params: &OscillatorParams, evolution: Evolution) -> Result<Self> {
        match evolution {
            Evolution::Exact => Ok(Backend::Exact(ExactPropagator::new(params)?)),
            Evolution::Numeric { step } => {
                if !(step > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "step_size",
                        value: step,
                        requirement: "must be positive",
                    });
                }
                Ok(Backend::Numeric(NumericSystem::from_params(params), step))
            }
        }
    }

    fn advance(&self, state: &mut PhaseSpaceState, dt: f64) -> Result<()> {
        match self {
            Backend::Exact(prop) => {
                prop.advance(state, dt);
                Ok(())
            }
            Backend::Numeric(system, step) => system.evolve(state, dt, *step),
        }
    }
}

fn resolve_tolerance(
    tolerance: TapTolerance,
    state0: &PhaseSpaceState,
    schedule: &TapSchedule,
) -> f64 {
    match tolerance {
        TapTolerance::Fixed(t) => t,
        TapTolerance::Unchecked => f64::INFINITY,
        TapTolerance::Auto => {
            let v_scale = state0
                .vel
                .iter()
                .map(|v| v.abs())
                .fold(state0.big_vel.abs(), f64::max)
                .max(1e-6);
            1e-6 * v_scale * 2.0 * schedule.interval
        }
    }
}

/// Advances the abstract amplitude state by one iteration: the oracle flip
/// followed by the half-period action of the wave system, which is the
/// reflection in the mean for a free big oscillator and its negative for an
/// anchored one.
fn predict_step(
    amp: &AmplitudeVector,
    schedule: &TapSchedule,
    free_big: bool,
) -> Result<AmplitudeVector> {
    let tapped = match schedule.variant {
        TapVariant::Standard => reflect_targets(amp, &schedule.targets)?,
        TapVariant::Complement => reflect_complement(amp, &schedule.targets)?,
    };
    Ok(if free_big {
        reflect_mean(&tapped)
    } else {
        search::neg_reflect_mean(&tapped)
    })
}

fn record_instant(
    index: usize,
    state: &PhaseSpaceState,
    params: &OscillatorParams,
    schedule: &TapSchedule,
    predicted: Option<&AmplitudeVector>,
) -> TapInstantRecord {
    let ledger = total_energy(state, params);
    let register_energy = ledger.register_energy();
    let target_kinetic: f64 = schedule
        .targets
        .iter()
        .map(|&t| 0.5 * state.vel[t] * state.vel[t])
        .sum();
    let target_fraction = if register_energy > 0.0 {
        target_kinetic / register_energy
    } else {
        f64::NAN
    };
    let predicted_fraction = predicted.map(|amp| {
        schedule
            .targets
            .iter()
            .map(|&t| amp.amplitudes()[t] * amp.amplitudes()[t])
            .sum()
    });
    TapInstantRecord {
        index,
        time: state.time,
        ledger,
        register_energy,
        target_fraction,
        predicted_fraction,
        register_velocities: state.vel.clone(),
    }
}

/// Full search run from an arbitrary starting state (displacements must be
/// compatible with the tap timing). Applies a tap at t = 0, evolves one
/// interval, and repeats `schedule.count` times, recording energies and
/// target fractions at every tap instant.
pub fn run_search_from(
    params: &OscillatorParams,
    schedule: &TapSchedule,
    state0: PhaseSpaceState,
    settings: &RunSettings,
) -> Result<(Trajectory, GainReport)> {
    schedule.check_targets(params.n_items())?;
    if state0.n_items() != params.n_items() {
        return Err(Error::InvalidSize {
            got: state0.n_items(),
            min: params.n_items(),
        });
    }
    let backend = Backend::new(params, settings.evolution)?;
    let tolerance = resolve_tolerance(settings.tap_tolerance, &state0, schedule);

    let mut prediction = velocity_amplitude_map(&state0).ok();
    let mut state = state0.clone();
    let substeps = settings.samples_per_interval + 1;
    let sub_dt = schedule.interval / substeps as f64;

    let mut states = Vec::with_capacity(schedule.count * substeps + 1);
    let mut instants = Vec::with_capacity(schedule.count + 1);
    instants.push(record_instant(0, &state, params, schedule, prediction.as_ref()));

    for k in 0..schedule.count {
        state = apply_tap(&state, params, schedule, tolerance)?;
        states.push(state.clone());
        for j in 1..=substeps {
            backend.advance(&mut state, sub_dt)?;
            if j < substeps {
                states.push(state.clone());
            }
        }
        if let Some(amp) = prediction.take() {
            prediction = Some(predict_step(&amp, schedule, params.is_free())?);
        }
        instants.push(record_instant(
            k + 1,
            &state,
            params,
            schedule,
            prediction.as_ref(),
        ));
    }
    states.push(state);

    let report = build_gain_report(&state0, schedule, &instants);
    Ok((Trajectory { states, instants }, report))
}

fn build_gain_report(
    state0: &PhaseSpaceState,
    schedule: &TapSchedule,
    instants: &[TapInstantRecord],
) -> GainReport {
    let target_kinetic = |r: &TapInstantRecord| -> f64 {
        schedule
            .targets
            .iter()
            .map(|&t| 0.5 * r.register_velocities[t] * r.register_velocities[t])
            .sum()
    };
    let initial: f64 = schedule
        .targets
        .iter()
        .map(|&t| 0.5 * state0.vel[t] * state0.vel[t])
        .sum();
    let (mut peak, mut stop_time) = (0.0f64, state0.time);
    for r in instants {
        let e = target_kinetic(r);
        if e > peak {
            peak = e;
            stop_time = r.time;
        }
    }
    let single_target = schedule.targets.len() == 1;
    let gains_defined = initial > 0.0;
    GainReport {
        max_gain: if single_target {
            max_gain(state0, schedule.targets[0]).ok()
        } else {
            None
        },
        realized_gain: gains_defined.then(|| peak / initial),
        gain_vs_time: if gains_defined {
            instants
                .iter()
                .map(|r| (r.time, target_kinetic(r) / initial))
                .collect()
        } else {
            Vec::new()
        },
        stop_time,
        initial_target_energy: initial,
        peak_target_energy: peak,
    }
}

/// Search run from the standard starting state: a translation-free start
/// when the big oscillator is free, the plain uniform start otherwise.
pub fn run_search(
    params: &OscillatorParams,
    schedule: &TapSchedule,
    amplitude: f64,
    settings: &RunSettings,
) -> Result<(Trajectory, GainReport)> {
    let kind = if params.is_free() {
        InitialKind::TranslationFree
    } else {
        InitialKind::Uniform
    };
    let state0 = initial_conditions(kind, amplitude, params)?;
    run_search_from(params, schedule, state0, settings)
}

/// Runs the algorithm backwards: all register energy starts in the single
/// target oscillator and spreads uniformly, reaching kinetic-energy fraction
/// 1/N on every oscillator after the optimal tap count.
pub fn run_reverse(
    params: &OscillatorParams,
    schedule: &TapSchedule,
    amplitude: f64,
    settings: &RunSettings,
) -> Result<(Trajectory, GainReport)> {
    if schedule.targets.len() != 1 {
        return Err(Error::InvalidParameter {
            name: "targets",
            value: schedule.targets.len() as f64,
            requirement: "the reverse run starts from a single target",
        });
    }
    let n = params.n_items();
    let target = schedule.targets[0];
    let mut state0 = PhaseSpaceState::zeros(n);
    state0.vel[target] = amplitude;
    if params.is_free() {
        // cancel the total momentum so the register does not drift
        state0.big_vel = -amplitude / params.big_mass();
    }
    run_search_from(params, schedule, state0, settings)
}

/// Outcome of the random-stopping experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomStopReport {
    pub mean_fraction: f64,
    pub max_fraction: f64,
    /// mean / max; 1/2 for a uniform stop over whole rotation cycles.
    pub ratio: f64,
    pub trials: usize,
    pub grid_len: usize,
}

/// Default number of full rotation cycles spanned by the stopping grid.
pub const DEFAULT_STOP_CYCLES: usize = 16;

/// Stops the search at a tap instant drawn uniformly from a grid spanning
/// many full rotation cycles and averages the target fraction over `trials`
/// draws. `schedule.count` overrides the grid length when nonzero.
pub fn random_stop_gain(
    params: &OscillatorParams,
    schedule: &TapSchedule,
    trials: usize,
    seed: u64,
) -> Result<RandomStopReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            requirement: "must be at least 1",
        });
    }
    let theta = rotation_angle(schedule.targets.len(), params.n_items())?;
    let grid_len = if schedule.count > 0 {
        schedule.count + 1
    } else {
        (DEFAULT_STOP_CYCLES as f64 * std::f64::consts::FRAC_PI_2 / theta).ceil() as usize
    };
    let grid_schedule = TapSchedule {
        count: grid_len - 1,
        ..schedule.clone()
    };
    let (trajectory, _) = run_search(params, &grid_schedule, 1.0, &RunSettings::default())?;
    let fractions: Vec<f64> = trajectory
        .instants
        .iter()
        .map(|r| r.target_fraction)
        .collect();
    let max_fraction = fractions.iter().cloned().fold(f64::MIN, f64::max);

    let mut rng = StdRng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..trials {
        sum += fractions[rng.random_range(0..fractions.len())];
    }
    let mean_fraction = sum / trials as f64;
    Ok(RandomStopReport {
        mean_fraction,
        max_fraction,
        ratio: mean_fraction / max_fraction,
        trials,
        grid_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{family_params, Family};
    use crate::search::grover_iterate;

    const PI: f64 = std::f64::consts::PI;

    fn uniform_vel_state(n: usize) -> PhaseSpaceState {
        PhaseSpaceState::new(0.0, 0.0, 0.0, vec![0.0; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn tap_flips_the_target_velocity() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![2]).unwrap();
        let state = uniform_vel_state(4);
        let out = apply_tap(&state, &params, &schedule, 1e-9).unwrap();
        assert_eq!(out.vel, vec![1.0, 1.0, -1.0, 1.0]);

        // double tap restores the state
        let back = apply_tap(&out, &params, &schedule, 1e-9).unwrap();
        assert_eq!(back.vel, state.vel);

        // energy is exactly unchanged
        let e0 = total_energy(&state, &params).total;
        let e1 = total_energy(&out, &params).total;
        assert_eq!(e0, e1);
    }

    #[test]
    fn complement_tap_flips_everything_else() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::new(PI, 1, vec![2], TapVariant::Complement).unwrap();
        let out = apply_tap(&uniform_vel_state(4), &params, &schedule, 1e-9).unwrap();
        assert_eq!(out.vel, vec![-1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn mistimed_tap_reports_the_displacement() {
        let params = family_params(Family::A, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::A, 1, vec![0]).unwrap();
        let mut state = uniform_vel_state(4);
        state.pos[1] = 0.25;
        match apply_tap(&state, &params, &schedule, 1e-9) {
            Err(Error::MistimedTap { displacement, .. }) => {
                assert!((displacement - 0.25).abs() < 1e-15)
            }
            other => panic!("expected mistimed tap, got {other:?}"),
        }
    }

    #[test]
    fn free_family_tolerates_rigid_drift_but_not_stretch() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![0]).unwrap();
        let mut state = uniform_vel_state(4);
        // rigid displacement: all springs relaxed
        state.big_pos = 3.0;
        state.pos.iter_mut().for_each(|x| *x = 3.0);
        assert!(apply_tap(&state, &params, &schedule, 1e-9).is_ok());
        // a stretched spring is still rejected
        state.pos[1] = 3.5;
        assert!(apply_tap(&state, &params, &schedule, 1e-9).is_err());
    }

    #[test]
    fn search_run_focuses_the_target_in_one_iteration_at_n4() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![2]).unwrap();
        let (trajectory, report) =
            run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        assert_eq!(trajectory.instants.len(), 2);
        assert!((trajectory.instants[0].target_fraction - 0.25).abs() < 1e-12);
        assert!((trajectory.instants[1].target_fraction - 1.0).abs() < 1e-6);
        assert!((report.realized_gain.unwrap() - 4.0).abs() < 1e-9);
        assert!((report.max_gain.unwrap() - 4.0).abs() < 1e-12);
        assert!((report.stop_time - PI).abs() < 1e-12);
    }

    #[test]
    fn zero_taps_keeps_the_uniform_fraction() {
        let params = family_params(Family::B, 1, 8).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 0, vec![3]).unwrap();
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        assert_eq!(trajectory.instants.len(), 1);
        assert!((trajectory.instants[0].target_fraction - 0.125).abs() < 1e-12);
    }

    #[test]
    fn n16_three_iterations_match_the_frozen_overlap() {
        let params = family_params(Family::B, 1, 16).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 3, vec![5]).unwrap();
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        // sin^2(7 asin(1/4))
        assert!((trajectory.instants[3].target_fraction - 0.9613189697265625).abs() < 1e-9);
        assert!(trajectory.max_fraction_deviation().unwrap() < 1e-9);
    }

    #[test]
    fn measured_fractions_follow_the_prediction_for_both_families() {
        for (family, n, q) in [(Family::A, 8, 5), (Family::B, 8, 5)] {
            let params = family_params(family, 1, n).unwrap();
            let schedule = TapSchedule::for_family(family, q, vec![3]).unwrap();
            let amplitude = 0.7;
            let (trajectory, _) =
                run_search(&params, &schedule, amplitude, &RunSettings::default()).unwrap();
            let dev = trajectory.max_fraction_deviation().unwrap();
            assert!(dev < 1e-9, "family {family:?}: deviation {dev}");
        }
    }

    #[test]
    fn register_velocities_match_the_amplitude_iteration_exactly_signed() {
        // free family: tap instants realize (-reflect_mean . oracle)^q
        let n = 4;
        let params = family_params(Family::B, 1, n).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 3, vec![1]).unwrap();
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        let mut amp = crate::search::uniform_state(n).unwrap();
        for r in &trajectory.instants {
            let measured = AmplitudeVector::normalized(r.register_velocities.clone()).unwrap();
            for (a, b) in measured.amplitudes().iter().zip(amp.amplitudes()) {
                assert!((a - b).abs() < 1e-9, "instant {}: {a} vs {b}", r.index);
            }
            amp = predict_step(&amp, &schedule, true).unwrap();
        }
    }

    #[test]
    fn anchored_family_matches_the_amplitude_iteration_up_to_sign() {
        let n = 4;
        let params = family_params(Family::A, 1, n).unwrap();
        let schedule = TapSchedule::for_family(Family::A, 4, vec![2]).unwrap();
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        let (_, overlaps) = grover_iterate(n, 2, 4).unwrap();
        for (r, want) in trajectory.instants.iter().zip(overlaps) {
            assert!(
                (r.target_fraction - want).abs() < 1e-9,
                "instant {}: {} vs {}",
                r.index,
                r.target_fraction,
                want
            );
        }
    }

    #[test]
    fn taps_stay_timed_beyond_one_full_system_period() {
        // 9 intervals for the anchored family cover 18 pi > 4 pi
        let params = family_params(Family::A, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::A, 9, vec![0]).unwrap();
        let result = run_search(&params, &schedule, 1.0, &RunSettings::default());
        assert!(result.is_ok());
        let (trajectory, _) = result.unwrap();
        assert!(trajectory.max_fraction_deviation().unwrap() < 1e-9);
    }

    #[test]
    fn multi_target_run_follows_the_wider_rotation_angle() {
        let params = family_params(Family::B, 1, 16).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![1, 5, 7, 11]).unwrap();
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        // theta_k = arcsin(sqrt(4/16)) = pi/6: one iteration focuses fully
        assert!((trajectory.instants[1].target_fraction - 1.0).abs() < 1e-9);
        assert!(trajectory.max_fraction_deviation().unwrap() < 1e-9);
    }

    #[test]
    fn energy_is_conserved_across_a_whole_schedule() {
        for (family, n) in [(Family::A, 8), (Family::B, 8)] {
            let params = family_params(family, 1, n).unwrap();
            let schedule = TapSchedule::for_family(family, 6, vec![2]).unwrap();
            let (trajectory, _) =
                run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
            let e0 = trajectory.instants[0].ledger.total;
            for r in &trajectory.instants {
                assert!((r.ledger.total - e0).abs() < 1e-9 * e0);
            }
        }
    }

    #[test]
    fn numeric_backend_reproduces_the_run_within_1e6() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![2]).unwrap();
        let settings = RunSettings {
            evolution: Evolution::Numeric { step: 1e-3 },
            ..RunSettings::default()
        };
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &settings).unwrap();
        assert!((trajectory.instants[1].target_fraction - 1.0).abs() < 1e-6);
        let e0 = trajectory.instants[0].ledger.total;
        let e1 = trajectory.instants[1].ledger.total;
        assert!((e1 - e0).abs() < 1e-6 * e0);
    }

    #[test]
    fn velocity_amplitude_map_examples() {
        let state = uniform_vel_state(4);
        let amp = velocity_amplitude_map(&state).unwrap();
        for a in amp.amplitudes() {
            assert!((a - 0.5).abs() < 1e-15);
        }

        let mut basis = PhaseSpaceState::zeros(4);
        basis.vel[2] = 3.0;
        let amp = velocity_amplitude_map(&basis).unwrap();
        assert_eq!(amp.amplitudes(), &[0.0, 0.0, 1.0, 0.0]);

        let rest = PhaseSpaceState::zeros(4);
        assert_eq!(
            velocity_amplitude_map(&rest).unwrap_err(),
            Error::UndefinedState
        );
    }

    #[test]
    fn reverse_run_spreads_the_target_energy_uniformly() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![2]).unwrap();
        let (trajectory, report) =
            run_reverse(&params, &schedule, 2.0, &RunSettings::default()).unwrap();
        let last = trajectory.instants.last().unwrap();
        let register_kinetic = last.ledger.register_kinetic;
        for v in &last.register_velocities {
            let fraction = 0.5 * v * v / register_kinetic;
            assert!((fraction - 0.25).abs() < 1e-9, "fraction {fraction}");
        }
        // the target only loses energy on the way down
        assert!(report.realized_gain.unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn reverse_run_with_zero_taps_keeps_everything_in_the_target() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 0, vec![2]).unwrap();
        let (trajectory, _) = run_reverse(&params, &schedule, 2.0, &RunSettings::default()).unwrap();
        assert!((trajectory.instants[0].target_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn search_then_reverse_round_trips_to_uniform() {
        let n = 4;
        let params = family_params(Family::B, 1, n).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 1, vec![2]).unwrap();
        let (forward, _) = run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
        let state = forward.states.last().unwrap().clone();
        let (reverse, _) =
            run_search_from(&params, &schedule, state, &RunSettings::default()).unwrap();
        let last = reverse.instants.last().unwrap();
        for v in &last.register_velocities {
            let fraction = 0.5 * v * v / last.ledger.register_kinetic;
            assert!((fraction - 0.25).abs() < 1e-6);
        }
    }

    #[test]
    fn random_stop_averages_half_the_peak() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 0, vec![2]).unwrap();
        let report = random_stop_gain(&params, &schedule, 100_000, 1234).unwrap();
        assert!((report.ratio - 0.5).abs() < 0.01, "ratio {}", report.ratio);
        assert!((report.max_fraction - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_stop_on_the_whole_register_is_always_at_peak() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 0, vec![0, 1, 2, 3]).unwrap();
        let report = random_stop_gain(&params, &schedule, 1000, 7).unwrap();
        assert!((report.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_stop_is_deterministic_for_a_fixed_seed() {
        let params = family_params(Family::B, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::B, 0, vec![2]).unwrap();
        let a = random_stop_gain(&params, &schedule, 5000, 99).unwrap();
        let b = random_stop_gain(&params, &schedule, 5000, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trajectory_sample_times_are_monotone() {
        let params = family_params(Family::A, 1, 4).unwrap();
        let schedule = TapSchedule::for_family(Family::A, 3, vec![1]).unwrap();
        let settings = RunSettings {
            samples_per_interval: 7,
            ..RunSettings::default()
        };
        let (trajectory, _) = run_search(&params, &schedule, 1.0, &settings).unwrap();
        for pair in trajectory.states.windows(2) {
            assert!(pair[1].time > pair[0].time);
        }
        assert_eq!(trajectory.states.len(), 3 * 8 + 1);
    }
}
