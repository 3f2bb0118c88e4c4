//! Cross-checks between the three representations and the two evolution
//! routes: the closed-form propagator against the symplectic integrator,
//! and the wave runs against the abstract amplitude iteration.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wavesearch::engine::{
    evolve_exact, evolve_numeric, run_search, run_search_from, velocity_amplitude_map, Evolution,
    RunSettings, TapSchedule,
};
use wavesearch::oscillator::{
    family_params, from_modes, max_gain, to_modes, Family, OscillatorParams, PhaseSpaceState,
};
use wavesearch::search::grover_iterate;

const PI: f64 = std::f64::consts::PI;

fn max_coordinate_diff(a: &PhaseSpaceState, b: &PhaseSpaceState) -> f64 {
    let mut d: f64 = (a.big_pos - b.big_pos)
        .abs()
        .max((a.big_vel - b.big_vel).abs());
    for i in 0..a.n_items() {
        d = d.max((a.pos[i] - b.pos[i]).abs());
        d = d.max((a.vel[i] - b.vel[i]).abs());
    }
    d
}

#[test]
fn wave_amplitudes_track_the_abstract_iteration_for_both_families() {
    for family in [Family::A, Family::B] {
        for n in [2usize, 4, 8, 16] {
            let params = family_params(family, 1, n).unwrap();
            let target = n / 2;
            let q = 2 * n.isqrt() + 3;
            let schedule = TapSchedule::for_family(family, q, vec![target]).unwrap();
            let (trajectory, _) =
                run_search(&params, &schedule, 1.0, &RunSettings::default()).unwrap();
            let (_, overlaps) = grover_iterate(n, target, q).unwrap();

            for (record, overlap) in trajectory.instants.iter().zip(&overlaps) {
                // state-level comparison, up to one global sign per instant
                let wave = velocity_amplitude_map(&PhaseSpaceState::new(
                    record.time,
                    0.0,
                    0.0,
                    vec![0.0; n],
                    record.register_velocities.clone(),
                ).unwrap())
                .unwrap();
                let (mut fwd, mut rev): (f64, f64) = (0.0, 0.0);
                let (abstract_state, _) = grover_iterate(n, target, record.index).unwrap();
                for (a, b) in wave.amplitudes().iter().zip(abstract_state.amplitudes()) {
                    fwd = fwd.max((a - b).abs());
                    rev = rev.max((a + b).abs());
                }
                assert!(
                    fwd.min(rev) < 1e-6,
                    "{family:?} N={n} q={}: state deviation {}",
                    record.index,
                    fwd.min(rev)
                );
                assert!(
                    (record.target_fraction - overlap).abs() < 1e-6,
                    "{family:?} N={n} q={}: fraction {} vs overlap {}",
                    record.index,
                    record.target_fraction,
                    overlap
                );
            }
        }
    }
}

#[test]
fn exact_and_numeric_evolutions_agree_on_random_systems() {
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..8 {
        let n = rng.random_range(2..10);
        let params = OscillatorParams::new(
            n,
            rng.random_range(0.3..5.0),
            if rng.random_range(0..3) == 0 {
                0.0
            } else {
                rng.random_range(0.0..3.0)
            },
        )
        .unwrap();
        let state = PhaseSpaceState::new(
            0.0,
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let dt = rng.random_range(0.5..4.0 * PI);
        let exact = evolve_exact(&state, &params, dt).unwrap();
        let numeric = evolve_numeric(&state, &params, dt, 1e-3).unwrap();
        let diff = max_coordinate_diff(&exact, &numeric);
        assert!(diff < 1e-6, "N={n} dt={dt}: exact vs numeric diff {diff}");
    }
}

#[test]
fn decoupled_residuals_never_touch_the_coupled_modes() {
    let mut rng = StdRng::seed_from_u64(4096);
    for case in 0..25 {
        let n = rng.random_range(3..12);
        let family = if rng.random_range(0..2) == 0 {
            Family::A
        } else {
            Family::B
        };
        let params = family_params(family, 1, n).unwrap();
        let target = rng.random_range(0..n);

        // random register velocities; the target keeps a clearly nonzero one
        let mut state = PhaseSpaceState::zeros(n);
        for v in state.vel.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        state.vel[target] = rng.random_range(0.2..1.0) * if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
        state.big_vel = rng.random_range(-1.0..1.0);

        // same coupled-mode content with the residual spread flattened out
        let mut modes = to_modes(&state, &params, target).unwrap();
        let even = -modes.rel_target / (n as f64 - 1.0);
        let even_vel = -modes.rel_target_vel / (n as f64 - 1.0);
        modes.residuals.iter_mut().for_each(|r| *r = even);
        modes.residual_vels.iter_mut().for_each(|r| *r = even_vel);
        let flattened = from_modes(&modes, &params);

        let schedule = TapSchedule::for_family(family, 6, vec![target]).unwrap();
        let settings = RunSettings::default();
        let (with_residuals, report) =
            run_search_from(&params, &schedule, state.clone(), &settings).unwrap();
        let (without_residuals, _) =
            run_search_from(&params, &schedule, flattened, &settings).unwrap();

        for (a, b) in with_residuals
            .instants
            .iter()
            .zip(&without_residuals.instants)
        {
            let dev = (a.register_velocities[target] - b.register_velocities[target])
                .abs()
                .max({
                    let mean_a: f64 =
                        a.register_velocities.iter().sum::<f64>() / n as f64;
                    let mean_b: f64 =
                        b.register_velocities.iter().sum::<f64>() / n as f64;
                    (mean_a - mean_b).abs()
                });
            assert!(
                dev < 1e-9,
                "case {case}: coupled modes drifted by {dev} at q={}",
                a.index
            );
        }

        // the focusing bound holds with residuals present
        let bound = max_gain(&state, target).unwrap();
        let realized = report.realized_gain.unwrap();
        assert!(
            realized <= bound + 1e-9,
            "case {case}: realized {realized} above bound {bound}"
        );
    }
}

#[test]
fn big_oscillator_trajectory_is_residual_blind() {
    // compare X and Xdot between runs with and without residuals
    let n = 6;
    let params = family_params(Family::B, 1, n).unwrap();
    let target = 1;

    let mut state = PhaseSpaceState::zeros(n);
    state.vel = vec![0.9, 0.4, -0.3, 0.8, 0.1, -0.7];
    let mut modes = to_modes(&state, &params, target).unwrap();
    let even = -modes.rel_target_vel / (n as f64 - 1.0);
    modes.residual_vels.iter_mut().for_each(|r| *r = even);
    modes.residuals.iter_mut().for_each(|r| *r = 0.0);
    let flattened = from_modes(&modes, &params);

    let schedule = TapSchedule::for_family(Family::B, 4, vec![target]).unwrap();
    let settings = RunSettings {
        samples_per_interval: 16,
        ..RunSettings::default()
    };
    let (a, _) = run_search_from(&params, &schedule, state, &settings).unwrap();
    let (b, _) = run_search_from(&params, &schedule, flattened, &settings).unwrap();
    for (sa, sb) in a.states.iter().zip(&b.states) {
        assert!((sa.big_pos - sb.big_pos).abs() < 1e-9);
        assert!((sa.big_vel - sb.big_vel).abs() < 1e-9);
        assert!((sa.mean_pos() - sb.mean_pos()).abs() < 1e-9);
        assert!((sa.pos[target] - sb.pos[target]).abs() < 1e-9);
        assert!((sa.vel[target] - sb.vel[target]).abs() < 1e-9);
    }
}

#[test]
fn numeric_search_reproduces_the_exact_fractions_at_n16() {
    let params = family_params(Family::B, 1, 16).unwrap();
    let schedule = TapSchedule::for_family(Family::B, 3, vec![5]).unwrap();
    let exact = run_search(&params, &schedule, 1.0, &RunSettings::default())
        .unwrap()
        .0;
    let numeric = run_search(
        &params,
        &schedule,
        1.0,
        &RunSettings {
            evolution: Evolution::Numeric { step: 1e-3 },
            ..RunSettings::default()
        },
    )
    .unwrap()
    .0;
    for (a, b) in exact.instants.iter().zip(&numeric.instants) {
        assert!(
            (a.target_fraction - b.target_fraction).abs() < 1e-6,
            "q={}: {} vs {}",
            a.index,
            a.target_fraction,
            b.target_fraction
        );
    }
}
