//! Amplitude-space search on an N-item register.
//!
//! The register state is a real unit vector of N amplitudes. One search
//! iteration composes two reflections: a sign flip of the target amplitude
//! (the binary oracle) followed by a reflection in the mean. Starting from
//! the uniform state, the iteration rotates the state toward the target in
//! the plane spanned by the uniform and target directions, so the target
//! overlap after q iterations is sin^2((2q+1) theta) with
//! theta = arcsin(1/sqrt(N)).

use crate::error::{Error, Result};

/// Real amplitude register with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    amplitudes: Vec<f64>,
}

impl AmplitudeVector {
    /// Wraps a raw amplitude list. Fails on an empty list or a norm that is
    /// off unity by more than 1e-12.
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidSize { got: 0, min: 1 });
        }
        let state = Self { amplitudes };
        let err = state.norm_error();
        if err > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                value: err,
                requirement: "must have unit norm within 1e-12",
            });
        }
        Ok(state)
    }

    /// Normalizes a raw vector. Fails when the vector is empty or has zero norm.
    pub fn normalized(mut raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidSize { got: 0, min: 1 });
        }
        let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::UndefinedState);
        }
        raw.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amplitudes: raw })
    }

    pub fn n_items(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Squared amplitude of one item, i.e. the probability of finding it.
    pub fn probability(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.amplitudes[index] * self.amplitudes[index])
    }

    /// |sum a_i^2 - 1|
    pub fn norm_error(&self) -> f64 {
        (self.amplitudes.iter().map(|a| a * a).sum::<f64>() - 1.0).abs()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.amplitudes.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.amplitudes.len(),
            });
        }
        Ok(())
    }
}

/// Query budget for a register of N items.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    pub n_items: usize,
    /// Rotation half-angle per iteration, arcsin(1/sqrt(N)).
    pub theta: f64,
    /// Iteration count maximizing the target overlap.
    pub q_optimal: usize,
    /// sin^2((2 q_optimal + 1) theta)
    pub predicted_overlap: f64,
    /// True when the rotation lands exactly on the target.
    pub exact: bool,
}

/// Uniform superposition: every amplitude 1/sqrt(N).
pub fn uniform_state(n_items: usize) -> Result<AmplitudeVector> {
    if n_items == 0 {
        return Err(Error::InvalidSize { got: 0, min: 1 });
    }
    let a = 1.0 / (n_items as f64).sqrt();
    Ok(AmplitudeVector {
        amplitudes: vec![a; n_items],
    })
}

/// Binary oracle: flips the sign of the target amplitude.
pub fn reflect_target(state: &AmplitudeVector, target: usize) -> Result<AmplitudeVector> {
    reflect_targets(state, std::slice::from_ref(&target))
}

/// Oracle over a set of marked items: flips the sign of each listed amplitude.
pub fn reflect_targets(state: &AmplitudeVector, targets: &[usize]) -> Result<AmplitudeVector> {
    let mut out = state.clone();
    for &t in targets {
        out.check_index(t)?;
    }
    for &t in targets {
        out.amplitudes[t] = -out.amplitudes[t];
    }
    Ok(out)
}

/// Inverted oracle: flips the sign of every amplitude NOT in `targets`.
/// Equal to the plain oracle times a global sign flip.
pub fn reflect_complement(state: &AmplitudeVector, targets: &[usize]) -> Result<AmplitudeVector> {
    let mut out = state.clone();
    for &t in targets {
        out.check_index(t)?;
    }
    for a in out.amplitudes.iter_mut() {
        *a = -*a;
    }
    for &t in targets {
        out.amplitudes[t] = -out.amplitudes[t];
    }
    Ok(out)
}

/// Reflection in the mean: a_i -> 2*mean - a_i. Leaves the uniform state fixed.
pub fn reflect_mean(state: &AmplitudeVector) -> AmplitudeVector {
    let n = state.amplitudes.len() as f64;
    let mean = state.amplitudes.iter().sum::<f64>() / n;
    AmplitudeVector {
        amplitudes: state.amplitudes.iter().map(|a| 2.0 * mean - a).collect(),
    }
}

/// Negated reflection in the mean: a_i -> a_i - 2*mean.
pub fn neg_reflect_mean(state: &AmplitudeVector) -> AmplitudeVector {
    let n = state.amplitudes.len() as f64;
    let mean = state.amplitudes.iter().sum::<f64>() / n;
    AmplitudeVector {
        amplitudes: state.amplitudes.iter().map(|a| a - 2.0 * mean).collect(),
    }
}

/// Runs `count` search iterations from the uniform state and records the
/// target probability before the first and after every iteration
/// (count + 1 entries).
pub fn grover_iterate(
    n_items: usize,
    target: usize,
    count: usize,
) -> Result<(AmplitudeVector, Vec<f64>)> {
    let mut state = uniform_state(n_items)?;
    state.check_index(target)?;
    let mut overlaps = Vec::with_capacity(count + 1);
    overlaps.push(state.probability(target)?);
    for _ in 0..count {
        state = reflect_target(&state, target)?;
        state = reflect_mean(&state);
        overlaps.push(state.probability(target)?);
    }
    Ok((state, overlaps))
}

/// Rotation half-angle for `marked` items out of `n_items`.
pub fn rotation_angle(marked: usize, n_items: usize) -> Result<f64> {
    if n_items == 0 {
        return Err(Error::InvalidSize { got: 0, min: 1 });
    }
    if marked == 0 || marked > n_items {
        return Err(Error::IndexOutOfRange {
            index: marked,
            len: n_items,
        });
    }
    Ok((marked as f64 / n_items as f64).sqrt().asin())
}

/// Closed-form target probability after q iterations.
pub fn predicted_overlap(theta: f64, q: usize) -> f64 {
    let s = ((2 * q + 1) as f64 * theta).sin();
    s * s
}

/// Picks the integer iteration count maximizing the target overlap.
///
/// The continuous optimum is q* = (pi/(2 theta) - 1)/2; of its two integer
/// neighbours the one with the larger overlap wins, ties going to the
/// smaller count (fewer oracle calls).
pub fn optimal_queries(n_items: usize) -> Result<QueryPlan> {
    let theta = rotation_angle(1, n_items)?;
    let q_real = (std::f64::consts::FRAC_PI_2 / theta - 1.0) / 2.0;
    let lo = q_real.floor().max(0.0) as usize;
    let hi = q_real.ceil().max(0.0) as usize;
    let (o_lo, o_hi) = (predicted_overlap(theta, lo), predicted_overlap(theta, hi));
    let q_optimal = if o_lo + 1e-12 >= o_hi { lo } else { hi };
    let predicted = predicted_overlap(theta, q_optimal);
    let exact =
        ((2 * q_optimal + 1) as f64 * theta - std::f64::consts::FRAC_PI_2).abs() <= 1e-12;
    Ok(QueryPlan {
        n_items,
        theta,
        q_optimal,
        predicted_overlap: predicted,
        exact,
    })
}

/// Expected query count of the classical probe strategies: N probes without
/// memory, (N+1)/2 when rejected items are never probed again.
pub fn classical_baseline(n_items: usize, with_memory: bool) -> Result<f64> {
    if n_items == 0 {
        return Err(Error::InvalidSize { got: 0, min: 1 });
    }
    let n = n_items as f64;
    Ok(if with_memory { (n + 1.0) / 2.0 } else { n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_state(rng: &mut StdRng, n: usize) -> AmplitudeVector {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        AmplitudeVector::normalized(raw).unwrap()
    }

    #[test]
    fn uniform_state_examples() {
        let s = uniform_state(4).unwrap();
        assert_eq!(s.amplitudes(), &[0.5, 0.5, 0.5, 0.5]);
        let s = uniform_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[1.0]);
        let s = uniform_state(10).unwrap();
        assert!(s.norm_error() < 1e-12);
    }

    #[test]
    fn uniform_state_rejects_empty_register() {
        assert_eq!(
            uniform_state(0).unwrap_err(),
            Error::InvalidSize { got: 0, min: 1 }
        );
    }

    #[test]
    fn reflect_target_examples() {
        let s = uniform_state(4).unwrap();
        let r = reflect_target(&s, 2).unwrap();
        assert_eq!(r.amplitudes(), &[0.5, 0.5, -0.5, 0.5]);

        // involution
        let rr = reflect_target(&r, 2).unwrap();
        assert_eq!(rr.amplitudes(), s.amplitudes());

        // basis vector at the target is negated
        let basis = AmplitudeVector::new(vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let nb = reflect_target(&basis, 2).unwrap();
        assert_eq!(nb.amplitudes(), &[0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn reflect_target_rejects_bad_index() {
        let s = uniform_state(4).unwrap();
        assert_eq!(
            reflect_target(&s, 4).unwrap_err(),
            Error::IndexOutOfRange { index: 4, len: 4 }
        );
    }

    #[test]
    fn reflect_mean_examples() {
        let s = AmplitudeVector::new(vec![0.5, 0.5, -0.5, 0.5]).unwrap();
        let r = reflect_mean(&s);
        for (a, want) in r.amplitudes().iter().zip([0.0, 0.0, 1.0, 0.0]) {
            assert!((a - want).abs() < 1e-15, "got {a}, want {want}");
        }

        // uniform state is a fixed point
        let u = uniform_state(8).unwrap();
        let ru = reflect_mean(&u);
        for (a, b) in ru.amplitudes().iter().zip(u.amplitudes()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reflections_are_involutions_on_random_states() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(1..64);
            let s = random_state(&mut rng, n);
            let t = rng.random_range(0..n);

            let back = reflect_target(&reflect_target(&s, t).unwrap(), t).unwrap();
            for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
                assert!((a - b).abs() < 1e-14);
            }

            let back = reflect_mean(&reflect_mean(&s));
            for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
                assert!((a - b).abs() < 1e-14);
            }
            assert!(back.norm_error() < 1e-12);
        }
    }

    #[test]
    fn complement_oracle_is_global_flip_times_plain_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(2..32);
            let s = random_state(&mut rng, n);
            let t = rng.random_range(0..n);
            let plain = reflect_target(&s, t).unwrap();
            let comp = reflect_complement(&s, &[t]).unwrap();
            for (a, b) in comp.amplitudes().iter().zip(plain.amplitudes()) {
                assert!((a + b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grover_iterate_examples() {
        // N=4 reaches the target exactly in one iteration
        let (state, overlaps) = grover_iterate(4, 2, 1).unwrap();
        assert!((overlaps[0] - 0.25).abs() < 1e-15);
        assert!((overlaps[1] - 1.0).abs() < 1e-12);
        assert!((state.probability(2).unwrap() - 1.0).abs() < 1e-12);

        // q = 0 keeps the starting overlap 1/N
        let (_, overlaps) = grover_iterate(37, 5, 0).unwrap();
        assert!((overlaps[0] - 1.0 / 37.0).abs() < 1e-15);

        // N=100, q=7: frozen from sin^2(15 asin(0.1))
        let (_, overlaps) = grover_iterate(100, 42, 7).unwrap();
        assert!((overlaps[7] - 0.9953444003575992).abs() < 1e-10);
    }

    #[test]
    fn iteration_stays_in_the_two_dimensional_plane() {
        // all non-target amplitudes stay mutually equal
        for n in [2usize, 5, 16, 97] {
            let (state, _) = grover_iterate(n, n / 2, 9).unwrap();
            let reference = state
                .amplitudes()
                .iter()
                .enumerate()
                .find(|(i, _)| *i != n / 2)
                .map(|(_, a)| *a);
            if let Some(r) = reference {
                for (i, a) in state.amplitudes().iter().enumerate() {
                    if i != n / 2 {
                        assert!((a - r).abs() < 1e-12, "N={n}: off-target amplitudes differ");
                    }
                }
            }
            assert!(state.norm_error() < 1e-12);
        }
    }

    #[test]
    fn overlap_trace_matches_closed_form() {
        for n in [2usize, 4, 16, 100, 1024] {
            let theta = rotation_angle(1, n).unwrap();
            let q_star = (std::f64::consts::FRAC_PI_2 / theta - 1.0) / 2.0;
            let q_max = (2.0 * q_star).ceil() as usize;
            let (_, overlaps) = grover_iterate(n, 0, q_max).unwrap();
            for (q, got) in overlaps.iter().enumerate() {
                let want = predicted_overlap(theta, q);
                assert!(
                    (got - want).abs() < 1e-10,
                    "N={n} q={q}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn optimal_queries_examples() {
        let plan = optimal_queries(1).unwrap();
        assert_eq!(plan.q_optimal, 0);
        assert!((plan.predicted_overlap - 1.0).abs() < 1e-12);
        assert!(plan.exact);

        let plan = optimal_queries(4).unwrap();
        assert_eq!(plan.q_optimal, 1);
        assert!((plan.predicted_overlap - 1.0).abs() < 1e-12);
        assert!(plan.exact);

        let plan = optimal_queries(100).unwrap();
        assert_eq!(plan.q_optimal, 7);
        assert!((plan.predicted_overlap - 0.9953444003575992).abs() < 1e-12);
        assert!(!plan.exact);
    }

    #[test]
    fn optimal_queries_breaks_ties_toward_fewer_oracle_calls() {
        // N=2: q=0 and q=1 both give overlap 1/2
        let plan = optimal_queries(2).unwrap();
        assert_eq!(plan.q_optimal, 0);
        assert!((plan.predicted_overlap - 0.5).abs() < 1e-12);
        assert!(!plan.exact);
    }

    #[test]
    fn optimal_queries_beats_both_neighbours() {
        for n in 1..=512usize {
            let plan = optimal_queries(n).unwrap();
            let q = plan.q_optimal;
            if q > 0 {
                assert!(plan.predicted_overlap + 1e-12 >= predicted_overlap(plan.theta, q - 1));
            }
            assert!(plan.predicted_overlap + 1e-12 >= predicted_overlap(plan.theta, q + 1));
            if plan.exact {
                assert!((plan.predicted_overlap - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_baseline_examples() {
        assert_eq!(classical_baseline(100, false).unwrap(), 100.0);
        assert_eq!(classical_baseline(100, true).unwrap(), 50.5);
        assert_eq!(classical_baseline(1, false).unwrap(), 1.0);
        assert_eq!(classical_baseline(1, true).unwrap(), 1.0);
        assert!(classical_baseline(0, false).is_err());
    }
}
