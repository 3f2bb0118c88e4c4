//! Command dispatch: validated config in, output files out.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;

use wavesearch::engine::{
    random_stop_gain, run_reverse, run_search, run_search_from, Evolution, RunSettings,
    TapSchedule, TapTolerance, TapVariant, Trajectory,
};
use wavesearch::experiments::{
    damping_sweep, detuning_sweep, rate_enhancement, scaling_check, BaseConfig, RateInputs,
};
use wavesearch::oscillator::{
    family_params, initial_conditions, GainReport, InitialKind, OscillatorParams,
};
use wavesearch::quantum::{
    evolve_coherent, expectations, tapped_state, tapped_wavefunction_at, CoherentState,
};
use wavesearch::search::{classical_baseline, grover_iterate, optimal_queries};

use crate::config::{Command, InitialArg, Mode, RunConfig, VariantArg};
use crate::output::{fmt_float, summary_json, trajectory_table, write_text, Table};
use crate::CliError;

pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    match config.command()? {
        Command::Grover => run_grover(config, out_dir),
        Command::Wave => match config.mode.unwrap_or(Mode::Run) {
            Mode::Run => run_wave(config, out_dir),
            Mode::Reverse => run_wave_reverse(config, out_dir),
            Mode::RandomStop => run_random_stop(config, out_dir),
            other => Err(CliError::Validation(format!(
                "mode {other:?} does not belong to the wave command"
            ))),
        },
        Command::Quantum => match config.mode.unwrap_or(Mode::Frames) {
            Mode::Evolve => run_quantum_evolve(config, out_dir),
            Mode::Frames => run_quantum_frames(config, out_dir),
            other => Err(CliError::Validation(format!(
                "mode {other:?} does not belong to the quantum command"
            ))),
        },
        Command::Experiment => match config.mode.unwrap_or(Mode::Damping) {
            Mode::Damping => run_experiment_damping(config, out_dir),
            Mode::Scaling => run_experiment_scaling(config, out_dir),
            Mode::Detuning => run_experiment_detuning(config, out_dir),
            Mode::Rate => run_experiment_rate(config, out_dir),
            other => Err(CliError::Validation(format!(
                "mode {other:?} does not belong to the experiment command"
            ))),
        },
    }
}

fn write_summary(
    config: &RunConfig,
    out_dir: &Path,
    default_name: &str,
    outputs: &mut Vec<PathBuf>,
    results: serde_json::Value,
) -> Result<(), CliError> {
    let name = config.summary.as_deref().unwrap_or(default_name);
    let path = out_dir.join(name);
    let text = summary_json(config, outputs, results)?;
    write_text(&path, &text)?;
    outputs.push(path);
    Ok(())
}

// -- grover -------------------------------------------------------------

fn run_grover(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let n = config.require_n(1)?;
    let target = config.target.unwrap_or(0);
    if target >= n {
        return Err(CliError::Validation(format!(
            "field `target` = {target} out of range: must be below n = {n}"
        )));
    }
    let plan = optimal_queries(n)?;
    let q = config.q.unwrap_or(plan.q_optimal);
    let (state, overlaps) = grover_iterate(n, target, q)?;

    let mut table = Table::new(vec!["q", "overlap"]);
    for (i, overlap) in overlaps.iter().enumerate() {
        table.push_row(vec![i.to_string(), fmt_float(*overlap)]);
    }
    let trace_path = out_dir.join(config.trajectory.as_deref().unwrap_or("grover_trace.csv"));
    table.write(&trace_path)?;

    let mut outputs = vec![trace_path];
    let results = json!({
        "n": n,
        "theta": plan.theta,
        "q_optimal": plan.q_optimal,
        "predicted_overlap": plan.predicted_overlap,
        "exact": plan.exact,
        "q_run": q,
        "final_overlap": overlaps.last(),
        "final_norm_error": state.norm_error(),
        "classical_memoryless": classical_baseline(n, false)?,
        "classical_with_memory": classical_baseline(n, true)?,
    });
    write_summary(config, out_dir, "grover_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

// -- wave ---------------------------------------------------------------

struct WaveSetup {
    params: OscillatorParams,
    schedule: TapSchedule,
    settings: RunSettings,
}

fn wave_setup(config: &RunConfig) -> Result<WaveSetup, CliError> {
    let n = config.require_n(2)?;
    let targets = config.require_targets(n)?;
    let family = config.family();
    let gamma = config.check_non_negative("gamma", config.gamma())?;
    let params = family_params(family, config.p(), n)?.with_damping(gamma)?;
    let plan = optimal_queries(n)?;
    let count = config.q.unwrap_or(plan.q_optimal);
    let variant = match config.variant.unwrap_or(VariantArg::Standard) {
        VariantArg::Standard => TapVariant::Standard,
        VariantArg::Complement => TapVariant::Complement,
    };
    let schedule = TapSchedule::new(family.tap_interval(), count, targets, variant)?;
    let step = config.check_positive("step", config.step())?;
    let evolution = if gamma > 0.0 || config.numeric.unwrap_or(false) {
        Evolution::Numeric { step }
    } else {
        Evolution::Exact
    };
    Ok(WaveSetup {
        params,
        schedule,
        settings: RunSettings {
            evolution,
            samples_per_interval: config.samples(),
            tap_tolerance: TapTolerance::Auto,
        },
    })
}

fn gain_results(trajectory: &Trajectory, report: &GainReport) -> serde_json::Value {
    let last = trajectory.instants.last();
    json!({
        "tap_instants": trajectory.instants.len(),
        "final_target_fraction": last.map(|r| r.target_fraction),
        "predicted_final_fraction": last.and_then(|r| r.predicted_fraction),
        "max_fraction_deviation": trajectory.max_fraction_deviation(),
        "max_gain": report.max_gain,
        "realized_gain": report.realized_gain,
        "stop_time": report.stop_time,
        "initial_target_energy": report.initial_target_energy,
        "peak_target_energy": report.peak_target_energy,
        "total_energy_initial": trajectory.instants.first().map(|r| r.ledger.total),
        "total_energy_final": last.map(|r| r.ledger.total),
    })
}

fn run_wave(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let setup = wave_setup(config)?;
    let (trajectory, report) = match config.initial {
        None => run_search(
            &setup.params,
            &setup.schedule,
            config.amplitude(),
            &setup.settings,
        )?,
        Some(kind) => {
            let kind = match kind {
                InitialArg::Uniform => InitialKind::Uniform,
                InitialArg::TranslationFree => InitialKind::TranslationFree,
            };
            let state0 = initial_conditions(kind, config.amplitude(), &setup.params)?;
            run_search_from(&setup.params, &setup.schedule, state0, &setup.settings)?
        }
    };

    let table = trajectory_table(&trajectory, &setup.params, &setup.schedule.targets);
    let path = out_dir.join(
        config
            .trajectory
            .as_deref()
            .unwrap_or("wave_trajectory.csv"),
    );
    table.write(&path)?;
    let mut outputs = vec![path];
    write_summary(
        config,
        out_dir,
        "wave_summary.json",
        &mut outputs,
        gain_results(&trajectory, &report),
    )?;
    Ok(outputs)
}

fn run_wave_reverse(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let setup = wave_setup(config)?;
    let (trajectory, report) = run_reverse(
        &setup.params,
        &setup.schedule,
        config.amplitude(),
        &setup.settings,
    )?;

    let table = trajectory_table(&trajectory, &setup.params, &setup.schedule.targets);
    let path = out_dir.join(
        config
            .trajectory
            .as_deref()
            .unwrap_or("reverse_trajectory.csv"),
    );
    table.write(&path)?;

    // how uniformly the energy spread out
    let n = setup.params.n_items() as f64;
    let spread_error = trajectory.instants.last().map(|r| {
        let kinetic = r.ledger.register_kinetic;
        r.register_velocities
            .iter()
            .map(|v| (0.5 * v * v / kinetic - 1.0 / n).abs())
            .fold(0.0f64, f64::max)
    });
    let mut results = gain_results(&trajectory, &report);
    results["uniform_spread_error"] = json!(spread_error);

    let mut outputs = vec![path];
    write_summary(config, out_dir, "reverse_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

fn run_random_stop(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let setup = wave_setup(config)?;
    // q = 0 (the default) lets the engine size the stopping grid itself
    let schedule = TapSchedule {
        count: config.q.unwrap_or(0),
        ..setup.schedule
    };
    let report = random_stop_gain(&setup.params, &schedule, config.trials(), config.seed())?;
    let results = json!({
        "mean_fraction": report.mean_fraction,
        "max_fraction": report.max_fraction,
        "ratio": report.ratio,
        "trials": report.trials,
        "grid_len": report.grid_len,
    });
    let mut outputs = Vec::new();
    write_summary(
        config,
        out_dir,
        "random_stop_summary.json",
        &mut outputs,
        results,
    )?;
    Ok(outputs)
}

// -- quantum ------------------------------------------------------------

fn quantum_state(config: &RunConfig) -> Result<CoherentState, CliError> {
    let re = config.alpha_re.ok_or_else(|| {
        CliError::Validation("missing required field `alpha_re`".into())
    })?;
    let im = config.alpha_im.unwrap_or(0.0);
    let omega = config.check_positive("omega", config.omega.unwrap_or(1.0))?;
    Ok(CoherentState::new(Complex64::new(re, im), omega)?)
}

fn run_quantum_evolve(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let state0 = quantum_state(config)?;
    let steps = config.steps.unwrap_or(256).max(1);
    let period = 2.0 * std::f64::consts::PI / state0.omega;
    let dt = match config.dt {
        Some(dt) => config.check_positive("dt", dt)?,
        None => period / steps as f64,
    };

    let mut table = Table::new(vec![
        "t", "alpha_re", "alpha_im", "x_mean", "p_mean", "x_spread", "p_spread", "energy",
        "global_phase",
    ]);
    let mut state = state0;
    for i in 0..=steps {
        let e = expectations(&state);
        table.push_row(vec![
            fmt_float(i as f64 * dt),
            fmt_float(state.alpha.re),
            fmt_float(state.alpha.im),
            fmt_float(e.pos),
            fmt_float(e.mom),
            fmt_float(e.pos_spread),
            fmt_float(e.mom_spread),
            fmt_float(e.energy),
            fmt_float(state.global_phase),
        ]);
        state = evolve_coherent(&state, dt);
    }
    let path = out_dir.join(
        config
            .trajectory
            .as_deref()
            .unwrap_or("quantum_expectations.csv"),
    );
    table.write(&path)?;

    let (e0, e1) = (expectations(&state0), expectations(&state));
    let results = json!({
        "steps": steps,
        "dt": dt,
        "initial": { "x": e0.pos, "p": e0.mom, "energy": e0.energy },
        "final": { "x": e1.pos, "p": e1.mom, "energy": e1.energy },
        "energy_drift": (e1.energy - e0.energy).abs(),
        "alpha_modulus_drift": (state.alpha.norm() - state0.alpha.norm()).abs(),
    });
    let mut outputs = vec![path];
    write_summary(config, out_dir, "quantum_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

fn run_quantum_frames(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let state0 = quantum_state(config)?;
    let tapped0 = tapped_state(&state0)?;
    let frames = config.frames.unwrap_or(64).max(1);
    let points = config.points.unwrap_or(201) | 1; // odd, so x = 0 is on the grid
    let period = 2.0 * std::f64::consts::PI / state0.omega;
    let dt = period / frames as f64;

    let e = expectations(&state0);
    let half_range = e.pos.abs() + 10.0 * e.pos_spread;
    let mid = points / 2;
    let h = half_range / mid as f64;
    // symmetric grid with an exact zero in the middle
    let xs: Vec<f64> = (0..points)
        .map(|i| (i as isize - mid as isize) as f64 * h)
        .collect();

    let mut table = Table::new(vec!["frame", "t", "x", "psi_re", "psi_im", "psi_abs2"]);
    let mut tapped = tapped0;
    let mut max_node_violation = 0.0f64;
    for frame in 0..=frames {
        let t = frame as f64 * dt;
        for &x in &xs {
            let psi = tapped_wavefunction_at(&tapped, x);
            if x == 0.0 {
                max_node_violation = max_node_violation.max(psi.norm());
            }
            table.push_row(vec![
                frame.to_string(),
                fmt_float(t),
                fmt_float(x),
                fmt_float(psi.re),
                fmt_float(psi.im),
                fmt_float(psi.norm_sqr()),
            ]);
        }
        tapped = tapped.evolve(dt);
    }
    let path = out_dir.join(config.trajectory.as_deref().unwrap_or("quantum_frames.csv"));
    table.write(&path)?;

    let results = json!({
        "frames": frames,
        "points": points,
        "normalization": tapped0.normalization,
        "x_range": half_range,
        "max_node_violation": max_node_violation,
    });
    let mut outputs = vec![path];
    write_summary(config, out_dir, "quantum_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

// -- experiment -----------------------------------------------------------

fn experiment_base(config: &RunConfig) -> Result<BaseConfig, CliError> {
    let n = match config.n {
        Some(n) if n >= 2 => n,
        Some(n) => {
            return Err(CliError::Validation(format!(
                "field `n` = {n} out of range: must be at least 2"
            )))
        }
        None => 4,
    };
    let target = config.target.unwrap_or(n / 2);
    if target >= n {
        return Err(CliError::Validation(format!(
            "field `target` = {target} out of range: must be below n = {n}"
        )));
    }
    Ok(BaseConfig {
        n_items: n,
        family: config.family(),
        p: config.p(),
        target,
        taps: config.q.unwrap_or(1),
        amplitude: config.amplitude(),
        step: config.check_positive("step", config.step())?,
        seed: config.seed(),
    })
}

fn run_experiment_damping(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let base = experiment_base(config)?;
    let default_grid = vec![0.0, 1e-3, 5e-3, 1e-2, 2e-2];
    let gammas = config.gammas.clone().unwrap_or(default_grid);
    for &g in &gammas {
        config.check_non_negative("gammas", g)?;
    }
    let table_rows = damping_sweep(&gammas, &base)?;

    let mut table = Table::new(vec!["gamma", "realized_gain", "frequency_shift"]);
    for row in &table_rows {
        table.push_row(vec![
            fmt_float(row.damping),
            fmt_float(row.realized_gain),
            fmt_float(row.frequency_shift),
        ]);
    }
    let path = out_dir.join(config.table.as_deref().unwrap_or("damping.csv"));
    table.write(&path)?;

    let results = json!({
        "points": table_rows.len(),
        "gain_undamped": table_rows.first().map(|r| r.realized_gain),
        "gain_last": table_rows.last().map(|r| r.realized_gain),
    });
    let mut outputs = vec![path];
    write_summary(config, out_dir, "experiment_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

fn run_experiment_scaling(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let base = experiment_base(config)?;
    let scale = config.check_positive("scale", config.scale.unwrap_or(2.0))?;
    let jitter = config.check_non_negative("jitter", config.jitter.unwrap_or(0.1))?;
    let report = scaling_check(scale, jitter, &base)?;

    let mut table = Table::new(vec!["oscillator", "scale_factor", "final_kinetic_energy"]);
    for (i, (s, e)) in report
        .per_oscillator_scales
        .iter()
        .zip(&report.per_oscillator_energy)
        .enumerate()
    {
        table.push_row(vec![i.to_string(), fmt_float(*s), fmt_float(*e)]);
    }
    let path = out_dir.join(config.table.as_deref().unwrap_or("scaling.csv"));
    table.write(&path)?;

    let results = json!({
        "scale": report.scale,
        "max_trajectory_deviation": report.max_trajectory_deviation,
        "max_energy_index": report.max_energy_index,
        "target": report.target,
        "target_has_max_energy": report.max_energy_index == report.target,
    });
    let mut outputs = vec![path];
    write_summary(config, out_dir, "experiment_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

fn run_experiment_detuning(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let base = experiment_base(config)?;
    let default_grid = vec![1.0, 1.05, 1.1, 1.25, 1.5, 2.0, 4.0];
    let factors = config.factors.clone().unwrap_or(default_grid);
    for &f in &factors {
        config.check_positive("factors", f)?;
    }
    let rows = detuning_sweep(&factors, &base)?;

    let mut table = Table::new(vec!["factor", "gain_fraction"]);
    for row in &rows {
        table.push_row(vec![fmt_float(row.factor), fmt_float(row.gain_fraction)]);
    }
    let path = out_dir.join(config.table.as_deref().unwrap_or("detuning.csv"));
    table.write(&path)?;

    let results = json!({
        "points": rows.len(),
        "baseline_fraction": rows.first().map(|r| r.gain_fraction),
        "last_fraction": rows.last().map(|r| r.gain_fraction),
    });
    let mut outputs = vec![path];
    write_summary(config, out_dir, "experiment_summary.json", &mut outputs, results)?;
    Ok(outputs)
}

fn run_experiment_rate(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let barrier = config
        .barrier
        .ok_or_else(|| CliError::Validation("missing required field `barrier`".into()))?;
    let thermal = config
        .thermal
        .ok_or_else(|| CliError::Validation("missing required field `thermal`".into()))?;
    let focused = config.focused.unwrap_or(0.0);
    let inputs = RateInputs::new(barrier, thermal, focused)?;
    let results = json!({
        "barrier_energy": inputs.barrier_energy,
        "thermal_energy": inputs.thermal_energy,
        "focused_energy": inputs.focused_energy,
        "enhancement": rate_enhancement(&inputs),
    });
    let mut outputs = Vec::new();
    write_summary(config, out_dir, "experiment_summary.json", &mut outputs, results)?;
    Ok(outputs)
}
