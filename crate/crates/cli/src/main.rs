//! Command-line front end for the coupled-oscillator search library.
//!
//! Runs come from a JSON config file, command-line flags, or both (flags
//! win). Every run writes CSV data plus a JSON summary echoing the full
//! configuration, and identical configurations with identical seeds yield
//! byte-identical files.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Command, FamilyArg, InitialArg, Mode, RunConfig, VariantArg};

/// Failure classes mapped to exit codes: 1 usage, 2 validation,
/// 3 numerical precondition, 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Validation(m)
            | CliError::Numerical(m)
            | CliError::Io(m) => m,
        }
    }

    /// One line, parsable: error kind=<kind> code=<n> msg="...".
    fn machine_line(&self) -> String {
        let msg = self
            .message()
            .replace('\\', "\\\\")
            .replace('"', "'")
            .replace('\n', "\\n");
        format!(
            "error kind={} code={} msg=\"{}\"",
            self.kind(),
            self.exit_code(),
            msg
        )
    }
}

impl From<wavesearch::Error> for CliError {
    fn from(e: wavesearch::Error) -> Self {
        use wavesearch::Error::*;
        match e {
            MistimedTap { .. } | UndefinedRatio | UndefinedState | DegenerateState => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "wavesearch",
    version,
    about = "Database search on coupled harmonic oscillators"
)]
struct Cli {
    /// JSON config file; explicitly passed flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: $WAVESEARCH_OUTPUT_DIR, else ".")
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<CliCommand>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Abstract amplitude search: query plan and overlap trace
    Grover(Flags),
    /// Coupled-oscillator wave search
    Wave {
        #[command(subcommand)]
        mode: WaveMode,
    },
    /// Coherent-state dynamics of the tapped oscillator
    Quantum {
        #[command(subcommand)]
        mode: QuantumMode,
    },
    /// Robustness sweeps and the rate-enhancement model
    Experiment {
        #[command(subcommand)]
        mode: ExperimentMode,
    },
}

#[derive(Subcommand, Debug)]
enum WaveMode {
    /// Tap the target every half period and watch the energy focus
    Run(Flags),
    /// Start with all energy in the target and spread it back out
    Reverse(Flags),
    /// Monte-Carlo average of the target fraction at a random stop
    RandomStop(Flags),
}

#[derive(Subcommand, Debug)]
enum QuantumMode {
    /// Free coherent-state evolution: expectation-value table
    Evolve(Flags),
    /// Tapped-state wavefunction frames over one period
    Frames(Flags),
}

#[derive(Subcommand, Debug)]
enum ExperimentMode {
    /// Gain and frequency shift across a damping grid
    Damping(Flags),
    /// Joint mass/spring scaling identity plus a seeded jitter run
    Scaling(Flags),
    /// Target-mass detuning (isotope) sweep
    Detuning(Flags),
    /// Capped Boltzmann rate-enhancement factor
    Rate(Flags),
}

/// Every tunable, mirrored one-to-one onto the config fields.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Number of register items
    #[arg(long)]
    n: Option<usize>,
    /// Tuned parameter family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Family order (mode frequencies grow with p)
    #[arg(long)]
    p: Option<u32>,
    /// Target oscillator index
    #[arg(long)]
    target: Option<usize>,
    /// Several targets, comma separated
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
    /// Tap count (default: the optimal query count for n)
    #[arg(long)]
    q: Option<usize>,
    /// Initial register velocity
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Velocity damping rate
    #[arg(long)]
    gamma: Option<f64>,
    /// Integrator step size
    #[arg(long)]
    step: Option<f64>,
    /// Force the numeric integrator even when undamped
    #[arg(long)]
    numeric: bool,
    /// Which velocities a tap flips
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Starting state kind (default: chosen by family)
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    /// Extra trajectory samples per tap interval
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed for every stochastic piece
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Re(alpha) of the coherent state
    #[arg(long, allow_negative_numbers = true)]
    alpha_re: Option<f64>,
    /// Im(alpha) of the coherent state
    #[arg(long, allow_negative_numbers = true)]
    alpha_im: Option<f64>,
    /// Oscillator frequency
    #[arg(long)]
    omega: Option<f64>,
    /// Evolution steps
    #[arg(long)]
    steps: Option<usize>,
    /// Wavefunction frames per period
    #[arg(long)]
    frames: Option<usize>,
    /// Spatial grid points (rounded up to odd so x = 0 is sampled)
    #[arg(long)]
    points: Option<usize>,
    /// Time step override
    #[arg(long)]
    dt: Option<f64>,
    /// Damping grid, comma separated
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    /// Detuning factor grid, comma separated
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<f64>>,
    /// Global mass/spring scale factor
    #[arg(long)]
    scale: Option<f64>,
    /// Half width of the per-oscillator scale jitter
    #[arg(long)]
    jitter: Option<f64>,
    /// Barrier energy
    #[arg(long)]
    barrier: Option<f64>,
    /// Thermal energy kT
    #[arg(long)]
    thermal: Option<f64>,
    /// Focused energy
    #[arg(long)]
    focused: Option<f64>,
    /// Trajectory / frames CSV file name
    #[arg(long)]
    trajectory: Option<String>,
    /// Summary JSON file name
    #[arg(long)]
    summary: Option<String>,
    /// Sweep table CSV file name
    #[arg(long)]
    table: Option<String>,
}

impl Flags {
    fn into_config(self, command: Command, mode: Option<Mode>) -> RunConfig {
        RunConfig {
            command: Some(command),
            mode,
            n: self.n,
            family: self.family,
            p: self.p,
            target: self.target,
            targets: self.targets,
            q: self.q,
            a: self.a,
            gamma: self.gamma,
            step: self.step,
            numeric: self.numeric.then_some(true),
            variant: self.variant,
            initial: self.initial,
            samples: self.samples,
            seed: self.seed,
            trials: self.trials,
            alpha_re: self.alpha_re,
            alpha_im: self.alpha_im,
            omega: self.omega,
            steps: self.steps,
            frames: self.frames,
            points: self.points,
            dt: self.dt,
            gammas: self.gammas,
            factors: self.factors,
            scale: self.scale,
            jitter: self.jitter,
            barrier: self.barrier,
            thermal: self.thermal,
            focused: self.focused,
            out_dir: None,
            trajectory: self.trajectory,
            summary: self.summary,
            table: self.table,
        }
    }
}

fn flags_config(command: Option<CliCommand>) -> RunConfig {
    match command {
        None => RunConfig::default(),
        Some(CliCommand::Grover(f)) => f.into_config(Command::Grover, None),
        Some(CliCommand::Wave { mode }) => match mode {
            WaveMode::Run(f) => f.into_config(Command::Wave, Some(Mode::Run)),
            WaveMode::Reverse(f) => f.into_config(Command::Wave, Some(Mode::Reverse)),
            WaveMode::RandomStop(f) => f.into_config(Command::Wave, Some(Mode::RandomStop)),
        },
        Some(CliCommand::Quantum { mode }) => match mode {
            QuantumMode::Evolve(f) => f.into_config(Command::Quantum, Some(Mode::Evolve)),
            QuantumMode::Frames(f) => f.into_config(Command::Quantum, Some(Mode::Frames)),
        },
        Some(CliCommand::Experiment { mode }) => match mode {
            ExperimentMode::Damping(f) => f.into_config(Command::Experiment, Some(Mode::Damping)),
            ExperimentMode::Scaling(f) => f.into_config(Command::Experiment, Some(Mode::Scaling)),
            ExperimentMode::Detuning(f) => {
                f.into_config(Command::Experiment, Some(Mode::Detuning))
            }
            ExperimentMode::Rate(f) => f.into_config(Command::Experiment, Some(Mode::Rate)),
        },
    }
}

fn real_main() -> Result<(), CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            let _ = e.print();
            std::process::exit(0);
        }
        CliError::Usage(e.to_string())
    })?;

    let file_config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let config = flags_config(cli.command).merged_over(file_config);

    let out_dir = cli
        .out_dir
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os("WAVESEARCH_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let started = Instant::now();
    let outputs = run::execute(&config, &out_dir)?;
    // timing goes to stderr, never into the files, so reruns stay byte-identical
    eprintln!(
        "completed in {:.1} ms",
        started.elapsed().as_secs_f64() * 1e3
    );
    for path in outputs {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code())
        }
    }
}
