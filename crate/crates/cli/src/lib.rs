//! The `normprod` command-line tool.

pub mod args;
pub mod io;
pub mod output;
pub mod selftest;

use std::ffi::OsString;
use std::fs;

use clap::error::ErrorKind;
use clap::Parser;
use normprod_core::{
    generate_instance, run_convergence_trace, run_phase_sweep, Axis, Error, GridSpec, SolverSuite, StreamKey,
    Termination,
};

use args::{Cli, Command, GenerateArgs, PhaseArgs, RecoverArgs, TraceArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => CliError::Usage(e.to_string()),
            Error::Dimension { .. } | Error::NonFinite { .. } => CliError::Io(e.to_string()),
            Error::Singular(_) | Error::Numerical { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Recover(a) => recover(a),
        Command::Generate(a) => generate(a),
        Command::Phase(a) => phase(a),
        Command::Trace(a) => trace(a),
        Command::Selftest => {
            let checks = selftest::run();
            print!("{}", selftest::render(&checks));
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
    }
}

fn suite(solver: &args::SolverArgs) -> Result<SolverSuite, CliError> {
    let suite = SolverSuite::default().with_overrides(&solver.overrides());
    suite.validate()?;
    Ok(suite)
}

fn recover(a: RecoverArgs) -> Result<i32, CliError> {
    let suite = suite(&a.solver)?;
    let matrix = io::read_matrix(&a.matrix)?;
    let y = io::read_vector(&a.observation)?;
    let truth = a.truth.as_deref().map(io::read_vector).transpose()?;
    let result = suite.solve(a.method, &matrix, &y, truth.as_ref())?;
    let config = output::method_config(&suite, a.method);
    let text = output::recover(a.output.format, &config, &result, a.output.timing);
    io::write(a.output.out.as_deref(), &text)?;
    if result.termination == Termination::NumericalFailure {
        eprintln!("error: {}", result.failure.as_deref().unwrap_or("numerical failure"));
        return Ok(3);
    }
    Ok(0)
}

fn generate(a: GenerateArgs) -> Result<i32, CliError> {
    let p = generate_instance(a.n, a.m, a.k, StreamKey::new(a.seed))?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    io::write(Some(&a.out_dir.join("matrix.csv")), &io::matrix_csv(&p.a))?;
    io::write(Some(&a.out_dir.join("observation.csv")), &io::vector_csv(&p.y))?;
    io::write(Some(&a.out_dir.join("truth.csv")), &io::vector_csv(&p.x0))?;
    Ok(0)
}

fn phase(a: PhaseArgs) -> Result<i32, CliError> {
    let fixed = Axis::from(a.sweep).swept();
    let (fixed_value, default_values): (usize, Vec<usize>) = match fixed {
        Axis::K => (a.k, (10..=50).step_by(5).collect()),
        Axis::M => (a.m, (1..=15).collect()),
    };
    let spec = GridSpec {
        n: a.n,
        fixed,
        fixed_value,
        sweep: if a.values.is_empty() { default_values } else { a.values },
        methods: a.method,
        trials: a.trials,
        master_seed: a.seed,
        suite: suite(&a.solver)?,
    };
    spec.validate()?;
    let workers = match a.workers {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let grid = pool.install(|| run_phase_sweep(&spec))?;
    io::write(a.output.out.as_deref(), &output::phase(a.output.format, &grid, a.output.timing))?;
    Ok(0)
}

fn trace(a: TraceArgs) -> Result<i32, CliError> {
    let suite = suite(&a.solver)?;
    let rows = run_convergence_trace(a.n, a.m, a.k, &a.method, a.seed, &suite)?;
    let ctx = output::TraceContext { seed: a.seed, n: a.n, m: a.m, k: a.k, suite: &suite, methods: &a.method };
    io::write(a.output.out.as_deref(), &output::trace(a.output.format, &ctx, &rows, a.output.timing))?;
    Ok(0)
}
