use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{db_from_relative, generate_instance, is_success, relative_error, Method, ProblemInstance, SolverSuite};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::recovery::Termination;
use crate::rng::StreamKey;

/// The dimension held fixed by a sweep; the other one is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    M,
    K,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::M => "m",
            Axis::K => "k",
        }
    }

    pub fn swept(&self) -> Axis {
        match self {
            Axis::M => Axis::K,
            Axis::K => Axis::M,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub fixed: Axis,
    pub fixed_value: usize,
    pub sweep: Vec<usize>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub suite: SolverSuite,
}

impl GridSpec {
    /// `(m, k)` for one sweep value.
    pub fn dims(&self, value: usize) -> (usize, usize) {
        match self.fixed {
            Axis::K => (value, self.fixed_value),
            Axis::M => (self.fixed_value, value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::domain("at least one method is required"));
        }
        if self.sweep.is_empty() {
            return Err(Error::domain("sweep needs at least one value"));
        }
        for &v in &self.sweep {
            let (m, k) = self.dims(v);
            if !(1 <= k && k <= m && m <= self.n) {
                return Err(Error::domain(format!("sweep point m={m}, k={k} violates 1 <= k <= m <= n={}", self.n)));
            }
        }
        self.suite.validate()
    }
}

/// Key of the instance shared by every method at one trial.
pub fn instance_key(master_seed: u64, trial: usize, n: usize, m: usize, k: usize) -> StreamKey {
    StreamKey::new(master_seed).split(&[trial as u64, n as u64, m as u64, k as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Stream id of the instance, under the grid's master seed.
    pub instance_stream: u64,
    pub m: usize,
    pub k: usize,
    pub method: Method,
    pub relative_error: f64,
    pub success: bool,
    pub iterations: usize,
    pub termination: Termination,
    /// Solver wall time only.
    pub seconds: f64,
    pub mse_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub sweep_value: usize,
    pub m: usize,
    pub k: usize,
    pub method: Method,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_mse_db: f64,
    pub mean_iterations: f64,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub spec: GridSpec,
    /// Ordered by sweep value, then method as listed in the spec.
    pub points: Vec<GridPoint>,
    /// Ordered by sweep value, trial, then method.
    pub records: Vec<TrialRecord>,
}

impl ExperimentGrid {
    pub fn point(&self, sweep_value: usize, method: Method) -> Option<&GridPoint> {
        self.points.iter().find(|p| p.sweep_value == sweep_value && p.method == method)
    }
}

fn run_trial(spec: &GridSpec, instance: &ProblemInstance, trial: usize, method: Method) -> TrialRecord {
    let start = Instant::now();
    let outcome = spec.suite.solve(method, &instance.a, &instance.y, None);
    let seconds = start.elapsed().as_secs_f64();
    let (x_hat, iterations, termination) = match outcome {
        Ok(r) => (r.x_hat, r.iterations, r.termination),
        Err(_) => (DenseVector::zeros(instance.x0.len()), 0, Termination::NumericalFailure),
    };
    let err = relative_error(&x_hat, &instance.x0).unwrap_or(f64::INFINITY);
    let err = if err.is_finite() { err } else { f64::INFINITY };
    TrialRecord {
        trial,
        instance_stream: instance.key.stream,
        m: instance.a.rows(),
        k: instance.k,
        method,
        relative_error: err,
        success: is_success(err),
        iterations,
        termination,
        seconds,
        mse_db: db_from_relative(err),
    }
}

/// Success rate per (sweep value, method) over paired instances.
///
/// Trials run on the current rayon pool. A solver that errors or breaks down
/// numerically counts as a failed trial; the sweep itself never aborts.
/// Records are reduced in trial order, so the result does not depend on the
/// pool size or on scheduling.
pub fn run_phase_sweep(spec: &GridSpec) -> Result<ExperimentGrid> {
    spec.validate()?;
    let work: Vec<(usize, usize)> = spec.sweep.iter().flat_map(|&v| (0..spec.trials).map(move |t| (v, t))).collect();
    let per_item: Vec<Result<Vec<TrialRecord>>> = work
        .par_iter()
        .map(|&(value, trial)| {
            let (m, k) = spec.dims(value);
            let instance = generate_instance(spec.n, m, k, instance_key(spec.master_seed, trial, spec.n, m, k))?;
            Ok(spec.methods.iter().map(|&method| run_trial(spec, &instance, trial, method)).collect())
        })
        .collect();
    let mut records = Vec::with_capacity(work.len() * spec.methods.len());
    for item in per_item {
        records.extend(item?);
    }

    let mut points = Vec::with_capacity(spec.sweep.len() * spec.methods.len());
    for (i, &value) in spec.sweep.iter().enumerate() {
        let block = &records[i * spec.trials * spec.methods.len()..(i + 1) * spec.trials * spec.methods.len()];
        let (m, k) = spec.dims(value);
        for &method in &spec.methods {
            let mut successes = 0;
            let mut mse = 0.0;
            let mut iterations = 0.0;
            let mut seconds = 0.0;
            for r in block.iter().filter(|r| r.method == method) {
                successes += usize::from(r.success);
                mse += r.mse_db;
                iterations += r.iterations as f64;
                seconds += r.seconds;
            }
            let t = spec.trials as f64;
            points.push(GridPoint {
                sweep_value: value,
                m,
                k,
                method,
                trials: spec.trials,
                successes,
                success_rate: successes as f64 / t,
                mean_mse_db: mse / t,
                mean_iterations: iterations / t,
                mean_seconds: seconds / t,
            });
        }
    }
    Ok(ExperimentGrid { spec: spec.clone(), points, records })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub method: Method,
    pub iteration: usize,
    pub relative_change: f64,
    pub relative_error: f64,
    pub mse_db: f64,
    /// Cumulative solver wall time.
    pub seconds: f64,
}

/// Per-iteration error of each method on the trial-0 instance of `(n, m, k)`.
///
/// Methods run one after another so their timings do not interfere.
pub fn run_convergence_trace(
    n: usize,
    m: usize,
    k: usize,
    methods: &[Method],
    master_seed: u64,
    suite: &SolverSuite,
) -> Result<Vec<TraceRow>> {
    if methods.is_empty() {
        return Err(Error::domain("at least one method is required"));
    }
    suite.validate()?;
    let instance = generate_instance(n, m, k, instance_key(master_seed, 0, n, m, k))?;
    let mut rows = Vec::new();
    for &method in methods {
        let r = suite.solve(method, &instance.a, &instance.y, Some(&instance.x0))?;
        for rec in r.trace {
            let err = rec.relative_error.unwrap_or(f64::INFINITY);
            rows.push(TraceRow {
                method,
                iteration: rec.iteration,
                relative_change: rec.relative_change,
                relative_error: err,
                mse_db: db_from_relative(err),
                seconds: rec.elapsed.as_secs_f64(),
            });
        }
    }
    Ok(rows)
}
