//! Output of every recovery algorithm and the stop-rule bookkeeping they share.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

/// Norm below which an iterate is treated as exactly zero by the stop rule.
pub const ZERO_ITERATE_NORM: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    NumericalFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::NumericalFailure => "numerical_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// `‖x⁽ᵗ⁾ − x⁽ᵗ⁻¹⁾‖ / ‖x⁽ᵗ⁻¹⁾‖`; `+∞` when only the previous iterate is zero.
    pub relative_change: f64,
    /// `‖x⁽ᵗ⁾ − x₀‖ / ‖x₀‖` when the ground truth was supplied.
    pub relative_error: Option<f64>,
    /// Wall time since the solver started.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub x_hat: DenseVector,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceRecord>,
    /// Diagnostic for `NumericalFailure`.
    pub failure: Option<String>,
}

impl RecoveryResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// First iteration whose relative error is at or below `threshold`.
    pub fn first_iteration_below(&self, threshold: f64) -> Option<usize> {
        self.trace.iter().find(|r| r.relative_error.is_some_and(|e| e <= threshold)).map(|r| r.iteration)
    }
}

pub fn relative_change(current: &DenseVector, previous: &DenseVector) -> f64 {
    let denom = previous.norm2();
    let diff = current.iter().zip(previous.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if denom < ZERO_ITERATE_NORM {
        if current.norm2() < ZERO_ITERATE_NORM {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / denom
    }
}

/// Shared shape checks for every solver entry point.
pub(crate) fn check_problem(a: &DenseMatrix, y: &DenseVector, truth: Option<&DenseVector>) -> Result<()> {
    if a.rows() != y.len() {
        return Err(Error::dimension("recover", format!("y of length {}", a.rows()), y.len()));
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::domain("sensing matrix must be non-empty"));
    }
    if let Some(t) = truth {
        if t.len() != a.cols() {
            return Err(Error::dimension("recover", format!("truth of length {}", a.cols()), t.len()));
        }
    }
    Ok(())
}

/// Records the trace and applies `‖x⁽ᵗ⁾ − x⁽ᵗ⁻¹⁾‖/‖x⁽ᵗ⁻¹⁾‖ ≤ ε or t = t_max`.
pub(crate) struct IterationTracker<'a> {
    truth: Option<&'a DenseVector>,
    truth_norm: f64,
    epsilon: f64,
    t_max: usize,
    start: Instant,
    previous: DenseVector,
    trace: Vec<TraceRecord>,
}

pub(crate) enum Step {
    Continue,
    Stop(Termination),
}

impl<'a> IterationTracker<'a> {
    pub fn new(initial: DenseVector, epsilon: f64, t_max: usize, truth: Option<&'a DenseVector>) -> Self {
        Self {
            truth,
            truth_norm: truth.map_or(0.0, |t| t.norm2()),
            epsilon,
            t_max,
            start: Instant::now(),
            previous: initial,
            trace: Vec::new(),
        }
    }

    pub fn iteration(&self) -> usize {
        self.trace.len()
    }

    pub fn last_change(&self) -> Option<f64> {
        self.trace.last().map(|r| r.relative_change)
    }

    /// Records iterate `x⁽ᵗ⁾` and applies the relative-change rule.
    pub fn record(&mut self, x: &DenseVector) -> Step {
        let change = relative_change(x, &self.previous);
        self.push(x, change);
        if change <= self.epsilon {
            Step::Stop(Termination::Converged)
        } else if self.trace.len() >= self.t_max {
            Step::Stop(Termination::MaxIterations)
        } else {
            Step::Continue
        }
    }

    /// Records `x⁽ᵗ⁾` but lets the caller decide convergence.
    pub fn record_with(&mut self, x: &DenseVector, converged: bool) -> Step {
        let change = relative_change(x, &self.previous);
        self.push(x, change);
        if converged {
            Step::Stop(Termination::Converged)
        } else if self.trace.len() >= self.t_max {
            Step::Stop(Termination::MaxIterations)
        } else {
            Step::Continue
        }
    }

    fn push(&mut self, x: &DenseVector, change: f64) {
        let relative_error = self.truth.map(|t| {
            let d = x.iter().zip(t.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            d / self.truth_norm
        });
        self.trace.push(TraceRecord {
            iteration: self.trace.len() + 1,
            relative_change: change,
            relative_error,
            elapsed: self.start.elapsed(),
        });
        self.previous = x.clone();
    }

    pub fn finish(self, x_hat: DenseVector, termination: Termination) -> RecoveryResult {
        RecoveryResult { x_hat, iterations: self.trace.len(), termination, trace: self.trace, failure: None }
    }

    /// Ends the run on a numerical failure, keeping the last accepted iterate.
    pub fn fail(self, reason: String) -> RecoveryResult {
        let x_hat = self.previous.clone();
        RecoveryResult {
            x_hat,
            iterations: self.trace.len(),
            termination: Termination::NumericalFailure,
            trace: self.trace,
            failure: Some(reason),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn zero_previous_iterate_guard() {
        assert_eq!(relative_change(&v(&[0.0, 0.0]), &v(&[0.0, 0.0])), 0.0);
        assert_eq!(relative_change(&v(&[1.0, 0.0]), &v(&[0.0, 0.0])), f64::INFINITY);
        assert!((relative_change(&v(&[3.0, 4.0]), &v(&[0.0, 5.0])) - 10f64.sqrt() / 5.0).abs() < 1e-15);
    }

    #[test]
    fn tracker_stops_on_first_small_change_or_cap() {
        let mut t = IterationTracker::new(v(&[1.0]), 1e-3, 3, None);
        assert!(matches!(t.record(&v(&[2.0])), Step::Continue));
        assert!(matches!(t.record(&v(&[2.0005])), Step::Stop(Termination::Converged)));
        let r = t.finish(v(&[2.0005]), Termination::Converged);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.trace.len(), 2);

        let truth = v(&[4.0]);
        let mut t = IterationTracker::new(v(&[1.0]), 1e-3, 2, Some(&truth));
        assert!(matches!(t.record(&v(&[2.0])), Step::Continue));
        assert!(matches!(t.record(&v(&[3.0])), Step::Stop(Termination::MaxIterations)));
        assert_eq!(t.trace[1].relative_error, Some(0.25));
    }
}
