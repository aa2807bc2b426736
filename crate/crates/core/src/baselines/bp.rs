//! Basis pursuit, `min ‖x‖₁ s.t. Ax = y`, by ADMM.
//!
//! Splitting `x = z` with `x` constrained to the affine set gives
//!
//! ```text
//! x ← Π(z − u)            Π(v) = v − A⁺(Av − y)
//! z ← soft(x + u, 1/ρ)
//! u ← u + x − z
//! ```
//!
//! The reported iterate is `x`, which is feasible up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pinv, DenseMatrix, DenseVector};
use crate::recovery::{IterationTracker, RecoveryResult, Step, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    /// Only validated; ADMM stops on its own residuals.
    pub epsilon: f64,
    pub t_max: usize,
    pub rho: f64,
    /// Relative primal residual `‖x − z‖ / max(‖x‖, ‖z‖)`.
    pub tol_primal: f64,
    /// Relative dual residual `‖z − z_prev‖ / ‖u‖`.
    pub tol_dual: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, t_max: 20_000, rho: 1.0, tol_primal: 1e-9, tol_dual: 1e-9 }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        super::check_stop(self.epsilon, self.t_max)?;
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::domain(format!("ADMM penalty must be > 0, got {}", self.rho)));
        }
        if !(self.tol_primal > 0.0 && self.tol_dual > 0.0) {
            return Err(Error::domain("ADMM tolerances must be > 0"));
        }
        Ok(())
    }
}

/// Iterations before the best-iterate bookkeeping starts.
const WARMUP: usize = 10;

struct Admm<'a> {
    a: &'a DenseMatrix,
    a_pinv: DenseMatrix,
    y: &'a DenseVector,
    rho: f64,
    z: Vec<f64>,
    u: Vec<f64>,
}

impl<'a> Admm<'a> {
    fn new(a: &'a DenseMatrix, y: &'a DenseVector, rho: f64) -> Result<Self> {
        let n = a.cols();
        Ok(Self { a, a_pinv: pinv(a, None)?, y, rho, z: vec![0.0; n], u: vec![0.0; n] })
    }

    /// One sweep; returns the feasible iterate and the relative primal and
    /// dual residuals.
    fn step(&mut self) -> Result<(DenseVector, f64, f64)> {
        let v = DenseVector::from_vec_unchecked(self.z.iter().zip(&self.u).map(|(z, u)| z - u).collect());
        let x = project(self.a, &self.a_pinv, self.y, &v)?;
        if !x.is_finite() {
            return Err(Error::numerical("admm", self.a.rows(), self.a.cols(), "non-finite iterate"));
        }
        let threshold = 1.0 / self.rho;
        let z_prev = std::mem::take(&mut self.z);
        self.z = x.iter().zip(&self.u).map(|(x, u)| soft(x + u, threshold)).collect();
        for ((u, x), z) in self.u.iter_mut().zip(x.iter()).zip(&self.z) {
            *u += x - z;
        }
        let primal = distance(&x, &self.z) / norm(&x).max(norm(&self.z));
        let dual = distance(&self.z, &z_prev) / norm(&self.u);
        Ok((x, primal, dual))
    }
}

pub fn bp_recover(
    a: &DenseMatrix,
    y: &DenseVector,
    config: &BpConfig,
    truth: Option<&DenseVector>,
) -> Result<RecoveryResult> {
    config.validate()?;
    super::check_problem(a, y, truth)?;
    let mut admm = Admm::new(a, y, config.rho)?;
    let mut tracker = IterationTracker::new(DenseVector::zeros(a.cols()), config.epsilon, config.t_max, truth);
    let mut best: Option<(f64, DenseVector)> = None;
    loop {
        let (x, primal, dual) = match admm.step() {
            Ok(s) => s,
            Err(e) => {
                let t = tracker.iteration() + 1;
                return Ok(tracker.fail(format!("iteration {t}: {e}")));
            }
        };
        // 0/0 residuals only occur at the exact zero solution.
        let converged = !(primal > config.tol_primal) && !(dual > config.tol_dual);
        if tracker.iteration() >= WARMUP {
            let l1 = l1_norm(&x);
            if best.as_ref().map_or(true, |(b, _)| l1 < *b) {
                best = Some((l1, x.clone()));
            }
        }
        match tracker.record_with(&x, converged) {
            Step::Continue => {}
            Step::Stop(Termination::MaxIterations) => {
                let x_hat = best.map_or(x, |(_, b)| b);
                return Ok(tracker.finish(x_hat, Termination::MaxIterations));
            }
            Step::Stop(termination) => return Ok(tracker.finish(x, termination)),
        }
    }
}

/// `‖x⁽ᵗ⁾‖₁` of the feasible ADMM iterate for `t = 1..=iterations`, ignoring
/// the stop rule.
pub fn bp_l1_path(a: &DenseMatrix, y: &DenseVector, config: &BpConfig, iterations: usize) -> Result<Vec<f64>> {
    config.validate()?;
    super::check_problem(a, y, None)?;
    let mut admm = Admm::new(a, y, config.rho)?;
    (0..iterations).map(|_| admm.step().map(|(x, _, _)| l1_norm(&x))).collect()
}

fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn project(a: &DenseMatrix, a_pinv: &DenseMatrix, y: &DenseVector, v: &DenseVector) -> Result<DenseVector> {
    let residual = a.matvec(v)?.sub(y)?;
    v.sub(&a_pinv.matvec(&residual)?)
}

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
