//! EM sparse Bayesian learning with a fixed noise level.
//!
//! Prior `xᵢ ~ N(0, gᵢ)`, `gᵢ = 1/αᵢ`. Each iteration computes the Gaussian
//! posterior and sets `gᵢ ← μᵢ² + Σᵢᵢ`. The posterior is evaluated in the
//! M-dimensional observation space,
//! `C = σ²I + A·diag(g)·Aᵀ`, `μ = g ∘ AᵀC⁻¹y`, `Σᵢᵢ = gᵢ − gᵢ²·aᵢᵀC⁻¹aᵢ`,
//! which is exact and avoids N×N solves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pinv, scale_cols, Cholesky, DenseMatrix, DenseVector};
use crate::recovery::{IterationTracker, RecoveryResult, Step};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SblConfig {
    pub epsilon: f64,
    pub t_max: usize,
    /// Fixed noise variance σ².
    pub noise_var: f64,
    /// Coefficients whose precision αᵢ exceeds this are pruned to zero.
    pub prune_precision: f64,
}

impl Default for SblConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, t_max: 3000, noise_var: 1e-10, prune_precision: 1e12 }
    }
}

impl SblConfig {
    pub fn validate(&self) -> Result<()> {
        super::check_stop(self.epsilon, self.t_max)?;
        if !(self.noise_var > 0.0) {
            return Err(Error::domain("SBL noise variance must be > 0"));
        }
        if !(self.prune_precision > 0.0) {
            return Err(Error::domain("SBL pruning threshold must be > 0"));
        }
        Ok(())
    }
}

pub fn sbl_recover(
    a: &DenseMatrix,
    y: &DenseVector,
    config: &SblConfig,
    truth: Option<&DenseVector>,
) -> Result<RecoveryResult> {
    config.validate()?;
    super::check_problem(a, y, truth)?;
    let n = a.cols();
    let mut g = DenseVector::ones(n);
    let mut tracker = IterationTracker::new(DenseVector::zeros(n), config.epsilon, config.t_max, truth);
    loop {
        let (mu, sigma_diag) = match posterior(a, y, &g, config.noise_var) {
            Ok(p) => p,
            Err(e) => {
                let t = tracker.iteration() + 1;
                return Ok(tracker.fail(format!("iteration {t}: {e}")));
            }
        };
        let next: Vec<f64> = mu
            .iter()
            .zip(sigma_diag.iter())
            .map(|(u, s)| {
                let second = u * u + s;
                if second <= 0.0 || 1.0 / second > config.prune_precision {
                    0.0
                } else {
                    second
                }
            })
            .collect();
        g = DenseVector::from_vec_unchecked(next);
        if let Step::Stop(termination) = tracker.record(&mu) {
            return Ok(tracker.finish(mu, termination));
        }
    }
}

fn posterior(a: &DenseMatrix, y: &DenseVector, g: &DenseVector, noise_var: f64) -> Result<(DenseVector, DenseVector)> {
    let (m, n) = a.shape();
    let sqrt_g = g.map(f64::sqrt);
    let ag = scale_cols(a, &sqrt_g)?;
    let c = ag.outer_gram().add_diagonal(&DenseVector::filled(m, noise_var))?;
    let (w, ca) = match Cholesky::new(&c) {
        Ok(chol) => (chol.solve(y)?, chol.solve_matrix(a)?),
        Err(e) if e.is_numerical() => {
            let c_pinv = pinv(&c, None)?;
            (c_pinv.matvec(y)?, c_pinv.matmul(a)?)
        }
        Err(e) => return Err(e),
    };
    let atw = a.tmatvec(&w)?;
    let mut mu = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for i in 0..n {
        let gi = g[i];
        mu.push(gi * atw[i]);
        let mut q = 0.0;
        for j in 0..m {
            q += a.get(j, i) * ca.get(j, i);
        }
        sigma.push((gi - gi * gi * q).max(0.0));
    }
    let mu = DenseVector::from_vec_unchecked(mu);
    let sigma = DenseVector::from_vec_unchecked(sigma);
    if !mu.is_finite() || !sigma.is_finite() {
        return Err(Error::numerical("sbl posterior", m, n, "non-finite moments"));
    }
    Ok((mu, sigma))
}
