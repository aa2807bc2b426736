//! Variational Bayes recovery under the normal product prior.
//!
//! The signal is written `x = a ∘ b` with independent Gaussian factors. Each
//! iteration refreshes the posterior of `a` given `⟨b⟩`, then of `b` given
//! `⟨a⟩`, and reads off `x = ⟨a⟩ ∘ ⟨b⟩`. The one-layer variant keeps the
//! factor scales at one; the two-layer variant also re-estimates the
//! per-coefficient precisions `⟨κᵢ⁻²⟩`, `⟨γᵢ⁻²⟩` from their Gamma posteriors,
//! which turns the scheme into a doubly reweighted minimum-norm iteration.

mod updates;

pub use updates::{
    precision_system, update_a_finite_noise, update_a_noiseless, update_b_finite_noise, update_b_noiseless,
    update_gamma_inv2, update_kappa_inv2, FactorPosterior,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hadamard, DenseMatrix, DenseVector};
use crate::recovery::{IterationTracker, RecoveryResult, Step};

/// Which factor is refreshed first within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    #[default]
    AFirst,
    BFirst,
}

/// One-layer (fixed unit scales) or two-layer (learned precisions) model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NpVariant {
    Np0,
    Np1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Gamma shape of the precision hyperprior.
    pub alpha: f64,
    /// Gamma rate of the precision hyperprior.
    pub beta: f64,
    /// Relative-change stop threshold.
    pub epsilon: f64,
    pub t_max: usize,
    /// Observation noise variance; zero selects the noiseless-limit updates.
    pub noise_var: f64,
    /// Lower bound on the second-moment bracket of the precision updates.
    pub precision_floor: f64,
    pub update_order: UpdateOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            epsilon: 1e-3,
            t_max: 300,
            noise_var: 0.0,
            precision_floor: 1e-12,
            update_order: UpdateOrder::AFirst,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::domain(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.t_max < 1 {
            return Err(Error::domain("t_max must be at least 1"));
        }
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(Error::domain(format!("noise_var must be >= 0, got {}", self.noise_var)));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(Error::domain("alpha and beta must be >= 0"));
        }
        if !(self.precision_floor > 0.0) {
            return Err(Error::domain("precision_floor must be > 0"));
        }
        Ok(())
    }
}

/// Posterior moments carried between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorState {
    pub a_mean: DenseVector,
    pub a_var: DenseVector,
    pub b_mean: DenseVector,
    pub b_var: DenseVector,
    pub kappa_inv2_mean: DenseVector,
    pub gamma_inv2_mean: DenseVector,
}

impl PosteriorState {
    /// All-ones means and unit scales.
    pub fn initial(n: usize) -> Self {
        Self {
            a_mean: DenseVector::ones(n),
            a_var: DenseVector::zeros(n),
            b_mean: DenseVector::ones(n),
            b_var: DenseVector::zeros(n),
            kappa_inv2_mean: DenseVector::ones(n),
            gamma_inv2_mean: DenseVector::ones(n),
        }
    }

    pub fn len(&self) -> usize {
        self.a_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_mean.is_empty()
    }

    /// `⟨κ⟩ := ⟨κ⁻²⟩^(-1/2)`.
    pub fn kappa(&self) -> DenseVector {
        self.kappa_inv2_mean.map(|p| p.powf(-0.5))
    }

    /// `⟨γ⟩ := ⟨γ⁻²⟩^(-1/2)`.
    pub fn gamma(&self) -> DenseVector {
        self.gamma_inv2_mean.map(|p| p.powf(-0.5))
    }

    /// `x = ⟨a⟩ ∘ ⟨b⟩`.
    pub fn estimate(&self) -> DenseVector {
        hadamard(&self.a_mean, &self.b_mean).expect("factor means share a length")
    }
}

fn refresh_a(
    a: &DenseMatrix,
    y: &DenseVector,
    state: &mut PosteriorState,
    config: &SolverConfig,
    with_var: bool,
) -> Result<()> {
    let post = if config.noise_var > 0.0 {
        update_a_finite_noise(a, y, &state.b_mean, &state.kappa_inv2_mean, config.noise_var)?
    } else {
        update_a_noiseless(a, y, &state.b_mean, &state.kappa())?
    };
    state.a_mean = post.mean;
    if with_var {
        state.a_var = post.var;
    }
    Ok(())
}

fn refresh_b(
    a: &DenseMatrix,
    y: &DenseVector,
    state: &mut PosteriorState,
    config: &SolverConfig,
    with_var: bool,
) -> Result<()> {
    let post = if config.noise_var > 0.0 {
        update_b_finite_noise(a, y, &state.a_mean, &state.gamma_inv2_mean, config.noise_var)?
    } else {
        update_b_noiseless(a, y, &state.a_mean, &state.gamma())?
    };
    state.b_mean = post.mean;
    if with_var {
        state.b_var = post.var;
    }
    Ok(())
}

fn refresh_kappa(state: &mut PosteriorState, config: &SolverConfig) -> Result<()> {
    state.kappa_inv2_mean = update_kappa_inv2(
        &state.a_mean,
        &state.a_var,
        &state.gamma_inv2_mean,
        config.alpha,
        config.beta,
        config.precision_floor,
    )?;
    Ok(())
}

fn refresh_gamma(state: &mut PosteriorState, config: &SolverConfig) -> Result<()> {
    state.gamma_inv2_mean = update_gamma_inv2(
        &state.b_mean,
        &state.b_var,
        &state.kappa_inv2_mean,
        config.alpha,
        config.beta,
        config.precision_floor,
    )?;
    Ok(())
}

/// One sweep of the updates, returning the new estimate `⟨a⟩ ∘ ⟨b⟩`.
///
/// Order (a-first): a mean/var, b mean/var, x, `⟨κ⁻²⟩`, `⟨γ⁻²⟩`. Each
/// precision update sees the most recent value of the other. With
/// [`UpdateOrder::BFirst`] the roles of a and b are mirrored throughout.
pub fn iterate(
    variant: NpVariant,
    a: &DenseMatrix,
    y: &DenseVector,
    state: &mut PosteriorState,
    config: &SolverConfig,
) -> Result<DenseVector> {
    let two_layer = variant == NpVariant::Np1;
    match config.update_order {
        UpdateOrder::AFirst => {
            refresh_a(a, y, state, config, two_layer)?;
            refresh_b(a, y, state, config, two_layer)?;
        }
        UpdateOrder::BFirst => {
            refresh_b(a, y, state, config, two_layer)?;
            refresh_a(a, y, state, config, two_layer)?;
        }
    }
    let x = state.estimate();
    if two_layer {
        match config.update_order {
            UpdateOrder::AFirst => {
                refresh_kappa(state, config)?;
                refresh_gamma(state, config)?;
            }
            UpdateOrder::BFirst => {
                refresh_gamma(state, config)?;
                refresh_kappa(state, config)?;
            }
        }
    }
    Ok(x)
}

/// Runs NP-0 or NP-1 to termination and also returns the final posterior.
///
/// Invalid inputs are reported as `Err`; a numerical breakdown during the
/// iteration ends the run with [`Termination::NumericalFailure`] and keeps
/// the partial trace.
pub fn run_np(
    variant: NpVariant,
    a: &DenseMatrix,
    y: &DenseVector,
    config: &SolverConfig,
    truth: Option<&DenseVector>,
) -> Result<(RecoveryResult, PosteriorState)> {
    config.validate()?;
    crate::recovery::check_problem(a, y, truth)?;
    let mut state = PosteriorState::initial(a.cols());
    let mut tracker = IterationTracker::new(state.estimate(), config.epsilon, config.t_max, truth);
    loop {
        let x = match iterate(variant, a, y, &mut state, config) {
            Ok(x) => x,
            Err(e) => {
                let t = tracker.iteration() + 1;
                return Ok((tracker.fail(format!("iteration {t}: {e}")), state));
            }
        };
        if let Step::Stop(termination) = tracker.record(&x) {
            return Ok((tracker.finish(x, termination), state));
        }
    }
}

/// NP-0: one-layer model with `κ = γ = 1`.
pub fn run_np0(a: &DenseMatrix, y: &DenseVector, config: &SolverConfig) -> Result<RecoveryResult> {
    run_np(NpVariant::Np0, a, y, config, None).map(|(r, _)| r)
}

/// NP-1: two-layer model with Gamma hyperpriors on the factor precisions.
pub fn run_np1(a: &DenseMatrix, y: &DenseVector, config: &SolverConfig) -> Result<RecoveryResult> {
    run_np(NpVariant::Np1, a, y, config, None).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig { epsilon: 0.0, ..Default::default() },
            SolverConfig { t_max: 0, ..Default::default() },
            SolverConfig { noise_var: -1.0, ..Default::default() },
            SolverConfig { alpha: -0.1, ..Default::default() },
            SolverConfig { precision_floor: 0.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn zero_observation_gives_zero_estimate() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 0.5], vec![-1.0, 0.3, 2.0]]).unwrap();
        let y = DenseVector::zeros(2);
        for variant in [NpVariant::Np0, NpVariant::Np1] {
            let (r, _) = run_np(variant, &a, &y, &SolverConfig::default(), None).unwrap();
            assert!(r.x_hat.iter().all(|&v| v == 0.0));
            assert_eq!(r.trace[0].relative_change, 1.0);
            assert!(r.converged());
            assert_eq!(r.iterations, 2);
        }
    }

    #[test]
    fn dimension_errors_are_reported() {
        let a = DenseMatrix::identity(3);
        assert!(run_np0(&a, &DenseVector::zeros(2), &SolverConfig::default()).is_err());
        let bad = SolverConfig { t_max: 0, ..Default::default() };
        assert!(run_np1(&a, &DenseVector::zeros(3), &bad).is_err());
    }

    #[test]
    fn initial_state() {
        let s = PosteriorState::initial(4);
        assert_eq!(s.estimate(), DenseVector::ones(4));
        assert_eq!(s.kappa(), DenseVector::ones(4));
        assert_eq!(s.gamma(), DenseVector::ones(4));
        assert_eq!(s.len(), 4);
    }
}
