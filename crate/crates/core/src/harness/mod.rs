//! Seeded problem instances, recovery metrics and Monte Carlo sweeps.

mod methods;
mod sweep;

pub use methods::{Method, Overrides, SolverSuite};
pub use sweep::{
    instance_key, run_convergence_trace, run_phase_sweep, Axis, ExperimentGrid, GridPoint, GridSpec, TraceRow,
    TrialRecord,
};

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::rng::StreamKey;

/// A trial succeeds when its relative error is strictly below this.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// Lower clamp applied to [`mse_db`].
pub const MSE_DB_FLOOR: f64 = -320.0;

/// Noise-free compressed sensing problem `y = A·x₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub y: DenseVector,
    pub x0: DenseVector,
    pub k: usize,
    pub key: StreamKey,
}

/// Draws `A` with i.i.d. N(0,1) entries and a `k`-sparse `x₀` with N(0,1)
/// values on a uniformly random support.
pub fn generate_instance(n: usize, m: usize, k: usize, key: StreamKey) -> Result<ProblemInstance> {
    if !(1 <= k && k <= m && m <= n) {
        return Err(Error::domain(format!("instance sizes must satisfy 1 <= k <= m <= n, got n={n}, m={m}, k={k}")));
    }
    let mut rng = key.rng();
    let a = DenseMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))?;
    let mut x0 = vec![0.0; n];
    for i in index::sample(&mut rng, n, k) {
        x0[i] = loop {
            let v: f64 = rng.sample(StandardNormal);
            if v != 0.0 {
                break v;
            }
        };
    }
    let x0 = DenseVector::new(x0)?;
    let y = a.matvec(&x0)?;
    Ok(ProblemInstance { a, y, x0, k, key })
}

/// `‖x̂ − x₀‖₂ / ‖x₀‖₂`.
pub fn relative_error(x_hat: &DenseVector, x0: &DenseVector) -> Result<f64> {
    let denom = x0.norm2();
    if denom == 0.0 {
        return Err(Error::domain("relative error needs a nonzero ground truth"));
    }
    Ok(x_hat.sub(x0)?.norm2() / denom)
}

/// `20·log₁₀(relative error)`, clamped below at [`MSE_DB_FLOOR`].
pub fn mse_db(x_hat: &DenseVector, x0: &DenseVector) -> Result<f64> {
    relative_error(x_hat, x0).map(db_from_relative)
}

pub fn db_from_relative(err: f64) -> f64 {
    (20.0 * err.log10()).max(MSE_DB_FLOOR)
}

pub fn is_success(relative_error: f64) -> bool {
    relative_error < SUCCESS_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_guards() {
        let key = StreamKey::new(1);
        assert!(generate_instance(100, 30, 0, key).is_err());
        assert!(generate_instance(100, 3, 4, key).is_err());
        assert!(generate_instance(10, 30, 3, key).is_err());
    }

    #[test]
    fn instance_is_reproducible_and_consistent() {
        let key = StreamKey::new(42).split(&[7]);
        let p = generate_instance(50, 20, 4, key).unwrap();
        let q = generate_instance(50, 20, 4, key).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.x0.count_above(0.0), 4);
        assert_eq!(p.a.matvec(&p.x0).unwrap(), p.y);
        let r = generate_instance(50, 20, 4, StreamKey::new(42).split(&[8])).unwrap();
        assert_ne!(p.x0, r.x0);
    }

    #[test]
    fn metrics() {
        let x0 = DenseVector::new(vec![3.0, 0.0, -4.0]).unwrap();
        assert_eq!(relative_error(&x0, &x0).unwrap(), 0.0);
        assert_eq!(relative_error(&DenseVector::zeros(3), &x0).unwrap(), 1.0);
        assert_eq!(relative_error(&x0.scale(2.0), &x0).unwrap(), 1.0);
        assert!(relative_error(&x0, &DenseVector::zeros(3)).is_err());
        assert_eq!(db_from_relative(1.0), 0.0);
        assert!((db_from_relative(1e-3) + 60.0).abs() < 1e-12);
        assert_eq!(mse_db(&x0, &x0).unwrap(), MSE_DB_FLOOR);
        assert!(is_success(0.999e-3));
        assert!(!is_success(1e-3));
    }
}
