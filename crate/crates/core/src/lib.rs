//! Sparse signal recovery under the normal product prior.
//!
//! A signal `x` is modelled as the element-wise product of two Gaussian
//! vectors, which gives a heavy-tailed prior sharply peaked at zero. The
//! [`vb`] module recovers `x` from `y = Ax` by mean-field variational Bayes
//! (NP-0 and NP-1), [`baselines`] holds SBL, IRLS and basis pursuit for
//! comparison, and [`harness`] runs seeded Monte Carlo sweeps over all of them.
//!
//! ```
//! use normprod_core::{generate_instance, run_np1, relative_error, SolverConfig, StreamKey};
//!
//! let p = generate_instance(60, 25, 2, StreamKey::new(3)).unwrap();
//! let r = run_np1(&p.a, &p.y, &SolverConfig::default()).unwrap();
//! assert!(relative_error(&r.x_hat, &p.x0).unwrap() < 1e-3);
//! ```

// `!(x > 0.0)` comparisons reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bessel;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod prior;
pub mod quad;
pub mod recovery;
pub mod rng;
pub mod vb;

pub use baselines::{bp_recover, irls_recover, sbl_recover, BaselineConfig, BpConfig, IrlsConfig, SblConfig};
pub use bessel::{bessel_k0, bessel_k0_scaled, bessel_k0_scaled_quadrature};
pub use error::{Error, Result};
pub use harness::{
    generate_instance, mse_db, relative_error, run_convergence_trace, run_phase_sweep, Axis, ExperimentGrid, GridPoint,
    GridSpec, Method, Overrides, ProblemInstance, SolverSuite, TraceRow, TrialRecord,
};
pub use linalg::{hadamard, pinv, scale_cols, solve_spd, svd, DenseMatrix, DenseVector};
pub use prior::{np_pdf, sample_np, FactorScales, NpParams};
pub use recovery::{RecoveryResult, Termination, TraceRecord};
pub use rng::StreamKey;
pub use vb::{
    run_np, run_np0, run_np1, update_a_finite_noise, update_a_noiseless, update_b_finite_noise, update_b_noiseless,
    update_gamma_inv2, update_kappa_inv2, NpVariant, PosteriorState, SolverConfig, UpdateOrder,
};
