//! Comparison algorithms: sparse Bayesian learning, iteratively reweighted
//! least squares and basis pursuit.

mod bp;
mod irls;
mod sbl;

pub use bp::{bp_l1_path, bp_recover, BpConfig};
pub use irls::{irls_recover, IrlsConfig};
pub use sbl::{sbl_recover, SblConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
pub(crate) use crate::recovery::check_problem;
use crate::recovery::RecoveryResult;

/// A baseline method together with its knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BaselineConfig {
    Sbl(SblConfig),
    Irls(IrlsConfig),
    Bp(BpConfig),
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            BaselineConfig::Sbl(c) => c.validate(),
            BaselineConfig::Irls(c) => c.validate(),
            BaselineConfig::Bp(c) => c.validate(),
        }
    }

    pub fn recover(&self, a: &DenseMatrix, y: &DenseVector, truth: Option<&DenseVector>) -> Result<RecoveryResult> {
        match self {
            BaselineConfig::Sbl(c) => sbl_recover(a, y, c, truth),
            BaselineConfig::Irls(c) => irls_recover(a, y, c, truth),
            BaselineConfig::Bp(c) => bp_recover(a, y, c, truth),
        }
    }
}

pub(crate) fn check_stop(epsilon: f64, t_max: usize) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if t_max < 1 {
        return Err(Error::domain("t_max must be at least 1"));
    }
    Ok(())
}
