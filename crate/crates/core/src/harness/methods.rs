use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{bp_recover, irls_recover, sbl_recover, BpConfig, IrlsConfig, SblConfig};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::recovery::RecoveryResult;
use crate::vb::{run_np, NpVariant, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Np0,
    Np1,
    Sbl,
    Irls,
    Bp,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Np0, Method::Np1, Method::Sbl, Method::Irls, Method::Bp];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Np0 => "np0",
            Method::Np1 => "np1",
            Method::Sbl => "sbl",
            Method::Irls => "irls",
            Method::Bp => "bp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::domain(format!("unknown method '{s}' (expected np0, np1, sbl, irls or bp)")))
    }
}

/// Optional settings applied on top of every method's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub t_max: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

/// Per-method configurations used by the harness.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverSuite {
    pub np: SolverConfig,
    pub sbl: SblConfig,
    pub irls: IrlsConfig,
    pub bp: BpConfig,
}

impl SolverSuite {
    /// `epsilon` and `t_max` reach every method; `alpha`/`beta` only NP-1.
    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if let Some(e) = o.epsilon {
            self.np.epsilon = e;
            self.sbl.epsilon = e;
            self.irls.epsilon = e;
            self.bp.epsilon = e;
        }
        if let Some(t) = o.t_max {
            self.np.t_max = t;
            self.sbl.t_max = t;
            self.irls.t_max = t;
            self.bp.t_max = t;
        }
        if let Some(a) = o.alpha {
            self.np.alpha = a;
        }
        if let Some(b) = o.beta {
            self.np.beta = b;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.np.validate()?;
        self.sbl.validate()?;
        self.irls.validate()?;
        self.bp.validate()
    }

    /// `(epsilon, t_max)` the given method runs with.
    pub fn stop_rule(&self, method: Method) -> (f64, usize) {
        match method {
            Method::Np0 | Method::Np1 => (self.np.epsilon, self.np.t_max),
            Method::Sbl => (self.sbl.epsilon, self.sbl.t_max),
            Method::Irls => (self.irls.epsilon, self.irls.t_max),
            Method::Bp => (self.bp.epsilon, self.bp.t_max),
        }
    }

    pub fn solve(
        &self,
        method: Method,
        a: &DenseMatrix,
        y: &DenseVector,
        truth: Option<&DenseVector>,
    ) -> Result<RecoveryResult> {
        match method {
            Method::Np0 => run_np(NpVariant::Np0, a, y, &self.np, truth).map(|(r, _)| r),
            Method::Np1 => run_np(NpVariant::Np1, a, y, &self.np, truth).map(|(r, _)| r),
            Method::Sbl => sbl_recover(a, y, &self.sbl, truth),
            Method::Irls => irls_recover(a, y, &self.irls, truth),
            Method::Bp => bp_recover(a, y, &self.bp, truth),
        }
    }
}
