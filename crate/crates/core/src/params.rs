use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};

/// The triple `(n, p, alpha)` fixing the space `F_alpha^p` on `C^n`.
///
/// The conjugate exponent `q` is derived and stored so that serialized
/// parameter sets carry it explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct FockParams {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub q: f64,
}

#[derive(Deserialize)]
struct RawParams {
    n: usize,
    p: f64,
    alpha: f64,
}

impl TryFrom<RawParams> for FockParams {
    type Error = FockError;

    fn try_from(raw: RawParams) -> Result<Self> {
        FockParams::new(raw.n, raw.p, raw.alpha)
    }
}

impl FockParams {
    pub fn new(n: usize, p: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(FockError::InvalidParams("dimension n must be at least 1".into()));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(FockError::InvalidParams(format!("p = {p} must lie in (1, inf)")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FockError::InvalidParams(format!("alpha = {alpha} must be positive")));
        }
        let q = p / (p - 1.0);
        Ok(Self { n, p, alpha, q })
    }

    /// Hilbert-space parameters `(n, 2, alpha)`.
    pub fn hilbert(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, 2.0, alpha)
    }

    /// Weight `p alpha / 2` of the Gaussian measure defining `L_alpha^p`.
    pub fn measure_weight(&self) -> f64 {
        self.p * self.alpha / 2.0
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    /// The same parameters with `p` replaced by its conjugate exponent.
    pub fn dual(&self) -> Self {
        Self { n: self.n, p: self.q, alpha: self.alpha, q: self.p }
    }

    /// Real dimension `2n`.
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }
}
