//! Transfer functions mapping reward differences to preference probabilities.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransferKind {
    /// `1 / (1 + e^-z)` (Bradley–Terry).
    Logistic,
    /// Normal CDF with standard deviation `sigma`.
    Probit { sigma: f64 },
    /// `(1 + z) / 2`, clamped to `[0, 1]`.
    Linear,
    /// `1/2 + sign(z) · min(1/2, c·|z|^p)`.
    Polynomial { c: f64, p: f64 },
}

/// A symmetric, nondecreasing, globally Lipschitz link `ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferFunction {
    kind: TransferKind,
}

impl TransferFunction {
    pub fn logistic() -> Self {
        Self {
            kind: TransferKind::Logistic,
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: TransferKind::Linear,
        }
    }

    pub fn probit(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be > 0, got {sigma}")));
        }
        Ok(Self {
            kind: TransferKind::Probit { sigma },
        })
    }

    /// Exponents below 1 are rejected: the link is then not Lipschitz at 0.
    pub fn polynomial(c: f64, p: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("c", format!("must be > 0, got {c}")));
        }
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::param("p", format!("must be >= 1, got {p}")));
        }
        Ok(Self {
            kind: TransferKind::Polynomial { c, p },
        })
    }

    pub fn kind(&self) -> TransferKind {
        self.kind
    }

    /// `ρ(z)` with `z` clamped to `[-1, 1]` first.
    pub fn eval(&self, z: f64) -> f64 {
        let z = z.clamp(-1.0, 1.0);
        match self.kind {
            TransferKind::Logistic => 1.0 / (1.0 + (-z).exp()),
            TransferKind::Probit { sigma } => 0.5 * erfc(-z / (sigma * SQRT_2)),
            TransferKind::Linear => (0.5 * (1.0 + z)).clamp(0.0, 1.0),
            TransferKind::Polynomial { c, p } => {
                let lift = (c * z.abs().powf(p)).min(0.5);
                0.5 + lift.copysign(z)
            }
        }
    }

    /// Lipschitz constant `Γ` of `ρ` on `[-1, 1]`.
    pub fn gamma(&self) -> f64 {
        match self.kind {
            TransferKind::Logistic => 0.25,
            TransferKind::Probit { sigma } => 1.0 / (sigma * (2.0 * PI).sqrt()),
            TransferKind::Linear => 0.5,
            TransferKind::Polynomial { c, p } => c * p,
        }
    }
}

/// `ρ(z)` for the given link.
pub fn transfer_eval(t: &TransferFunction, z: f64) -> f64 {
    t.eval(z)
}

/// The link's Lipschitz constant `Γ`.
pub fn gamma_of(t: &TransferFunction) -> f64 {
    t.gamma()
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TransferKind::Logistic => f.write_str("logistic"),
            TransferKind::Probit { sigma } => write!(f, "probit:sigma={sigma}"),
            TransferKind::Linear => f.write_str("linear"),
            TransferKind::Polynomial { c, p } => write!(f, "poly:c={c},p={p}"),
        }
    }
}
