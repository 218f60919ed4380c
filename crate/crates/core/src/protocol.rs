//! Counterdiabatic protocols: which gauge potential accompanies `H(lambda)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::ChebFit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Protocol {
    /// Bare annealing.
    None,
    /// `A = i sum beta_k T_{2k-1}(L/Omega) dH / Omega`.
    Universal { fit: ChebFit<f64>, omega: f64 },
    /// Action-minimizing odd polynomial of order `ell`, refitted along the
    /// anneal.
    Variational {
        ell: usize,
        mu: f64,
        #[serde(default)]
        ensemble: VariationalEnsemble,
    },
    /// Exact gauge potential with the rational regulator `mu` (0 for none).
    Exact { mu: f64 },
}

/// Norm in which the variational action is minimized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VariationalEnsemble {
    /// Transitions out of the instantaneous ground state only.
    #[default]
    Ground,
    /// Frobenius norm: all transitions weighted equally.
    InfiniteTemperature,
}

impl Protocol {
    pub fn variational(ell: usize, mu: f64, ensemble: VariationalEnsemble) -> Self {
        Protocol::Variational { ell, mu, ensemble }
    }

    pub fn universal(fit: ChebFit<f64>, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid(format!("Omega = {omega} must be positive")));
        }
        Ok(Protocol::Universal { fit, omega })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::None => "NONE",
            Protocol::Universal { .. } => "UNIVERSAL",
            Protocol::Variational { .. } => "VARIATIONAL",
            Protocol::Exact { .. } => "EXACT",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Protocol::Universal { omega, .. } if !(*omega > 0.0) => {
                Err(Error::invalid(format!("Omega = {omega} must be positive")))
            }
            Protocol::Variational { ell, mu, .. } if *ell == 0 || !(*mu >= 0.0) => {
                Err(Error::invalid("variational protocol needs ell >= 1 and mu >= 0"))
            }
            Protocol::Exact { mu } if !(*mu >= 0.0) => Err(Error::invalid(format!("mu = {mu} must be nonnegative"))),
            _ => Ok(()),
        }
    }

    /// The odd function `f` with `A_mn = i f(omega_mn) M_mn`, for protocols
    /// that do not depend on the spectrum. `None` for the variational one.
    pub fn agp_function(&self, omega: f64) -> Option<f64> {
        match self {
            Protocol::None => Some(0.0),
            Protocol::Universal { fit, omega: big } => Some(fit.eval(omega / big) / big),
            Protocol::Exact { mu } => Some(-omega / (omega * omega + mu * mu)),
            Protocol::Variational { .. } => None,
        }
    }
}
