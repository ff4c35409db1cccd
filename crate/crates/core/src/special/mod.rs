//! Special functions needed by the closed forms: gamma family, regularized
//! incomplete gamma, confluent hypergeometric functions and the generalized
//! Marcum Q-function. No external numerics dependencies.

mod confluent;
mod gamma;
mod incgamma;
mod marcum;

pub use confluent::{
    kummer_1f1, kummer_1f1_with, ln_tricomi_u, tricomi_u, tricomi_u_via_kummer, tricomi_u_with,
};
pub use gamma::{digamma, ln_beta, ln_binomial, ln_gamma, ln_gamma_signed, trigamma};
pub use incgamma::{reg_gamma_p, reg_gamma_q};
pub use marcum::{marcum_q, marcum_q_with};

pub(crate) use gamma::ln_gamma_positive;
pub(crate) use marcum::poisson_mixture_q;

use crate::error::{domain, Result};

/// Accuracy targets for the iterative special functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(domain("Accuracy::new", "rel_tol", rel_tol, "rel_tol > 0"));
        }
        if !(abs_tol >= 0.0) {
            return Err(domain("Accuracy::new", "abs_tol", abs_tol, "abs_tol >= 0"));
        }
        Ok(Self { rel_tol, abs_tol })
    }
}
