//! False-alarm and detection probabilities of the energy detector.
//!
//! The test statistic is central chi-square with `2u` degrees of freedom under
//! H₀ and non-central with non-centrality `2γ` under H₁, so
//! `Pf = Q(u, λ/2)` and `Pd = Q_u(√(2γ), √λ)`.

mod fusion;
mod roc;
mod series;

pub use fusion::{
    collaborative_pd, collaborative_pfa, per_user_pfa, sls_average_pd, sls_pfa, FusionRule,
};
pub use roc::{pf_grid_log, roc_curve, Channel, RocCurve, RocPoint, Scheme};
pub use series::{
    average_pd, average_pd_partial, average_pd_quadrature, truncation_bound, FadingSeries,
    SeriesOutcome, TruncationBound,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, no_convergence, Result};
use crate::special::{poisson_mixture_q, reg_gamma_q, Accuracy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Time-bandwidth product.
    pub u: u32,
    /// Threshold λ on the normalized energy.
    pub threshold: f64,
    /// Noise-power uncertainty β in dB.
    pub noise_uncertainty_db: f64,
}

impl DetectorConfig {
    pub fn new(u: u32, threshold: f64) -> Result<Self> {
        if u == 0 {
            return Err(domain("DetectorConfig", "u", 0.0, "u >= 1"));
        }
        if !(threshold >= 0.0) || threshold.is_infinite() {
            return Err(domain(
                "DetectorConfig",
                "threshold",
                threshold,
                "threshold >= 0",
            ));
        }
        Ok(Self {
            u,
            threshold,
            noise_uncertainty_db: 0.0,
        })
    }

    pub fn with_noise_uncertainty(mut self, beta_db: f64) -> Result<Self> {
        if !(beta_db >= 0.0) || beta_db.is_infinite() {
            return Err(domain(
                "DetectorConfig",
                "noise_uncertainty_db",
                beta_db,
                "beta >= 0 dB",
            ));
        }
        self.noise_uncertainty_db = beta_db;
        Ok(self)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) || threshold.is_infinite() {
            return Err(domain(
                "DetectorConfig",
                "threshold",
                threshold,
                "threshold >= 0",
            ));
        }
        self.threshold = threshold;
        Ok(self)
    }

    /// `α = 10^{β/10}`
    pub fn alpha(&self) -> f64 {
        10f64.powf(self.noise_uncertainty_db / 10.0)
    }

    /// Threshold seen by the detection probability, `α²λ`.
    pub fn effective_threshold(&self) -> f64 {
        let a = self.alpha();
        a * a * self.threshold
    }
}

/// Series truncation controls for [`average_pd`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(domain("SeriesControl", "rel_tol", rel_tol, "rel_tol > 0"));
        }
        if max_terms < 10 {
            return Err(domain(
                "SeriesControl",
                "max_terms",
                max_terms as f64,
                "max_terms >= 10",
            ));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// False-alarm probability. Unaffected by fading and by noise uncertainty.
pub fn pfa(cfg: &DetectorConfig) -> f64 {
    pfa_at(cfg.u, cfg.threshold)
}

pub(crate) fn pfa_at(u: u32, threshold: f64) -> f64 {
    reg_gamma_q(u as f64, 0.5 * threshold).expect("u >= 1 and threshold >= 0")
}

/// Inverts [`pfa`] by bisection.
pub fn threshold_for_pfa(u: u32, target_pfa: f64) -> Result<f64> {
    if u == 0 {
        return Err(domain("threshold_for_pfa", "u", 0.0, "u >= 1"));
    }
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(domain(
            "threshold_for_pfa",
            "target_pfa",
            target_pfa,
            "0 < target_pfa < 1",
        ));
    }
    let mut lo = 0.0;
    let mut hi = 2.0 * u as f64;
    while pfa_at(u, hi) > target_pfa {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(no_convergence(
                "threshold_for_pfa",
                format!("no bracket for target {target_pfa}"),
            ));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pfa_at(u, mid) > target_pfa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (d_lo, d_hi) = (
        (pfa_at(u, lo) - target_pfa).abs(),
        (pfa_at(u, hi) - target_pfa).abs(),
    );
    let (best, err) = if d_lo <= d_hi { (lo, d_lo) } else { (hi, d_hi) };
    if err > 1e-12 {
        return Err(no_convergence(
            "threshold_for_pfa",
            format!("residual {err:e} at target {target_pfa}"),
        ));
    }
    Ok(best)
}

/// Detection probability at instantaneous SNR `gamma`, with the threshold
/// raised to `α²λ` when noise uncertainty is configured.
pub fn pd_awgn(cfg: &DetectorConfig, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) || gamma.is_infinite() {
        return Err(domain("pd_awgn", "gamma", gamma, "gamma >= 0"));
    }
    poisson_mixture_q(
        cfg.u,
        gamma,
        0.5 * cfg.effective_threshold(),
        Accuracy::default(),
    )
}
