//! Fading-averaged detection probability.
//!
//! Averaging the Poisson-mixture form of the Marcum Q-function over the F
//! SNR law gives
//!
//! ```text
//! P̄d = Σₙ wₙ Q(n+u, x),   wₙ = c^{m_s} Γ(n+m) U(m+m_s, m_s-n+1, c) / (B(m, m_s) n!)
//! ```
//!
//! with `x = α²λ/2`. The weights `wₙ` are the probabilities of a mixed
//! Poisson law (they sum to one) but only decay like `n^{-m_s-1}`, so the
//! series is summed in complementary form `1 - Σₙ wₙ P(n+u, x)`, whose terms
//! fall off super-exponentially once `n` passes `x`.

use serde::{Deserialize, Serialize};

use super::{DetectorConfig, SeriesControl};
use crate::error::{domain, no_convergence, Result};
use crate::fading::{snr_pdf, FadingParams};
use crate::quad::{integrate_log_scale, Tolerance};
use crate::special::{
    ln_gamma_positive, ln_tricomi_u, poisson_mixture_q, reg_gamma_p, reg_gamma_q, Accuracy,
};

const CLAMP_SLACK: f64 = 1e-9;

/// Result of a truncated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOutcome {
    pub value: f64,
    /// Number of terms summed.
    pub terms: usize,
    /// Magnitude of the last term added.
    pub last_term: f64,
    /// Upper bound on the neglected tail.
    pub remainder_bound: f64,
}

/// Mixed-Poisson weights of one channel, reused across thresholds.
#[derive(Debug, Clone)]
pub struct FadingSeries {
    params: FadingParams,
    ln_prefactor: f64,
    ln_weights: Vec<f64>,
}

impl FadingSeries {
    pub fn new(p: &FadingParams) -> Self {
        Self {
            params: *p,
            ln_prefactor: p.m_s * p.scale().ln() - p.ln_beta(),
            ln_weights: Vec::new(),
        }
    }

    pub fn params(&self) -> &FadingParams {
        &self.params
    }

    fn compute_ln_weight(&self, n: usize) -> Result<f64> {
        let p = &self.params;
        let nf = n as f64;
        let ln_u = ln_tricomi_u(
            p.m + p.m_s,
            p.m_s - nf + 1.0,
            p.scale(),
            Accuracy::default(),
        )?;
        Ok(self.ln_prefactor + ln_gamma_positive(nf + p.m) - ln_gamma_positive(nf + 1.0) + ln_u)
    }

    /// `ln wₙ`, from the cache when available.
    pub fn ln_weight(&self, n: usize) -> Result<f64> {
        match self.ln_weights.get(n) {
            Some(&w) => Ok(w),
            None => self.compute_ln_weight(n),
        }
    }

    pub fn weight(&self, n: usize) -> Result<f64> {
        Ok(self.ln_weight(n)?.exp())
    }

    /// Caches the first `len` weights.
    pub fn extend_to(&mut self, len: usize) -> Result<()> {
        while self.ln_weights.len() < len {
            let w = self.compute_ln_weight(self.ln_weights.len())?;
            self.ln_weights.push(w);
        }
        Ok(())
    }

    pub fn cached_len(&self) -> usize {
        self.ln_weights.len()
    }

    /// Average detection probability with truncation diagnostics.
    ///
    /// Stops once the bound `P(n+1+u, x) · (1 - Σ_{k≤n} w_k)` on the tail of
    /// the complementary sum drops below `rel_tol · P̄d`.
    pub fn evaluate(&self, cfg: &DetectorConfig, ctl: &SeriesControl) -> Result<SeriesOutcome> {
        if cfg.threshold == 0.0 {
            return Ok(SeriesOutcome {
                value: 1.0,
                terms: 0,
                last_term: 0.0,
                remainder_bound: 0.0,
            });
        }
        let u = cfg.u as f64;
        let x = 0.5 * cfg.effective_threshold();
        let mut sum = 0.0;
        let mut mass = 0.0;
        let mut p = reg_gamma_p(u, x)?;
        for n in 0..ctl.max_terms {
            let (term, w) = if p == 0.0 {
                (0.0, 0.0)
            } else {
                let w = self.weight(n)?;
                (w * p, w)
            };
            sum += term;
            mass += w;
            let p_next = reg_gamma_p(n as f64 + 1.0 + u, x)?;
            let unseen = ((1.0 - mass).max(0.0) + (n as f64 + 1.0) * f64::EPSILON).min(1.0);
            let remainder = if p == 0.0 { 0.0 } else { p_next * unseen };
            if remainder <= ctl.rel_tol * (1.0 - sum).max(f64::MIN_POSITIVE) {
                let raw = 1.0 - sum;
                if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) {
                    return Err(no_convergence(
                        "average_pd",
                        format!("series left [0, 1]: {raw} for {:?}", self.params),
                    ));
                }
                return Ok(SeriesOutcome {
                    value: raw.clamp(0.0, 1.0),
                    terms: n + 1,
                    last_term: term,
                    remainder_bound: remainder,
                });
            }
            p = p_next;
        }
        Err(no_convergence(
            "average_pd",
            format!(
                "{} terms, u={}, lambda={}, {:?}",
                ctl.max_terms, cfg.u, cfg.threshold, self.params
            ),
        ))
    }
}

/// Fading-averaged detection probability.
pub fn average_pd(cfg: &DetectorConfig, p: &FadingParams, ctl: &SeriesControl) -> Result<f64> {
    Ok(FadingSeries::new(p).evaluate(cfg, ctl)?.value)
}

/// The first `terms` terms of the direct series `Σ wₙ Q(n+u, x)`.
pub fn average_pd_partial(cfg: &DetectorConfig, p: &FadingParams, terms: usize) -> Result<f64> {
    let series = FadingSeries::new(p);
    let u = cfg.u as f64;
    let x = 0.5 * cfg.effective_threshold();
    let mut sum = 0.0;
    for n in 0..terms {
        sum += series.weight(n)? * reg_gamma_q(n as f64 + u, x)?;
    }
    Ok(sum)
}

/// `∫ Pd(γ) f(γ) dγ` by adaptive quadrature, independent of the series.
///
/// The range is cut where the SNR law leaves less than `1e-12` of its mass
/// on either side.
pub fn average_pd_quadrature(cfg: &DetectorConfig, p: &FadingParams) -> Result<f64> {
    if cfg.threshold == 0.0 {
        return Ok(1.0);
    }
    const TAIL: f64 = 1e-13;
    let (m, ms, c) = (p.m, p.m_s, p.scale());
    let beta = p.ln_beta().exp();
    // F(x) <= (x/c)^m / (m B)
    let lo = c * (TAIL * m * beta).powf(1.0 / m);
    // 1 - F(x) <= 2 (c/(x+c))^{m_s} / (m_s B) for x >= c
    let hi = (c * (2.0 / (TAIL * ms * beta)).powf(1.0 / ms) - c).max(2.0 * c);
    let x = 0.5 * cfg.effective_threshold();
    let acc = Accuracy::default();
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-11,
        max_intervals: 4000,
    };
    let r = integrate_log_scale(
        |g| Ok(poisson_mixture_q(cfg.u, g, x, acc)? * snr_pdf(p, g)?),
        lo,
        hi,
        &[c, p.mean_snr, x],
        tol,
    )?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// The truncation bound of the direct series after `t0` retained terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBound {
    pub t0: usize,
    pub n_cap: usize,
    /// `w-prefactor · U(m+m_s, m_s-t0+1, c) · Σ_{n=t0}^{n_cap} Γ(n+m)/n!`
    pub capped: f64,
    /// The closed form obtained by letting `n_cap → ∞`, which contains
    /// `₁F₀(m;;1)` and is infinite for every `m > 0`.
    pub closed_form: f64,
}

pub fn truncation_bound(p: &FadingParams, t0: usize, n_cap: usize) -> Result<TruncationBound> {
    if t0 < 1 {
        return Err(domain("truncation_bound", "t0", t0 as f64, "t0 >= 1"));
    }
    if n_cap < t0 {
        return Err(domain(
            "truncation_bound",
            "n_cap",
            n_cap as f64,
            "n_cap >= t0",
        ));
    }
    let series = FadingSeries::new(p);
    let ln_u = ln_tricomi_u(
        p.m + p.m_s,
        p.m_s - t0 as f64 + 1.0,
        p.scale(),
        Accuracy::default(),
    )?;
    let ln_terms: Vec<f64> = (t0..=n_cap)
        .map(|n| ln_gamma_positive(n as f64 + p.m) - ln_gamma_positive(n as f64 + 1.0))
        .collect();
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = peak + ln_terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln();
    Ok(TruncationBound {
        t0,
        n_cap,
        capped: (series.ln_prefactor + ln_u + ln_sum).exp(),
        closed_form: f64::INFINITY,
    })
}
