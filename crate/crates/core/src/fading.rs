//! Fisher–Snedecor F composite fading: Nakagami-m multipath under
//! inverse-Nakagami shadowing.
//!
//! The instantaneous SNR has density
//!
//! ```text
//! f(γ) = c^{m_s} γ^{m-1} / (B(m, m_s) (γ + c)^{m+m_s}),   c = (m_s - 1) γ̄ / m
//! ```
//!
//! i.e. `γ = c X / Y` with `X ~ Gamma(m)` and `Y ~ Gamma(m_s)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::{ln_beta, ln_gamma};

/// `10^{db/10}`
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    /// Multipath shape.
    pub m: f64,
    /// Shadowing shape; must exceed one.
    pub m_s: f64,
    /// Linear average SNR γ̄.
    pub mean_snr: f64,
    /// Mean envelope power Ω, only used by [`envelope_pdf`].
    pub omega: f64,
}

impl FadingParams {
    pub fn new(m: f64, m_s: f64, mean_snr: f64) -> Result<Self> {
        Self::with_omega(m, m_s, mean_snr, 1.0)
    }

    pub fn with_omega(m: f64, m_s: f64, mean_snr: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(domain("FadingParams", "m", m, "m > 0"));
        }
        if !(m_s > 1.0) || !m_s.is_finite() {
            return Err(domain("FadingParams", "m_s", m_s, "m_s > 1"));
        }
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(domain("FadingParams", "mean_snr", mean_snr, "mean_snr > 0"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(domain("FadingParams", "omega", omega, "omega > 0"));
        }
        Ok(Self {
            m,
            m_s,
            mean_snr,
            omega,
        })
    }

    /// Same as [`FadingParams::new`] with γ̄ given in dB.
    pub fn from_db(m: f64, m_s: f64, mean_snr_db: f64) -> Result<Self> {
        Self::new(m, m_s, db_to_linear(mean_snr_db))
    }

    pub fn mean_snr_db(&self) -> f64 {
        linear_to_db(self.mean_snr)
    }

    /// The scale `c = (m_s - 1) γ̄ / m`.
    pub fn scale(&self) -> f64 {
        (self.m_s - 1.0) * self.mean_snr / self.m
    }

    pub fn ln_beta(&self) -> f64 {
        ln_beta(self.m, self.m_s).expect("shapes validated at construction")
    }
}

/// Log of [`snr_pdf`]; `-inf` where the density vanishes.
pub fn ln_snr_pdf(p: &FadingParams, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(domain("snr_pdf", "gamma", gamma, "gamma >= 0"));
    }
    if gamma.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    let c = p.scale();
    let power = if gamma == 0.0 {
        match p.m {
            1.0 => 0.0,
            m if m > 1.0 => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        }
    } else {
        (p.m - 1.0) * gamma.ln()
    };
    Ok(p.m_s * c.ln() + power - p.ln_beta() - (p.m + p.m_s) * (gamma + c).ln())
}

/// Density of the instantaneous SNR.
pub fn snr_pdf(p: &FadingParams, gamma: f64) -> Result<f64> {
    Ok(ln_snr_pdf(p, gamma)?.exp())
}

/// Density of the received envelope `r`, with `E[r²] = Ω`.
pub fn envelope_pdf(p: &FadingParams, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("envelope_pdf", "r", r, "r >= 0"));
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    let (m, ms, omega) = (p.m, p.m_s, p.omega);
    let k = (ms - 1.0) * omega;
    let power = if r == 0.0 {
        match 2.0 * m - 1.0 {
            0.0 => 0.0,
            e if e > 0.0 => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        }
    } else {
        (2.0 * m - 1.0) * r.ln()
    };
    let ln = 2f64.ln() + m * m.ln() + ms * k.ln() + power
        - p.ln_beta()
        - (m + ms) * (m * r * r + k).ln();
    Ok(ln.exp())
}

/// Gamma density with shape `m_hat` and mean `mean_snr`: the SNR law under
/// Nakagami-m fading (Rayleigh when `m_hat = 1`).
pub fn nakagami_snr_pdf(m_hat: f64, mean_snr: f64, gamma: f64) -> Result<f64> {
    if !(m_hat > 0.0) || !m_hat.is_finite() {
        return Err(domain("nakagami_snr_pdf", "m_hat", m_hat, "m_hat > 0"));
    }
    if !(mean_snr > 0.0) || !mean_snr.is_finite() {
        return Err(domain(
            "nakagami_snr_pdf",
            "mean_snr",
            mean_snr,
            "mean_snr > 0",
        ));
    }
    if !(gamma >= 0.0) {
        return Err(domain("nakagami_snr_pdf", "gamma", gamma, "gamma >= 0"));
    }
    if gamma == 0.0 {
        return Ok(match m_hat {
            1.0 => 1.0 / mean_snr,
            m if m > 1.0 => 0.0,
            _ => f64::INFINITY,
        });
    }
    let rate = m_hat / mean_snr;
    let ln = m_hat * rate.ln() + (m_hat - 1.0) * gamma.ln() - rate * gamma - ln_gamma(m_hat)?;
    Ok(ln.exp())
}

/// Draws instantaneous SNRs as a scaled ratio of gamma variates.
#[derive(Debug, Clone, Copy)]
pub struct SnrSampler {
    scale: f64,
    multipath: Gamma<f64>,
    shadowing: Gamma<f64>,
}

impl SnrSampler {
    pub fn new(p: &FadingParams) -> Self {
        Self {
            scale: p.scale(),
            multipath: Gamma::new(p.m, 1.0).expect("m > 0"),
            shadowing: Gamma::new(p.m_s, 1.0).expect("m_s > 1"),
        }
    }
}

impl Distribution<f64> for SnrSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.multipath.sample(rng);
        let y = self.shadowing.sample(rng);
        self.scale * x / y
    }
}

/// One SNR draw. Loops should build an [`SnrSampler`] once instead.
pub fn sample_snr<R: Rng + ?Sized>(p: &FadingParams, rng: &mut R) -> f64 {
    SnrSampler::new(p).sample(rng)
}
