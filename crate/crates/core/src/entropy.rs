//! Shannon entropy of the F composite SNR law and cross/relative entropies
//! against Rayleigh and Nakagami-m encoders, all in bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{domain, no_convergence, Error, Result};
use crate::fading::{FadingParams, SnrSampler};
use crate::special::{digamma, ln_gamma, trigamma};

const LN2: f64 = std::f64::consts::LN_2;

/// `H(p)` in bits.
pub fn shannon_entropy(p: &FadingParams) -> Result<f64> {
    let (m, ms) = (p.m, p.m_s);
    let psi = (m + ms) * digamma(m + ms)? - (m - 1.0) * digamma(m)? - (ms + 1.0) * digamma(ms)?;
    Ok(psi / LN2 + (p.ln_beta() + p.scale().ln()) / LN2)
}

/// `H(p, q)` with `q` exponential of mean `mean_snr_r`.
pub fn cross_entropy_rayleigh(p: &FadingParams, mean_snr_r: f64) -> Result<f64> {
    if !(mean_snr_r > 0.0) || mean_snr_r.is_infinite() {
        return Err(domain(
            "cross_entropy_rayleigh",
            "mean_snr_r",
            mean_snr_r,
            "> 0",
        ));
    }
    Ok(mean_snr_r.log2() + p.mean_snr / (LN2 * mean_snr_r))
}

/// `H(p, q)` with `q` the gamma law of shape `m_hat` and mean `mean_snr_n`.
pub fn cross_entropy_nakagami(p: &FadingParams, m_hat: f64, mean_snr_n: f64) -> Result<f64> {
    if !(m_hat > 0.0) || m_hat.is_infinite() {
        return Err(domain("cross_entropy_nakagami", "m_hat", m_hat, "> 0"));
    }
    if !(mean_snr_n > 0.0) || mean_snr_n.is_infinite() {
        return Err(domain(
            "cross_entropy_nakagami",
            "mean_snr_n",
            mean_snr_n,
            "> 0",
        ));
    }
    let ln_norm = m_hat * m_hat.ln() - ln_gamma(m_hat)? - m_hat * mean_snr_n.ln();
    let mean_ln = (p.m / ((p.m_s - 1.0) * p.mean_snr)).ln() - digamma(p.m)? + digamma(p.m_s)?;
    Ok(m_hat * p.mean_snr / (LN2 * mean_snr_n) - ln_norm / LN2 + (m_hat - 1.0) / LN2 * mean_ln)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NakagamiFit {
    pub m_hat: f64,
    pub mean_snr: f64,
}

struct Moments {
    mean: f64,
    var: f64,
    mean_ln: f64,
}

fn moments(samples: &[f64]) -> Result<Moments> {
    if samples.len() < 100 {
        return Err(Error::DegenerateSample(format!(
            "{} samples, need at least 100",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|x| !(**x > 0.0) || x.is_infinite()) {
        return Err(Error::DegenerateSample(format!(
            "sample {bad} is not a positive finite SNR"
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mean_ln = samples.iter().map(|x| x.ln()).sum::<f64>() / n;
    Ok(Moments { mean, var, mean_ln })
}

/// Exponential (Rayleigh-envelope) fit: the sample mean.
pub fn fit_rayleigh(samples: &[f64]) -> Result<f64> {
    Ok(moments(samples)?.mean)
}

/// Gamma-law maximum likelihood fit of SNR samples.
///
/// Solves `ln k - ψ(k) = ln(mean) - mean(ln)` by Newton steps kept inside
/// the bracket `(1/(2s), 1/s)`.
pub fn fit_nakagami_mle(samples: &[f64]) -> Result<NakagamiFit> {
    let mo = moments(samples)?;
    let s = mo.mean.ln() - mo.mean_ln;
    if !(s > 0.0) || mo.var == 0.0 {
        return Err(Error::DegenerateSample("all samples equal".into()));
    }
    let g = |k: f64| -> Result<f64> { Ok(k.ln() - digamma(k)? - s) };
    let (mut lo, mut hi) = (0.5 / s, 1.0 / s);
    let mut k = (mo.mean * mo.mean / mo.var).clamp(lo, hi);
    for _ in 0..100 {
        let gk = g(k)?;
        if gk > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let slope = 1.0 / k - trigamma(k)?;
        let mut next = k - gk / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = next - k;
        k = next;
        if step.abs() < 1e-10 {
            return Ok(NakagamiFit {
                m_hat: k,
                mean_snr: mo.mean,
            });
        }
    }
    Err(no_convergence(
        "fit_nakagami_mle",
        format!("s = {s} after 100 iterations"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedEncoders {
    pub m_hat: f64,
    pub mean_snr_n: f64,
    pub mean_snr_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub params: FadingParams,
    pub sample_count: usize,
    pub shannon_bits: f64,
    pub cross_rayleigh_bits: f64,
    pub cross_nakagami_bits: f64,
    pub kl_rayleigh_bits: f64,
    pub kl_nakagami_bits: f64,
    pub fitted: FittedEncoders,
}

pub const DEFAULT_SAMPLE_COUNT: usize = 1_000_000;

/// Draws `sample_count` SNRs, fits both encoders and evaluates the closed forms.
pub fn entropy_report(p: &FadingParams, sample_count: usize, seed: u64) -> Result<EntropyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = SnrSampler::new(p);
    let samples: Vec<f64> = (0..sample_count)
        .map(|_| sampler.sample(&mut rng))
        .collect();
    let nak = fit_nakagami_mle(&samples)?;
    let mean_snr_r = fit_rayleigh(&samples)?;
    let shannon = shannon_entropy(p)?;
    let cross_r = cross_entropy_rayleigh(p, mean_snr_r)?;
    let cross_n = cross_entropy_nakagami(p, nak.m_hat, nak.mean_snr)?;
    Ok(EntropyReport {
        params: *p,
        sample_count,
        shannon_bits: shannon,
        cross_rayleigh_bits: cross_r,
        cross_nakagami_bits: cross_n,
        kl_rayleigh_bits: cross_r - shannon,
        kl_nakagami_bits: cross_n - shannon,
        fitted: FittedEncoders {
            m_hat: nak.m_hat,
            mean_snr_n: nak.mean_snr,
            mean_snr_r,
        },
    })
}
