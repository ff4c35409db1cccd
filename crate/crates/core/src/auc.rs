//! Area under the ROC curve of the energy detector.
//!
//! ```text
//! A(γ) = 1 - Σ_{l<u} Σ_{i≤l} C(l+u-1, l-i) γ^i e^{-γ/2} / (i! 2^{l+u+i})
//! ```
//!
//! Averaging `γ^i e^{-γ/2}` over the F law gives a Tricomi function at `c/2`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fading::FadingParams;
use crate::special::{ln_binomial, ln_gamma_positive, ln_tricomi_u, Accuracy};

/// Either an instantaneous SNR or a fading channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AucTarget {
    Snr(f64),
    Channel(FadingParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucRequest {
    pub u: u32,
    pub target: AucTarget,
}

impl AucRequest {
    pub fn evaluate(&self) -> Result<f64> {
        match self.target {
            AucTarget::Snr(g) => auc_instantaneous(self.u, g),
            AucTarget::Channel(p) => auc_average(self.u, &p),
        }
    }
}

fn check_u(function: &'static str, u: u32) -> Result<()> {
    if u == 0 {
        return Err(domain(function, "u", 0.0, "u >= 1"));
    }
    Ok(())
}

/// Calls `f(l, i, ln C(l+u-1, l-i) - (l+u) ln 2)` over the double sum.
fn for_each_term(u: u32, mut f: impl FnMut(u32, u32, f64) -> Result<()>) -> Result<()> {
    let ln2 = std::f64::consts::LN_2;
    for l in 0..u {
        for i in 0..=l {
            let ln_c = ln_binomial((l + u - 1) as u64, (l - i) as u64) - (l + u) as f64 * ln2;
            f(l, i, ln_c)?;
        }
    }
    Ok(())
}

/// AUC at a fixed SNR.
pub fn auc_instantaneous(u: u32, gamma: f64) -> Result<f64> {
    check_u("auc_instantaneous", u)?;
    if !(gamma >= 0.0) || gamma.is_infinite() {
        return Err(domain("auc_instantaneous", "gamma", gamma, "gamma >= 0"));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut miss = 0.0;
    for_each_term(u, |_, i, ln_c| {
        if gamma == 0.0 && i > 0 {
            return Ok(());
        }
        let power = if i == 0 { 0.0 } else { i as f64 * gamma.ln() };
        miss +=
            (ln_c + power - ln_gamma_positive(i as f64 + 1.0) - i as f64 * ln2 - 0.5 * gamma).exp();
        Ok(())
    })?;
    Ok((1.0 - miss).clamp(0.5, 1.0))
}

/// AUC averaged over F composite fading.
pub fn auc_average(u: u32, p: &FadingParams) -> Result<f64> {
    check_u("auc_average", u)?;
    let (m, ms) = (p.m, p.m_s);
    let c = p.scale();
    let ln2 = std::f64::consts::LN_2;
    let ln_common = ms * c.ln() - ms * ln2 - p.ln_beta();
    let acc = Accuracy::default();
    let ln_u: Vec<f64> = (0..u)
        .map(|i| ln_tricomi_u(m + ms, ms - i as f64 + 1.0, 0.5 * c, acc))
        .collect::<Result<_>>()?;
    let mut miss = 0.0;
    for_each_term(u, |_, i, ln_c| {
        let i_f = i as f64;
        miss += (ln_c + ln_common + ln_gamma_positive(m + i_f) - ln_gamma_positive(i_f + 1.0)
            + ln_u[i as usize])
            .exp();
        Ok(())
    })?;
    Ok((1.0 - miss).clamp(0.5, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chance_level_without_signal() {
        for u in 1..12 {
            assert!((auc_instantaneous(u, 0.0).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn single_degree_closed_form() {
        let want = 1.0 - (-1.0f64).exp() / 2.0;
        assert!((auc_instantaneous(1, 2.0).unwrap() - want).abs() < 1e-15);
        assert!(auc_instantaneous(2, 50.0).unwrap() >= 0.999);
    }

    #[test]
    fn increases_with_snr() {
        let mut prev = 0.0;
        for k in 0..40 {
            let a = auc_instantaneous(4, 0.25 * k as f64).unwrap();
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn request_dispatch() {
        let p = FadingParams::from_db(2.0, 4.0, 2.0).unwrap();
        let r = AucRequest {
            u: 2,
            target: AucTarget::Channel(p),
        };
        assert_eq!(r.evaluate().unwrap(), auc_average(2, &p).unwrap());
        let r = AucRequest {
            u: 2,
            target: AucTarget::Snr(1.5),
        };
        assert_eq!(r.evaluate().unwrap(), auc_instantaneous(2, 1.5).unwrap());
        assert!(auc_instantaneous(0, 1.0).is_err());
        assert!(auc_instantaneous(1, -1.0).is_err());
    }

    #[test]
    fn heavy_shadowing_is_worse() {
        let g = 10f64.powf(0.2);
        let harsh = auc_average(2, &FadingParams::new(1.0, 2.0, g).unwrap()).unwrap();
        let mild = auc_average(2, &FadingParams::new(15.0, 15.0, g).unwrap()).unwrap();
        assert!(harsh < mild);
        assert!((0.5..=1.0).contains(&harsh));
    }
}
