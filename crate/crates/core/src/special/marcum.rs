//! Generalized Marcum Q-function of integer order.
//!
//! With `γ = a²/2` and `x = b²/2`, `Q_u(a, b)` is the Poisson(γ) mixture of
//! upper regularized gamma functions:
//!
//! ```text
//! Q_u(√(2γ), √(2x)) = Σₙ e^{-γ} γⁿ/n! · Q(n+u, x)
//! ```
//!
//! When the threshold sits below the mean of the statistic (`x < γ + u`) the
//! complementary mixture `1 - Σₙ e^{-γ} γⁿ/n! · P(n+u, x)` is summed instead.

use super::gamma::ln_gamma_positive;
use super::incgamma::{reg_gamma_p, reg_gamma_q};
use super::Accuracy;
use crate::error::{domain, no_convergence, Result};

const MAX_TERMS: usize = 1_000_000;

/// `Q_u(a, b)` for integer order `u ≥ 1` and `a, b ≥ 0`.
pub fn marcum_q(u: u32, a: f64, b: f64) -> Result<f64> {
    marcum_q_with(u, a, b, Accuracy::default())
}

pub fn marcum_q_with(u: u32, a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    if u == 0 {
        return Err(domain("marcum_q", "u", 0.0, "u >= 1"));
    }
    if !(a >= 0.0) || a.is_infinite() {
        return Err(domain("marcum_q", "a", a, "a >= 0"));
    }
    if !(b >= 0.0) {
        return Err(domain("marcum_q", "b", b, "b >= 0"));
    }
    poisson_mixture_q(u, 0.5 * a * a, 0.5 * b * b, acc)
}

/// `Q_u(√(2γ), √(2x))` in terms of the SNR γ and half-threshold `x = λ/2`.
pub(crate) fn poisson_mixture_q(u: u32, gamma: f64, x: f64, acc: Accuracy) -> Result<f64> {
    let u = u as f64;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if gamma == 0.0 {
        return reg_gamma_q(u, x);
    }
    let ln_gamma_snr = gamma.ln();
    let weight = |n: usize| -> f64 {
        let nf = n as f64;
        (-gamma + nf * ln_gamma_snr - ln_gamma_positive(nf + 1.0)).exp()
    };

    if x < gamma + u {
        let mut sum = 0.0;
        for n in 0..MAX_TERMS {
            let shape = n as f64 + u;
            let p = reg_gamma_p(shape, x)?;
            sum += weight(n) * p;
            // P(k+u, x) is decreasing in k and the remaining Poisson mass is
            // at most one, so the remainder is below p.
            if p == 0.0 || p <= (acc.rel_tol * (1.0 - sum)).max(acc.abs_tol) {
                return Ok((1.0 - sum).clamp(0.0, 1.0));
            }
        }
    } else {
        let mut q = reg_gamma_q(u, x)?;
        let ln_x = x.ln();
        let mut sum = 0.0;
        for n in 0..MAX_TERMS {
            let nf = n as f64;
            sum += weight(n) * q;
            if nf + 1.0 > gamma {
                // Σ_{k>n} w_k ≤ w_{n+1} / (1 - γ/(n+2)), and Q ≤ 1.
                let tail = weight(n + 1) / (1.0 - gamma / (nf + 2.0));
                if tail <= (acc.rel_tol * sum).max(acc.abs_tol) {
                    return Ok(sum.clamp(0.0, 1.0));
                }
            }
            // Q(k+1, x) = Q(k, x) + x^k e^{-x} / Γ(k+1)
            let k = nf + u;
            q += (k * ln_x - x - ln_gamma_positive(k + 1.0)).exp();
        }
    }
    Err(no_convergence(
        "marcum_q",
        format!("u={u}, gamma={gamma}, x={x}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noncentrality_is_central_tail() {
        for u in 1..5 {
            for &b in &[0.3, 1.0, 2.5, 6.0] {
                let q = marcum_q(u, 0.0, b).unwrap();
                let want = reg_gamma_q(u as f64, b * b / 2.0).unwrap();
                assert_eq!(q, want);
            }
        }
    }

    #[test]
    fn zero_threshold_is_certain() {
        for u in 1..5 {
            assert_eq!(marcum_q(u, 1.7, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn first_order_closed_form_at_equal_arguments() {
        // Q_1(a, a) = (1 + e^{-a²} I_0(a²)) / 2; I_0(1) = 1.2660658777520082
        let i0 = 1.266_065_877_752_008_2;
        let want = 0.5 * (1.0 + (-1.0f64).exp() * i0);
        assert!((marcum_q(1, 1.0, 1.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn both_branches_agree_at_switch() {
        for u in 1..4 {
            let gamma = 3.2;
            let x = gamma + u as f64;
            let acc = Accuracy::default();
            let a = poisson_mixture_q(u, gamma, x * (1.0 - 1e-12), acc).unwrap();
            let b = poisson_mixture_q(u, gamma, x, acc).unwrap();
            assert!((a - b).abs() < 1e-11, "u={u}: {a} vs {b}");
        }
    }

    #[test]
    fn extreme_snr_saturates() {
        assert!((marcum_q(2, (2.0f64 * 1e12).sqrt(), 4.0).unwrap() - 1.0).abs() < 1e-15);
        let tiny = marcum_q(2, 0.1, 60.0).unwrap();
        assert!((0.0..1e-200).contains(&tiny));
    }

    #[test]
    fn domain_errors() {
        assert!(marcum_q(0, 1.0, 1.0).is_err());
        assert!(marcum_q(1, -1.0, 1.0).is_err());
        assert!(marcum_q(1, 1.0, -1.0).is_err());
    }
}
