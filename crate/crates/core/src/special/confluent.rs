//! Confluent hypergeometric functions.
//!
//! The Tricomi function is evaluated from its integral representation
//!
//! ```text
//! U(a, b, z) = 1/Γ(a) ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,   a > 0, z > 0
//! ```
//!
//! which holds for every real `b`, integer or not. With `t = e^s` the
//! integrand becomes `exp(h(s))`, and `h` has exactly one stationary point, so
//! the integral is taken over a window around that mode and truncated where the
//! integrand has fallen by `e^{-WINDOW}`.

use super::gamma::{ln_gamma_positive, ln_gamma_signed};
use super::Accuracy;
use crate::error::{domain, no_convergence, Result};
use crate::quad::{integrate_with_breaks, Tolerance};

const WINDOW: f64 = 55.0;
const KUMMER_MAX_TERMS: usize = 100_000;

fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

fn logistic(s: f64) -> f64 {
    if s > 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

struct UIntegrand {
    a: f64,
    c: f64, // b - a - 1
    z: f64,
}

impl UIntegrand {
    fn h(&self, s: f64) -> f64 {
        -self.z * s.exp() + self.a * s + self.c * softplus(s)
    }

    fn dh(&self, s: f64) -> f64 {
        -self.z * s.exp() + self.a + self.c * logistic(s)
    }

    /// The unique zero of `dh`: `dh > 0` to its left and `< 0` to its right.
    fn mode(&self) -> f64 {
        let mut lo = -1.0;
        let mut step = 1.0;
        while self.dh(lo) <= 0.0 {
            lo -= step;
            step *= 2.0;
        }
        let mut hi = 1.0;
        step = 1.0;
        while self.dh(hi) > 0.0 {
            hi += step;
            step *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.dh(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Walks away from the mode until `h` has dropped by `WINDOW`.
    fn cutoff(&self, mode: f64, peak: f64, direction: f64) -> f64 {
        let mut step = 0.5;
        let mut s = mode;
        loop {
            let next = s + direction * step;
            if self.h(next) < peak - WINDOW {
                // Refine by bisection between s and next.
                let (mut inside, mut outside) = (s, next);
                for _ in 0..60 {
                    let mid = 0.5 * (inside + outside);
                    if self.h(mid) < peak - WINDOW {
                        outside = mid;
                    } else {
                        inside = mid;
                    }
                }
                return outside;
            }
            s = next;
            step *= 2.0;
        }
    }
}

/// `ln U(a, b, z)` for `a > 0`, `z > 0` and any real `b`.
pub fn ln_tricomi_u(a: f64, b: f64, z: f64, acc: Accuracy) -> Result<f64> {
    if !(a > 0.0) || a.is_infinite() {
        return Err(domain("tricomi_u", "a", a, "a > 0"));
    }
    if !b.is_finite() {
        return Err(domain("tricomi_u", "b", b, "b finite"));
    }
    if !(z > 0.0) || z.is_infinite() {
        return Err(domain("tricomi_u", "z", z, "z > 0"));
    }
    let f = UIntegrand {
        a,
        c: b - a - 1.0,
        z,
    };
    let mode = f.mode();
    let peak = f.h(mode);
    let left = f.cutoff(mode, peak, -1.0);
    let right = f.cutoff(mode, peak, 1.0);
    let tol = Tolerance {
        abs: 0.0,
        rel: 0.1 * acc.rel_tol,
        max_intervals: 2000,
    };
    let integral = integrate_with_breaks(|s| Ok((f.h(s) - peak).exp()), left, right, &[mode], tol)
        .map_err(|e| no_convergence("tricomi_u", format!("a={a}, b={b}, z={z}: {e}")))?;
    Ok(peak + integral.value.ln() - ln_gamma_positive(a))
}

/// Tricomi confluent hypergeometric function `U(a, b, z)`.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    tricomi_u_with(a, b, z, Accuracy::default())
}

pub fn tricomi_u_with(a: f64, b: f64, z: f64, acc: Accuracy) -> Result<f64> {
    Ok(ln_tricomi_u(a, b, z, acc)?.exp())
}

/// Kummer's function `M(a, b, z) = ₁F₁(a; b; z)` by its power series.
///
/// Summation stops once three consecutive terms fall below
/// `rel_tol * |sum|` while the term ratio is contracting.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    kummer_1f1_with(a, b, z, Accuracy::default())
}

pub fn kummer_1f1_with(a: f64, b: f64, z: f64, acc: Accuracy) -> Result<f64> {
    if !b.is_finite() || (b <= 0.0 && b == b.round()) {
        return Err(domain("kummer_1f1", "b", b, "b not a non-positive integer"));
    }
    if !a.is_finite() || !z.is_finite() {
        return Err(domain("kummer_1f1", "a/z", f64::NAN, "finite arguments"));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small_run = 0;
    for n in 0..KUMMER_MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * z / ((b + nf) * (nf + 1.0));
        term *= ratio;
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if term.abs() < acc.rel_tol * sum.abs() && ratio.abs() < 0.5 || term == 0.0 {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(no_convergence("kummer_1f1", format!("a={a}, b={b}, z={z}")))
}

/// `U(a, b, z)` from the connection formula
///
/// ```text
/// U = Γ(1-b)/Γ(a-b+1) M(a, b, z) + Γ(b-1)/Γ(a) z^{1-b} M(a-b+1, 2-b, z)
/// ```
///
/// Integer `b` is perturbed by `1e-8`. Only usable for moderate `z` (the
/// two Kummer terms cancel); serves as a cross-check of [`tricomi_u`].
pub fn tricomi_u_via_kummer(a: f64, b: f64, z: f64) -> Result<f64> {
    const PERTURBATION: f64 = 1e-8;
    if !(z > 0.0) {
        return Err(domain("tricomi_u_via_kummer", "z", z, "z > 0"));
    }
    let b = if b == b.round() { b + PERTURBATION } else { b };
    let acc = Accuracy::default();

    let first = {
        let apex = a - b + 1.0;
        if apex <= 0.0 && apex == apex.round() {
            0.0
        } else {
            let (l1, s1) = ln_gamma_signed(1.0 - b)?;
            let (l2, s2) = ln_gamma_signed(apex)?;
            s1 * s2 * (l1 - l2).exp() * kummer_1f1_with(a, b, z, acc)?
        }
    };
    let second = {
        let (l1, s1) = ln_gamma_signed(b - 1.0)?;
        let (l2, s2) = ln_gamma_signed(a)?;
        s1 * s2
            * (l1 - l2 + (1.0 - b) * z.ln()).exp()
            * kummer_1f1_with(a - b + 1.0, 2.0 - b, z, acc)?
    };
    Ok(first + second)
}
