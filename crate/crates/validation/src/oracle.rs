//! Fixed-step reference integrators.

use std::cell::RefCell;

use specsense_core::detection::{
    pd_awgn, roc_curve, Channel, DetectorConfig, Scheme, SeriesControl,
};
use specsense_core::fading::{nakagami_snr_pdf, snr_pdf, FadingParams};
use specsense_core::Result;

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `∫_lo^hi f(x) dx` by Simpson in `t = ln x`.
pub fn simpson_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(
        |t| {
            let x = t.exp();
            f(x) * x
        },
        lo.ln(),
        hi.ln(),
        n,
    )
}

/// Same as [`simpson_log`] for fallible integrands.
pub fn try_simpson_log<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, n: usize) -> Result<f64> {
    let err = RefCell::new(None);
    let v = simpson_log(
        |x| {
            f(x).unwrap_or_else(|e| {
                err.borrow_mut().get_or_insert(e);
                0.0
            })
        },
        lo,
        hi,
        n,
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

const PANELS: usize = 20_000;

/// Detection probability averaged over a gamma SNR law (Nakagami-m
/// fading, Rayleigh at `m = 1`).
pub fn nakagami_average_pd(cfg: &DetectorConfig, m: f64, mean_snr: f64) -> Result<f64> {
    let lo = mean_snr * 1e-14f64.powf(1.0 / m) * 1e-2;
    let hi = mean_snr * (1.0 + 80.0 / m);
    try_simpson_log(
        |g| Ok(pd_awgn(cfg, g)? * nakagami_snr_pdf(m, mean_snr, g)?),
        lo,
        hi,
        PANELS,
    )
}

/// `E[γ^k]` under the F law, `k < m_s`.
pub fn f_moment(p: &FadingParams, k: f64) -> f64 {
    let c = p.scale();
    let lo = c * 1e-14f64.powf(1.0 / p.m) * 1e-2;
    let hi = c * 1e-14f64.powf(-1.0 / (p.m_s - k)) * 10.0;
    simpson_log(
        |g| g.powf(k) * snr_pdf(p, g).unwrap_or(0.0),
        lo,
        hi,
        4 * PANELS,
    )
}

/// Area under the analytic ROC by the trapezoid rule over `(Pf, Pd)` points,
/// anchored at `(0, 0)` and `(1, 1)`.
pub fn roc_trapezoid_auc(u: u32, p: &FadingParams) -> Result<f64> {
    let mut grid: Vec<f64> = (0..=400)
        .map(|i| 10f64.powf(-14.0 + 12.0 * i as f64 / 400.0))
        .collect();
    let n_lin = 4000;
    grid.extend((1..n_lin).map(|i| 0.01 + 0.99 * i as f64 / n_lin as f64));
    let roc = roc_curve(
        &Channel::Fading(*p),
        u,
        0.0,
        Scheme::Single,
        &grid,
        &SeriesControl::default(),
    )?;
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    pts.extend(roc.points.iter().map(|q| (q.pfa, q.pd)));
    pts.push((1.0, 1.0));
    Ok(pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum())
}
