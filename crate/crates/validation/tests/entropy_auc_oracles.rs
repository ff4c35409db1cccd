use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specsense_core::auc::{auc_average, auc_instantaneous};
use specsense_core::detection::{pf_grid_log, roc_curve, Channel, Scheme, SeriesControl};
use specsense_core::entropy::{
    cross_entropy_nakagami, cross_entropy_rayleigh, entropy_report, shannon_entropy,
};
use specsense_core::fading::{ln_snr_pdf, sample_snr, snr_pdf, FadingParams};
use specsense_core::montecarlo::{simulate_auc, SimConfig};
use specsense_core::special::ln_gamma;
use specsense_validation::oracle::simpson_log;

const LOG2E: f64 = std::f64::consts::LOG2_E;

/// `-∫ f log₂ g` with `f` the F law.
fn cross_quadrature(p: &FadingParams, ln_g: impl Fn(f64) -> f64) -> f64 {
    let c = p.scale();
    let lo = c * 1e-16f64.powf(1.0 / p.m) * 1e-3;
    let hi = c * 1e-16f64.powf(-1.0 / (p.m_s - 1.0)) * 10.0;
    -LOG2E * simpson_log(|g| snr_pdf(p, g).unwrap() * ln_g(g), lo, hi, 200_000)
}

fn grid() -> Vec<FadingParams> {
    let mut v = Vec::new();
    for &(m, ms) in &[
        (2.0, 3.0),
        (2.0, 30.0),
        (20.0, 3.0),
        (0.8, 4.5),
        (6.0, 12.0),
    ] {
        for db in [5.0, 15.0] {
            v.push(FadingParams::from_db(m, ms, db).unwrap());
        }
    }
    v
}

#[test]
fn shannon_matches_quadrature() {
    for p in grid() {
        let want = cross_quadrature(&p, |g| ln_snr_pdf(&p, g).unwrap());
        let got = shannon_entropy(&p).unwrap();
        assert!((got - want).abs() < 1e-8, "{p:?}: {got} vs {want}");
    }
}

#[test]
fn cross_entropies_match_quadrature() {
    for p in grid() {
        for &(scale, m_hat) in &[(1.0, 1.7), (0.4, 0.6), (2.5, 9.0)] {
            let mean = scale * p.mean_snr;
            let want_r = cross_quadrature(&p, |g| -mean.ln() - g / mean);
            let got_r = cross_entropy_rayleigh(&p, mean).unwrap();
            assert!((got_r - want_r).abs() < 1e-8, "{p:?}: {got_r} vs {want_r}");
            let ln_norm = m_hat * (m_hat / mean).ln() - ln_gamma(m_hat).unwrap();
            let want_n =
                cross_quadrature(&p, |g| ln_norm + (m_hat - 1.0) * g.ln() - m_hat * g / mean);
            let got_n = cross_entropy_nakagami(&p, m_hat, mean).unwrap();
            assert!(
                (got_n - want_n).abs() < 1e-8,
                "{p:?} {m_hat}: {got_n} vs {want_n}"
            );
        }
    }
}

#[test]
fn shannon_matches_plug_in_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 1_000_000;
    for p in grid() {
        let xs: Vec<f64> = (0..n)
            .map(|_| -LOG2E * ln_snr_pdf(&p, sample_snr(&p, &mut rng)).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let h = shannon_entropy(&p).unwrap();
        assert!(
            (mean - h).abs() < 3.0 * se,
            "{p:?}: {mean} vs {h} (se {se})"
        );
    }
}

#[test]
fn average_auc_matches_quadrature() {
    let g = 10f64.powf(0.2);
    for m in [1.0, 2.5, 7.0, 15.0] {
        for ms in [1.5, 3.0, 8.0, 15.0] {
            let p = FadingParams::new(m, ms, g).unwrap();
            let c = p.scale();
            let lo = c * 1e-16f64.powf(1.0 / m) * 1e-3;
            let hi = c * 1e-14f64.powf(-1.0 / ms) * 10.0;
            for u in 1..=3 {
                let body = simpson_log(
                    |x| auc_instantaneous(u, x).unwrap() * snr_pdf(&p, x).unwrap(),
                    lo,
                    hi,
                    100_000,
                );
                let above = simpson_log(|x| snr_pdf(&p, x).unwrap(), hi, hi * 1e12, 20_000);
                let want = body + above;
                let got = auc_average(u, &p).unwrap();
                assert!((got - want).abs() < 1e-8, "{p:?} u={u}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn auc_surface_peaks_at_mildest_corner() {
    let g = 10f64.powf(0.2);
    let mut best = (0.0, 0, 0);
    for m in 1..=15 {
        for ms in 2..=15 {
            let a = auc_average(2, &FadingParams::new(m as f64, ms as f64, g).unwrap()).unwrap();
            if a > best.0 {
                best = (a, m, ms);
            }
        }
    }
    assert_eq!((best.1, best.2), (15, 15));
    let faint = auc_average(2, &FadingParams::new(2.0, 3.0, 1e-6).unwrap()).unwrap();
    assert!((faint - 0.5).abs() < 1e-6);
}

#[test]
fn light_shadowing_fit_has_small_divergence() {
    for &(m, db) in &[(1.0, 5.0), (2.0, 5.0), (20.0, 15.0)] {
        let p = FadingParams::from_db(m, 1e3, db).unwrap();
        let rep = entropy_report(&p, 1_000_000, 4).unwrap();
        assert!(
            rep.kl_nakagami_bits < 0.01,
            "{p:?}: {}",
            rep.kl_nakagami_bits
        );
        assert!(rep.kl_nakagami_bits >= 0.0);
    }
}

#[test]
fn instantaneous_auc_matches_awgn_roc_trapezoid() {
    for u in [1, 2, 4] {
        for &g in &[0.5, 2.0, 6.0] {
            let grid = pf_grid_log(1e-6, 0.999_999, 500).unwrap();
            let roc = roc_curve(
                &Channel::Awgn { snr: g },
                u,
                0.0,
                Scheme::Single,
                &grid,
                &SeriesControl::default(),
            )
            .unwrap();
            let mut pts = vec![(0.0, 0.0)];
            pts.extend(roc.points.iter().map(|q| (q.pfa, q.pd)));
            pts.push((1.0, 1.0));
            let trap: f64 = pts
                .windows(2)
                .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                .sum();
            let a = auc_instantaneous(u, g).unwrap();
            assert!((a - trap).abs() < 1e-4, "u={u} g={g}: {a} vs {trap}");
        }
    }
}

#[test]
fn average_auc_matches_rank_statistic() {
    let sim = SimConfig::new(1_000_000, 77, 16).unwrap();
    for &(m, ms, db, u) in &[(1.0, 2.0, 2.0, 2), (15.0, 15.0, 2.0, 2), (3.5, 4.3, 3.0, 1)] {
        let p = FadingParams::from_db(m, ms, db).unwrap();
        let r = simulate_auc(u, &p, &sim).unwrap();
        let want = auc_average(u, &p).unwrap();
        assert!(
            (r.estimate - want).abs() < 3.0 * r.std_error(),
            "{p:?}: {r:?} vs {want}"
        );
    }
}
