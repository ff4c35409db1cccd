use proptest::prelude::*;
use specsense_core::auc::{auc_average, auc_instantaneous};
use specsense_core::detection::{
    average_pd, collaborative_pd, collaborative_pfa, pd_awgn, pf_grid_log, pfa, roc_curve,
    threshold_for_pfa, Channel, DetectorConfig, FusionRule, Scheme, SeriesControl,
};
use specsense_core::entropy::{cross_entropy_nakagami, cross_entropy_rayleigh, shannon_entropy};
use specsense_core::fading::{snr_pdf, FadingParams};
use specsense_core::special::{
    kummer_1f1, ln_gamma, ln_gamma_signed, marcum_q, reg_gamma_q, tricomi_u,
};

fn channel() -> impl Strategy<Value = FadingParams> {
    (-0.5f64..1.3, -1.5f64..1.5, -5.0f64..20.0).prop_map(|(lm, lms, db)| {
        FadingParams::from_db(10f64.powf(lm), 1.0 + 10f64.powf(lms), db).unwrap()
    })
}

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn incomplete_gamma_monotone_with_limits(a in 0.05f64..60.0, x in 0.0f64..80.0, dx in 0.0f64..10.0) {
        prop_assert!(reg_gamma_q(a, x + dx).unwrap() <= reg_gamma_q(a, x).unwrap());
        prop_assert_eq!(reg_gamma_q(a, 0.0).unwrap(), 1.0);
        prop_assert!(reg_gamma_q(a, a + 50.0 * a.sqrt() + 50.0).unwrap() < 1e-12);
    }

    #[test]
    fn marcum_monotone(u in 1u32..8, a in 0.0f64..6.0, b in 0.0f64..8.0, d in 0.0f64..2.0) {
        let q = marcum_q(u, a, b).unwrap();
        prop_assert!(marcum_q(u, a, b + d).unwrap() <= q + 1e-15);
        prop_assert!(marcum_q(u, a + d, b).unwrap() >= q - 1e-15);
        prop_assert!(marcum_q(u + 1, a, b).unwrap() >= q - 1e-15);
    }

    #[test]
    fn tricomi_power_case(a in 0.05f64..20.0, z in 0.01f64..50.0) {
        let got = tricomi_u(a, a + 1.0, z).unwrap();
        let want = z.powf(-a);
        prop_assert!((got / want - 1.0).abs() < 1e-12, "{} vs {}", got, want);
    }

    #[test]
    fn ln_gamma_recurrence(t in -6.0f64..6.0) {
        let x = 10f64.powf(t);
        let lhs = ln_gamma(x + 1.0).unwrap();
        let rhs = ln_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "{}: {} vs {}", x, lhs, rhs);
    }

    #[test]
    fn snr_pdf_is_unimodal_for_m_above_one(p in channel()) {
        prop_assume!(p.m > 1.0);
        let c = p.scale();
        let mode = c * (p.m - 1.0) / (p.m_s + 1.0);
        prop_assert!(mode > 0.0 && mode.is_finite());
        let mut prev = 0.0;
        for k in 1..=60 {
            let g = mode * k as f64 / 30.0;
            let f = snr_pdf(&p, g).unwrap();
            if k <= 30 {
                prop_assert!(f >= prev);
            } else {
                prop_assert!(f <= prev);
            }
            prev = f;
        }
    }

    #[test]
    fn probabilities_fall_with_threshold(p in channel(), u in 1u32..6, l in 0.0f64..40.0, dl in 0.01f64..5.0) {
        let lo = DetectorConfig::new(u, l).unwrap();
        let hi = DetectorConfig::new(u, l + dl).unwrap();
        prop_assert!(pfa(&hi) <= pfa(&lo));
        prop_assert!(average_pd(&hi, &p, &ctl()).unwrap() <= average_pd(&lo, &p, &ctl()).unwrap() + 1e-12);
    }

    #[test]
    fn roc_non_decreasing_and_above_diagonal(p in channel(), u in 1u32..5) {
        let grid = pf_grid_log(1e-4, 0.999, 20).unwrap();
        let roc = roc_curve(&Channel::Fading(p), u, 0.0, Scheme::Single, &grid, &ctl()).unwrap();
        for w in roc.points.windows(2) {
            prop_assert!(w[1].pd >= w[0].pd - 1e-12);
        }
        for pt in &roc.points {
            prop_assert!(pt.pd >= pt.pfa - 1e-9, "{:?}", pt);
        }
    }

    #[test]
    fn fusion_ordering(p in channel(), u in 1u32..5, n in 2u32..9, pf in 1e-3f64..0.9) {
        let cfg = DetectorConfig::new(u, threshold_for_pfa(u, pf).unwrap()).unwrap();
        let single = average_pd(&cfg, &p, &ctl()).unwrap();
        prop_assert!(collaborative_pd(single, n, FusionRule::Or).unwrap() >= single);
        prop_assert!(collaborative_pd(single, n, FusionRule::And).unwrap() <= single);
        let f = pfa(&cfg);
        prop_assert!(collaborative_pfa(f, n, FusionRule::Or).unwrap() >= f);
        prop_assert!(collaborative_pfa(f, n, FusionRule::And).unwrap() <= f);
    }

    #[test]
    fn or_pair_beats_single_at_equal_false_alarm(p in channel(), u in 1u32..5, pf in 1e-3f64..0.5) {
        let grid = [pf];
        let single = roc_curve(&Channel::Fading(p), u, 0.0, Scheme::Single, &grid, &ctl()).unwrap();
        let or = roc_curve(
            &Channel::Fading(p), u, 0.0,
            Scheme::Fusion { rule: FusionRule::Or, users: 2 }, &grid, &ctl(),
        ).unwrap();
        prop_assert!(or.points[0].pd > single.points[0].pd);
    }

    #[test]
    fn noise_uncertainty_hurts(p in channel(), u in 1u32..5, b1 in 0.0f64..5.0, db in 0.01f64..3.0) {
        let cfg = DetectorConfig::new(u, threshold_for_pfa(u, 0.1).unwrap()).unwrap();
        let d1 = average_pd(&cfg.with_noise_uncertainty(b1).unwrap(), &p, &ctl()).unwrap();
        let d2 = average_pd(&cfg.with_noise_uncertainty(b1 + db).unwrap(), &p, &ctl()).unwrap();
        prop_assert!(d2 <= d1 + 1e-12);
        let g = p.mean_snr;
        let a1 = pd_awgn(&cfg.with_noise_uncertainty(b1).unwrap(), g).unwrap();
        let a2 = pd_awgn(&cfg.with_noise_uncertainty(b1 + db).unwrap(), g).unwrap();
        prop_assert!(a2 <= a1 + 1e-15);
    }

    #[test]
    fn auc_bounded(p in channel(), u in 1u32..8, g in 0.0f64..100.0) {
        let a = auc_average(u, &p).unwrap();
        prop_assert!((0.5..=1.0).contains(&a));
        let a = auc_instantaneous(u, g).unwrap();
        prop_assert!((0.5..=1.0).contains(&a));
    }

    #[test]
    fn cross_entropy_dominates_shannon(p in channel(), sr in -1.0f64..1.0, lm in -1.0f64..1.5, sn in -1.0f64..1.0) {
        let h = shannon_entropy(&p).unwrap();
        let hr = cross_entropy_rayleigh(&p, p.mean_snr * 10f64.powf(sr)).unwrap();
        let hn = cross_entropy_nakagami(&p, 10f64.powf(lm), p.mean_snr * 10f64.powf(sn)).unwrap();
        prop_assert!(hr >= h - 1e-9);
        prop_assert!(hn >= h - 1e-9);
    }

    #[test]
    fn rayleigh_cross_entropy_ignores_shapes(a in channel(), b in channel(), r in 0.1f64..10.0) {
        let b = FadingParams::new(b.m, b.m_s, a.mean_snr).unwrap();
        let ha = cross_entropy_rayleigh(&a, r).unwrap();
        let hb = cross_entropy_rayleigh(&b, r).unwrap();
        prop_assert!((ha - hb).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn connection_identity(a in 0.3f64..6.0, b in 0.1f64..3.5, z in 0.1f64..4.0) {
        prop_assume!((b - b.round()).abs() > 1e-3);
        let (l1, s1) = ln_gamma_signed(1.0 - b).unwrap();
        let (l2, s2) = ln_gamma_signed(a - b + 1.0).unwrap();
        let (l3, s3) = ln_gamma_signed(b - 1.0).unwrap();
        let (l4, s4) = ln_gamma_signed(a).unwrap();
        let t1 = s1 * s2 * (l1 - l2).exp() * kummer_1f1(a, b, z).unwrap();
        let t2 = s3 * s4 * (l3 - l4).exp() * z.powf(1.0 - b) * kummer_1f1(a - b + 1.0, 2.0 - b, z).unwrap();
        let lhs = tricomi_u(a, b, z).unwrap();
        let scale = lhs.abs().max(1e-3 * (t1.abs() + t2.abs()));
        prop_assert!((lhs - t1 - t2).abs() <= 1e-9 * scale, "{} vs {}", lhs, t1 + t2);
    }
}
