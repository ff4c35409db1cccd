//! Receiver operating characteristics swept over a false-alarm grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    collaborative_pd, collaborative_pfa, pd_awgn, per_user_pfa, pfa, threshold_for_pfa,
    DetectorConfig, FadingSeries, FusionRule, SeriesControl,
};
use crate::error::{domain, Result};
use crate::fading::FadingParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Channel {
    /// Fixed instantaneous SNR (linear).
    Awgn {
        snr: f64,
    },
    Fading(FadingParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    Single,
    Fusion {
        rule: FusionRule,
        users: u32,
    },
    /// Selection over `branches` i.i.d. copies of the channel.
    Sls {
        branches: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
    /// Per-user (or per-branch) threshold λ.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Sorted by ascending `pfa`, i.e. descending threshold.
    pub points: Vec<RocPoint>,
    pub u: u32,
    pub noise_uncertainty_db: f64,
    pub channel: Channel,
    pub scheme: Scheme,
    pub threshold_range: (f64, f64),
}

/// `n` log-spaced false-alarm targets in `[lo, hi]`.
pub fn pf_grid_log(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(domain("pf_grid_log", "lo/hi", lo, "0 < lo < hi < 1"));
    }
    if n < 2 {
        return Err(domain("pf_grid_log", "n", n as f64, "n >= 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn unit_pfa(target: f64, scheme: Scheme) -> Result<f64> {
    match scheme {
        Scheme::Single => Ok(target),
        Scheme::Fusion { rule, users } => per_user_pfa(target, users, rule),
        Scheme::Sls { branches } => per_user_pfa(target, branches, FusionRule::Or),
    }
}

fn combine(p: f64, scheme: Scheme) -> Result<f64> {
    match scheme {
        Scheme::Single => Ok(p),
        Scheme::Fusion { rule, users } => collaborative_pd(p, users, rule),
        Scheme::Sls { branches } => collaborative_pd(p, branches, FusionRule::Or),
    }
}

/// Builds the ROC of `channel` under `scheme` at the false-alarm targets in
/// `pf_grid`, which must be strictly increasing inside `(0, 1)`.
pub fn roc_curve(
    channel: &Channel,
    u: u32,
    noise_uncertainty_db: f64,
    scheme: Scheme,
    pf_grid: &[f64],
    ctl: &SeriesControl,
) -> Result<RocCurve> {
    if pf_grid.is_empty() {
        return Err(domain("roc_curve", "pf_grid", 0.0, "non-empty grid"));
    }
    for w in pf_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(domain("roc_curve", "pf_grid", w[1], "strictly increasing"));
        }
    }
    if let Some(&bad) = pf_grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(domain("roc_curve", "pf_grid", bad, "0 < pf < 1"));
    }
    if let Channel::Awgn { snr } = channel {
        if !(*snr >= 0.0) {
            return Err(domain("roc_curve", "snr", *snr, "snr >= 0"));
        }
    }
    let base = DetectorConfig::new(u, 0.0)?.with_noise_uncertainty(noise_uncertainty_db)?;
    let thresholds: Vec<f64> = pf_grid
        .iter()
        .map(|&p| threshold_for_pfa(u, unit_pfa(p, scheme)?))
        .collect::<Result<_>>()?;

    let series = match channel {
        Channel::Fading(p) => {
            let mut s = FadingSeries::new(p);
            let cfg = base.with_threshold(thresholds[0])?;
            let needed = s.evaluate(&cfg, ctl)?.terms;
            s.extend_to(needed)?;
            Some(s)
        }
        Channel::Awgn { .. } => None,
    };

    let points = thresholds
        .par_iter()
        .map(|&threshold| {
            let cfg = base.with_threshold(threshold)?;
            let single = match (channel, &series) {
                (Channel::Awgn { snr }, _) => pd_awgn(&cfg, *snr)?,
                (Channel::Fading(_), Some(s)) => s.evaluate(&cfg, ctl)?.value,
                (Channel::Fading(_), None) => unreachable!("series built for fading channels"),
            };
            let unit = pfa(&cfg);
            let pfa = match scheme {
                Scheme::Single => unit,
                Scheme::Fusion { rule, users } => collaborative_pfa(unit, users, rule)?,
                Scheme::Sls { branches } => collaborative_pfa(unit, branches, FusionRule::Or)?,
            };
            Ok(RocPoint {
                pfa,
                pd: combine(single, scheme)?,
                threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RocCurve {
        threshold_range: (thresholds[thresholds.len() - 1], thresholds[0]),
        points,
        u,
        noise_uncertainty_db,
        channel: *channel,
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chance_line_without_signal() {
        let grid = pf_grid_log(1e-3, 0.9, 25).unwrap();
        let roc = roc_curve(
            &Channel::Awgn { snr: 0.0 },
            3,
            0.0,
            Scheme::Single,
            &grid,
            &SeriesControl::default(),
        )
        .unwrap();
        for (pt, &target) in roc.points.iter().zip(&grid) {
            assert!((pt.pd - pt.pfa).abs() < 1e-14);
            assert!((pt.pfa - target).abs() < 1e-12);
        }
    }

    #[test]
    fn fading_curve_is_monotone_and_above_chance() {
        let grid = pf_grid_log(1e-4, 0.999, 40).unwrap();
        let p = FadingParams::from_db(2.0, 5.0, 3.0).unwrap();
        for scheme in [
            Scheme::Single,
            Scheme::Fusion {
                rule: FusionRule::Or,
                users: 3,
            },
            Scheme::Fusion {
                rule: FusionRule::And,
                users: 3,
            },
            Scheme::Sls { branches: 2 },
        ] {
            let roc = roc_curve(
                &Channel::Fading(p),
                2,
                0.0,
                scheme,
                &grid,
                &SeriesControl::default(),
            )
            .unwrap();
            for w in roc.points.windows(2) {
                assert!(w[0].pfa < w[1].pfa);
                assert!(w[0].pd <= w[1].pd + 1e-12);
                assert!(w[0].threshold > w[1].threshold);
            }
            for pt in &roc.points {
                assert!(pt.pd >= pt.pfa - 1e-12, "{scheme:?} {pt:?}");
            }
            assert!(roc.points.last().unwrap().pd > 0.99);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let ch = Channel::Awgn { snr: 1.0 };
        let ctl = SeriesControl::default();
        assert!(roc_curve(&ch, 1, 0.0, Scheme::Single, &[], &ctl).is_err());
        assert!(roc_curve(&ch, 1, 0.0, Scheme::Single, &[0.2, 0.1], &ctl).is_err());
        assert!(roc_curve(&ch, 1, 0.0, Scheme::Single, &[0.0, 0.1], &ctl).is_err());
        assert!(pf_grid_log(0.5, 0.1, 10).is_err());
    }
}
