//! Hard-decision cooperative sensing and square-law selection diversity.

use serde::{Deserialize, Serialize};

use super::{pfa_at, DetectorConfig, FadingSeries, SeriesControl};
use crate::error::{domain, Result};
use crate::fading::FadingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionRule {
    /// Declare a detection when at least one user does.
    Or,
    /// Declare a detection only when every user does.
    And,
}

fn check_probability(function: &'static str, name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(function, name, p, "0 <= p <= 1"));
    }
    Ok(())
}

fn check_count(function: &'static str, name: &'static str, n: u32) -> Result<()> {
    if n == 0 {
        return Err(domain(function, name, 0.0, ">= 1"));
    }
    Ok(())
}

fn fuse(p: f64, n: u32, rule: FusionRule) -> f64 {
    match rule {
        FusionRule::Or => 1.0 - (1.0 - p).powi(n as i32),
        FusionRule::And => p.powi(n as i32),
    }
}

/// Detection probability of `n_users` i.i.d. users under `rule`.
pub fn collaborative_pd(pd_single: f64, n_users: u32, rule: FusionRule) -> Result<f64> {
    check_probability("collaborative_pd", "pd_single", pd_single)?;
    check_count("collaborative_pd", "n_users", n_users)?;
    Ok(fuse(pd_single, n_users, rule))
}

pub fn collaborative_pfa(pfa_single: f64, n_users: u32, rule: FusionRule) -> Result<f64> {
    check_probability("collaborative_pfa", "pfa_single", pfa_single)?;
    check_count("collaborative_pfa", "n_users", n_users)?;
    Ok(fuse(pfa_single, n_users, rule))
}

/// Per-user false-alarm probability giving the overall `target` under `rule`.
pub fn per_user_pfa(target: f64, n_users: u32, rule: FusionRule) -> Result<f64> {
    check_probability("per_user_pfa", "target", target)?;
    check_count("per_user_pfa", "n_users", n_users)?;
    let inv = 1.0 / n_users as f64;
    Ok(match rule {
        FusionRule::Or => -((-target).ln_1p() * inv).exp_m1(),
        FusionRule::And => target.powf(inv),
    })
}

/// False-alarm probability of `branches`-fold selection on the largest energy.
pub fn sls_pfa(u: u32, threshold: f64, branches: u32) -> Result<f64> {
    check_count("sls_pfa", "u", u)?;
    check_count("sls_pfa", "branches", branches)?;
    if !(threshold >= 0.0) {
        return Err(domain("sls_pfa", "threshold", threshold, "threshold >= 0"));
    }
    Ok(fuse(pfa_at(u, threshold), branches, FusionRule::Or))
}

/// Average detection probability of selection over independent branches,
/// each with its own channel.
pub fn sls_average_pd(
    cfg: &DetectorConfig,
    branch_params: &[FadingParams],
    ctl: &SeriesControl,
) -> Result<f64> {
    if branch_params.is_empty() {
        return Err(domain("sls_average_pd", "branches", 0.0, ">= 1"));
    }
    let mut miss = 1.0;
    for p in branch_params {
        miss *= 1.0 - FadingSeries::new(p).evaluate(cfg, ctl)?.value;
    }
    Ok(1.0 - miss)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(collaborative_pd(0.5, 2, FusionRule::Or).unwrap(), 0.75);
        assert_eq!(collaborative_pd(0.5, 2, FusionRule::And).unwrap(), 0.25);
        assert!((collaborative_pfa(0.1, 4, FusionRule::Or).unwrap() - 0.3439).abs() < 1e-15);
        assert!((collaborative_pfa(0.1, 4, FusionRule::And).unwrap() - 1e-4).abs() < 1e-18);
        for rule in [FusionRule::Or, FusionRule::And] {
            assert_eq!(collaborative_pd(0.37, 1, rule).unwrap(), 0.37);
        }
        assert!(collaborative_pd(1.2, 2, FusionRule::Or).is_err());
        assert!(collaborative_pd(0.2, 0, FusionRule::Or).is_err());
    }

    #[test]
    fn per_user_inversion() {
        for rule in [FusionRule::Or, FusionRule::And] {
            for n in 1..9 {
                for &p in &[1e-4, 0.05, 0.5, 0.999] {
                    let q = per_user_pfa(p, n, rule).unwrap();
                    assert!((collaborative_pfa(q, n, rule).unwrap() - p).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn selection_false_alarm() {
        let l = 2.0 * 10f64.ln();
        assert!((sls_pfa(1, l, 1).unwrap() - 0.1).abs() < 1e-15);
        assert!((sls_pfa(1, l, 2).unwrap() - 0.19).abs() < 1e-15);
        let mut prev = 0.0;
        for b in 1..10 {
            let p = sls_pfa(3, 6.0, b).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn selection_detection() {
        let cfg = DetectorConfig::new(2, 7.78).unwrap();
        let p = FadingParams::from_db(1.3, 2.7, 6.0).unwrap();
        let ctl = SeriesControl::default();
        let one = sls_average_pd(&cfg, &[p], &ctl).unwrap();
        assert_eq!(one, super::super::average_pd(&cfg, &p, &ctl).unwrap());
        let two = sls_average_pd(&cfg, &[p, p], &ctl).unwrap();
        assert!((two - (1.0 - (1.0 - one).powi(2))).abs() < 1e-15);
        assert!(sls_average_pd(&cfg, &[], &ctl).is_err());
    }
}
