//! The acceptance grid. Each criterion is timed and reported as one line.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specsense_core::auc::{auc_average, auc_instantaneous};
use specsense_core::detection::{
    average_pd, average_pd_quadrature, collaborative_pd, collaborative_pfa, per_user_pfa,
    pf_grid_log, pfa, roc_curve, sls_average_pd, sls_pfa, threshold_for_pfa, truncation_bound,
    Channel, DetectorConfig, FadingSeries, FusionRule, Scheme, SeriesControl,
};
use specsense_core::entropy::{
    cross_entropy_nakagami, cross_entropy_rayleigh, entropy_report, shannon_entropy,
};
use specsense_core::fading::{db_to_linear, FadingParams};
use specsense_core::montecarlo::{
    simulate_auc, simulate_average_pd, simulate_fusion, simulate_sls, simulate_sls_false_alarm,
    SimConfig, SimResult, DEFAULT_SEED,
};
use specsense_core::special::reg_gamma_p;
use specsense_core::Result;

use crate::oracle::{nakagami_average_pd, roc_trapezoid_auc};

pub const CRITERION_COUNT: u8 = 9;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} {verdict}: {} [{:.3} s",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(b) = self.budget {
            write!(f, ", limit {} s", b.as_secs_f64())?;
        }
        write!(f, "] {}", self.detail)
    }
}

struct Check {
    passed: bool,
    detail: String,
}

struct Entry {
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Check>,
}

fn entry(id: u8) -> Option<Entry> {
    let s = |title, budget: Option<f64>, run| Entry {
        title,
        budget: budget.map(Duration::from_secs_f64),
        run,
    };
    Some(match id {
        1 => s(
            "noise-uncertainty anchors",
            Some(1.0),
            pd_anchor as fn() -> _,
        ),
        2 => s("entropy closed forms", Some(0.1), entropy_closed_forms),
        3 => s("Nakagami MLE of F samples", Some(10.0), entropy_mle),
        4 => s("series vs quadrature", Some(30.0), series_vs_quadrature),
        5 => s(
            "closed forms vs Monte Carlo",
            Some(120.0),
            closed_forms_vs_monte_carlo,
        ),
        6 => s("AUC consistency", None, auc_consistency),
        7 => s("Nakagami-m limit", None, nakagami_limit),
        8 => s("randomized properties", None, property_suites),
        9 => s("truncation bound", None, truncation),
        _ => return None,
    })
}

/// Runs criterion `id` (1 to [`CRITERION_COUNT`]).
pub fn run_criterion(id: u8) -> Option<CriterionReport> {
    let entry = entry(id)?;
    let start = Instant::now();
    let outcome = (entry.run)();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(c) => (c.passed, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = entry.budget {
        if elapsed > b {
            passed = false;
            detail.push_str("; over the time limit");
        }
    }
    Some(CriterionReport {
        id,
        title: entry.title,
        passed,
        detail,
        elapsed,
        budget: entry.budget,
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=CRITERION_COUNT).filter_map(run_criterion).collect()
}

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

/// Average SNR in dB at which `P̄d` reaches `target`.
pub fn snr_db_for_pd(cfg: &DetectorConfig, m: f64, m_s: f64, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-30.0, 80.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if average_pd(cfg, &FadingParams::from_db(m, m_s, mid)?, &ctl())? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn pd_anchor() -> Result<Check> {
    let p = FadingParams::from_db(1.3, 2.7, 6.0)?;
    let cfg0 = DetectorConfig::new(2, 7.78)?;
    let cfg2 = cfg0.with_noise_uncertainty(2.0)?;
    let pd0 = average_pd(&cfg0, &p, &ctl())?;
    let pd2 = average_pd(&cfg2, &p, &ctl())?;
    let gap = snr_db_for_pd(&cfg2, 1.3, 2.7, 0.9)? - snr_db_for_pd(&cfg0, 1.3, 2.7, 0.9)?;
    Ok(Check {
        passed: (pd0 - 0.52).abs() <= 0.03
            && (pd2 - 0.15).abs() <= 0.03
            && (gap - 5.0).abs() <= 0.5,
        detail: format!("Pd(0 dB)={pd0:.4}, Pd(2 dB)={pd2:.4}, extra SNR for Pd=0.9: {gap:.3} dB"),
    })
}

struct Row {
    m: f64,
    m_s: f64,
    db: f64,
    shannon: f64,
    cross_rayleigh: f64,
    m_hat: f64,
    cross_nakagami: f64,
}

const fn row(m: f64, m_s: f64, db: f64, h: f64, hr: f64, m_hat: f64, hn: f64) -> Row {
    Row {
        m,
        m_s,
        db,
        shannon: h,
        cross_rayleigh: hr,
        m_hat,
        cross_nakagami: hn,
    }
}

const TABLE: [Row; 8] = [
    row(2.0, 3.0, 5.0, 3.005, 3.104, 1.14, 3.096),
    row(2.0, 30.0, 5.0, 2.959, 3.104, 1.89, 2.960),
    row(20.0, 3.0, 5.0, 2.730, 3.104, 2.11, 2.913),
    row(20.0, 30.0, 5.0, 1.870, 3.104, 11.99, 1.876),
    row(2.0, 3.0, 15.0, 6.327, 6.426, 1.14, 6.418),
    row(2.0, 30.0, 15.0, 6.281, 6.426, 1.88, 6.282),
    row(20.0, 3.0, 15.0, 6.051, 6.426, 2.11, 6.235),
    row(20.0, 30.0, 15.0, 5.191, 6.426, 11.98, 5.198),
];

fn entropy_closed_forms() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for r in &TABLE {
        let p = FadingParams::from_db(r.m, r.m_s, r.db)?;
        let h = shannon_entropy(&p)?;
        let hr = cross_entropy_rayleigh(&p, p.mean_snr)?;
        let hn = cross_entropy_nakagami(&p, r.m_hat, p.mean_snr)?;
        worst = worst
            .max((h - r.shannon).abs())
            .max((hr - r.cross_rayleigh).abs())
            .max((hn - r.cross_nakagami).abs());
    }
    Ok(Check {
        passed: worst <= 0.005,
        detail: format!("24 values, worst deviation {worst:.5} bits"),
    })
}

fn entropy_mle() -> Result<Check> {
    let mut passed = true;
    let mut parts = Vec::new();
    for r in TABLE.iter().filter(|r| r.db == 5.0) {
        let p = FadingParams::from_db(r.m, r.m_s, r.db)?;
        let rep = entropy_report(&p, 1_000_000, DEFAULT_SEED)?;
        let rel = (rep.fitted.mean_snr_n / p.mean_snr - 1.0).abs();
        passed &= (rep.fitted.m_hat - r.m_hat).abs() <= 0.05 && rel <= 0.01;
        parts.push(format!(
            "m̂={:.3} ({}) Δγ̄={:.2}%",
            rep.fitted.m_hat,
            r.m_hat,
            100.0 * rel
        ));
    }
    Ok(Check {
        passed,
        detail: parts.join(", "),
    })
}

/// The grid shared by criteria 4 and 9: `(p, cfg)` at `Pf = 0.1`.
pub fn equivalence_grid() -> Result<Vec<(FadingParams, DetectorConfig)>> {
    let mut out = Vec::new();
    for m in [1.0, 1.3, 3.5, 5.6, 20.0] {
        for m_s in [1.1, 2.7, 4.3, 30.0] {
            for db in [0.0, 3.0, 7.0, 15.0] {
                for u in 1..=3 {
                    let p = FadingParams::from_db(m, m_s, db)?;
                    out.push((p, DetectorConfig::new(u, threshold_for_pfa(u, 0.1)?)?));
                }
            }
        }
    }
    Ok(out)
}

fn series_vs_quadrature() -> Result<Check> {
    let grid = equivalence_grid()?;
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (p, cfg) in &grid {
        let d = (average_pd(cfg, p, &ctl())? - average_pd_quadrature(cfg, p)?).abs();
        if d >= worst {
            worst = d;
            at = format!(
                "m={}, m_s={}, {:.0} dB, u={}",
                p.m,
                p.m_s,
                p.mean_snr_db(),
                cfg.u
            );
        }
    }
    Ok(Check {
        passed: worst <= 1e-6,
        detail: format!("{} points, max |Δ|={worst:.2e} at {at}", grid.len()),
    })
}

struct McPoint {
    label: String,
    analytic: f64,
    sim: SimResult,
}

impl McPoint {
    fn within_3_sigma(&self) -> bool {
        let sigma = (self.analytic * (1.0 - self.analytic) / self.sim.trials as f64).sqrt();
        (self.sim.estimate - self.analytic).abs() <= 3.0 * sigma
    }
}

fn closed_forms_vs_monte_carlo() -> Result<Check> {
    let trials = 100_000;
    let mut k = 0u64;
    let mut sim = || {
        k += 1;
        SimConfig::new(trials, DEFAULT_SEED.wrapping_add(k), 16)
    };
    let mut points = Vec::new();

    let channels = [
        (1.3, 2.7, 6.0, 2),
        (3.5, 4.3, 3.0, 2),
        (5.6, 1.1, 7.0, 1),
        (2.0, 5.0, 0.0, 3),
        (1.0, 2.2, 10.0, 1),
    ];
    for &(m, m_s, db, u) in &channels {
        let p = FadingParams::from_db(m, m_s, db)?;
        for pf in [0.01, 0.1, 0.5] {
            let cfg = DetectorConfig::new(u, threshold_for_pfa(u, pf)?)?;
            points.push(McPoint {
                label: format!("Pd m={m} m_s={m_s} {db} dB u={u} Pf={pf}"),
                analytic: average_pd(&cfg, &p, &ctl())?,
                sim: simulate_average_pd(&cfg, &p, &sim()?),
            });
        }
    }
    let p7 = FadingParams::from_db(1.3, 2.7, 6.0)?;
    for beta in [0.0, 2.0] {
        let cfg = DetectorConfig::new(2, 7.78)?.with_noise_uncertainty(beta)?;
        points.push(McPoint {
            label: format!("Pd beta={beta} dB"),
            analytic: average_pd(&cfg, &p7, &ctl())?,
            sim: simulate_average_pd(&cfg, &p7, &sim()?),
        });
    }

    let p5 = FadingParams::from_db(3.5, 4.3, 3.0)?;
    for n in [2, 4, 8] {
        for rule in [FusionRule::Or, FusionRule::And] {
            for pf in [0.01, 0.1] {
                let cfg =
                    DetectorConfig::new(2, threshold_for_pfa(2, per_user_pfa(pf, n, rule)?)?)?;
                points.push(McPoint {
                    label: format!("fusion {rule:?} N={n} Pf={pf}"),
                    analytic: collaborative_pd(average_pd(&cfg, &p5, &ctl())?, n, rule)?,
                    sim: simulate_fusion(&cfg, &p5, n, rule, &sim()?)?,
                });
            }
        }
    }

    let p6 = FadingParams::from_db(5.6, 1.1, 7.0)?;
    for l in [1, 2, 4] {
        for u in [1, 3] {
            for pf in [0.01, 0.1] {
                let lambda = threshold_for_pfa(u, per_user_pfa(pf, l, FusionRule::Or)?)?;
                let cfg = DetectorConfig::new(u, lambda)?;
                let branches = vec![p6; l as usize];
                points.push(McPoint {
                    label: format!("SLS L={l} u={u} Pf={pf}"),
                    analytic: sls_average_pd(&cfg, &branches, &ctl())?,
                    sim: simulate_sls(&cfg, &branches, &sim()?)?,
                });
                points.push(McPoint {
                    label: format!("SLS false alarm L={l} u={u} Pf={pf}"),
                    analytic: sls_pfa(u, lambda, l)?,
                    sim: simulate_sls_false_alarm(&cfg, l, &sim()?)?,
                });
            }
        }
    }

    for m in [1.0, 15.0] {
        for m_s in [2.0, 15.0] {
            let p = FadingParams::from_db(m, m_s, 2.0)?;
            points.push(McPoint {
                label: format!("AUC m={m} m_s={m_s}"),
                analytic: auc_average(2, &p)?,
                sim: simulate_auc(2, &p, &sim()?)?,
            });
        }
    }

    let inside = points.iter().filter(|p| p.within_3_sigma()).count();
    let misses: Vec<&str> = points
        .iter()
        .filter(|p| !p.within_3_sigma())
        .map(|p| p.label.as_str())
        .collect();
    let frac = inside as f64 / points.len() as f64;
    Ok(Check {
        passed: frac >= 0.95,
        detail: format!(
            "{inside}/{} points within 3σ ({:.1}%){}",
            points.len(),
            100.0 * frac,
            if misses.is_empty() {
                String::new()
            } else {
                format!("; outside: {}", misses.join(", "))
            }
        ),
    })
}

fn auc_consistency() -> Result<Check> {
    let mut trap_worst: f64 = 0.0;
    let cases = [
        (1.0, 2.0, 2.0, 2),
        (1.0, 15.0, 2.0, 2),
        (15.0, 2.0, 2.0, 2),
        (15.0, 15.0, 2.0, 2),
        (1.3, 2.7, 6.0, 1),
        (5.6, 1.1, 7.0, 3),
    ];
    for &(m, m_s, db, u) in &cases {
        let p = FadingParams::from_db(m, m_s, db)?;
        trap_worst = trap_worst.max((auc_average(u, &p)? - roc_trapezoid_auc(u, &p)?).abs());
    }

    let mut closed_worst: f64 = 0.0;
    for i in 0..50 {
        let g = 0.5 * i as f64;
        let want = 1.0 - (-g / 2.0).exp() / 2.0;
        closed_worst = closed_worst.max((auc_instantaneous(1, g)? - want).abs());
    }

    let g = db_to_linear(2.0);
    let mut surface = Vec::new();
    for m in 1..=15 {
        let row: Vec<f64> = (2..=15)
            .map(|ms| auc_average(2, &FadingParams::new(m as f64, ms as f64, g)?))
            .collect::<Result<_>>()?;
        surface.push(row);
    }
    let along_ms = surface.iter().all(|r| r.windows(2).all(|w| w[1] > w[0]));
    let along_m = surface
        .windows(2)
        .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b > a));

    Ok(Check {
        passed: trap_worst <= 1e-4 && closed_worst <= 1e-12 && along_m && along_ms,
        detail: format!(
            "trapezoid max |Δ|={trap_worst:.2e}, u=1 closed form max |Δ|={closed_worst:.1e}, \
             surface increasing in m: {along_m}, in m_s: {along_ms}"
        ),
    })
}

fn nakagami_limit() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for m in [1.0, 2.0, 4.0] {
        for db in [0.0, 5.0, 10.0] {
            let p = FadingParams::from_db(m, 1e4, db)?;
            for u in [1, 2] {
                for pf in [0.01, 0.1] {
                    let cfg = DetectorConfig::new(u, threshold_for_pfa(u, pf)?)?;
                    let d = (average_pd(&cfg, &p, &ctl())?
                        - nakagami_average_pd(&cfg, m, p.mean_snr)?)
                    .abs();
                    worst = worst.max(d);
                    n += 1;
                }
            }
        }
    }
    Ok(Check {
        passed: worst <= 1e-3,
        detail: format!("{n} points with m_s=1e4, max |Δ|={worst:.2e}"),
    })
}

const DRAWS: usize = 200;

fn random_params(rng: &mut ChaCha8Rng) -> Result<FadingParams> {
    let m = 10f64.powf(rng.random_range(-0.5..1.3));
    let m_s = 1.0 + 10f64.powf(rng.random_range(-1.5..1.5));
    FadingParams::from_db(m, m_s, rng.random_range(-5.0..20.0))
}

fn property_suites() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |suite: &str, what: String| failures.push(format!("{suite}: {what}"));

    let grid = pf_grid_log(1e-4, 0.999, 25)?;
    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let u = rng.random_range(1..=5);
        let beta = rng.random_range(0.0..3.0);
        let scheme = match rng.random_range(0..4) {
            0 => Scheme::Single,
            1 => Scheme::Fusion {
                rule: FusionRule::Or,
                users: rng.random_range(2..=8),
            },
            2 => Scheme::Fusion {
                rule: FusionRule::And,
                users: rng.random_range(2..=8),
            },
            _ => Scheme::Sls {
                branches: rng.random_range(2..=4),
            },
        };
        let roc = roc_curve(&Channel::Fading(p), u, beta, scheme, &grid, &ctl())?;
        if !roc
            .points
            .windows(2)
            .all(|w| w[1].pfa > w[0].pfa && w[1].pd >= w[0].pd - 1e-12)
        {
            fail("roc", format!("{p:?} u={u} {scheme:?}"));
        }
    }

    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let u = rng.random_range(1..=5);
        let n = rng.random_range(2..=8);
        let cfg = DetectorConfig::new(u, threshold_for_pfa(u, rng.random_range(1e-3..0.9))?)?;
        let single = average_pd(&cfg, &p, &ctl())?;
        let pf = pfa(&cfg);
        let or = collaborative_pd(single, n, FusionRule::Or)?;
        let and = collaborative_pd(single, n, FusionRule::And)?;
        let or_f = collaborative_pfa(pf, n, FusionRule::Or)?;
        let and_f = collaborative_pfa(pf, n, FusionRule::And)?;
        if !(or >= single && single >= and && or_f >= pf && pf >= and_f) {
            fail("fusion", format!("{p:?} u={u} N={n}"));
        }
    }

    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let u = rng.random_range(1..=5);
        let cfg = DetectorConfig::new(u, threshold_for_pfa(u, rng.random_range(1e-3..0.9))?)?;
        let b1: f64 = rng.random_range(0.0..5.0);
        let b2 = b1 + rng.random_range(0.01..3.0);
        let d1 = average_pd(&cfg.with_noise_uncertainty(b1)?, &p, &ctl())?;
        let d2 = average_pd(&cfg.with_noise_uncertainty(b2)?, &p, &ctl())?;
        if d2 > d1 + 1e-12 {
            fail(
                "noise",
                format!("{p:?} u={u} beta {b1}->{b2}: {d1} -> {d2}"),
            );
        }
    }

    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let rep = entropy_report(&p, 2_000, rng.random())?;
        if rep.kl_rayleigh_bits < -1e-12 || rep.kl_nakagami_bits < -1e-12 {
            fail(
                "kl",
                format!("{p:?}: {} {}", rep.kl_rayleigh_bits, rep.kl_nakagami_bits),
            );
        }
    }

    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let h = shannon_entropy(&p)?;
        let mean_r = p.mean_snr * 10f64.powf(rng.random_range(-1.0..1.0));
        let m_hat = 10f64.powf(rng.random_range(-1.0..1.5));
        let mean_n = p.mean_snr * 10f64.powf(rng.random_range(-1.0..1.0));
        let hr = cross_entropy_rayleigh(&p, mean_r)?;
        let hn = cross_entropy_nakagami(&p, m_hat, mean_n)?;
        if hr < h - 1e-12 || hn < h - 1e-12 {
            fail("cross", format!("{p:?}: H={h} Hr={hr} Hn={hn}"));
        }
    }

    let pools: Vec<rayon::ThreadPool> = [1, 3, 8]
        .iter()
        .map(|&n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
        })
        .collect();
    for _ in 0..DRAWS {
        let p = random_params(&mut rng)?;
        let u = rng.random_range(1..=4);
        let cfg = DetectorConfig::new(u, threshold_for_pfa(u, 0.1)?)?;
        let sim = SimConfig::new(
            rng.random_range(1_000..4_000),
            rng.random(),
            rng.random_range(1..=12),
        )?;
        let runs: Vec<SimResult> = pools
            .iter()
            .map(|pool| pool.install(|| simulate_average_pd(&cfg, &p, &sim)))
            .collect();
        if runs.windows(2).any(|w| w[0] != w[1]) {
            fail("determinism", format!("{p:?} {sim:?}"));
        }
    }

    let shown: Vec<&String> = failures.iter().take(5).collect();
    Ok(Check {
        passed: failures.is_empty(),
        detail: format!(
            "6 suites x {DRAWS} draws, {} failures{}",
            failures.len(),
            if shown.is_empty() {
                String::new()
            } else {
                format!(": {shown:?}")
            }
        ),
    })
}

/// `1 - Σ wₙ P(n+u, x)` over `terms` terms, skipping terms whose
/// incomplete gamma factor underflows to zero.
pub fn reference_complement(cfg: &DetectorConfig, p: &FadingParams, terms: usize) -> Result<f64> {
    let series = FadingSeries::new(p);
    let x = 0.5 * cfg.effective_threshold();
    let mut sum = 0.0;
    for n in 0..terms {
        let g = reg_gamma_p(n as f64 + cfg.u as f64, x)?;
        if g == 0.0 {
            continue;
        }
        sum += series.weight(n)? * g;
    }
    Ok(1.0 - sum)
}

fn truncation() -> Result<Check> {
    let mut sentinel = true;
    for m in [0.05, 0.5, 1.0, 1.3, 3.5, 5.6, 20.0, 150.0] {
        for m_s in [1.1, 4.3, 30.0] {
            let b = truncation_bound(&FadingParams::new(m, m_s, 2.0)?, 1, 1)?;
            sentinel &= b.closed_form == f64::INFINITY;
        }
    }
    let c = ctl();
    let mut worst: f64 = 0.0;
    for (p, cfg) in equivalence_grid()? {
        let reference = reference_complement(&cfg, &p, 10_000)?;
        let adaptive = FadingSeries::new(&p).evaluate(&cfg, &c)?.value;
        worst = worst.max((adaptive - reference).abs() / reference);
    }
    Ok(Check {
        passed: sentinel && worst <= c.rel_tol,
        detail: format!(
            "closed form infinite: {sentinel}, max realized remainder / Pd = {worst:.2e} (rel_tol {:.0e})",
            c.rel_tol
        ),
    })
}
