use std::io::Write;

use anyhow::{Context, Result};
use specsense_core::auc::{auc_average, auc_instantaneous};
use specsense_core::detection::{
    collaborative_pd, per_user_pfa, pfa, roc_curve, sls_average_pd, sls_pfa, threshold_for_pfa,
    Channel, DetectorConfig, FadingSeries, FusionRule, Scheme, SeriesControl,
};
use specsense_core::entropy::entropy_report;
use specsense_core::fading::{db_to_linear, linear_to_db, FadingParams};
use specsense_core::montecarlo::{
    simulate_auc, simulate_average_pd, simulate_fusion, simulate_pfa, simulate_sls,
    simulate_sls_false_alarm, SimConfig, SimResult,
};

use crate::output::OutputRecord;
use crate::{
    usage, AucArgs, ChannelArgs, DetectorArgs, EntropyArgs, FusionArg, PdArgs, Quantity, RocArgs,
    SchemeArgs, SeriesArgs, SimArgs, SimulateArgs,
};

const ENTROPY_SETTINGS: [(f64, f64, f64); 8] = [
    (2.0, 3.0, 5.0),
    (2.0, 30.0, 5.0),
    (20.0, 3.0, 5.0),
    (20.0, 30.0, 5.0),
    (2.0, 3.0, 15.0),
    (2.0, 30.0, 15.0),
    (20.0, 3.0, 15.0),
    (20.0, 30.0, 15.0),
];

fn snr_db(c: &ChannelArgs) -> Result<f64> {
    match c.snr_db {
        Some(x) => Ok(x),
        None => usage("missing --snr-db"),
    }
}

/// `None` for a non-fading channel.
fn fading(c: &ChannelArgs, rec: &mut OutputRecord) -> Result<Option<FadingParams>> {
    let db = snr_db(c)?;
    rec.num("snr_db", db);
    match (c.m, c.ms) {
        (None, None) => Ok(None),
        (Some(m), Some(ms)) => {
            rec.num("m", m);
            rec.num("ms", ms);
            Ok(Some(FadingParams::from_db(m, ms, db)?))
        }
        (None, Some(_)) => usage("--ms given without --m"),
        (Some(_), None) => usage("--m given without --ms"),
    }
}

fn require_fading(c: &ChannelArgs, rec: &mut OutputRecord) -> Result<FadingParams> {
    match fading(c, rec)? {
        Some(p) => Ok(p),
        None => usage("this command needs a fading channel: pass --m and --ms"),
    }
}

fn series_control(s: &SeriesArgs) -> Result<SeriesControl> {
    Ok(SeriesControl::new(s.rel_tol, s.max_terms)?)
}

fn sim_config(s: &SimArgs, rec: &mut OutputRecord) -> Result<SimConfig> {
    rec.int("trials", s.trials);
    rec.int("seed", s.seed);
    rec.int("streams", s.streams as u64);
    Ok(SimConfig::new(s.trials, s.seed, s.streams)?)
}

fn scheme(s: &SchemeArgs, rec: &mut OutputRecord) -> Result<Scheme> {
    let scheme = match (s.fusion, s.sls) {
        (FusionArg::None, None) => {
            if s.users != 1 {
                return usage("--users needs --fusion or or --fusion and");
            }
            Scheme::Single
        }
        (FusionArg::None, Some(branches)) => Scheme::Sls { branches },
        (rule, None) => Scheme::Fusion {
            rule: if rule == FusionArg::Or {
                FusionRule::Or
            } else {
                FusionRule::And
            },
            users: s.users,
        },
        (_, Some(_)) => return usage("--fusion and --sls are mutually exclusive"),
    };
    match scheme {
        Scheme::Single => rec.text("scheme", "single"),
        Scheme::Fusion { rule, users } => {
            if users == 0 {
                return usage("--users must be at least 1");
            }
            rec.text("scheme", if rule == FusionRule::Or { "or" } else { "and" });
            rec.int("users", users as u64);
        }
        Scheme::Sls { branches } => {
            if branches == 0 {
                return usage("--sls must be at least 1");
            }
            rec.text("scheme", "sls");
            rec.int("branches", branches as u64);
        }
    }
    Ok(scheme)
}

fn unit_pfa(target: f64, scheme: Scheme) -> Result<f64> {
    Ok(match scheme {
        Scheme::Single => target,
        Scheme::Fusion { rule, users } => per_user_pfa(target, users, rule)?,
        Scheme::Sls { branches } => per_user_pfa(target, branches, FusionRule::Or)?,
    })
}

/// Detector at the per-user threshold implied by the flags.
fn detector(d: &DetectorArgs, scheme: Scheme, rec: &mut OutputRecord) -> Result<DetectorConfig> {
    rec.int("u", d.u as u64);
    rec.num("noise_db", d.noise_db);
    let threshold = match (d.threshold, d.pf) {
        (Some(t), _) => t,
        (None, pf) => {
            let pf = pf.unwrap_or(0.1);
            rec.num("pf_target", pf);
            threshold_for_pfa(d.u, unit_pfa(pf, scheme)?)?
        }
    };
    rec.num("threshold", threshold);
    Ok(DetectorConfig::new(d.u, threshold)?.with_noise_uncertainty(d.noise_db)?)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("--pf-grid expects lo:hi:points, got `{spec}`"));
    if parts.len() != 3 {
        return bad();
    }
    let (Ok(lo), Ok(hi), Ok(n)) = (
        parts[0].parse::<f64>(),
        parts[1].parse::<f64>(),
        parts[2].parse::<usize>(),
    ) else {
        return bad();
    };
    Ok(specsense_core::detection::pf_grid_log(lo, hi, n)?)
}

fn simulate_scheme(
    cfg: &DetectorConfig,
    p: &FadingParams,
    scheme: Scheme,
    sim: &SimConfig,
) -> Result<SimResult> {
    Ok(match scheme {
        Scheme::Single => simulate_average_pd(cfg, p, sim),
        Scheme::Fusion { rule, users } => simulate_fusion(cfg, p, users, rule, sim)?,
        Scheme::Sls { branches } => simulate_sls(cfg, &vec![*p; branches as usize], sim)?,
    })
}

pub fn roc(a: &RocArgs, rec: &mut OutputRecord) -> Result<bool> {
    let p = fading(&a.channel, rec)?;
    rec.int("u", a.u as u64);
    rec.num("noise_db", a.noise_db);
    let scheme = scheme(&a.scheme, rec)?;
    rec.text("pf_grid", a.pf_grid.clone());
    let grid = parse_grid(&a.pf_grid)?;
    let ctl = series_control(&a.series)?;
    let channel = match p {
        Some(p) => Channel::Fading(p),
        None => Channel::Awgn {
            snr: db_to_linear(snr_db(&a.channel)?),
        },
    };
    let sim = if a.simulate {
        if p.is_none() {
            return usage("--simulate needs a fading channel: pass --m and --ms");
        }
        Some(sim_config(&a.sim, rec)?)
    } else {
        None
    };
    let curve = roc_curve(&channel, a.u, a.noise_db, scheme, &grid, &ctl)?;

    rec.columns = vec!["pf", "pd", "threshold"];
    if sim.is_some() {
        rec.columns.extend(["pd_sim", "ci95"]);
    }
    for pt in &curve.points {
        let mut row = vec![pt.pfa, pt.pd, pt.threshold];
        if let (Some(sim), Some(p)) = (&sim, &p) {
            let cfg = DetectorConfig::new(a.u, pt.threshold)?.with_noise_uncertainty(a.noise_db)?;
            let r = simulate_scheme(&cfg, p, scheme, sim)?;
            row.extend([r.estimate, r.ci95_halfwidth]);
        }
        rec.rows.push(row);
    }
    Ok(true)
}

pub fn pd(a: &PdArgs, rec: &mut OutputRecord) -> Result<bool> {
    let p = require_fading(&a.channel, rec)?;
    let cfg = detector(&a.detector, Scheme::Single, rec)?;
    let ctl = series_control(&a.series)?;
    let out = FadingSeries::new(&p).evaluate(&cfg, &ctl)?;
    rec.columns = vec!["pd", "pf", "terms", "last_term", "remainder_bound"];
    rec.rows.push(vec![
        out.value,
        pfa(&cfg),
        out.terms as f64,
        out.last_term,
        out.remainder_bound,
    ]);
    Ok(true)
}

struct Sweep {
    lo: f64,
    hi: f64,
    steps: usize,
}

impl Sweep {
    fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

fn parse_sweeps(specs: &[String]) -> Result<(Option<Sweep>, Option<Sweep>)> {
    let (mut m, mut ms) = (None, None);
    for spec in specs {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let bad = || {
            usage(format!(
                "--sweep expects m:lo:hi:steps or ms:lo:hi:steps, got `{spec}`"
            ))
        };
        if parts.len() != 4 {
            return bad();
        }
        let (Ok(lo), Ok(hi), Ok(steps)) = (
            parts[1].parse::<f64>(),
            parts[2].parse::<f64>(),
            parts[3].parse::<usize>(),
        ) else {
            return bad();
        };
        if steps == 0 || lo > hi {
            return bad();
        }
        let slot = match parts[0] {
            "m" => &mut m,
            "ms" => &mut ms,
            _ => return bad(),
        };
        if slot.is_some() {
            return usage(format!("--sweep {} given twice", parts[0]));
        }
        *slot = Some(Sweep { lo, hi, steps });
    }
    Ok((m, ms))
}

pub fn auc(a: &AucArgs, rec: &mut OutputRecord) -> Result<bool> {
    let db = snr_db(&a.channel)?;
    rec.int("u", a.u as u64);
    let (m_sweep, ms_sweep) = parse_sweeps(&a.sweep)?;
    if m_sweep.is_none() && ms_sweep.is_none() && a.channel.m.is_none() && a.channel.ms.is_none() {
        rec.num("snr_db", db);
        rec.columns = vec!["snr", "auc"];
        let g = db_to_linear(db);
        rec.rows.push(vec![g, auc_instantaneous(a.u, g)?]);
        return Ok(true);
    }
    let axis = |sweep: Option<Sweep>, fixed: Option<f64>, flag: &str| -> Result<Vec<f64>> {
        match (sweep, fixed) {
            (Some(s), None) => Ok(s.values()),
            (None, Some(v)) => Ok(vec![v]),
            (Some(_), Some(_)) => usage(format!("--{flag} conflicts with --sweep {flag}:...")),
            (None, None) => usage(format!("missing --{flag} (or --sweep {flag}:lo:hi:steps)")),
        }
    };
    let ms_values = axis(ms_sweep, a.channel.ms, "ms")?;
    let m_values = axis(m_sweep, a.channel.m, "m")?;
    rec.num("snr_db", db);
    rec.columns = vec!["m", "ms", "auc"];
    for &m in &m_values {
        for &ms in &ms_values {
            let p = FadingParams::from_db(m, ms, db)?;
            rec.rows.push(vec![m, ms, auc_average(a.u, &p)?]);
        }
    }
    Ok(true)
}

pub fn entropy(a: &EntropyArgs, rec: &mut OutputRecord) -> Result<bool> {
    rec.int("samples", a.samples as u64);
    rec.int("seed", a.seed);
    let settings: Vec<(f64, f64, f64)> = if a.table1 {
        if a.channel.m.is_some() || a.channel.ms.is_some() || a.channel.snr_db.is_some() {
            return usage("--table1 cannot be combined with --m, --ms or --snr-db");
        }
        ENTROPY_SETTINGS.to_vec()
    } else {
        let (Some(m), Some(ms), Some(db)) = (a.channel.m, a.channel.ms, a.channel.snr_db) else {
            return usage("entropy needs --m, --ms and --snr-db (or --table1)");
        };
        vec![(m, ms, db)]
    };
    rec.columns = vec![
        "m", "ms", "snr_db", "h_p", "h_pq_ray", "h_pq_nak", "kl_ray", "kl_nak", "m_hat",
        "snr_db_n", "snr_db_r",
    ];
    for (m, ms, db) in settings {
        let p = FadingParams::from_db(m, ms, db)?;
        let r = entropy_report(&p, a.samples, a.seed)
            .with_context(|| format!("entropy m={m} ms={ms} snr_db={db}"))?;
        rec.rows.push(vec![
            m,
            ms,
            db,
            r.shannon_bits,
            r.cross_rayleigh_bits,
            r.cross_nakagami_bits,
            r.kl_rayleigh_bits,
            r.kl_nakagami_bits,
            r.fitted.m_hat,
            linear_to_db(r.fitted.mean_snr_n),
            linear_to_db(r.fitted.mean_snr_r),
        ]);
    }
    Ok(true)
}

pub fn simulate(a: &SimulateArgs, rec: &mut OutputRecord) -> Result<bool> {
    let p = require_fading(&a.channel, rec)?;
    let scheme = scheme(&a.scheme, rec)?;
    rec.text(
        "quantity",
        match a.quantity {
            Quantity::Pd => "pd",
            Quantity::Pfa => "pfa",
            Quantity::Auc => "auc",
        },
    );
    let ctl = series_control(&a.series)?;
    let (result, analytic) = match a.quantity {
        Quantity::Auc => {
            if scheme != Scheme::Single {
                return usage("--quantity auc takes no --fusion or --sls");
            }
            rec.int("u", a.detector.u as u64);
            let sim = sim_config(&a.sim, rec)?;
            (
                simulate_auc(a.detector.u, &p, &sim)?,
                auc_average(a.detector.u, &p)?,
            )
        }
        Quantity::Pfa => {
            let cfg = detector(&a.detector, scheme, rec)?;
            let sim = sim_config(&a.sim, rec)?;
            match scheme {
                Scheme::Single => (simulate_pfa(&cfg, &sim), pfa(&cfg)),
                Scheme::Sls { branches } => (
                    simulate_sls_false_alarm(&cfg, branches, &sim)?,
                    sls_pfa(cfg.u, cfg.threshold, branches)?,
                ),
                Scheme::Fusion { .. } => {
                    return usage("--quantity pfa supports --sls or a single user")
                }
            }
        }
        Quantity::Pd => {
            let cfg = detector(&a.detector, scheme, rec)?;
            let sim = sim_config(&a.sim, rec)?;
            let single = FadingSeries::new(&p).evaluate(&cfg, &ctl)?.value;
            let analytic = match scheme {
                Scheme::Single => single,
                Scheme::Fusion { rule, users } => collaborative_pd(single, users, rule)?,
                Scheme::Sls { branches } => {
                    sls_average_pd(&cfg, &vec![p; branches as usize], &ctl)?
                }
            };
            (simulate_scheme(&cfg, &p, scheme, &sim)?, analytic)
        }
    };
    rec.columns = vec!["estimate", "analytic", "ci95", "std_error"];
    rec.rows.push(vec![
        result.estimate,
        analytic,
        result.ci95_halfwidth,
        result.std_error(),
    ]);
    Ok(true)
}

pub fn selftest(rec: &mut OutputRecord) -> Result<bool> {
    rec.columns = vec!["criterion", "passed", "elapsed_s"];
    let mut all = true;
    for id in 1..=specsense_validation::CRITERION_COUNT {
        let report = specsense_validation::run_criterion(id).expect("criterion ids are contiguous");
        let _ = writeln!(std::io::stderr(), "{report}");
        all &= report.passed;
        rec.rows.push(vec![
            id as f64,
            f64::from(u8::from(report.passed)),
            report.elapsed.as_secs_f64(),
        ]);
    }
    Ok(all)
}
