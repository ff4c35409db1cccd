//! Monte Carlo simulation of the energy detector over sampled fading.
//!
//! Trials are split over `stream_count` ChaCha8 substreams keyed by
//! `(seed, stream index)`, run in parallel and merged in stream order, so a
//! result depends only on `(seed, stream_count, trials)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{DetectorConfig, FusionRule};
use crate::error::{domain, Result};
use crate::fading::{FadingParams, SnrSampler};

pub const DEFAULT_SEED: u64 = 0x5EED_F00D_2019;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_STREAMS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub stream_count: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            stream_count: DEFAULT_STREAMS,
        }
    }
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, stream_count: u32) -> Result<Self> {
        if trials < 1000 {
            return Err(domain(
                "SimConfig",
                "trials",
                trials as f64,
                "trials >= 1000",
            ));
        }
        if stream_count == 0 {
            return Err(domain(
                "SimConfig",
                "stream_count",
                0.0,
                "stream_count >= 1",
            ));
        }
        Ok(Self {
            trials,
            seed,
            stream_count,
        })
    }

    fn stream_trials(&self, index: u32) -> u64 {
        let k = self.stream_count as u64;
        self.trials / k + u64::from((index as u64) < self.trials % k)
    }

    /// The generator of substream `index`.
    pub fn stream_rng(&self, index: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Score of one substream, counted in half units so ties stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub half_hits: u64,
    pub trials: u64,
}

impl Tally {
    pub fn estimate(&self) -> f64 {
        self.half_hits as f64 / (2.0 * self.trials as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub estimate: f64,
    pub trials: u64,
    pub ci95_halfwidth: f64,
}

impl SimResult {
    pub fn from_tallies(tallies: &[Tally]) -> Self {
        let total = tallies.iter().fold(Tally::default(), |acc, t| Tally {
            half_hits: acc.half_hits + t.half_hits,
            trials: acc.trials + t.trials,
        });
        let p = total.estimate();
        let se = (p * (1.0 - p) / total.trials as f64).sqrt();
        Self {
            estimate: p,
            trials: total.trials,
            ci95_halfwidth: 1.96 * se,
        }
    }

    /// Binomial standard error `√(p̂(1-p̂)/n)`.
    pub fn std_error(&self) -> f64 {
        self.ci95_halfwidth / 1.96
    }
}

/// Runs `trial` on every substream. `trial` returns a score in half units
/// (0, 1 or 2).
pub fn run_streams<F>(sim: &SimConfig, trial: F) -> Vec<Tally>
where
    F: Fn(&mut ChaCha8Rng) -> u8 + Sync,
{
    (0..sim.stream_count)
        .into_par_iter()
        .map(|s| {
            let mut rng = sim.stream_rng(s);
            let trials = sim.stream_trials(s);
            let half_hits = (0..trials).map(|_| trial(&mut rng) as u64).sum();
            Tally { half_hits, trials }
        })
        .collect()
}

fn simulate<F>(sim: &SimConfig, trial: F) -> SimResult
where
    F: Fn(&mut ChaCha8Rng) -> u8 + Sync,
{
    SimResult::from_tallies(&run_streams(sim, trial))
}

fn hit(b: bool) -> u8 {
    2 * b as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Signal at SNR γ plus noise.
    H1,
}

/// Energy statistic over `2u` real noise samples; under H₁ the whole signal
/// mean `√(2γ)` sits on the first sample.
pub fn sample_statistic<R: Rng + ?Sized>(
    u: u32,
    gamma: f64,
    hypothesis: Hypothesis,
    rng: &mut R,
) -> f64 {
    let mut y = 0.0;
    for k in 0..2 * u {
        let mut z: f64 = StandardNormal.sample(rng);
        if k == 0 && hypothesis == Hypothesis::H1 {
            z += (2.0 * gamma).sqrt();
        }
        y += z * z;
    }
    y
}

/// Empirical `P̄d`: fresh SNR per trial, statistic compared with `α²λ`.
pub fn simulate_average_pd(cfg: &DetectorConfig, p: &FadingParams, sim: &SimConfig) -> SimResult {
    let snr = SnrSampler::new(p);
    let threshold = cfg.effective_threshold();
    simulate(sim, |rng| {
        let g = snr.sample(rng);
        hit(sample_statistic(cfg.u, g, Hypothesis::H1, rng) > threshold)
    })
}

/// Empirical false-alarm rate at the nominal threshold.
pub fn simulate_pfa(cfg: &DetectorConfig, sim: &SimConfig) -> SimResult {
    simulate(sim, |rng| {
        hit(sample_statistic(cfg.u, 0.0, Hypothesis::H0, rng) > cfg.threshold)
    })
}

/// `n_users` independent channels and detectors, decisions fused by `rule`.
pub fn simulate_fusion(
    cfg: &DetectorConfig,
    p: &FadingParams,
    n_users: u32,
    rule: FusionRule,
    sim: &SimConfig,
) -> Result<SimResult> {
    if n_users == 0 {
        return Err(domain("simulate_fusion", "n_users", 0.0, "n_users >= 1"));
    }
    let snr = SnrSampler::new(p);
    let threshold = cfg.effective_threshold();
    Ok(simulate(sim, |rng| {
        let mut detections = 0;
        for _ in 0..n_users {
            let g = snr.sample(rng);
            detections += (sample_statistic(cfg.u, g, Hypothesis::H1, rng) > threshold) as u32;
        }
        hit(match rule {
            FusionRule::Or => detections > 0,
            FusionRule::And => detections == n_users,
        })
    }))
}

/// Selection on the largest branch energy, one channel per branch.
pub fn simulate_sls(
    cfg: &DetectorConfig,
    branch_params: &[FadingParams],
    sim: &SimConfig,
) -> Result<SimResult> {
    if branch_params.is_empty() {
        return Err(domain("simulate_sls", "branches", 0.0, ">= 1"));
    }
    let samplers: Vec<SnrSampler> = branch_params.iter().map(SnrSampler::new).collect();
    let threshold = cfg.effective_threshold();
    Ok(simulate(sim, |rng| {
        let best = samplers
            .iter()
            .map(|s| {
                let g = s.sample(rng);
                sample_statistic(cfg.u, g, Hypothesis::H1, rng)
            })
            .fold(0.0, f64::max);
        hit(best > threshold)
    }))
}

/// False-alarm rate of selection over `branches` noise-only branches.
pub fn simulate_sls_false_alarm(
    cfg: &DetectorConfig,
    branches: u32,
    sim: &SimConfig,
) -> Result<SimResult> {
    if branches == 0 {
        return Err(domain("simulate_sls_false_alarm", "branches", 0.0, ">= 1"));
    }
    Ok(simulate(sim, |rng| {
        let best = (0..branches)
            .map(|_| sample_statistic(cfg.u, 0.0, Hypothesis::H0, rng))
            .fold(0.0, f64::max);
        hit(best > cfg.threshold)
    }))
}

/// Rank-statistic AUC from paired H₁/H₀ draws, ties at half weight.
pub fn simulate_auc(u: u32, p: &FadingParams, sim: &SimConfig) -> Result<SimResult> {
    if u == 0 {
        return Err(domain("simulate_auc", "u", 0.0, "u >= 1"));
    }
    let snr = SnrSampler::new(p);
    Ok(simulate(sim, |rng| {
        let g = snr.sample(rng);
        let y1 = sample_statistic(u, g, Hypothesis::H1, rng);
        let y0 = sample_statistic(u, 0.0, Hypothesis::H0, rng);
        match y1.partial_cmp(&y0) {
            Some(std::cmp::Ordering::Greater) => 2,
            Some(std::cmp::Ordering::Equal) => 1,
            _ => 0,
        }
    }))
}
