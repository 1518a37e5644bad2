use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::access::{resolve_access, sample_sinr, sinr_against};
use super::field::{default_r_sim, sample_field_with};
use crate::analytic::AccessEvent;
use crate::error::SimError;
use crate::model::{AccessScenario, NetworkConfig};

pub const Z95: f64 = 1.959_963_984_540_054;
pub const Z99: f64 = 2.575_829_303_548_901;
const MAX_DISK_DOUBLINGS: usize = 4;

/// Sample mean with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n_trials: usize,
    pub seed: u64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64], seed: u64) -> Estimate {
        let n = samples.len();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                ci_halfwidth: f64::INFINITY,
                n_trials: 0,
                seed,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::INFINITY
        };
        Estimate {
            mean,
            ci_halfwidth: Z95 * (var / n as f64).sqrt(),
            n_trials: n,
            seed,
        }
    }

    pub fn stderr(&self) -> f64 {
        self.ci_halfwidth / Z95
    }

    /// Half-width at another normal quantile.
    pub fn halfwidth(&self, z: f64) -> f64 {
        z * self.stderr()
    }

    pub fn contains(&self, value: f64, z: f64) -> bool {
        (value - self.mean).abs() <= self.halfwidth(z)
    }
}

/// Interference seen by a transmission that starts after the request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceModel {
    /// A fresh stationary field: positions and activity redrawn.
    #[default]
    Redrawn,
    /// Same positions as the access search, activity re-marked. Keeps the
    /// thinning that the search imposes inside the threshold disk.
    Persistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub n_trials: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Disk radius; `None` picks [`default_r_sim`].
    pub r_sim: Option<f64>,
    pub interference: InterferenceModel,
}

impl SimOptions {
    pub fn new(n_trials: usize, seed: u64) -> Self {
        SimOptions {
            n_trials,
            seed,
            workers: None,
            r_sim: None,
            interference: InterferenceModel::default(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_r_sim(mut self, r_sim: f64) -> Self {
        self.r_sim = Some(r_sim);
        self
    }

    pub fn with_interference(mut self, model: InterferenceModel) -> Self {
        self.interference = model;
        self
    }
}

/// Outcome of one independent trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub event: AccessEvent,
    pub distance: f64,
    pub wait: f64,
    pub sinr: f64,
}

impl TrialRecord {
    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr.log10()
    }
}

/// Generator for trial `trial`: the seed picks the key, the trial the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(
    cfg: &NetworkConfig,
    scen: &AccessScenario,
    r_sim: f64,
    model: InterferenceModel,
    seed: u64,
    trial: usize,
) -> Result<TrialRecord, SimError> {
    let mut rng = trial_rng(seed, trial);
    let mut r = r_sim;
    for attempt in 0..=MAX_DISK_DOUBLINGS {
        let field = sample_field_with(cfg, r, &mut rng);
        match resolve_access(&field, scen) {
            Ok(out) => {
                let sinr = if out.wait > 0.0 && model == InterferenceModel::Redrawn {
                    let fresh = sample_field_with(cfg, r, &mut rng);
                    sinr_against(field.cells[out.server].gain, out.serving_distance, &fresh, cfg)
                } else {
                    sample_sinr(&field, &out, cfg, out.wait)
                };
                return Ok(TrialRecord {
                    trial,
                    event: out.event,
                    distance: out.serving_distance,
                    wait: out.wait,
                    sinr,
                });
            }
            Err(SimError::NoServer { .. }) if attempt < MAX_DISK_DOUBLINGS => {
                log::debug!("trial {trial}: no server within {r} m, doubling disk");
                r *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(SimError::NoServer { r_sim: r })
}

fn in_pool<T: Send, F: FnOnce() -> T + Send>(workers: Option<usize>, f: F) -> Result<T, SimError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SimError::Invalid(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check(opts: &SimOptions) -> Result<(), SimError> {
    if opts.n_trials == 0 {
        return Err(SimError::Invalid("n_trials must be at least 1".into()));
    }
    if let Some(r) = opts.r_sim {
        if !(r > 0.0) || !r.is_finite() {
            return Err(SimError::Invalid(format!("r_sim must be positive and finite, got {r}")));
        }
    }
    Ok(())
}

/// Independent access trials, returned in trial order.
///
/// Every trial draws from its own stream of the seeded generator, so the
/// result does not depend on how trials are spread across workers.
pub fn run_trials(cfg: &NetworkConfig, scen: &AccessScenario, opts: &SimOptions) -> Result<Vec<TrialRecord>, SimError> {
    check(opts)?;
    let r_sim = opts.r_sim.unwrap_or_else(|| default_r_sim(cfg, scen.r_th()));
    in_pool(opts.workers, || {
        (0..opts.n_trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, scen, r_sim, opts.interference, opts.seed, t))
            .collect::<Result<Vec<_>, _>>()
    })?
}

pub fn coverage_from_records(records: &[TrialRecord], gamma: f64, seed: u64) -> Estimate {
    let hits: Vec<f64> = records.iter().map(|r| f64::from(u8::from(r.sinr > gamma))).collect();
    Estimate::from_samples(&hits, seed)
}

/// Mean of `log2(1 + SINR)` over trials with finite SINR.
pub fn rate_from_records(records: &[TrialRecord], seed: u64) -> Estimate {
    let rates: Vec<f64> = records
        .iter()
        .filter(|r| r.sinr.is_finite())
        .map(|r| r.sinr.ln_1p() / std::f64::consts::LN_2)
        .collect();
    let skipped = records.len() - rates.len();
    if skipped > 0 {
        log::info!("{skipped} interference- and noise-free trials excluded from the rate mean");
    }
    Estimate::from_samples(&rates, seed)
}

pub fn estimate_coverage(cfg: &NetworkConfig, scen: &AccessScenario, gamma: f64, n_trials: usize, seed: u64) -> Result<Estimate, SimError> {
    let records = run_trials(cfg, scen, &SimOptions::new(n_trials, seed))?;
    Ok(coverage_from_records(&records, gamma, seed))
}

pub fn estimate_rate(cfg: &NetworkConfig, scen: &AccessScenario, n_trials: usize, seed: u64) -> Result<Estimate, SimError> {
    let records = run_trials(cfg, scen, &SimOptions::new(n_trials, seed))?;
    Ok(rate_from_records(&records, seed))
}

/// Coverage of a link pinned at distance `r`, interfered by the active part
/// of a fresh field per trial.
pub fn estimate_conditional_coverage(cfg: &NetworkConfig, r: f64, gamma: f64, opts: &SimOptions) -> Result<Estimate, SimError> {
    check(opts)?;
    if !(r > 0.0) {
        return Err(SimError::Invalid(format!("link distance must be positive, got {r}")));
    }
    let r_sim = opts.r_sim.unwrap_or_else(|| default_r_sim(cfg, r));
    let hits = in_pool(opts.workers, || {
        (0..opts.n_trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(opts.seed, t);
                let field = sample_field_with(cfg, r_sim, &mut rng);
                let gain = Exp::new(cfg.zeta()).expect("positive fading rate").sample(&mut rng);
                let sinr = sinr_against(gain, r, &field, cfg);
                f64::from(u8::from(sinr > gamma))
            })
            .collect::<Vec<f64>>()
    })?;
    Ok(Estimate::from_samples(&hits, opts.seed))
}
