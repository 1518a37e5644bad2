//! Self-consistency report: analytic routes against each other and against
//! the Monte-Carlo engine.

use std::collections::BTreeMap;

use cellwait::analytic::{
    access_probabilities, baseline_coverage, closed_form_coverage, coverage_closed_form, coverage_quadrature, distance_cdf, theta,
};
use cellwait::model::{db_to_linear, dimensionless_area};
use cellwait::optimize::optimal_threshold_coverage;
use cellwait::simulate::{coverage_from_records, ks_test, run_trials, Estimate, SimOptions, TrialRecord, Z99};
use cellwait::{AccessEvent, AccessScenario, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::closed_form_projection;
use crate::config::LoadedConfig;
use crate::CliError;

/// Monte-Carlo checks are inconclusive when a 95% interval is wider than this.
pub const MAX_CI_HALFWIDTH: f64 = 0.02;
/// Smallest per-event sample for a conclusive distance test.
pub const MIN_KS_SAMPLES: usize = 500;
pub const KS_SIGNIFICANCE: f64 = 0.01;
pub const EQUIVALENCE_TOL: f64 = 1e-6;
pub const NEVER_HURTS_TOL: f64 = 1e-12;
pub const NEVER_HURTS_CASES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub n_trials: usize,
    pub r_th: f64,
    pub w: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub first_failure: Option<&'static str>,
}

fn check(name: &'static str, status: Status, detail: String, metrics: BTreeMap<String, f64>) -> Check {
    Check {
        name,
        status,
        detail,
        metrics,
    }
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub const EQUIVALENCE_GAMMA_DB: [f64; 5] = [-10.0, -5.0, 0.0, 5.0, 10.0];
pub const EQUIVALENCE_R_TH: [f64; 5] = [2.0, 5.0, 10.0, 15.0, 25.0];
pub const EQUIVALENCE_W: [f64; 4] = [0.0, 2.0, 10.0, 30.0];

/// Largest relative gap between the closed form and the quadrature route.
pub fn equivalence_gap(net: &NetworkConfig) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for g in EQUIVALENCE_GAMMA_DB {
        for r in EQUIVALENCE_R_TH {
            for w in EQUIVALENCE_W {
                let scen = AccessScenario::new(r, w).map_err(CliError::input)?;
                let gamma = db_to_linear(g);
                let c = coverage_closed_form(net, &scen, gamma).map_err(CliError::failure)?.value;
                let q = coverage_quadrature(net, &scen, gamma).map_err(CliError::failure)?.value;
                worst = worst.max((c - q).abs() / c);
            }
        }
    }
    Ok(worst)
}

fn closed_vs_quadrature(net: &NetworkConfig) -> Result<Check, CliError> {
    let Some(base) = closed_form_projection(net) else {
        return Ok(check(
            "closed_form_vs_quadrature",
            Status::Skipped,
            "closed form needs alpha = 4".into(),
            BTreeMap::new(),
        ));
    };
    let gap = equivalence_gap(&base)?;
    Ok(check(
        "closed_form_vs_quadrature",
        verdict(gap <= EQUIVALENCE_TOL),
        format!("max relative gap {gap:.3e} over 5x5x4 grid (tolerance {EQUIVALENCE_TOL:e})"),
        BTreeMap::from([("max_relative_gap".into(), gap)]),
    ))
}

pub const MC_GAMMA_DB: [f64; 3] = [-10.0, 0.0, 10.0];

fn analytic_coverage(net: &NetworkConfig, scen: &AccessScenario, gamma: f64) -> Result<f64, CliError> {
    let r = if net.closed_form_regime() {
        coverage_closed_form(net, scen, gamma)
    } else {
        coverage_quadrature(net, scen, gamma)
    };
    Ok(r.map_err(CliError::failure)?.value)
}

fn mc_coverage(net: &NetworkConfig, scen: &AccessScenario, recs: &[TrialRecord], seed: u64) -> Result<Check, CliError> {
    let mut metrics = BTreeMap::new();
    let mut ok = true;
    let mut wide = false;
    for g in MC_GAMMA_DB {
        let gamma = db_to_linear(g);
        let exact = analytic_coverage(net, scen, gamma)?;
        let est = coverage_from_records(recs, gamma, seed);
        metrics.insert(format!("analytic_{g}db"), exact);
        metrics.insert(format!("mc_{g}db"), est.mean);
        metrics.insert(format!("ci99_{g}db"), est.halfwidth(Z99));
        ok &= est.contains(exact, Z99);
        wide |= est.ci_halfwidth > MAX_CI_HALFWIDTH;
    }
    let status = if wide { Status::Inconclusive } else { verdict(ok) };
    let detail = if wide {
        "inconclusive (CI too wide)".into()
    } else {
        "analytic coverage inside the 99% MC interval at -10, 0, 10 dB".into()
    };
    Ok(check("mc_coverage", status, detail, metrics))
}

fn event_probabilities(net: &NetworkConfig, scen: &AccessScenario, recs: &[TrialRecord], seed: u64) -> Check {
    let probs = access_probabilities(net, scen);
    let mut metrics = BTreeMap::new();
    let (mut ok, mut wide) = ((probs.immediate + probs.delayed + probs.outside) == 1.0, false);
    for event in AccessEvent::ALL {
        let hits: Vec<f64> = recs.iter().map(|r| f64::from(u8::from(r.event == event))).collect();
        let est = Estimate::from_samples(&hits, seed);
        let p = probs.get(event);
        metrics.insert(format!("analytic_{}", event.code()), p);
        metrics.insert(format!("mc_{}", event.code()), est.mean);
        ok &= (est.mean - p).abs() <= 3.0 * est.stderr();
        wide |= est.ci_halfwidth > MAX_CI_HALFWIDTH;
    }
    let status = if wide { Status::Inconclusive } else { verdict(ok) };
    let detail = if wide {
        "inconclusive (CI too wide)".into()
    } else {
        "event frequencies within 3 standard errors; analytic probabilities sum to 1".into()
    };
    check("event_probabilities", status, detail, metrics)
}

fn distance_laws(net: &NetworkConfig, scen: &AccessScenario, recs: &[TrialRecord]) -> Result<Check, CliError> {
    let mut metrics = BTreeMap::new();
    let (mut ok, mut small) = (true, false);
    for event in AccessEvent::ALL {
        let mut d: Vec<f64> = recs.iter().filter(|r| r.event == event).map(|r| r.distance).collect();
        if d.len() < MIN_KS_SAMPLES {
            small = true;
            metrics.insert(format!("n_{}", event.code()), d.len() as f64);
            continue;
        }
        let mut err = None;
        let ks = ks_test(&mut d, |r| {
            distance_cdf(net, scen, event, r).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            })
        });
        if let Some(e) = err {
            return Err(CliError::failure(e));
        }
        metrics.insert(format!("ks_d_{}", event.code()), ks.statistic);
        metrics.insert(format!("ks_p_{}", event.code()), ks.p_value);
        metrics.insert(format!("n_{}", event.code()), ks.n as f64);
        ok &= ks.passes(KS_SIGNIFICANCE);
    }
    let status = if small { Status::Inconclusive } else { verdict(ok) };
    let detail = if small {
        format!("inconclusive (fewer than {MIN_KS_SAMPLES} samples for an event)")
    } else {
        format!("KS p-values >= {KS_SIGNIFICANCE} for all three events")
    };
    Ok(check("distance_ks", status, detail, metrics))
}

/// Random configurations with a positive delay benefit, for the
/// never-hurts property.
pub fn never_hurts_cases(seed: u64, n: usize) -> Vec<(NetworkConfig, AccessScenario, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e65_7665_725f_6875);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: [f64; 3] = [
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
        ];
        let s: f64 = u.iter().sum();
        let (p_a, p_i) = (u[0] / s, u[1] / s);
        let p_s = 1.0 - p_a - p_i;
        let Ok(cfg) = NetworkConfig::new(
            rng.random_range(1e-4..1e-2),
            p_a,
            p_i,
            p_s,
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            4.0,
            1.0,
            0.0,
            1.0,
        ) else {
            continue;
        };
        let scen = AccessScenario::new(rng.random_range(0.0..50.0), rng.random_range(0.1..50.0)).expect("valid ranges");
        let gamma = db_to_linear(rng.random_range(-10.0..10.0));
        if cfg.beta_w(scen.w()) > cfg.p_i() {
            out.push((cfg, scen, gamma));
        }
    }
    out
}

/// Smallest margin `p_c - baseline` over the random cases.
pub fn never_hurts_margin(seed: u64, n: usize) -> f64 {
    never_hurts_cases(seed, n)
        .iter()
        .map(|(cfg, scen, g)| {
            let b0 = cfg.p_i();
            let pc = closed_form_coverage(b0, cfg.beta_w(scen.w()), theta(cfg, *g), dimensionless_area(cfg, scen));
            pc - baseline_coverage(cfg, *g)
        })
        .fold(f64::INFINITY, f64::min)
}

fn never_hurts(seed: u64) -> Check {
    let margin = never_hurts_margin(seed, NEVER_HURTS_CASES);
    check(
        "never_hurts",
        verdict(margin >= -NEVER_HURTS_TOL),
        format!("min p_c - baseline over {NEVER_HURTS_CASES} random cases: {margin:.3e}"),
        BTreeMap::from([("min_margin".into(), margin)]),
    )
}

pub const MONOTONICITY_GAMMA_DB: [f64; 6] = [-6.0, -3.0, 0.0, 3.0, 6.0, 9.0];

/// Coverage-optimal thresholds across the SIR targets of the monotonicity check.
pub fn optimal_thresholds(net: &NetworkConfig, w: f64) -> Result<Vec<f64>, CliError> {
    MONOTONICITY_GAMMA_DB
        .iter()
        .map(|g| {
            Ok(optimal_threshold_coverage(net, w, db_to_linear(*g))
                .map_err(CliError::failure)?
                .r_star)
        })
        .collect()
}

fn threshold_monotone(net: &NetworkConfig, w: f64) -> Result<Check, CliError> {
    let Some(base) = closed_form_projection(net) else {
        return Ok(check(
            "threshold_monotonicity",
            Status::Skipped,
            "closed form needs alpha = 4".into(),
            BTreeMap::new(),
        ));
    };
    let rs = optimal_thresholds(&base, w)?;
    let ok = rs.windows(2).all(|p| p[1] <= p[0]);
    let metrics = MONOTONICITY_GAMMA_DB
        .iter()
        .zip(&rs)
        .map(|(g, r)| (format!("r_star_{g}db"), *r))
        .collect();
    Ok(check(
        "threshold_monotonicity",
        verdict(ok),
        "coverage-optimal threshold nonincreasing over -6..9 dB".into(),
        metrics,
    ))
}

pub fn cmd_validate(cfg: &LoadedConfig, n_trials: usize, seed: u64) -> Result<ValidationReport, CliError> {
    let net = cfg.network.noiseless();
    let scen = cfg.scenario;
    let recs = run_trials(&net, &scen, &SimOptions::new(n_trials, seed)).map_err(CliError::failure)?;
    let checks = vec![
        closed_vs_quadrature(&cfg.network)?,
        mc_coverage(&net, &scen, &recs, seed)?,
        event_probabilities(&net, &scen, &recs, seed),
        distance_laws(&net, &scen, &recs)?,
        never_hurts(seed),
        threshold_monotone(&cfg.network, scen.w())?,
    ];
    let first_failure = checks.iter().find(|c| c.status == Status::Fail).map(|c| c.name);
    Ok(ValidationReport {
        seed,
        n_trials,
        r_th: scen.r_th(),
        w: scen.w(),
        passed: first_failure.is_none(),
        first_failure,
        checks,
    })
}
