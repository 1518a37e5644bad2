use cellwait::analytic::{baseline_coverage, capacity, coverage_closed_form, coverage_quadrature};
use cellwait::model::db_to_linear;
use cellwait::optimize::{
    default_rate_upper_bound, delay_for_availability, normalized_energy_efficiency, optimal_threshold_coverage, optimal_threshold_rate,
};
use cellwait::simulate::{coverage_from_records, rate_from_records, run_trials, SimOptions};
use cellwait::{AccessScenario, NetworkConfig};
use rayon::prelude::*;

use crate::config::LoadedConfig;
use crate::sweep::{SweepSpec, SweepVar};
use crate::table::{Field, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Closed,
    Quad,
    Mc,
    All,
}

impl Method {
    fn closed(self) -> bool {
        matches!(self, Method::Closed | Method::All)
    }
    fn quad(self) -> bool {
        matches!(self, Method::Quad | Method::All)
    }
    fn mc(self) -> bool {
        matches!(self, Method::Mc | Method::All)
    }
}

/// Noiseless path-loss-4 projection used for closed-form-only quantities.
pub fn closed_form_projection(cfg: &NetworkConfig) -> Option<NetworkConfig> {
    (cfg.alpha() == 4.0).then(|| cfg.noiseless())
}

#[derive(Debug, Clone)]
pub struct CoverageArgs {
    pub sweep: SweepSpec,
    pub method: Method,
    pub n_trials: usize,
    pub seed: u64,
    /// SIR target for `r_th` sweeps.
    pub gamma_db: f64,
    pub optimal_threshold: bool,
}

pub const COVERAGE_COLUMNS: [&str; 5] = ["sweep_value", "p_c_closed", "p_c_quadrature", "p_c_mc", "mc_ci"];
pub const OPTIMUM_COLUMNS: [&str; 5] = ["r_star", "p_c_optimal", "r_star_grid", "p_c_grid", "p_c_baseline"];

pub fn cmd_coverage(cfg: &LoadedConfig, args: &CoverageArgs) -> Result<Table, CliError> {
    let net = &cfg.network;
    let xs = args.sweep.values();
    let point = |x: f64| -> Result<(AccessScenario, f64), CliError> {
        Ok(match args.sweep.variable {
            SweepVar::GammaDb => (cfg.scenario, db_to_linear(x)),
            SweepVar::RTh => (cfg.scenario.with_r_th(x).map_err(CliError::input)?, db_to_linear(args.gamma_db)),
            v => return Err(CliError::Input(format!("coverage sweeps gamma_db or r_th, not {}", v.name()))),
        })
    };
    let points: Vec<(AccessScenario, f64)> = xs.iter().map(|x| point(*x)).collect::<Result<_, _>>()?;

    let analytic: Vec<(Option<f64>, Option<f64>)> = points
        .par_iter()
        .map(|(scen, g)| -> Result<_, CliError> {
            let closed = if args.method.closed() && net.closed_form_regime() {
                Some(coverage_closed_form(net, scen, *g).map_err(CliError::failure)?.value)
            } else {
                None
            };
            let quad = if args.method.quad() {
                Some(coverage_quadrature(net, scen, *g).map_err(CliError::failure)?.value)
            } else {
                None
            };
            Ok((closed, quad))
        })
        .collect::<Result<_, _>>()?;

    let mc: Vec<Option<(f64, f64)>> = if !args.method.mc() {
        vec![None; points.len()]
    } else if args.sweep.variable == SweepVar::GammaDb {
        let recs = run_trials(net, &cfg.scenario, &SimOptions::new(args.n_trials, args.seed)).map_err(CliError::failure)?;
        points
            .iter()
            .map(|(_, g)| {
                let e = coverage_from_records(&recs, *g, args.seed);
                Some((e.mean, e.ci_halfwidth))
            })
            .collect()
    } else {
        let mut out = Vec::with_capacity(points.len());
        for (scen, g) in &points {
            let recs = run_trials(net, scen, &SimOptions::new(args.n_trials, args.seed)).map_err(CliError::failure)?;
            let e = coverage_from_records(&recs, *g, args.seed);
            out.push(Some((e.mean, e.ci_halfwidth)));
        }
        out
    };

    let with_opt = args.optimal_threshold && args.sweep.variable == SweepVar::GammaDb;
    let mut headers = COVERAGE_COLUMNS.to_vec();
    if with_opt {
        headers.extend(OPTIMUM_COLUMNS);
    }
    let optima: Vec<Vec<Field>> = if with_opt {
        points
            .par_iter()
            .map(|(scen, g)| -> Result<Vec<Field>, CliError> {
                let Some(base) = closed_form_projection(net) else {
                    return Ok(vec![Field::Empty; OPTIMUM_COLUMNS.len()]);
                };
                let rep = optimal_threshold_coverage(&base, scen.w(), *g).map_err(CliError::failure)?;
                let (rg, pg) = rep.grid_optimum.map_or((None, None), |(r, p)| (Some(r), Some(p)));
                Ok(vec![
                    rep.r_star.into(),
                    rep.objective_value.into(),
                    rg.into(),
                    pg.into(),
                    baseline_coverage(&base, *g).into(),
                ])
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![Vec::new(); points.len()]
    };

    let mut table = Table::new(headers);
    for (i, x) in xs.iter().enumerate() {
        let (closed, quad) = analytic[i];
        let mut row = vec![
            Field::Num(*x),
            closed.into(),
            quad.into(),
            mc[i].map(|m| m.0).into(),
            mc[i].map(|m| m.1).into(),
        ];
        row.extend(optima[i].iter().cloned());
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct RateArgs {
    pub sweep: SweepSpec,
    pub w_values: Vec<f64>,
    pub epsilon: f64,
    pub r_upper: Option<f64>,
    pub method: Method,
    pub n_trials: usize,
    pub seed: u64,
}

pub const RATE_COLUMNS: [&str; 8] = ["w", "r_th", "capacity", "capacity_mc", "mc_ci", "r_star", "r_upper", "optimum"];

pub fn cmd_rate(cfg: &LoadedConfig, args: &RateArgs) -> Result<Table, CliError> {
    if args.sweep.variable != SweepVar::RTh {
        return Err(CliError::Input(format!("rate sweeps r_th, not {}", args.sweep.variable.name())));
    }
    if args.w_values.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(CliError::Input("w values must be finite and >= 0".into()));
    }
    let net = &cfg.network;
    let rs = args.sweep.values();
    let mut table = Table::new(RATE_COLUMNS.to_vec());
    for &w in &args.w_values {
        let upper = match args.r_upper {
            Some(u) => u,
            None => default_rate_upper_bound(net, w).map_err(CliError::failure)?,
        };
        let rep = optimal_threshold_rate(net, w, upper, args.epsilon).map_err(|e| match e {
            cellwait::OptimizeError::InvalidBracket { .. } => CliError::input(e),
            e => CliError::failure(e),
        })?;
        let caps: Vec<f64> = rs
            .par_iter()
            .map(|r| {
                let scen = AccessScenario::new(*r, w).map_err(CliError::input)?;
                capacity(net, &scen).map_err(CliError::failure)
            })
            .collect::<Result<_, _>>()?;
        let mut mcs = Vec::with_capacity(rs.len());
        for r in &rs {
            mcs.push(if args.method.mc() {
                let scen = AccessScenario::new(*r, w).map_err(CliError::input)?;
                let recs = run_trials(net, &scen, &SimOptions::new(args.n_trials, args.seed)).map_err(CliError::failure)?;
                let e = rate_from_records(&recs, args.seed);
                Some((e.mean, e.ci_halfwidth))
            } else {
                None
            });
        }
        let marker = rs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - rep.r_star).abs().total_cmp(&(b.1 - rep.r_star).abs()))
            .map(|(i, _)| i);
        for (i, r) in rs.iter().enumerate() {
            table.push(vec![
                Field::Num(w),
                Field::Num(*r),
                Field::Num(caps[i]),
                mcs[i].map(|m| m.0).into(),
                mcs[i].map(|m| m.1).into(),
                Field::Num(rep.r_star),
                Field::Num(upper),
                Field::Int(i64::from(marker == Some(i))),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct EeArgs {
    pub sweep: SweepSpec,
    pub theta_ratios: Vec<f64>,
    pub epsilon: f64,
    /// Fixed threshold; `None` uses the rate-optimal threshold per point.
    pub r_th: Option<f64>,
}

pub const EE_COLUMNS: [&str; 5] = ["beta_w", "theta_ratio", "nu_N", "w", "r_th"];

/// Mode fractions with `p_A` kept and `p_S / p_I = ratio`.
pub fn fractions_for_ratio(cfg: &NetworkConfig, ratio: f64) -> Result<NetworkConfig, CliError> {
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(CliError::Input(format!("theta ratio must be finite and >= 0, got {ratio}")));
    }
    let p_i = (1.0 - cfg.p_a()) / (1.0 + ratio);
    let p_s = 1.0 - cfg.p_a() - p_i;
    cfg.with_mode_fractions(cfg.p_a(), p_i, p_s).map_err(CliError::input)
}

pub fn cmd_ee(cfg: &LoadedConfig, args: &EeArgs) -> Result<Table, CliError> {
    if !matches!(args.sweep.variable, SweepVar::BetaW | SweepVar::W) {
        return Err(CliError::Input(format!(
            "ee sweeps beta_w or w, not {}",
            args.sweep.variable.name()
        )));
    }
    let xs = args.sweep.values();
    let mut jobs = Vec::new();
    for &ratio in &args.theta_ratios {
        let net = fractions_for_ratio(&cfg.network, ratio)?;
        for &x in &xs {
            let (beta, w) = match args.sweep.variable {
                SweepVar::W => {
                    if !(x >= 0.0) {
                        return Err(CliError::Input(format!("w must be >= 0, got {x}")));
                    }
                    (net.beta_w(x), x)
                }
                _ => match delay_for_availability(&net, x) {
                    Ok(w) => (x, w),
                    Err(_) => {
                        log::info!(
                            "theta ratio {ratio}: availability {x} unreachable from p_I = {}; skipped",
                            net.p_i()
                        );
                        continue;
                    }
                },
            };
            jobs.push((ratio, net, beta, w));
        }
    }
    let rows: Vec<Vec<Field>> = jobs
        .par_iter()
        .map(|(ratio, net, beta, w)| -> Result<Vec<Field>, CliError> {
            let r = match args.r_th {
                Some(r) => r,
                None if *w == 0.0 => cfg.scenario.r_th(),
                None => {
                    let upper = default_rate_upper_bound(net, *w).map_err(CliError::failure)?;
                    optimal_threshold_rate(net, *w, upper, args.epsilon)
                        .map_err(CliError::failure)?
                        .r_star
                }
            };
            let scen = AccessScenario::new(r, *w).map_err(CliError::input)?;
            let nu = normalized_energy_efficiency(net, &scen).map_err(CliError::failure)?;
            Ok(vec![
                Field::Num(*beta),
                Field::Num(*ratio),
                Field::Num(nu),
                Field::Num(*w),
                Field::Num(r),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(EE_COLUMNS.to_vec());
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

pub const RECORD_COLUMNS: [&str; 5] = ["trial", "event", "distance_m", "wait_s", "sinr_db"];

pub fn cmd_simulate(cfg: &LoadedConfig, n_trials: usize, seed: u64) -> Result<Table, CliError> {
    let recs = run_trials(&cfg.network, &cfg.scenario, &SimOptions::new(n_trials, seed)).map_err(CliError::failure)?;
    let mut table = Table::new(RECORD_COLUMNS.to_vec());
    for r in recs {
        table.push(vec![
            Field::Int(r.trial as i64),
            Field::Text(r.event.code().to_string()),
            Field::Num(r.distance),
            Field::Num(r.wait),
            if r.sinr.is_finite() {
                Field::Num(r.sinr_db())
            } else {
                Field::Text("inf".into())
            },
        ]);
    }
    Ok(table)
}
