//! Threshold-distance optimization and energy-efficiency metrics.
//!
//! Coverage is optimized in the dimensionless area `v = ρ π R_th²` through a
//! quadratic approximation of the derivative of the closed-form coverage;
//! bit-rate is optimized by bisection on the sign of a central difference.

use serde::{Deserialize, Serialize};

use crate::analytic::{capacity_with, closed_form_coverage, theta};
use crate::error::{AnalyticError, OptimizeError};
use crate::model::{radius_for_area, AccessScenario, NetworkConfig, PowerModel};
use crate::numerics::{bisect_root, find_root_quadratic, QuadratureSpec};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const UPPER_BOUND_GAMMA: f64 = 1e-3;
pub const COVERAGE_GRID_POINTS: usize = 1000;

/// `A v² + B v + C` whose roots approximate the stationary points of coverage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticCoefficients {
    pub fn eval(&self, v: f64) -> f64 {
        (self.a * v + self.b) * v + self.c
    }
}

pub fn quadratic_coefficients(beta0: f64, betaw: f64, theta: f64) -> QuadraticCoefficients {
    let s0 = beta0 + theta;
    let sw = betaw + theta;
    QuadraticCoefficients {
        a: beta0 * (s0 * s0 / 2.0 + sw * sw * sw / (2.0 * s0)),
        b: 1.5 * (beta0 - betaw) * (beta0 + betaw + theta) - beta0 * (s0 + sw * sw / s0),
        c: 2.0 * (betaw - beta0) + beta0 * (1.0 + sw / s0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizationMethod {
    TaylorQuadratic,
    Bisection,
    GridOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub r_star: f64,
    pub objective_value: f64,
    pub method: OptimizationMethod,
    pub iterations: usize,
    /// Positive quadratic roots, as radii.
    pub candidate_radii: Vec<f64>,
    /// Independent grid-refined optimum `(r, objective)`, when computed.
    pub grid_optimum: Option<(f64, f64)>,
    /// `w = 0`: the objective does not depend on the threshold.
    pub degenerate: bool,
    /// False when the quadratic had no positive root and the grid was used.
    pub taylor_valid: bool,
}

/// Maximizer of a closed-form coverage curve over `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaOptimum {
    pub v: f64,
    pub coverage: f64,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn area_grid_upper(beta0: f64, betaw: f64) -> f64 {
    let peak = if betaw > beta0 {
        (betaw / beta0).ln() / (betaw - beta0)
    } else {
        1.0 / beta0
    };
    (10.0 * peak).max(50.0)
}

/// Exhaustive search of exact closed-form coverage on `n` points of
/// `[0, v_max]`, refined by golden section around the best grid point.
pub fn coverage_grid_oracle(beta0: f64, betaw: f64, theta: f64, n: usize) -> AreaOptimum {
    let v_max = area_grid_upper(beta0, betaw);
    let n = n.max(3);
    let h = v_max / (n - 1) as f64;
    let pc = |v: f64| closed_form_coverage(beta0, betaw, theta, v);
    let mut best = (0usize, pc(0.0));
    for i in 1..n {
        let y = pc(i as f64 * h);
        if y > best.1 {
            best = (i, y);
        }
    }
    let lo = (best.0.saturating_sub(1)) as f64 * h;
    let hi = ((best.0 + 1).min(n - 1)) as f64 * h;
    let v = golden_max(pc, lo, hi, 1e-12 * v_max.max(1.0));
    let y = pc(v);
    if y >= best.1 {
        AreaOptimum { v, coverage: y }
    } else {
        AreaOptimum {
            v: best.0 as f64 * h,
            coverage: best.1,
        }
    }
}

/// Positive roots of the quadratic, ascending.
pub fn taylor_roots(beta0: f64, betaw: f64, theta: f64) -> Vec<f64> {
    let q = quadratic_coefficients(beta0, betaw, theta);
    match find_root_quadratic(q.a, q.b, q.c) {
        Ok(roots) => roots.to_vec().into_iter().filter(|v| *v > 0.0 && v.is_finite()).collect(),
        Err(_) => Vec::new(),
    }
}

/// Coverage-optimal threshold in the interference-limited, α = 4 regime.
///
/// Both positive roots are evaluated on the exact closed form and the better
/// one is returned; the grid-refined optimum is reported alongside.
pub fn optimal_threshold_coverage(cfg: &NetworkConfig, w: f64, gamma: f64) -> Result<OptimizationReport, OptimizeError> {
    if !cfg.closed_form_regime() {
        return Err(AnalyticError::WrongRegime {
            alpha: cfg.alpha(),
            sigma2: cfg.sigma2(),
        }
        .into());
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(AnalyticError::InvalidThreshold(gamma).into());
    }
    AccessScenario::new(0.0, w)?;
    let beta0 = cfg.p_i();
    let betaw = cfg.beta_w(w);
    let th = theta(cfg, gamma);

    if betaw <= beta0 {
        return Ok(OptimizationReport {
            r_star: 0.0,
            objective_value: closed_form_coverage(beta0, beta0, th, 0.0),
            method: OptimizationMethod::TaylorQuadratic,
            iterations: 0,
            candidate_radii: Vec::new(),
            grid_optimum: None,
            degenerate: true,
            taylor_valid: true,
        });
    }

    let grid = coverage_grid_oracle(beta0, betaw, th, COVERAGE_GRID_POINTS);
    let grid_optimum = Some((radius_for_area(cfg, grid.v), grid.coverage));
    let roots = taylor_roots(beta0, betaw, th);
    let candidate_radii: Vec<f64> = roots.iter().map(|v| radius_for_area(cfg, *v)).collect();

    let best = roots
        .iter()
        .map(|v| (*v, closed_form_coverage(beta0, betaw, th, *v)))
        .fold(None::<(f64, f64)>, |acc, cur| match acc {
            Some(a) if a.1 >= cur.1 => Some(a),
            _ => Some(cur),
        });

    Ok(match best {
        Some((v, pc)) => OptimizationReport {
            r_star: radius_for_area(cfg, v),
            objective_value: pc,
            method: OptimizationMethod::TaylorQuadratic,
            iterations: 0,
            candidate_radii,
            grid_optimum,
            degenerate: false,
            taylor_valid: true,
        },
        None => {
            log::debug!("quadratic has no positive root (beta0={beta0}, betaw={betaw}, theta={th}); using grid oracle");
            OptimizationReport {
                r_star: radius_for_area(cfg, grid.v),
                objective_value: grid.coverage,
                method: OptimizationMethod::GridOracle,
                iterations: 0,
                candidate_radii,
                grid_optimum,
                degenerate: false,
                taylor_valid: false,
            }
        }
    })
}

/// Strict variant: errors instead of falling back to the grid.
pub fn taylor_threshold_coverage(cfg: &NetworkConfig, w: f64, gamma: f64) -> Result<OptimizationReport, OptimizeError> {
    let report = optimal_threshold_coverage(cfg, w, gamma)?;
    if report.taylor_valid {
        Ok(report)
    } else {
        Err(OptimizeError::NoInteriorOptimum)
    }
}

/// Bisection as in the rate search: keep the half whose side the probe says
/// is uphill, stop once the midpoint moves by at most `epsilon`.
///
/// `uphill(R)` is true when the objective increases through `R`. Returns the
/// final midpoint and the iteration count.
pub fn bisect_unimodal<E, F>(mut uphill: F, r_upper: f64, epsilon: f64) -> Result<(f64, usize), E>
where
    F: FnMut(f64) -> Result<bool, E>,
{
    let (mut lo, mut hi) = (0.0, r_upper);
    let mut delta = r_upper;
    let mut iterations = 0;
    while delta > epsilon {
        let r = 0.5 * (lo + hi);
        if uphill(r)? {
            lo = r;
        } else {
            hi = r;
        }
        delta = (r - 0.5 * (lo + hi)).abs();
        iterations += 1;
    }
    Ok((0.5 * (lo + hi), iterations))
}

pub fn max_bisection_iterations(r_upper: f64, epsilon: f64) -> usize {
    (r_upper / epsilon).log2().ceil().max(0.0) as usize + 1
}

fn capacity_at(cfg: &NetworkConfig, r: f64, w: f64, spec: &QuadratureSpec) -> Result<f64, OptimizeError> {
    let scen = AccessScenario::new(r.max(0.0), w)?;
    Ok(capacity_with(cfg, &scen, spec)?)
}

/// Rate-optimal threshold by bisection on `C(R + ε) > C(R − ε)`.
pub fn optimal_threshold_rate(cfg: &NetworkConfig, w: f64, r_upper: f64, epsilon: f64) -> Result<OptimizationReport, OptimizeError> {
    optimal_threshold_rate_with(cfg, w, r_upper, epsilon, &QuadratureSpec::default())
}

pub fn optimal_threshold_rate_with(
    cfg: &NetworkConfig,
    w: f64,
    r_upper: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<OptimizationReport, OptimizeError> {
    if !(epsilon > 0.0) || !r_upper.is_finite() || r_upper <= epsilon {
        return Err(OptimizeError::InvalidBracket { upper: r_upper, epsilon });
    }
    AccessScenario::new(0.0, w)?;
    let degenerate = cfg.beta_w(w) <= cfg.p_i();
    let fine = spec.tightened(1e-3);
    let uphill = |r: f64| -> Result<bool, OptimizeError> {
        let up = capacity_at(cfg, r + epsilon, w, spec)?;
        let down = capacity_at(cfg, r - epsilon, w, spec)?;
        let noise = 100.0 * spec.rel_tol * up.abs().max(down.abs());
        if (up - down).abs() > noise {
            return Ok(up > down);
        }
        let up = capacity_at(cfg, r + epsilon, w, &fine)?;
        let down = capacity_at(cfg, r - epsilon, w, &fine)?;
        Ok(up > down)
    };
    let (r_star, iterations) = bisect_unimodal(uphill, r_upper, epsilon)?;
    Ok(OptimizationReport {
        r_star,
        objective_value: capacity_at(cfg, r_star, w, spec)?,
        method: OptimizationMethod::Bisection,
        iterations,
        candidate_radii: Vec::new(),
        grid_optimum: None,
        degenerate,
        taylor_valid: true,
    })
}

/// Upper bracket for the rate search: the coverage-optimal threshold at a
/// vanishing SIR target, taken as the larger of the Taylor and grid answers.
pub fn default_rate_upper_bound(cfg: &NetworkConfig, w: f64) -> Result<f64, OptimizeError> {
    let base = cfg.noiseless();
    let base = if base.alpha() == 4.0 {
        base
    } else {
        NetworkConfig::new(
            base.rho_f(),
            base.p_a(),
            base.p_i(),
            base.p_s(),
            base.mu(),
            base.lambda_s(),
            4.0,
            base.p_tx(),
            0.0,
            base.zeta(),
        )?
    };
    let report = optimal_threshold_coverage(&base, w, UPPER_BOUND_GAMMA)?;
    let mut r = report.r_star;
    if let Some((g, _)) = report.grid_optimum {
        r = r.max(g);
    }
    if report.degenerate || r <= 0.0 {
        r = radius_for_area(cfg, 1.0 / cfg.p_i());
    }
    Ok(r)
}

/// Grid search of capacity over `n` points of `[0, r_upper]`, followed by a
/// second grid of `n` points across the best cell.
pub fn rate_grid_oracle(cfg: &NetworkConfig, w: f64, r_upper: f64, n: usize) -> Result<(f64, f64), OptimizeError> {
    let spec = QuadratureSpec::default();
    let n = n.max(3);
    let search = |lo: f64, hi: f64| -> Result<(f64, f64, f64), OptimizeError> {
        let h = (hi - lo) / (n - 1) as f64;
        let mut best = (lo, f64::NEG_INFINITY);
        for i in 0..n {
            let r = lo + i as f64 * h;
            let c = capacity_at(cfg, r, w, &spec)?;
            if c > best.1 {
                best = (r, c);
            }
        }
        Ok((best.0, best.1, h))
    };
    let (r0, _, h) = search(0.0, r_upper)?;
    let (r1, c1, _) = search((r0 - h).max(0.0), (r0 + h).min(r_upper))?;
    Ok((r1, c1))
}

/// `ν = C / (B · mean power)` in bits/s/Hz per Watt.
pub fn energy_efficiency(cfg: &NetworkConfig, scen: &AccessScenario, pm: &PowerModel) -> Result<f64, OptimizeError> {
    let c = capacity_with(cfg, scen, &QuadratureSpec::default())?;
    Ok(c / (pm.bandwidth() * pm.mean_power(cfg)))
}

/// Energy efficiency relative to the same network without delay budget.
pub fn normalized_energy_efficiency(cfg: &NetworkConfig, scen: &AccessScenario) -> Result<f64, OptimizeError> {
    if scen.w() == 0.0 {
        return Ok(1.0);
    }
    let spec = QuadratureSpec::default();
    let c = capacity_with(cfg, scen, &spec)?;
    let c0 = capacity_with(cfg, &scen.with_w(0.0)?, &spec)?;
    Ok(c / c0)
}

/// Smallest delay `w` whose availability `β_w` reaches `target`.
pub fn delay_for_availability(cfg: &NetworkConfig, target: f64) -> Result<f64, OptimizeError> {
    let beta0 = cfg.p_i();
    if target == beta0 {
        return Ok(0.0);
    }
    if !(target > beta0) || target >= 1.0 {
        return Err(OptimizeError::UnreachableAvailability { target, beta0 });
    }
    let mut hi = 1.0 / cfg.mu().min(cfg.lambda_s());
    while cfg.beta_w(hi) < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(OptimizeError::UnreachableAvailability { target, beta0 });
        }
    }
    let f = |w: f64| cfg.beta_w(w) - target;
    Ok(bisect_root(f, 0.0, hi, 1e-13 * hi)?)
}
