//! Access-event probabilities, serving-distance laws, coverage probability
//! and ergodic capacity of the delayed-access scheme.
//!
//! Two independent routes to the coverage probability are provided: the
//! noiseless path-loss-4 closed form ([`coverage_closed_form`]) and a
//! quadrature over the three access branches ([`coverage_quadrature`]) that
//! works for any `alpha > 2` and any noise power.

use std::cell::RefCell;
use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AnalyticError;
use crate::model::{dimensionless_area, AccessScenario, NetworkConfig};
use crate::numerics::{integrate, interference_constant, QuadratureSpec};

/// How the UE ends up attached to a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessEvent {
    /// An idle cell already sits inside the threshold disk.
    #[serde(rename = "IA")]
    Immediate,
    /// A busy or sleeping cell inside the disk frees up before the deadline.
    #[serde(rename = "DA")]
    Delayed,
    /// Deadline reached; attach to the nearest idle cell outside the disk.
    #[serde(rename = "OA")]
    Outside,
}

impl AccessEvent {
    pub const ALL: [AccessEvent; 3] = [AccessEvent::Immediate, AccessEvent::Delayed, AccessEvent::Outside];

    pub fn code(self) -> &'static str {
        match self {
            AccessEvent::Immediate => "IA",
            AccessEvent::Delayed => "DA",
            AccessEvent::Outside => "OA",
        }
    }
}

impl fmt::Display for AccessEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessProbabilities {
    pub immediate: f64,
    pub delayed: f64,
    pub outside: f64,
}

impl AccessProbabilities {
    pub fn get(&self, event: AccessEvent) -> f64 {
        match event {
            AccessEvent::Immediate => self.immediate,
            AccessEvent::Delayed => self.delayed,
            AccessEvent::Outside => self.outside,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub value: f64,
    pub method: CoverageMethod,
    pub error_estimate: f64,
}

/// `P_IA = 1 - e^{-p_I v}`, `P_OA = e^{-beta_w v}`, `P_DA` the remainder.
pub fn access_probabilities(cfg: &NetworkConfig, scen: &AccessScenario) -> AccessProbabilities {
    let v = dimensionless_area(cfg, scen);
    let immediate = -(-cfg.p_i() * v).exp_m1();
    let outside = (-cfg.beta_w(scen.w()) * v).exp();
    // beta_w >= p_I, so this is never negative beyond rounding.
    let delayed = (1.0 - immediate - outside).max(0.0);
    let outside = 1.0 - (immediate + delayed);
    AccessProbabilities {
        immediate,
        delayed,
        outside,
    }
}

fn check_support(event: AccessEvent, scen: &AccessScenario, r: f64) -> Result<(), AnalyticError> {
    let inside = match event {
        AccessEvent::Immediate | AccessEvent::Delayed => {
            if scen.r_th() == 0.0 {
                return Err(AnalyticError::DegenerateSupport(event.code()));
            }
            (0.0..=scen.r_th()).contains(&r)
        }
        AccessEvent::Outside => r >= scen.r_th() && r.is_finite(),
    };
    if inside {
        Ok(())
    } else {
        Err(AnalyticError::OutsideSupport { event: event.code(), r })
    }
}

/// Density of the serving distance given the access event.
///
/// The outside branch is `2π p_I ρ r e^{-p_I ρ π (r² - r_th²)}` on
/// `[r_th, ∞)`; it integrates to one.
pub fn distance_pdf(cfg: &NetworkConfig, scen: &AccessScenario, event: AccessEvent, r: f64) -> Result<f64, AnalyticError> {
    check_support(event, scen, r)?;
    let idle_density = cfg.p_i() * cfg.rho_f();
    let r_th = scen.r_th();
    Ok(match event {
        AccessEvent::Immediate => {
            let v_idle = idle_density * PI * r_th * r_th;
            2.0 * PI * idle_density * r * (-idle_density * PI * r * r).exp() / -(-v_idle).exp_m1()
        }
        AccessEvent::Delayed => 2.0 * r / (r_th * r_th),
        AccessEvent::Outside => 2.0 * PI * idle_density * r * (-idle_density * PI * (r * r - r_th * r_th)).exp(),
    })
}

/// CDF matching [`distance_pdf`].
pub fn distance_cdf(cfg: &NetworkConfig, scen: &AccessScenario, event: AccessEvent, r: f64) -> Result<f64, AnalyticError> {
    let r_th = scen.r_th();
    let idle_density = cfg.p_i() * cfg.rho_f();
    match event {
        AccessEvent::Immediate | AccessEvent::Delayed if r_th == 0.0 => Err(AnalyticError::DegenerateSupport(event.code())),
        AccessEvent::Immediate => {
            let r = r.clamp(0.0, r_th);
            Ok((-(-idle_density * PI * r * r).exp_m1()) / -(-idle_density * PI * r_th * r_th).exp_m1())
        }
        AccessEvent::Delayed => {
            let r = r.clamp(0.0, r_th);
            Ok(r * r / (r_th * r_th))
        }
        AccessEvent::Outside => {
            if r <= r_th {
                Ok(0.0)
            } else {
                Ok(-(-idle_density * PI * (r * r - r_th * r_th)).exp_m1())
            }
        }
    }
}

/// `θ = p_A √γ π / 2`, the interference factor of the path-loss-4 closed form.
pub fn theta(cfg: &NetworkConfig, gamma: f64) -> f64 {
    cfg.p_a() * gamma.sqrt() * PI / 2.0
}

/// Precomputed exponents of `P(SINR > γ | r)` for a fixed threshold.
#[derive(Debug, Clone, Copy)]
struct CoverageKernel {
    alpha: f64,
    noise: f64,
    interference: f64,
}

impl CoverageKernel {
    fn new(cfg: &NetworkConfig, gamma: f64) -> Self {
        let c_alpha = interference_constant(cfg.alpha()).expect("alpha > 2 is a config invariant");
        CoverageKernel {
            alpha: cfg.alpha(),
            noise: cfg.zeta() * gamma * cfg.sigma2() / cfg.p_tx(),
            interference: cfg.p_a() * PI * cfg.rho_f() * gamma.powf(2.0 / cfg.alpha()) * c_alpha,
        }
    }

    fn at(&self, r: f64) -> f64 {
        let noise = if self.noise == 0.0 { 0.0 } else { self.noise * r.powf(self.alpha) };
        (-(noise + self.interference * r * r)).exp()
    }
}

/// `P(SINR > γ | r) = e^{-ζ γ r^α σ²/P_tx} · exp(-p_A π ρ_f r² γ^{2/α} C_α)`.
pub fn conditional_coverage(cfg: &NetworkConfig, r: f64, gamma: f64) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    CoverageKernel::new(cfg, gamma).at(r)
}

fn check_gamma(gamma: f64) -> Result<(), AnalyticError> {
    if gamma > 0.0 && !gamma.is_nan() {
        Ok(())
    } else {
        Err(AnalyticError::InvalidThreshold(gamma))
    }
}

/// Coverage probability by quadrature over the three access branches.
pub fn coverage_quadrature(cfg: &NetworkConfig, scen: &AccessScenario, gamma: f64) -> Result<CoverageResult, AnalyticError> {
    coverage_quadrature_with(cfg, scen, gamma, &QuadratureSpec::default())
}

/// [`coverage_quadrature`] with explicit tolerances.
///
/// Each branch is integrated in the variable that turns its distance law
/// into a unit-rate exponential or a uniform: `s = p_I ρ π r²` for IA,
/// `x = r²/r_th²` for DA and `u = p_I ρ π (r² - r_th²)` for OA.
pub fn coverage_quadrature_with(
    cfg: &NetworkConfig,
    scen: &AccessScenario,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<CoverageResult, AnalyticError> {
    check_gamma(gamma)?;
    if gamma.is_infinite() {
        return Ok(CoverageResult {
            value: 0.0,
            method: CoverageMethod::Quadrature,
            error_estimate: 0.0,
        });
    }
    let kernel = CoverageKernel::new(cfg, gamma);
    let probs = access_probabilities(cfg, scen);
    let idle_area = cfg.p_i() * cfg.rho_f() * PI;
    let r_th = scen.r_th();
    let v_idle = idle_area * r_th * r_th;

    let mut value = 0.0;
    let mut error = 0.0;

    // IA: P_IA · E[cov | IA] = ∫_0^{p_I v} cov(r(s)) e^{-s} ds
    if v_idle > 0.0 {
        let ia = integrate(|s| kernel.at((s / idle_area).sqrt()) * (-s).exp(), 0.0, v_idle, spec)?;
        value += ia.value;
        error += ia.error;
    }
    if probs.delayed > 0.0 {
        let da = integrate(|x: f64| kernel.at(r_th * x.sqrt()), 0.0, 1.0, spec)?;
        value += probs.delayed * da.value;
        error += probs.delayed * da.error;
    }
    if probs.outside > 0.0 && idle_area > 0.0 {
        let r_th2 = r_th * r_th;
        let oa = integrate(|u| kernel.at((r_th2 + u / idle_area).sqrt()) * (-u).exp(), 0.0, f64::INFINITY, spec)?;
        value += probs.outside * oa.value;
        error += probs.outside * oa.error;
    }

    Ok(CoverageResult {
        value: value.clamp(0.0, 1.0),
        method: CoverageMethod::Quadrature,
        error_estimate: error,
    })
}

/// `(1 - e^{-x}) / x`, continuous at zero.
fn one_minus_exp_ratio(x: f64) -> f64 {
    if x < 1e-6 {
        1.0 - x / 2.0 + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Closed-form noiseless path-loss-4 coverage in terms of its natural
/// variables: idle fraction `beta0`, availability `betaw`, interference
/// factor `theta` and dimensionless area `v`.
///
/// `p_c = β₀/(θ+β₀) + (e^{-β₀v} - e^{-β_w v}) [1/(θv) - e^{-θv}(β₀/(θ+β₀) + 1/(θv))]`
///
/// Evaluated as `(1 - e^{-θv})/(θv) - e^{-θv} β₀/(θ+β₀)` for the bracket,
/// with a series below `θv = 1e-6`, so `v → 0` is continuous.
pub fn closed_form_coverage(beta0: f64, betaw: f64, theta: f64, v: f64) -> f64 {
    let baseline = if beta0 == 0.0 { 0.0 } else { beta0 / (beta0 + theta) };
    if v == 0.0 || betaw <= beta0 {
        return baseline;
    }
    let delta = (-beta0 * v).exp() * -(-(betaw - beta0) * v).exp_m1();
    let x = theta * v;
    let bracket = one_minus_exp_ratio(x) - (-x).exp() * baseline;
    (baseline + delta * bracket).clamp(0.0, 1.0)
}

/// The coverage floor `β₀/(β₀+θ)` reached with no delay or no threshold.
pub fn baseline_coverage(cfg: &NetworkConfig, gamma: f64) -> f64 {
    let beta0 = cfg.p_i();
    if beta0 == 0.0 {
        0.0
    } else {
        beta0 / (beta0 + theta(cfg, gamma))
    }
}

/// Coverage probability from the noiseless path-loss-4 closed form.
pub fn coverage_closed_form(cfg: &NetworkConfig, scen: &AccessScenario, gamma: f64) -> Result<CoverageResult, AnalyticError> {
    if !cfg.closed_form_regime() {
        return Err(AnalyticError::WrongRegime {
            alpha: cfg.alpha(),
            sigma2: cfg.sigma2(),
        });
    }
    check_gamma(gamma)?;
    let value = if gamma.is_infinite() {
        0.0
    } else {
        closed_form_coverage(cfg.p_i(), cfg.beta_w(scen.w()), theta(cfg, gamma), dimensionless_area(cfg, scen))
    };
    Ok(CoverageResult {
        value,
        method: CoverageMethod::ClosedForm,
        error_estimate: 0.0,
    })
}

/// Closed form when it applies, quadrature otherwise.
pub fn coverage(cfg: &NetworkConfig, scen: &AccessScenario, gamma: f64, spec: &QuadratureSpec) -> Result<CoverageResult, AnalyticError> {
    if cfg.closed_form_regime() {
        coverage_closed_form(cfg, scen, gamma)
    } else {
        coverage_quadrature_with(cfg, scen, gamma, spec)
    }
}

/// `(1/ln 2) ∫_0^∞ p_c(γ)/(1+γ) dγ` for an arbitrary coverage curve.
///
/// With `u = 1/(1+γ)` the weight cancels and the integral becomes
/// `∫_0^1 p_c(1/u - 1)/u du`; the further step `u = s²` removes the
/// `u^{-1/2}` endpoint behaviour of interference-limited coverage, giving
/// `∫_0^1 2 p_c(1/s² - 1)/s ds`.
pub fn capacity_from_coverage<F>(coverage: F, spec: &QuadratureSpec) -> Result<f64, AnalyticError>
where
    F: Fn(f64) -> Result<f64, AnalyticError>,
{
    let failure: RefCell<Option<AnalyticError>> = RefCell::new(None);
    let integrand = |s: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let gamma = 1.0 / (s * s) - 1.0;
        let pc = if gamma <= 0.0 {
            1.0
        } else if !gamma.is_finite() {
            0.0
        } else {
            match coverage(gamma) {
                Ok(p) => p,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        };
        2.0 * pc / s
    };
    let result = integrate(integrand, 0.0, 1.0, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(result?.value / LN_2)
}

/// Ergodic capacity `E[log2(1 + SINR)]` in bits/s/Hz.
pub fn capacity(cfg: &NetworkConfig, scen: &AccessScenario) -> Result<f64, AnalyticError> {
    capacity_with(cfg, scen, &QuadratureSpec::default())
}

pub fn capacity_with(cfg: &NetworkConfig, scen: &AccessScenario, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    let inner = spec.tightened(1e-2);
    capacity_from_coverage(|gamma| Ok(coverage(cfg, scen, gamma, &inner)?.value), spec)
}
