//! Network and access-scenario configuration.
//!
//! Every other module reads its symbols from [`NetworkConfig`] and
//! [`AccessScenario`]. Both are validated on construction and immutable
//! afterwards, so they can be shared freely between worker threads.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Tolerance on `p_A + p_I + p_S = 1`.
pub const MODE_SUM_TOLERANCE: f64 = 1e-12;

/// Convert a power level in dBm to Watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Convert a power in Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Convert a ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Small-cell network parameters.
///
/// Powers are linear Watts. Fading gains are exponential with mean
/// `1 / zeta`; the serving dwell times are exponential with rates `mu`
/// (service completion) and `lambda_s` (wake-up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    rho_f: f64,
    p_a: f64,
    p_i: f64,
    p_s: f64,
    mu: f64,
    lambda_s: f64,
    alpha: f64,
    p_tx: f64,
    sigma2: f64,
    zeta: f64,
}

fn require(field: &'static str, ok: bool, reason: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            field,
            reason: reason.to_string(),
        })
    }
}

impl NetworkConfig {
    /// Build a validated configuration.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho_f: f64,
        p_a: f64,
        p_i: f64,
        p_s: f64,
        mu: f64,
        lambda_s: f64,
        alpha: f64,
        p_tx: f64,
        sigma2: f64,
        zeta: f64,
    ) -> Result<Self, ModelError> {
        require("rho_f", rho_f.is_finite() && rho_f > 0.0, "must be > 0")?;
        require("mu", mu.is_finite() && mu > 0.0, "must be > 0")?;
        require("lambda_S", lambda_s.is_finite() && lambda_s > 0.0, "must be > 0")?;
        require("alpha", alpha.is_finite() && alpha > 2.0, "must be > 2")?;
        require("p_tx", p_tx.is_finite() && p_tx > 0.0, "must be > 0")?;
        require("sigma2", sigma2.is_finite() && sigma2 >= 0.0, "must be >= 0")?;
        require("zeta", zeta.is_finite() && zeta > 0.0, "must be > 0")?;
        for (field, p) in [("p_A", p_a), ("p_I", p_i), ("p_S", p_s)] {
            require(field, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
        }
        let sum = p_a + p_i + p_s;
        if (sum - 1.0).abs() > MODE_SUM_TOLERANCE {
            return Err(ModelError::ModeFractionsSum { sum });
        }
        Ok(NetworkConfig {
            rho_f,
            p_a,
            p_i,
            p_s,
            mu,
            lambda_s,
            alpha,
            p_tx,
            sigma2,
            zeta,
        })
    }

    /// Simulation parameters of the reference deployment: 0.005 cells/m²,
    /// 23 dBm transmit power, -104 dBm noise, path-loss exponent 4, mean
    /// sleep and service times of 10 s, unit-mean Rayleigh fading.
    ///
    /// Mode fractions are `(p_A, p_I, p_S) = (0.1, 0.1, 0.8)`, a lightly
    /// loaded network with a sleep-to-idle ratio of 8.
    pub fn reference() -> Self {
        NetworkConfig::new(0.005, 0.1, 0.1, 0.8, 0.1, 0.1, 4.0, dbm_to_watts(23.0), dbm_to_watts(-104.0), 1.0)
            .expect("reference configuration is valid")
    }

    /// Same configuration with the noise power set to zero.
    pub fn noiseless(&self) -> Self {
        NetworkConfig { sigma2: 0.0, ..*self }
    }

    /// Replace the mode fractions, keeping everything else.
    pub fn with_mode_fractions(&self, p_a: f64, p_i: f64, p_s: f64) -> Result<Self, ModelError> {
        NetworkConfig::new(
            self.rho_f,
            p_a,
            p_i,
            p_s,
            self.mu,
            self.lambda_s,
            self.alpha,
            self.p_tx,
            self.sigma2,
            self.zeta,
        )
    }

    /// Replace the transmit power.
    pub fn with_tx_power(&self, p_tx: f64) -> Result<Self, ModelError> {
        NetworkConfig::new(
            self.rho_f,
            self.p_a,
            self.p_i,
            self.p_s,
            self.mu,
            self.lambda_s,
            self.alpha,
            p_tx,
            self.sigma2,
            self.zeta,
        )
    }

    pub fn rho_f(&self) -> f64 {
        self.rho_f
    }
    pub fn p_a(&self) -> f64 {
        self.p_a
    }
    pub fn p_i(&self) -> f64 {
        self.p_i
    }
    pub fn p_s(&self) -> f64 {
        self.p_s
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn p_tx(&self) -> f64 {
        self.p_tx
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// True when the noiseless path-loss-4 closed form applies.
    pub fn closed_form_regime(&self) -> bool {
        self.alpha == 4.0 && self.sigma2 == 0.0
    }

    /// Probability that a cell is idle now or frees up within `w` seconds.
    pub fn beta_w(&self, w: f64) -> f64 {
        beta_w(self, w)
    }
}

/// Where the UE is willing to wait, and for how long.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessScenario {
    r_th: f64,
    w: f64,
}

impl AccessScenario {
    pub fn new(r_th: f64, w: f64) -> Result<Self, ModelError> {
        require("r_th", r_th.is_finite() && r_th >= 0.0, "must be >= 0")?;
        require("w", w.is_finite() && w >= 0.0, "must be >= 0")?;
        Ok(AccessScenario { r_th, w })
    }

    /// Threshold distance in meters.
    pub fn r_th(&self) -> f64 {
        self.r_th
    }

    /// Tolerable delay in seconds.
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn with_r_th(&self, r_th: f64) -> Result<Self, ModelError> {
        AccessScenario::new(r_th, self.w)
    }

    pub fn with_w(&self, w: f64) -> Result<Self, ModelError> {
        AccessScenario::new(self.r_th, w)
    }
}

/// Per-mode electrical power draw and allocated bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    p_active: f64,
    p_idle: f64,
    p_sleep: f64,
    bandwidth: f64,
}

impl PowerModel {
    pub fn new(p_active: f64, p_idle: f64, p_sleep: f64, bandwidth: f64) -> Result<Self, ModelError> {
        for (field, x) in [
            ("p_active", p_active),
            ("p_idle", p_idle),
            ("p_sleep", p_sleep),
            ("bandwidth", bandwidth),
        ] {
            require(field, x.is_finite() && x > 0.0, "must be > 0")?;
        }
        require("p_idle", p_sleep <= p_idle, "sleep power must not exceed idle power")?;
        require("p_active", p_idle <= p_active, "idle power must not exceed active power")?;
        Ok(PowerModel {
            p_active,
            p_idle,
            p_sleep,
            bandwidth,
        })
    }

    /// Pico-cell style draw: 7.6 W active, 6.8 W idle, 4.3 W asleep over a
    /// 10 MHz carrier. These are implementer-chosen defaults, not measured
    /// values.
    pub fn pico_default() -> Self {
        PowerModel::new(7.6, 6.8, 4.3, 10e6).expect("default power model is valid")
    }

    pub fn p_active(&self) -> f64 {
        self.p_active
    }
    pub fn p_idle(&self) -> f64 {
        self.p_idle
    }
    pub fn p_sleep(&self) -> f64 {
        self.p_sleep
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, ModelError> {
        PowerModel::new(self.p_active * factor, self.p_idle * factor, self.p_sleep * factor, self.bandwidth)
    }

    /// Mean power of a cell under the stationary mode fractions of `cfg`.
    pub fn mean_power(&self, cfg: &NetworkConfig) -> f64 {
        cfg.p_a() * self.p_active + cfg.p_i() * self.p_idle + cfg.p_s() * self.p_sleep
    }
}

/// `1 - p_A e^{-mu w} - p_S e^{-lambda_S w}`.
///
/// At `w == 0` this returns `p_I` bit-for-bit rather than going through
/// `1 - p_A - p_S`.
pub fn beta_w(cfg: &NetworkConfig, w: f64) -> f64 {
    debug_assert!(w >= 0.0);
    if w == 0.0 {
        return cfg.p_i;
    }
    // p_I plus the mass freed up by time w; equal to 1 - p_A e^{-mu w} -
    // p_S e^{-lambda_S w} but monotone term by term.
    let freed = cfg.p_a * -(-cfg.mu * w).exp_m1() + cfg.p_s * -(-cfg.lambda_s * w).exp_m1();
    (cfg.p_i + freed).clamp(cfg.p_i, 1.0)
}

/// `v = rho_f * pi * r_th^2`, the expected number of cells inside the
/// threshold disk.
pub fn dimensionless_area(cfg: &NetworkConfig, scen: &AccessScenario) -> f64 {
    cfg.rho_f * PI * scen.r_th * scen.r_th
}

/// Threshold distance that corresponds to a dimensionless area `v`.
pub fn radius_for_area(cfg: &NetworkConfig, v: f64) -> f64 {
    (v.max(0.0) / (PI * cfg.rho_f)).sqrt()
}
