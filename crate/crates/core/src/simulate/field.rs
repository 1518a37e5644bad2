use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellMode {
    Active,
    Idle,
    Sleeping,
}

/// One small cell as seen from the UE at the origin.
///
/// `clock` is the remaining service (active) or sleep (sleeping) time and is
/// zero for idle cells. `later_mode` is an independent stationary mark used
/// for any instant after the access request; `gain` is the Rayleigh power
/// fade of the cell's link to the UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub distance: f64,
    pub mode: CellMode,
    pub clock: f64,
    pub later_mode: CellMode,
    pub gain: f64,
}

impl Cell {
    /// Mode at time `t` after the request.
    pub fn mode_at(&self, t: f64) -> CellMode {
        if t > 0.0 {
            self.later_mode
        } else {
            self.mode
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellField {
    pub r_sim: f64,
    pub cells: Vec<Cell>,
}

impl CellField {
    pub fn from_cells(r_sim: f64, cells: Vec<Cell>) -> Self {
        CellField { r_sim, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The same realization restricted to a smaller disk.
    pub fn truncated(&self, r: f64) -> CellField {
        CellField {
            r_sim: r.min(self.r_sim),
            cells: self.cells.iter().filter(|c| c.distance <= r).copied().collect(),
        }
    }
}

/// Radius below which a disk entirely misses the bulk of the field.
pub fn reference_radius(cfg: &NetworkConfig) -> f64 {
    1.0 / (cfg.rho_f() * std::f64::consts::PI).sqrt()
}

const MAX_MEAN_CELLS: f64 = 2.0e5;

/// Disk radius whose far-field interference share is below 0.1%.
///
/// For a Poisson field the mean interference beyond `R` scales as
/// `R^{2-α}`, so the share beyond `R` relative to beyond `r_ref` is
/// `(r_ref/R)^{α-2}`. The radius is at least `20 r_ref` and at most what
/// keeps the expected cell count manageable.
pub fn default_r_sim(cfg: &NetworkConfig, r_th: f64) -> f64 {
    let r_ref = reference_radius(cfg);
    let tail = 1.01 * 1000f64.powf(1.0 / (cfg.alpha() - 2.0));
    let mut r = r_ref * tail.max(20.0);
    let cap = r_ref * MAX_MEAN_CELLS.sqrt();
    if r > cap {
        log::warn!(
            "r_sim capped at {cap:.1} m for alpha = {}; truncated interference exceeds 0.1%",
            cfg.alpha()
        );
        r = cap;
    }
    r.max(r_th + 10.0 * r_ref)
}

fn mark<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> CellMode {
    let u: f64 = rng.random();
    if u < cfg.p_a() {
        CellMode::Active
    } else if u < cfg.p_a() + cfg.p_i() {
        CellMode::Idle
    } else {
        CellMode::Sleeping
    }
}

pub(crate) fn sample_field_with<R: Rng + ?Sized>(cfg: &NetworkConfig, r_sim: f64, rng: &mut R) -> CellField {
    let mean = cfg.rho_f() * std::f64::consts::PI * r_sim * r_sim;
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive Poisson mean").sample(rng) as usize
    } else {
        0
    };
    let service = Exp::new(cfg.mu()).expect("positive service rate");
    let sleep = Exp::new(cfg.lambda_s()).expect("positive sleep rate");
    let fade = Exp::new(cfg.zeta()).expect("positive fading rate");
    let mut cells = Vec::with_capacity(count);
    for _ in 0..count {
        let distance = r_sim * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let mode = mark(cfg, rng);
        let clock = match mode {
            CellMode::Active => service.sample(rng),
            CellMode::Sleeping => sleep.sample(rng),
            CellMode::Idle => 0.0,
        };
        let later_mode = mark(cfg, rng);
        let gain = fade.sample(rng);
        cells.push(Cell {
            x: distance * phi.cos(),
            y: distance * phi.sin(),
            distance,
            mode,
            clock,
            later_mode,
            gain,
        });
    }
    CellField { r_sim, cells }
}

/// Poisson field in a disk of radius `r_sim` around the UE.
pub fn sample_field(cfg: &NetworkConfig, r_sim: f64, seed: u64) -> Result<CellField, SimError> {
    if !(r_sim > 0.0) || !r_sim.is_finite() {
        return Err(SimError::Invalid(format!("r_sim must be positive and finite, got {r_sim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_field_with(cfg, r_sim, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_field_is_reproducible() {
        let cfg = NetworkConfig::reference();
        let a = sample_field(&cfg, 60.0, 9).unwrap();
        let b = sample_field(&cfg, 60.0, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_field(&cfg, 60.0, 10).unwrap());
    }

    #[test]
    fn positions_inside_disk() {
        let cfg = NetworkConfig::reference();
        let f = sample_field(&cfg, 40.0, 1).unwrap();
        for c in &f.cells {
            assert!(c.distance <= 40.0);
            assert!((c.x.hypot(c.y) - c.distance).abs() < 1e-9);
            assert_eq!(c.clock == 0.0, c.mode == CellMode::Idle);
        }
    }

    #[test]
    fn invalid_radius() {
        let cfg = NetworkConfig::reference();
        assert!(sample_field(&cfg, 0.0, 1).is_err());
        assert!(sample_field(&cfg, f64::NAN, 1).is_err());
    }

    #[test]
    fn default_radius_budget() {
        let cfg = NetworkConfig::reference();
        let r = default_r_sim(&cfg, 10.0);
        let share = (reference_radius(&cfg) / r).powf(cfg.alpha() - 2.0);
        assert!(share < 1e-3);
        assert!(r >= 20.0 * reference_radius(&cfg));
    }
}
