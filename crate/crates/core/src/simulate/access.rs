use serde::{Deserialize, Serialize};

use super::field::{CellField, CellMode};
use crate::analytic::AccessEvent;
use crate::error::SimError;
use crate::model::{AccessScenario, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessOutcome {
    pub event: AccessEvent,
    /// Index of the serving cell in the field.
    pub server: usize,
    pub serving_distance: f64,
    pub wait: f64,
    pub sinr: Option<f64>,
}

/// Play out the access protocol for the UE at the origin.
///
/// Idle cells inside `r_th` serve at once (nearest first). Otherwise the
/// first busy or sleeping cell inside `r_th` to free up within `w` serves.
/// Failing both, the UE takes the nearest cell beyond `r_th` that is idle at
/// time `w`.
pub fn resolve_access(field: &CellField, scen: &AccessScenario) -> Result<AccessOutcome, SimError> {
    let (r_th, w) = (scen.r_th(), scen.w());
    let mut nearest_idle: Option<(usize, f64)> = None;
    let mut earliest: Option<(usize, f64)> = None;
    let mut outside: Option<(usize, f64)> = None;

    for (i, c) in field.cells.iter().enumerate() {
        if c.distance <= r_th {
            if c.mode == CellMode::Idle {
                if nearest_idle.is_none_or(|(_, d)| c.distance < d) {
                    nearest_idle = Some((i, c.distance));
                }
            } else if c.clock <= w && earliest.is_none_or(|(_, t)| c.clock < t) {
                earliest = Some((i, c.clock));
            }
        } else if c.mode_at(w) == CellMode::Idle && outside.is_none_or(|(_, d)| c.distance < d) {
            outside = Some((i, c.distance));
        }
    }

    let outcome = |event, server: usize, wait| AccessOutcome {
        event,
        server,
        serving_distance: field.cells[server].distance,
        wait,
        sinr: None,
    };
    if let Some((i, _)) = nearest_idle {
        return Ok(outcome(AccessEvent::Immediate, i, 0.0));
    }
    if let Some((i, t)) = earliest {
        return Ok(outcome(AccessEvent::Delayed, i, t));
    }
    match outside {
        Some((i, _)) => Ok(outcome(AccessEvent::Outside, i, w)),
        None => Err(SimError::NoServer { r_sim: field.r_sim }),
    }
}

/// SINR of the serving link with all other cells active at `at_time`
/// interfering; `f64::INFINITY` when there is neither interference nor noise.
pub fn sample_sinr(field: &CellField, outcome: &AccessOutcome, cfg: &NetworkConfig, at_time: f64) -> f64 {
    let alpha = cfg.alpha();
    let server = &field.cells[outcome.server];
    let interference: f64 = field
        .cells
        .iter()
        .enumerate()
        .filter(|(i, c)| *i != outcome.server && c.mode_at(at_time) == CellMode::Active)
        .map(|(_, c)| c.gain * c.distance.powf(-alpha))
        .sum();
    sinr_of(server.gain, server.distance, interference, cfg)
}

/// SINR of a link of power gain `gain` at `distance` against the cells of
/// `interferers` that are active in their initial marks.
pub fn sinr_against(gain: f64, distance: f64, interferers: &CellField, cfg: &NetworkConfig) -> f64 {
    let alpha = cfg.alpha();
    let interference: f64 = interferers
        .cells
        .iter()
        .filter(|c| c.mode == CellMode::Active)
        .map(|c| c.gain * c.distance.powf(-alpha))
        .sum();
    sinr_of(gain, distance, interference, cfg)
}

fn sinr_of(gain: f64, distance: f64, interference: f64, cfg: &NetworkConfig) -> f64 {
    let signal = gain * distance.powf(-cfg.alpha());
    let noise = cfg.sigma2() / cfg.p_tx();
    let denom = interference + noise;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        signal / denom
    }
}
