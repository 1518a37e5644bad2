use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    GammaDb,
    RTh,
    W,
    BetaW,
    ThetaRatio,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::GammaDb => "gamma_db",
            SweepVar::RTh => "r_th",
            SweepVar::W => "w",
            SweepVar::BetaW => "beta_w",
            SweepVar::ThetaRatio => "theta_ratio",
        }
    }
}

/// `VAR:START:STOP:STEPS`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + i as f64 * h
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.stop - self.start) / (self.steps - 1) as f64
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.variable.name(), self.start, self.stop, self.steps)
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("expected VAR:START:STOP:STEPS, got {s:?}"));
        }
        let variable = match parts[0] {
            "gamma_db" => SweepVar::GammaDb,
            "r_th" => SweepVar::RTh,
            "w" => SweepVar::W,
            "beta_w" => SweepVar::BetaW,
            "theta_ratio" => SweepVar::ThetaRatio,
            other => return Err(format!("unknown sweep variable {other:?}")),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let start = num(parts[1])?;
        let stop = num(parts[2])?;
        let steps: usize = parts[3].parse().map_err(|e| format!("bad step count {:?}: {e}", parts[3]))?;
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(format!("sweep needs start < stop, got {start}..{stop}"));
        }
        if steps < 2 {
            return Err(format!("sweep needs at least 2 steps, got {steps}"));
        }
        Ok(SweepSpec {
            variable,
            start,
            stop,
            steps,
        })
    }
}
