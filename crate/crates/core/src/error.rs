use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("mode fractions p_A + p_I + p_S must sum to 1 (got {sum})")]
    ModeFractionsSum { sum: f64 },
}

impl ModelError {
    /// Name of the configuration key the error refers to.
    pub fn field(&self) -> &'static str {
        match self {
            ModelError::InvalidParameter { field, .. } => field,
            ModelError::ModeFractionsSum { .. } => "p_A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {value}, error {error})")]
    NonConvergence { subdivisions: usize, value: f64, error: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadratic has no real root")]
    NoRealRoot,
    #[error("all quadratic coefficients are zero")]
    DegenerateQuadratic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("distance {r} m lies outside the support of the {event} distance law")]
    OutsideSupport { event: &'static str, r: f64 },
    #[error("{0} distance law is degenerate for a zero threshold distance")]
    DegenerateSupport(&'static str),
    #[error("closed form requires alpha = 4 and sigma2 = 0 (got alpha = {alpha}, sigma2 = {sigma2})")]
    WrongRegime { alpha: f64, sigma2: f64 },
    #[error("SINR threshold must be > 0 (got {0})")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("Taylor quadratic has no positive real root")]
    NoInteriorOptimum,
    #[error("invalid bisection bracket: upper bound {upper} must exceed epsilon {epsilon}")]
    InvalidBracket { upper: f64, epsilon: f64 },
    #[error("target availability {target} is outside [{beta0}, 1)")]
    UnreachableAvailability { target: f64, beta0: f64 },
}

impl From<NumericsError> for OptimizeError {
    fn from(e: NumericsError) -> Self {
        OptimizeError::Analytic(AnalyticError::Numerics(e))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("no cell is available inside the {r_sim} m simulation disk")]
    NoServer { r_sim: f64 },
    #[error("invalid simulation input: {0}")]
    Invalid(String),
}
