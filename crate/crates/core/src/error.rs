use thiserror::Error;

/// Failure modes shared by every analysis routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The parameters fall outside the regime an operation is defined for
    /// (`p2 == 0`, `|s2| <= 1`, non-finite values, ...).
    #[error("parameter regime not supported: {0}")]
    Regime(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Cherkas transformation is singular at theta = {theta}")]
    SingularTransform { theta: f64 },

    /// An analytic verdict was contradicted by a sampled check.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// The trajectory reached the curve where the angular velocity vanishes,
    /// so the angle can no longer be used as the independent variable.
    #[error("angular velocity vanished along the trajectory (theta = {theta}, r = {r})")]
    SectionBreakdown { theta: f64, r: f64 },

    #[error("Abel solution escaped to |x| = {x:e} at theta = {theta}")]
    BlowUp { theta: f64, x: f64 },

    #[error("no limit cycle in the bracket [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no-contact polygonal could not be certified: {0}")]
    Construction(String),
}

impl Error {
    /// `true` for errors caused by the parameter regime rather than by numerics.
    pub fn is_regime(&self) -> bool {
        matches!(self, Error::Regime(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
