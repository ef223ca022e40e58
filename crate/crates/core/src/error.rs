use thiserror::Error;

/// Failures raised by the steady-state models and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside its domain: {constraint}")]
    Domain {
        quantity: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("infeasible operating point: {0}")]
    InfeasibleOperatingPoint(String),

    #[error("low-power coordination cannot reach the target: {0}")]
    InfeasibleLpc(String),

    #[error("infeasible corridor: {0}")]
    InfeasibleCorridor(String),

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("no feasible LCC transformer ratio (discriminant {discriminant:.6e})")]
    NoFeasibleRatio { discriminant: f64 },

    #[error("switch limits unreachable: {0}")]
    SwitchLimitsUnreachable(String),

    #[error("dc current must be positive, got {0} kA")]
    NonPositiveDcCurrent(f64),

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_non_negative(quantity: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value,
            constraint: "must be >= 0",
        })
    }
}

pub(crate) fn ensure_positive(quantity: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value,
            constraint: "must be > 0",
        })
    }
}
