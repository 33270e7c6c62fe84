use thiserror::Error;

use crate::model::Regime;

/// Errors raised by the model, solvers and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A closed form that needs exchange was asked to run with `sigma == 0`.
    #[error("regime {regime} requires sigma > 0; dispatch sigma == 0 to the no-exchange solution")]
    ZeroSigma { regime: Regime },

    /// The fixed-point equations imply a negative production rate for the importer.
    #[error(
        "implied production of the importing country is negative ({production}); \
         requires sigma*(eta - 1) = {exchanged} <= consumption {consumption}"
    )]
    InfeasibleProduction {
        production: f64,
        exchanged: f64,
        consumption: f64,
    },

    #[error("event localization failed at t = {time}: {detail}")]
    EventLocalization { time: f64, detail: String },

    #[error("segment limit of {limit} exceeded at t = {time} (chattering at the exchange threshold)")]
    TooManySegments { limit: usize, time: f64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Negative { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}
