use thiserror::Error;

/// Errors surfaced by the sensor library.
#[derive(Debug, Error)]
pub enum SensorError {
    /// Input violated a precondition (dimension, range, non-physical value).
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// A numerical invariant that should hold to tolerance was violated.
    #[error("numerical consistency violation: {0}")]
    NumericalConsistency(String),

    /// A normalizing quantity was too small to divide by.
    #[error("degenerate normalization: {0}")]
    DegenerateNormalization(String),
}

impl SensorError {
    pub fn rejected(msg: impl Into<String>) -> Self {
        SensorError::RejectedInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        SensorError::NumericalConsistency(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        SensorError::DegenerateNormalization(msg.into())
    }
}
