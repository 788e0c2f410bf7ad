use thiserror::Error;

/// Errors raised by the accounting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violates a documented constraint; the message names it.
    #[error("{0}")]
    Validation(String),
    /// A scalar argument lies outside its admissible interval.
    #[error("{name} = {value} is outside {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    /// Structural problem with an argument (empty list, bad dimensions).
    #[error("{0}")]
    Argument(String),
    /// The parameters make the requested quantity undefined.
    #[error("{0}")]
    Degenerate(String),
    /// The requested enumeration is too large for the chosen mode.
    #[error("{0}")]
    Capacity(String),
    /// A user-supplied divergence generator is not admissible.
    #[error("{0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range(name: &'static str, value: f64, range: &'static str) -> Error {
    Error::Range { name, value, range }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(range(name, value, "[0, 1]"))
    }
}

pub(crate) fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(range(name, value, "[0, inf)"))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(range(name, value, "(0, inf)"))
    }
}
