//! Exit-code classification for library errors.

use riesz_core::ballpot::BallPotentialError;
use riesz_core::centers::CenterError;
use riesz_core::engine::EngineError;
use riesz_core::rings::RingError;
use riesz_core::shapes::ShapeError;
use serde_json::json;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad input: flags, shape files, points outside the domain of a formula.
    Validation(String),
    /// The computation itself failed or produced a non-finite value.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Validation(m) => ("validation", m),
            CliError::Numerical(m) => ("numerical", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.exit_code() } }).to_string()
    }
}

impl From<ShapeError> for CliError {
    fn from(e: ShapeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BallPotentialError> for CliError {
    fn from(e: BallPotentialError) -> Self {
        match e {
            BallPotentialError::Special(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<RingError> for CliError {
    fn from(e: RingError) -> Self {
        match e {
            RingError::EmptyInterior => CliError::Numerical(e.to_string()),
            RingError::Shape(s) => s.into(),
            RingError::InvalidRadius(_) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CenterError> for CliError {
    fn from(e: CenterError) -> Self {
        match e {
            CenterError::Engine(inner) => inner.into(),
            CenterError::Shape(inner) => inner.into(),
            CenterError::Ring(inner) => inner.into(),
            CenterError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            CenterError::NoInteriorStart | CenterError::AllStartsFailed(_) => CliError::Numerical(e.to_string()),
        }
    }
}

/// Rejects NaN and infinities in a computed value.
pub fn finite(what: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Numerical(format!("{what} is not finite ({v})")))
    }
}
