use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which porous electrode a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Electrode {
    Positive,
    Negative,
}

impl fmt::Display for Electrode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Electrode::Positive => f.write_str("cathode"),
            Electrode::Negative => f.write_str("anode"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("invalid `{field}`: {constraint}")]
    Invariant { field: String, constraint: String },

    #[error("{electrode} surface concentration {value:.6e} mol/m3 outside (0, {max:.6e})")]
    Saturation {
        electrode: Electrode,
        value: f64,
        max: f64,
    },

    #[error("electrolyte concentration {value:.6e} mol/m3 in cell {cell} is not positive")]
    NonPositiveElectrolyte { cell: usize, value: f64 },

    #[error("singular electrolyte potential system: {0}")]
    Singular(String),

    #[error("{electrode} porosity {value:.6} outside (0, 1)")]
    Porosity { electrode: Electrode, value: f64 },

    #[error("{electrode} total active area {value:.6e} m2/m3 is not positive")]
    ActiveArea { electrode: Electrode, value: f64 },

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("simulation failed at t = {t_s:.3} s ({capacity_ah:.6} Ah discharged): {source}")]
    Simulation {
        t_s: f64,
        capacity_ah: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("LAM regime undefined: inactive-area coefficient must be positive, got {0:e}")]
    UndefinedRegime(f64),
}

impl Error {
    pub fn invariant(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Invariant {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips the `Simulation` annotation, if any.
    pub fn root(&self) -> &Error {
        match self {
            Error::Simulation { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
