//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by any solver module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm} nm is outside the validity band [{min_nm}, {max_nm}] nm of material '{material}'")]
    WavelengthOutOfBand {
        material: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("optical-constant table '{name}', row {row}: {reason}")]
    TableParse {
        name: String,
        row: usize,
        reason: String,
    },

    #[error("unknown material '{name}'; known materials: {known}")]
    UnknownMaterial { name: String, known: String },

    #[error("invalid layer: {0}")]
    InvalidLayer(String),

    #[error("{0}")]
    Domain(String),

    #[error("dipole position z = {z_nm} nm is outside the host layer; admissible open interval is (0, {thickness_nm}) nm")]
    DipoleOutsideHost { z_nm: f64, thickness_nm: f64 },

    #[error("dipole sits exactly on an interface (z = {z_nm} nm); the near-field divergence makes the rate unbounded there")]
    DipoleOnInterface { z_nm: f64 },

    #[error("evanescent tail not converged at the s = {s_max} cutoff; remaining tail estimate {tail_estimate:e} (relative)")]
    TailNotConverged { s_max: f64, tail_estimate: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config/domain, 3 numeric accuracy, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TailNotConverged { .. } | Error::ValidationFailed(_) => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TailNotConverged { .. } | Error::ValidationFailed(_) => "numeric",
            Error::Io(_) => "io",
            _ => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
