//! Run configuration and the errors that make a run unusable.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vss_core::catalog::CatalogError;
use vss_core::ode::{OdeError, OdeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Identities,
    OdeTrace,
    OdeClassify,
    SdsScan,
    Suite,
    Catalog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<OdeParams>,
    pub samples: usize,
    /// Overrides every per-check default tolerance when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub seed: u64,
    /// Replace analytic metric jets by finite differences.
    pub fd_jets: bool,
    /// Initial state and length for `ode-trace`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            space: None,
            params: None,
            samples: 64,
            tol: None,
            seed: 0,
            fd_jets: false,
            h0: None,
            v0: None,
            span: None,
            json: None,
            csv: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(CliError::InvalidParams("samples must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::InvalidParams(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(p) = &self.params {
            p.validate()?;
        }
        Ok(())
    }

    /// The override if present, else `default`.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn params(&self) -> Result<OdeParams, CliError> {
        self.params
            .ok_or_else(|| CliError::InvalidParams("ODE parameters (--R, --c0, --k, --n) are required".into()))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    UnknownSpace(#[from] CatalogError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0}")]
    Engine(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for usage and configuration errors, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownSpace(_) | CliError::InvalidParams(_) => 2,
            _ => 1,
        }
    }
}

impl From<OdeError> for CliError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::InvalidParams(_) | OdeError::NotPeriodic(_) | OdeError::DomainError { .. } => {
                CliError::InvalidParams(e.to_string())
            }
            other => CliError::Engine(other.to_string()),
        }
    }
}
