use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] shiftcurve_core::Error),

    /// A configuration value failed to parse or validate.
    #[error("config key `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("coefficient file {path}: {message}")]
    CoefficientFile { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        AppError::Config {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            AppError::Core(_) => "core",
            AppError::Config { .. } => "config",
            AppError::Io { .. } => "io",
            AppError::CoefficientFile { .. } => "coefficients",
            AppError::Csv(_) => "csv",
        }
    }

    /// One-line JSON rendering for stderr.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            key: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<usize>,
            message: String,
        }
        let (key, line) = match self {
            AppError::Config { key, line, .. } => (Some(key.as_str()), *line),
            _ => (None, None),
        };
        serde_json::to_string(&Line {
            error: self.kind(),
            key,
            line,
            message: self.to_string(),
        })
        .expect("plain struct serializes")
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
