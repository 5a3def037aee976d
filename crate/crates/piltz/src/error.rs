use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] piltz_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: String,
}

impl AppError {
    /// 1 for configuration problems, 2 for everything raised while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Compute(_) => "computation",
            Self::Io(_) => "io",
            Self::Failed(_) => "verification",
        }
    }

    /// One-line JSON for the diagnostic stream.
    pub fn diagnostic(&self) -> String {
        serde_json::to_string(&Diagnostic { error: self.kind(), message: self.to_string() })
            .unwrap_or_else(|_| self.to_string())
    }
}
