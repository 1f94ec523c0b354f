//! CLI-side errors: configuration problems and pipeline failures annotated
//! with the stage that produced them.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config {path}, line {line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("config: {0}")]
    InvalidConfig(String),
    #[error("stage {stage} failed on {input}: {source}")]
    Stage {
        stage: &'static str,
        input: String,
        #[source]
        source: had_core::Error,
    },
    #[error("reports disagree on the fixture: {a} vs {b}")]
    FixtureMismatch { a: String, b: String },
    #[error("report {0} carries no per-run accuracies (unlabeled input?)")]
    NoAccuracies(String),
    #[error("need at least 2 reports to compare, got {0}")]
    TooFewReports(usize),
    #[error(transparent)]
    Core(#[from] had_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Attach a stage name and input identifier to a core error.
pub(crate) fn stage<'a>(
    stage_name: &'static str,
    input: &'a str,
) -> impl FnOnce(had_core::Error) -> Error + 'a {
    move |source| Error::Stage { stage: stage_name, input: input.to_string(), source }
}
