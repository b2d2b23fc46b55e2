use std::fmt;

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Index,
    Sample,
    Select,
    Search,
    Merge,
    Evaluate,
    Report,
    Compare,
    Cache,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Config => "config",
            Self::Load => "load",
            Self::Index => "index",
            Self::Sample => "sample",
            Self::Select => "select",
            Self::Search => "search",
            Self::Merge => "merge",
            Self::Evaluate => "evaluate",
            Self::Report => "report",
            Self::Compare => "compare",
            Self::Cache => "cache",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source:#}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: anyhow::Error,
}

pub type Result<T, E = StageError> = std::result::Result<T, E>;

pub trait StageContext<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> StageContext<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| StageError { stage, source: e.into() })
    }
}

/// Builds a stage error from a message.
pub fn fail(stage: Stage, msg: impl fmt::Display) -> StageError {
    StageError { stage, source: anyhow::anyhow!("{msg}") }
}
