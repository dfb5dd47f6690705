use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] glyphrec_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset contains no samples")]
    NoSamples,

    #[error("bad class label {label} ({context}); labels must lie in 0..49")]
    BadLabel { label: i64, context: String },

    #[error("{} unreadable image(s): {}", .0.len(), summarize(.0))]
    UnreadableImage(Vec<(PathBuf, String)>),

    #[error("class {class} has {count} sample(s), too few for a stratified split")]
    ClassTooSmall { class: usize, count: usize },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
}

fn summarize(items: &[(PathBuf, String)]) -> String {
    items
        .iter()
        .map(|(p, e)| format!("{} ({e})", p.display()))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::ConfigInvalid(msg.into())
    }
}
