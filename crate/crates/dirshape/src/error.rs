use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{0}: no foreground pixel at this threshold")]
    EmptyForeground(PathBuf),
    #[error("{0}: shape is disconnected ({1} components)")]
    Disconnected(PathBuf, usize),
    #[error(transparent)]
    Core(#[from] dirshape_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{origin}:{line}: {message}")]
    Parse { origin: String, line: usize, message: String },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("{} entries failed:\n{}", .0.len(), format_failures(.0))]
    Entries(Vec<(String, Error)>),
}

fn format_failures(failures: &[(String, Error)]) -> String {
    failures.iter().map(|(id, e)| format!("  {id}: {e}")).collect::<Vec<_>>().join("\n")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Whether the failure is about the shapes themselves rather than about
    /// reading, parsing or configuring.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::EmptyForeground(_) | Error::Disconnected(..) => true,
            Error::Core(e) => !matches!(e, dirshape_core::Error::InvalidConfig(_)),
            Error::Entries(v) => v.iter().all(|(_, e)| e.is_validation()),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
