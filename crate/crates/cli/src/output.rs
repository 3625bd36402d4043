use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use graph_yamabe::Error;

/// Exit status contract: 2 hypothesis violation, 3 solver failure, 4 I/O.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Hypothesis = 2,
    Solver = 3,
    Io = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ExitKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        // clap reports its own usage errors with status 2 as well
        Self::new(ExitKind::Hypothesis, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ExitKind::Io, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_kind(e: &Error) -> ExitKind {
    match e {
        Error::HypothesisViolation(_)
        | Error::BadExponent { .. }
        | Error::BadOrder { .. }
        | Error::NonPositivePotential(..)
        | Error::EmptyInterior
        | Error::TrivialAdmissibleSpace => ExitKind::Hypothesis,
        Error::GeometryNotFound(_)
        | Error::NoNehariRoot
        | Error::MaxIterations(_)
        | Error::StalledPath(_)
        | Error::TrivialSolution
        | Error::InadmissibleField(_) => ExitKind::Solver,
        _ => ExitKind::Io,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(exit_kind(&e), e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary sibling and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError::io(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(fail)?;
    file.write_all(contents.as_bytes()).map_err(fail)?;
    file.sync_all().map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}
