//! Report envelope and atomic artifact writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::manifest::RunManifest;

pub const SCHEMA_ID: &str = "lindyn-report/1";

/// Outcome class of a run, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Decided,
    Unknowns,
    Undecided,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Decided => 0,
            Status::Unknowns => 3,
            Status::Undecided => 4,
        }
    }
}

/// What a command produced: the JSON result plus optional CSV and SVG data.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

impl Outcome {
    pub fn new(status: Status, result: Value) -> Self {
        Outcome { status, result, csv: None, svg: None }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_svg(mut self, svg: String) -> Self {
        self.svg = Some(svg);
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'a str,
    status: Status,
    manifest: &'a RunManifest,
    result: &'a Value,
}

#[derive(Debug, Clone, Default)]
pub struct Destinations {
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

pub fn render(command: &str, manifest: &RunManifest, outcome: &Outcome) -> String {
    let env = Envelope { schema: SCHEMA_ID, command, status: outcome.status, manifest, result: &outcome.result };
    let mut text = serde_json::to_string_pretty(&env).expect("reports are plain JSON");
    text.push('\n');
    text
}

/// Writes the report to `--out` (stdout without it). CSV goes to `--csv`, or
/// beside `--out` with a `.csv` extension; SVG only to `--svg`.
pub fn emit(command: &str, manifest: &RunManifest, outcome: &Outcome, dest: &Destinations) -> Result<(), CliError> {
    let report = render(command, manifest, outcome);
    match &dest.out {
        Some(path) => write_atomic(path, report.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    if let Some(csv) = &outcome.csv {
        let path = dest.csv.clone().or_else(|| dest.out.as_ref().map(|p| p.with_extension("csv")));
        if let Some(path) = path {
            write_atomic(&path, csv.as_bytes())?;
        }
    }
    match (&outcome.svg, &dest.svg) {
        (Some(svg), Some(path)) => write_atomic(path, svg.as_bytes())?,
        (None, Some(path)) => {
            return Err(CliError::Usage(format!("this command has no plot to write to {}", path.display())))
        }
        _ => {}
    }
    Ok(())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn status_order_picks_worst() {
        assert_eq!([Status::Decided, Status::Undecided, Status::Unknowns].into_iter().max(), Some(Status::Undecided));
        assert_eq!(Status::Unknowns.exit_code(), 3);
    }
}
