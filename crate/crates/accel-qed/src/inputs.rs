//! Atom datasets and tabulated wall kernels on disk.

use std::fs;
use std::path::{Path, PathBuf};

use accel_qed_core::atom::{AtomModel, Transition};
use accel_qed_core::wall::TabulatedKernel;
use serde::Deserialize;

use crate::config::{AtomSource, BUILTIN_HYDROGEN};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    name: String,
    state: String,
    #[allow(dead_code)]
    #[serde(default)]
    source: Option<String>,
    transitions: Vec<TransitionRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRecord {
    omega_ba_rad_s: f64,
    dipole_sq_cm2: f64,
}

pub fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses the JSON atom dataset format:
/// `{"name", "state", "source"?, "transitions": [{"omega_ba_rad_s", "dipole_sq_cm2"}]}`.
pub fn parse_dataset(text: &str, origin: &Path) -> Result<AtomModel, CliError> {
    let bad = |message: String| CliError::Input {
        path: origin.to_path_buf(),
        message,
    };
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let transitions = file
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Transition::new(t.omega_ba_rad_s, t.dipole_sq_cm2).map_err(|e| bad(format!("transitions[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    AtomModel::new(file.name, file.state, transitions).map_err(|e| bad(e.to_string()))
}

pub fn load_atom(source: &AtomSource, base: &Path) -> Result<AtomModel, CliError> {
    match source {
        AtomSource::Builtin(name) if name == BUILTIN_HYDROGEN => Ok(AtomModel::hydrogen_1s()),
        AtomSource::Builtin(name) => Err(CliError::Input {
            path: PathBuf::from(name),
            message: "unknown builtin atom".into(),
        }),
        AtomSource::Dataset(path) => {
            let path = resolve(base, path);
            parse_dataset(&read(&path)?, &path)
        }
    }
}

/// Reads a kernel table: header `omega_rad_s,K_value`, strictly increasing ω.
pub fn parse_kernel_table(text: &str, origin: &Path) -> Result<TabulatedKernel, CliError> {
    let bad = |message: String| CliError::Input {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "omega_rad_s" || &headers[1] != "K_value" {
        return Err(bad(format!(
            "expected header `omega_rad_s,K_value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut omega = Vec::new();
    let mut value = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| bad(format!("line {line}: {e}")))?;
        let field = |j: usize| -> Result<f64, CliError> {
            record[j]
                .parse::<f64>()
                .map_err(|_| bad(format!("line {line}: `{}` is not a number", &record[j])))
        };
        omega.push(field(0)?);
        value.push(field(1)?);
    }
    TabulatedKernel::new(omega, value).map_err(|e| bad(e.to_string()))
}

pub fn load_kernel_table(path: &str, base: &Path) -> Result<TabulatedKernel, CliError> {
    let path = resolve(base, path);
    parse_kernel_table(&read(&path)?, &path)
}
