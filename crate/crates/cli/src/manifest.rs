//! Run manifests: one `key=value` per line, insertion-ordered, written
//! next to every output file (path + ".manifest"). A manifest carries
//! everything needed to re-execute its command; `time_*` keys are
//! informational and ignored on replay.

use std::fs;
use std::path::{Path, PathBuf};

use crate::errors::{CliError, CliResult};

#[derive(Debug, Default, Clone)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.push("version", env!("CARGO_PKG_VERSION"));
        m.push("command", command);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        debug_assert!(!key.contains('=') && !value.contains('\n'));
        self.entries.push((key.to_string(), value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key)
            .ok_or_else(|| CliError::Validation(format!("manifest is missing key `{key}`")))
    }

    pub fn require_parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| {
            CliError::Validation(format!("manifest key `{key}` has unparsable value `{raw}`"))
        })
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest");
        PathBuf::from(name)
    }

    pub fn write_next_to(&self, output: &Path) -> CliResult<()> {
        let path = Self::path_for(output);
        let mut text = String::new();
        for (k, v) in &self.entries {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    pub fn read(path: &Path) -> CliResult<Manifest> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "{}: line {} is not key=value",
                    path.display(),
                    idx + 1
                ))
            })?;
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(Manifest { entries })
    }
}
