//! CSV tables and JSON sidecars. Every file starts with the artifact
//! version and the configuration hash.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Writer {
    pub dir: PathBuf,
    pub hash: String,
    pub csv: bool,
    pub json: bool,
}

impl Writer {
    pub fn prepare(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))
    }

    fn header(&self) -> String {
        format!("# vacmix {VERSION}\n# config-sha256 {}\n", self.hash)
    }

    /// Writes `name` unless CSV output is disabled; returns the path.
    pub fn csv(&self, name: &str, columns: &[String], rows: &[Vec<f64>]) -> Result<Option<PathBuf>> {
        if !self.csv {
            return Ok(None);
        }
        let mut out = self.header();
        out.push_str(&columns.join(", "));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
            let _ = writeln!(out, "{}", cells.join(", "));
        }
        let path = self.dir.join(name);
        write(&path, &out)?;
        Ok(Some(path))
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<Option<PathBuf>> {
        if !self.json {
            return Ok(None);
        }
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            version: &'a str,
            config_sha256: &'a str,
            #[serde(flatten)]
            body: &'a T,
        }
        let text = serde_json::to_string_pretty(&Envelope {
            version: VERSION,
            config_sha256: &self.hash,
            body,
        })
        .map_err(|e| Error::Consistency(e.to_string()))?;
        let path = self.dir.join(name);
        write(&path, &text)?;
        Ok(Some(path))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(number(x).parse::<f64>().unwrap(), x);
        }
    }
}
