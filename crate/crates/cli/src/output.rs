//! Deterministic file emission: fixed float formatting, no timestamps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// 17 significant digits: enough to round-trip an f64, byte-stable across
/// runs.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
        writeln!(file, "{header}")?;
        for row in rows {
            writeln!(file, "{}", row.join(","))?;
        }
        file.flush()?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).expect("serialisable report");
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
