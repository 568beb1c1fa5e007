//! Tab-separated numeric text output: self-describing header row, full
//! double precision (17 significant digits) so reruns diff bit-exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Format one value at full double precision.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write a table of string cells under a `#`-prefixed header row.
    pub fn write_table(&self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.path(name);
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&columns.join("\t"));
        out.push('\n');
        for row in rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Numeric convenience wrapper.
    pub fn write_numeric(&self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|v| num(*v)).collect())
            .collect();
        self.write_table(name, columns, &rows)
    }

    /// Record what produced this directory.
    pub fn write_manifest(&self, subcommand: &str, config: Option<&Path>, seed: u64) -> Result<()> {
        let path = self.path("manifest.txt");
        let mut f = fs::File::create(&path)?;
        writeln!(f, "tool = hiereco {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(f, "subcommand = {subcommand}")?;
        writeln!(
            f,
            "config = {}",
            config.map_or_else(|| "-".to_string(), |p| p.display().to_string())
        )?;
        writeln!(f, "seed = {seed}")?;
        writeln!(f, "out = {}", self.root.display())?;
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(f, "timestamp_unix = {stamp}")?;
        Ok(())
    }
}
