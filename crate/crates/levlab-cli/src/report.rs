//! Output plumbing. Every file a command writes goes through here so the
//! reproducibility contract is enforced in one place:
//!
//! - JSON reports carry `schema_version`, `config_hash`, and `seed` and no
//!   timestamp at all;
//! - CSV files start with exactly one `# generated ...` header line (the
//!   only timestamped line in any output) followed by a
//!   `# config <hash> seed <n>` line.
//!
//! Re-running with the same configuration therefore reproduces every file
//! byte-identically apart from the single `# generated` line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub struct Reporter {
    out_dir: PathBuf,
    config_hash: String,
    seed: u64,
}

impl Reporter {
    pub fn new(out_dir: &Path, config_hash: String, seed: u64) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Self { out_dir: out_dir.to_path_buf(), config_hash, seed })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Write a JSON report with the envelope fields injected at top level.
    pub fn write_json(&self, name: &str, payload: Value) -> Result<PathBuf> {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "seed": self.seed,
        });
        let map = doc.as_object_mut().expect("object");
        if let Value::Object(fields) = payload {
            for (k, v) in fields {
                map.insert(k, v);
            }
        } else {
            map.insert("payload".into(), payload);
        }
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Open a CSV file and emit the two header lines; the caller appends
    /// rows (or delegates to a library `to_csv`).
    pub fn csv_writer(&self, name: &str) -> Result<impl Write> {
        let path = self.path(name);
        let mut w = std::io::BufWriter::new(
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated unix:{now}")?;
        writeln!(w, "# config {} seed {}", self.config_hash, self.seed)?;
        Ok(w)
    }

    /// Write a CSV of f64 columns.
    pub fn write_csv(&self, name: &str, header: &str, rows: &[Vec<f64>]) -> Result<PathBuf> {
        let mut w = self.csv_writer(name)?;
        writeln!(w, "{header}")?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(self.path(name))
    }
}
