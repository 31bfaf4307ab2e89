//! Persistence of trajectories, summaries and sweep grids.
//!
//! Everything is rendered to bytes first and then written through an
//! [`OutputBundle`], which records a SHA-256 digest for every file and closes
//! with a `manifest.json` listing them. Floating-point values are written
//! with six significant digits; months, counts and seeds are exact.
//!
//! Schemas:
//!
//! - per-month trajectory CSV: [`RUN_CSV_HEADER`], one row per month
//!   including month 0;
//! - ensemble summary JSON: `config`, `n_runs`, `mean_cce`, `q1`, `median`,
//!   `q3`, `types` (`A`..`F`), `crash_fraction`, plus the bimodality fields;
//! - sweep grid CSV: `cell`, one column per axis (named by its config key),
//!   then [`GRID_STAT_COLUMNS`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::analysis::EnsembleSummary;
use crate::config::SimConfig;
use crate::engine::RunRecord;
use crate::ensemble::SweepResult;
use crate::error::{Error, Result};
use crate::social::Network;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIVEST_OUT";

pub const RUN_CSV_HEADER: [&str; 8] = [
    "month",
    "price",
    "fci",
    "cce",
    "reserve",
    "budget",
    "policy",
    "held_shares",
];

/// Grid CSV columns following the axis columns.
pub const GRID_STAT_COLUMNS: [&str; 14] = [
    "n_runs",
    "mean_cce",
    "q1",
    "median",
    "q3",
    "A",
    "B",
    "C",
    "D",
    "E",
    "F",
    "crash_fraction",
    "bimodal",
    "config",
];

/// Six significant digits, plain notation where it is short, trailing zeros
/// removed (`3.16060` → `3.1606`, `250` → `250`, `2e-10` → `2e-10`).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

fn csv_bytes(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("writing CSV to memory cannot fail");
    w.into_inner().expect("flushing an in-memory CSV cannot fail")
}

/// Per-month trajectory of one run.
pub fn run_csv(record: &RunRecord) -> Vec<u8> {
    csv_bytes(|w| {
        w.write_record(RUN_CSV_HEADER)?;
        for r in record.rows() {
            w.write_record([
                r.month.to_string(),
                fmt_sig(r.price),
                fmt_sig(r.fci),
                fmt_sig(r.cce),
                fmt_sig(r.reserve),
                fmt_sig(r.budget),
                u8::from(r.policy).to_string(),
                fmt_sig(r.held_shares),
            ])?;
        }
        Ok(())
    })
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::json!(round_sig(x));
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut bytes = serde_json::to_vec_pretty(&v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn summary_json(summary: &EnsembleSummary) -> Result<Vec<u8>> {
    pretty_json(summary)
}

/// Sweep grid, one row per cell in row-major order.
pub fn grid_csv(result: &SweepResult) -> Vec<u8> {
    csv_bytes(|w| {
        let mut header = vec!["cell".to_string()];
        header.extend(result.axes.iter().map(|a| a.key.clone()));
        header.extend(GRID_STAT_COLUMNS.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for cell in &result.cells {
            let s = &cell.summary;
            let mut row = vec![cell.index.to_string()];
            row.extend(cell.coords.iter().map(|&x| fmt_sig(x)));
            row.extend([
                s.n_runs.to_string(),
                fmt_sig(s.mean_cce),
                fmt_sig(s.q1),
                fmt_sig(s.median),
                fmt_sig(s.q3),
            ]);
            row.extend(s.types.to_array().iter().map(|c| c.to_string()));
            row.extend([
                fmt_sig(s.crash_fraction),
                u8::from(s.bimodal).to_string(),
                s.config.clone(),
            ]);
            w.write_record(&row)?;
        }
        Ok(())
    })
}

/// Edge list of a network, one `u v` pair per line.
pub fn edge_list(network: &Network) -> Vec<u8> {
    let mut bytes = Vec::new();
    network
        .write_edge_list(&mut bytes)
        .expect("writing to memory cannot fail");
    bytes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the bundle directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Key-value echo of the configuration; loadable with `--config`.
    pub config_text: String,
    pub config: SimConfig,
    pub runs: usize,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";
pub const CONFIG_ECHO_NAME: &str = "config.txt";

/// An output directory whose files are tracked for the manifest.
#[derive(Debug)]
pub struct OutputBundle {
    dir: PathBuf,
    files: Vec<FileEntry>,
    started: String,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl OutputBundle {
    /// Create (or reuse) `dir`.
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(OutputBundle {
            dir,
            files: Vec::new(),
            started: now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Write `bytes` to `name` inside the bundle and record its digest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    /// Write the config echo and the manifest; returns the manifest path.
    pub fn finish(mut self, command: &str, config: &SimConfig, runs: usize) -> Result<PathBuf> {
        let config_text = config.to_kv_string();
        self.write(CONFIG_ECHO_NAME, config_text.as_bytes())?;
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: config.seed,
            config_text,
            config: config.clone(),
            runs,
            started: self.started.clone(),
            finished: now(),
            files: self.files,
        };
        let path = self.dir.join(MANIFEST_NAME);
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Read a manifest back.
pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Recompute every digest listed in a manifest; returns the paths that no
/// longer match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let manifest = read_manifest(dir)?;
    let mut stale = Vec::new();
    for f in &manifest.files {
        let path = dir.join(&f.path);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if sha256_hex(&bytes) != f.sha256 {
            stale.push(f.path.clone());
        }
    }
    Ok(stale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(3.160_602_794_142_788_4), "3.1606");
        assert_eq!(fmt_sig(1.967_346_701_436_832_9), "1.96735");
        assert_eq!(fmt_sig(250.0), "250");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(123_456_789.0), "1.23457e8");
        assert_eq!(fmt_sig(2.061_153_622_438_558e-10), "2.06115e-10");
        assert_eq!(fmt_sig(0.000_123_456_7), "0.000123457");
        assert_eq!(fmt_sig(999_999.6), "1e6");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [3.160_602_794, 1e-7, 625.0, 0.123_456_789] {
            assert_eq!(round_sig(round_sig(x)), round_sig(x));
        }
    }

    #[test]
    fn run_csv_has_header_and_month_zero() {
        let c = SimConfig {
            horizon: 5,
            ..SimConfig::default()
        };
        let rec = engine::run(&c).unwrap();
        let text = String::from_utf8(run_csv(&rec)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "month,price,fci,cce,reserve,budget,policy,held_shares");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0,3.1606,"));
    }

    #[test]
    fn bundle_digests_verify() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = OutputBundle::create(dir.path().join("out")).unwrap();
        b.write("a.txt", b"hello").unwrap();
        let out = b.dir().to_path_buf();
        b.finish("test", &SimConfig::default(), 1).unwrap();
        let m = read_manifest(&out).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(
            m.files[0].sha256,
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
        assert!(verify_manifest(&out).unwrap().is_empty());
        fs::write(out.join("a.txt"), b"changed").unwrap();
        assert_eq!(verify_manifest(&out).unwrap(), vec!["a.txt".to_string()]);
    }

    #[test]
    fn manifest_config_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SimConfig {
            seed: 99,
            rho: 0.3,
            ..SimConfig::default()
        };
        OutputBundle::create(dir.path())
            .unwrap()
            .finish("run", &cfg, 1)
            .unwrap();
        let m = read_manifest(dir.path()).unwrap();
        assert_eq!(m.config, cfg);
        assert_eq!(SimConfig::from_kv_str(&m.config_text).unwrap(), cfg);
    }
}
