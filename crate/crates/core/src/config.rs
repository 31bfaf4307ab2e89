//! Simulation configuration.
//!
//! Every scalar setting is addressable by a dotted key (`firm.q`,
//! `social.sif`, `rho`, ...). The same keys are used by the key-value config
//! file format, by `--set key=value` overrides, and by sweep axes.
//!
//! The text format is one `key = value` per line; blank lines and lines
//! starting with `#` are ignored. JSON (the serde form of [`SimConfig`]) is
//! accepted as well.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::firm::FirmParams;
use crate::market::AlternativeAsset;
use crate::policy::PolicyParams;
use crate::social::SocialParams;

/// Thresholds used to turn a trajectory into events and a behaviour type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    /// Trailing window (months) for crash detection.
    pub crash_window: usize,
    /// Relative drop below the trailing maximum that counts as a crash.
    pub crash_drop: f64,
    /// A crashed price has recovered once it regains this fraction of its
    /// pre-crash maximum.
    pub recovery_fraction: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            crash_window: 12,
            crash_drop: 0.5,
            recovery_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub firm: FirmParams,
    pub social: SocialParams,
    pub policy: PolicyParams,
    pub alt: AlternativeAsset,
    pub analysis: AnalysisParams,
    /// Number of investors.
    pub investors: usize,
    /// Trading frequency: monthly activation probability.
    pub rho: f64,
    /// Fraction of socially responsible investors.
    pub sri_share: f64,
    /// Initial investor wealth relative to the initial market capitalisation.
    pub liquidity: f64,
    /// Fraction of investors convinced at the start.
    pub init_convinced: f64,
    /// Months to simulate.
    pub horizon: u32,
    /// Market-maker price impact.
    pub mu: f64,
    /// Delisting threshold as a fraction of the opening price.
    pub delisting_fraction: f64,
    /// Convinced responsible investors sell at the first trading round after
    /// they become convinced instead of waiting to be drawn.
    pub immediate_divestment: bool,
    /// Credit dividend income to the alternative-asset account.
    pub reinvest_dividends: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            firm: FirmParams::default(),
            social: SocialParams::default(),
            policy: PolicyParams::default(),
            alt: AlternativeAsset::default(),
            analysis: AnalysisParams::default(),
            investors: 400,
            rho: 0.2,
            sri_share: 0.15,
            liquidity: 1.1,
            init_convinced: 0.12,
            horizon: 250,
            mu: 6.0,
            delisting_fraction: 0.01,
            immediate_divestment: true,
            reinvest_dividends: false,
            seed: 0,
        }
    }
}

/// All addressable keys, in file order.
pub const KEYS: &[&str] = &[
    "firm.r0",
    "firm.b0",
    "firm.q",
    "firm.x",
    "firm.net_price",
    "firm.shares",
    "firm.discount",
    "social.sif",
    "social.phi",
    "social.alpha",
    "social.delta",
    "social.k_ring",
    "social.p_rewire_init",
    "policy.lambda",
    "policy.p_max",
    "policy.unscaled",
    "alt.mean_return",
    "alt.noise",
    "analysis.crash_window",
    "analysis.crash_drop",
    "analysis.recovery_fraction",
    "investors",
    "rho",
    "sri_share",
    "liquidity",
    "init_convinced",
    "horizon",
    "mu",
    "delisting_fraction",
    "immediate_divestment",
    "reinvest_dividends",
    "seed",
];

enum Slot<'a> {
    F64(&'a mut f64),
    Usize(&'a mut usize),
    U32(&'a mut u32),
    U64(&'a mut u64),
    Bool(&'a mut bool),
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    // sweep axes hand over integral floats such as "12" or "12.0"
    let v = value.trim();
    if let Ok(x) = v.parse::<T>() {
        return Ok(x);
    }
    match v.parse::<f64>() {
        Ok(f) if f.fract() == 0.0 && f >= 0.0 => f
            .to_string()
            .parse::<T>()
            .map_err(|e| bad(key, value, e.to_string())),
        _ => Err(bad(key, value, "expected a nonnegative integer".into())),
    }
}

fn bad(key: &str, value: &str, reason: String) -> Error {
    Error::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason,
    }
}

impl SimConfig {
    fn slot(&mut self, key: &str) -> Result<Slot<'_>> {
        Ok(match key {
            "firm.r0" => Slot::F64(&mut self.firm.r0),
            "firm.b0" => Slot::F64(&mut self.firm.b0),
            "firm.q" => Slot::F64(&mut self.firm.q),
            "firm.x" => Slot::F64(&mut self.firm.x),
            "firm.net_price" => Slot::F64(&mut self.firm.net_price),
            "firm.shares" => Slot::F64(&mut self.firm.shares),
            "firm.discount" => Slot::F64(&mut self.firm.discount),
            "social.sif" => Slot::F64(&mut self.social.sif),
            "social.phi" => Slot::F64(&mut self.social.phi),
            "social.alpha" => Slot::F64(&mut self.social.alpha),
            "social.delta" => Slot::F64(&mut self.social.delta),
            "social.k_ring" => Slot::Usize(&mut self.social.k_ring),
            "social.p_rewire_init" => Slot::F64(&mut self.social.p_rewire_init),
            "policy.lambda" => Slot::F64(&mut self.policy.lambda),
            "policy.p_max" => Slot::F64(&mut self.policy.p_max),
            "policy.unscaled" => Slot::Bool(&mut self.policy.unscaled),
            "alt.mean_return" => Slot::F64(&mut self.alt.mean_return),
            "alt.noise" => Slot::F64(&mut self.alt.noise),
            "analysis.crash_window" => Slot::Usize(&mut self.analysis.crash_window),
            "analysis.crash_drop" => Slot::F64(&mut self.analysis.crash_drop),
            "analysis.recovery_fraction" => Slot::F64(&mut self.analysis.recovery_fraction),
            "investors" => Slot::Usize(&mut self.investors),
            "rho" => Slot::F64(&mut self.rho),
            "sri_share" => Slot::F64(&mut self.sri_share),
            "liquidity" => Slot::F64(&mut self.liquidity),
            "init_convinced" => Slot::F64(&mut self.init_convinced),
            "horizon" => Slot::U32(&mut self.horizon),
            "mu" => Slot::F64(&mut self.mu),
            "delisting_fraction" => Slot::F64(&mut self.delisting_fraction),
            "immediate_divestment" => Slot::Bool(&mut self.immediate_divestment),
            "reinvest_dividends" => Slot::Bool(&mut self.reinvest_dividends),
            "seed" => Slot::U64(&mut self.seed),
            _ => {
                return Err(Error::UnknownKey {
                    key: key.to_string(),
                    valid: KEYS.join(", "),
                })
            }
        })
    }

    /// Set a field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match self.slot(key)? {
            Slot::F64(f) => {
                *f = v
                    .parse::<f64>()
                    .map_err(|e| bad(key, value, e.to_string()))?
            }
            Slot::Usize(f) => *f = parse_int(key, v)?,
            Slot::U32(f) => *f = parse_int(key, v)?,
            Slot::U64(f) => *f = parse_int(key, v)?,
            Slot::Bool(f) => {
                *f = match v {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad(key, value, "expected true or false".into())),
                }
            }
        }
        Ok(())
    }

    /// Set a numeric field; integer fields require an integral value.
    pub fn set_numeric(&mut self, key: &str, value: f64) -> Result<()> {
        match self.slot(key)? {
            Slot::Bool(_) => Err(bad(key, &value.to_string(), "not a numeric field".into())),
            _ => self.set(key, &value.to_string()),
        }
    }

    /// Textual value of a field.
    pub fn get(&self, key: &str) -> Result<String> {
        let mut copy = self.clone();
        Ok(match copy.slot(key)? {
            Slot::F64(f) => f.to_string(),
            Slot::Usize(f) => f.to_string(),
            Slot::U32(f) => f.to_string(),
            Slot::U64(f) => f.to_string(),
            Slot::Bool(f) => f.to_string(),
        })
    }

    /// Apply `key=value` overrides.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o.split_once('=').ok_or_else(|| Error::Syntax {
                line: 0,
                text: o.to_string(),
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Parse the key-value text format on top of the defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Syntax {
                line: n + 1,
                text: line.to_string(),
            })?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }

    /// Render every key. Floats use the shortest representation that parses
    /// back to the same value.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("listed key"));
        }
        out
    }

    /// Load from a file: JSON if it starts with `{`, key-value text otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(&text)?)
        } else {
            Self::from_kv_str(&text)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.firm.validate()?;
        self.social.validate()?;
        self.policy.validate()?;
        self.alt.validate()?;
        for (name, v) in [
            ("rho", self.rho),
            ("sri_share", self.sri_share),
            ("init_convinced", self.init_convinced),
            ("delisting_fraction", self.delisting_fraction),
            ("analysis.crash_drop", self.analysis.crash_drop),
            ("analysis.recovery_fraction", self.analysis.recovery_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if !(self.liquidity.is_finite() && self.liquidity > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "liquidity must be > 0, got {}",
                self.liquidity
            )));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidConfig(format!("mu must be >= 0, got {}", self.mu)));
        }
        if self.investors <= self.social.k_ring {
            return Err(Error::InvalidConfig(format!(
                "investors ({}) must exceed social.k_ring ({})",
                self.investors, self.social.k_ring
            )));
        }
        if self.analysis.crash_window == 0 {
            return Err(Error::InvalidConfig("analysis.crash_window must be >= 1".into()));
        }
        Ok(())
    }

    /// Stable short digest of the full configuration (seed included).
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_kv_string().as_bytes());
        hex::encode(&digest[..8])
    }
}
