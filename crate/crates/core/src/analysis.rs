//! Turning trajectories into outcomes: crash detection, behaviour types and
//! ensemble statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::engine::RunRecord;
use crate::error::{Error, Result};

/// Qualitative outcome of a run, from failed divestment (A) to emissions
/// below the carbon budget (F).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BehaviorType {
    /// Divestment fails: the firm keeps extracting until the horizon, whether
    /// or not the price has dropped.
    A,
    /// The bubble bursts but the price recovers; the budget is overshot.
    B,
    /// Delisted after the budget was exceeded, before any policy.
    C,
    /// Policy arrives after the budget is exhausted and closes the firm.
    D,
    /// The price collapses in time and the firm stops at the budget.
    E,
    /// Emissions end below the budget.
    F,
}

impl BehaviorType {
    pub const ALL: [BehaviorType; 6] = [
        BehaviorType::A,
        BehaviorType::B,
        BehaviorType::C,
        BehaviorType::D,
        BehaviorType::E,
        BehaviorType::F,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl fmt::Display for BehaviorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// First month `t` whose price is below `(1 - drop)` times the maximum over
/// the preceding `window` months. `prices[t]` is the price at month `t`.
pub fn detect_crash(prices: &[f64], window: usize, drop: f64) -> Option<usize> {
    (1..prices.len()).find(|&t| {
        let from = t.saturating_sub(window);
        let peak = prices[from..t].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prices[t] < (1.0 - drop) * peak
    })
}

/// Whether the price, after crashing at month `crash`, later made up at least
/// `fraction` of the ground lost between the pre-crash peak and the trough.
pub fn recovered_after(prices: &[f64], crash: usize, window: usize, fraction: f64) -> bool {
    let from = crash.saturating_sub(window);
    let peak = prices[from..crash].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut trough = prices[crash];
    for &p in &prices[crash + 1..] {
        if p > 0.0 && p >= trough + fraction * (peak - trough) {
            return true;
        }
        trough = trough.min(p);
    }
    false
}

/// Assign a behaviour type. Checked in the order F, E, D, C, B, A; the first
/// matching rule wins.
pub fn classify(record: &RunRecord, config: &SimConfig) -> BehaviorType {
    let b0 = config.firm.b0;
    let q = config.firm.q;
    let ev = &record.events;
    let cce = record.final_cce;

    if cce < b0 {
        return BehaviorType::F;
    }
    if let Some(crash) = ev.first_crash_month {
        let in_time = ev.budget_exceeded_month.is_none_or(|b| crash < b);
        if (cce - b0).abs() <= q && in_time {
            return BehaviorType::E;
        }
    }
    if let Some(policy) = ev.policy_month {
        let exhausted = record.row(policy).is_some_and(|r| r.budget <= 0.0);
        let closes = ev.delisting_month.is_some_and(|d| d >= policy);
        if exhausted && closes {
            return BehaviorType::D;
        }
    }
    if let (Some(delist), Some(exceeded)) = (ev.delisting_month, ev.budget_exceeded_month) {
        if delist >= exceeded && ev.policy_month.is_none_or(|p| p > delist) {
            return BehaviorType::C;
        }
    }
    if let Some(crash) = ev.first_crash_month {
        let prices = record.price_series();
        let recovered = recovered_after(
            &prices,
            crash as usize,
            config.analysis.crash_window,
            config.analysis.recovery_fraction,
        );
        if recovered && cce > b0 {
            return BehaviorType::B;
        }
    }
    BehaviorType::A
}

/// Quantile with linear interpolation between order statistics
/// (position `(n - 1) * p` in the sorted sample).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCounts {
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
}

impl TypeCounts {
    pub fn from_array(c: [usize; 6]) -> Self {
        TypeCounts {
            a: c[0],
            b: c[1],
            c: c[2],
            d: c[3],
            e: c[4],
            f: c[5],
        }
    }

    pub fn to_array(&self) -> [usize; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn get(&self, t: BehaviorType) -> usize {
        self.to_array()[t.index()]
    }

    pub fn total(&self) -> usize {
        self.to_array().iter().sum()
    }
}

/// Statistics of one ensemble of runs sharing a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub config: String,
    pub n_runs: usize,
    pub mean_cce: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub types: TypeCounts,
    pub crash_fraction: f64,
    /// Share of runs ending within 50 of the budget or below.
    pub low_fraction: f64,
    /// Share of runs ending within 50 of the extraction ceiling.
    pub high_fraction: f64,
    /// Both outcome modes are common: the cell sits at a tipping point.
    pub bimodal: bool,
}

/// Margin (GtCO2) around the budget and the ceiling used to label outcomes
/// as low or high.
pub const MODE_MARGIN: f64 = 50.0;
/// Minimum share of runs in each mode for a cell to count as bimodal.
pub const MODE_SHARE: f64 = 0.2;

pub fn summarize(records: &[RunRecord], config: &SimConfig) -> Result<EnsembleSummary> {
    if records.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = records.len();
    let mut cce: Vec<f64> = records.iter().map(|r| r.final_cce).collect();
    let mean_cce = cce.iter().sum::<f64>() / n as f64;
    cce.sort_by(f64::total_cmp);

    let mut counts = [0usize; 6];
    for r in records {
        counts[classify(r, config).index()] += 1;
    }
    let crashes = records
        .iter()
        .filter(|r| r.events.first_crash_month.is_some())
        .count();

    let ceiling = config.firm.q * f64::from(config.horizon);
    let low = cce.iter().filter(|&&c| c < config.firm.b0 + MODE_MARGIN).count() as f64 / n as f64;
    let high = cce.iter().filter(|&&c| c > ceiling - MODE_MARGIN).count() as f64 / n as f64;

    let mut base = config.clone();
    base.seed = 0;
    Ok(EnsembleSummary {
        config: base.fingerprint(),
        n_runs: n,
        mean_cce,
        q1: quantile_sorted(&cce, 0.25),
        median: quantile_sorted(&cce, 0.5),
        q3: quantile_sorted(&cce, 0.75),
        types: TypeCounts::from_array(counts),
        crash_fraction: crashes as f64 / n as f64,
        low_fraction: low,
        high_fraction: high,
        bimodal: low >= MODE_SHARE && high >= MODE_SHARE,
    })
}
