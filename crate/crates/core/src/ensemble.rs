//! Monte Carlo ensembles and parameter sweeps.
//!
//! Run `r` of an ensemble uses seed `base_seed + r`. Cell `c` of a sweep with
//! `n` runs per cell uses seeds `base_seed + c * n + r`, so a one-cell sweep
//! reproduces the plain ensemble. Results never depend on the number of
//! worker threads or the order in which cells execute.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{summarize, EnsembleSummary};
use crate::config::{SimConfig, KEYS};
use crate::engine::{run, RunRecord};
use crate::error::{Error, Result};

/// Seed of run `run` in cell `cell`.
pub fn run_seed(base_seed: u64, cell: usize, runs_per_cell: usize, run: usize) -> u64 {
    base_seed
        .wrapping_add((cell as u64).wrapping_mul(runs_per_cell as u64))
        .wrapping_add(run as u64)
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn ensemble_records(config: &SimConfig, seeds: &[u64]) -> Result<Vec<RunRecord>> {
    config.validate()?;
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = config.clone();
            c.seed = seed;
            run(&c)
        })
        .collect()
}

/// Run `n_runs` independent simulations of `config`, seeded from
/// `config.seed`. `threads = None` uses rayon's global pool.
pub fn run_ensemble(config: &SimConfig, n_runs: usize, threads: Option<usize>) -> Result<Vec<RunRecord>> {
    let seeds: Vec<u64> = (0..n_runs).map(|r| run_seed(config.seed, 0, n_runs, r)).collect();
    in_pool(threads, || ensemble_records(config, &seeds))?
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(key: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if !KEYS.contains(&key) {
            return Err(Error::UnknownKey {
                key: key.to_string(),
                valid: KEYS.join(", "),
            });
        }
        if count == 0 {
            return Err(Error::BadAxis(format!("{key}:{start}:{stop}:0")));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        };
        Ok(Axis {
            key: key.to_string(),
            values,
        })
    }

    pub fn from_values(key: &str, values: Vec<f64>) -> Result<Self> {
        if !KEYS.contains(&key) {
            return Err(Error::UnknownKey {
                key: key.to_string(),
                valid: KEYS.join(", "),
            });
        }
        if values.is_empty() {
            return Err(Error::BadAxis(format!("{key}: no values")));
        }
        Ok(Axis {
            key: key.to_string(),
            values,
        })
    }

    /// Parse `key:start:stop:count`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let [key, start, stop, count] = parts[..] else {
            return Err(Error::BadAxis(spec.to_string()));
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::BadAxis(spec.to_string()));
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::BadAxis(spec.to_string()))?;
        Axis::linspace(key.trim(), num(start)?, num(stop)?, count)
    }

    /// Parse a comma-separated list of axis specs.
    pub fn parse_list(spec: &str) -> Result<Vec<Self>> {
        spec.split(',').map(Axis::parse).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    /// One value per axis.
    pub coords: Vec<f64>,
    pub summary: EnsembleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub runs_per_cell: usize,
    /// Row-major: the last axis varies fastest.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    /// Cell at grid position `idx` (one index per axis).
    pub fn cell(&self, idx: &[usize]) -> &SweepCell {
        let shape = self.shape();
        let flat = idx
            .iter()
            .zip(&shape)
            .fold(0, |acc, (&i, &n)| acc * n + i);
        &self.cells[flat]
    }

    /// Bimodal cells separating high from low mean CCE in a 2D grid.
    ///
    /// Walking along the first axis in each column (fixed value of the second
    /// axis), a crossing runs from the last cell with mean above `high` to the
    /// next cell with mean below `low`. The band is the set of bimodal cells
    /// strictly inside those crossings. It is returned only if at least one
    /// column crosses, every crossing contains a bimodal cell, and the band
    /// lies within one 8-connected group of bimodal cells. Grid positions are
    /// `[first axis, second axis]`.
    pub fn tipping_band(&self, high: f64, low: f64) -> Option<Vec<[usize; 2]>> {
        let &[rows, cols] = self.shape().as_slice() else {
            return None;
        };
        let mean = |i: usize, j: usize| self.cell(&[i, j]).summary.mean_cce;
        let bimodal = |i: usize, j: usize| self.cell(&[i, j]).summary.bimodal;

        let mut band = Vec::new();
        let mut crossings = 0;
        for j in 0..cols {
            let mut last_high = None;
            let crossing = (0..rows).find_map(|i| {
                if mean(i, j) > high {
                    last_high = Some(i);
                    None
                } else if mean(i, j) < low {
                    last_high.map(|h| (h, i))
                } else {
                    None
                }
            });
            let Some((h, l)) = crossing else { continue };
            crossings += 1;
            let inside: Vec<[usize; 2]> = (h + 1..l).filter(|&i| bimodal(i, j)).map(|i| [i, j]).collect();
            if inside.is_empty() {
                return None;
            }
            band.extend(inside);
        }
        if crossings == 0 {
            return None;
        }

        // flood fill over all bimodal cells from the first band cell
        let mut seen = vec![false; rows * cols];
        let mut stack = vec![band[0]];
        seen[band[0][0] * cols + band[0][1]] = true;
        while let Some([i, j]) = stack.pop() {
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= rows as i64 || nj >= cols as i64 {
                        continue;
                    }
                    let (ni, nj) = (ni as usize, nj as usize);
                    if !seen[ni * cols + nj] && bimodal(ni, nj) {
                        seen[ni * cols + nj] = true;
                        stack.push([ni, nj]);
                    }
                }
            }
        }
        band.iter()
            .all(|&[i, j]| seen[i * cols + j])
            .then_some(band)
    }
}

fn grid_coords(axes: &[Axis], mut flat: usize) -> Vec<f64> {
    let mut coords = vec![0.0; axes.len()];
    for (k, axis) in axes.iter().enumerate().rev() {
        let n = axis.values.len();
        coords[k] = axis.values[flat % n];
        flat /= n;
    }
    coords
}

/// Configuration of sweep cell `index`, seeded for its first run.
pub fn cell_config(base: &SimConfig, axes: &[Axis], index: usize, runs_per_cell: usize) -> Result<SimConfig> {
    let mut cfg = base.clone();
    for (axis, v) in axes.iter().zip(grid_coords(axes, index)) {
        cfg.set_numeric(&axis.key, v)?;
    }
    cfg.seed = run_seed(base.seed, index, runs_per_cell, 0);
    cfg.validate()?;
    Ok(cfg)
}

fn run_cell(base: &SimConfig, axes: &[Axis], index: usize, runs: usize) -> Result<SweepCell> {
    let cfg = cell_config(base, axes, index, runs)?;
    let seeds: Vec<u64> = (0..runs).map(|r| run_seed(base.seed, index, runs, r)).collect();
    let records = ensemble_records(&cfg, &seeds)?;
    Ok(SweepCell {
        index,
        coords: grid_coords(axes, index),
        summary: summarize(&records, &cfg)?,
    })
}

/// Sweep `config` over the cartesian product of `axes`, running `n_runs`
/// simulations per cell. Cells are executed in the order given by `order`
/// when supplied (a permutation of cell indices), which never affects the
/// result.
pub fn sweep_ordered(
    config: &SimConfig,
    axes: &[Axis],
    n_runs: usize,
    threads: Option<usize>,
    order: Option<&[usize]>,
) -> Result<SweepResult> {
    if axes.is_empty() {
        return Err(Error::BadAxis("no axes".into()));
    }
    if n_runs == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n_cells: usize = axes.iter().map(|a| a.values.len()).product();
    // reject bad keys and values before spending time on runs
    for i in 0..n_cells {
        cell_config(config, axes, i, n_runs)?;
    }
    let schedule: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..n_cells).collect(),
    };
    let mut done = in_pool(threads, || {
        schedule
            .par_iter()
            .map(|&i| run_cell(config, axes, i, n_runs))
            .collect::<Result<Vec<_>>>()
    })??;
    done.sort_by_key(|c| c.index);
    if done.len() != n_cells || done.iter().enumerate().any(|(i, c)| c.index != i) {
        return Err(Error::BadAxis("cell order is not a permutation of the grid".into()));
    }
    Ok(SweepResult {
        axes: axes.to_vec(),
        runs_per_cell: n_runs,
        cells: done,
    })
}

pub fn sweep(config: &SimConfig, axes: &[Axis], n_runs: usize, threads: Option<usize>) -> Result<SweepResult> {
    sweep_ordered(config, axes, n_runs, threads, None)
}
