//! Capacity sweeps: how many machine states fit in a network of a given
//! size before walks become unreliable.
//!
//! Block length scales as `L ∝ N / log N` around a reference point so that
//! the active-unit count `N/L` grows logarithmically, the regime with the
//! near-quadratic storage scaling.

use rayon::prelude::*;

use super::{run_walk, RnnEngine, WalkParams};
use crate::dfa::Dfa;
use crate::rng::substream;
use crate::weights::{
    binarize_stochastic, build_weights, CodebookMode, EmbeddingCodebook,
    DEFAULT_BINARIZE_BETA,
};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Ideal,
    Binary,
}

impl WeightMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightMode::Ideal => "ideal",
            WeightMode::Binary => "binary",
        }
    }
}

/// Sweep configuration. `p_list` should be ascending; with `adaptive` set,
/// a weight mode stops exploring larger machines once its success rate has
/// collapsed twice in a row.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig {
    pub n_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub trials: usize,
    pub words_per_trial: usize,
    pub word_len: usize,
    pub seed: u64,
    /// Reference block length at the reference size.
    pub l0: usize,
    pub n0: usize,
    pub adaptive: bool,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            n_list: vec![512, 1024, 2048],
            p_list: vec![2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64, 91, 128, 181],
            trials: 10,
            words_per_trial: 5,
            word_len: 5,
            seed: 0,
            l0: 8,
            n0: 2048,
            adaptive: true,
        }
    }
}

/// One measured cell: fraction of words walked correctly in one trial.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CapacityCell {
    pub n: usize,
    pub l: usize,
    pub p: usize,
    pub mode: WeightMode,
    pub trial: usize,
    pub seed: u64,
    pub success: f64,
}

/// Block length for size `n`: nearest divisor of `n` (at least 2) to
/// `l0·(n/log n)/(n0/log n0)`, ties toward the larger divisor.
pub fn scaled_block_len(n: usize, l0: usize, n0: usize) -> usize {
    let target = l0 as f64 * (n as f64 / (n as f64).ln()) / (n0 as f64 / (n0 as f64).ln());
    let mut best = 2usize;
    let mut best_err = f64::INFINITY;
    for l in 2..=n {
        if n % l != 0 {
            continue;
        }
        let err = (l as f64 - target).abs();
        if err < best_err || (err == best_err && l > best) {
            best_err = err;
            best = l;
        }
    }
    best
}

fn cell_seed(cfg: &CapacityConfig, n: usize, p: usize, trial: usize) -> u64 {
    // stable per-cell seed so sweep order and parallelism cannot matter
    let mut rng = substream(cfg.seed, &format!("capacity/{n}/{p}/{trial}"));
    rng.gen()
}

/// Evaluate one (n, p, trial) instantiation for both weight modes.
fn run_cell(
    cfg: &CapacityConfig,
    n: usize,
    l: usize,
    p: usize,
    trial: usize,
    modes: &[WeightMode],
) -> Vec<CapacityCell> {
    let seed = cell_seed(cfg, n, p, trial);
    let dfa = Dfa::moddiv(p).expect("p >= 2");
    let cb = EmbeddingCodebook::generate(&dfa, n, l, CodebookMode::Random, seed)
        .expect("valid shape");
    let ideal = build_weights(&dfa, &cb).expect("codebook covers dfa");

    let mut words_rng = substream(seed, "words");
    let words: Vec<Vec<usize>> = (0..cfg.words_per_trial)
        .map(|_| {
            (0..cfg.word_len)
                .map(|_| words_rng.gen_range(0..dfa.num_inputs()))
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for &mode in modes {
        let engine = match mode {
            WeightMode::Ideal => RnnEngine::new(&ideal),
            WeightMode::Binary => {
                let mut rng = substream(seed, "binarize");
                let binary = binarize_stochastic(&ideal, DEFAULT_BINARIZE_BETA, &mut rng)
                    .expect("ideal weights");
                RnnEngine::new(&binary)
            }
        };
        let correct = words
            .iter()
            .filter(|word| {
                run_walk(&engine, &cb, &dfa, word, WalkParams::default())
                    .map(|r| r.success)
                    .unwrap_or(false)
            })
            .count();
        out.push(CapacityCell {
            n,
            l,
            p,
            mode,
            trial,
            seed,
            success: correct as f64 / cfg.words_per_trial as f64,
        });
    }
    out
}

/// Run the sweep. Cells are independent jobs; the output is sorted by
/// (n, p, mode, trial) regardless of execution order.
pub fn capacity_sweep(cfg: &CapacityConfig) -> Vec<CapacityCell> {
    let mut cells: Vec<CapacityCell> = Vec::new();
    for &n in &cfg.n_list {
        let l = scaled_block_len(n, cfg.l0, cfg.n0);
        let mut alive = vec![WeightMode::Ideal, WeightMode::Binary];
        let mut misses: std::collections::HashMap<WeightMode, usize> = Default::default();
        for &p in &cfg.p_list {
            if alive.is_empty() {
                break;
            }
            let modes = alive.clone();
            let mut batch: Vec<CapacityCell> = (0..cfg.trials)
                .into_par_iter()
                .flat_map_iter(|trial| run_cell(cfg, n, l, p, trial, &modes))
                .collect();
            batch.sort_by_key(|c| (c.trial, c.mode.as_str()));
            for &mode in &modes {
                let rate = mean_success(&batch, mode);
                if cfg.adaptive {
                    let miss = misses.entry(mode).or_insert(0);
                    if rate < 0.5 {
                        *miss += 1;
                    } else {
                        *miss = 0;
                    }
                    if *miss >= 2 {
                        alive.retain(|&m| m != mode);
                    }
                }
            }
            cells.extend(batch);
        }
    }
    cells.sort_by_key(|c| (c.n, c.p, c.mode.as_str(), c.trial));
    cells
}

fn mean_success(cells: &[CapacityCell], mode: WeightMode) -> f64 {
    let matching: Vec<f64> = cells
        .iter()
        .filter(|c| c.mode == mode)
        .map(|c| c.success)
        .collect();
    if matching.is_empty() {
        0.0
    } else {
        matching.iter().sum::<f64>() / matching.len() as f64
    }
}

/// Per-size summary: the largest reliably-walked machine per weight mode.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CapacitySummaryRow {
    pub n: usize,
    pub l: usize,
    pub p_max_ideal: usize,
    pub p_max_binary: usize,
    /// ideal/binary capacity ratio; None when the binary mode never
    /// cleared the reliability bar.
    pub ratio: Option<f64>,
}

/// Largest `p` whose mean success rate is at least 0.9, per (n, mode).
pub fn capacity_summary(cells: &[CapacityCell], threshold: f64) -> Vec<CapacitySummaryRow> {
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.iter()
        .map(|&n| {
            let l = cells.iter().find(|c| c.n == n).map(|c| c.l).unwrap_or(0);
            let p_max = |mode: WeightMode| -> usize {
                let mut ps: Vec<usize> = cells
                    .iter()
                    .filter(|c| c.n == n && c.mode == mode)
                    .map(|c| c.p)
                    .collect();
                ps.sort_unstable();
                ps.dedup();
                ps.into_iter()
                    .filter(|&p| {
                        let per_p: Vec<&CapacityCell> = cells
                            .iter()
                            .filter(|c| c.n == n && c.mode == mode && c.p == p)
                            .collect();
                        let rate = per_p.iter().map(|c| c.success).sum::<f64>()
                            / per_p.len() as f64;
                        rate >= threshold
                    })
                    .max()
                    .unwrap_or(0)
            };
            let p_ideal = p_max(WeightMode::Ideal);
            let p_binary = p_max(WeightMode::Binary);
            CapacitySummaryRow {
                n,
                l,
                p_max_ideal: p_ideal,
                p_max_binary: p_binary,
                ratio: (p_binary > 0).then(|| p_ideal as f64 / p_binary as f64),
            }
        })
        .collect()
}

/// Least-squares fit of `p_max` against `N²/(log N)²`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_scaling(rows: &[CapacitySummaryRow], mode: WeightMode) -> ScalingFit {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| {
            let n = row.n as f64;
            let x = n * n / n.ln().powi(2);
            let y = match mode {
                WeightMode::Ideal => row.p_max_ideal as f64,
                WeightMode::Binary => row.p_max_binary as f64,
            };
            (x, y)
        })
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let syy: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    ScalingFit {
        slope,
        intercept,
        r_squared,
    }
}
