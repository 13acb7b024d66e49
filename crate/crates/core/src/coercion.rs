//! Markovian coercion of the scalar reward process.
//!
//! At every grid time the reward sample of `N_sim = 2·N_block·N_bins` paths is
//! sorted; order statistic `2k·N_block` becomes edge `k` and order statistic
//! `(2k-1)·N_block` becomes value `k`. Bins are right-closed:
//! `(-∞, y_1], (y_1, y_2], ..., (y_{N-1}, ∞)`. The transition array counts
//! how the training paths move between bins from one time to the next.
//!
//! A time whose reward sample is a single point (time 0 always, and some
//! lock-out times) is stored as an *atom slice*: every edge and value equals
//! the atom, all training paths sit in bin 0 and every row of the outgoing
//! transition matrix is the pooled law of the next bin.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::{init_paths, step, Process};
use crate::reward::RewardFn;
use crate::rng::{Purpose, StreamKey};

/// Index of a bin, `0..n_bins`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinIndex(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoercionSizes {
    pub n_bins: usize,
    pub n_block: usize,
}

impl CoercionSizes {
    pub fn n_sim(&self) -> usize {
        2 * self.n_block * self.n_bins
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coercion {
    n_times: usize,
    n_bins: usize,
    n_block: Option<usize>,
    edges: Vec<f64>,
    values: Vec<f64>,
    trans: Vec<f64>,
}

impl Coercion {
    /// Assembles a coercion from row-major arrays: `edges` is
    /// `n_times × (n_bins-1)`, `values` is `n_times × n_bins`, `trans` is
    /// `(n_times-1) × n_bins × n_bins`.
    pub fn from_parts(
        n_bins: usize,
        edges: Vec<f64>,
        values: Vec<f64>,
        trans: Vec<f64>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::Artifact(m));
        if n_bins < 2 {
            return bad(format!("need at least 2 bins, got {n_bins}"));
        }
        if !values.len().is_multiple_of(n_bins) || values.len() < 2 * n_bins {
            return bad(format!(
                "{} bin values do not fill {n_bins}-bin rows",
                values.len()
            ));
        }
        let n_times = values.len() / n_bins;
        if edges.len() != n_times * (n_bins - 1) {
            return bad(format!(
                "expected {} edges, got {}",
                n_times * (n_bins - 1),
                edges.len()
            ));
        }
        if trans.len() != (n_times - 1) * n_bins * n_bins {
            return bad(format!(
                "expected {} transition entries, got {}",
                (n_times - 1) * n_bins * n_bins,
                trans.len()
            ));
        }
        let c = Self {
            n_times,
            n_bins,
            n_block: None,
            edges,
            values,
            trans,
        };
        for t in 0..n_times {
            let (e, v) = (c.edges(t), c.values(t));
            let ordered = (0..n_bins - 1).all(|k| v[k] <= e[k] && e[k] <= v[k + 1]);
            if !ordered || v.iter().chain(e).any(|x| !x.is_finite()) {
                return bad(format!(
                    "bin values and edges at t_index {t} are not ordered"
                ));
            }
        }
        for t in 0..n_times - 1 {
            for l in 0..n_bins {
                let row = c.row(t, l);
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return bad(format!("transition row ({t}, {l}) is not stochastic"));
                }
            }
        }
        Ok(c)
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// `N_block` used to build the coercion, when known.
    pub fn n_block(&self) -> Option<usize> {
        self.n_block
    }

    pub fn edges(&self, t: usize) -> &[f64] {
        let w = self.n_bins - 1;
        &self.edges[t * w..(t + 1) * w]
    }

    pub fn values(&self, t: usize) -> &[f64] {
        &self.values[t * self.n_bins..(t + 1) * self.n_bins]
    }

    /// Transition probabilities out of bin `from` at time index `t`.
    pub fn row(&self, t: usize, from: usize) -> &[f64] {
        let n = self.n_bins;
        let start = (t * n + from) * n;
        &self.trans[start..start + n]
    }

    pub fn prob(&self, t: usize, from: usize, to: usize) -> f64 {
        self.row(t, from)[to]
    }

    pub(crate) fn raw_parts(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.edges, &self.values, &self.trans)
    }

    /// True when every value at time `t` coincides (a point-mass slice).
    pub fn is_atom(&self, t: usize) -> bool {
        let v = self.values(t);
        v[0] == v[self.n_bins - 1]
    }

    /// Bin `k` with `y ∈ (edge_{k-1}, edge_k]`, by binary search.
    pub fn locate_bin(&self, t: usize, y: f64) -> BinIndex {
        BinIndex(self.edges(t).partition_point(|&e| e < y))
    }

    /// The coerced value `Y_t`: the value of the bin containing `y`.
    pub fn coerce_value(&self, t: usize, y: f64) -> f64 {
        self.values(t)[self.locate_bin(t, y).0]
    }
}

fn total_order(rewards: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rewards.len()).collect();
    order.par_sort_unstable_by(|&a, &b| match rewards[a].total_cmp(&rewards[b]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    order
}

/// Simulates `N_sim` training paths once, forward, and estimates the coerced
/// chain. Only the current block of states is kept in memory.
pub fn build_coercion<P, G>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    sizes: CoercionSizes,
    key: &StreamKey,
) -> Result<Coercion>
where
    P: Process,
    G: RewardFn,
{
    let CoercionSizes { n_bins, n_block } = sizes;
    if n_bins < 2 || n_block < 1 {
        return Err(Error::InvalidConfig(format!(
            "need n_bins >= 2 and n_block >= 1, got ({n_bins}, {n_block})"
        )));
    }
    let n_sim = sizes.n_sim();
    let n_times = grid.len();
    let width = 2 * n_block;

    let mut edges = Vec::with_capacity(n_times * (n_bins - 1));
    let mut values = Vec::with_capacity(n_times * n_bins);
    let mut trans = vec![0.0; (n_times - 1) * n_bins * n_bins];

    let mut block = init_paths(process, n_sim)?;
    let mut prev_bin: Vec<u32> = Vec::new();
    let mut prev_atom = false;

    for t in 0..n_times {
        if t > 0 {
            step(process, grid, &mut block, key, Purpose::COERCION)?;
        }
        let rewards: Vec<f64> = block
            .par_rows()
            .map(|row| reward.reward(grid, t, row))
            .collect();
        if let Some(bad) = rewards.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "non-finite reward {} at t_index {t}",
                rewards[bad]
            )));
        }
        let order = total_order(&rewards);
        let sorted = |j: usize| rewards[order[j]];
        let mut bin = vec![0u32; n_sim];

        let atom = sorted(0) == sorted(n_sim - 1);
        if atom {
            if t > 0 && grid.can_exercise(t) {
                return Err(Error::DegenerateBins { t_index: t, bin: 0 });
            }
            let c = sorted(0);
            edges.extend(std::iter::repeat_n(c, n_bins - 1));
            values.extend(std::iter::repeat_n(c, n_bins));
        } else {
            // 1-indexed order statistic j is sorted(j - 1)
            for k in 1..n_bins {
                let value = sorted((2 * k - 1) * n_block - 1);
                let edge = sorted(2 * k * n_block - 1);
                let next_first = sorted(2 * k * n_block);
                if !(value < edge && edge < next_first) {
                    return Err(Error::DegenerateBins {
                        t_index: t,
                        bin: k - 1,
                    });
                }
                values.push(value);
                edges.push(edge);
            }
            values.push(sorted((2 * n_bins - 1) * n_block - 1));
            for (j, &path) in order.iter().enumerate() {
                bin[path] = (j / width) as u32;
            }
        }

        if t > 0 {
            let slab = &mut trans[(t - 1) * n_bins * n_bins..t * n_bins * n_bins];
            for (&from, &to) in prev_bin.iter().zip(&bin) {
                slab[from as usize * n_bins + to as usize] += 1.0;
            }
            if prev_atom {
                let pooled: Vec<f64> = slab[..n_bins].iter().map(|c| c / n_sim as f64).collect();
                for row in slab.chunks_exact_mut(n_bins) {
                    row.copy_from_slice(&pooled);
                }
            } else {
                for v in slab.iter_mut() {
                    *v /= width as f64;
                }
            }
        }
        prev_bin = bin;
        prev_atom = atom;
    }

    let mut c = Coercion::from_parts(n_bins, edges, values, trans)?;
    c.n_block = Some(n_block);
    Ok(c)
}
