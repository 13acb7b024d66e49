//! Dynamic programming on the coerced chain.

use crate::coercion::Coercion;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Value array `V` and stopping indicator `S` on (time × bin).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueStoppingTable {
    n_bins: usize,
    value: Vec<f64>,
    stop: Vec<bool>,
}

impl ValueStoppingTable {
    pub(crate) fn from_parts(n_bins: usize, value: Vec<f64>, stop: Vec<bool>) -> Self {
        Self {
            n_bins,
            value,
            stop,
        }
    }

    pub fn n_times(&self) -> usize {
        self.value.len() / self.n_bins
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn values(&self, t: usize) -> &[f64] {
        &self.value[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn stops(&self, t: usize) -> &[bool] {
        &self.stop[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub(crate) fn raw_parts(&self) -> (&[f64], &[bool]) {
        (&self.value, &self.stop)
    }

    /// `V(t, y)`: the value of the bin containing reward level `y`.
    pub fn value_at(&self, c: &Coercion, t: usize, y: f64) -> f64 {
        self.values(t)[c.locate_bin(t, y).0]
    }

    /// `S(t, y)`: whether to stop at reward level `y`.
    pub fn stop_at(&self, c: &Coercion, t: usize, y: f64) -> bool {
        self.stops(t)[c.locate_bin(t, y).0]
    }
}

/// Backward induction. Where exercise is permitted,
/// `V[i,k] = max(η_i^k, Σ_m P[i,k,m] V[i+1,m])` and the rule stops when the
/// bin value is at least the continuation value; during lock-out `V` is the
/// continuation value and the rule never stops.
pub fn solve_chain(c: &Coercion, grid: &TimeGrid) -> Result<ValueStoppingTable> {
    if c.n_times() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "coercion has {} times, grid has {}",
            c.n_times(),
            grid.len()
        )));
    }
    let n = c.n_bins();
    let last = grid.last_index();
    let mut value = vec![0.0; grid.len() * n];
    let mut stop = vec![false; grid.len() * n];

    value[last * n..].copy_from_slice(c.values(last));
    stop[last * n..].fill(true);

    for i in (0..last).rev() {
        let (head, tail) = value.split_at_mut((i + 1) * n);
        let next = &tail[..n];
        let eta = c.values(i);
        for k in 0..n {
            let cont: f64 = c.row(i, k).iter().zip(next).map(|(p, v)| p * v).sum();
            let stops = grid.can_exercise(i) && eta[k] >= cont;
            head[i * n + k] = if stops { eta[k] } else { cont };
            stop[i * n + k] = stops;
        }
    }
    Ok(ValueStoppingTable {
        n_bins: n,
        value,
        stop,
    })
}
