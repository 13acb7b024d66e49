//! A coerced chain run as a process in its own right.
//!
//! The state is the current bin index, the dynamics are the transition array
//! and the reward is the bin value. Bounds computed on this process can be
//! checked against the chain's dynamic-programming value.

use rand::Rng;

use crate::coercion::Coercion;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::Process;
use crate::reward::RewardFn;

#[derive(Debug, Clone)]
pub struct ChainProcess {
    chain: Coercion,
    start: usize,
}

impl ChainProcess {
    pub fn new(chain: Coercion, start: usize) -> Result<Self> {
        if start >= chain.n_bins() {
            return Err(Error::InvalidConfig(format!(
                "start bin {start} out of range for {} bins",
                chain.n_bins()
            )));
        }
        Ok(Self { chain, start })
    }

    pub fn chain(&self) -> &Coercion {
        &self.chain
    }

    pub fn start(&self) -> usize {
        self.start
    }
}

impl Process for ChainProcess {
    fn state_len(&self) -> usize {
        1
    }

    fn init_state(&self, state: &mut [f64]) {
        state[0] = self.start as f64;
    }

    fn advance<R: Rng + ?Sized>(
        &self,
        _grid: &TimeGrid,
        t_index: usize,
        state: &mut [f64],
        rng: &mut R,
    ) {
        let row = self.chain.row(t_index, state[0] as usize);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = None;
        for (m, &p) in row.iter().enumerate() {
            acc += p;
            if p > 0.0 && u < acc {
                next = Some(m);
                break;
            }
        }
        // rounding can leave acc marginally below 1
        let next = next.unwrap_or_else(|| row.iter().rposition(|&p| p > 0.0).unwrap_or(0));
        state[0] = next as f64;
    }

    fn successors(
        &self,
        _grid: &TimeGrid,
        t_index: usize,
        state: &[f64],
    ) -> Option<Vec<(f64, Vec<f64>)>> {
        let row = self.chain.row(t_index, state[0] as usize);
        Some(
            row.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(m, &p)| (p, vec![m as f64]))
                .collect(),
        )
    }
}

impl RewardFn for ChainProcess {
    fn reward(&self, _grid: &TimeGrid, t_index: usize, state: &[f64]) -> f64 {
        self.chain.values(t_index)[state[0] as usize]
    }
}
