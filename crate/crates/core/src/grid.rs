use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The finite set of monitoring times `0 = t_0 < ... < t_{N-1} = T`, and
/// which of them permit exercise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    exercise_mask: Vec<bool>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>, exercise_mask: Vec<bool>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid("need at least two times".into()));
        }
        if times.len() != exercise_mask.len() {
            return Err(Error::InvalidGrid(format!(
                "{} times but {} exercise flags",
                times.len(),
                exercise_mask.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid("first time must be 0".into()));
        }
        if !times.iter().all(|t| t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "times must be finite and strictly increasing".into(),
            ));
        }
        if !exercise_mask[times.len() - 1] {
            return Err(Error::InvalidGrid(
                "exercise must be permitted at expiry".into(),
            ));
        }
        Ok(Self {
            times,
            exercise_mask,
        })
    }

    /// `n_times` equally spaced times on `[0, expiry]`; exercise is permitted
    /// at every time `t >= lockout`.
    pub fn uniform(expiry: f64, n_times: usize, lockout: f64) -> Result<Self> {
        if expiry.is_nan() || expiry <= 0.0 || n_times < 2 {
            return Err(Error::InvalidGrid(format!(
                "uniform grid needs expiry > 0 and at least 2 times (got {expiry}, {n_times})"
            )));
        }
        let last = (n_times - 1) as f64;
        let times: Vec<f64> = (0..n_times)
            .map(|i| {
                if i + 1 == n_times {
                    expiry
                } else {
                    expiry * i as f64 / last
                }
            })
            .collect();
        // small tolerance so that a lock-out landing on a grid point is honoured
        let tol = 1e-12 * expiry;
        let mask = times.iter().map(|&t| t + tol >= lockout).collect();
        Self::new(times, mask)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn expiry(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Length of the interval `[t_i, t_{i+1}]`.
    pub fn dt(&self, i: usize) -> f64 {
        self.times[i + 1] - self.times[i]
    }

    pub fn can_exercise(&self, i: usize) -> bool {
        self.exercise_mask[i]
    }

    pub fn exercise_mask(&self) -> &[bool] {
        &self.exercise_mask
    }

    pub fn last_index(&self) -> usize {
        self.times.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = TimeGrid::uniform(0.5, 40, 0.0).unwrap();
        assert_eq!(g.len(), 40);
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.expiry(), 0.5);
        assert!(g.exercise_mask().iter().all(|&e| e));
    }

    #[test]
    fn lockout_masks_early_times() {
        let g = TimeGrid::uniform(2.0, 9, 0.25).unwrap();
        // times are multiples of 0.25
        assert!(!g.can_exercise(0));
        assert!(g.can_exercise(1));
        let g = TimeGrid::uniform(2.0, 40, 0.25).unwrap();
        let first = g.exercise_mask().iter().position(|&e| e).unwrap();
        assert!(g.time(first) >= 0.25 && g.time(first - 1) < 0.25);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(vec![0.0], vec![true]).is_err());
        assert!(TimeGrid::new(vec![0.1, 1.0], vec![true, true]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0], vec![true; 3]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0], vec![true, false]).is_err());
        assert!(TimeGrid::uniform(1.0, 1, 0.0).is_err());
    }
}
