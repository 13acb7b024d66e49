//! Independent reference values used by the integration and acceptance tests.
#![allow(dead_code)]

use bermuda::{Coercion, TimeGrid};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Black–Scholes price of a European put.
pub fn black_scholes_put(s0: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let sd = sigma * t.sqrt();
    let d1 = ((s0 / k).ln() + (r + 0.5 * sigma * sigma) * t) / sd;
    let d2 = d1 - sd;
    k * (-r * t).exp() * n.cdf(-d2) - s0 * n.cdf(-d1)
}

/// Cox–Ross–Rubinstein tree for a put that may be exercised only every
/// `every` steps (and at expiry).
pub fn binomial_bermudan_put(
    s0: f64,
    k: f64,
    r: f64,
    sigma: f64,
    t: f64,
    steps: usize,
    every: usize,
) -> f64 {
    let dt = t / steps as f64;
    let u = (sigma * dt.sqrt()).exp();
    let d = 1.0 / u;
    let disc = (-r * dt).exp();
    let p = ((r * dt).exp() - d) / (u - d);
    let mut v: Vec<f64> = (0..=steps)
        .map(|j| (k - s0 * u.powi(j as i32) * d.powi((steps - j) as i32)).max(0.0))
        .collect();
    for n in (0..steps).rev() {
        for j in 0..=n {
            v[j] = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
        }
        if n % every == 0 {
            for (j, vj) in v.iter_mut().enumerate().take(n + 1) {
                let s = s0 * u.powi(j as i32) * d.powi((n - j) as i32);
                *vj = vj.max(k - s);
            }
        }
        v.truncate(n + 1);
    }
    v[0]
}

/// Gauss–Hermite nodes and weights for `∫ f(x) e^{-x²} dx`, by Golub–Welsch.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `E[f(Z)]` for standard normal `Z`.
pub fn normal_expectation(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    gauss_hermite(n)
        .iter()
        .map(|(x, w)| w * f(s2 * x))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt()
}

/// A random coercion with strictly interleaved levels. With `dyadic` every
/// level and probability is a multiple of 1/8, so dynamic programming on it
/// is exact in floating point.
pub fn random_coercion<R: Rng>(
    rng: &mut R,
    n_times: usize,
    n_bins: usize,
    dyadic: bool,
) -> Coercion {
    let mut edges = Vec::new();
    let mut values = Vec::new();
    for _ in 0..n_times {
        let mut level: f64 = if dyadic {
            rng.random_range(0..8) as f64 / 8.0
        } else {
            rng.random_range(-1.0..1.0)
        };
        let mut row = Vec::with_capacity(n_bins);
        for _ in 0..n_bins {
            row.push(level);
            level += if dyadic {
                rng.random_range(1..5) as f64 / 4.0
            } else {
                rng.random_range(0.05..1.0)
            };
        }
        for k in 0..n_bins - 1 {
            edges.push(0.5 * (row[k] + row[k + 1]));
        }
        values.extend(row);
    }
    let mut trans = Vec::new();
    for _ in 0..n_times - 1 {
        for _ in 0..n_bins {
            if dyadic {
                let mut counts = vec![0u32; n_bins];
                for _ in 0..8 {
                    counts[rng.random_range(0..n_bins)] += 1;
                }
                trans.extend(counts.iter().map(|&c| c as f64 / 8.0));
            } else {
                let w: Vec<f64> = (0..n_bins)
                    .map(|_| {
                        if rng.random_bool(0.3) {
                            0.0
                        } else {
                            rng.random_range(0.0..1.0)
                        }
                    })
                    .collect();
                let total: f64 = w.iter().sum();
                if total == 0.0 {
                    let mut row = vec![0.0; n_bins];
                    row[rng.random_range(0..n_bins)] = 1.0;
                    trans.extend(row);
                } else {
                    trans.extend(w.iter().map(|x| x / total));
                }
            }
        }
    }
    Coercion::from_parts(n_bins, edges, values, trans).unwrap()
}

/// Random exercise mask with exercise allowed at expiry.
pub fn random_grid<R: Rng>(rng: &mut R, n_times: usize) -> TimeGrid {
    let times = (0..n_times)
        .map(|i| i as f64 / (n_times - 1) as f64)
        .collect();
    let mut mask: Vec<bool> = (0..n_times).map(|_| rng.random_bool(0.7)).collect();
    mask[n_times - 1] = true;
    TimeGrid::new(times, mask).unwrap()
}

/// Chain value from every starting bin, maximized by enumerating every
/// Markov stopping rule (one stop/continue choice per exercisable cell).
/// Markov rules include an optimal one, so this is the optimal value.
pub fn brute_force_chain_value(c: &Coercion, grid: &TimeGrid) -> Vec<f64> {
    let n = c.n_bins();
    let last = grid.last_index();
    let cells: Vec<(usize, usize)> = (0..last)
        .filter(|&t| grid.can_exercise(t))
        .flat_map(|t| (0..n).map(move |k| (t, k)))
        .collect();
    let mut best = vec![f64::NEG_INFINITY; n];
    for rule in 0u64..(1 << cells.len()) {
        let stops = |t: usize, k: usize| {
            cells
                .iter()
                .position(|&cell| cell == (t, k))
                .is_some_and(|i| rule >> i & 1 == 1)
        };
        let mut v = c.values(last).to_vec();
        for t in (0..last).rev() {
            v = (0..n)
                .map(|k| {
                    if stops(t, k) {
                        c.values(t)[k]
                    } else {
                        c.row(t, k).iter().zip(&v).map(|(p, x)| p * x).sum()
                    }
                })
                .collect();
        }
        for k in 0..n {
            best[k] = best[k].max(v[k]);
        }
    }
    best
}
