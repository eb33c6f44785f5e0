//! Minimization of the post-measurement conditional entropy over rank-1
//! projective measurements: a coarse parameter scan followed by
//! Nelder–Mead refinement from the best scan point and from seeded random
//! restarts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measurement::{bloch_basis, givens_unitary, BranchKernel, ProjectiveMeasurement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Points per angle axis of the coarse scan (qubits: θ × φ grid).
    pub grid_resolution: usize,
    /// Iteration cap for each simplex refinement.
    pub refinement_iterations: usize,
    pub random_restarts: usize,
    pub seed: u64,
    /// Bits.
    pub convergence_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 64,
            refinement_iterations: 400,
            random_restarts: 8,
            seed: 0,
            convergence_tol: 1e-7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid_resolution {} is below the minimum of 8",
                self.grid_resolution
            )));
        }
        if !self.convergence_tol.is_finite() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "convergence_tol {} must be positive",
                self.convergence_tol
            )));
        }
        Ok(())
    }

    /// Documented gap between the returned minimum and the true infimum.
    pub fn slack(&self) -> f64 {
        2.0 * self.convergence_tol
    }
}

pub(crate) struct Minimum {
    pub value: f64,
    pub measurement: ProjectiveMeasurement,
}

pub(crate) fn minimize_average_entropy(kernel: &BranchKernel<'_>, side: &str, cfg: &OptimizerConfig) -> Result<Minimum> {
    cfg.validate()?;
    let dim = kernel.side_dim();
    if !(2..=4).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let (value, params) = if dim == 2 {
        let objective = |x: &[f64]| kernel.average_entropy(&bloch_basis(x[0], x[1]));
        search(objective, 2, cfg, bloch_scan(cfg.grid_resolution), &[PI / (cfg.grid_resolution - 1) as f64, 2.0 * PI / cfg.grid_resolution as f64])
    } else {
        let objective = |x: &[f64]| {
            let u = givens_unitary(dim, x);
            let basis: Vec<_> = u.column_iter().map(|c| c.into_owned()).collect();
            kernel.average_entropy(&basis)
        };
        let n = dim * (dim - 1);
        let scan = random_scan(n, cfg.grid_resolution * cfg.grid_resolution, cfg.seed ^ 0x5eed_5ca4);
        search(objective, n, cfg, scan, &vec![0.2; n])
    };
    let measurement = if dim == 2 {
        ProjectiveMeasurement::bloch(side, params[0], params[1])
    } else {
        ProjectiveMeasurement::givens(side, dim, &params)?
    };
    Ok(Minimum { value, measurement })
}

/// θ ∈ [0, π] inclusive of both poles, φ ∈ [0, 2π).
fn bloch_scan(n: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        let theta = PI * i as f64 / (n - 1) as f64;
        for j in 0..n {
            pts.push(vec![theta, 2.0 * PI * j as f64 / n as f64]);
        }
    }
    pts
}

/// Seeded random angles, starting with the all-zero (computational basis) point.
fn random_scan(n_params: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![vec![0.0; n_params]];
    for _ in 1..count {
        pts.push(random_point(&mut rng, n_params));
    }
    pts
}

fn random_point(rng: &mut ChaCha8Rng, n_params: usize) -> Vec<f64> {
    (0..n_params)
        .map(|k| if k % 2 == 0 { rng.random_range(0.0..PI) } else { rng.random_range(0.0..2.0 * PI) })
        .collect()
}

fn search<F: Fn(&[f64]) -> f64>(
    f: F,
    n_params: usize,
    cfg: &OptimizerConfig,
    scan: Vec<Vec<f64>>,
    grid_step: &[f64],
) -> (f64, Vec<f64>) {
    // Strict `<` keeps the first scan point on ties, so the result does not
    // depend on anything but scan order.
    let mut best_x = scan[0].clone();
    let mut best_f = f(&best_x);
    for x in scan.iter().skip(1) {
        let v = f(x);
        if v < best_f {
            best_f = v;
            best_x = x.clone();
        }
    }

    let (x, v) = nelder_mead(&f, &best_x, grid_step, cfg.convergence_tol, cfg.refinement_iterations);
    if v < best_f {
        best_f = v;
        best_x = x;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let restart_step = vec![0.5; n_params];
    for _ in 0..cfg.random_restarts {
        let start = random_point(&mut rng, n_params);
        let (x, v) = nelder_mead(&f, &start, &restart_step, cfg.convergence_tol, cfg.refinement_iterations);
        if v < best_f {
            best_f = v;
            best_x = x;
        }
    }
    (best_f, best_x)
}

/// Derivative-free simplex minimization. Stops once the spread of objective
/// values across the simplex drops below `tol / 100` or after `max_iter`
/// iterations.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] <= 0.01 * tol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let reflected = along(&centroid, &simplex[n], -REFLECT);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(&centroid, &simplex[n], -EXPAND);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = along(&centroid, &reflected, CONTRACT);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = along(&centroid, &simplex[n], CONTRACT);
                let fc = f(&c);
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = along(&best, &simplex[i], SHRINK);
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let (i, v) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("simplex is non-empty");
    (simplex[i].clone(), v)
}
