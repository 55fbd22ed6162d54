use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::hamiltonian::SparseHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Target residual relative to the norm estimate of H.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 60,
            max_restarts: 500,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub norm_estimate: f64,
    pub matvecs: usize,
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

/// Lowest eigenpair by Lanczos with full reorthogonalization, restarted from
/// the current Ritz vector. The start vector is drawn from a seeded ChaCha
/// stream.
pub fn lowest_eigenpair(h: &SparseHamiltonian, opts: &LanczosOptions) -> Result<EigenPair> {
    let n = h.dim;
    let norm_est = h.norm_estimate();
    let target = opts.tolerance * norm_est.max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut x);
    let m = opts.krylov_dim.max(2).min(n);
    let mut w = vec![0.0; n];
    let mut history = Vec::new();
    let mut matvecs = 0;

    for _ in 0..opts.max_restarts.max(1) {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            h.apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w);
            alpha.push(a);
            for _pass in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
                }
            }
            if j + 1 == m {
                break;
            }
            let b = dot(&w, &w).sqrt();
            if b <= 1e-13 * norm_est.max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let lo = (0..k)
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("non-empty Krylov space");
        let s = eig.eigenvectors.column(lo);
        x = vec![0.0; n];
        for (c, v) in s.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
        }
        normalize(&mut x);
        h.apply(&x, &mut w);
        matvecs += 1;
        let energy = dot(&x, &w);
        let residual = w.iter().zip(&x).map(|(hx, xi)| (hx - energy * xi).powi(2)).sum::<f64>().sqrt();
        history.push(residual);
        if residual <= target {
            return Ok(EigenPair {
                energy,
                vector: x,
                residual,
                norm_estimate: norm_est,
                matvecs,
                history,
            });
        }
    }
    Err(Error::NonConvergence {
        solver: "lanczos",
        iterations: matvecs,
        last: *history.last().unwrap_or(&f64::NAN),
        history,
    })
}
