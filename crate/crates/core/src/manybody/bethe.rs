use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetheOptions {
    /// Gauss-Legendre nodes on the rescaled Fermi interval; the error
    /// estimate reruns with twice as many.
    pub nodes: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BetheOptions {
    fn default() -> Self {
        Self {
            nodes: 256,
            tolerance: 1e-13,
            max_iterations: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiebLinigerEnergy {
    pub gamma: f64,
    /// Rescaled Fermi-interval parameter: the kernel width over the Fermi momentum.
    pub lambda: f64,
    /// Ground energy per particle in units of `rho0^2 / (2m)`.
    pub e: f64,
    /// `|e(2n nodes) - e(n nodes)|`.
    pub error_estimate: f64,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

struct Solution {
    gamma: f64,
    e: f64,
}

/// Solve `g(x) = 1/(2 pi) + (lambda/pi) int_{-1}^{1} g(y) / (lambda^2 + (x-y)^2) dy`
/// by fixed-point iteration, then `gamma = lambda / int g` and
/// `e = (gamma/lambda)^3 int x^2 g`.
fn solve(lambda: f64, x: &[f64], w: &[f64], opts: &BetheOptions) -> Result<Solution> {
    let n = x.len();
    let l2 = lambda * lambda;
    let kernel: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            lambda / std::f64::consts::PI * w[j] / (l2 + (x[i] - x[j]).powi(2))
        })
        .collect();
    let src = 0.5 / std::f64::consts::PI;
    let mut g = vec![src; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        for i in 0..n {
            next[i] = src + kernel[i * n..(i + 1) * n].iter().zip(&g).map(|(k, v)| k * v).sum::<f64>();
        }
        change = next.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut g, &mut next);
        if change <= opts.tolerance * g.iter().fold(0.0, |m: f64, v| m.max(v.abs())) {
            let norm: f64 = w.iter().zip(&g).map(|(a, b)| a * b).sum();
            let gamma = lambda / norm;
            let second: f64 = (0..n).map(|i| w[i] * x[i] * x[i] * g[i]).sum();
            return Ok(Solution {
                gamma,
                e: (gamma / lambda).powi(3) * second,
            });
        }
    }
    Err(Error::NonConvergence {
        solver: "lieb-liniger fixed point",
        iterations: opts.max_iterations,
        last: change,
        history: vec![change],
    })
}

fn energy_with(gamma: f64, nodes: usize, opts: &BetheOptions) -> Result<(f64, f64)> {
    let (x, w) = gauss_legendre(nodes);
    let eval = |ln_l: f64| -> Result<(f64, f64)> {
        let s = solve(ln_l.exp(), &x, &w, opts)?;
        Ok((s.gamma.ln() - gamma.ln(), s.e))
    };
    // bracket in log(lambda); gamma(lambda) is increasing
    let guess = (0.5 * gamma.sqrt()).max(gamma / std::f64::consts::PI).ln();
    let (mut a, mut b) = (guess - 0.5, guess + 0.5);
    let (mut fa, _) = eval(a)?;
    let (mut fb, _) = eval(b)?;
    let mut grow = 0;
    while fa > 0.0 || fb < 0.0 {
        if fa > 0.0 {
            a -= 1.0;
            fa = eval(a)?.0;
        } else {
            b += 1.0;
            fb = eval(b)?.0;
        }
        grow += 1;
        if grow > 60 {
            return Err(Error::NonConvergence {
                solver: "lieb-liniger bracket",
                iterations: grow,
                last: fa.min(fb.abs()),
                history: vec![fa, fb],
            });
        }
    }
    // Illinois regula falsi
    let mut side = 0;
    let mut history = Vec::new();
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let (fc, ec) = eval(c)?;
        history.push(fc.abs());
        if fc.abs() < 1e-14 || (b - a).abs() < 1e-15 {
            return Ok((c.exp(), ec));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::NonConvergence {
        solver: "lieb-liniger root",
        iterations: 200,
        last: *history.last().unwrap_or(&f64::NAN),
        history,
    })
}

/// Lieb-Liniger ground-state energy per particle `e(gamma)`.
pub fn lieb_liniger_energy(gamma: f64, opts: &BetheOptions) -> Result<LiebLinigerEnergy> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::validation("gamma", "must be finite and > 0"));
    }
    let (_, coarse) = energy_with(gamma, opts.nodes, opts)?;
    let (lambda, e) = energy_with(gamma, 2 * opts.nodes, opts)?;
    Ok(LiebLinigerEnergy {
        gamma,
        lambda,
        e,
        error_estimate: (e - coarse).abs(),
    })
}

pub fn lieb_liniger_table(gammas: &[f64], opts: &BetheOptions, exec: Exec) -> Result<Vec<LiebLinigerEnergy>> {
    exec.try_map(gammas, |&g| lieb_liniger_energy(g, opts))
}
