use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density-density correlation against separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationData {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub rho0: f64,
    pub k_f: f64,
    /// Ring circumference for data measured with periodic boundaries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic_length: Option<f64>,
}

impl CorrelationData {
    pub fn new(r: Vec<f64>, values: Vec<f64>, rho0: f64, periodic_length: Option<f64>) -> Self {
        Self {
            r,
            values,
            rho0,
            k_f: std::f64::consts::PI * rho0,
            periodic_length,
        }
    }

    /// Effective separation: the chord length `(L/pi) sin(pi r / L)` on a ring,
    /// `r` otherwise.
    pub fn effective_distance(&self, r: f64) -> f64 {
        match self.periodic_length {
            Some(l) => l / std::f64::consts::PI * (std::f64::consts::PI * r / l).sin(),
            None => r,
        }
    }

    /// Linear interpolation on the sampled separations.
    pub fn at(&self, r: f64) -> Option<f64> {
        let i = self.r.iter().position(|&x| x >= r)?;
        if self.r[i] == r {
            return Some(self.values[i]);
        }
        if i == 0 {
            return None;
        }
        let t = (r - self.r[i - 1]) / (self.r[i] - self.r[i - 1]);
        Some(self.values[i - 1] + t * (self.values[i] - self.values[i - 1]))
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("r,g2\n");
        for (r, v) in self.r.iter().zip(&self.values) {
            s.push_str(&format!("{r},{v}\n"));
        }
        s
    }
}

/// Tonks-Girardeau pair correlation `1 - (sin(k_F r) / (k_F r))^2`, `k_F = pi rho0`.
pub fn tg_g2(r: f64, rho0: f64) -> f64 {
    let x = std::f64::consts::PI * rho0 * r;
    if x.abs() < 1e-8 {
        return x * x / 3.0;
    }
    let s = x.sin() / x;
    1.0 - s * s
}

pub fn tg_correlation(r: &[f64], rho0: f64) -> CorrelationData {
    CorrelationData::new(r.to_vec(), r.iter().map(|&x| tg_g2(x, rho0)).collect(), rho0, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub r_min: f64,
    pub r_max: f64,
}

impl FitWindow {
    /// Excludes `r < 2 / rho0` and the last 10% of the sampled range.
    pub fn standard(corr: &CorrelationData) -> Self {
        let last = corr.r.last().copied().unwrap_or(0.0);
        Self {
            r_min: 2.0 / corr.rho0,
            r_max: 0.9 * last,
        }
    }
}

/// How the decay exponent is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// Straight line through `log |g2 - 1|` against `log d` at the extrema.
    #[default]
    Envelope,
    /// Leading harmonic Luttinger-liquid form
    /// `g2 - 1 = -K / (2 pi^2 (rho0 d)^2) + A cos(2 pi rho0 r) / (rho0 d)^(2K)`
    /// over every sample in the window, with `A` and `K` free. The smooth
    /// `1/d^2` part is separated from the oscillation instead of being folded
    /// into its envelope.
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub window: FitWindow,
    pub min_extrema: usize,
    #[serde(default)]
    pub model: FitModel,
}

impl FitOptions {
    pub fn standard(corr: &CorrelationData) -> Self {
        Self {
            window: FitWindow::standard(corr),
            min_extrema: 4,
            model: FitModel::Envelope,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuttingerFit {
    pub k: f64,
    pub amplitude: f64,
    /// Coefficient of the smooth `1/d^2` term (zero for the envelope model).
    pub background: f64,
    pub window: FitWindow,
    /// RMS deviation of the fitted log-envelope.
    pub residual: f64,
    pub extrema: Vec<f64>,
}

fn extrema_in(corr: &CorrelationData, w: FitWindow) -> Vec<f64> {
    let period = 0.5 / corr.rho0;
    let first = ((w.r_min / period - 1e-9).ceil() as i64).max(1);
    let last = (w.r_max / period + 1e-9).floor() as i64;
    (first..=last).map(|n| n as f64 * period).collect()
}

/// Fit the decay exponent K of `g2 - 1 ~ cos(2 pi rho0 r) / d^(2K)`, where `d`
/// is the chord distance on rings and `r` otherwise. Needs at least
/// `min_extrema` oscillation extrema `r = n / (2 rho0)` inside the window.
pub fn fit_luttinger_k(corr: &CorrelationData, opts: &FitOptions) -> Result<LuttingerFit> {
    if !(corr.rho0 > 0.0) {
        return Err(Error::validation("rho0", "must be > 0"));
    }
    let w = opts.window;
    let extrema = extrema_in(corr, w);
    if extrema.len() < opts.min_extrema.max(2) {
        return Err(Error::InsufficientData(format!(
            "{} extrema in [{}, {}], need {}",
            extrema.len(),
            w.r_min,
            w.r_max,
            opts.min_extrema.max(2)
        )));
    }
    match opts.model {
        FitModel::Envelope => fit_envelope(corr, opts, &extrema),
        FitModel::Harmonic => fit_harmonic(corr, opts, &extrema),
    }
}

fn fit_envelope(corr: &CorrelationData, opts: &FitOptions, extrema: &[f64]) -> Result<LuttingerFit> {
    let w = opts.window;
    let mut pts = Vec::new();
    for &r in extrema {
        if let Some(v) = corr.at(r) {
            let dev = (v - 1.0).abs();
            if dev > 1e-12 {
                pts.push((r, corr.effective_distance(r).ln(), dev.ln()));
            }
        }
    }
    if pts.len() < opts.min_extrema.max(2) {
        return Err(Error::InsufficientData(format!(
            "{} usable extrema in [{}, {}], need {}",
            pts.len(),
            w.r_min,
            w.r_max,
            opts.min_extrema.max(2)
        )));
    }
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.1 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - xm) * (p.2 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual = (pts.iter().map(|p| (p.2 - intercept - slope * p.1).powi(2)).sum::<f64>() / n).sqrt();
    let k = -0.5 * slope;
    if !(k > 0.0) {
        return Err(Error::InsufficientData(format!("envelope does not decay (K = {k})")));
    }
    Ok(LuttingerFit {
        k,
        amplitude: intercept.exp(),
        background: 0.0,
        window: w,
        residual,
        extrema: pts.iter().map(|p| p.0).collect(),
    })
}

/// Least squares in A at fixed K; returns (sse, smooth coefficient, A).
fn solve_harmonic(rows: &[(f64, f64, f64)], rho0: f64, k: f64) -> (f64, f64, f64) {
    // rows: (d, cos term, g2 - 1)
    let b = -k / (2.0 * std::f64::consts::PI.powi(2) * rho0 * rho0);
    let (mut s22, mut t2) = (0.0, 0.0);
    for &(d, c, y) in rows {
        let f = c * (rho0 * d).powf(-2.0 * k);
        s22 += f * f;
        t2 += f * (y - b / (d * d));
    }
    let a = if s22 > 0.0 { t2 / s22 } else { 0.0 };
    let sse = rows
        .iter()
        .map(|&(d, c, y)| (y - b / (d * d) - a * c * (rho0 * d).powf(-2.0 * k)).powi(2))
        .sum();
    (sse, b, a)
}

fn fit_harmonic(corr: &CorrelationData, opts: &FitOptions, extrema: &[f64]) -> Result<LuttingerFit> {
    let w = opts.window;
    let rho0 = corr.rho0;
    let two_pi_rho = 2.0 * std::f64::consts::PI * rho0;
    let rows: Vec<(f64, f64, f64)> = corr
        .r
        .iter()
        .zip(&corr.values)
        .filter(|(&r, _)| r >= w.r_min - 1e-12 && r <= w.r_max + 1e-12 && r > 0.0)
        .map(|(&r, &v)| (corr.effective_distance(r), (two_pi_rho * r).cos(), v - 1.0))
        .collect();
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!("{} samples in window, need 2", rows.len())));
    }
    let sse = |ln_k: f64| solve_harmonic(&rows, rho0, ln_k.exp()).0;
    // coarse log-spaced scan, then golden section around the best point
    let (lo, hi) = (0.02f64.ln(), 50f64.ln());
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let best = (0..=n)
        .min_by(|&a, &b| sse(grid[a]).total_cmp(&sse(grid[b])))
        .expect("non-empty scan");
    if best == 0 || best == n {
        return Err(Error::InsufficientData(format!(
            "no interior optimum for K in [{}, {}]",
            lo.exp(),
            hi.exp()
        )));
    }
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let k = (0.5 * (a + b)).exp();
    let (sse, background, amplitude) = solve_harmonic(&rows, rho0, k);
    Ok(LuttingerFit {
        k,
        amplitude,
        background,
        window: w,
        residual: (sse / rows.len() as f64).sqrt(),
        extrema: extrema.to_vec(),
    })
}
