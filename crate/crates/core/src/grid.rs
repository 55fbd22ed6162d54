//! Periodic spatial grids, conjugate momentum grids and a unitary FFT pair.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Periodic grid on `[-length/2, length/2)` with a power-of-two point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpatialGrid")]
pub struct SpatialGrid {
    length: f64,
    n_points: usize,
}

#[derive(Deserialize)]
struct RawSpatialGrid {
    length: f64,
    n_points: usize,
}

impl TryFrom<RawSpatialGrid> for SpatialGrid {
    type Error = Error;
    fn try_from(r: RawSpatialGrid) -> Result<Self> {
        SpatialGrid::new(r.length, r.n_points)
    }
}

impl SpatialGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(length: f64, n_points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::validation("grid.length", format!("must be > 0, got {length}")));
        }
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::validation(
                "grid.n_points",
                format!("must be a power of two >= {}, got {n_points}", Self::MIN_POINTS),
            ));
        }
        Ok(Self { length, n_points })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Largest resolved momentum, pi / dx.
    pub fn k_max(&self) -> f64 {
        PI / self.spacing()
    }

    /// Momenta in FFT storage order; the Nyquist mode is reported as `-pi/dx`.
    pub fn fft_momenta(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.length;
        (0..n)
            .map(|m| {
                let m = if m < n / 2 { m } else { m - n };
                m as f64 * dk
            })
            .collect()
    }
}

/// Ordered momenta, symmetric about zero and containing k = 0 exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MomentumGrid {
    k_values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MomentumGrid {
    type Error = Error;
    fn try_from(k: Vec<f64>) -> Result<Self> {
        MomentumGrid::from_values(k)
    }
}

impl From<MomentumGrid> for Vec<f64> {
    fn from(g: MomentumGrid) -> Vec<f64> {
        g.k_values
    }
}

impl MomentumGrid {
    /// Uniform window `[-k_max, k_max]` with `points` samples (odd, so k = 0 is a node).
    pub fn symmetric(k_max: f64, points: usize) -> Result<Self> {
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(Error::validation("kmax", format!("must be > 0, got {k_max}")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::validation(
                "points",
                format!("must be odd and >= 3 so that k = 0 is on the grid, got {points}"),
            ));
        }
        let half = (points / 2) as i64;
        let dk = k_max / half as f64;
        let k_values = (-half..=half).map(|m| m as f64 * dk).collect();
        Ok(Self { k_values })
    }

    /// Window given as `[kmin, kmax]`; requires `kmin = -kmax`.
    pub fn window(k_min: f64, k_max: f64, points: usize) -> Result<Self> {
        if (k_min + k_max).abs() > 1e-12 * k_max.abs().max(1.0) {
            return Err(Error::validation(
                "kmin",
                format!("momentum window must be symmetric, got [{k_min}, {k_max}]"),
            ));
        }
        Self::symmetric(k_max, points)
    }

    /// Momenta conjugate to a spatial grid, ordered, without the unpaired Nyquist mode.
    pub fn conjugate(grid: &SpatialGrid) -> Self {
        let half = (grid.n_points() / 2) as i64;
        let dk = 2.0 * PI / grid.length();
        let k_values = (-(half - 1)..=(half - 1)).map(|m| m as f64 * dk).collect();
        Self { k_values }
    }

    pub fn from_values(k_values: Vec<f64>) -> Result<Self> {
        let n = k_values.len();
        if n == 0 || n % 2 == 0 {
            return Err(Error::validation("k_values", "need an odd number of momenta"));
        }
        if k_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("k_values", "momenta must be strictly increasing"));
        }
        let scale = k_values[n - 1].abs().max(1e-300);
        for i in 0..n / 2 {
            if (k_values[i] + k_values[n - 1 - i]).abs() > 1e-12 * scale {
                return Err(Error::validation("k_values", "momenta must be symmetric about 0"));
            }
        }
        if k_values[n / 2] != 0.0 {
            return Err(Error::validation("k_values", "k = 0 must be present exactly"));
        }
        Ok(Self { k_values })
    }

    pub fn values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    pub fn zero_index(&self) -> usize {
        self.k_values.len() / 2
    }
}

/// Unitary (1/sqrt(n)) FFT pair on a spatial grid.
#[derive(Clone)]
pub struct Fourier {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("len", &self.forward.len()).finish()
    }
}

impl Fourier {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.len() == 0
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.forward.process(data);
        data.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.inverse.process(data);
        data.iter_mut().for_each(|z| *z *= self.scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_rules() {
        assert!(SpatialGrid::new(10.0, 4).is_err());
        assert!(SpatialGrid::new(10.0, 24).is_err());
        assert!(SpatialGrid::new(-1.0, 16).is_err());
        let g = SpatialGrid::new(16.0, 16).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.x(0), -8.0);
        assert_eq!(g.fft_momenta()[8], -PI);
    }

    #[test]
    fn momentum_grid_contains_zero() {
        let k = MomentumGrid::symmetric(0.5, 11).unwrap();
        assert_eq!(k.values()[k.zero_index()], 0.0);
        assert_eq!(k.values()[0], -0.5);
        assert!(MomentumGrid::symmetric(0.5, 10).is_err());
        assert!(MomentumGrid::window(-0.4, 0.5, 11).is_err());
        let c = MomentumGrid::conjugate(&SpatialGrid::new(2.0 * PI, 8).unwrap());
        assert_eq!(c.values(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn grid_serde_round_trip() {
        let g = SpatialGrid::new(123.456, 512).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<SpatialGrid>(&s).unwrap(), g);
        assert!(serde_json::from_str::<SpatialGrid>(r#"{"length":1,"n_points":3}"#).is_err());
        let k = MomentumGrid::symmetric(0.1 / 3.0, 21).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<MomentumGrid>(&s).unwrap(), k);
    }

    proptest! {
        #[test]
        fn fourier_is_isometry(seed in 0u64..1000, log_n in 3u32..11) {
            let n = 1usize << log_n;
            let f = Fourier::new(n);
            let mut x: Vec<C64> = (0..n)
                .map(|j| {
                    let t = (j as f64 + 1.0) * (seed as f64 + 0.5);
                    C64::new((t * 0.731).sin(), (t * 1.37).cos())
                })
                .collect();
            let orig = x.clone();
            let norm0: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            f.forward(&mut x);
            let norm1: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!(((norm1 - norm0) / norm0).abs() < 1e-12);
            f.inverse(&mut x);
            for (a, b) in x.iter().zip(&orig) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
