use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{Fourier, SpatialGrid};
use crate::linalg::eigen;
use crate::params::PhysicalParams;
use crate::spectra::stationary_matrix;
use crate::C64;

pub const FIELD_LABELS: [&str; 5] = ["E_R", "E_L", "S", "P_R", "P_L"];
pub(crate) const E_R: usize = 0;
pub(crate) const E_L: usize = 1;

/// Complex envelopes of the five fields on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFieldState {
    pub grid: SpatialGrid,
    pub fields: [Vec<C64>; 5],
    pub time: f64,
}

impl MultiFieldState {
    pub fn zeros(grid: SpatialGrid) -> Self {
        let n = grid.n_points();
        Self {
            grid,
            fields: std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]),
            time: 0.0,
        }
    }

    pub fn field_norm(&self, f: usize) -> f64 {
        self.fields[f].iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// Total norm: sum over fields and grid points of |psi|^2 dx.
    pub fn norm(&self) -> f64 {
        (0..5).map(|f| self.field_norm(f)).sum()
    }

    pub fn photonic_norm(&self) -> f64 {
        self.field_norm(E_R) + self.field_norm(E_L)
    }

    pub fn photonic_fraction(&self) -> f64 {
        self.photonic_norm() / self.norm()
    }

    fn centroid_of(&self, density: impl Fn(usize) -> f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..self.grid.n_points() {
            let w = density(j);
            num += w * self.grid.x(j);
            den += w;
        }
        num / den
    }

    /// Centroid of the total density summed over all fields.
    pub fn centroid(&self) -> f64 {
        self.centroid_of(|j| self.fields.iter().map(|f| f[j].norm_sqr()).sum())
    }

    /// Centroid of |E_+|^2 with `E_+ = (omega_R E_R + omega_L E_L) / omega`.
    pub fn e_plus_centroid(&self, omega_r: f64, omega_l: f64) -> f64 {
        let w = omega_r.hypot(omega_l);
        let (a, b) = (omega_r / w, omega_l / w);
        self.centroid_of(|j| (a * self.fields[E_R][j] + b * self.fields[E_L][j]).norm_sqr())
    }

    /// Fraction of the norm in the outer `fraction` of the grid on either side.
    pub fn edge_weight(&self, fraction: f64) -> f64 {
        let n = self.grid.n_points();
        let band = ((n as f64 * fraction).ceil() as usize).max(1);
        let total: f64 = (0..n).map(|j| self.density(j)).sum();
        let edge: f64 = (0..band).chain(n - band..n).map(|j| self.density(j)).sum();
        edge / total
    }

    fn density(&self, j: usize) -> f64 {
        self.fields.iter().map(|f| f[j].norm_sqr()).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for f in &mut self.fields {
            f.iter_mut().for_each(|z| *z *= s);
        }
    }
}

/// How the input pulse is placed in the medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loading {
    /// Every Fourier component projected onto the dark branch of the
    /// initial couplings: the pulse has already entered the medium.
    #[default]
    DarkPolariton,
    /// Bare right-moving photons in E_R.
    Photonic,
}

/// Gaussian input pulse, amplitude `exp(-(x - center)^2 / (2 width^2) + i carrier x)`,
/// normalized to unit total norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub carrier: f64,
    #[serde(default)]
    pub loading: Loading,
}

/// Minimum clearance between the pulse and the grid edge, in pulse widths.
pub const GUARD_WIDTHS: f64 = 4.0;

impl PulseSpec {
    pub fn new(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            carrier: 0.0,
            loading: Loading::DarkPolariton,
        }
    }

    pub fn with_carrier(mut self, k0: f64) -> Self {
        self.carrier = k0;
        self
    }

    pub fn with_loading(mut self, loading: Loading) -> Self {
        self.loading = loading;
        self
    }

    /// Width giving a momentum spread of at most a tenth of the given window.
    pub fn width_for_window(window_width: f64) -> f64 {
        10.0 / window_width
    }

    pub fn check_fits(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::validation("pulse.width", "must be > 0"));
        }
        let half = 0.5 * grid.length();
        let margin = GUARD_WIDTHS * self.width;
        if self.center - margin < -half || self.center + margin > half {
            return Err(Error::validation(
                "pulse",
                format!(
                    "pulse at {} with width {} needs {} widths of clearance inside [{}, {})",
                    self.center, self.width, GUARD_WIDTHS, -half, half
                ),
            ));
        }
        Ok(())
    }

    /// Gaussian envelope samples on the grid (unnormalized).
    pub fn envelope(&self, grid: &SpatialGrid) -> Vec<C64> {
        (0..grid.n_points())
            .map(|j| {
                let x = grid.x(j);
                let a = (-(x - self.center).powi(2) / (2.0 * self.width * self.width)).exp();
                C64::from_polar(a, self.carrier * x)
            })
            .collect()
    }

    /// Build the initial state for couplings `(omega_r, omega_l)`.
    pub fn prepare(
        &self,
        p: &PhysicalParams,
        grid: &SpatialGrid,
        omega_r: f64,
        omega_l: f64,
        exec: Exec,
    ) -> Result<MultiFieldState> {
        self.check_fits(grid)?;
        let mut state = MultiFieldState::zeros(*grid);
        let env = self.envelope(grid);
        match self.loading {
            Loading::Photonic => state.fields[E_R] = env,
            Loading::DarkPolariton => {
                let fourier = Fourier::new(grid.n_points());
                let mut spec = env;
                fourier.forward(&mut spec);
                let dark = dark_vectors(p, omega_r, omega_l, &grid.fft_momenta(), exec)?;
                for f in 0..5 {
                    let mut comp: Vec<C64> = spec.iter().zip(&dark).map(|(a, v)| a * v[f]).collect();
                    fourier.inverse(&mut comp);
                    state.fields[f] = comp;
                }
            }
        }
        let n = state.norm();
        state.scale(1.0 / n.sqrt());
        Ok(state)
    }
}

/// Unit dark eigenvectors of the 5x5 matrix at each momentum, followed from
/// k = 0 by maximal overlap and phased so that the overlap with the k = 0 dark
/// vector is real and positive.
pub fn dark_vectors(
    p: &PhysicalParams,
    omega_r: f64,
    omega_l: f64,
    ks: &[f64],
    exec: Exec,
) -> Result<Vec<[C64; 5]>> {
    let params = p.with_controls(omega_r, omega_l);
    params.validate_dark()?;
    let e0 = eigen(&stationary_matrix(&params, 0.0))?;
    let col = |e: &crate::linalg::Eigen, j: usize| -> [C64; 5] { std::array::from_fn(|i| e.vectors[(i, j)]) };
    let p_weight = |v: &[C64; 5]| v[3].norm_sqr() + v[4].norm_sqr();
    let d0 = (0..5)
        .min_by(|&a, &b| p_weight(&col(&e0, a)).total_cmp(&p_weight(&col(&e0, b))))
        .map(|j| col(&e0, j))
        .expect("5 eigenvectors");
    exec.try_map(ks, |&k| {
        let e = eigen(&stationary_matrix(&params, k))?;
        let (best, ov) = (0..5)
            .map(|j| {
                let v = col(&e, j);
                let ov: C64 = d0.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                (v, ov)
            })
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("5 eigenvectors");
        let phase = if ov.norm() > 0.0 { ov.conj() / ov.norm() } else { C64::new(1.0, 0.0) };
        Ok(best.map(|z| z * phase))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dark_loading_has_dark_composition() {
        let p = PhysicalParams::eit(1.0, 2.0, 1.0);
        let grid = SpatialGrid::new(200.0, 512).unwrap();
        let pulse = PulseSpec::new(0.0, 10.0);
        let s = pulse.prepare(&p, &grid, 2.0, 0.0, Exec::Sequential).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.photonic_fraction() - 0.8).abs() < 1e-3);
        assert!(s.centroid().abs() < 1e-9);
        assert!(s.field_norm(3) < 1e-2);
    }

    #[test]
    fn photonic_loading_is_bare_probe() {
        let p = PhysicalParams::eit(1.0, 2.0, 1.0);
        let grid = SpatialGrid::new(200.0, 512).unwrap();
        let pulse = PulseSpec::new(-20.0, 5.0).with_loading(Loading::Photonic);
        let s = pulse.prepare(&p, &grid, 2.0, 0.0, Exec::Sequential).unwrap();
        assert_eq!(s.photonic_fraction(), 1.0);
        assert!((s.centroid() + 20.0).abs() < 1e-9);
    }

    #[test]
    fn pulse_must_clear_boundary() {
        let grid = SpatialGrid::new(100.0, 256).unwrap();
        assert!(PulseSpec::new(40.0, 5.0).check_fits(&grid).is_err());
        assert!(PulseSpec::new(20.0, 5.0).check_fits(&grid).is_ok());
    }
}
