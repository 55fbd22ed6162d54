use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::params::PhysicalParams;
use crate::C64;

/// Rotation of the (R, L) field pairs into symmetric (+) and antisymmetric (-)
/// combinations weighted by the control couplings.
///
/// `X_+ = (omega_R X_R + omega_L X_L) / omega`, `X_- = (omega_L X_R - omega_R X_L) / omega`
/// for X in {E, P}. The 2x2 block is a reflection, so it is its own inverse.
/// In the rotated basis (E_+, E_-, S, P_+, P_-) the spin wave couples only to
/// P_+, and the kinetic term reads `[[u k, w k], [w k, -u k]]` with
/// `u = c (omega_R^2 - omega_L^2) / omega^2` and `w = 2 c omega_R omega_L / omega^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmBasis {
    cos: f64,
    sin: f64,
    c: f64,
}

impl PmBasis {
    pub fn new(omega_r: f64, omega_l: f64, c: f64) -> Result<Self> {
        let omega = omega_r.hypot(omega_l);
        if !(omega > 0.0) {
            return Err(Error::Degenerate(
                "the +/- rotation is undefined when omega_R = omega_L = 0".into(),
            ));
        }
        Ok(Self {
            cos: omega_r / omega,
            sin: omega_l / omega,
            c,
        })
    }

    pub fn from_params(p: &PhysicalParams) -> Result<Self> {
        Self::new(p.omega_r, p.omega_l, p.c)
    }

    /// Symmetric-sector speed u.
    pub fn u(&self) -> f64 {
        self.c * (self.cos * self.cos - self.sin * self.sin)
    }

    /// Strength of the k-proportional coupling between the two sectors.
    pub fn cross_speed(&self) -> f64 {
        2.0 * self.c * self.cos * self.sin
    }

    /// Rotate one (R, L) pair into (+, -).
    pub fn pair(&self, r: C64, l: C64) -> (C64, C64) {
        (self.cos * r + self.sin * l, self.sin * r - self.cos * l)
    }

    /// Orthogonal 5x5 map from (E_R, E_L, S, P_R, P_L) to (E_+, E_-, S, P_+, P_-).
    pub fn rotation(&self) -> CMatrix {
        let (a, b) = (C64::new(self.cos, 0.0), C64::new(self.sin, 0.0));
        let mut r = CMatrix::zeros(5, 5);
        for (x, y) in [(0, 1), (3, 4)] {
            r[(x, x)] = a;
            r[(x, y)] = b;
            r[(y, x)] = b;
            r[(y, y)] = -a;
        }
        r[(2, 2)] = C64::new(1.0, 0.0);
        r
    }

    pub fn transform_vector(&self, v: &CVector) -> CVector {
        self.rotation() * v
    }

    pub fn transform_matrix(&self, m: &CMatrix) -> CMatrix {
        let r = self.rotation();
        &r * m * r.transpose()
    }
}

/// (E_+, P_+, S) block with u in place of c.
pub fn symmetric_sector_matrix(p: &PhysicalParams, k: f64) -> Result<CMatrix> {
    let basis = PmBasis::from_params(p)?;
    let re = |x: f64| C64::new(x, 0.0);
    let d = C64::new(p.delta, -p.gamma_e);
    let w = p.omega_total();
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(3, 3, &[
        re(basis.u() * k), re(p.g), re(0.0),
        re(p.g),           d,       re(w),
        re(0.0),           re(w),   re(0.0),
    ]);
    Ok(m)
}

/// (E_-, P_-) block; the antisymmetric probe moves with -u.
pub fn antisymmetric_sector_matrix(p: &PhysicalParams, k: f64) -> Result<CMatrix> {
    let basis = PmBasis::from_params(p)?;
    let d = C64::new(p.delta, -p.gamma_e);
    Ok(CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(-basis.u() * k, 0.0), C64::new(p.g, 0.0), C64::new(p.g, 0.0), d],
    ))
}
