use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::params::PhysicalParams;
use crate::C64;

/// Which coupling matrix to diagonalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Single probe E, intermediate P, spin wave S; basis (E, P, S).
    Eit,
    /// Counter-propagating probes; basis (E_R, E_L, S, P_R, P_L).
    Stationary,
}

impl Scheme {
    pub fn dimension(self) -> usize {
        match self {
            Scheme::Eit => 3,
            Scheme::Stationary => 5,
        }
    }

    pub fn field_labels(self) -> &'static [&'static str] {
        match self {
            Scheme::Eit => &["E", "P", "S"],
            Scheme::Stationary => &["E_R", "E_L", "S", "P_R", "P_L"],
        }
    }

    /// Indices of photonic fields.
    pub fn photonic_indices(self) -> &'static [usize] {
        match self {
            Scheme::Eit => &[0],
            Scheme::Stationary => &[0, 1],
        }
    }

    /// Indices of intermediate-state (lossy) fields.
    pub fn p_indices(self) -> &'static [usize] {
        match self {
            Scheme::Eit => &[1],
            Scheme::Stationary => &[3, 4],
        }
    }

    /// Map an eigenvector onto `[E_R, E_L, S, P_R, P_L]` weights |amp|^2.
    pub fn weights5(self, v: &[C64]) -> [f64; 5] {
        match self {
            Scheme::Eit => [v[0].norm_sqr(), 0.0, v[2].norm_sqr(), v[1].norm_sqr(), 0.0],
            Scheme::Stationary => [
                v[0].norm_sqr(),
                v[1].norm_sqr(),
                v[2].norm_sqr(),
                v[3].norm_sqr(),
                v[4].norm_sqr(),
            ],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eit" => Ok(Scheme::Eit),
            "stationary" => Ok(Scheme::Stationary),
            other => Err(Error::validation("scheme", format!("expected eit|stationary, got {other}"))),
        }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// 3x3 EIT matrix in the (E, P, S) basis at momentum `k`.
///
/// Only `omega_R` acts as the control; a nonzero `omega_L` is a misuse.
pub fn eit_matrix(p: &PhysicalParams, k: f64) -> Result<CMatrix> {
    if p.omega_l != 0.0 {
        return Err(Error::Misuse(format!(
            "eit_matrix needs omega_L = 0 (got {}); use stationary_matrix for two control beams",
            p.omega_l
        )));
    }
    let d = C64::new(p.delta, -p.gamma_e);
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(3, 3, &[
        re(p.c * k), re(p.g),       re(0.0),
        re(p.g),     d,             re(p.omega_r),
        re(0.0),     re(p.omega_r), re(0.0),
    ]);
    Ok(m)
}

/// 5x5 stationary-light matrix in the (E_R, E_L, S, P_R, P_L) basis.
///
/// The right-moving probe carries `+ck`, the left-moving one `-ck`.
pub fn stationary_matrix(p: &PhysicalParams, k: f64) -> CMatrix {
    let mut m = coupling_matrix(p, p.omega_r, p.omega_l);
    m[(0, 0)] = re(p.c * k);
    m[(1, 1)] = re(-p.c * k);
    m
}

/// The momentum-independent part of the 5x5 matrix at the given controls.
pub fn coupling_matrix(p: &PhysicalParams, omega_r: f64, omega_l: f64) -> CMatrix {
    let d = C64::new(p.delta, -p.gamma_e);
    let z = re(0.0);
    let g = re(p.g);
    let (wr, wl) = (re(omega_r), re(omega_l));
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(5, 5, &[
        z, z, z,  g, z,
        z, z, z,  z, g,
        z, z, z,  wr, wl,
        g, z, wr, d, z,
        z, g, wl, z, d,
    ]);
    m
}

pub fn scheme_matrix(scheme: Scheme, p: &PhysicalParams, k: f64) -> Result<CMatrix> {
    match scheme {
        Scheme::Eit => eit_matrix(p, k),
        Scheme::Stationary => Ok(stationary_matrix(p, k)),
    }
}
