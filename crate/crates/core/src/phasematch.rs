//! Coplanar four-beam phase matching for counter-propagating probes.
//!
//! The probes run along x. Each control is counter-aligned in x with the probe
//! of the same label (`k1L.x = -k2L.x`, `k1R.x = -k2R.x`) and both controls share
//! a y-component, which closes momentum and energy conservation at once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSet {
    pub k1_l: Vec2,
    pub k1_r: Vec2,
    pub k2_l: Vec2,
    pub k2_r: Vec2,
    pub lambda_probe: f64,
    pub lambda_control: f64,
    /// Angle of the left-labelled control from +x, radians.
    pub tilt_l: f64,
    /// Angle of the right-labelled control from +x, radians.
    pub tilt_r: f64,
}

impl BeamSet {
    /// Swap the L and R labels.
    pub fn swapped(&self) -> Self {
        Self {
            k1_l: self.k1_r,
            k1_r: self.k1_l,
            k2_l: self.k2_r,
            k2_r: self.k2_l,
            tilt_l: self.tilt_r,
            tilt_r: self.tilt_l,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub momentum_x: Residual,
    pub momentum_y: Residual,
    pub energy: Residual,
}

impl ResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.momentum_x.relative.max(self.momentum_y.relative).max(self.energy.relative)
    }
}

/// Residuals of `k1L + k2L = k1R + k2R` (both components) and of
/// `|k1L| + |k2L| = |k1R| + |k2R|` (c = 1).
pub fn verify(beams: &BeamSet) -> Result<ResidualReport> {
    let all = [beams.k1_l, beams.k1_r, beams.k2_l, beams.k2_r];
    if all.iter().any(|&v| !(norm(v) > 0.0)) {
        return Err(Error::Degenerate("zero or non-finite wavevector".into()));
    }
    let scale: f64 = all.iter().map(|&v| norm(v)).sum::<f64>() / 2.0;
    let r = |a: f64| Residual {
        absolute: a.abs(),
        relative: a.abs() / scale,
    };
    let dx = beams.k1_l[0] + beams.k2_l[0] - beams.k1_r[0] - beams.k2_r[0];
    let dy = beams.k1_l[1] + beams.k2_l[1] - beams.k1_r[1] - beams.k2_r[1];
    let de = norm(beams.k1_l) + norm(beams.k2_l) - norm(beams.k1_r) - norm(beams.k2_r);
    Ok(ResidualReport {
        momentum_x: r(dx),
        momentum_y: r(dy),
        energy: r(de),
    })
}

fn check_wavelength(name: &str, l: f64) -> Result<f64> {
    if l.is_finite() && l > 0.0 {
        Ok(2.0 * std::f64::consts::PI / l)
    } else {
        Err(Error::validation(name, format!("must be finite and > 0, got {l}")))
    }
}

fn build(k1: f64, k2: f64, q: f64, lambda_probe: f64, lambda_control: f64) -> BeamSet {
    let k2_l = [k1, q];
    let k2_r = [-k1, q];
    debug_assert!((norm(k2_l) - k2).abs() <= 1e-9 * k2);
    BeamSet {
        k1_l: [-k1, 0.0],
        k1_r: [k1, 0.0],
        k2_l,
        k2_r,
        lambda_probe,
        lambda_control,
        tilt_l: q.atan2(k1),
        tilt_r: q.atan2(-k1),
    }
}

/// Both coplanar solutions, +y control tilt first. Equal wavelengths give a
/// single collinear solution.
pub fn solve_coplanar(lambda_probe: f64, lambda_control: f64) -> Result<Vec<BeamSet>> {
    let k1 = check_wavelength("lambda_probe", lambda_probe)?;
    let k2 = check_wavelength("lambda_control", lambda_control)?;
    if k1 > k2 {
        return Err(Error::Infeasible(format!(
            "controls need an x-component of magnitude {k1:.6e} but carry only {k2:.6e}; \
             the control wavelength ({lambda_control:e}) must not exceed the probe wavelength ({lambda_probe:e})"
        )));
    }
    // (k2 - k1)(k2 + k1) keeps precision when the wavelengths are close
    let q = ((k2 - k1) * (k2 + k1)).sqrt();
    if q == 0.0 {
        return Ok(vec![build(k1, k2, 0.0, lambda_probe, lambda_control)]);
    }
    Ok(vec![
        build(k1, k2, q, lambda_probe, lambda_control),
        build(k1, k2, -q, lambda_probe, lambda_control),
    ])
}

/// All four beams on the x axis. Only possible for equal wavelengths.
pub fn solve_collinear(lambda_probe: f64, lambda_control: f64) -> Result<BeamSet> {
    let k1 = check_wavelength("lambda_probe", lambda_probe)?;
    let k2 = check_wavelength("lambda_control", lambda_control)?;
    if (k1 - k2).abs() > 1e-12 * k1.max(k2) {
        return Err(Error::Infeasible(format!(
            "collinear beams need equal wavelengths; momentum mismatch 2|k_probe - k_control| = {:.6e}",
            2.0 * (k1 - k2).abs()
        )));
    }
    Ok(build(k1, k2, 0.0, lambda_probe, lambda_control))
}
