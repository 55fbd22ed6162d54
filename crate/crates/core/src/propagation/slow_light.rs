use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{MomentumGrid, SpatialGrid};
use crate::params::PhysicalParams;
use crate::spectra::{formulas, loss_spectrum, Scheme};

use super::state::PulseSpec;
use super::stepper::{dt_max, Propagator};

#[derive(Debug, Clone, Serialize)]
pub struct SlowLightReport {
    pub v_expected: f64,
    pub v_measured: f64,
    pub medium_length: f64,
    pub delay_expected: f64,
    pub delay_measured: f64,
    pub relative_error: f64,
    /// Set when the pulse bandwidth is not well inside the transparency window.
    pub warning: Option<String>,
}

/// Momentum width of the transparency window: the loss FWHM when the excited
/// state decays, otherwise the lower gap divided by c.
fn window_width(p: &PhysicalParams, exec: Exec) -> Result<f64> {
    let s = p.g * p.g + p.omega_r * p.omega_r;
    let gap_lower = (0.5 * p.delta.abs() - (0.25 * p.delta * p.delta + s).sqrt()).abs();
    let fallback = gap_lower / p.c;
    if p.gamma_e > 0.0 {
        let k = MomentumGrid::symmetric(20.0 * fallback.max(1.0), 801)?;
        Ok(loss_spectrum(p, &k, Scheme::Eit, exec)?.window_width.unwrap_or(f64::INFINITY))
    } else {
        Ok(fallback)
    }
}

/// Group delay of a dark-loaded pulse crossing `medium_length` of a uniform
/// EIT medium, measured from a linear fit of the centroid against time.
pub fn slow_light_delay(
    p: &PhysicalParams,
    grid: &SpatialGrid,
    pulse: &PulseSpec,
    medium_length: f64,
    exec: Exec,
) -> Result<SlowLightReport> {
    if p.omega_l != 0.0 {
        return Err(Error::Misuse("slow-light delay needs the single-control configuration (omega_L = 0)".into()));
    }
    p.validate_dark()?;
    if !(medium_length > 0.0) {
        return Err(Error::validation("medium_length", "must be > 0"));
    }
    let v = formulas::eit_speed(p);
    let window = window_width(p, exec)?;
    let warning = (1.0 / pulse.width > 0.1 * window).then(|| {
        format!(
            "pulse bandwidth {:.3e} exceeds a tenth of the transparency window {:.3e}; expect distortion",
            1.0 / pulse.width,
            window
        )
    });

    let input = pulse.prepare(p, grid, p.omega_r, 0.0, exec)?;
    let duration = medium_length / v;
    let dt = dt_max(p, grid, p.omega_r);
    let samples = 40usize;
    let chunk = duration / samples as f64;
    let per_chunk = (chunk / dt).ceil().max(1.0) as usize;
    let h = chunk / per_chunk as f64;
    let mut prop = Propagator::new(&input, p, exec);
    let mut ts = vec![0.0];
    let mut xs = vec![input.centroid()];
    for i in 1..=samples {
        for _ in 0..per_chunk {
            prop.step(p.omega_r, 0.0, h);
        }
        let st = prop.state();
        let edge = st.edge_weight(0.02);
        if edge > 1e-6 {
            return Err(Error::PulseAtBoundary {
                time: prop.time(),
                edge_weight: edge,
            });
        }
        ts.push(i as f64 * chunk);
        xs.push(st.centroid());
    }
    let n = ts.len() as f64;
    let (tm, xm) = (ts.iter().sum::<f64>() / n, xs.iter().sum::<f64>() / n);
    let cov: f64 = ts.iter().zip(&xs).map(|(t, x)| (t - tm) * (x - xm)).sum();
    let var: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let v_measured = cov / var;
    let delay_expected = medium_length / v - medium_length / p.c;
    let delay_measured = medium_length / v_measured - medium_length / p.c;
    Ok(SlowLightReport {
        v_expected: v,
        v_measured,
        medium_length,
        delay_expected,
        delay_measured,
        relative_error: ((delay_measured - delay_expected) / delay_expected).abs(),
        warning,
    })
}
