use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::grid::MomentumGrid;
use crate::params::PhysicalParams;
use crate::spectra::{band_structure, Scheme};

/// Imaginary part of the dark-branch eigenvalue across momentum.
///
/// The transparency profile is `exp(2 Im eps_D(k) / g)`, the intensity left
/// after one natural time unit 1/g; the window width is its full width at
/// half maximum, or `None` when the profile stays above 1/2 on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct LossSpectrum {
    pub scheme: Scheme,
    pub k: Vec<f64>,
    pub im_dark: Vec<f64>,
    pub window_width: Option<f64>,
}

impl LossSpectrum {
    pub fn profile(&self, g: f64) -> Vec<f64> {
        self.im_dark.iter().map(|im| (2.0 * im / g).exp()).collect()
    }
}

fn half_max_crossing(k: &[f64], prof: &[f64], from: usize, step: isize) -> Option<f64> {
    let mut i = from as isize;
    loop {
        let j = i + step;
        if j < 0 || j as usize >= k.len() {
            return None;
        }
        let (a, b) = (prof[i as usize], prof[j as usize]);
        if b < 0.5 {
            let t = (a - 0.5) / (a - b);
            return Some(k[i as usize] + t * (k[j as usize] - k[i as usize]));
        }
        i = j;
    }
}

pub fn loss_spectrum(
    p: &PhysicalParams,
    k_grid: &MomentumGrid,
    scheme: Scheme,
    exec: Exec,
) -> Result<LossSpectrum> {
    let bands = band_structure(p, k_grid, scheme, exec)?;
    let im_dark: Vec<f64> = bands.dark().iter().map(|z| z.im).collect();
    let k = k_grid.values().to_vec();
    let prof: Vec<f64> = im_dark.iter().map(|im| (2.0 * im / p.g).exp()).collect();
    let z = k_grid.zero_index();
    let window_width = match (
        half_max_crossing(&k, &prof, z, 1),
        half_max_crossing(&k, &prof, z, -1),
    ) {
        (Some(hi), Some(lo)) => Some(hi - lo),
        _ => None,
    };
    Ok(LossSpectrum {
        scheme,
        k,
        im_dark,
        window_width,
    })
}

/// Stationary-light loss spectrum next to the single-beam EIT spectrum with
/// the same total control coupling.
#[derive(Debug, Clone, Serialize)]
pub struct LossComparison {
    pub eit: LossSpectrum,
    pub stationary: LossSpectrum,
}

impl LossComparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,im_dark_eit,im_dark_stationary\n");
        for i in 0..self.eit.k.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e}\n",
                self.eit.k[i], self.eit.im_dark[i], self.stationary.im_dark[i]
            ));
        }
        out
    }
}

pub fn loss_window_comparison(
    p: &PhysicalParams,
    k_grid: &MomentumGrid,
    exec: Exec,
) -> Result<LossComparison> {
    let eit_params = p.with_controls(p.omega_total(), 0.0);
    Ok(LossComparison {
        eit: loss_spectrum(&eit_params, k_grid, Scheme::Eit, exec)?,
        stationary: loss_spectrum(p, k_grid, Scheme::Stationary, exec)?,
    })
}
