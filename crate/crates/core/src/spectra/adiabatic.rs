use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::eigen;
use crate::params::PhysicalParams;
use crate::propagation::{dark_fraction_and_coupling_scale, ControlSchedule};
use crate::spectra::bands::dark_index;
use crate::spectra::{gaps_at_zero, scheme_matrix, Scheme};

/// An interaction is flagged once it reaches this fraction of the smaller gap.
pub const GAP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionScale {
    Fixed(f64),
    /// Reference Rydberg interaction rescaled by g^4 / omega^4 at the
    /// instantaneous total control.
    Rydberg { v_ref: f64 },
}

impl InteractionScale {
    fn at(self, p: &PhysicalParams) -> Result<f64> {
        match self {
            InteractionScale::Fixed(v) => Ok(v),
            InteractionScale::Rydberg { v_ref } => Ok(v_ref * dark_fraction_and_coupling_scale(p)?.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticSample {
    pub t: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    pub gap_upper: f64,
    pub gap_lower: f64,
    pub interaction: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdiabaticityReport {
    pub samples: Vec<AdiabaticSample>,
    pub min_gap_upper: f64,
    pub min_gap_lower: f64,
    pub flagged_times: Vec<f64>,
}

impl AdiabaticityReport {
    pub fn any_flagged(&self) -> bool {
        !self.flagged_times.is_empty()
    }
}

/// Dark-to-bright gaps at k = 0 along `schedule`, sampled at `n_samples`
/// evenly spaced times including both ends.
pub fn adiabaticity_check(
    schedule: &ControlSchedule,
    p: &PhysicalParams,
    scale: InteractionScale,
    scheme: Scheme,
    n_samples: usize,
) -> Result<AdiabaticityReport> {
    let total = schedule.total_duration();
    let n = n_samples.max(2);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = total * i as f64 / (n - 1) as f64;
        let (wr, wl) = schedule.sample(t);
        let q = p.with_controls(wr, wl);
        let e = eigen(&scheme_matrix(scheme, &q, 0.0)?)?;
        let cols: Vec<Vec<_>> = (0..e.values.len())
            .map(|j| e.vectors.column(j).iter().copied().collect())
            .collect();
        let dark = dark_index(scheme, &e.values, &cols);
        let (gap_upper, gap_lower) = gaps_at_zero(&e.values, dark);
        let interaction = scale.at(&q)?;
        let flagged = interaction > 0.0 && interaction >= GAP_FRACTION * gap_upper.min(gap_lower);
        samples.push(AdiabaticSample {
            t,
            omega_r: wr,
            omega_l: wl,
            gap_upper,
            gap_lower,
            interaction,
            flagged,
        });
    }
    Ok(AdiabaticityReport {
        min_gap_upper: samples.iter().map(|s| s.gap_upper).fold(f64::INFINITY, f64::min),
        min_gap_lower: samples.iter().map(|s| s.gap_lower).fold(f64::INFINITY, f64::min),
        flagged_times: samples.iter().filter(|s| s.flagged).map(|s| s.t).collect(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonant_gaps() {
        let p = PhysicalParams::eit(1.0, 1.0, 0.0);
        let s = ControlSchedule::constant(10.0, 1.0, 0.0);
        let r = adiabaticity_check(&s, &p, InteractionScale::Fixed(0.0), Scheme::Eit, 5).unwrap();
        for x in &r.samples {
            assert!((x.gap_upper - 2f64.sqrt()).abs() < 1e-12);
            assert!((x.gap_lower - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(!r.any_flagged());
    }

    #[test]
    fn large_detuning_lower_gap() {
        let p = PhysicalParams::eit(1.0, 1.0, 20.0);
        let s = ControlSchedule::constant(1.0, 1.0, 0.0);
        let r = adiabaticity_check(&s, &p, InteractionScale::Fixed(0.0), Scheme::Eit, 2).unwrap();
        let (lower, _) = formulas_gap(&p);
        assert!((r.min_gap_lower - lower).abs() / lower < 0.1);
    }

    fn formulas_gap(p: &PhysicalParams) -> (f64, f64) {
        crate::spectra::formulas::large_detuning_gaps(p)
    }

    #[test]
    fn strong_interaction_is_flagged() {
        let p = PhysicalParams::eit(1.0, 1.0, 0.0);
        let s = ControlSchedule::constant(1.0, 1.0, 0.0);
        let r = adiabaticity_check(&s, &p, InteractionScale::Rydberg { v_ref: 1.0 }, Scheme::Eit, 3).unwrap();
        assert!(r.any_flagged());
        let r = adiabaticity_check(&s, &p, InteractionScale::Rydberg { v_ref: 1e-3 }, Scheme::Eit, 3).unwrap();
        assert!(!r.any_flagged());
    }
}
