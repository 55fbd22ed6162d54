use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::linalg::eigen;
use crate::params::PhysicalParams;
use crate::spectra::bands::{dark_index, overlap};
use crate::spectra::{scheme_matrix, BandStructure, Scheme};
use crate::C64;

/// Closed-form dark-polariton parameters, used as references for the
/// numerically extracted values.
pub mod formulas {
    use crate::params::PhysicalParams;

    /// EIT group velocity `c omega^2 / (omega^2 + g^2)`.
    pub fn eit_speed(p: &PhysicalParams) -> f64 {
        let w2 = p.omega_r * p.omega_r;
        p.c * w2 / (w2 + p.g * p.g)
    }

    /// EIT mass `(g^2 + omega^2)^3 / (2 c^2 g^2 omega^2 delta)`.
    pub fn eit_mass(p: &PhysicalParams) -> f64 {
        let (g2, w2) = (p.g * p.g, p.omega_r * p.omega_r);
        (g2 + w2).powi(3) / (2.0 * p.c * p.c * g2 * w2 * p.delta)
    }

    /// Stationary dark speed `c (omega_R^2 - omega_L^2) / (omega_R^2 + omega_L^2 + g^2)`.
    pub fn stationary_speed(p: &PhysicalParams) -> f64 {
        let (r2, l2) = (p.omega_r * p.omega_r, p.omega_l * p.omega_l);
        p.c * (r2 - l2) / (r2 + l2 + p.g * p.g)
    }

    /// Mass at balance (omega_R = omega_L): `g^2 (g^2 + omega^2) / (2 c^2 omega^2 delta)`
    /// with omega the total control coupling.
    pub fn balanced_mass(p: &PhysicalParams) -> f64 {
        let g2 = p.g * p.g;
        let w2 = p.omega_r * p.omega_r + p.omega_l * p.omega_l;
        g2 * (g2 + w2) / (2.0 * p.c * p.c * w2 * p.delta)
    }

    /// Lower and upper dark-to-bright gaps at large detuning: ((g^2 + omega^2)/delta, delta).
    pub fn large_detuning_gaps(p: &PhysicalParams) -> (f64, f64) {
        let s = p.g * p.g + p.omega_r * p.omega_r + p.omega_l * p.omega_l;
        (s / p.delta.abs(), p.delta.abs())
    }
}

/// Effective mass; diverges when the curvature vanishes (zero detuning).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveMass {
    Finite(f64),
    Infinite,
}

impl EffectiveMass {
    pub fn value(self) -> f64 {
        match self {
            EffectiveMass::Finite(m) => m,
            EffectiveMass::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for EffectiveMass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EffectiveMass::Finite(m) => s.serialize_f64(*m),
            EffectiveMass::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolaritonSummary {
    pub v_group: f64,
    pub m_eff: EffectiveMass,
    /// Second derivative of the dark dispersion at k = 0.
    pub curvature: f64,
    pub field_labels: Vec<String>,
    pub dark_composition: Vec<C64>,
    pub gap_upper: f64,
    pub gap_lower: f64,
    pub photonic_fraction: f64,
}

/// Detuning below which the dark-branch curvature is treated as zero.
const MASS_DELTA_THRESHOLD: f64 = 1e-9;

/// Dark-branch eigenvalues at the requested momenta, following the branch by
/// maximal overlap with the k = 0 dark vector. Meant for small |k|.
pub fn dark_dispersion(p: &PhysicalParams, scheme: Scheme, ks: &[f64]) -> Result<Vec<C64>> {
    let e0 = eigen(&scheme_matrix(scheme, p, 0.0)?)?;
    let vecs0: Vec<Vec<C64>> = (0..e0.values.len())
        .map(|j| e0.vectors.column(j).iter().copied().collect())
        .collect();
    let dark = &vecs0[dark_index(scheme, &e0.values, &vecs0)];
    ks.iter()
        .map(|&k| {
            let e = eigen(&scheme_matrix(scheme, p, k)?)?;
            let best = (0..e.values.len())
                .max_by(|&a, &b| {
                    let va: Vec<C64> = e.vectors.column(a).iter().copied().collect();
                    let vb: Vec<C64> = e.vectors.column(b).iter().copied().collect();
                    overlap(dark, &va).total_cmp(&overlap(dark, &vb))
                })
                .expect("non-empty spectrum");
            Ok(e.values[best])
        })
        .collect()
}

/// Distances from the dark eigenvalue to the nearest branch above and below
/// it (real parts) at k = 0.
pub fn gaps_at_zero(eigenvalues: &[C64], dark: usize) -> (f64, f64) {
    let d = eigenvalues[dark].re;
    let mut upper = f64::INFINITY;
    let mut lower = f64::INFINITY;
    for (i, e) in eigenvalues.iter().enumerate() {
        if i == dark {
            continue;
        }
        let gap = e.re - d;
        if gap >= 0.0 {
            upper = upper.min(gap);
        } else {
            lower = lower.min(-gap);
        }
    }
    (upper, lower)
}

/// Slope, curvature, composition and gaps of the dark branch.
///
/// Derivatives use 5-point central differences at k = 0 with step
/// `h = 1e-3 min(g^2 + omega^2, gap) / c`, where `gap` is the smaller
/// dark-to-bright gap at k = 0. With unbalanced controls at large detuning
/// one bright branch sits only ~g^2/delta away, so the gap sets the scale.
pub fn polariton_summary(b: &BandStructure, p: &PhysicalParams) -> Result<PolaritonSummary> {
    let v = p.validate_dark()?;
    let s = p.g * p.g + v.omega_total * v.omega_total;
    let zp = b.at_zero();
    let (gap_upper, gap_lower) = gaps_at_zero(&zp.eigenvalues, b.dark_branch);
    let h = 1e-3 * s.min(gap_upper).min(gap_lower) / p.c;
    let ks = [-2.0 * h, -h, 0.0, h, 2.0 * h];
    let e: Vec<f64> = dark_dispersion(p, b.scheme, &ks)?.iter().map(|z| z.re).collect();
    let v_group = (e[0] - 8.0 * e[1] + 8.0 * e[3] - e[4]) / (12.0 * h);
    let curvature = (-e[0] + 16.0 * e[1] - 30.0 * e[2] + 16.0 * e[3] - e[4]) / (12.0 * h * h);
    let m_eff = if p.delta.abs() < MASS_DELTA_THRESHOLD * s.sqrt() {
        EffectiveMass::Infinite
    } else {
        EffectiveMass::Finite(1.0 / curvature)
    };

    let dark = &zp.vectors[b.dark_branch];
    let photonic_fraction = b.scheme.photonic_indices().iter().map(|&i| dark[i].norm_sqr()).sum();
    Ok(PolaritonSummary {
        v_group,
        m_eff,
        curvature,
        field_labels: b.field_labels.clone(),
        dark_composition: dark.clone(),
        gap_upper,
        gap_lower,
        photonic_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::grid::MomentumGrid;
    use crate::spectra::band_structure;

    fn summary(p: PhysicalParams, scheme: Scheme) -> PolaritonSummary {
        let grid = MomentumGrid::symmetric(1e-3, 5).unwrap();
        let b = band_structure(&p, &grid, scheme, Exec::Sequential).unwrap();
        polariton_summary(&b, &p).unwrap()
    }

    #[test]
    fn formula_values() {
        assert_eq!(formulas::eit_mass(&PhysicalParams::eit(1.0, 1.0, 1.0)), 4.0);
        let bal = PhysicalParams::stationary(1.0, 0.5f64.sqrt(), 0.5f64.sqrt(), 1.0);
        assert!((formulas::balanced_mass(&bal) - 1.0).abs() < 1e-15);
        let u = formulas::stationary_speed(&PhysicalParams::stationary(1.0, 2.0, 1.0, 3.0));
        assert_eq!(u, 0.5);
    }

    #[test]
    fn eit_half_speed_at_equal_couplings() {
        let s = summary(PhysicalParams::eit(1.0, 1.0, 5.0), Scheme::Eit);
        assert!((s.v_group - 0.5).abs() < 1e-9);
        assert!((s.photonic_fraction - 0.5).abs() < 1e-10);
    }

    #[test]
    fn eit_mass_matches_formula() {
        let p = PhysicalParams::eit(1.0, 1.0, 1.0);
        let s = summary(p, Scheme::Eit);
        assert!((s.m_eff.value() - 4.0).abs() / 4.0 < 1e-3, "{:?}", s.m_eff);
    }

    #[test]
    fn balanced_mass_matches_formula() {
        let w = 0.5f64.sqrt();
        let p = PhysicalParams::stationary(1.0, w, w, 1.0);
        let s = summary(p, Scheme::Stationary);
        assert!(s.v_group.abs() < 1e-9);
        assert!((s.m_eff.value() - 1.0).abs() < 1e-3, "{:?}", s.m_eff);
    }

    #[test]
    fn unbalanced_stationary_speed() {
        let p = PhysicalParams::stationary(1.0, 2.0, 1.0, 3.0);
        let s = summary(p, Scheme::Stationary);
        assert!((s.v_group - 0.5).abs() / 0.5 < 1e-6);
    }

    #[test]
    fn zero_detuning_gives_infinite_mass_and_symmetric_gaps() {
        let s = summary(PhysicalParams::eit(1.0, 1.0, 0.0), Scheme::Eit);
        assert_eq!(s.m_eff, EffectiveMass::Infinite);
        assert!((s.gap_upper - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.gap_lower - 2f64.sqrt()).abs() < 1e-12);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"m_eff\":\"infinite\""));
    }

    #[test]
    fn zero_controls_rejected() {
        let p = PhysicalParams::eit(1.0, 0.0, 1.0);
        let grid = MomentumGrid::symmetric(1e-3, 5).unwrap();
        let b = band_structure(&p, &grid, Scheme::Eit, Exec::Sequential).unwrap();
        assert!(polariton_summary(&b, &p).is_err());
    }
}
