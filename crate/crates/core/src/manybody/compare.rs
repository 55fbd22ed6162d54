use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;

use super::correlation::CorrelationData;
use super::lanczos::LanczosOptions;
use super::lattice::{Interaction, LatticeSpec};
use super::observables::ground_state;

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub vdw_spec: LatticeSpec,
    pub contact_spec: LatticeSpec,
    pub vdw_energy: f64,
    pub contact_energy: f64,
    pub vdw_g2: CorrelationData,
    pub contact_g2: CorrelationData,
    /// Largest |g2_vdw(r) - g2_contact(r)| over common separations.
    pub sup_distance: f64,
}

/// Ground-state g2 of a van der Waals tail model next to a contact (or
/// hard-core) model at the same size and particle number.
pub fn vdw_vs_contact_comparison(
    vdw: &LatticeSpec,
    contact: &LatticeSpec,
    opts: &LanczosOptions,
    exec: Exec,
) -> Result<ComparisonReport> {
    match vdw.interaction {
        Interaction::VdWTail { cutoff_sites, .. } if cutoff_sites >= 3 => {}
        Interaction::VdWTail { .. } => return Err(Error::validation("cutoff_sites", "must be >= 3")),
        _ => return Err(Error::validation("interaction", "first spec must be a VdWTail model")),
    }
    if matches!(contact.interaction, Interaction::VdWTail { .. }) {
        return Err(Error::validation("interaction", "second spec must be Contact or HardCore"));
    }
    if vdw.n_sites != contact.n_sites || vdw.n_bosons != contact.n_bosons || vdw.boundary != contact.boundary {
        return Err(Error::validation("spec", "both models need the same sites, bosons and boundary"));
    }
    let a = ground_state(vdw, opts, exec)?;
    let b = ground_state(contact, opts, exec)?;
    let sup_distance = a
        .g2
        .values
        .iter()
        .zip(&b.g2.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        vdw_spec: *vdw,
        contact_spec: *contact,
        vdw_energy: a.energy,
        contact_energy: b.energy,
        vdw_g2: a.g2,
        contact_g2: b.g2,
        sup_distance,
    })
}
