//! Eigenstructure of the EIT (3-field) and stationary-light (5-field)
//! polariton systems.

mod adiabatic;
mod bands;
mod loss;
mod matrices;
mod pm_basis;
mod summary;

pub use adiabatic::{adiabaticity_check, AdiabaticSample, AdiabaticityReport, InteractionScale, GAP_FRACTION};
pub use bands::{band_structure, BandPoint, BandStructure};
pub use loss::{loss_spectrum, loss_window_comparison, LossComparison, LossSpectrum};
pub use matrices::{coupling_matrix, eit_matrix, scheme_matrix, stationary_matrix, Scheme};
pub use pm_basis::{antisymmetric_sector_matrix, symmetric_sector_matrix, PmBasis};
pub use summary::{
    dark_dispersion, formulas, gaps_at_zero, polariton_summary, EffectiveMass, PolaritonSummary,
};
