//! Effective 1D interacting-boson models: lattice exact diagonalization,
//! Lieb-Liniger energies from the Bethe ansatz, Tonks-Girardeau correlations
//! and Luttinger-parameter fits.
//!
//! Lattice conventions: hopping `J`, unit spacing, so the continuum mass is
//! `m = 1 / (2 J)` and a contact `U` corresponds to `gamma = U / (2 J filling)`.

mod bethe;
mod compare;
mod correlation;
mod hamiltonian;
mod lanczos;
mod lattice;
mod observables;

pub use bethe::{lieb_liniger_energy, lieb_liniger_table, BetheOptions, LiebLinigerEnergy};
pub use compare::{vdw_vs_contact_comparison, ComparisonReport};
pub use correlation::{
    fit_luttinger_k, tg_correlation, tg_g2, CorrelationData, FitModel, FitOptions, FitWindow,
    LuttingerFit,
};
pub use hamiltonian::{build_hamiltonian, SparseHamiltonian};
pub use lanczos::{lowest_eigenpair, EigenPair, LanczosOptions};
pub use lattice::{Basis, Boundary, Interaction, LatticeSpec, DEFAULT_HILBERT_CAP};
pub use observables::{distance_averaged_g2, free_fermion_energy, ground_state, GroundStateResult};

/// Lieb-Liniger coupling matched to a contact lattice model.
pub fn lattice_gamma(u: f64, hopping: f64, filling: f64) -> f64 {
    u / (2.0 * hopping * filling)
}
