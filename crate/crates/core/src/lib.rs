//! Numerical toolkit for stationary-light Rydberg polaritons.
//!
//! The crate is organised around the physics pipeline:
//!
//! - [`params`] and [`grid`]: validated physical parameters, unit tags, spatial
//!   and momentum grids, and the JSON run-config schema.
//! - [`spectra`]: 3-field EIT and 5-field stationary-light coupling matrices,
//!   band structures, dark-polariton speed/mass/gaps, loss spectra and
//!   adiabaticity checks.
//! - [`propagation`]: split-step evolution of the five coupled envelopes under
//!   time-dependent control schedules, slow-light delay and the full
//!   storage/hold/interaction/retrieval protocol.
//! - [`manybody`]: lattice exact diagonalization (contact, hard-core and
//!   van der Waals tails), Lieb-Liniger Bethe-ansatz energies, analytic
//!   Tonks-Girardeau correlations and Luttinger-parameter fits.
//! - [`phasematch`]: coplanar four-beam phase-matching geometry.
//!
//! Data-parallel inner loops (per-momentum diagonalizations, parameter sweeps,
//! sparse matrix-vector products) go through [`exec::Exec`], which runs on
//! rayon when the `parallel` feature is enabled and sequentially otherwise.
//! Results are always merged in input order.

pub mod error;
pub mod exec;
pub mod grid;
pub mod linalg;
pub mod manybody;
pub mod params;
pub mod phasematch;
pub mod propagation;
pub mod spectra;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{MomentumGrid, SpatialGrid};
pub use params::{PhysicalParams, RunConfig, UnitSystem, ValidatedParams};

pub use num_complex::Complex64 as C64;
