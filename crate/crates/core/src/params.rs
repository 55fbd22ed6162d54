//! Physical parameters, unit conventions and the JSON run-config schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::propagation::PulseSpec;

/// Unit convention shared by every operation in one run.
///
/// `Dimensionless` measures frequencies in units of the collective coupling g,
/// lengths in c/g and times in 1/g, with c = 1. `Physical` means the caller
/// supplies SI-derived values; the equations are unchanged, only the tag
/// differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Dimensionless,
    Physical,
}

/// Couplings, detuning, decay and light speed.
///
/// A single detuning `delta` is used for both probe transitions. `gamma_e` is
/// a phenomenological decay of the intermediate-state fields; it enters the
/// coupling matrices as `delta - i gamma_e` on the P-field diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub g: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    pub delta: f64,
    pub c: f64,
    #[serde(default)]
    pub gamma_e: f64,
}

impl PhysicalParams {
    /// Single-control EIT parameters (omega_L = 0).
    pub fn eit(g: f64, omega: f64, delta: f64) -> Self {
        Self {
            g,
            omega_r: omega,
            omega_l: 0.0,
            delta,
            c: 1.0,
            gamma_e: 0.0,
        }
    }

    pub fn stationary(g: f64, omega_r: f64, omega_l: f64, delta: f64) -> Self {
        Self {
            g,
            omega_r,
            omega_l,
            delta,
            c: 1.0,
            gamma_e: 0.0,
        }
    }

    pub fn with_gamma(mut self, gamma_e: f64) -> Self {
        self.gamma_e = gamma_e;
        self
    }

    pub fn with_controls(mut self, omega_r: f64, omega_l: f64) -> Self {
        self.omega_r = omega_r;
        self.omega_l = omega_l;
        self
    }

    pub fn omega_total(&self) -> f64 {
        self.omega_r.hypot(self.omega_l)
    }

    /// Check the sign and finiteness rules without requiring a dark state.
    pub fn validate(&self) -> Result<ValidatedParams> {
        for (name, v) in [
            ("g", self.g),
            ("omega_R", self.omega_r),
            ("omega_L", self.omega_l),
            ("delta", self.delta),
            ("c", self.c),
            ("gamma_e", self.gamma_e),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(name, format!("must be finite, got {v}")));
            }
        }
        if self.g <= 0.0 {
            return Err(Error::validation("g", format!("must be > 0, got {}", self.g)));
        }
        if self.c <= 0.0 {
            return Err(Error::validation("c", format!("must be > 0, got {}", self.c)));
        }
        for (name, v) in [
            ("omega_R", self.omega_r),
            ("omega_L", self.omega_l),
            ("gamma_e", self.gamma_e),
        ] {
            if v < 0.0 {
                return Err(Error::validation(name, format!("must be >= 0, got {v}")));
            }
        }
        let omega_total = self.omega_total();
        let denom = self.g * self.g + omega_total * omega_total;
        Ok(ValidatedParams {
            params: *self,
            omega_total,
            atomic_fraction: self.g * self.g / denom,
        })
    }

    /// Like [`validate`](Self::validate) but also requires a dark state to exist.
    pub fn validate_dark(&self) -> Result<ValidatedParams> {
        let v = self.validate()?;
        if v.omega_total <= 0.0 {
            return Err(Error::NoDarkState);
        }
        Ok(v)
    }
}

/// Parameters that passed validation, with derived quantities attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedParams {
    pub params: PhysicalParams,
    pub omega_total: f64,
    /// Spin-wave weight of the k = 0 dark state, g^2 / (g^2 + omega_total^2).
    pub atomic_fraction: f64,
}

impl ValidatedParams {
    pub fn photonic_fraction(&self) -> f64 {
        1.0 - self.atomic_fraction
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = PhysicalParams;
    fn deref(&self) -> &PhysicalParams {
        &self.params
    }
}

/// `grid` block of the run config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub n_points: usize,
}

/// The JSON run config ingested by every CLI subcommand.
///
/// ```json
/// { "units": "dimensionless",
///   "params": { "g": 1, "omega_R": 1, "omega_L": 0, "delta": 5, "c": 1, "gamma_e": 0 },
///   "grid": { "length": 400, "n_points": 2048 } }
/// ```
///
/// `pulse`, `v_ref`, `dt` and `seed` are optional extensions used by the
/// propagation and many-body commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: UnitSystem,
    pub params: PhysicalParams,
    /// Required by the time-domain commands only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSpec>,
    /// Reference interaction energy; the dark-polariton interaction scale is
    /// `v_ref * g^4 / omega^4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("config", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes")
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        let g = self.grid.ok_or_else(|| Error::validation("grid", "missing; time-domain runs need {length, n_points}"))?;
        SpatialGrid::new(g.length, g.n_points)
    }
}
