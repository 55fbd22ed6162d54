//! Time-domain evolution of the five coupled envelopes (E_R, E_L, S, P_R, P_L).

mod protocol;
mod schedule;
mod slow_light;
mod state;
mod stepper;

pub use protocol::{
    run_plan, run_protocol, OutputEnvelope, ProtocolOptions, ProtocolPlan, ProtocolReport, StageSummary,
    TraceRow,
};
pub use schedule::{ControlSchedule, Profile, Shape, Stage, StageFlag};
pub use slow_light::{slow_light_delay, SlowLightReport};
pub use state::{dark_vectors, Loading, MultiFieldState, PulseSpec, FIELD_LABELS};
pub use stepper::{dt_max, step, Propagator};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Spin-wave weight of the dark polariton and the factor g^4 / omega^4 that
/// rescales the Rydberg interaction between dark polaritons.
pub fn dark_fraction_and_coupling_scale(p: &PhysicalParams) -> Result<(f64, f64)> {
    let w = p.omega_total();
    if !(w > 0.0) {
        return Err(Error::NoDarkState);
    }
    let (g2, w2) = (p.g * p.g, w * w);
    Ok((g2 / (g2 + w2), (g2 / w2) * (g2 / w2)))
}
