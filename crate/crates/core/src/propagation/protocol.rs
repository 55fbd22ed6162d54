use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::PhysicalParams;
use crate::C64;

use super::schedule::{ControlSchedule, Profile, Stage, StageFlag};
use super::state::{dark_vectors, MultiFieldState, PulseSpec};
use super::stepper::{dt_max, Propagator};

/// Builder for the standard storage / hold / interaction / retrieval sequence.
///
/// Stages, in order: `load` (EIT couplings `(omega_load, 0)`), `stop` (smooth
/// ramp to the balanced point with the same total coupling), `hold`,
/// `compress` (balanced ramp down to `omega_interaction`, skipped when equal
/// to `omega_load`), `interact`, `retrieve` (ramp back to `(omega_load, 0)`,
/// flagged fast) and `output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    pub omega_load: f64,
    pub omega_interaction: f64,
    #[serde(default)]
    pub load_time: f64,
    pub ramp_time: f64,
    pub hold_time: f64,
    #[serde(default)]
    pub interaction_time: f64,
    /// Duration of the retrieval ramp; no default is implied by the physics,
    /// `None` reuses `ramp_time`.
    #[serde(default)]
    pub retrieval_time: Option<f64>,
    #[serde(default)]
    pub output_time: f64,
}

impl ProtocolPlan {
    pub fn new(omega_load: f64, ramp_time: f64, hold_time: f64) -> Self {
        Self {
            omega_load,
            omega_interaction: omega_load,
            load_time: 0.0,
            ramp_time,
            hold_time,
            interaction_time: 0.0,
            retrieval_time: None,
            output_time: 0.0,
        }
    }

    pub fn schedule(&self) -> Result<ControlSchedule> {
        let w0 = self.omega_load;
        let b0 = w0 / std::f64::consts::SQRT_2;
        let b1 = self.omega_interaction / std::f64::consts::SQRT_2;
        let c = Profile::constant;
        let mut stages = vec![
            Stage::new(self.load_time, c(w0), c(0.0)).labeled("load"),
            Stage::new(self.ramp_time, Profile::smoothstep(w0, b0), Profile::smoothstep(0.0, b0)).labeled("stop"),
            Stage::new(self.hold_time, c(b0), c(b0)).labeled("hold"),
        ];
        if b1 != b0 {
            stages.push(
                Stage::new(self.ramp_time, Profile::smoothstep(b0, b1), Profile::smoothstep(b0, b1)).labeled("compress"),
            );
        }
        stages.push(Stage::new(self.interaction_time, c(b1), c(b1)).labeled("interact"));
        stages.push(
            Stage::new(
                self.retrieval_time.unwrap_or(self.ramp_time),
                Profile::smoothstep(b1, w0),
                Profile::smoothstep(b1, 0.0),
            )
            .labeled("retrieve")
            .fast(),
        );
        stages.push(Stage::new(self.output_time, c(w0), c(0.0)).labeled("output"));
        ControlSchedule::new(stages)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    /// Requested step; defaults to the stability limit.
    pub dt: Option<f64>,
    /// Time between trace rows and boundary checks.
    pub trace_interval: f64,
    /// Width of each edge band, as a fraction of the grid.
    pub edge_fraction: f64,
    /// Largest tolerated share of the norm inside the edge bands.
    pub edge_tolerance: f64,
    pub exec: Exec,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            dt: None,
            trace_interval: 1.0,
            edge_fraction: 0.02,
            edge_tolerance: 1e-6,
            exec: Exec::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub norm: f64,
    pub photonic_fraction: f64,
    pub centroid: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub index: usize,
    pub label: Option<String>,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: u64,
    pub dt: f64,
    pub norm_start: f64,
    pub norm_end: f64,
    pub photonic_fraction_end: f64,
    pub centroid_start: f64,
    pub centroid_end: f64,
    /// For balanced holds: largest displacement of the `E_+` centroid from
    /// its position at the start of the stage.
    pub e_plus_drift: Option<f64>,
    /// For balanced holds: mean photonic fraction over the stage samples.
    pub mean_photonic_fraction: Option<f64>,
}

/// Probe envelopes of the output state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEnvelope {
    pub x: Vec<f64>,
    pub e_r: Vec<[f64; 2]>,
    pub e_l: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub dt: f64,
    pub input_norm: f64,
    pub input_photonic_norm: f64,
    /// Total norm when the retrieval stage begins.
    pub stored_norm: f64,
    pub retrieved_norm: f64,
    /// Photonic norm of the output projected onto the dark branch of the
    /// final couplings.
    pub retrieved_photonic_norm: f64,
    pub retrieval_efficiency: f64,
    /// Share of the output photonic norm carried by `E_R`.
    pub right_moving_fraction: f64,
    pub max_norm_deviation: f64,
    pub stages: Vec<StageSummary>,
    pub trace: Vec<TraceRow>,
    pub output: OutputEnvelope,
    #[serde(skip)]
    pub final_state: Option<MultiFieldState>,
}

impl ProtocolReport {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("t,norm,photonic_fraction,centroid,omega_R,omega_L\n");
        for r in &self.trace {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t, r.norm, r.photonic_fraction, r.centroid, r.omega_r, r.omega_l
            ));
        }
        s
    }

    pub fn photonic_fraction_trace(&self) -> Vec<(f64, f64)> {
        self.trace.iter().map(|r| (r.t, r.photonic_fraction)).collect()
    }

    pub fn centroid_trace(&self) -> Vec<(f64, f64)> {
        self.trace.iter().map(|r| (r.t, r.centroid)).collect()
    }

    pub fn stage(&self, label: &str) -> Option<&StageSummary> {
        self.stages.iter().find(|s| s.label.as_deref() == Some(label))
    }
}

struct Observer<'a> {
    opts: &'a ProtocolOptions,
    input_norm: f64,
    trace: Vec<TraceRow>,
    max_dev: f64,
}

impl Observer<'_> {
    fn observe(&mut self, prop: &Propagator, wr: f64, wl: f64) -> Result<MultiFieldState> {
        let st = prop.state();
        let edge = st.edge_weight(self.opts.edge_fraction);
        if edge > self.opts.edge_tolerance {
            return Err(Error::PulseAtBoundary {
                time: prop.time(),
                edge_weight: edge,
            });
        }
        let norm = st.norm();
        self.max_dev = self.max_dev.max((norm - self.input_norm).abs());
        self.trace.push(TraceRow {
            t: prop.time(),
            norm,
            photonic_fraction: st.photonic_fraction(),
            centroid: st.centroid(),
            omega_r: wr,
            omega_l: wl,
        });
        Ok(st)
    }
}

/// Photonic norm of the dark-branch projection of every Fourier mode.
fn dark_photonic_norm(prop: &Propagator, omega_r: f64, omega_l: f64, exec: Exec) -> Result<f64> {
    let dark = dark_vectors(prop.params(), omega_r, omega_l, prop.momenta(), exec)?;
    let total: f64 = prop
        .modes()
        .iter()
        .zip(&dark)
        .map(|(m, d)| {
            let a: C64 = d.iter().zip(m).map(|(u, v)| u.conj() * v).sum();
            a.norm_sqr() * (d[0].norm_sqr() + d[1].norm_sqr())
        })
        .sum();
    Ok(total * prop.grid().spacing())
}

/// Evolve `input` through every stage of `schedule`.
pub fn run_protocol(
    p: &PhysicalParams,
    schedule: &ControlSchedule,
    input: &MultiFieldState,
    opts: &ProtocolOptions,
) -> Result<ProtocolReport> {
    p.validate()?;
    let limit = dt_max(p, &input.grid, schedule.max_omega_total());
    let dt = opts.dt.unwrap_or(limit);
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, dt_max: limit });
    }
    if !(opts.trace_interval > 0.0) {
        return Err(Error::validation("trace_interval", "must be > 0"));
    }
    let mut prop = Propagator::new(input, p, opts.exec);
    let input_norm = input.norm();
    let input_photonic_norm = input.photonic_norm();
    let mut obs = Observer {
        opts,
        input_norm,
        trace: Vec::new(),
        max_dev: 0.0,
    };
    let (wr0, wl0) = schedule.sample(0.0);
    obs.observe(&prop, wr0, wl0)?;

    let retrieval_index = schedule
        .stages()
        .iter()
        .position(|s| s.label.as_deref() == Some("retrieve"))
        .or_else(|| schedule.stages().iter().rposition(|s| s.flag == StageFlag::Fast));
    let mut stored_norm = None;
    let mut stages = Vec::new();
    let mut t0 = input.time;

    for (index, stage) in schedule.stages().iter().enumerate() {
        if Some(index) == retrieval_index {
            stored_norm = Some(prop.norm());
        }
        if stage.duration == 0.0 {
            continue;
        }
        let n = (stage.duration / dt).ceil().max(1.0) as u64;
        let h = stage.duration / n as f64;
        let per_sample = ((opts.trace_interval / h).round() as u64).max(1);
        let balanced = stage.is_balanced_hold();
        let start = prop.state();
        let (bw, _) = stage.start_values();
        let c_plus0 = balanced.then(|| start.e_plus_centroid(bw, bw));
        let mut drift: f64 = 0.0;
        let mut fractions = vec![start.photonic_fraction()];
        let norm_start = start.norm();
        let centroid_start = start.centroid();
        let mut last = start;
        for s in 0..n {
            let (wr, wl) = stage.sample((s as f64 + 0.5) * h);
            prop.step(wr, wl, h);
            if (s + 1) % per_sample == 0 || s + 1 == n {
                let (wr, wl) = stage.sample((s + 1) as f64 * h);
                last = obs.observe(&prop, wr, wl)?;
                if let Some(c0) = c_plus0 {
                    drift = drift.max((last.e_plus_centroid(bw, bw) - c0).abs());
                    fractions.push(last.photonic_fraction());
                }
            }
        }
        t0 += stage.duration;
        stages.push(StageSummary {
            index,
            label: stage.label.clone(),
            t_start: t0 - stage.duration,
            t_end: t0,
            steps: n,
            dt: h,
            norm_start,
            norm_end: last.norm(),
            photonic_fraction_end: last.photonic_fraction(),
            centroid_start,
            centroid_end: last.centroid(),
            e_plus_drift: balanced.then_some(drift),
            mean_photonic_fraction: balanced.then(|| fractions.iter().sum::<f64>() / fractions.len() as f64),
        });
    }

    let final_state = prop.state();
    let (wr, wl) = schedule.stages().last().expect("non-empty").end_values();
    let retrieved_photonic_norm = if wr.hypot(wl) > 0.0 {
        dark_photonic_norm(&prop, wr, wl, opts.exec)?
    } else {
        final_state.photonic_norm()
    };
    let photonic = final_state.photonic_norm();
    let output = OutputEnvelope {
        x: final_state.grid.positions(),
        e_r: final_state.fields[0].iter().map(|z| [z.re, z.im]).collect(),
        e_l: final_state.fields[1].iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok(ProtocolReport {
        dt,
        input_norm,
        input_photonic_norm,
        stored_norm: stored_norm.unwrap_or_else(|| final_state.norm()),
        retrieved_norm: final_state.norm(),
        retrieved_photonic_norm,
        retrieval_efficiency: retrieved_photonic_norm / input_photonic_norm,
        right_moving_fraction: if photonic > 0.0 { final_state.field_norm(0) / photonic } else { 0.0 },
        max_norm_deviation: obs.max_dev,
        stages,
        trace: obs.trace,
        output,
        final_state: Some(final_state),
    })
}

/// Prepare the input pulse at the first couplings of `schedule` and run it.
pub fn run_plan(
    p: &PhysicalParams,
    grid: &crate::grid::SpatialGrid,
    schedule: &ControlSchedule,
    pulse: &PulseSpec,
    opts: &ProtocolOptions,
) -> Result<ProtocolReport> {
    let (wr, wl) = schedule.sample(0.0);
    let input = pulse.prepare(p, grid, wr, wl, opts.exec)?;
    run_protocol(p, schedule, &input, opts)
}
