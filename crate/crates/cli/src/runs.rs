//! Fully resolved subcommand inputs and their execution.
//!
//! A [`ResolvedRun`] carries every input inline (config, schedule, lattice
//! spec, seeds), so the manifest snapshot alone reproduces the outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use polariton_core::grid::MomentumGrid;
use polariton_core::manybody::{
    fit_luttinger_k, ground_state, lieb_liniger_table, BetheOptions, Boundary, CorrelationData, FitModel,
    FitOptions, FitWindow, LanczosOptions, LatticeSpec, LuttingerFit,
};
use polariton_core::phasematch::{solve_collinear, solve_coplanar, verify, BeamSet, ResidualReport};
use polariton_core::propagation::{run_plan, ControlSchedule, ProtocolOptions, ProtocolPlan, ProtocolReport, PulseSpec};
use polariton_core::spectra::{
    adiabaticity_check, band_structure, loss_window_comparison, polariton_summary, AdiabaticityReport,
    InteractionScale, PolaritonSummary, Scheme,
};
use polariton_core::{Error, Exec, PhysicalParams, RunConfig};

use crate::failure::{Failure, Outcome};
use crate::range::Range;
use crate::sweep::SweepRun;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum ResolvedRun {
    Dispersion(DispersionRun),
    Protocol(ProtocolRun),
    Manybody(ManybodyRun),
    Bethe(BetheRun),
    Phasematch(PhasematchRun),
    Sweep(SweepRun),
}

impl ResolvedRun {
    pub fn name(&self) -> &'static str {
        match self {
            ResolvedRun::Dispersion(_) => "dispersion",
            ResolvedRun::Protocol(_) => "protocol",
            ResolvedRun::Manybody(_) => "manybody",
            ResolvedRun::Bethe(_) => "bethe",
            ResolvedRun::Phasematch(_) => "phasematch",
            ResolvedRun::Sweep(_) => "sweep",
        }
    }

    /// The primary output; the manifest is written next to it.
    pub fn primary_output(&self) -> &str {
        match self {
            ResolvedRun::Dispersion(r) => &r.out,
            ResolvedRun::Protocol(r) => &r.out,
            ResolvedRun::Manybody(r) => &r.out,
            ResolvedRun::Bethe(r) => &r.out,
            ResolvedRun::Phasematch(r) => &r.out,
            ResolvedRun::Sweep(r) => &r.out,
        }
    }

    /// Run and write every output below `out_dir`; returns their names.
    pub fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        match self {
            ResolvedRun::Dispersion(r) => r.execute(out_dir, exec),
            ResolvedRun::Protocol(r) => r.execute(out_dir, exec),
            ResolvedRun::Manybody(r) => r.execute(out_dir, exec),
            ResolvedRun::Bethe(r) => r.execute(out_dir, exec),
            ResolvedRun::Phasematch(r) => r.execute(out_dir),
            ResolvedRun::Sweep(r) => r.execute(out_dir, exec),
        }
    }
}

pub fn read_text(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::read(path, e))
}

pub fn write_text(out_dir: &Path, name: &str, text: &str) -> Outcome<String> {
    let path = out_dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Failure::write(parent, e))?;
    }
    std::fs::write(&path, text).map_err(|e| Failure::write(&path, e))?;
    Ok(name.to_string())
}

pub fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> Outcome<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::numerical(e.to_string()))?;
    text.push('\n');
    write_text(out_dir, name, &text)
}

/// `bands.csv` -> `bands.<suffix>`.
pub fn sibling(name: &str, suffix: &str) -> String {
    let p = PathBuf::from(name);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    let file = format!("{stem}.{suffix}");
    match p.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => dir.join(file).to_string_lossy().into_owned(),
        None => file,
    }
}

pub fn load_config(path: &Path) -> Outcome<RunConfig> {
    RunConfig::from_json(&read_text(path)?).map_err(|e| Failure::parse(path, e))
}

/// Stationary when both controls are on, EIT otherwise.
pub fn default_scheme(p: &PhysicalParams) -> Scheme {
    if p.omega_l > 0.0 {
        Scheme::Stationary
    } else {
        Scheme::Eit
    }
}

// ---------------------------------------------------------------- dispersion

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionRun {
    pub config: RunConfig,
    pub scheme: Scheme,
    pub kmin: f64,
    pub kmax: f64,
    pub points: usize,
    pub loss: bool,
    pub out: String,
}

#[derive(Serialize)]
struct DispersionSummary {
    scheme: Scheme,
    params: PhysicalParams,
    summary: Option<PolaritonSummary>,
    note: Option<String>,
}

/// Scalar dark-branch summary on a three-point grid around k = 0.
pub fn dark_summary(p: &PhysicalParams, scheme: Scheme) -> polariton_core::Result<PolaritonSummary> {
    let v = p.validate_dark()?;
    let kfit = 1e-3 * (p.g * p.g + v.omega_total * v.omega_total) / p.c;
    let bands = band_structure(p, &MomentumGrid::symmetric(kfit, 3)?, scheme, Exec::Sequential)?;
    polariton_summary(&bands, p)
}

impl DispersionRun {
    pub fn default_kmax(p: &PhysicalParams) -> f64 {
        (p.g * p.g + p.omega_total().powi(2)).sqrt() / p.c
    }

    fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        let p = self.config.params;
        p.validate()?;
        let grid = MomentumGrid::window(self.kmin, self.kmax, self.points)?;
        let bands = band_structure(&p, &grid, self.scheme, exec)?;
        let mut outputs = vec![write_text(out_dir, &self.out, &bands.to_csv())?];

        let (summary, note) = match p.validate_dark() {
            Ok(_) => (Some(polariton_summary(&bands, &p)?), None),
            Err(e @ Error::NoDarkState) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        };
        let report = DispersionSummary {
            scheme: self.scheme,
            params: p,
            summary,
            note,
        };
        outputs.push(write_json(out_dir, &sibling(&self.out, "summary.json"), &report)?);

        if self.loss {
            let cmp = loss_window_comparison(&p, &grid, exec)?;
            outputs.push(write_text(out_dir, &sibling(&self.out, "loss.csv"), &cmp.to_csv())?);
        }
        Ok(outputs)
    }
}

// ------------------------------------------------------------------ protocol

/// schedule.json is either a list of stages or a protocol plan object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleInput {
    Stages(ControlSchedule),
    Plan(ProtocolPlan),
}

impl ScheduleInput {
    pub fn from_json(path: &Path) -> Outcome<Self> {
        let text = read_text(path)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Failure::parse(path, e))?;
        let parsed = if value.is_array() {
            serde_json::from_value(value).map(ScheduleInput::Stages)
        } else {
            serde_json::from_value(value).map(ScheduleInput::Plan)
        };
        parsed.map_err(|e| Failure::parse(path, e))
    }

    pub fn schedule(&self) -> polariton_core::Result<ControlSchedule> {
        match self {
            ScheduleInput::Stages(s) => Ok(s.clone()),
            ScheduleInput::Plan(p) => p.schedule(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub config: RunConfig,
    pub schedule: ScheduleInput,
    pub out: String,
    #[serde(default)]
    pub trace: Option<String>,
}

#[derive(Serialize)]
struct ProtocolOutput<'a> {
    pulse: PulseSpec,
    schedule: &'a ControlSchedule,
    report: &'a ProtocolReport,
    adiabaticity: AdiabaticityReport,
}

pub struct ProtocolResult {
    pub pulse: PulseSpec,
    pub schedule: ControlSchedule,
    pub report: ProtocolReport,
    pub adiabaticity: AdiabaticityReport,
}

pub fn run_protocol_config(config: &RunConfig, input: &ScheduleInput, exec: Exec) -> Outcome<ProtocolResult> {
    let p = config.params;
    p.validate()?;
    let grid = config.spatial_grid()?;
    let schedule = input.schedule()?;
    let scale = InteractionScale::Rydberg {
        v_ref: config.v_ref.unwrap_or(0.0),
    };
    let adiabaticity = adiabaticity_check(&schedule, &p, scale, Scheme::Stationary, 201)?;
    let pulse = match config.pulse {
        Some(pulse) => pulse,
        None => {
            // centred pulse whose bandwidth sits well inside the transparency window
            let window = adiabaticity.samples[0].gap_lower / p.c;
            PulseSpec::new(0.0, PulseSpec::width_for_window(window))
        }
    };
    let opts = ProtocolOptions {
        dt: config.dt,
        exec,
        ..ProtocolOptions::default()
    };
    let report = run_plan(&p, &grid, &schedule, &pulse, &opts)?;
    Ok(ProtocolResult {
        pulse,
        schedule,
        report,
        adiabaticity,
    })
}

impl ProtocolRun {
    fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        let r = run_protocol_config(&self.config, &self.schedule, exec)?;
        let out = ProtocolOutput {
            pulse: r.pulse,
            schedule: &r.schedule,
            report: &r.report,
            adiabaticity: r.adiabaticity,
        };
        let mut outputs = vec![write_json(out_dir, &self.out, &out)?];
        if let Some(trace) = &self.trace {
            outputs.push(write_text(out_dir, trace, &r.report.trace_csv())?);
        }
        Ok(outputs)
    }
}

// ------------------------------------------------------------------ manybody

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "energy")]
    Energy,
    #[serde(rename = "g2")]
    G2,
    #[serde(rename = "K")]
    K,
    #[serde(rename = "density")]
    Density,
}

impl Observable {
    pub fn parse_list(s: &str) -> Outcome<Vec<Self>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let o = match item {
                "energy" => Observable::Energy,
                "g2" => Observable::G2,
                "K" | "k" => Observable::K,
                "density" => Observable::Density,
                other => {
                    return Err(Failure::validation(format!(
                        "unknown observable `{other}` (expected energy, g2, K, density)"
                    )))
                }
            };
            if !out.contains(&o) {
                out.push(o);
            }
        }
        if out.is_empty() {
            return Err(Failure::validation("no observables requested"));
        }
        Ok(out)
    }
}

/// Lattice spec file: the spec itself plus optional solver settings.
#[derive(Debug, Clone, Deserialize)]
pub struct LatticeFile {
    #[serde(flatten)]
    pub spec: LatticeSpec,
    #[serde(default)]
    pub fit: Option<FitOptions>,
    #[serde(default)]
    pub lanczos: Option<LanczosOptions>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManybodyRun {
    pub spec: LatticeSpec,
    pub observables: Vec<Observable>,
    /// `None` picks the default for the boundary condition at run time.
    pub fit: Option<FitOptions>,
    pub lanczos: LanczosOptions,
    pub out: String,
}

#[derive(Serialize)]
struct ManybodyOutput {
    spec: LatticeSpec,
    dimension: usize,
    seed: u64,
    residual: f64,
    matvecs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g2: Option<CorrelationData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    luttinger: Option<LuttingerOutput>,
}

#[derive(Serialize)]
struct LuttingerOutput {
    options: FitOptions,
    fit: LuttingerFit,
}

/// Harmonic fit over `[1/(2 rho0), r_max]` on rings; the standard envelope
/// window on open chains.
pub fn default_fit(spec: &LatticeSpec, corr: &CorrelationData) -> FitOptions {
    match spec.boundary {
        Boundary::Periodic => FitOptions {
            window: FitWindow {
                r_min: 0.5 / corr.rho0,
                r_max: corr.r.last().copied().unwrap_or(0.0),
            },
            min_extrema: 2,
            model: FitModel::Harmonic,
        },
        Boundary::Open => FitOptions::standard(corr),
    }
}

impl ManybodyRun {
    fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        let gs = ground_state(&self.spec, &self.lanczos, exec)?;
        let wants = |o| self.observables.contains(&o);
        let luttinger = if wants(Observable::K) {
            let options = self.fit.unwrap_or_else(|| default_fit(&self.spec, &gs.g2));
            let fit = fit_luttinger_k(&gs.g2, &options)?;
            Some(LuttingerOutput { options, fit })
        } else {
            None
        };
        let out = ManybodyOutput {
            spec: self.spec,
            dimension: gs.dimension,
            seed: self.lanczos.seed,
            residual: gs.residual,
            matvecs: gs.matvecs,
            energy: wants(Observable::Energy).then_some(gs.energy),
            density: wants(Observable::Density).then(|| gs.density.clone()),
            g2: wants(Observable::G2).then(|| gs.g2.clone()),
            luttinger,
        };
        Ok(vec![write_json(out_dir, &self.out, &out)?])
    }
}

// --------------------------------------------------------------------- bethe

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetheRun {
    pub gamma_grid: Range,
    pub options: BetheOptions,
    pub out: String,
}

impl BetheRun {
    fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        let gammas = self.gamma_grid.values();
        let table = lieb_liniger_table(&gammas, &self.options, exec)?;
        let mut csv = String::from("gamma,lambda,e,error_estimate\n");
        for row in &table {
            csv.push_str(&format!("{:e},{:e},{:e},{:e}\n", row.gamma, row.lambda, row.e, row.error_estimate));
        }
        Ok(vec![write_text(out_dir, &self.out, &csv)?])
    }
}

// ---------------------------------------------------------------- phasematch

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhasematchRun {
    pub lambda_probe: f64,
    pub lambda_control: f64,
    pub out: String,
}

#[derive(Serialize)]
struct BeamSolution {
    beams: BeamSet,
    residuals: ResidualReport,
}

#[derive(Serialize)]
struct CollinearStatus {
    feasible: bool,
    reason: Option<String>,
}

#[derive(Serialize)]
struct PhasematchOutput {
    lambda_probe: f64,
    lambda_control: f64,
    solutions: Vec<BeamSolution>,
    collinear: CollinearStatus,
}

impl PhasematchRun {
    fn execute(&self, out_dir: &Path) -> Outcome<Vec<String>> {
        let sets = solve_coplanar(self.lambda_probe, self.lambda_control)?;
        let solutions = sets
            .into_iter()
            .map(|beams| Ok(BeamSolution { residuals: verify(&beams)?, beams }))
            .collect::<polariton_core::Result<Vec<_>>>()?;
        let collinear = match solve_collinear(self.lambda_probe, self.lambda_control) {
            Ok(_) => CollinearStatus {
                feasible: true,
                reason: None,
            },
            Err(e) => CollinearStatus {
                feasible: false,
                reason: Some(e.to_string()),
            },
        };
        let out = PhasematchOutput {
            lambda_probe: self.lambda_probe,
            lambda_control: self.lambda_control,
            solutions,
            collinear,
        };
        Ok(vec![write_json(out_dir, &self.out, &out)?])
    }
}
