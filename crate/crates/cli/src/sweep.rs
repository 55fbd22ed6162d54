//! Parameter sweeps over a base config, one CSV row per grid point.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use polariton_core::{Exec, RunConfig};

use crate::failure::{Failure, Outcome};
use crate::jsonpath::{leaf, set_number};
use crate::range::Range;
use crate::runs::{dark_summary, default_scheme, run_protocol_config, write_text, ScheduleInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Dispersion,
    Protocol,
}

impl Target {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Target::Dispersion => &["v_group", "m_eff", "gap_upper", "gap_lower", "photonic_fraction"],
            Target::Protocol => &["retrieval_efficiency", "max_norm_deviation", "stored_norm", "right_moving_fraction"],
        }
    }
}

/// `path[+path...]=range`; all paths on one axis take the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub paths: Vec<String>,
    pub range: Range,
}

impl FromStr for Axis {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| Failure::validation(format!("axis `{s}`: expected path=start:stop:lin|log:count")))?;
        let paths: Vec<String> = lhs.split('+').map(|p| p.trim().to_string()).collect();
        if paths.iter().any(|p| p.is_empty()) {
            return Err(Failure::validation(format!("axis `{s}`: empty field path")));
        }
        Ok(Self {
            paths,
            range: rhs.parse()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRun {
    pub target: Target,
    /// The run config, with the schedule under `schedule` for protocol sweeps.
    pub base: Value,
    pub axes: Vec<Axis>,
    pub out: String,
}

impl SweepRun {
    pub fn new(config: &RunConfig, schedule: Option<&ScheduleInput>, target: Target, axes: Vec<Axis>, out: String) -> Outcome<Self> {
        let mut base = serde_json::to_value(config).map_err(|e| Failure::validation(e.to_string()))?;
        match (target, schedule) {
            (Target::Protocol, Some(s)) => {
                base["schedule"] = serde_json::to_value(s).map_err(|e| Failure::validation(e.to_string()))?;
            }
            (Target::Protocol, None) => return Err(Failure::validation("protocol sweeps need --schedule")),
            (Target::Dispersion, _) => {}
        }
        let run = Self { target, base, axes, out };
        // fail early on bad paths, even when a range is empty
        let mut probe = run.base.clone();
        for axis in &run.axes {
            for p in &axis.paths {
                set_number(&mut probe, p, 1.0)?;
            }
        }
        Ok(run)
    }

    fn header(&self) -> Vec<String> {
        let leaves: Vec<&str> = self.axes.iter().map(|a| leaf(&a.paths[0])).collect();
        let mut cols: Vec<String> = self
            .axes
            .iter()
            .zip(&leaves)
            .map(|(a, l)| {
                if leaves.iter().filter(|x| *x == l).count() > 1 {
                    a.paths[0].clone()
                } else {
                    l.to_string()
                }
            })
            .collect();
        cols.extend(self.target.columns().iter().map(|c| c.to_string()));
        cols
    }

    /// Cartesian product of the axes, first axis slowest.
    fn points(&self) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = vec![vec![]];
        for axis in &self.axes {
            let vals = axis.range.values();
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        pts
    }

    fn evaluate(&self, point: &[f64]) -> Outcome<Vec<String>> {
        let mut doc = self.base.clone();
        for (axis, &v) in self.axes.iter().zip(point) {
            for p in &axis.paths {
                set_number(&mut doc, p, v)?;
            }
        }
        let schedule = doc.as_object_mut().and_then(|o| o.remove("schedule"));
        let config: RunConfig =
            serde_json::from_value(doc).map_err(|e| Failure::validation(format!("swept config: {e}")))?;
        let num = |v: f64| format!("{v:e}");
        let values = match self.target {
            Target::Dispersion => {
                let p = config.params;
                let s = dark_summary(&p, default_scheme(&p))?;
                vec![
                    num(s.v_group),
                    num(s.m_eff.value()),
                    num(s.gap_upper),
                    num(s.gap_lower),
                    num(s.photonic_fraction),
                ]
            }
            Target::Protocol => {
                let schedule: ScheduleInput = serde_json::from_value(schedule.unwrap_or(Value::Null))
                    .map_err(|e| Failure::validation(format!("swept schedule: {e}")))?;
                let r = run_protocol_config(&config, &schedule, Exec::Sequential)?.report;
                vec![
                    num(r.retrieval_efficiency),
                    num(r.max_norm_deviation),
                    num(r.stored_norm),
                    num(r.right_moving_fraction),
                ]
            }
        };
        Ok(point.iter().map(|&v| num(v)).chain(values).collect())
    }

    pub fn execute(&self, out_dir: &Path, exec: Exec) -> Outcome<Vec<String>> {
        let points = self.points();
        let rows = exec.try_map(&points, |p| self.evaluate(p))?;
        let mut csv = self.header().join(",");
        csv.push('\n');
        for row in rows {
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        Ok(vec![write_text(out_dir, &self.out, &csv)?])
    }
}
