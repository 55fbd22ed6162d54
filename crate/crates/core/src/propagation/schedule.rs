use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Constant,
    Linear,
    /// `3s^2 - 2s^3`: zero slope at both ends.
    Smoothstep,
}

/// Time profile of one control coupling within a stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub shape: Shape,
    pub from: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
}

impl Profile {
    pub fn constant(v: f64) -> Self {
        Self {
            shape: Shape::Constant,
            from: v,
            to: None,
        }
    }

    pub fn smoothstep(from: f64, to: f64) -> Self {
        Self {
            shape: Shape::Smoothstep,
            from,
            to: Some(to),
        }
    }

    pub fn linear(from: f64, to: f64) -> Self {
        Self {
            shape: Shape::Linear,
            from,
            to: Some(to),
        }
    }

    pub fn end(&self) -> f64 {
        match self.shape {
            Shape::Constant => self.from,
            _ => self.to.unwrap_or(self.from),
        }
    }

    /// Value at fractional stage time `s` in [0, 1].
    pub fn at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let w = match self.shape {
            Shape::Constant => return self.from,
            Shape::Linear => s,
            Shape::Smoothstep => s * s * (3.0 - 2.0 * s),
        };
        self.from + (self.end() - self.from) * w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageFlag {
    #[default]
    Adiabatic,
    /// May start discontinuously from the previous stage.
    Fast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub duration: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: Profile,
    #[serde(rename = "omega_L")]
    pub omega_l: Profile,
    #[serde(default)]
    pub flag: StageFlag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Stage {
    pub fn new(duration: f64, omega_r: Profile, omega_l: Profile) -> Self {
        Self {
            duration,
            omega_r,
            omega_l,
            flag: StageFlag::Adiabatic,
            label: None,
        }
    }

    pub fn fast(mut self) -> Self {
        self.flag = StageFlag::Fast;
        self
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn start_values(&self) -> (f64, f64) {
        (self.omega_r.from, self.omega_l.from)
    }

    pub fn end_values(&self) -> (f64, f64) {
        (self.omega_r.end(), self.omega_l.end())
    }

    pub fn sample(&self, tau: f64) -> (f64, f64) {
        let s = if self.duration > 0.0 { tau / self.duration } else { 1.0 };
        (self.omega_r.at(s), self.omega_l.at(s))
    }

    /// True when both couplings are constant and equal.
    pub fn is_balanced_hold(&self) -> bool {
        let (r0, l0) = self.start_values();
        let (r1, l1) = self.end_values();
        r0 == r1 && l0 == l1 && r0 == l0
    }
}

/// Ordered control stages; serialized as a bare JSON list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Stage>", into = "Vec<Stage>")]
pub struct ControlSchedule {
    stages: Vec<Stage>,
}

impl TryFrom<Vec<Stage>> for ControlSchedule {
    type Error = Error;
    fn try_from(stages: Vec<Stage>) -> Result<Self> {
        ControlSchedule::new(stages)
    }
}

impl From<ControlSchedule> for Vec<Stage> {
    fn from(s: ControlSchedule) -> Vec<Stage> {
        s.stages
    }
}

const CONTINUITY_TOL: f64 = 1e-12;

impl ControlSchedule {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::validation("schedule", "needs at least one stage"));
        }
        for (i, st) in stages.iter().enumerate() {
            if !(st.duration.is_finite() && st.duration >= 0.0) {
                return Err(Error::validation(
                    format!("schedule[{i}].duration"),
                    format!("must be finite and >= 0, got {}", st.duration),
                ));
            }
            for (name, prof) in [("omega_R", &st.omega_r), ("omega_L", &st.omega_l)] {
                for v in [prof.from, prof.end()] {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::validation(
                            format!("schedule[{i}].{name}"),
                            format!("couplings must be finite and >= 0, got {v}"),
                        ));
                    }
                }
            }
            if i > 0 && st.flag != StageFlag::Fast {
                let (r0, l0) = stages[i - 1].end_values();
                let (r1, l1) = st.start_values();
                let scale = r0.abs().max(l0.abs()).max(1.0);
                if (r0 - r1).abs() > CONTINUITY_TOL * scale || (l0 - l1).abs() > CONTINUITY_TOL * scale {
                    return Err(Error::validation(
                        format!("schedule[{i}]"),
                        format!(
                            "controls jump from ({r0}, {l0}) to ({r1}, {l1}); flag the stage \"fast\" to allow it"
                        ),
                    ));
                }
            }
        }
        Ok(Self { stages })
    }

    pub fn constant(duration: f64, omega_r: f64, omega_l: f64) -> Self {
        Self::new(vec![Stage::new(
            duration,
            Profile::constant(omega_r),
            Profile::constant(omega_l),
        )])
        .expect("constant schedule is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("schedule", e.to_string()))
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn total_duration(&self) -> f64 {
        self.stages.iter().map(|s| s.duration).sum()
    }

    /// `(start, end)` times of every stage.
    pub fn stage_bounds(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        self.stages
            .iter()
            .map(|s| {
                let b = (t, t + s.duration);
                t += s.duration;
                b
            })
            .collect()
    }

    /// Couplings at time `t`; stages are half-open `[start, end)`, and times past
    /// the end return the final values.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        let mut start = 0.0;
        for st in &self.stages {
            if t < start + st.duration {
                return st.sample(t - start);
            }
            start += st.duration;
        }
        self.stages.last().expect("non-empty").end_values()
    }

    pub fn max_omega_total(&self) -> f64 {
        self.stages
            .iter()
            .flat_map(|s| {
                let (r0, l0) = s.start_values();
                let (r1, l1) = s.end_values();
                // both profile families are monotone, so the extremes sit at the ends
                [r0.hypot(l0), r1.hypot(l1), r0.max(r1).hypot(l0.max(l1))]
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_stage() -> ControlSchedule {
        ControlSchedule::new(vec![
            Stage::new(10.0, Profile::constant(3.0), Profile::constant(0.0)),
            Stage::new(5.0, Profile::smoothstep(3.0, 1.0), Profile::linear(0.0, 1.0)),
        ])
        .unwrap()
    }

    #[test]
    fn sampling() {
        let s = two_stage();
        assert_eq!(s.sample(0.0), (3.0, 0.0));
        assert_eq!(s.sample(9.999), (3.0, 0.0));
        assert_eq!(s.sample(10.0), (3.0, 0.0));
        let (r, l) = s.sample(12.5);
        assert!((r - 2.0).abs() < 1e-15);
        assert!((l - 0.5).abs() < 1e-15);
        assert_eq!(s.sample(100.0), (1.0, 1.0));
        assert_eq!(s.total_duration(), 15.0);
        assert_eq!(s.stage_bounds(), vec![(0.0, 10.0), (10.0, 15.0)]);
    }

    #[test]
    fn discontinuity_needs_fast_flag() {
        let jump = vec![
            Stage::new(1.0, Profile::constant(3.0), Profile::constant(0.0)),
            Stage::new(1.0, Profile::constant(0.0), Profile::constant(3.0)),
        ];
        assert!(ControlSchedule::new(jump.clone()).is_err());
        let mut ok = jump;
        ok[1] = ok[1].clone().fast();
        assert!(ControlSchedule::new(ok).is_ok());
    }

    #[test]
    fn rejects_negative_duration() {
        let bad = vec![Stage::new(-1.0, Profile::constant(1.0), Profile::constant(0.0))];
        assert!(ControlSchedule::new(bad).is_err());
    }

    #[test]
    fn json_shape() {
        let text = r#"[
          {"duration": 10, "omega_R": {"shape": "constant", "from": 3}, "omega_L": {"shape": "constant", "from": 0}, "flag": "adiabatic"},
          {"duration": 5, "omega_R": {"shape": "smoothstep", "from": 3, "to": 1}, "omega_L": {"shape": "linear", "from": 0, "to": 1}, "flag": "fast"}
        ]"#;
        let s = ControlSchedule::from_json(text).unwrap();
        assert_eq!(s.stages().len(), 2);
        assert_eq!(s.stages()[1].flag, StageFlag::Fast);
        let back: ControlSchedule = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn smoothstep_is_flat_at_ends() {
        let p = Profile::smoothstep(1.0, 2.0);
        let d0 = (p.at(1e-6) - p.at(0.0)) / 1e-6;
        let d1 = (p.at(1.0) - p.at(1.0 - 1e-6)) / 1e-6;
        assert!(d0.abs() < 1e-5 && d1.abs() < 1e-5);
        assert_eq!(p.at(0.5), 1.5);
    }
}
