use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

/// `start:stop:lin|log:count`, endpoints included. `start:stop:count` means lin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub spacing: Spacing,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n && n > 1 {
                    return self.stop;
                }
                let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
                match self.spacing {
                    Spacing::Lin => self.start + (self.stop - self.start) * s,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * s).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        let bad = |why: &str| Failure::validation(format!("range `{s}`: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let (a, b, spacing, n) = match parts.as_slice() {
            [a, b, n] => (a, b, "lin", n),
            [a, b, sp, n] => (a, b, *sp, n),
            _ => return Err(bad("expected start:stop:lin|log:count")),
        };
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let start = num(a).ok_or_else(|| bad("start is not a number"))?;
        let stop = num(b).ok_or_else(|| bad("stop is not a number"))?;
        let count = n.trim().parse::<usize>().map_err(|_| bad("count is not a non-negative integer"))?;
        let spacing = match spacing {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(bad(&format!("unknown spacing `{other}`"))),
        };
        if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
            return Err(bad("log spacing needs positive endpoints"));
        }
        Ok(Self {
            start,
            stop,
            spacing,
            count,
        })
    }
}
