//! Dotted paths into a JSON document: `params.omega_R`, `schedule[1].duration`.

use serde_json::Value;

use crate::failure::{Failure, Outcome};

#[derive(Debug, Clone, PartialEq)]
enum Step {
    Key(String),
    Index(usize),
}

fn parse(path: &str) -> Outcome<Vec<Step>> {
    let bad = || Failure::validation(format!("malformed field path `{path}`"));
    let mut steps = Vec::new();
    for part in path.split('.') {
        let (name, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if !name.is_empty() {
            steps.push(Step::Key(name.to_string()));
        } else if rest.is_empty() {
            return Err(bad());
        }
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(bad)?;
            let idx = rest[1..close].parse::<usize>().map_err(|_| bad())?;
            steps.push(Step::Index(idx));
            rest = &rest[close + 1..];
            if !rest.is_empty() && !rest.starts_with('[') {
                return Err(bad());
            }
        }
    }
    Ok(steps)
}

/// Overwrite a numeric field. The field must already exist and hold a number.
pub fn set_number(doc: &mut Value, path: &str, v: f64) -> Outcome<()> {
    let steps = parse(path)?;
    let mut cur = doc;
    for s in &steps {
        let next = match s {
            Step::Key(k) => cur.get_mut(k.as_str()),
            Step::Index(i) => cur.get_mut(*i),
        };
        cur = next.ok_or_else(|| Failure::validation(format!("no field `{path}` in the config")))?;
    }
    if !cur.is_number() {
        return Err(Failure::validation(format!("field `{path}` is not numeric (found {cur})")));
    }
    *cur = serde_json::json!(v);
    Ok(())
}

/// Last key of a path, used as a column name.
pub fn leaf(path: &str) -> &str {
    let tail = path.rsplit('.').next().unwrap_or(path);
    tail.split('[').next().filter(|s| !s.is_empty()).unwrap_or(tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_paths() {
        let mut d = json!({"params": {"g": 1.0}, "schedule": [{"duration": 1}, {"duration": 2, "omega_R": {"from": 3}}]});
        set_number(&mut d, "params.g", 2.5).unwrap();
        set_number(&mut d, "schedule[1].omega_R.from", 4.0).unwrap();
        assert_eq!(d["params"]["g"], 2.5);
        assert_eq!(d["schedule"][1]["omega_R"]["from"], 4.0);
        assert_eq!(leaf("schedule[1].duration"), "duration");
        assert_eq!(leaf("params.omega_R"), "omega_R");
    }

    #[test]
    fn rejects_missing_and_non_numeric() {
        let mut d = json!({"units": "dimensionless", "params": {"g": 1}});
        assert!(set_number(&mut d, "units", 1.0).is_err());
        assert!(set_number(&mut d, "params.h", 1.0).is_err());
        assert!(set_number(&mut d, "params..g", 1.0).is_err());
        assert!(set_number(&mut d, "params[0]", 1.0).is_err());
    }
}
