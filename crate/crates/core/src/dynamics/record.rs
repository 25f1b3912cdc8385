use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    #[default]
    Completed,
    StepLimit,
    /// The trajectory reached the boundary of the field's domain (a chart
    /// singularity or a collision) at `time`.
    DomainExit { reason: String, time: f64 },
}

/// Sampled trajectory with per-sample monitor values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub state_names: Vec<String>,
    pub monitor_names: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<Vec<f64>>,
    pub termination: Termination,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl TrajectoryRecord {
    pub fn new(state_names: Vec<String>, monitor_names: Vec<String>) -> Self {
        Self {
            state_names,
            monitor_names,
            times: Vec::new(),
            states: Vec::new(),
            monitors: Vec::new(),
            termination: Termination::Completed,
            steps_accepted: 0,
            steps_rejected: 0,
        }
    }

    pub fn push(&mut self, t: f64, state: Vec<f64>, monitors: Vec<f64>) {
        self.times.push(t);
        self.states.push(state);
        self.monitors.push(monitors);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }

    /// Values of the named monitor over the record.
    pub fn monitor(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.monitor_names.iter().position(|n| n == name)?;
        Some(self.monitors.iter().map(|m| m[k]).collect())
    }

    /// `max |m(t) - m(0)|` of the named monitor.
    pub fn monitor_drift(&self, name: &str) -> Option<f64> {
        let v = self.monitor(name)?;
        let first = *v.first()?;
        Some(v.iter().fold(0.0, |acc, x| acc.max((x - first).abs())))
    }

    /// CSV with header `t,<state names>,<monitor names>`; numbers carry 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.state_names.iter().cloned());
        header.extend(self.monitor_names.iter().cloned());
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.times.len() {
            let row: Vec<String> = std::iter::once(self.times[k])
                .chain(self.states[k].iter().copied())
                .chain(self.monitors[k].iter().copied())
                .map(format_number)
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Round-trip decimal representation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_numbers() {
        let mut rec = TrajectoryRecord::new(vec!["a".into(), "b".into()], vec!["H".into()]);
        rec.push(0.0, vec![0.1, 1.0 / 3.0], vec![-2.5]);
        rec.push(0.5, vec![1e-300, -7.0], vec![-2.5000000000000004]);
        let csv = rec.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,a,b,H"));
        let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.5, 1e-300, -7.0, -2.5000000000000004]);
        assert_eq!(rec.monitor_drift("H"), Some(4.440892098500626e-16));
    }

    #[test]
    fn json_round_trip() {
        let mut rec = TrajectoryRecord::new(vec!["a".into()], vec![]);
        rec.push(0.0, vec![1.0], vec![]);
        rec.termination = Termination::DomainExit { reason: "collision".into(), time: 0.25 };
        let back: TrajectoryRecord = serde_json::from_str(&rec.to_json().unwrap()).unwrap();
        assert_eq!(back, rec);
    }
}
