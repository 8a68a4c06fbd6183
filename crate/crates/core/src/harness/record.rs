use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::error::HarnessError;
use crate::state::PhaseState;

pub const TRAJECTORY_HEADER: &str = "t,q1,q2,q3,q4,q5,q6,p1,p2,p3,p4,p5,p6,H";

const DIVERGED_MARKER: &str = "# diverged";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: PhaseState,
    pub energy: f64,
}

impl Sample {
    pub fn t(&self) -> f64 {
        self.state.t
    }
}

/// Sampled time series `(t, state, H)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    /// False when the run stopped before its horizon.
    pub completed: bool,
}

impl TrajectoryRecord {
    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Largest `|q3(t) − q3(0)|` over the samples.
    pub fn max_height_excursion(&self) -> f64 {
        let Some(z0) = self.first().map(|s| s.state.q[2]) else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| (s.state.q[2] - z0).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        for s in &self.samples {
            write!(out, "{:.16e}", s.state.t)?;
            for v in s.state.q.iter().chain(s.state.p.iter()) {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out, ",{:.16e}", s.energy)?;
        }
        if !self.completed {
            let t = self.last().map_or(0.0, |s| s.state.t);
            writeln!(out, "{DIVERGED_MARKER} after t={t:.16e}")?;
        }
        out.flush()
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let file = fs::File::create(path)?;
        self.write_csv(BufWriter::new(file))?;
        Ok(())
    }

    pub fn parse_csv(text: &str) -> Result<Self, HarnessError> {
        let completed = !text.lines().any(|l| l.starts_with(DIVERGED_MARKER));
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header.join(",") != TRAJECTORY_HEADER {
            return Err(HarnessError::Parse(format!(
                "expected header `{TRAJECTORY_HEADER}`, found `{}`",
                header.join(",")
            )));
        }
        let mut samples = Vec::new();
        for (line, row) in reader.records().enumerate() {
            let row = row?;
            let vals = row
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| HarnessError::Parse(format!("row {}: {e}", line + 1)))?;
            if vals.len() != 14 {
                return Err(HarnessError::Parse(format!(
                    "row {} has {} fields",
                    line + 1,
                    vals.len()
                )));
            }
            let mut q = [0.0; 6];
            let mut p = [0.0; 6];
            q.copy_from_slice(&vals[1..7]);
            p.copy_from_slice(&vals[7..13]);
            samples.push(Sample {
                state: PhaseState::new(q, p, vals[0]),
                energy: vals[13],
            });
        }
        Ok(Self { samples, completed })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::parse_csv(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> TrajectoryRecord {
        let samples = (0..3)
            .map(|i| Sample {
                state: PhaseState::new(
                    [0.1 * i as f64, 1.0 / 3.0, 1.72, 0.01, -2.5e-17, 6.0],
                    [0.0, 1e300, -1.0, 0.5, 0.9, 0.9],
                    i as f64 * 1e-4,
                ),
                energy: 1.0 / 7.0,
            })
            .collect();
        TrajectoryRecord {
            samples,
            completed: true,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        record().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(TRAJECTORY_HEADER));
        assert_eq!(TrajectoryRecord::parse_csv(&text).unwrap(), record());
    }

    #[test]
    fn diverged_marker_round_trips() {
        let mut r = record();
        r.completed = false;
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let back = TrajectoryRecord::parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert!(!back.completed);
        assert_eq!(back.samples.len(), 3);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(matches!(
            TrajectoryRecord::parse_csv("t,err\n0,0\n"),
            Err(HarnessError::Parse(_))
        ));
    }

    #[test]
    fn values_keep_at_least_15_significant_digits() {
        let mut buf = Vec::new();
        record().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(2).unwrap();
        let q2 = row.split(',').nth(2).unwrap();
        assert!(q2.starts_with("3.333333333333333"), "{q2}");
    }
}
