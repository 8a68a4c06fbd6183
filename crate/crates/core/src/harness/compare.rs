use std::io::Write;

use super::error::HarnessError;
use super::record::TrajectoryRecord;

/// Default bound on `|q3(t) − q3(0)|` for a run to count as stable.
pub const DEFAULT_STABILITY_BOUND: f64 = 0.5;

/// Center-of-mass error of a run against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    pub mean_error: f64,
    pub max_error: f64,
    /// `(t, |(q1,q2,q3) − (q1,q2,q3)_ref|)` at every run sample.
    pub series: Vec<(f64, f64)>,
    /// Same, over the full 12-component state.
    pub state_series: Vec<(f64, f64)>,
    pub stable: bool,
}

impl ErrorSummary {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,err")?;
        for (t, e) in &self.series {
            writeln!(out, "{t:.16e},{e:.16e}")?;
        }
        writeln!(out, "# mean_error={:.16e}", self.mean_error)?;
        writeln!(out, "# max_error={:.16e}", self.max_error)?;
        out.flush()
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

pub fn compare_to_reference(
    run: &TrajectoryRecord,
    reference: &TrajectoryRecord,
) -> Result<ErrorSummary, HarnessError> {
    compare_with_bound(run, reference, DEFAULT_STABILITY_BOUND)
}

/// Every run sample must have a reference sample at the same time; the
/// reference may be sampled more densely.
pub fn compare_with_bound(
    run: &TrajectoryRecord,
    reference: &TrajectoryRecord,
    bound: f64,
) -> Result<ErrorSummary, HarnessError> {
    if run.samples.is_empty() {
        return Err(HarnessError::Alignment("run has no samples".into()));
    }
    let mut series = Vec::with_capacity(run.samples.len());
    let mut state_series = Vec::with_capacity(run.samples.len());
    let mut refs = reference.samples.iter().peekable();
    for s in &run.samples {
        let t = s.t();
        while refs
            .next_if(|r| r.t() < t && !same_time(r.t(), t))
            .is_some()
        {}
        let r = refs
            .next_if(|r| same_time(r.t(), t))
            .ok_or_else(|| HarnessError::Alignment(format!("no reference sample at t = {t}")))?;
        series.push((t, s.state.position_distance(&r.state)));
        state_series.push((t, s.state.state_distance(&r.state)));
    }
    let max_error = series.iter().map(|&(_, e)| e).fold(0.0, f64::max);
    let mean_error = series.iter().map(|&(_, e)| e).sum::<f64>() / series.len() as f64;
    Ok(ErrorSummary {
        mean_error: mean_error.min(max_error),
        max_error,
        series,
        state_series,
        stable: run.completed && run.max_height_excursion() <= bound,
    })
}
