use std::io::Write;

use rayon::prelude::*;

use super::config::{with_spin, RunConfig};
use super::error::HarnessError;
use super::run::simulate;
use crate::integrators::StepperRegistry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub p6: f64,
    pub stable: bool,
    pub survival_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    /// Rows in increasing `p6`.
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn first_stable(&self) -> Option<&ScanRow> {
        self.rows.iter().find(|r| r.stable)
    }

    pub fn last_stable(&self) -> Option<&ScanRow> {
        self.rows.iter().rev().find(|r| r.stable)
    }

    /// Stable sample closest to the middle of the first..last stable window.
    pub fn central_stable(&self) -> Option<&ScanRow> {
        let mid = 0.5 * (self.first_stable()?.p6 + self.last_stable()?.p6);
        self.rows
            .iter()
            .filter(|r| r.stable)
            .min_by(|a, b| (a.p6 - mid).abs().total_cmp(&(b.p6 - mid).abs()))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "p6,stable,survival_time")?;
        for r in &self.rows {
            writeln!(out, "{:.16e},{},{:.16e}", r.p6, r.stable, r.survival_time)?;
        }
        out.flush()
    }
}

/// Runs `base` once per spin in `samples` evenly spaced values over
/// `[p6_min, p6_max]`, each started without precession (`p5 = p6 cos q4`).
///
/// A sample is stable when it completes the horizon with `|q3 − q3(0)|`
/// inside the stability bound; divergences are recorded as data.
pub fn spin_scan(
    base: &RunConfig,
    p6_min: f64,
    p6_max: f64,
    samples: usize,
) -> Result<ScanReport, HarnessError> {
    if !base.model.is_levitron() {
        return Err(HarnessError::Config(
            "spin scans need the levitron model".into(),
        ));
    }
    if !(p6_min >= 0.0 && p6_max >= p6_min && p6_max.is_finite()) || samples < 1 {
        return Err(HarnessError::Config(format!(
            "invalid spin range [{p6_min}, {p6_max}] with {samples} samples"
        )));
    }
    if samples > 1 && p6_max == p6_min {
        return Err(HarnessError::Config("spin range is empty".into()));
    }
    let mut base = base.clone();
    base.output = None;
    let registry = StepperRegistry::with_builtins();
    let horizon = base.horizon();
    let span = p6_max - p6_min;
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p6 = if samples == 1 {
                p6_min
            } else {
                p6_min + i as f64 * span / (samples - 1) as f64
            };
            let cfg = RunConfig {
                initial_state: with_spin(&base.initial_state, p6),
                ..base.clone()
            };
            let outcome = simulate(&cfg, &registry)?;
            Ok(ScanRow {
                p6,
                stable: outcome.is_stable(),
                survival_time: outcome.survival_time(horizon),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ScanReport { rows })
}
