use super::record::TrajectoryRecord;

/// `(t, H(t) − H(0))` for every sample.
pub fn energy_drift(traj: &TrajectoryRecord) -> Vec<(f64, f64)> {
    let Some(h0) = traj.first().map(|s| s.energy) else {
        return Vec::new();
    };
    traj.samples
        .iter()
        .map(|s| (s.t(), s.energy - h0))
        .collect()
}

/// Largest `|value|` over the first and the second half of a series.
pub fn half_maxima(series: &[(f64, f64)]) -> (f64, f64) {
    let mid = series.len() / 2;
    let max = |part: &[(f64, f64)]| part.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max);
    (max(&series[..mid]), max(&series[mid..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::record::Sample;
    use crate::state::PhaseState;

    #[test]
    fn constant_energy_gives_zeros() {
        let rec = TrajectoryRecord {
            samples: (0..5)
                .map(|i| Sample {
                    state: PhaseState::new([0.0; 6], [0.0; 6], i as f64),
                    energy: 2.5,
                })
                .collect(),
            completed: true,
        };
        assert!(energy_drift(&rec).iter().all(|&(_, d)| d == 0.0));
    }

    #[test]
    fn empty_record_has_empty_drift() {
        assert!(energy_drift(&TrajectoryRecord::default()).is_empty());
    }

    #[test]
    fn half_maxima_split() {
        let s = [(0.0, 0.1), (1.0, -0.3), (2.0, 0.2), (3.0, -0.25)];
        assert_eq!(half_maxima(&s), (0.3, 0.25));
    }
}
