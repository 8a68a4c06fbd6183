use super::config::RunConfig;
use super::error::HarnessError;
use super::record::{Sample, TrajectoryRecord};
use crate::integrators::StepperRegistry;
use crate::state::PhaseState;

/// Why and when a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub record: TrajectoryRecord,
    pub failure: Option<Failure>,
    /// Largest `|q3 − q3(0)|` over every accepted step, not only the samples.
    pub max_height_excursion: f64,
    /// First time `|q3 − q3(0)|` exceeded the configured stability bound.
    pub bound_exceeded_at: Option<f64>,
}

impl RunOutcome {
    pub fn is_stable(&self) -> bool {
        self.failure.is_none() && self.bound_exceeded_at.is_none()
    }

    /// Time until failure or until the stability bound was first crossed.
    pub fn survival_time(&self, horizon: f64) -> f64 {
        let fail = self.failure.as_ref().map_or(horizon, |f| f.t);
        self.bound_exceeded_at.map_or(fail, |t| t.min(fail))
    }
}

/// Marches `config.steps` steps and records the trajectory.
///
/// Model failures and non-finite states end the run and are reported in the
/// outcome; only invalid configurations are errors.
pub fn simulate(
    config: &RunConfig,
    registry: &StepperRegistry,
) -> Result<RunOutcome, HarnessError> {
    config.validate()?;
    let model = config.model.build(&config.initial_state)?;
    let stepper = registry.build(&config.integrator, &config.options)?;

    let start = config.initial_state;
    let t0 = start.t;
    let z0 = start.q[2];
    let origin = start.q.fixed_rows::<3>(0).into_owned();

    let mut samples = vec![Sample {
        state: start,
        energy: model.energy(&start)?,
    }];
    let mut state = start;
    let mut failure = None;
    let mut max_excursion: f64 = 0.0;
    let mut bound_exceeded_at = None;

    for n in 1..=config.steps {
        let t = t0 + n as f64 * config.h;
        let next = match stepper.step(model.as_ref(), &state, config.h) {
            Ok(report) => PhaseState {
                t,
                ..report.new_state
            },
            Err(e) => {
                failure = Some(Failure {
                    t,
                    reason: e.to_string(),
                });
                break;
            }
        };
        if !next.is_finite() {
            failure = Some(Failure {
                t,
                reason: "state became non-finite".into(),
            });
            break;
        }
        let excursion = (next.q[2] - z0).abs();
        max_excursion = max_excursion.max(excursion);
        if excursion > config.stability_bound && bound_exceeded_at.is_none() {
            bound_exceeded_at = Some(t);
        }
        if (next.q.fixed_rows::<3>(0) - origin).norm() > config.escape_radius {
            failure = Some(Failure {
                t,
                reason: format!(
                    "center of mass left the escape radius {}",
                    config.escape_radius
                ),
            });
            break;
        }
        state = next;
        if n % config.stride == 0 || n == config.steps {
            match model.energy(&state) {
                Ok(energy) if energy.is_finite() => samples.push(Sample { state, energy }),
                Ok(_) => {
                    failure = Some(Failure {
                        t,
                        reason: "energy became non-finite".into(),
                    });
                    break;
                }
                Err(e) => {
                    failure = Some(Failure {
                        t,
                        reason: e.to_string(),
                    });
                    break;
                }
            }
        }
    }

    Ok(RunOutcome {
        record: TrajectoryRecord {
            samples,
            completed: failure.is_none(),
        },
        failure,
        max_height_excursion: max_excursion,
        bound_exceeded_at,
    })
}

/// Runs `config`, writes the CSV when an output path is set (also for a run
/// that diverged), and turns an early stop into [`HarnessError::Divergence`].
pub fn run_simulation(config: &RunConfig) -> Result<TrajectoryRecord, HarnessError> {
    let outcome = simulate(config, &StepperRegistry::with_builtins())?;
    if let Some(path) = &config.output {
        outcome.record.save(path)?;
    }
    match outcome.failure {
        Some(Failure { t, reason }) => Err(HarnessError::Divergence { t, reason }),
        None => Ok(outcome.record),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ModelSpec;

    fn osc_config(integrator: &str, h: f64, steps: usize) -> RunConfig {
        RunConfig::oscillator(
            integrator,
            h,
            steps,
            PhaseState::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], [0.0; 6], 0.0),
        )
    }

    #[test]
    fn zero_steps_rejected() {
        let cfg = osc_config("rk4", 0.1, 0);
        assert!(matches!(run_simulation(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn non_positive_step_rejected() {
        for h in [0.0, -1e-3, f64::NAN] {
            assert!(matches!(
                run_simulation(&osc_config("rk4", h, 10)),
                Err(HarnessError::Config(_))
            ));
        }
    }

    #[test]
    fn unknown_integrator_is_a_model_error() {
        assert!(matches!(
            run_simulation(&osc_config("leapfrog", 0.1, 10)),
            Err(HarnessError::Model(_))
        ));
    }

    #[test]
    fn stride_keeps_first_and_last() {
        let mut cfg = osc_config("verlet-vv", 0.1, 10);
        cfg.stride = 4;
        let rec = run_simulation(&cfg).unwrap();
        let ts: Vec<_> = rec.samples.iter().map(|s| s.t()).collect();
        assert_eq!(ts, vec![0.0, 0.4, 0.8, 1.0]);
    }

    #[test]
    fn times_are_multiples_of_the_step() {
        let rec = run_simulation(&osc_config("rk4", 0.1, 30)).unwrap();
        for (n, s) in rec.samples.iter().enumerate() {
            assert_eq!(s.t(), n as f64 * 0.1);
        }
    }

    #[test]
    fn rk4_matches_analytic_oscillator() {
        let cfg = osc_config("rk4", 1e-3, 10_000);
        let rec = run_simulation(&cfg).unwrap();
        let last = rec.last().unwrap().state;
        let exact = crate::model::OscillatorModel::new(1.0, 1.0)
            .unwrap()
            .solution(&cfg.initial_state, 10.0);
        assert!(last.state_distance(&exact) <= 1e-10);
    }

    #[test]
    fn spinless_top_falls_in_finite_time() {
        let mut cfg = RunConfig::levitron("rk4", 1e-2, 3000, 0.0);
        cfg.model = ModelSpec::levitron_default();
        match run_simulation(&cfg) {
            Err(HarnessError::Divergence { t, .. }) => assert!(t > 0.0 && t < 30.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
