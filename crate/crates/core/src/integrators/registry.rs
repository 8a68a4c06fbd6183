use std::collections::BTreeMap;

use super::{
    euler_step, newton_implicit_step, rk4_step, verlet_separable_step, verlet_step,
    IterationConfig, NewtonOptions, StepReport, Stepper, VerletForm,
};
use crate::error::{Error, Result};
use crate::extrapolation::{
    iterative_mpe_step, mpe_coefficients, mpe_step, richardson3_step, MpeTable,
};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

/// Everything a factory may need to build a stepper.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperOptions {
    /// Target order for the extrapolation steppers (even, 2..=16).
    pub order: usize,
    pub iteration: IterationConfig,
    pub newton: NewtonOptions,
    /// Verlet form used as the extrapolation kernel.
    pub kernel_form: VerletForm,
    /// Subdivision count of the Richardson stepper.
    pub richardson_k: u32,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            order: 4,
            iteration: IterationConfig::default(),
            newton: NewtonOptions::default(),
            kernel_form: VerletForm::Velocity,
            richardson_k: 2,
        }
    }
}

impl StepperOptions {
    fn table(&self) -> Result<MpeTable> {
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "extrapolation order must be even and at least 2, got {}",
                self.order
            )));
        }
        mpe_coefficients(self.order / 2)
    }
}

pub type StepperFactory = Box<dyn Fn(&StepperOptions) -> Result<Box<dyn Stepper>> + Send + Sync>;

/// Name → factory map for [`Stepper`] implementations.
pub struct StepperRegistry {
    factories: BTreeMap<String, StepperFactory>,
}

impl Default for StepperRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl StepperRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("euler", |_| Ok(Box::new(Euler)));
        reg.register("rk4", |_| Ok(Box::new(Rk4)));
        reg.register("verlet-separable", |_| Ok(Box::new(SeparableVerlet)));
        reg.register("verlet-vv", |o| {
            Ok(Box::new(Verlet::new(VerletForm::Velocity, o.iteration)?))
        });
        reg.register("verlet-pv", |o| {
            Ok(Box::new(Verlet::new(VerletForm::Position, o.iteration)?))
        });
        reg.register("newton", |o| Ok(Box::new(Newton { opts: o.newton })));
        reg.register("mpe", |o| {
            Ok(Box::new(Mpe {
                table: o.table()?,
                kernel: Verlet::new(o.kernel_form, o.iteration)?,
                name: format!("mpe{}", o.order),
            }))
        });
        reg.register("richardson3", |o| {
            if o.richardson_k < 2 {
                return Err(Error::InvalidParameter(
                    "richardson_k must be at least 2".into(),
                ));
            }
            Ok(Box::new(Richardson3 {
                k: o.richardson_k,
                kernel: Verlet::new(o.kernel_form, o.iteration)?,
            }))
        });
        reg.register("iterative-mpe", |o| {
            o.iteration.validate()?;
            Ok(Box::new(IterativeMpe {
                table: o.table()?,
                cfg: o.iteration,
                form: o.kernel_form,
                name: format!("iterative-mpe{}", o.order),
            }))
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&StepperOptions) -> Result<Box<dyn Stepper>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, opts: &StepperOptions) -> Result<Box<dyn Stepper>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidParameter(format!(
                "unknown integrator `{name}` (known: {})",
                known.join(", ")
            ))
        })?;
        factory(opts)
    }
}

struct Euler;

impl Stepper for Euler {
    fn name(&self) -> &str {
        "euler"
    }
    fn order(&self) -> usize {
        1
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        euler_step(model, state, h).map(StepReport::explicit)
    }
}

struct Rk4;

impl Stepper for Rk4 {
    fn name(&self) -> &str {
        "rk4"
    }
    fn order(&self) -> usize {
        4
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        rk4_step(model, state, h).map(StepReport::explicit)
    }
}

struct SeparableVerlet;

impl Stepper for SeparableVerlet {
    fn name(&self) -> &str {
        "verlet-separable"
    }
    fn order(&self) -> usize {
        2
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        verlet_separable_step(model, state, h).map(StepReport::explicit)
    }
}

struct Verlet {
    form: VerletForm,
    cfg: IterationConfig,
}

impl Verlet {
    fn new(form: VerletForm, cfg: IterationConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { form, cfg })
    }

    fn advance(
        &self,
        model: &dyn HamiltonianModel,
        state: &PhaseState,
        h: f64,
    ) -> Result<PhaseState> {
        Ok(verlet_step(model, state, h, &self.cfg, self.form)?.new_state)
    }
}

impl Stepper for Verlet {
    fn name(&self) -> &str {
        match self.form {
            VerletForm::Velocity => "verlet-vv",
            VerletForm::Position => "verlet-pv",
        }
    }
    fn order(&self) -> usize {
        2
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        verlet_step(model, state, h, &self.cfg, self.form)
    }
}

struct Newton {
    opts: NewtonOptions,
}

impl Stepper for Newton {
    fn name(&self) -> &str {
        "newton"
    }
    fn order(&self) -> usize {
        2
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        newton_implicit_step(model, state, h, &self.opts)
    }
}

struct Mpe {
    table: MpeTable,
    kernel: Verlet,
    name: String,
}

impl Stepper for Mpe {
    fn name(&self) -> &str {
        &self.name
    }
    fn order(&self) -> usize {
        self.table.order
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        let kernel = |x: &PhaseState, h: f64| self.kernel.advance(model, x, h);
        mpe_step(kernel, state, h, &self.table).map(StepReport::explicit)
    }
}

struct Richardson3 {
    k: u32,
    kernel: Verlet,
}

impl Stepper for Richardson3 {
    fn name(&self) -> &str {
        "richardson3"
    }
    fn order(&self) -> usize {
        3
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        let kernel = |x: &PhaseState, h: f64| self.kernel.advance(model, x, h);
        richardson3_step(kernel, state, h, self.k).map(StepReport::explicit)
    }
}

struct IterativeMpe {
    table: MpeTable,
    cfg: IterationConfig,
    form: VerletForm,
    name: String,
}

impl Stepper for IterativeMpe {
    fn name(&self) -> &str {
        &self.name
    }
    fn order(&self) -> usize {
        self.table.order
    }
    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport> {
        iterative_mpe_step(model, state, h, &self.table, &self.cfg, self.form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OscillatorModel;

    #[test]
    fn builds_every_builtin() {
        let reg = StepperRegistry::with_builtins();
        let opts = StepperOptions {
            order: 6,
            ..Default::default()
        };
        let names: Vec<_> = reg.names().map(str::to_string).collect();
        assert_eq!(names.len(), 9);
        let model = OscillatorModel::new(1.0, 1.0).unwrap();
        let s = PhaseState::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], [0.0; 6], 0.0);
        for name in names {
            let stepper = reg.build(&name, &opts).unwrap();
            let r = stepper.step(&model, &s, 0.01).unwrap();
            let exact = model.solution(&s, 0.01);
            assert!(r.new_state.state_distance(&exact) < 1e-4, "{name}");
            assert!((r.new_state.t - 0.01).abs() < 1e-15, "{name}");
        }
        assert_eq!(reg.build("mpe", &opts).unwrap().order(), 6);
        assert_eq!(reg.build("mpe", &opts).unwrap().name(), "mpe6");
    }

    #[test]
    fn rejects_unknown_and_odd_orders() {
        let reg = StepperRegistry::with_builtins();
        assert!(reg.build("leapfrog4", &StepperOptions::default()).is_err());
        let odd = StepperOptions {
            order: 5,
            ..Default::default()
        };
        assert!(reg.build("mpe", &odd).is_err());
        let huge = StepperOptions {
            order: 18,
            ..Default::default()
        };
        assert!(matches!(
            reg.build("iterative-mpe", &huge),
            Err(Error::Overflow(9))
        ));
    }

    #[test]
    fn custom_registration() {
        let mut reg = StepperRegistry::empty();
        reg.register("rk4-alias", |_| Ok(Box::new(Rk4)));
        assert_eq!(
            reg.build("rk4-alias", &StepperOptions::default())
                .unwrap()
                .order(),
            4
        );
    }
}
