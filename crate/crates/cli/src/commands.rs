use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::Context;
use levsplit::harness::{
    compare_with_bound, convergence_order, run_simulation, spin_scan, ErrorSummary, HarnessError,
    ModelSpec, RunConfig, TrajectoryRecord,
};
use levsplit::StepperRegistry;

use crate::args::{Command, CompareArgs, OrderArgs, RunArgs, ScanArgs};

pub fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run(a) => run(&a),
        Command::Compare(a) => compare(&a),
        Command::Order(a) => order(&a),
        Command::Scan(a) => scan(&a),
    }
}

fn report_errors(summary: &ErrorSummary, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    println!(
        "mean_error={:.6e} max_error={:.6e} stable={}",
        summary.mean_error, summary.max_error, summary.stable
    );
    if let Some(path) = out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        summary.write_csv(BufWriter::new(file))?;
    }
    Ok(())
}

fn run(a: &RunArgs) -> anyhow::Result<()> {
    let cfg = a.config();
    let record = run_simulation(&cfg)?;
    let last = record.last().expect("a run records its initial state");
    let drift = last.energy - record.first().unwrap().energy;
    println!(
        "{}: {} steps of {} to t={:.6} q3={:.6e} H-H0={:.3e}",
        cfg.integrator, cfg.steps, cfg.h, last.state.t, last.state.q[2], drift
    );
    if let Some(path) = &cfg.output {
        println!("trajectory written to {}", path.display());
    }
    if let Some(path) = &cfg.reference {
        let reference =
            TrajectoryRecord::load(path).with_context(|| format!("reading {}", path.display()))?;
        report_errors(
            &compare_with_bound(&record, &reference, cfg.stability_bound)?,
            a.err_out.as_deref(),
        )?;
    }
    Ok(())
}

fn compare(a: &CompareArgs) -> anyhow::Result<()> {
    let run =
        TrajectoryRecord::load(&a.run).with_context(|| format!("reading {}", a.run.display()))?;
    let reference = TrajectoryRecord::load(&a.reference)
        .with_context(|| format!("reading {}", a.reference.display()))?;
    report_errors(
        &compare_with_bound(&run, &reference, a.bound)?,
        a.out.as_deref(),
    )
}

fn order(a: &OrderArgs) -> anyhow::Result<()> {
    let initial = a.model.initial_state();
    let model = a.model.spec().build(&initial)?;
    let stepper =
        StepperRegistry::with_builtins().build(&a.integrator.name(), &a.integrator.options())?;
    let hs: Vec<f64> = (0..a.levels)
        .map(|i| a.dt / a.ratio.powi(i as i32))
        .collect();
    let est = convergence_order(model.as_ref(), stepper.as_ref(), &initial, &hs, a.horizon)?;
    let mut out = io::stdout().lock();
    writeln!(out, "h,err")?;
    for (h, e) in &est.points {
        writeln!(out, "{h:.6e},{e:.6e}")?;
    }
    for h in &est.excluded {
        writeln!(out, "# excluded h={h:.6e} (roundoff floor)")?;
    }
    writeln!(out, "# {} slope={:.4}", stepper.name(), est.slope)?;
    Ok(())
}

fn scan(a: &ScanArgs) -> anyhow::Result<()> {
    if !matches!(a.model.spec(), ModelSpec::Levitron { .. }) {
        return Err(HarnessError::Config("scan needs --model levitron".into()).into());
    }
    let base = RunConfig {
        model: a.model.spec(),
        integrator: a.integrator.name(),
        options: a.integrator.options(),
        h: a.dt,
        steps: a.steps,
        stability_bound: a.bound,
        initial_state: a.model.initial_state(),
        ..RunConfig::levitron("rk4", a.dt, a.steps, a.model.p6)
    };
    let report = spin_scan(&base, a.p6_min, a.p6_max, a.samples)?;
    match &a.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_csv(BufWriter::new(file))?;
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    match (report.first_stable(), report.last_stable()) {
        (Some(f), Some(l)) => eprintln!("stable window: p6 in [{}, {}]", f.p6, l.p6),
        _ => eprintln!("no stable spin in [{}, {}]", a.p6_min, a.p6_max),
    }
    Ok(())
}
