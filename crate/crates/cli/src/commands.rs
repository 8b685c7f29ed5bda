use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use flee_core::mapping::{build_mapping, Mapping};
use flee_core::model::{CreEvent, LatticePoint, Point};
use flee_core::montecarlo::{monte_carlo_failure_with, McOptions};
use flee_core::planner::plan_flight;
use flee_core::reliability::{
    failure_probability, write_reliability_csv, ReliabilityParams, ReliabilityRow,
};
use flee_core::sim::{simulate_with, SimOptions};
use flee_core::sweep::{
    replicate_sweep, sweep_with, ReplicationRanges, SweepParameter, SweepResult, SweepSpec,
};
use flee_core::Execution;
use log::info;

use crate::config::{ExperimentConfig, MappingChoice};
use crate::CliError;

/// Files written by one run, relative to the output directory.
pub type Artifacts = Vec<String>;

pub struct RunContext<'a> {
    pub config: &'a ExperimentConfig,
    pub out: &'a Path,
    pub gnuplot: bool,
    pub exec: Execution,
}

impl RunContext<'_> {
    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path: PathBuf = self.out.join(name);
        let f =
            File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        let mut w = self.create(name)?;
        w.write_all(text.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Io(format!("{name}: {e}")))
    }
}

fn sweep_spec(cfg: &ExperimentConfig, parameter: SweepParameter) -> Result<SweepSpec, CliError> {
    Ok(SweepSpec {
        parameter,
        values: cfg.sweep_values_for(parameter)?,
        scenarios: cfg.scenario.kinds(),
        convention: cfg.halfway_convention,
        d_max: cfg.d_max,
    })
}

fn write_sweep(ctx: &RunContext, stem: &str, result: &SweepResult) -> Result<Artifacts, CliError> {
    let csv_name = format!("{stem}.csv");
    let mut w = ctx.create(&csv_name)?;
    result.write_csv(&mut w)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    let mut files = vec![csv_name.clone()];
    if ctx.gnuplot {
        let name = format!("{stem}.gp");
        ctx.write_text(&name, &sweep_gnuplot(&csv_name, result.parameter))?;
        files.push(name);
    }
    Ok(files)
}

fn sweep_gnuplot(csv: &str, parameter: SweepParameter) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel '{x}'\n\
         set ylabel 'minimum code distance'\n\
         set key top left\n\
         plot '{csv}' every ::1 using 2:(stringcolumn(3) eq \"halfway\" ? $4 : 1/0) with steps title 'halfway', \\\n     \
         '{csv}' every ::1 using 2:(stringcolumn(3) eq \"at_hole\" ? $4 : 1/0) with steps title 'at hole'\n",
        x = parameter.name()
    )
}

pub fn run_sweep(ctx: &RunContext, parameter: SweepParameter) -> Result<Artifacts, CliError> {
    let p = ctx.config.physical()?;
    let spec = sweep_spec(ctx.config, parameter)?;
    info!(
        "sweeping {} over {} values",
        parameter.name(),
        spec.values.len()
    );
    let result = sweep_with(&spec, &p, ctx.exec)?;
    let infeasible = result
        .rows
        .iter()
        .filter(|r| !r.min_d.is_feasible())
        .count();
    println!(
        "{} rows, {} infeasible ({} convention)",
        result.rows.len(),
        infeasible,
        spec.convention.as_str()
    );
    write_sweep(ctx, &format!("sweep_{}", parameter.name()), &result)
}

pub fn run_replicate(ctx: &RunContext) -> Result<Artifacts, CliError> {
    let cfg = ctx.config;
    let p = cfg.physical()?;
    let spec = sweep_spec(cfg, cfg.replicate_parameter)?;
    let ranges = ReplicationRanges {
        delta: (
            cfg.replicate_delta_min_cycles,
            cfg.replicate_delta_max_cycles,
        ),
        move_displacement: (cfg.replicate_move_min_mm, cfg.replicate_move_max_mm),
    };
    if ranges.delta.0 > ranges.delta.1
        || !(ranges.move_displacement.0 <= ranges.move_displacement.1)
    {
        return Err(CliError::Range(
            "replication ranges must have min <= max".into(),
        ));
    }
    if !(ranges.move_displacement.0 >= 0.0) {
        return Err(CliError::Range(
            "replicate_move_min_mm must be non-negative".into(),
        ));
    }
    info!(
        "replicating {} sweep with seed {}",
        spec.parameter.name(),
        cfg.seed
    );
    let (result, draws) = replicate_sweep(&spec, &p, &ranges, cfg.seed, ctx.exec)?;
    let stem = format!("replicate_{}", spec.parameter.name());
    let mut files = write_sweep(ctx, &stem, &result)?;

    let name = format!("{stem}_draws.csv");
    let mut text = String::from("value,delta_cycles,move_displacement_mm\n");
    for d in &draws {
        text.push_str(&format!(
            "{},{},{}\n",
            d.value, d.delta, d.move_displacement
        ));
    }
    ctx.write_text(&name, &text)?;
    files.push(name);
    println!(
        "{} rows from {} draws (seed {})",
        result.rows.len(),
        draws.len(),
        cfg.seed
    );
    Ok(files)
}

fn mapping_for(cfg: &ExperimentConfig, p: &flee_core::PhysicalParams) -> Result<Mapping, CliError> {
    Ok(match cfg.mapping {
        MappingChoice::Tiled => build_mapping(cfg.mapping_rows, cfg.mapping_cols, p)?,
        MappingChoice::Isolated => Mapping::isolated(LatticePoint::new(0, 0), p)?,
    })
}

pub fn run_simulate(ctx: &RunContext) -> Result<Artifacts, CliError> {
    let cfg = ctx.config;
    let p = cfg.physical()?;
    let m = mapping_for(cfg, &p)?;
    let epicenter = match (cfg.epicenter_x_mm, cfg.epicenter_y_mm) {
        (Some(x), Some(y)) => Point::new(x, y),
        (None, None) => m.qubits[m.qubits.len() / 2].qubit.midpoint_mm(p.l),
        _ => {
            return Err(CliError::Config(
                "epicenter_x_mm and epicenter_y_mm must be given together".into(),
            ))
        }
    };
    let event = CreEvent::new(epicenter, cfg.strike_cycle);
    let plan = plan_flight(&m, &event, &p)?;
    let opts = SimOptions {
        model: cfg.damage_model,
        dwell: cfg.dwell_cycles,
    };
    let outcome = simulate_with(&m, &[event], &p, &plan, &opts);

    ctx.write_text("mapping.json", &(m.to_json() + "\n"))?;
    let plan_json = serde_json::to_string_pretty(&plan).expect("plan serializes");
    ctx.write_text("plan.json", &(plan_json + "\n"))?;
    let mut w = ctx.create("events.csv")?;
    outcome.write_csv(&mut w)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    println!(
        "{} of {} qubits survived; {} moved in {} batch(es); model {}",
        outcome.survived.iter().filter(|&&s| s).count(),
        outcome.survived.len(),
        plan.flights.len(),
        plan.batch_starts.len(),
        opts.model
    );
    Ok(vec![
        "mapping.json".into(),
        "plan.json".into(),
        "events.csv".into(),
    ])
}

pub fn run_reliability(ctx: &RunContext) -> Result<Artifacts, CliError> {
    let cfg = ctx.config;
    let p = cfg.physical()?;
    let taus = cfg.tau_grid()?;
    let base = ReliabilityParams::new(cfg.lambda_per_s, taus[0], cfg.d, cfg.p_hole_hit)?;
    let m = Mapping::isolated(LatticePoint::new(0, 0), &p)?;
    let opts = McOptions {
        mode: cfg.mc_mode,
        damage: cfg.damage_model,
        exec: ctx.exec,
        ..McOptions::default()
    };
    let mut rows = Vec::with_capacity(taus.len());
    for (i, &tau) in taus.iter().enumerate() {
        let r = ReliabilityParams { tau, ..base };
        r.validate()?;
        let (mc, hw) = if cfg.n_trials > 0 {
            let est = monte_carlo_failure_with(
                &m,
                &p,
                &r,
                cfg.n_trials,
                cfg.seed.wrapping_add(i as u64),
                &opts,
            )?;
            (Some(est.estimate), Some(est.half_width))
        } else {
            (None, None)
        };
        rows.push(ReliabilityRow {
            tau,
            analytic_failure: failure_probability(&r),
            mc_failure: mc,
            mc_halfwidth: hw,
        });
    }
    let mut w = ctx.create("reliability.csv")?;
    write_reliability_csv(&rows, &mut w)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    let mut files = vec!["reliability.csv".to_string()];
    if ctx.gnuplot {
        let mut script = String::from(
            "set datafile separator ','\nset logscale x\nset xlabel 'tau (s)'\nset ylabel 'failure probability'\n\
             plot 'reliability.csv' every ::1 using 1:2 with lines title 'analytic'",
        );
        if cfg.n_trials > 0 {
            script.push_str(", \\\n     'reliability.csv' every ::1 using 1:3:4 with yerrorbars title 'monte carlo'");
        }
        script.push('\n');
        ctx.write_text("reliability.gp", &script)?;
        files.push("reliability.gp".into());
    }
    let first = rows.first().expect("non-empty grid");
    let last = rows.last().expect("non-empty grid");
    println!(
        "failure {:.6} at tau={} s, {:.6} at tau={} s (d={}, lambda={}/s)",
        first.analytic_failure, first.tau, last.analytic_failure, last.tau, cfg.d, cfg.lambda_per_s
    );
    Ok(files)
}
