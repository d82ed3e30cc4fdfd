//! `sympoctl`: optimal-control experiments for continuous-variable gates.
//!
//! Exit status: 0 on success (for `optimize`, a converged run), 2 when an
//! optimization finished without converging, 1 on any error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sympoctl_core::gates::{gate_names, parse_gate, GateTarget};
use sympoctl_core::landscape::{flow_start, gradient_flow, landscape_report, Domain, FlowOptions, FlowStart};
use sympoctl_core::models::{lie_closure, model_names, parse_model, ControlSystem, Flavor};
use sympoctl_core::optimizer::{fluence, initial_field, optimize, Algorithm, InitKind};

use config::{Overrides, RunConfig};

const OUT_ENV: &str = "SYMPOCTL_OUT";
const DEFAULT_OUT: &str = "sympoctl-out";

#[derive(Parser)]
#[command(name = "sympoctl", version, about = "Optimal control of continuous-variable quantum gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a control field that realizes a gate.
    Optimize(OptimizeArgs),
    /// Enumerate the critical submanifolds of a gate's fidelity landscape.
    Landscape {
        gate: String,
        /// sp, osp or u; defaults to sp for symplectic gates and u otherwise.
        #[arg(long)]
        domain: Option<Domain>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lie-closure controllability report for a model.
    Controllability {
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the kinematic gradient flow toward a gate.
    Flow {
        gate: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40.0)]
        s_max: f64,
        /// target, perturbed or random.
        #[arg(long, default_value = "perturbed")]
        start: FlowStart,
        /// Size of the random algebra element used for the start.
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the gate catalog.
    Gates,
    /// List the control models.
    Models,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Run configuration; repeat to run a batch in parallel.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    gate: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "tf")]
    t_f: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// cg or sd.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// random, constant or sine.
    #[arg(long)]
    init: Option<InitKind>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

/// Flag, then config entry, then `SYMPOCTL_OUT`, then `./sympoctl-out`.
fn out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn prepare(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

#[derive(Serialize)]
struct Summary<'a> {
    model: &'a str,
    gate: &'a str,
    t_f: f64,
    steps: usize,
    algorithm: Algorithm,
    init: InitKind,
    amplitude: f64,
    seed: u64,
    final_j: f64,
    fluence: f64,
    final_grad_norm: f64,
    iterations: usize,
    termination: &'a str,
    converged: bool,
}

/// Runs one optimization and writes its four output files.
fn run_optimize(cfg: &RunConfig, dir: &Path) -> Result<bool> {
    let system: ControlSystem<f64> = parse_model(&cfg.model)?;
    let target: GateTarget<f64> = parse_gate(&cfg.gate)?;
    if system.flavor() != target.flavor() || system.dim() != target.dim() {
        bail!("model '{}' cannot target gate '{}' (flavor or dimension differs)", cfg.model, cfg.gate);
    }
    let init = initial_field(cfg.init, system.n_controls(), cfg.steps, cfg.t_f, cfg.amplitude, cfg.seed)?;
    let trace = optimize(&system, &target, &cfg.optimizer_options(), init)?;
    prepare(dir)?;
    output::write_trace(&dir.join("trace.csv"), &trace.records)?;
    output::write_field(&dir.join("field.csv"), &trace.final_field)?;
    output::write_propagator(&dir.join("final_propagator.json"), trace.final_propagator.as_ref())?;
    let last = trace.records.last();
    let summary = Summary {
        model: &cfg.model,
        gate: &cfg.gate,
        t_f: cfg.t_f,
        steps: cfg.steps,
        algorithm: cfg.algorithm,
        init: cfg.init,
        amplitude: cfg.amplitude,
        seed: cfg.seed,
        final_j: trace.final_value(),
        fluence: last.map_or_else(|| fluence(&trace.final_field), |r| r.fluence),
        final_grad_norm: last.map_or(f64::NAN, |r| r.gradient_norm),
        iterations: trace.iterations(),
        termination: trace.termination.as_str(),
        converged: trace.converged(),
    };
    output::write_json(&dir.join("summary.json"), &summary)?;
    println!(
        "{} / {}: {} after {} iterations, J = {:.3e} -> {}",
        cfg.model,
        cfg.gate,
        trace.termination,
        trace.iterations(),
        trace.final_value(),
        dir.display()
    );
    Ok(trace.converged())
}

fn cmd_optimize(args: OptimizeArgs) -> Result<ExitCode> {
    let overrides = Overrides {
        model: args.model,
        gate: args.gate,
        seed: args.seed,
        t_f: args.t_f,
        steps: args.steps,
        algorithm: args.algorithm,
        init: args.init,
        amplitude: args.amplitude,
        max_iterations: args.max_iterations,
    };
    if args.configs.len() <= 1 {
        let mut cfg = match args.configs.first() {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(&overrides);
        let dir = out_dir(args.out.as_deref(), cfg.out.as_deref());
        let converged = run_optimize(&cfg, &dir)?;
        return Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(2) });
    }

    // Batch: every config gets a subdirectory named after its file stem.
    let mut jobs = Vec::new();
    for path in &args.configs {
        let mut cfg = RunConfig::load(path)?;
        cfg.apply(&overrides);
        let stem = path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
        let dir = out_dir(args.out.as_deref(), cfg.out.as_deref()).join(stem);
        jobs.push((cfg, dir));
    }
    let results: Vec<Result<bool>> = jobs.par_iter().map(|(cfg, dir)| run_optimize(cfg, dir)).collect();
    let mut code = 0u8;
    for (r, (_, dir)) in results.into_iter().zip(&jobs) {
        match r {
            Ok(true) => {}
            Ok(false) => code = code.max(2),
            Err(e) => {
                eprintln!("error in {}: {e:#}", dir.display());
                code = 1;
            }
        }
    }
    Ok(ExitCode::from(code))
}

fn cmd_landscape(gate: &str, domain: Option<Domain>, out: Option<&Path>) -> Result<()> {
    let target: GateTarget<f64> = parse_gate(gate)?;
    let domain = domain.unwrap_or(match target.flavor() {
        Flavor::Symplectic => Domain::Sp,
        Flavor::Unitary => Domain::U,
    });
    let report = landscape_report(&target, domain)?;
    let dir = out_dir(out, None);
    prepare(&dir)?;
    output::write_json(&dir.join("landscape.json"), &report)?;
    println!("{gate} over {domain}: {} critical components", report.component_count);
    for c in &report.components {
        println!(
            "  J = {:<10.4} signature ({}, {}, {})  dimension {}",
            c.critical_value, c.hessian.n_zero, c.hessian.n_plus, c.hessian.n_minus, c.dimension
        );
    }
    Ok(())
}

fn cmd_controllability(model: &str, out: Option<&Path>) -> Result<()> {
    let system: ControlSystem<f64> = parse_model(model)?;
    let report = lie_closure(&system)?;
    let dir = out_dir(out, None);
    prepare(&dir)?;
    output::write_json(&dir.join("controllability.json"), &report)?;
    println!(
        "{model}: Lie closure {}/{} ({}), {}",
        report.lie_dimension, report.ambient_dimension, report.ambient, report.classification
    );
    Ok(())
}

fn cmd_flow(gate: &str, seed: u64, s_max: f64, start: FlowStart, scale: f64, out: Option<&Path>) -> Result<()> {
    let target: GateTarget<f64> = parse_gate(gate)?;
    let s0 = flow_start(&target, start, scale, seed)?;
    let opts = FlowOptions { s_max, ..FlowOptions::default() };
    let points = gradient_flow(&s0, &target, &opts)?;
    let dir = out_dir(out, None);
    prepare(&dir)?;
    output::write_flow(&dir.join("flow.csv"), &points)?;
    let last = points.last().expect("trajectory starts with the initial point");
    println!("{gate}: J {:.3e} -> {:.3e} at s = {:.3} ({} points)", points[0].value, last.value, last.s, points.len());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Optimize(args) => return cmd_optimize(args),
        Command::Landscape { gate, domain, out } => cmd_landscape(&gate, domain, out.as_deref())?,
        Command::Controllability { model, out } => cmd_controllability(&model, out.as_deref())?,
        Command::Flow { gate, seed, s_max, start, scale, out } => {
            cmd_flow(&gate, seed, s_max, start, scale, out.as_deref())?
        }
        Command::Gates => {
            for (name, about) in gate_names() {
                println!("{name:<16} {about}");
            }
        }
        Command::Models => {
            for (name, about) in model_names() {
                println!("{name:<22} {about}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
