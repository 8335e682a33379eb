//! `torus-tda`: generation, persistence, functionals, distances, curves and
//! stability experiments as reproducible runs.
//!
//! Exit codes: 0 on success, 1 on validation failure or malformed input, 2 on
//! usage errors.

mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use torus_tda::cubical::{betti_at_level_bruteforce, build_complex, euler_curve_cells};
use torus_tda::curves::{betti_curve, euler_curve, l1_norm};
use torus_tda::field::{
    pathological_1d, perturb, sample_trig_field_on_grid, sample_white_noise, PerturbMode,
    SAMPLES_PER_CUTOFF,
};
use torus_tda::functionals::{
    count_bars_geq, counts_csv, mellin_pers_p, pers_csv, pers_p, tail_exponent,
};
use torus_tda::persistence::{compute_diagrams, validate_torus_diagram};
use torus_tda::stochastic::{
    curve_stability_experiment, fourier_bound_check, stability_experiment, Ensemble,
    ExperimentConfig,
};
use torus_tda::transport::{bottleneck, transport_plan};

use crate::io::{diagram_of_degree, read_diagrams, read_field, read_json, Outputs};
use crate::manifest::{manifest_path, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "torus-tda",
    version,
    about = "Persistent homology of scalar fields on flat tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a field file.
    Gen(GenArgs),
    /// Compute persistence diagrams of a field.
    Persist(PersistArgs),
    /// Evaluate persistence functionals of a diagram.
    Functionals(FunctionalsArgs),
    /// Transport distance between two diagrams.
    Dist(DistArgs),
    /// Betti and Euler curves of a diagrams file.
    Curves(CurvesArgs),
    /// Run a seeded stability sweep.
    Experiment(ExperimentArgs),
    /// Compare diagram-derived Betti numbers and Euler curves with brute force.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GeneratorKind {
    Trig,
    Pathological,
    WhiteNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    ConstantShift,
    SmoothNoise,
}

impl From<ModeArg> for PerturbMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ConstantShift => PerturbMode::ConstantShift,
            ModeArg::SmoothNoise => PerturbMode::SmoothNoise,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "trig")]
    generator: GeneratorKind,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    cutoff: usize,
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid points per axis (trig: default 4 * cutoff; pathological: default 1024).
    #[arg(long)]
    resolution: Option<usize>,
    /// Grid shape for white noise, e.g. 6x6.
    #[arg(long, value_delimiter = 'x')]
    shape: Option<Vec<usize>>,
    /// Perturb an existing field file instead of generating one.
    #[arg(long)]
    perturb_from: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    amplitude: f64,
    #[arg(long, value_enum, default_value = "smooth-noise")]
    mode: ModeArg,
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct PersistArgs {
    field: PathBuf,
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct FunctionalsArgs {
    diagrams: PathBuf,
    /// Degree to evaluate; all degrees when omitted.
    #[arg(long)]
    degree: Option<usize>,
    /// Comma-separated exponents p.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    ps: Vec<f64>,
    /// Comma-separated thresholds for bar counts.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1")]
    eps: Vec<f64>,
    /// Fit the tail exponent over the threshold grid.
    #[arg(long)]
    tail: bool,
    /// Output directory; JSON is printed to stdout when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct DistArgs {
    a: PathBuf,
    b: PathBuf,
    /// Order p; `inf` for the bottleneck distance.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    degree: usize,
    /// Write the optimal transport plan here (finite p only).
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CurvesArgs {
    diagrams: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentKind {
    Diagram,
    Curve,
    All,
}

#[derive(Debug, Args, Serialize)]
struct ExperimentArgs {
    config: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    kind: ExperimentKind,
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated frequencies for the Fourier bound.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4,8")]
    thetas: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_delimiter = 'x', default_value = "6x6")]
    shape: Vec<usize>,
    /// Number of white-noise fields, seeded 0..seeds.
    #[arg(long, default_value_t = 25)]
    seeds: u64,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

/// What a finished command leaves behind for its manifest.
struct Run {
    outputs: Outputs,
    manifest_at: Option<PathBuf>,
    seeds: Vec<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match execute(&cli.command).and_then(|(name, config, run)| {
        if let Some(path) = run.manifest_at {
            let manifest = RunManifest::new(
                name,
                argv,
                config,
                run.seeds,
                &run.outputs.paths,
                start.elapsed().as_secs_f64(),
            )?;
            manifest.write(&path)?;
        }
        Ok(())
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: &Command) -> Result<(&'static str, serde_json::Value, Run)> {
    Ok(match command {
        Command::Gen(a) => ("gen", serde_json::to_value(a)?, gen(a)?),
        Command::Persist(a) => ("persist", serde_json::to_value(a)?, persist(a)?),
        Command::Functionals(a) => ("functionals", serde_json::to_value(a)?, functionals(a)?),
        Command::Dist(a) => ("dist", serde_json::to_value(a)?, dist(a)?),
        Command::Curves(a) => ("curves", serde_json::to_value(a)?, curves(a)?),
        Command::Experiment(a) => ("experiment", serde_json::to_value(a)?, experiment(a)?),
        Command::OracleCheck(a) => ("oracle-check", serde_json::to_value(a)?, oracle_check(a)?),
    })
}

fn gen(a: &GenArgs) -> Result<Run> {
    let field = if let Some(base) = &a.perturb_from {
        perturb(&read_field(base)?, a.amplitude, a.mode.into(), a.seed)?
    } else {
        match a.generator {
            GeneratorKind::Trig => {
                let resolution = a.resolution.unwrap_or(SAMPLES_PER_CUTOFF * a.cutoff);
                sample_trig_field_on_grid(a.dim, a.cutoff, a.beta, resolution, a.seed)?
            }
            GeneratorKind::Pathological => pathological_1d(a.resolution.unwrap_or(1024))?,
            GeneratorKind::WhiteNoise => {
                let shape = a.shape.clone().unwrap_or_else(|| vec![6; a.dim]);
                sample_white_noise(&shape, a.seed)?
            }
        }
    };
    let mut outputs = Outputs::default();
    outputs.write_json(&a.output, &field)?;
    Ok(Run {
        outputs,
        manifest_at: Some(manifest_path(&a.output, false)),
        seeds: vec![a.seed],
    })
}

fn persist(a: &PersistArgs) -> Result<Run> {
    let field = read_field(&a.field)?;
    let diagrams = compute_diagrams(&build_complex(&field));
    for d in &diagrams {
        let violations = validate_torus_diagram(d, field.dim());
        if !violations.is_empty() {
            bail!("degree {} diagram is invalid: {violations:?}", d.degree);
        }
    }
    let mut outputs = Outputs::default();
    outputs.write_json(&a.output, &diagrams)?;
    Ok(Run {
        outputs,
        manifest_at: Some(manifest_path(&a.output, false)),
        seeds: Vec::new(),
    })
}

fn functionals(a: &FunctionalsArgs) -> Result<Run> {
    let diagrams = read_diagrams(&a.diagrams)?;
    let selected: Vec<_> = match a.degree {
        Some(k) => vec![diagram_of_degree(&diagrams, k, &a.diagrams)?],
        None => diagrams,
    };
    let mut outputs = Outputs::default();
    let mut records = Vec::new();
    for d in &selected {
        let pers = a
            .ps
            .iter()
            .map(|&p| Ok(json!({"p": p, "pers_p": pers_p(d, p)?, "mellin": mellin_pers_p(d, p)?})))
            .collect::<Result<Vec<_>>>()?;
        let counts = a
            .eps
            .iter()
            .map(|&e| Ok(json!({"epsilon": e, "count": count_bars_geq(d, e)?})))
            .collect::<Result<Vec<_>>>()?;
        let tail = if a.tail {
            Some(tail_exponent(d, &a.eps)?)
        } else {
            None
        };
        records.push(json!({"degree": d.degree, "pers": pers, "counts": counts, "tail": tail}));
        if let Some(dir) = &a.out_dir {
            outputs.write_text(
                &dir.join(format!("pers_{}.csv", d.degree)),
                &pers_csv(d, &a.ps)?,
            )?;
            outputs.write_text(
                &dir.join(format!("counts_{}.csv", d.degree)),
                &counts_csv(d, &a.eps)?,
            )?;
        }
    }
    let report = serde_json::Value::Array(records);
    match &a.out_dir {
        Some(dir) => {
            outputs.write_json(&dir.join("functionals.json"), &report)?;
            Ok(Run {
                outputs,
                manifest_at: Some(manifest_path(dir, true)),
                seeds: Vec::new(),
            })
        }
        None => {
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(Run {
                outputs,
                manifest_at: None,
                seeds: Vec::new(),
            })
        }
    }
}

fn dist(a: &DistArgs) -> Result<Run> {
    let d = diagram_of_degree(&read_diagrams(&a.a)?, a.degree, &a.a)?;
    let e = diagram_of_degree(&read_diagrams(&a.b)?, a.degree, &a.b)?;
    let mut outputs = Outputs::default();
    let value = if a.p == f64::INFINITY {
        if a.plan.is_some() {
            bail!("--plan requires a finite --p");
        }
        bottleneck(&d, &e)
    } else {
        let plan = transport_plan(&d, &e, a.p)?;
        if let Some(path) = &a.plan {
            outputs.write_json(path, &plan)?;
        }
        plan.cost
    };
    println!("{value}");
    Ok(Run {
        manifest_at: a.plan.as_deref().map(|p| manifest_path(p, false)),
        outputs,
        seeds: Vec::new(),
    })
}

fn curves(a: &CurvesArgs) -> Result<Run> {
    let diagrams = read_diagrams(&a.diagrams)?;
    let mut outputs = Outputs::default();
    let mut summary = Vec::new();
    for d in &diagrams {
        let curve = betti_curve(d);
        outputs.write_text(
            &a.out_dir.join(format!("betti_{}.csv", d.degree)),
            &curve.to_csv(),
        )?;
        summary.push(json!({
            "degree": d.degree,
            "l1_norm": l1_norm(&curve),
            "pers_1": pers_p(d, 1.0)?,
        }));
    }
    let euler = euler_curve(&diagrams)?;
    outputs.write_text(&a.out_dir.join("euler.csv"), &euler.to_csv())?;
    outputs.write_json(
        &a.out_dir.join("curves.json"),
        &json!({"betti": summary, "euler_l1_norm": l1_norm(&euler)}),
    )?;
    Ok(Run {
        outputs,
        manifest_at: Some(manifest_path(&a.out_dir, true)),
        seeds: Vec::new(),
    })
}

fn experiment(a: &ExperimentArgs) -> Result<Run> {
    let cfg: ExperimentConfig = read_json(&a.config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = a.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().context("cannot start worker pool")?;
    let mut outputs = Outputs::default();
    pool.install(|| -> Result<()> {
        if matches!(a.kind, ExperimentKind::Diagram | ExperimentKind::All) {
            let report = stability_experiment(&cfg)?;
            outputs.write_json(&a.out_dir.join("diagram_report.json"), &report)?;
            outputs.write_text(&a.out_dir.join("diagram_report.csv"), &report.to_csv())?;
        }
        if matches!(a.kind, ExperimentKind::Curve | ExperimentKind::All) {
            let report = curve_stability_experiment(&cfg)?;
            outputs.write_json(&a.out_dir.join("curve_report.json"), &report)?;
            outputs.write_text(&a.out_dir.join("curve_report.csv"), &report.to_csv())?;
        }
        let base = Ensemble::trig(cfg.dim, cfg.cutoff, cfg.beta, &cfg.seeds)?;
        let mut checks = Vec::new();
        for &delta in &cfg.deltas {
            let g = base.perturbed(delta, PerturbMode::SmoothNoise)?;
            checks
                .push(json!({"delta": delta, "check": fourier_bound_check(&base, &g, &a.thetas)?}));
        }
        outputs.write_json(&a.out_dir.join("fourier.json"), &checks)?;
        if checks.iter().any(|c| c["check"]["passed"] == json!(false)) {
            bail!(
                "Fourier bound violated; see {}",
                a.out_dir.join("fourier.json").display()
            );
        }
        Ok(())
    })?;
    Ok(Run {
        outputs,
        manifest_at: Some(manifest_path(&a.out_dir, true)),
        seeds: cfg.seeds.clone(),
    })
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    seed: u64,
    levels: usize,
    comparisons: usize,
    betti_mismatches: Vec<(f64, usize, usize, usize)>,
    euler_agrees: bool,
}

fn oracle_check(a: &OracleArgs) -> Result<Run> {
    if a.shape.len() != a.dim {
        bail!("--shape has {} axes but --dim is {}", a.shape.len(), a.dim);
    }
    let mut records = Vec::new();
    for seed in 0..a.seeds {
        let field = sample_white_noise(&a.shape, seed)?;
        let complex = build_complex(&field);
        let diagrams = compute_diagrams(&complex);
        let levels = complex.levels();
        let mut mismatches = Vec::new();
        let mut comparisons = 0;
        for &x in &levels {
            for d in &diagrams {
                let from_diagram = d.rank_at(x);
                let oracle = betti_at_level_bruteforce(&complex, x, d.degree);
                comparisons += 1;
                if from_diagram != oracle {
                    mismatches.push((x, d.degree, from_diagram, oracle));
                }
            }
        }
        let euler_agrees = euler_curve(&diagrams)? == euler_curve_cells(&complex);
        records.push(OracleRecord {
            seed,
            levels: levels.len(),
            comparisons,
            betti_mismatches: mismatches,
            euler_agrees,
        });
    }
    let failures = records
        .iter()
        .filter(|r| !r.betti_mismatches.is_empty() || !r.euler_agrees)
        .count();
    let comparisons: usize = records.iter().map(|r| r.comparisons).sum();
    println!(
        "oracle-check: {} fields, {comparisons} level comparisons, {failures} failing fields",
        records.len()
    );
    let mut outputs = Outputs::default();
    if let Some(path) = &a.output {
        outputs.write_json(path, &records)?;
    }
    if failures > 0 {
        bail!("{failures} fields disagree with the brute-force oracle");
    }
    Ok(Run {
        manifest_at: a.output.as_deref().map(|p| manifest_path(p, false)),
        outputs,
        seeds: (0..a.seeds).collect(),
    })
}
