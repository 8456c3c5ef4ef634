//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use suffdata::directions::Linking;
use suffdata::hiring::{run_experiment, Variant};
use suffdata::linalg::{dot, norm2, unit, SpanBasis};
use suffdata::oracle::{dir_of_vertices, enumerate_vertices, f0_cap_kernel, reachable_dir, relevant_extreme_directions};
use suffdata::selection::{select_query_indices, unspanned_direction};
use suffdata::{compute_dir_basis, recover_decision, solve_lp, CsMilpConfig, DirectionBasis, Error};

use crate::task::{Task, TaskFile};
use crate::{Command, Format, TaskArgs, VariantArg};

const SOLVE_TOL: f64 = 1e-8;

/// Maps a failure to the process exit code: 3 for the enumeration budget,
/// 4 for solver failures, 2 for everything else (input problems).
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(
            Error::NumericalFailure(_)
            | Error::NodeLimitExceeded(_)
            | Error::NonTermination(_)
            | Error::ConvergenceFailure(_)
            | Error::SamplingFailure(_),
        ) => 4,
        _ => 2,
    }
}

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::DirBasis { task, seed } => dir_basis(&task, seed),
        Command::Check { task, dataset, seed } => check(&task, dataset.as_deref(), seed),
        Command::Select { task, seed } => select(&task, seed),
        Command::Decide {
            task,
            dataset,
            observations,
        } => decide(&task, dataset.as_deref(), observations.as_deref()),
        Command::OracleVerify { task, seed } => oracle_verify(&task, seed),
        Command::Hiring {
            output,
            svg,
            d,
            variant,
            etas,
            seed,
            omit_timing,
            format,
        } => {
            let variant = match variant {
                VariantArg::Vanilla => Variant::Vanilla,
                VariantArg::Experience => Variant::ExperienceConstrained,
            };
            hiring(output.as_deref(), svg.as_deref(), d, variant, &etas, seed, omit_timing, format)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn emit_json<T: Serialize>(args: &TaskArgs, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(args.output.as_deref(), &text)
}

fn json_only(args: &TaskArgs) -> Result<()> {
    if args.format != Format::Json {
        bail!("this command only writes JSON");
    }
    Ok(())
}

fn load(args: &TaskArgs) -> Result<Task> {
    let mut task = TaskFile::load(&args.input)?.build()?;
    if let Some(sigma) = args.sigma_interior {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            bail!("--sigma-interior must be finite and nonnegative");
        }
        task.c_set = task.c_set.shrink(sigma)?;
    }
    log::info!(
        "task: {} variables, {} rows, {}",
        task.lp.n_original(),
        task.lp.m(),
        if task.c_set.is_unrestricted() { "unrestricted costs" } else { "bounded costs" }
    );
    Ok(task)
}

fn config(args: &TaskArgs, task: &Task) -> Result<CsMilpConfig> {
    let mut cfg = CsMilpConfig::derive(&task.lp, &task.c_set)?;
    if let Some(t) = args.tol_zero {
        cfg.tol_zero = t;
    }
    if let Some(eps) = args.eps {
        cfg.eps = eps;
        cfg.linking = Linking::Uniform;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn directions(args: &TaskArgs, task: &Task, seed: u64) -> Result<DirectionBasis> {
    let cfg = config(args, task)?;
    let dirs = compute_dir_basis(&task.lp, &task.c_set, &cfg, seed)?;
    log::info!("direction basis of dimension {} after {} iterations", dirs.dim(), dirs.iterations);
    Ok(dirs)
}

#[derive(Serialize)]
struct DirBasisOut<'a> {
    basis: &'a [Vec<f64>],
    anchor: &'a [f64],
    iterations: usize,
    seed: u64,
}

fn dir_basis(args: &TaskArgs, seed: u64) -> Result<u8> {
    json_only(args)?;
    let task = load(args)?;
    let dirs = directions(args, &task, seed)?;
    emit_json(
        args,
        &DirBasisOut {
            basis: dirs.basis.vectors(),
            anchor: &dirs.anchor_x0,
            iterations: dirs.iterations,
            seed,
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckOut {
    sufficient: bool,
    dir_dim: usize,
    residual_direction: Option<Vec<f64>>,
}

fn check(args: &TaskArgs, dataset: Option<&Path>, seed: u64) -> Result<u8> {
    json_only(args)?;
    let mut task = load(args)?;
    if let Some(p) = dataset {
        task.load_dataset(p)?;
    }
    let ds = task.require_dataset()?.clone();
    let dirs = directions(args, &task, seed)?;
    let residual = unspanned_direction(&ds, &dirs.basis)?.map(|v| {
        let n = norm2(&v);
        v.iter().map(|x| x / n).collect::<Vec<_>>()
    });
    let sufficient = residual.is_none();
    emit_json(
        args,
        &CheckOut {
            sufficient,
            dir_dim: dirs.dim(),
            residual_direction: residual,
        },
    )?;
    Ok(if sufficient { 0 } else { 1 })
}

#[derive(Serialize)]
struct SelectOut {
    indices: Vec<usize>,
    queries: Vec<Vec<f64>>,
}

fn select(args: &TaskArgs, seed: u64) -> Result<u8> {
    json_only(args)?;
    let task = load(args)?;
    let dirs = directions(args, &task, seed)?;
    let indices = select_query_indices(&dirs, &task.query_basis)?;
    let queries = indices.iter().map(|&i| task.query_basis.query(i)).collect();
    emit_json(args, &SelectOut { indices, queries })?;
    Ok(0)
}

#[derive(Serialize)]
struct DecideOut {
    c_hat: Vec<f64>,
    decision: Vec<f64>,
    residual: f64,
    objective: f64,
}

fn decide(args: &TaskArgs, dataset: Option<&Path>, observations: Option<&Path>) -> Result<u8> {
    json_only(args)?;
    let mut task = load(args)?;
    if let Some(p) = dataset {
        task.load_dataset(p)?;
    }
    if let Some(p) = observations {
        task.load_observations(p)?;
    }
    let obs = task.require_observations()?;
    let r = recover_decision(task.require_dataset()?, &obs, &task.lp, &task.c_set)?;
    emit_json(
        args,
        &DecideOut {
            c_hat: r.c_hat,
            decision: r.decision,
            residual: r.residual,
            objective: r.objective_at_c_hat,
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct OracleOut {
    vertices: usize,
    passed: bool,
    checks: Vec<CheckRow>,
}

fn span_row(name: &'static str, a: &SpanBasis, b: &SpanBasis) -> CheckRow {
    CheckRow {
        name,
        passed: a.subspace_equal(b),
        detail: format!("dims {} and {}", a.dim(), b.dim()),
    }
}

fn oracle_verify(args: &TaskArgs, seed: u64) -> Result<u8> {
    let task = load(args)?;
    let lp = &task.lp;
    let catalog = enumerate_vertices(lp)?;
    log::info!("{} vertices", catalog.len());
    let all: Vec<usize> = (0..catalog.len()).collect();
    let d = lp.n_original();
    let mut rows = Vec::new();

    let reach = if task.c_set.is_unrestricted() {
        dir_of_vertices(lp, &catalog, &all)?
    } else {
        let reach = reachable_dir(lp, &catalog, &task.c_set, 0.0)?;
        let edges = relevant_extreme_directions(lp, &catalog, &task.c_set, 0.0)?;
        rows.push(span_row("edge_span_equals_reachable_dir", &SpanBasis::from_vectors(d, &edges)?, &reach));
        reach
    };
    rows.push(span_row(
        "all_vertex_dir_equals_f0_cap_kernel",
        &dir_of_vertices(lp, &catalog, &all)?,
        &f0_cap_kernel(lp)?,
    ));
    rows.push(span_row("dir_basis_equals_oracle", &directions(args, &task, seed)?.basis, &reach));

    let mut costs = vec![task.c_set.find_point()?];
    for i in 0..d {
        costs.push(unit(d, i));
        costs.push(unit(d, i).iter().map(|x| -x).collect());
    }
    let mut worst = 0.0f64;
    for c in &costs {
        let cost = lp.embed_cost(c)?;
        let got = dot(&cost, &solve_lp(lp, &cost)?.x);
        let best = catalog.vertices.iter().map(|v| dot(&cost, v)).fold(f64::INFINITY, f64::min);
        worst = worst.max((got - best).abs() / (1.0 + best.abs()));
    }
    rows.push(CheckRow {
        name: "lp_matches_enumeration",
        passed: worst <= SOLVE_TOL,
        detail: format!("{} costs, worst relative gap {worst:.3e}", costs.len()),
    });

    let passed = rows.iter().all(|r| r.passed);
    match args.format {
        Format::Json => emit_json(
            args,
            &OracleOut {
                vertices: catalog.len(),
                passed,
                checks: rows,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "passed", "detail"])?;
            for r in &rows {
                w.write_record([r.name, if r.passed { "true" } else { "false" }, &r.detail])?;
            }
            emit(args.output.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
        }
    }
    Ok(if passed { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn hiring(
    output: Option<&Path>,
    svg: Option<&Path>,
    d: usize,
    variant: Variant,
    etas: &[f64],
    seed: u64,
    omit_timing: bool,
    format: Format,
) -> Result<u8> {
    let mut report = run_experiment(etas, variant, seed, d)?;
    if omit_timing {
        report.runs.iter_mut().for_each(|r| r.wall_time_ms = 0);
    }
    for r in &report.runs {
        log::info!("eta {}: {} interviews in {} ms", r.eta, r.count, r.wall_time_ms);
    }
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    emit(output, &text)?;
    if let Some(p) = svg {
        std::fs::write(p, report.to_svg()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(0)
}
