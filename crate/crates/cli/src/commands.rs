use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use ltl_core::dsl::FieldExpr;
use ltl_core::ltl::{LtlOperator, OperatorError};
use ltl_core::mesh::{gen_icosphere, gen_torus, save_mesh, validate, MeshFormat, NamedField, TriangleMesh};
use ltl_core::oracle::{oracle_on_mesh, SurfaceFamily};
use ltl_core::solver::{
    run_heat, run_turing, sample_gamma, stability_dt, HeatProblem, RunControl, SolveTrace, SolverError,
    SteadyCriterion, Termination, TuringParams, TuringProblem,
};

use crate::args::{
    ConvergenceArgs, Criterion, Family, GenCommand, HeatArgs, MeshCommand, Operator, OpsArgs, OutputArgs,
    RunArgs, StepArgs, TuringArgs,
};
use crate::config::read_config;
use crate::output::{field_file, Metadata, RunDir, TIMINGS_FILE};
use crate::source::{mesh_stats, parse_expr, sample, MeshSource};
use crate::CliError;

const TORUS_EMBEDDING: &str = "((a + r cos u) cos v, (a + r cos u) sin v, r sin u)";
const INTEGRATOR: &str = "forward Euler; all vertices updated from the previous step";

/// Hashes of the reproducible outputs of one run, and its exit code.
struct Outcome {
    code: i32,
    hashes: BTreeMap<String, String>,
}

fn save(mesh: &TriangleMesh, path: &Path) -> Result<(), CliError> {
    let format = MeshFormat::from_path(path).map_err(|e| CliError::input(e.to_string()))?;
    save_mesh(mesh, &[], path, format).map_err(|e| CliError::input(e.to_string()))
}

pub fn mesh(cmd: MeshCommand) -> Result<i32, CliError> {
    match cmd {
        MeshCommand::Gen(gen) => {
            let (mesh, output) = match gen {
                GenCommand::Sphere { subdiv, output } => (gen_icosphere(subdiv), output),
                GenCommand::Torus { a, r, nu, nv, output } => (gen_torus(a, r, nu, nv), output),
            };
            let mesh = mesh.map_err(|e| CliError::input(e.to_string()))?;
            save(&mesh, &output)?;
            println!(
                "wrote {} ({} vertices, {} faces)",
                output.display(),
                mesh.n_vertices(),
                mesh.n_faces()
            );
        }
        MeshCommand::Info { mesh } => {
            let mesh = MeshSource::parse(&mesh)?.load()?;
            println!("{}", validate(&mesh));
        }
        MeshCommand::Convert { input, output } => {
            let mesh = MeshSource::parse(&input)?.load()?;
            save(&mesh, &output)?;
            println!("wrote {}", output.display());
        }
    }
    Ok(0)
}

fn operator_error(e: OperatorError) -> CliError {
    CliError::operator(e.to_string())
}

fn build_operator(mesh: &TriangleMesh) -> Result<LtlOperator, CliError> {
    LtlOperator::new(mesh.clone()).map_err(operator_error)
}

/// Runs `job` into `output.out`; with `--verify`, runs it again into a
/// scratch directory and compares every hashed output.
fn with_verify(output: &OutputArgs, job: impl Fn(&Path, bool) -> Result<Outcome, CliError>) -> Result<i32, CliError> {
    let first = job(&output.out, false)?;
    if output.verify {
        let scratch = tempfile::tempdir().map_err(|e| CliError::input(format!("scratch directory: {e}")))?;
        let second = job(scratch.path(), true)?;
        let mismatched: Vec<&String> = first
            .hashes
            .iter()
            .filter(|(name, hash)| second.hashes.get(*name) != Some(hash))
            .map(|(name, _)| name)
            .chain(second.hashes.keys().filter(|n| !first.hashes.contains_key(*n)))
            .collect();
        if !mismatched.is_empty() {
            let names: Vec<&str> = mismatched.iter().map(|s| s.as_str()).collect();
            return Err(CliError::verify(format!("re-run differs in {}", names.join(", "))));
        }
        println!("verify: {} outputs reproduced byte for byte", first.hashes.len());
    }
    Ok(first.code)
}

fn write_timings(run: &RunDir, phases: &[(&str, f64)]) -> Result<(), CliError> {
    let mut text = String::from("# wall-clock seconds; not part of the reproducible output\n");
    for (name, secs) in phases {
        let _ = writeln!(text, "{name} = {secs:.6}");
    }
    run.write_unhashed(TIMINGS_FILE, &text)
}

pub fn ops(args: OpsArgs) -> Result<i32, CliError> {
    let source = MeshSource::parse(&args.mesh)?;
    with_verify(&args.output, |out, quiet| {
        let t0 = Instant::now();
        let mesh = source.load()?;
        let expr = parse_expr("field", &args.field)?;
        let h = sample("field", &expr, &mesh)?;
        let op = build_operator(&mesh)?;
        let t1 = Instant::now();
        let mut run = RunDir::create(out)?;
        let ext = args.output.format.extension();
        let (name, text) = match args.operator {
            Operator::Laplacian => {
                let lap = op.laplacian_field(&h).map_err(operator_error)?;
                let fields = [
                    NamedField { name: "field", values: &h },
                    NamedField { name: "laplacian", values: &lap },
                ];
                ("laplacian", field_file(&mesh, &fields, args.output.format)?)
            }
            Operator::Grad => {
                let grad = op.gradient_field(&h).map_err(operator_error)?;
                let comp = |k: usize| grad.ambient.iter().map(|g| g[k]).collect::<Vec<f64>>();
                let (gx, gy, gz) = (comp(0), comp(1), comp(2));
                let fields = [
                    NamedField { name: "field", values: &h },
                    NamedField { name: "gx", values: &gx },
                    NamedField { name: "gy", values: &gy },
                    NamedField { name: "gz", values: &gz },
                ];
                ("grad", field_file(&mesh, &fields, args.output.format)?)
            }
        };
        let t2 = Instant::now();
        run.write(&format!("{name}.{ext}"), &text)?;
        let mut meta = Metadata::new();
        meta.set("command", format!("ops {name}"));
        source.describe(&mut meta)?;
        mesh_stats(&mesh, &mut meta);
        meta.set("field", &args.field)
            .set("format", ext)
            .set("transport_fallbacks", op.transport_fallbacks());
        run.finish(&meta)?;
        write_timings(&run, &[("setup", (t1 - t0).as_secs_f64()), ("operator", (t2 - t1).as_secs_f64())])?;
        if !quiet {
            println!("wrote {}", run.root().join(format!("{name}.{ext}")).display());
        }
        Ok(Outcome {
            code: 0,
            hashes: run.hashes().clone(),
        })
    })
}

/// Mesh, operator and resolved step control shared by both solvers.
struct Setup {
    source: MeshSource,
    mesh: TriangleMesh,
    op: LtlOperator,
    control: RunControl,
}

fn setup(step: &StepArgs) -> Result<Setup, CliError> {
    let source = MeshSource::parse(&step.mesh)?;
    let mesh = source.load()?;
    let op = build_operator(&mesh)?;
    let dt = if step.dt == "auto" {
        stability_dt(&mesh, step.stability_c)
    } else {
        step.dt
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("--dt must be a number or 'auto', got '{}'", step.dt)))?
    };
    let control = RunControl {
        dt,
        max_steps: step.max_steps,
        steady_tol: step.steady_tol,
        criterion: match step.criterion {
            Criterion::Strict => SteadyCriterion::Strict,
            Criterion::Profile => SteadyCriterion::Profile,
        },
    };
    Ok(Setup { source, mesh, op, control })
}

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::Operator(e) => operator_error(e),
        SolverError::InvalidProblem(m) => CliError::config(m),
        SolverError::BlowUp { .. } => CliError::blowup(e.to_string()),
    }
}

fn describe_step(s: &Setup, step: &StepArgs, meta: &mut Metadata) -> Result<(), CliError> {
    s.source.describe(meta)?;
    mesh_stats(&s.mesh, meta);
    meta.set("dt.requested", &step.dt)
        .set_f64("stability_c", step.stability_c)
        .set_f64("dt", s.control.dt)
        .set("max_steps", step.max_steps)
        .set_f64("steady_tol", step.steady_tol)
        .set("criterion", format!("{:?}", step.criterion).to_lowercase())
        .set("convention.time_integrator", INTEGRATOR)
        .set("convention.torus_embedding", TORUS_EMBEDDING);
    Ok(())
}

/// Writes snapshots, the final state and the trace; returns the exit code.
fn write_trace(
    run: &mut RunDir,
    mesh: &TriangleMesh,
    trace: &SolveTrace,
    extra: &[NamedField<'_>],
    output: &OutputArgs,
    meta: &mut Metadata,
) -> Result<i32, CliError> {
    let ext = output.format.extension();
    fn fields_of<'a>(names: &[&'static str], fields: &'a [Vec<f64>], extra: &[NamedField<'a>]) -> Vec<NamedField<'a>> {
        let mut named: Vec<NamedField<'a>> = names
            .iter()
            .zip(fields)
            .map(|(name, values)| NamedField { name, values })
            .collect();
        named.extend_from_slice(extra);
        named
    }
    for snap in &trace.snapshots {
        let text = field_file(mesh, &fields_of(&trace.field_names, &snap.fields, extra), output.format)?;
        run.write(&format!("snapshot_{:07}.{ext}", snap.step), &text)?;
    }
    let last = trace.last();
    run.write(&format!("final.{ext}"), &field_file(mesh, &fields_of(&trace.field_names, &last.fields, extra), output.format)?)?;

    let mut csv = String::from("# schema = ltl-trace/1\nstep,time,max_update,profile_update\n");
    for (k, (m, p)) in trace.max_update.iter().zip(&trace.profile_update).enumerate() {
        let step = k + 1;
        let _ = writeln!(csv, "{step},{:?},{m:?},{p:?}", step as f64 * trace.dt);
    }
    run.write("trace.csv", &csv)?;

    meta.set("termination", trace.termination)
        .set("steps", trace.steps())
        .set("final.step", last.step)
        .set_f64("final.time", last.time);
    let finite_tail = |series: &[f64]| series.iter().rev().copied().find(|x| x.is_finite());
    if let Some(m) = finite_tail(&trace.max_update) {
        meta.set_f64("final.max_update", m);
    }
    if let Some(p) = finite_tail(&trace.profile_update) {
        meta.set_f64("final.profile_update", p);
    }
    for (name, values) in trace.field_names.iter().zip(&last.fields) {
        meta.set_f64(&format!("final.mean.{name}"), values.iter().sum::<f64>() / values.len() as f64);
    }
    Ok(match trace.termination {
        Termination::BlowUp { .. } => 4,
        _ => 0,
    })
}

fn report(quiet: bool, trace: &SolveTrace, out: &Path) {
    if quiet {
        return;
    }
    let last = trace.last();
    match trace.termination {
        Termination::BlowUp { step } => eprintln!(
            "error: solution blew up at step {step}; last finite state (step {}) kept in {}",
            last.step,
            out.display()
        ),
        t => println!(
            "termination = {t} after {} steps (t = {:?}); outputs in {}",
            trace.steps(),
            last.time,
            out.display()
        ),
    }
}

pub fn heat(args: HeatArgs) -> Result<i32, CliError> {
    with_verify(&args.output, |out, quiet| {
        let t0 = Instant::now();
        let s = setup(&args.step)?;
        let g = sample("g", &parse_expr("g", &args.g)?, &s.mesh)?;
        let u0 = sample("u0", &parse_expr("u0", &args.u0)?, &s.mesh)?;
        let problem = HeatProblem {
            source: g.clone(),
            initial: u0,
            control: s.control,
        };
        let t1 = Instant::now();
        let trace = run_heat(&s.op, &problem).map_err(solver_error)?;
        let t2 = Instant::now();

        let mut run = RunDir::create(out)?;
        let mut meta = Metadata::new();
        meta.set("command", "solve heat");
        describe_step(&s, &args.step, &mut meta)?;
        meta.set("g", &args.g)
            .set("u0", &args.u0)
            .set("format", args.output.format.extension())
            .set("equation", "u_t = Lap u + g");
        let code = write_trace(&mut run, &s.mesh, &trace, &[NamedField { name: "g", values: &g }], &args.output, &mut meta)?;
        run.finish(&meta)?;
        write_timings(&run, &[("setup", (t1 - t0).as_secs_f64()), ("solve", (t2 - t1).as_secs_f64())])?;
        report(quiet, &trace, out);
        Ok(Outcome {
            code,
            hashes: run.hashes().clone(),
        })
    })
}

pub fn turing(args: TuringArgs) -> Result<i32, CliError> {
    with_verify(&args.output, |out, quiet| {
        let t0 = Instant::now();
        let s = setup(&args.step)?;
        let u1 = sample("u10", &parse_expr("u10", &args.u10)?, &s.mesh)?;
        let u2 = sample("u20", &parse_expr("u20", &args.u20)?, &s.mesh)?;
        let problem = TuringProblem {
            params: TuringParams {
                alpha: args.alpha,
                beta: args.beta,
                s: args.s,
            },
            gamma_amplitude: args.gamma_amp,
            seed: args.seed,
            initial_u1: u1,
            initial_u2: u2,
            control: s.control,
        };
        let t1 = Instant::now();
        let trace = run_turing(&s.op, &problem).map_err(solver_error)?;
        let t2 = Instant::now();
        let gamma = sample_gamma(s.mesh.n_vertices(), args.gamma_amp, args.seed);

        let mut run = RunDir::create(out)?;
        let mut meta = Metadata::new();
        meta.set("command", "solve turing");
        describe_step(&s, &args.step, &mut meta)?;
        meta.set_f64("alpha", args.alpha)
            .set_f64("beta", args.beta)
            .set_f64("s", args.s)
            .set_f64("gamma_amp", args.gamma_amp)
            .set("seed", args.seed)
            .set("u10", &args.u10)
            .set("u20", &args.u20)
            .set("format", args.output.format.extension())
            .set(
                "convention.reaction",
                "u1_t = s(16 - u1 u2) + alpha Lap u1; u2_t = s(u1 u2 - u2 - gamma) + beta Lap u2",
            )
            .set(
                "convention.gamma",
                "frozen per-vertex uniform draw in [-gamma_amp, gamma_amp] from ChaCha8 seeded with seed",
            );
        let extra = [NamedField { name: "gamma", values: &gamma }];
        let code = write_trace(&mut run, &s.mesh, &trace, &extra, &args.output, &mut meta)?;
        run.finish(&meta)?;
        write_timings(&run, &[("setup", (t1 - t0).as_secs_f64()), ("solve", (t2 - t1).as_secs_f64())])?;
        report(quiet, &trace, out);
        Ok(Outcome {
            code,
            hashes: run.hashes().clone(),
        })
    })
}

fn parse_levels(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::config(format!("--levels must look like '2..4' or '2,3,4', got '{text}'"));
    let levels: Vec<u32> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        text.split(',').map(|l| l.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if levels.is_empty() {
        return Err(bad());
    }
    Ok(levels)
}

/// The torus grid used for convergence level `k`; both counts are odd.
pub fn torus_grid(level: u32) -> (usize, usize) {
    ((1usize << (level + 2)) - 1, (1usize << (level + 3)) - 1)
}

/// One row of a convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub n_vertices: usize,
    pub h_min: f64,
    pub l2_error: f64,
    pub linf_error: f64,
}

/// Vertex-averaged (root mean square) and maximum pointwise error.
fn level_errors(op: &LtlOperator, expr: &FieldExpr, family: SurfaceFamily, operator: Operator) -> Result<(f64, f64), CliError> {
    let mesh = op.mesh();
    let exact = oracle_on_mesh(family, expr, mesh).map_err(|e| CliError::config(format!("no exact reference: {e}")))?;
    let h = sample("field", expr, mesh)?;
    let errors: Vec<f64> = match operator {
        Operator::Laplacian => {
            let lap = op.laplacian_field(&h).map_err(operator_error)?;
            lap.iter().zip(&exact).map(|(a, e)| (a - e.laplacian).abs()).collect()
        }
        Operator::Grad => {
            let grad = op.gradient_field(&h).map_err(operator_error)?;
            grad.ambient.iter().zip(&exact).map(|(a, e)| (a - e.gradient).norm()).collect()
        }
    };
    let l2 = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let linf = errors.iter().fold(0.0f64, |m, e| m.max(*e));
    Ok((l2, linf))
}

pub fn convergence_rows(args: &ConvergenceArgs) -> Result<Vec<ConvergenceRow>, CliError> {
    let expr = parse_expr("field", &args.field)?;
    let family = match args.family {
        Family::Sphere => SurfaceFamily::Sphere { radius: 1.0 },
        Family::Torus => SurfaceFamily::Torus { a: args.a, r: args.r },
    };
    parse_levels(&args.levels)?
        .into_iter()
        .map(|level| {
            let mesh = match args.family {
                Family::Sphere => gen_icosphere(level),
                Family::Torus => {
                    let (nu, nv) = torus_grid(level);
                    gen_torus(args.a, args.r, nu, nv)
                }
            }
            .map_err(|e| CliError::input(e.to_string()))?;
            let op = build_operator(&mesh)?;
            let (l2_error, linf_error) = level_errors(&op, &expr, family, args.operator)?;
            Ok(ConvergenceRow {
                level,
                n_vertices: mesh.n_vertices(),
                h_min: mesh.min_edge_length(),
                l2_error,
                linf_error,
            })
        })
        .collect()
}

pub fn render_convergence(args: &ConvergenceArgs, rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("# schema = ltl-convergence/1\n");
    let _ = writeln!(
        out,
        "# family = {:?}; field = {}; operator = {:?}; errors are vertex RMS and max of |approx - exact|",
        args.family, args.field, args.operator
    );
    out.push_str("level,n_vertices,h_min,l2_error,linf_error,estimated_order\n");
    for (k, row) in rows.iter().enumerate() {
        let order = k
            .checked_sub(1)
            .map(|p| (rows[p].l2_error / row.l2_error).log2())
            .filter(|o| o.is_finite())
            .map(|o| format!("{o:?}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{:?},{order}",
            row.level, row.n_vertices, row.h_min, row.l2_error, row.linf_error
        );
    }
    out
}

pub fn convergence(args: ConvergenceArgs) -> Result<i32, CliError> {
    let rows = convergence_rows(&args)?;
    let csv = render_convergence(&args, &rows);
    match &args.output {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

pub fn recipe(args: RunArgs) -> Result<i32, CliError> {
    let config = read_config(&args.recipe)?;
    let Some(command) = config.command.filter(|c| !c.is_empty()) else {
        return Err(CliError::config(format!("{} has no `command` key", args.recipe.display())));
    };
    if command[0] == "run" {
        return Err(CliError::config("a recipe cannot run another recipe"));
    }
    let mut argv: Vec<OsString> = vec!["ltl".into()];
    argv.extend(command.iter().map(OsString::from));
    argv.push("--config".into());
    argv.push(args.recipe.clone().into());
    if let Some(out) = &args.out {
        argv.push("--out".into());
        argv.push(out.clone().into());
    }
    if args.verify {
        argv.push("--verify".into());
    }
    Ok(crate::run(argv))
}
