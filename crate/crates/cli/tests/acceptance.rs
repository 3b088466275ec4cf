//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! run with `cargo test -p ltl-cli --test acceptance -- --nocapture` to see them.

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ltl_core::dsl::{parse, Bindings, FieldExpr, Var};
use ltl_core::ltl::{build_frames, laplacian, vertex_gradient, LtlConfig, LtlOperator, TangentFrame};
use ltl_core::mesh::{build_adjacency, gen_icosphere, gen_torus, TriangleMesh, Vec3};
use ltl_core::solver::{
    run_heat, run_turing, stability_dt, step_turing, HeatProblem, RunControl, SteadyCriterion, Termination,
    TuringParams, TuringProblem, DEFAULT_STABILITY_C,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TURING: TuringParams = TuringParams { alpha: 1.0, beta: 2.0, s: 2.0 };

struct Report {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn criterion(id: usize, title: &'static str, limit: Duration, check: impl FnOnce() -> Result<String, String>) -> Report {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let timing = format!("{:.1} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs());
    let (passed, detail) = match result {
        Ok(d) if elapsed <= limit => (true, format!("{d} ({timing})")),
        Ok(d) => (false, format!("{d} (too slow: {timing})")),
        Err(d) => (false, format!("{d} ({timing})")),
    };
    let report = Report { id, title, passed, detail };
    println!(
        "{} [{}] {}: {}",
        if report.passed { "PASS" } else { "FAIL" },
        report.id,
        report.title,
        report.detail
    );
    report
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coords(mesh: &TriangleMesh, k: usize) -> Vec<f64> {
    mesh.vertices().iter().map(|p| p[k]).collect()
}

fn rel_l2(approx: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = approx.iter().zip(exact).map(|(a, e)| (a - e).powi(2)).sum();
    let den: f64 = exact.iter().map(|e| e * e).sum();
    (num / den).sqrt()
}

/// Jittered hexagonal patch of the triangular lattice in the plane z = 0,
/// with a flag per vertex telling whether it is off the boundary.
fn flat_disc(rings: i64, jitter: f64, seed: u64) -> (TriangleMesh, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside = |q: i64, r: i64, n: i64| q.abs() <= n && r.abs() <= n && (q + r).abs() <= n;
    let mut index = HashMap::new();
    let mut vertices = Vec::new();
    let mut interior = Vec::new();
    for q in -rings..=rings {
        for r in -rings..=rings {
            if !inside(q, r, rings) {
                continue;
            }
            let mut p = Vec3::new(q as f64 + 0.5 * r as f64, r as f64 * 3f64.sqrt() / 2.0, 0.0);
            let is_interior = inside(q, r, rings - 1);
            if is_interior {
                p.x += jitter * rng.random_range(-1.0..1.0);
                p.y += jitter * rng.random_range(-1.0..1.0);
            }
            index.insert((q, r), vertices.len());
            vertices.push(p);
            interior.push(is_interior);
        }
    }
    let mut faces = Vec::new();
    for q in -rings..=rings {
        for r in -rings..=rings {
            let at = |dq: i64, dr: i64| index.get(&(q + dq, r + dr)).copied();
            if let (Some(a), Some(b), Some(c)) = (at(0, 0), at(1, 0), at(0, 1)) {
                faces.push([a, b, c]);
            }
            if let (Some(a), Some(b), Some(c)) = (at(1, 0), at(1, 1), at(0, 1)) {
                faces.push([a, b, c]);
            }
        }
    }
    (TriangleMesh::new(vertices, faces).unwrap(), interior)
}

fn flat_exactness() -> Result<String, String> {
    let (mesh, interior) = flat_disc(14, 0.25, 2024);
    let n_interior = interior.iter().filter(|&&i| i).count();
    ensure(n_interior >= 500, || format!("only {n_interior} interior vertices"))?;
    let adj = build_adjacency(&mesh).map_err(|e| e.to_string())?;
    let cfg = LtlConfig::default();
    let frames = build_frames(&mesh, &adj, &cfg).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut grad_err, mut lap_max, mut lap_count) = (0.0f64, 0.0f64, 0);
    for _ in 0..10 {
        let (a, b, c): (f64, f64, f64) =
            (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let h: Vec<f64> = mesh.vertices().iter().map(|p| a + b * p.x + c * p.y).collect();
        for v in (0..mesh.n_vertices()).filter(|&v| interior[v]) {
            let g = vertex_gradient(&mesh, &adj, &frames, &h, v, &cfg).map_err(|e| e.to_string())?;
            grad_err = grad_err.max((g.ambient - Vec3::new(b, c, 0.0)).norm());
            // The Laplacian also reads the neighbors' gradients.
            if adj[v].neighbors.iter().all(|&n| interior[n]) {
                let lap = laplacian(&mesh, &adj, &frames, &h, v, &cfg).map_err(|e| e.to_string())?;
                lap_max = lap_max.max(lap.abs());
                lap_count += 1;
            }
        }
    }
    ensure(grad_err < 1e-9, || format!("gradient error {grad_err:e} >= 1e-9"))?;
    ensure(lap_max < 1e-7, || format!("Laplacian {lap_max:e} >= 1e-7"))?;
    Ok(format!(
        "{n_interior} interior vertices, 10 affine fields; max gradient error {grad_err:.1e} < 1e-9, \
         max |Laplacian| {lap_max:.1e} < 1e-7 over {lap_count} evaluations"
    ))
}

fn sphere_convergence() -> Result<String, String> {
    let mut errors = Vec::new();
    for s in 2..=4 {
        let mesh = gen_icosphere(s).unwrap();
        let op = LtlOperator::new(mesh.clone()).map_err(|e| e.to_string())?;
        let x1 = coords(&mesh, 0);
        let lap = op.laplacian_field(&x1).map_err(|e| e.to_string())?;
        let exact: Vec<f64> = x1.iter().map(|x| -2.0 * x).collect();
        errors.push(rel_l2(&lap, &exact));
    }
    let text = format!("relative L2 errors {:.3e}, {:.3e}, {:.3e}", errors[0], errors[1], errors[2]);
    ensure(errors.windows(2).all(|w| w[1] <= w[0]), || format!("{text} not non-increasing"))?;
    let ratio = errors[0] / errors[2];
    ensure(ratio >= 2.0, || format!("{text}; improvement {ratio:.2} < 2"))?;
    Ok(format!("{text}; subdiv 2 / subdiv 4 = {ratio:.2} >= 2"))
}

fn basis_invariance() -> Result<String, String> {
    let mesh = gen_icosphere(3).unwrap();
    let op = LtlOperator::new(mesh.clone()).map_err(|e| e.to_string())?;
    let x1 = coords(&mesh, 0);
    let reference = op.laplacian_field(&x1).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let frames: Vec<TangentFrame> = op
            .frames()
            .iter()
            .map(|f| f.rotated(rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let rotated = LtlOperator::from_parts(mesh.clone(), op.adjacency().clone(), frames, LtlConfig::default())
            .map_err(|e| e.to_string())?;
        let lap = rotated.laplacian_field(&x1).map_err(|e| e.to_string())?;
        worst = lap.iter().zip(reference.iter()).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    ensure(worst < 1e-9, || format!("max change {worst:e} >= 1e-9"))?;
    Ok(format!("20 random frame rotations, max change {worst:.1e} < 1e-9"))
}

fn heat_sphere() -> Result<String, String> {
    let mesh = gen_icosphere(3).unwrap();
    let op = LtlOperator::new(mesh.clone()).map_err(|e| e.to_string())?;
    let x1 = coords(&mesh, 0);
    let problem = HeatProblem {
        source: x1.clone(),
        initial: vec![0.0; mesh.n_vertices()],
        control: RunControl::new(stability_dt(&mesh, DEFAULT_STABILITY_C), 200_000),
    };
    let trace = run_heat(&op, &problem).map_err(|e| e.to_string())?;
    ensure(trace.termination == Termination::Steady, || {
        format!("terminated {} after {} steps", trace.termination, trace.steps())
    })?;
    let half: Vec<f64> = x1.iter().map(|x| 0.5 * x).collect();
    let err = rel_l2(&trace.last().fields[0], &half);
    ensure(err < 0.1, || format!("relative L2 error vs x1/2 {err:.3e} >= 0.1"))?;
    Ok(format!("steady after {} steps; relative L2 error vs x1/2 {err:.3e} < 0.1", trace.steps()))
}

fn heat_torus() -> Result<String, String> {
    let mesh = gen_torus(2.0, 1.0, 15, 31).unwrap();
    let op = LtlOperator::new(mesh.clone()).map_err(|e| e.to_string())?;
    let g: Vec<f64> = mesh.params().unwrap().iter().map(|p| p[0]).collect();
    let mut control = RunControl::new(stability_dt(&mesh, DEFAULT_STABILITY_C), 200_000);
    control.criterion = SteadyCriterion::Profile;
    let problem = HeatProblem {
        source: g,
        initial: vec![0.0; mesh.n_vertices()],
        control,
    };
    let trace = run_heat(&op, &problem).map_err(|e| e.to_string())?;
    ensure(!matches!(trace.termination, Termination::BlowUp { .. }), || "blew up".into())?;
    ensure(trace.termination == Termination::ProfileSteady, || {
        format!("terminated {} after {} steps", trace.termination, trace.steps())
    })?;
    let profile = *trace.profile_update.last().unwrap();
    let raw = *trace.max_update.last().unwrap();
    ensure(profile < 1e-6, || format!("profile update {profile:e}"))?;
    ensure(trace.profile_update.len() == trace.steps(), || "diagnostic missing".into())?;
    Ok(format!(
        "profile-steady after {} steps; last profile update {profile:.3e} < 1e-6 while the raw update stays {raw:.3e}",
        trace.steps()
    ))
}

fn turing() -> Result<String, String> {
    let op = LtlOperator::new(gen_torus(2.0, 1.0, 15, 31).unwrap()).map_err(|e| e.to_string())?;
    let n = op.n_vertices();
    let dt = stability_dt(op.mesh(), DEFAULT_STABILITY_C);
    let gamma = vec![0.0; n];

    let (mut u1, mut u2) = (vec![1.0; n], vec![16.0; n]);
    for _ in 0..10_000 {
        (u1, u2) = step_turing(&op, &u1, &u2, &TURING, &gamma, dt).map_err(|e| e.to_string())?;
    }
    let drift = u1.iter().map(|x| (x - 1.0).abs()).chain(u2.iter().map(|x| (x - 16.0).abs())).fold(0.0, f64::max);
    ensure(drift < 1e-10, || format!("fixed point drifted by {drift:e}"))?;

    let problem = TuringProblem {
        params: TURING,
        gamma_amplitude: 0.0,
        seed: 0,
        initial_u1: vec![1.0; n],
        initial_u2: vec![1.0; n],
        control: RunControl::new(dt, 1000),
    };
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let (mut u1, mut u2) = (problem.initial_u1.clone(), problem.initial_u2.clone());
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        (u1, u2) = step_turing(&op, &u1, &u2, &TURING, &gamma, dt).map_err(|e| e.to_string())?;
        (a, b) = (a + dt * TURING.s * (16.0 - a * b), b + dt * TURING.s * (a * b - b));
        worst = u1.iter().map(|x| (x - a).abs()).chain(u2.iter().map(|x| (x - b).abs())).fold(worst, f64::max);
    }
    ensure(worst < 1e-8, || format!("deviation from the ODE {worst:e} >= 1e-8"))?;
    let trace = run_turing(&op, &problem).map_err(|e| e.to_string())?;
    let last = trace.last();
    let solver_dev = (last.fields[0][0] - a).abs().max((last.fields[1][0] - b).abs());
    ensure(trace.steps() < 1000 || solver_dev < 1e-8, || format!("run_turing deviates by {solver_dev:e}"))?;
    Ok(format!(
        "(1, 16) held to {drift:.1e} < 1e-10 over 10000 steps; (1, 1) start within {worst:.1e} < 1e-8 of the ODE over 1000 steps"
    ))
}

fn ltl(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ltl"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn ltl")
}

fn reproducible_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| e.file_name().into_string().unwrap())
        .filter(|name| name != "timings.txt")
        .map(|name| {
            let bytes = fs::read(dir.join(&name)).unwrap();
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Result<String, String> {
    let recipes = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
    let mut names: Vec<_> = fs::read_dir(&recipes)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    names.sort();
    ensure(names.len() == 4, || format!("expected 4 recipes, found {}", names.len()))?;
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total_files = 0;
    for recipe in &names {
        let stem = recipe.file_stem().unwrap().to_string_lossy().into_owned();
        let recipe = recipe.to_str().unwrap();
        let mut runs = Vec::new();
        for k in 0..2 {
            let out = format!("{stem}_{k}");
            let o = ltl(&["run", recipe, "--out", &out], work.path());
            ensure(o.status.success(), || {
                format!("{stem} run {k} failed: {}", String::from_utf8_lossy(&o.stderr))
            })?;
            runs.push(reproducible_files(&work.path().join(out)));
        }
        ensure(runs[0] == runs[1], || format!("{stem}: the two runs differ"))?;
        ensure(runs[0].iter().any(|(n, _)| n == "metadata.txt"), || format!("{stem}: no metadata"))?;
        total_files += runs[0].len();
        let o = ltl(&["run", recipe, "--out", &format!("{stem}_verify"), "--verify"], work.path());
        ensure(o.status.success(), || {
            format!("{stem} --verify failed: {}", String::from_utf8_lossy(&o.stderr))
        })?;
    }
    Ok(format!(
        "4 recipes run twice: {total_files} files byte-identical per run; --verify passes for all"
    ))
}

const FUNCS: [&str; 5] = ["sin", "cos", "exp", "sqrt", "abs"];
const VARS: [&str; 5] = ["x1", "x2", "x3", "u", "v"];

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.7) {
            VARS[rng.random_range(0..5)].to_string()
        } else {
            format!("{:.3}", rng.random_range(0.1..4.0))
        };
    }
    match rng.random_range(0..6) {
        0..=3 => {
            let op = ["+", "-", "*", "/"][rng.random_range(0..4)];
            format!("({}) {op} ({})", random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
        4 => format!("-({})", random_expr(rng, depth - 1)),
        _ => format!("{}({})", FUNCS[rng.random_range(0..5)], random_expr(rng, depth - 1)),
    }
}

fn bindings(p: [f64; 5]) -> Bindings {
    Bindings::ambient([p[0], p[1], p[2]]).with_params([p[3], p[4]])
}

fn central(e: &FieldExpr, p: [f64; 5], k: usize, h: f64) -> Option<f64> {
    let at = |t: f64| {
        let mut q = p;
        q[k] += t;
        e.evaluate(&bindings(q)).ok()
    };
    Some((at(h)? - at(-h)?) / (2.0 * h))
}

/// Number of derivative comparisons made for `e`, or the first disagreement.
fn check_derivatives(e: &FieldExpr, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let points: Vec<[f64; 5]> = (0..8).map(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0))).collect();
    let mut checked = 0;
    for (k, var) in Var::ALL.into_iter().enumerate() {
        let de = e.differentiate(var);
        for &p in &points {
            let (Ok(f), Ok(sym)) = (e.evaluate(&bindings(p)), de.evaluate(&bindings(p))) else {
                continue;
            };
            let (Some(fd), Some(fd2)) = (central(e, p, k, 1e-5), central(e, p, k, 2e-5)) else {
                continue;
            };
            // Skip points where the difference quotient itself is unreliable.
            if f.abs() > 1e6 || (fd - fd2).abs() > 1e-7 * 1f64.max(fd.abs()) {
                continue;
            }
            if (sym - fd).abs() > 1e-5 * 1f64.max(sym.abs()) {
                return Err(format!("d/d{var} of {e} at {p:?}: symbolic {sym} vs difference {fd}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn dsl() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut passed, mut comparisons, mut drawn) = (0, 0, 0);
    while passed < 100 {
        drawn += 1;
        ensure(drawn <= 2000, || format!("only {passed} checkable expressions in 2000 draws"))?;
        let text = random_expr(&mut rng, 4);
        let e = parse(&text).map_err(|err| format!("'{text}' failed to parse: {err}"))?;
        let n = check_derivatives(&e, &mut rng)?;
        if n > 0 {
            passed += 1;
            comparisons += n;
        }
    }
    let alphabet: Vec<u8> = b"x1x2x3uv()+-*/.e0123456789 sincosexpsqrtabs\t\n".to_vec();
    let mut crashes = 0;
    for i in 0..10_000 {
        let len = rng.random_range(0..48);
        let bytes: Vec<u8> = (0..len)
            .map(|_| if i % 2 == 0 { rng.random() } else { alphabet[rng.random_range(0..alphabet.len())] })
            .collect();
        let text = String::from_utf8_lossy(&bytes).into_owned();
        match catch_unwind(|| parse(&text).map(|e| parse(&e.to_string()).map(|again| again == e))) {
            Err(_) => crashes += 1,
            Ok(Ok(Ok(false) | Err(_))) => return Err(format!("round trip failed for {text:?}")),
            Ok(_) => {}
        }
    }
    ensure(crashes == 0, || format!("{crashes} parser panics"))?;
    Ok(format!(
        "100 random expressions ({comparisons} comparisons) within 1e-5 relative; 10000 fuzzed inputs, no panics"
    ))
}

#[test]
fn acceptance() {
    std::panic::set_hook(Box::new(|_| {}));
    let secs = Duration::from_secs;
    let reports = [
        criterion(1, "flat-mesh exactness", secs(5), flat_exactness),
        criterion(2, "sphere eigenfunction convergence", secs(60), sphere_convergence),
        criterion(3, "tangent basis invariance", secs(30), basis_invariance),
        criterion(4, "sphere heat steady state", secs(600), heat_sphere),
        criterion(5, "torus heat profile-steadiness", secs(600), heat_torus),
        criterion(6, "Turing fixed point and ODE agreement", secs(120), turing),
        criterion(7, "determinism and --verify", secs(900), determinism),
        criterion(8, "field expression derivatives and parser totality", secs(60), dsl),
    ];
    let _ = std::panic::take_hook();
    let failed: Vec<usize> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
