use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_field, integrate, max_abs, RunControl, SolveTrace, SolverError};
use crate::ltl::LtlOperator;

/// Diffusion rates and reaction scale of
///
/// ```text
/// u1_t = s(16 - u1·u2) + α Δu1
/// u2_t = s(u1·u2 - u2 - γ) + β Δu2
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuringParams {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuringProblem {
    pub params: TuringParams,
    /// `γ` is uniform in `[-amplitude, amplitude]`, drawn once per vertex.
    pub gamma_amplitude: f64,
    pub seed: u64,
    pub initial_u1: Vec<f64>,
    pub initial_u2: Vec<f64>,
    pub control: RunControl,
}

/// Frozen irregularity field: one uniform draw in `[-amplitude, amplitude]`
/// per vertex, in vertex order, from ChaCha8 seeded with `seed`.
pub fn sample_gamma(n_vertices: usize, amplitude: f64, seed: u64) -> Vec<f64> {
    if amplitude == 0.0 {
        return vec![0.0; n_vertices];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_vertices).map(|_| rng.random_range(-amplitude..=amplitude)).collect()
}

/// One forward Euler step of both species from the same pre-step state.
pub fn step_turing(
    op: &LtlOperator,
    u1: &[f64],
    u2: &[f64],
    params: &TuringParams,
    gamma: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let n = op.n_vertices();
    check_field("u1", u1, n)?;
    check_field("u2", u2, n)?;
    check_field("gamma", gamma, n)?;
    advance(op, u1, u2, params, gamma, dt)
}

fn advance(
    op: &LtlOperator,
    u1: &[f64],
    u2: &[f64],
    p: &TuringParams,
    gamma: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let (l1, l2) = (op.laplacian_vec(u1), op.laplacian_vec(u2));
    let mut next1 = Vec::with_capacity(u1.len());
    let mut next2 = Vec::with_capacity(u2.len());
    for v in 0..u1.len() {
        let (a, b) = (u1[v], u2[v]);
        next1.push(a + dt * (p.s * (16.0 - a * b) + p.alpha * l1[v]));
        next2.push(b + dt * (p.s * (a * b - b - gamma[v]) + p.beta * l2[v]));
    }
    if next1.iter().chain(&next2).all(|x| x.is_finite()) {
        Ok((next1, next2))
    } else {
        Err(SolverError::BlowUp {
            max_laplacian: max_abs(&l1).max(max_abs(&l2)),
        })
    }
}

pub fn run_turing(op: &LtlOperator, problem: &TuringProblem) -> Result<SolveTrace, SolverError> {
    let n = op.n_vertices();
    let p = problem.params;
    problem.control.check()?;
    if !(p.alpha >= 0.0 && p.beta >= 0.0 && p.s.is_finite()) {
        return Err(SolverError::InvalidProblem(format!(
            "diffusion rates must be non-negative (alpha = {}, beta = {}, s = {})",
            p.alpha, p.beta, p.s
        )));
    }
    if !(problem.gamma_amplitude >= 0.0 && problem.gamma_amplitude.is_finite()) {
        return Err(SolverError::InvalidProblem(format!(
            "gamma amplitude must be non-negative, got {}",
            problem.gamma_amplitude
        )));
    }
    check_field("u1", &problem.initial_u1, n)?;
    check_field("u2", &problem.initial_u2, n)?;
    let gamma = sample_gamma(n, problem.gamma_amplitude, problem.seed);
    let dt = problem.control.dt;
    let initial = vec![problem.initial_u1.clone(), problem.initial_u2.clone()];
    Ok(integrate(vec!["u1", "u2"], initial, &problem.control, |f| {
        let (a, b) = advance(op, &f[0], &f[1], &p, &gamma, dt)?;
        Ok(vec![a, b])
    }))
}
