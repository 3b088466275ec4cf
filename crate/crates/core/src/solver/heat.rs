use super::{check_field, integrate, max_abs, RunControl, SolveTrace, SolverError};
use crate::ltl::LtlOperator;

/// `u_t - Δu = g` with a time-independent source.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatProblem {
    pub source: Vec<f64>,
    pub initial: Vec<f64>,
    pub control: RunControl,
}

/// One forward Euler step `u + dt·(Δu + g)`.
pub fn step_heat(op: &LtlOperator, u: &[f64], g: &[f64], dt: f64) -> Result<Vec<f64>, SolverError> {
    let n = op.n_vertices();
    check_field("u", u, n)?;
    check_field("source", g, n)?;
    advance(op, u, g, dt)
}

fn advance(op: &LtlOperator, u: &[f64], g: &[f64], dt: f64) -> Result<Vec<f64>, SolverError> {
    let lap = op.laplacian_vec(u);
    let next: Vec<f64> = u
        .iter()
        .zip(&lap)
        .zip(g)
        .map(|((u, l), g)| u + dt * (l + g))
        .collect();
    if next.iter().all(|x| x.is_finite()) {
        Ok(next)
    } else {
        Err(SolverError::BlowUp {
            max_laplacian: max_abs(&lap),
        })
    }
}

/// Integrates until steady, `max_steps`, or a non-finite value.
pub fn run_heat(op: &LtlOperator, problem: &HeatProblem) -> Result<SolveTrace, SolverError> {
    let n = op.n_vertices();
    problem.control.check()?;
    check_field("source", &problem.source, n)?;
    check_field("initial state", &problem.initial, n)?;
    let dt = problem.control.dt;
    Ok(integrate(vec!["u"], vec![problem.initial.clone()], &problem.control, |f| {
        Ok(vec![advance(op, &f[0], &problem.source, dt)?])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen_icosphere;

    #[test]
    fn constants_are_equilibria() {
        let op = LtlOperator::new(gen_icosphere(2).unwrap()).unwrap();
        let n = op.n_vertices();
        let u = vec![2.5; n];
        assert_eq!(step_heat(&op, &u, &vec![0.0; n], 0.01).unwrap(), u);
    }

    #[test]
    fn constant_source_accumulates_linearly() {
        let op = LtlOperator::new(gen_icosphere(2).unwrap()).unwrap();
        let n = op.n_vertices();
        let next = step_heat(&op, &vec![0.0; n], &vec![3.0; n], 0.01).unwrap();
        assert!(next.iter().all(|&x| x == 3.0 * 0.01));
    }

    #[test]
    fn bad_inputs_are_refused() {
        let op = LtlOperator::new(gen_icosphere(1).unwrap()).unwrap();
        let n = op.n_vertices();
        assert!(matches!(step_heat(&op, &[0.0; 3], &vec![0.0; n], 0.1), Err(SolverError::InvalidProblem(_))));
        let problem = HeatProblem {
            source: vec![0.0; n],
            initial: vec![0.0; n],
            control: RunControl::new(-1.0, 10),
        };
        assert!(matches!(run_heat(&op, &problem), Err(SolverError::InvalidProblem(_))));
    }
}
