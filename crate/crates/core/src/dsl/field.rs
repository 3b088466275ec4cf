use thiserror::Error;

use super::{Bindings, EvalError, FieldExpr, Var};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("expression uses {} but the mesh stores no surface parameters", names(.vars))]
    MissingParameters { vars: Vec<Var> },
    #[error("at vertex {vertex}: {error}")]
    Eval { vertex: usize, error: EvalError },
}

fn names(vars: &[Var]) -> String {
    vars.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
}

/// Evaluates `expr` at every vertex. Parameters `u`, `v` are bound only
/// when the mesh stores them; using them otherwise fails before any
/// evaluation.
pub fn sample_field(expr: &FieldExpr, mesh: &TriangleMesh) -> Result<Vec<f64>, FieldError> {
    let params = mesh.params();
    if params.is_none() {
        let vars: Vec<Var> = expr.variables().into_iter().filter(|v| v.is_parametric()).collect();
        if !vars.is_empty() {
            return Err(FieldError::MissingParameters { vars });
        }
    }
    mesh.vertices()
        .iter()
        .enumerate()
        .map(|(vertex, p)| {
            let mut b = Bindings::ambient([p.x, p.y, p.z]);
            if let Some(params) = params {
                b = b.with_params(params[vertex]);
            }
            expr.evaluate(&b).map_err(|error| FieldError::Eval { vertex, error })
        })
        .collect()
}
