use super::{OracleError, ParametricSurface};
use crate::dsl::{Bindings, FieldExpr, Var};

/// Central-difference step for first partials of closure-backed functions.
pub const FIRST_STEP: f64 = 1e-5;
/// Step for second partials; larger than [`FIRST_STEP`] to keep rounding
/// error (which grows like `ε/h²`) below the truncation error.
pub const SECOND_STEP: f64 = 1e-4;

/// Value and partial derivatives up to second order in the chart parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FunctionJet {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

/// A scalar function on a chart, able to report its 2-jet.
pub trait ScalarFunction {
    fn jet(&self, u: f64, v: f64) -> Result<FunctionJet, OracleError>;
}

/// A field expression pulled back to a chart and differentiated symbolically.
#[derive(Debug, Clone)]
pub struct DslFunction {
    exprs: [FieldExpr; 6],
}

impl DslFunction {
    /// Substitutes the embedding for `x1`, `x2`, `x3`; `u` and `v` are read
    /// as the chart parameters.
    pub fn new(expr: &FieldExpr, surface: &ParametricSurface) -> Self {
        let [e1, e2, e3] = surface.embedding_exprs();
        let pulled = expr.substitute(&|var| match var {
            Var::X1 => Some(e1.clone()),
            Var::X2 => Some(e2.clone()),
            Var::X3 => Some(e3.clone()),
            Var::U | Var::V => None,
        });
        let du = pulled.differentiate(Var::U);
        let dv = pulled.differentiate(Var::V);
        let duu = du.differentiate(Var::U);
        let duv = du.differentiate(Var::V);
        let dvv = dv.differentiate(Var::V);
        Self {
            exprs: [pulled, du, dv, duu, duv, dvv],
        }
    }

    pub fn pulled_back(&self) -> &FieldExpr {
        &self.exprs[0]
    }
}

impl ScalarFunction for DslFunction {
    fn jet(&self, u: f64, v: f64) -> Result<FunctionJet, OracleError> {
        let b = Bindings::new().with_params([u, v]);
        let mut out = [0.0; 6];
        for (slot, e) in out.iter_mut().zip(&self.exprs) {
            *slot = e.evaluate(&b)?;
        }
        let [value, du, dv, duu, duv, dvv] = out;
        Ok(FunctionJet {
            value,
            du,
            dv,
            duu,
            duv,
            dvv,
        })
    }
}

/// A closure of `(u, v)` differentiated by central differences.
pub struct ClosureFunction<F>(pub F);

impl<F: Fn(f64, f64) -> f64> ScalarFunction for ClosureFunction<F> {
    fn jet(&self, u: f64, v: f64) -> Result<FunctionJet, OracleError> {
        let f = &self.0;
        let (h, k) = (FIRST_STEP, SECOND_STEP);
        let value = f(u, v);
        Ok(FunctionJet {
            value,
            du: (f(u + h, v) - f(u - h, v)) / (2.0 * h),
            dv: (f(u, v + h) - f(u, v - h)) / (2.0 * h),
            duu: (f(u + k, v) - 2.0 * value + f(u - k, v)) / (k * k),
            duv: (f(u + k, v + k) - f(u + k, v - k) - f(u - k, v + k) + f(u - k, v - k)) / (4.0 * k * k),
            dvv: (f(u, v + k) - 2.0 * value + f(u, v - k)) / (k * k),
        })
    }
}
