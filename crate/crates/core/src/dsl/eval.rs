use thiserror::Error;

use super::{BinOp, ExprKind, FieldExpr, Func, Span, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable {var} is not bound (bytes {}..{})", span.start, span.end)]
    Unbound { var: Var, span: Span },
    #[error("division by zero (bytes {}..{})", span.start, span.end)]
    DivisionByZero { span: Span },
    #[error("{func} argument {arg} is outside its domain (bytes {}..{})", span.start, span.end)]
    Domain { func: &'static str, arg: f64, span: Span },
    #[error("result is not finite (bytes {}..{})", span.start, span.end)]
    NonFinite { span: Span },
}

/// Values for the variables of an expression; unset ones are unbound.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    values: [Option<f64>; 5],
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `x1`, `x2`, `x3`.
    pub fn ambient(p: [f64; 3]) -> Self {
        Self::new().with(Var::X1, p[0]).with(Var::X2, p[1]).with(Var::X3, p[2])
    }

    /// Also binds `u`, `v`.
    pub fn with_params(self, uv: [f64; 2]) -> Self {
        self.with(Var::U, uv[0]).with(Var::V, uv[1])
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.values[var as usize] = Some(value);
        self
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.values[var as usize]
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl FieldExpr {
    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        let span = self.span;
        let value = match &self.kind {
            ExprKind::Num(x) => *x,
            ExprKind::Var(var) => bindings.get(*var).ok_or(EvalError::Unbound { var: *var, span })?,
            ExprKind::Neg(a) => -a.evaluate(bindings)?,
            ExprKind::Binary(op, a, b) => {
                let (x, y) = (a.evaluate(bindings)?, b.evaluate(bindings)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div if y == 0.0 => return Err(EvalError::DivisionByZero { span }),
                    BinOp::Div => x / y,
                }
            }
            ExprKind::Call(func, a) => {
                let x = a.evaluate(bindings)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt if x < 0.0 => {
                        return Err(EvalError::Domain {
                            func: "sqrt",
                            arg: x,
                            span,
                        })
                    }
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                    Func::Sign => sign(x),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite { span })
        }
    }
}
