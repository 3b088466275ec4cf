//! A small expression language for scalar fields on meshes.
//!
//! Expressions use the ambient coordinates `x1`, `x2`, `x3` or the stored
//! parameters `u`, `v`, the operators `+ - * /` and unary `-`, and the
//! functions `sin cos exp sqrt abs sign`. They can be parsed, printed with
//! minimal parentheses, evaluated and differentiated symbolically.
//!
//! ```
//! use ltl_core::dsl::{parse, Var};
//!
//! let e = parse("sin(u)*cos(v)").unwrap();
//! assert_eq!(e.differentiate(Var::U).to_string(), "cos(u)*cos(v)");
//! ```

mod diff;
mod eval;
mod field;
mod parser;
mod print;

pub use eval::{Bindings, EvalError};
pub use field::{sample_field, FieldError};
pub use parser::{parse, ParseError, MAX_DEPTH};

use std::collections::BTreeSet;
use std::fmt;

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X1, Var::X2, Var::X3, Var::U, Var::V];

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::U => "u",
            Var::V => "v",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }

    /// True for `u` and `v`, which need stored surface parameters.
    pub fn is_parametric(self) -> bool {
        matches!(self, Var::U | Var::V)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    /// `-1`, `0` or `1`; appears in derivatives of `abs`.
    Sign,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs, Func::Sign];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// A finite, non-negative literal; negative constants are `Neg(Num)`.
    Num(f64),
    Var(Var),
    Neg(Box<FieldExpr>),
    Binary(BinOp, Box<FieldExpr>, Box<FieldExpr>),
    Call(Func, Box<FieldExpr>),
}

/// An expression tree. Equality compares structure only, not spans.
#[derive(Debug, Clone)]
pub struct FieldExpr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for FieldExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl std::str::FromStr for FieldExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

impl FieldExpr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    /// A constant; negative values become a negated literal so that printing
    /// and reparsing give the same tree.
    pub fn constant(value: f64, span: Span) -> Self {
        if value < 0.0 {
            let inner = FieldExpr::new(ExprKind::Num(-value), span);
            FieldExpr::new(ExprKind::Neg(Box::new(inner)), span)
        } else {
            // Also folds -0.0 into 0.0.
            FieldExpr::new(ExprKind::Num(value + 0.0), span)
        }
    }

    pub fn var(var: Var) -> Self {
        FieldExpr::new(ExprKind::Var(var), Span::default())
    }

    /// The value of a constant subtree (a literal or a negated literal).
    pub fn as_constant(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Num(c) => Some(*c),
            ExprKind::Neg(inner) => match inner.kind {
                ExprKind::Num(c) => Some(-c),
                _ => None,
            },
            _ => None,
        }
    }

    /// Variables occurring in the expression.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Var(v) = e.kind {
                out.insert(v);
            }
        });
        out
    }

    /// Nesting depth; a lone literal or variable has depth 1.
    pub fn depth(&self) -> usize {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Var(_) => 1,
            ExprKind::Neg(a) | ExprKind::Call(_, a) => 1 + a.depth(),
            ExprKind::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn visit(&self, f: &mut impl FnMut(&FieldExpr)) {
        f(self);
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Var(_) => {}
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.visit(f),
            ExprKind::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces variables by expressions, leaving unmapped ones in place.
    pub fn substitute(&self, map: &impl Fn(Var) -> Option<FieldExpr>) -> FieldExpr {
        let kind = match &self.kind {
            ExprKind::Num(_) => return self.clone(),
            ExprKind::Var(v) => return map(*v).unwrap_or_else(|| self.clone()),
            ExprKind::Neg(a) => ExprKind::Neg(Box::new(a.substitute(map))),
            ExprKind::Call(func, a) => ExprKind::Call(*func, Box::new(a.substitute(map))),
            ExprKind::Binary(op, a, b) => {
                ExprKind::Binary(*op, Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
        };
        FieldExpr::new(kind, self.span)
    }
}
