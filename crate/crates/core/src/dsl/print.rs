use std::fmt;

use super::{BinOp, ExprKind, FieldExpr};

fn precedence(e: &FieldExpr) -> u8 {
    match &e.kind {
        ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        ExprKind::Neg(_) => 3,
        _ => 4,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &FieldExpr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the fewest parentheses that reparse to the same tree.
impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(x) => write!(f, "{x:?}"),
            ExprKind::Var(v) => write!(f, "{v}"),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                child(f, a, precedence(a) < 3)
            }
            ExprKind::Call(func, a) => write!(f, "{}({a})", func.name()),
            ExprKind::Binary(op, a, b) => {
                let p = precedence(self);
                child(f, a, precedence(a) < p)?;
                match op {
                    BinOp::Add | BinOp::Sub => write!(f, " {} ", op.symbol())?,
                    _ => write!(f, "{}", op.symbol())?,
                }
                child(f, b, precedence(b) <= p)
            }
        }
    }
}
