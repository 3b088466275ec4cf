use super::{BinOp, Bindings, ExprKind, FieldExpr, Func, Span, Var};

impl FieldExpr {
    /// Symbolic partial derivative with light simplification (constant
    /// folding and the identities of 0 and 1).
    ///
    /// `abs` differentiates to `sign`, so the derivative at a kink is 0.
    pub fn differentiate(&self, var: Var) -> FieldExpr {
        let s = self.span;
        match &self.kind {
            ExprKind::Num(_) => zero(s),
            ExprKind::Var(v) => FieldExpr::constant(if *v == var { 1.0 } else { 0.0 }, s),
            ExprKind::Neg(a) => neg(a.differentiate(var), s),
            ExprKind::Binary(op, a, b) => {
                let (da, db) = (a.differentiate(var), b.differentiate(var));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => binary(BinOp::Add, da, db, s),
                    BinOp::Sub => binary(BinOp::Sub, da, db, s),
                    BinOp::Mul => binary(
                        BinOp::Add,
                        binary(BinOp::Mul, da, b, s),
                        binary(BinOp::Mul, a, db, s),
                        s,
                    ),
                    BinOp::Div => {
                        let left = binary(BinOp::Div, da, b.clone(), s);
                        let num = binary(BinOp::Mul, a, db, s);
                        let den = binary(BinOp::Mul, b.clone(), b, s);
                        binary(BinOp::Sub, left, binary(BinOp::Div, num, den, s), s)
                    }
                }
            }
            ExprKind::Call(func, a) => {
                let da = a.differentiate(var);
                if da.as_constant() == Some(0.0) {
                    return zero(s);
                }
                let a = (**a).clone();
                let outer = match func {
                    Func::Sin => call(Func::Cos, a, s),
                    Func::Cos => neg(call(Func::Sin, a, s), s),
                    Func::Exp => call(Func::Exp, a, s),
                    Func::Sqrt => {
                        let two_root = binary(BinOp::Mul, FieldExpr::constant(2.0, s), call(Func::Sqrt, a, s), s);
                        return binary(BinOp::Div, da, two_root, s);
                    }
                    Func::Abs => call(Func::Sign, a, s),
                    Func::Sign => return zero(s),
                };
                binary(BinOp::Mul, outer, da, s)
            }
        }
    }
}

fn zero(span: Span) -> FieldExpr {
    FieldExpr::constant(0.0, span)
}

fn is(e: &FieldExpr, c: f64) -> bool {
    e.as_constant() == Some(c)
}

fn fold(value: f64, span: Span) -> Option<FieldExpr> {
    value.is_finite().then(|| FieldExpr::constant(value, span))
}

fn neg(a: FieldExpr, span: Span) -> FieldExpr {
    if let Some(c) = a.as_constant() {
        return FieldExpr::constant(-c, span);
    }
    match a.kind {
        ExprKind::Neg(inner) => *inner,
        kind => FieldExpr::new(ExprKind::Neg(Box::new(FieldExpr::new(kind, a.span))), span),
    }
}

fn binary(op: BinOp, a: FieldExpr, b: FieldExpr, span: Span) -> FieldExpr {
    if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
        let folded = match op {
            BinOp::Add => fold(x + y, span),
            BinOp::Sub => fold(x - y, span),
            BinOp::Mul => fold(x * y, span),
            BinOp::Div if y != 0.0 => fold(x / y, span),
            BinOp::Div => None,
        };
        if let Some(e) = folded {
            return e;
        }
    }
    match op {
        BinOp::Add if is(&a, 0.0) => return b,
        BinOp::Add | BinOp::Sub if is(&b, 0.0) => return a,
        BinOp::Sub if is(&a, 0.0) => return neg(b, span),
        BinOp::Mul if is(&a, 0.0) || is(&b, 0.0) => return zero(span),
        BinOp::Mul if is(&a, 1.0) => return b,
        BinOp::Mul | BinOp::Div if is(&b, 1.0) => return a,
        BinOp::Mul if is(&a, -1.0) => return neg(b, span),
        BinOp::Mul if is(&b, -1.0) => return neg(a, span),
        BinOp::Div if is(&a, 0.0) => return zero(span),
        _ => {}
    }
    FieldExpr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span)
}

fn call(func: Func, a: FieldExpr, span: Span) -> FieldExpr {
    let e = FieldExpr::new(ExprKind::Call(func, Box::new(a)), span);
    if e.variables().is_empty() {
        if let Ok(x) = e.evaluate(&Bindings::new()) {
            return FieldExpr::constant(x, span);
        }
    }
    e
}
