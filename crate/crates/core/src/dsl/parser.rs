use thiserror::Error;

use super::{BinOp, ExprKind, FieldExpr, Func, Span, Var};

/// Deepest expression tree the parser will build.
pub const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("invalid number '{text}' at byte {offset}")]
    InvalidNumber { text: String, offset: usize },
    #[error("expression nests deeper than {limit} levels at byte {offset}")]
    TooDeep { offset: usize, limit: usize },
}

const OPERATORS: [&str; 4] = ["'+'", "'-'", "'*'", "'/'"];
const OPERAND: [&str; 5] = ["number", "variable", "function", "'('", "'-'"];

/// Parses an expression. Unary minus binds tighter than `*` and `/`, which
/// bind tighter than `+` and `-`; binary operators associate to the left.
pub fn parse(text: &str) -> Result<FieldExpr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let (expr, _) = p.expr(0)?;
    p.skip_ws();
    if p.pos < text.len() {
        let mut expected = OPERATORS.to_vec();
        expected.push("end of input");
        return Err(p.unexpected(expected));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

type Parsed = Result<(FieldExpr, usize), ParseError>;

impl Parser<'_> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        let found = match self.src[self.pos..].chars().next() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            offset: self.pos,
            expected,
            found,
        }
    }

    fn check_depth(&self, depth: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.pos,
                limit: MAX_DEPTH,
            });
        }
        Ok(())
    }

    fn binary(&self, op: BinOp, (a, da): (FieldExpr, usize), (b, db): (FieldExpr, usize)) -> Parsed {
        let depth = 1 + da.max(db);
        self.check_depth(depth)?;
        let span = a.span.join(b.span);
        Ok((FieldExpr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span), depth))
    }

    fn expr(&mut self, nesting: usize) -> Parsed {
        self.check_depth(nesting)?;
        let mut lhs = self.term(nesting)?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term(nesting)?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn term(&mut self, nesting: usize) -> Parsed {
        let mut lhs = self.unary(nesting)?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary(nesting)?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn unary(&mut self, nesting: usize) -> Parsed {
        self.check_depth(nesting)?;
        if self.peek() == Some('-') {
            let start = self.pos;
            self.pos += 1;
            let (inner, d) = self.unary(nesting + 1)?;
            let span = Span::new(start, inner.span.end);
            return Ok((FieldExpr::new(ExprKind::Neg(Box::new(inner)), span), d + 1));
        }
        self.primary(nesting)
    }

    fn primary(&mut self, nesting: usize) -> Parsed {
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let (mut inner, d) = self.expr(nesting + 1)?;
                self.expect_close(vec![])?;
                inner.span = Span::new(start, self.pos);
                Ok((inner, d))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.identifier(nesting),
            _ => Err(self.unexpected(OPERAND.to_vec())),
        }
    }

    fn expect_close(&mut self, mut expected: Vec<&'static str>) -> Result<(), ParseError> {
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok(());
        }
        expected.extend(OPERATORS);
        expected.push("')'");
        Err(self.unexpected(expected))
    }

    fn number(&mut self) -> Parsed {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut end = digits(start);
        if end < bytes.len() && bytes[end] == b'.' {
            end = digits(end + 1);
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                end = digits(k);
            }
        }
        let text = &self.src[start..end];
        let value = text
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| ParseError::InvalidNumber {
                text: text.to_string(),
                offset: start,
            })?;
        self.pos = end;
        Ok((FieldExpr::new(ExprKind::Num(value), Span::new(start, end)), 1))
    }

    fn identifier(&mut self, nesting: usize) -> Parsed {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        let name = &self.src[start..start + len];
        self.pos += len;
        if let Some(var) = Var::from_name(name) {
            return Ok((FieldExpr::new(ExprKind::Var(var), Span::new(start, self.pos)), 1));
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            });
        };
        if self.peek() != Some('(') {
            return Err(self.unexpected(vec!["'('"]));
        }
        self.pos += 1;
        let (arg, d) = self.expr(nesting + 1)?;
        self.expect_close(vec![])?;
        self.check_depth(d + 1)?;
        let span = Span::new(start, self.pos);
        Ok((FieldExpr::new(ExprKind::Call(func, Box::new(arg)), span), d + 1))
    }
}
