//! Arithmetic expressions in one variable `x`.
//!
//! A small recursive-descent parser for coefficient and source functions
//! given on the command line. Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | ln | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x^2` parses as `-(x^2)` while `2^-1` is still accepted.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }
}

/// Abstract syntax tree of a parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; reparsing it yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::X => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Parse an expression, reporting failures with a 0-based character offset.
pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("expected end of input"));
    }
    Ok(expr)
}

/// Evaluate a parsed expression at `x`.
///
/// Division by zero, `ln` of a nonpositive argument, `sqrt` of a negative
/// argument and any operation producing a non-finite value are reported as
/// evaluation errors naming the offending subexpression.
pub fn eval_expression(expr: &Expr, x: f64) -> Result<f64> {
    let fail = |node: &Expr, message: &str| Error::Eval {
        expr: node.to_string(),
        x,
        message: message.to_string(),
    };
    let finite = |node: &Expr, v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(node, "non-finite result"))
        }
    };
    match expr {
        Expr::Number(v) => Ok(*v),
        Expr::X => Ok(x),
        Expr::Neg(a) => Ok(-eval_expression(a, x)?),
        Expr::Add(a, b) => finite(expr, eval_expression(a, x)? + eval_expression(b, x)?),
        Expr::Sub(a, b) => finite(expr, eval_expression(a, x)? - eval_expression(b, x)?),
        Expr::Mul(a, b) => finite(expr, eval_expression(a, x)? * eval_expression(b, x)?),
        Expr::Div(a, b) => {
            let denom = eval_expression(b, x)?;
            if denom == 0.0 {
                return Err(fail(expr, "division by zero"));
            }
            finite(expr, eval_expression(a, x)? / denom)
        }
        Expr::Pow(a, b) => {
            let base = eval_expression(a, x)?;
            let exponent = eval_expression(b, x)?;
            finite(expr, base.powf(exponent))
        }
        Expr::Call(func, a) => {
            let arg = eval_expression(a, x)?;
            let v = match func {
                Func::Sin => arg.sin(),
                Func::Cos => arg.cos(),
                Func::Exp => arg.exp(),
                Func::Ln => {
                    if arg <= 0.0 {
                        return Err(fail(expr, "ln of nonpositive argument"));
                    }
                    arg.ln()
                }
                Func::Sqrt => {
                    if arg < 0.0 {
                        return Err(fail(expr, "sqrt of negative argument"));
                    }
                    arg.sqrt()
                }
                Func::Abs => arg.abs(),
            };
            finite(expr, v)
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn accept(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.accept('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.accept('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.accept('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.accept('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.accept('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.accept('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.accept(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.error("expected number, 'x', function or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if matches!(self.chars.get(self.pos), Some('.')) {
            self.pos += 1;
            while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
                while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. "2*exp(x)" never reaches
                // here, but "2e" alone must fail cleanly)
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) => Ok(Expr::Number(v)),
            Err(_) => {
                self.pos = start;
                Err(self.error("malformed number"))
            }
        }
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if name == "x" {
            return Ok(Expr::X);
        }
        match Func::from_name(&name) {
            Some(func) => {
                if !self.accept('(') {
                    return Err(self.error("expected '(' after function name"));
                }
                let arg = self.expr()?;
                if !self.accept(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            None => {
                self.pos = start;
                Err(self.error(&format!("unknown function or variable `{name}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval_str(text: &str, x: f64) -> f64 {
        eval_expression(&parse_expression(text).unwrap(), x).unwrap()
    }

    #[test]
    fn literal_and_variable() {
        assert_eq!(eval_str("4+sin(x)", 0.0), 4.0);
        assert_eq!(eval_str("2+x", 0.5), 2.5);
        assert_eq!(eval_str("x^2", 3.0), 9.0);
        assert_eq!(eval_str("(1+x)*(2*x+1)", 0.5), 3.0);
    }

    #[test]
    fn negated_exponential() {
        let v = eval_str("-exp(x)", 1.0);
        assert!((v - (-std::f64::consts::E)).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn precedence() {
        assert_eq!(eval_str("2+3*4^2", 0.0), 50.0);
        // unary minus binds looser than '^'
        assert_eq!(eval_str("-2^2", 0.0), -4.0);
        assert_eq!(eval_str("-x^2", 3.0), -9.0);
        // '^' is right-associative and accepts a signed exponent
        assert_eq!(eval_str("2^3^2", 0.0), 512.0);
        assert_eq!(eval_str("2^-1", 0.0), 0.5);
        assert_eq!(eval_str("(-2)^2", 0.0), 4.0);
    }

    #[test]
    fn number_formats() {
        assert_eq!(eval_str("1e-3", 0.0), 1e-3);
        assert_eq!(eval_str("2.5E+2", 0.0), 250.0);
        assert_eq!(eval_str(".5", 0.0), 0.5);
        assert_eq!(eval_str("7.", 0.0), 7.0);
        // a dangling exponent marker is not part of the number
        assert!(parse_expression("2e").is_err());
        assert!(parse_expression("2e+").is_err());
    }

    #[test]
    fn syntax_error_offsets() {
        match parse_expression("2+*x") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        // the offset points at the character found where '(' was expected
        match parse_expression("sin x") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_expression("1+2)") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_expression("").is_err());
        assert!(parse_expression("foo(x)").is_err());
    }

    #[test]
    fn eval_errors() {
        let e = parse_expression("1/x").unwrap();
        assert!(matches!(eval_expression(&e, 0.0), Err(Error::Eval { .. })));
        assert_eq!(eval_expression(&e, 2.0).unwrap(), 0.5);

        let e = parse_expression("ln(x)").unwrap();
        assert!(eval_expression(&e, 0.0).is_err());
        assert!(eval_expression(&e, -1.0).is_err());

        let e = parse_expression("sqrt(x)").unwrap();
        assert!(eval_expression(&e, -0.5).is_err());

        // overflow must surface as an error, not an infinity
        let e = parse_expression("exp(x^2)").unwrap();
        assert!(eval_expression(&e, 100.0).is_err());
    }

    #[test]
    fn whitespace_ignored() {
        assert_eq!(eval_str("  2 + 3 * x ", 2.0), 8.0);
    }

    // Strategy for random well-formed trees, used to exercise the
    // Display -> reparse round trip.
    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0..10.0f64).prop_map(Expr::Number), Just(Expr::X),];
        leaf.prop_recursive(5, 64, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                inner
                    .clone()
                    .prop_map(|a| Expr::Call(Func::Sin, Box::new(a))),
                inner
                    .clone()
                    .prop_map(|a| Expr::Call(Func::Cos, Box::new(a))),
                inner.prop_map(|a| Expr::Call(Func::Abs, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_reparse_round_trip(expr in arb_expr(), xs in proptest::collection::vec(0.0..1.0f64, 8)) {
            let reparsed = parse_expression(&expr.to_string()).unwrap();
            prop_assert_eq!(&reparsed, &expr);
            for x in xs {
                let a = eval_expression(&expr, x);
                let b = eval_expression(&reparsed, x);
                match (a, b) {
                    (Ok(va), Ok(vb)) => prop_assert_eq!(va.to_bits(), vb.to_bits()),
                    (Err(_), Err(_)) => {}
                    other => prop_assert!(false, "round trip diverged: {:?}", other),
                }
            }
        }
    }
}
