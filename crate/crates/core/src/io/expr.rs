//! Arithmetic expressions over `x1, x2, x3, t`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x1' | 'x2' | 'x3' | 't' | 'pi'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | abs | tanh
//! ```
//!
//! `-2^2` is `-(2^2)`; `2^-1` is `0.5`. There is no unary plus.

use std::fmt;

use crate::calculus::{ScalarField, SmoothSolution, VectorField};
use crate::error::{Error, Result};
use crate::geometry::{Vec3, VelocityField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    const ALL: [(Func, &'static str); 6] = [
        (Func::Sin, "sin"),
        (Func::Cos, "cos"),
        (Func::Exp, "exp"),
        (Func::Sqrt, "sqrt"),
        (Func::Abs, "abs"),
        (Func::Tanh, "tanh"),
    ];

    pub fn name(self) -> &'static str {
        Func::ALL.iter().find(|(f, _)| *f == self).unwrap().1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: Vec3, t: f64) -> Result<f64> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var(Var::X1) => x.x,
            Expr::Var(Var::X2) => x.y,
            Expr::Var(Var::X3) => x.z,
            Expr::Var(Var::T) => t,
            Expr::Neg(e) => -e.eval(x, t)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, t)?, b.eval(x, t)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Eval("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(x, t)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(Error::Eval(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Tanh => a.tanh(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("non-finite result in '{self}'")))
        }
    }
}

/// Fully parenthesised; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Var(v) => f.write_str(match v {
                Var::X1 => "x1",
                Var::X2 => "x2",
                Var::X3 => "x3",
                Var::T => "t",
            }),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

impl ScalarField for Expr {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        self.eval(x, t)
    }
}

const PRIMARY_EXPECTED: &str = "expected number, variable, function, '(' or '-'";

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            _ => self.error(self.pos, format!("expected '{want}'")),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let start = match self.peek() {
            None => return self.error(self.pos, format!("{PRIMARY_EXPECTED}, found end of input")),
            Some(_) => self.pos,
        };
        let rest = &self.src[start..];
        let c = rest.chars().next().unwrap();
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() {
            let len = rest
                .find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_')
                .unwrap_or(rest.len());
            let ident = &rest[..len];
            self.pos += len;
            return match ident {
                "x1" => Ok(Expr::Var(Var::X1)),
                "x2" => Ok(Expr::Var(Var::X2)),
                "x3" => Ok(Expr::Var(Var::X3)),
                "t" => Ok(Expr::Var(Var::T)),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                _ => match Func::ALL.iter().find(|(_, name)| *name == ident) {
                    Some(&(f, _)) => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => self.error(start, format!("unknown identifier '{ident}'")),
                },
            };
        }
        self.error(start, format!("{PRIMARY_EXPECTED}, found '{c}'"))
    }

    fn number(&mut self, start: usize) -> Result<Expr> {
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |end: &mut usize| {
            while *end < bytes.len() && bytes[*end].is_ascii_digit() {
                *end += 1;
            }
        };
        digits(&mut end);
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            digits(&mut end);
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut e = end + 1;
            if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                e += 1;
            }
            if e < bytes.len() && bytes[e].is_ascii_digit() {
                end = e;
                digits(&mut end);
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Expr::Num(v))
            }
            Err(_) => self.error(
                start,
                format!("malformed number '{}'", &self.src[start..end]),
            ),
        }
    }
}

pub fn parse_expr(source: &str) -> Result<Expr> {
    let mut p = Parser {
        src: source,
        pos: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => p.error(
            p.pos,
            format!("expected operator or end of input, found '{c}'"),
        ),
    }
}

/// Three component expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprVector(pub [Expr; 3]);

impl ExprVector {
    fn eval(&self, x: Vec3, t: f64) -> Result<Vec3> {
        Ok(Vec3::new(
            self.0[0].eval(x, t)?,
            self.0[1].eval(x, t)?,
            self.0[2].eval(x, t)?,
        ))
    }
}

impl VectorField for ExprVector {
    fn value(&self, x: Vec3, t: f64) -> Result<Vec3> {
        self.eval(x, t)
    }
}

/// Eulerian velocity: evaluated at the current position.
impl VelocityField for ExprVector {
    fn velocity(&self, _origin: Vec3, x: Vec3, t: f64) -> Result<Vec3> {
        self.eval(x, t)
    }
}

/// Step of the central differences in [`ExprSolution`].
pub const FD_STEP: f64 = 1e-6;

/// Expression-defined solution whose derivatives are central differences
/// with step [`FD_STEP`]; accurate to roughly `1e-9` relative.
#[derive(Clone, Debug)]
pub struct ExprSolution {
    pub expr: Expr,
}

impl SmoothSolution for ExprSolution {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        self.expr.eval(x, t)
    }

    fn gradient(&self, x: Vec3, t: f64) -> Result<Vec3> {
        let d = |e: Vec3| -> Result<f64> {
            Ok(
                (self.expr.eval(x + e * FD_STEP, t)? - self.expr.eval(x - e * FD_STEP, t)?)
                    / (2.0 * FD_STEP),
            )
        };
        Ok(Vec3::new(
            d(Vec3::new(1.0, 0.0, 0.0))?,
            d(Vec3::new(0.0, 1.0, 0.0))?,
            d(Vec3::new(0.0, 0.0, 1.0))?,
        ))
    }

    fn time_derivative(&self, x: Vec3, t: f64) -> Result<f64> {
        Ok((self.expr.eval(x, t + FD_STEP)? - self.expr.eval(x, t - FD_STEP)?) / (2.0 * FD_STEP))
    }

    fn label(&self) -> String {
        self.expr.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &str, x: Vec3, t: f64) -> f64 {
        parse_expr(e).unwrap().eval(x, t).unwrap()
    }

    #[test]
    fn coefficient_expressions() {
        assert_eq!(at("1+4*x1^2", Vec3::new(1.0, 0.0, 0.0), 0.0), 5.0);
        let v = at("(x3+0.3)*(x3-0.1)-0.3", Vec3::ZERO, 0.0);
        assert!((v + 0.33).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("-2^2", Vec3::ZERO, 0.0), -4.0);
        assert_eq!(at("2^3^2", Vec3::ZERO, 0.0), 512.0);
        assert_eq!(at("2^-1", Vec3::ZERO, 0.0), 0.5);
        assert_eq!(at("8/4/2", Vec3::ZERO, 0.0), 1.0);
        assert_eq!(at("1-2-3", Vec3::ZERO, 0.0), -4.0);
        assert_eq!(at("2*3+4*5", Vec3::ZERO, 0.0), 26.0);
        assert_eq!(at("--3", Vec3::ZERO, 0.0), 3.0);
        assert_eq!(at("1.5e1 + t", Vec3::ZERO, 2.0), 17.0);
        assert!((at("sin(pi/2)*sqrt(abs(-4))", Vec3::ZERO, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = |s: &str| match parse_expr(s) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(err("2*+"), 2);
        assert_eq!(err("+1"), 0);
        assert_eq!(err("(1+2"), 4);
        assert_eq!(err("foo(1)"), 0);
        assert_eq!(err("1 2"), 2);
        assert_eq!(err(""), 0);
        assert_eq!(err("sin 1"), 4);
    }

    #[test]
    fn eval_errors() {
        let e = parse_expr("1/(x1-1)").unwrap();
        assert!(matches!(
            e.eval(Vec3::new(1.0, 0.0, 0.0), 0.0),
            Err(Error::Eval(_))
        ));
        let e = parse_expr("sqrt(x1)").unwrap();
        assert!(matches!(
            e.eval(Vec3::new(-1.0, 0.0, 0.0), 0.0),
            Err(Error::Eval(_))
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "1+4*x1^2",
            "-2^-x3",
            "tanh(t)/exp(-x2)",
            "(x3+0.3)*(x3-0.1)-0.3",
        ] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn finite_difference_solution() {
        let g = ExprSolution {
            expr: parse_expr("exp(-0.5*t)*x1*x2*x3").unwrap(),
        };
        let x = Vec3::new(0.3, -0.4, 0.5);
        let grad = g.gradient(x, 0.2).unwrap();
        let exact = Vec3::new(-0.2, 0.15, -0.12) * (-0.1f64).exp();
        assert!((grad - exact).norm() < 1e-8);
        let dt = g.time_derivative(x, 0.2).unwrap();
        assert!((dt - (-0.5 * (-0.1f64).exp() * -0.06)).abs() < 1e-8);
    }
}
