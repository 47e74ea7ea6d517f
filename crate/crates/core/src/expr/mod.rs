//! Scalar coefficient expressions in the single variable `t`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | tan | exp | ln | sqrt | abs
//! ```
//!
//! There is no implicit multiplication and no unary plus.

mod parser;
mod program;

use std::fmt;

pub use parser::{parse_expression, ParseError};
pub use program::Program;

/// Names accepted as identifiers, in the order they are listed in errors.
pub const ALLOWED_IDENTIFIERS: &[&str] = &[
    "t", "pi", "e", "sin", "cos", "tan", "exp", "ln", "sqrt", "abs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

/// Expression tree. Literals are finite and non-negative when produced by
/// the parser; negation is always an explicit [`Expr::Neg`] node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Evaluation failure, carrying the rendered subexpression that failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("domain error in `{node}` at t = {t}: {reason}")]
pub struct EvalError {
    pub node: String,
    pub t: f64,
    pub reason: &'static str,
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn negate(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }

    /// Value at `t`. Any non-finite intermediate is reported as a domain
    /// error on the innermost node that produced it.
    pub fn evaluate(&self, t: f64) -> Result<f64, EvalError> {
        let fail = |reason| EvalError {
            node: self.to_string(),
            t,
            reason,
        };
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Const(c) => c.value(),
            Expr::Neg(inner) => -inner.evaluate(t)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.evaluate(t)?;
                let b = rhs.evaluate(t)?;
                apply_binary(*op, a, b).map_err(fail)?
            }
            Expr::Call(func, arg) => {
                let x = arg.evaluate(t)?;
                apply_func(*func, x).map_err(fail)?
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail("non-finite result"))
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var | Expr::Const(_) => 1,
            Expr::Neg(inner) | Expr::Call(_, inner) => 1 + inner.size(),
            Expr::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn compile(&self) -> Program {
        Program::compile(self)
    }
}

pub(crate) fn apply_binary(op: BinOp, a: f64, b: f64) -> Result<f64, &'static str> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div => {
            if b == 0.0 {
                Err("division by zero")
            } else {
                Ok(a / b)
            }
        }
        BinOp::Pow => {
            if a == 0.0 && b < 0.0 {
                Err("zero raised to a negative power")
            } else if a < 0.0 && b.fract() != 0.0 {
                Err("negative base with non-integer exponent")
            } else {
                Ok(a.powf(b))
            }
        }
    }
}

pub(crate) fn apply_func(func: Func, x: f64) -> Result<f64, &'static str> {
    match func {
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Tan => Ok(x.tan()),
        Func::Exp => Ok(x.exp()),
        Func::Ln => {
            if x <= 0.0 {
                Err("ln of a non-positive argument")
            } else {
                Ok(x.ln())
            }
        }
        Func::Sqrt => {
            if x < 0.0 {
                Err("sqrt of a negative argument")
            } else {
                Ok(x.sqrt())
            }
        }
        Func::Abs => Ok(x.abs()),
    }
}

/// Fully parenthesized rendering; re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eval(text: &str, t: f64) -> f64 {
        parse_expression(text).unwrap().evaluate(t).unwrap()
    }

    #[test]
    fn builtin_coefficients_evaluate() {
        assert_eq!(eval("sin(ln(t))+cos(ln(t))", 1.0), 1.0);
        assert_eq!(eval("4-2*t*sin(t)", 0.0), 4.0);
        let v = eval("t*sin(t)+1", PI / 2.0);
        assert!((v - (PI / 2.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("2+3*4", 0.0), 14.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0), -4.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval("2*-t", 3.0), -6.0);
    }

    #[test]
    fn constants() {
        assert_eq!(eval("pi", 0.0), PI);
        assert_eq!(eval("e", 0.0), std::f64::consts::E);
        assert_eq!(eval("2e1*e", 0.0), 20.0 * std::f64::consts::E);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let err = parse_expression("1 + ln(t - 1)")
            .unwrap()
            .evaluate(1.0)
            .unwrap_err();
        assert_eq!(err.node, "ln((t - 1.0))");
        let err = parse_expression("1/t").unwrap().evaluate(0.0).unwrap_err();
        assert_eq!(err.reason, "division by zero");
        let err = parse_expression("sqrt(t)")
            .unwrap()
            .evaluate(-1.0)
            .unwrap_err();
        assert!(err.to_string().contains("sqrt"));
        let err = parse_expression("exp(t)")
            .unwrap()
            .evaluate(1000.0)
            .unwrap_err();
        assert_eq!(err.reason, "non-finite result");
    }

    #[test]
    fn evaluation_is_bit_identical() {
        let ast = parse_expression("sin(ln(t))+cos(ln(t))").unwrap();
        let a = ast.evaluate(123.456).unwrap();
        let b = ast.evaluate(123.456).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "sin(ln(t))+cos(ln(t))",
            "4-2*t*sin(t)",
            "-t^-2.5e-3",
            "abs(-(pi))",
        ] {
            let ast = parse_expression(text).unwrap();
            assert_eq!(parse_expression(&ast.to_string()).unwrap(), ast);
        }
    }
}
