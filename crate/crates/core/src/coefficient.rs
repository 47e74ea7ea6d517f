use std::fmt;
use std::sync::Arc;

use crate::expr::{parse_expression, BinOp, EvalError, Expr, Func, ParseError, Program};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoefficientError {
    #[error("cannot parse {which}: {source}")]
    Parse {
        which: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("domain start must be a finite time >= 0, got {0}")]
    BadDomainStart(f64),
    #[error("antiderivative `{antiderivative}` does not differentiate to `{body}` at t = {t}: finite difference {finite_difference}, body {value}")]
    AntiderivativeMismatch {
        body: String,
        antiderivative: String,
        t: f64,
        finite_difference: f64,
        value: f64,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug)]
struct Inner {
    body: Expr,
    body_program: Program,
    antiderivative: Option<(Expr, Program)>,
    domain_start: f64,
}

/// A scalar coefficient `t -> a(t)`, optionally with a closed-form
/// antiderivative. Cheap to clone; immutable.
#[derive(Debug, Clone)]
pub struct CoefficientFunction {
    inner: Arc<Inner>,
}

impl CoefficientFunction {
    pub fn new(
        body: Expr,
        antiderivative: Option<Expr>,
        domain_start: f64,
    ) -> Result<Self, CoefficientError> {
        if !(domain_start.is_finite() && domain_start >= 0.0) {
            return Err(CoefficientError::BadDomainStart(domain_start));
        }
        let body_program = body.compile();
        let antiderivative = antiderivative.map(|a| {
            let p = a.compile();
            (a, p)
        });
        Ok(CoefficientFunction {
            inner: Arc::new(Inner {
                body,
                body_program,
                antiderivative,
                domain_start,
            }),
        })
    }

    /// Parses the body and optional antiderivative; domain start 0.
    pub fn parse(body: &str, antiderivative: Option<&str>) -> Result<Self, CoefficientError> {
        let body = parse_expression(body).map_err(|source| CoefficientError::Parse {
            which: "coefficient",
            source,
        })?;
        let anti = antiderivative
            .map(parse_expression)
            .transpose()
            .map_err(|source| CoefficientError::Parse {
                which: "antiderivative",
                source,
            })?;
        Self::new(body, anti, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(
            Expr::num(c),
            Some(Expr::binary(BinOp::Mul, Expr::num(c), Expr::var())),
            0.0,
        )
        .expect("constant coefficient is always valid")
    }

    pub fn body(&self) -> &Expr {
        &self.inner.body
    }

    pub fn antiderivative(&self) -> Option<&Expr> {
        self.inner.antiderivative.as_ref().map(|(e, _)| e)
    }

    pub fn has_antiderivative(&self) -> bool {
        self.inner.antiderivative.is_some()
    }

    pub fn domain_start(&self) -> f64 {
        self.inner.domain_start
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.inner.body_program.eval(t)
    }

    /// Closed-form antiderivative at `t`, if one is attached.
    #[inline]
    pub fn eval_antiderivative(&self, t: f64) -> Option<Result<f64, EvalError>> {
        self.inner.antiderivative.as_ref().map(|(_, p)| p.eval(t))
    }

    /// `a(t) + lambda`, with antiderivative `A(t) + lambda*t` when `A` exists.
    pub fn shifted(&self, lambda: f64) -> Self {
        let body = Expr::binary(BinOp::Add, self.body().clone(), Expr::num(lambda));
        let anti = self.antiderivative().map(|a| {
            Expr::binary(
                BinOp::Add,
                a.clone(),
                Expr::binary(BinOp::Mul, Expr::num(lambda), Expr::var()),
            )
        });
        Self::new(body, anti, self.domain_start()).expect("domain start already validated")
    }

    /// `|a(t)|`, without an antiderivative.
    pub fn abs(&self) -> Self {
        Self::new(
            Expr::call(Func::Abs, self.body().clone()),
            None,
            self.domain_start(),
        )
        .expect("domain start already validated")
    }

    /// Checks `A' = a` by a five-point central difference at 1000 uniform
    /// points of `[max(domain_start, 1), 1e3]`, relative tolerance 1e-6
    /// against `max(1, |a(t)|)`. Passes trivially without an antiderivative.
    pub fn check_antiderivative(&self) -> Result<(), CoefficientError> {
        let Some((anti, program)) = &self.inner.antiderivative else {
            return Ok(());
        };
        let lo = self.domain_start().max(1.0);
        let hi = 1e3_f64.max(lo + 1.0);
        let n = 1000;
        for k in 0..n {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let h = 1e-3;
            let lo_t = (t - 2.0 * h).max(self.domain_start());
            // one-sided region near the domain start is skipped rather than extrapolated
            if lo_t > t - 2.0 * h {
                continue;
            }
            let f = |x: f64| program.eval(x);
            let fd = (-f(t + 2.0 * h)? + 8.0 * f(t + h)? - 8.0 * f(t - h)? + f(t - 2.0 * h)?)
                / (12.0 * h);
            let value = self.eval(t)?;
            if (fd - value).abs() > 1e-6 * value.abs().max(1.0) {
                return Err(CoefficientError::AntiderivativeMismatch {
                    body: self.body().to_string(),
                    antiderivative: anti.to_string(),
                    t,
                    finite_difference: fd,
                    value,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correct_antiderivatives_pass() {
        let cases = [
            ("sin(ln(t))+cos(ln(t))", "t*sin(ln(t))"),
            ("4-2*t*sin(t)", "4*t+2*t*cos(t)-2*sin(t)"),
            ("t*sin(t)+1", "sin(t)-t*cos(t)+t"),
            ("3", "3*t"),
        ];
        for (body, anti) in cases {
            CoefficientFunction::parse(body, Some(anti))
                .unwrap()
                .check_antiderivative()
                .unwrap();
        }
    }

    #[test]
    fn wrong_antiderivative_is_caught() {
        let f = CoefficientFunction::parse("t*sin(t)+1", Some("sin(t)+t*cos(t)+t")).unwrap();
        assert!(matches!(
            f.check_antiderivative(),
            Err(CoefficientError::AntiderivativeMismatch { .. })
        ));
    }

    #[test]
    fn shift_adds_constant() {
        let f = CoefficientFunction::parse("t*sin(t)", Some("sin(t)-t*cos(t)")).unwrap();
        let g = f.shifted(2.5);
        assert_eq!(g.eval(1.0).unwrap(), f.eval(1.0).unwrap() + 2.5);
        g.check_antiderivative().unwrap();
        assert!(f.abs().eval(4.0).unwrap() >= 0.0);
        assert!(!f.abs().has_antiderivative());
    }

    #[test]
    fn parse_errors_say_which_part() {
        let err = CoefficientFunction::parse("t", Some("2*+t")).unwrap_err();
        assert!(matches!(
            err,
            CoefficientError::Parse {
                which: "antiderivative",
                ..
            }
        ));
        assert!(CoefficientFunction::new(Expr::var(), None, -1.0).is_err());
    }
}
