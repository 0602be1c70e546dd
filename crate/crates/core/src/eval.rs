//! Numeric evaluation of expressions and domain predicates.
//!
//! Subtrees built only from constants and arithmetic are evaluated in exact
//! Gaussian rational arithmetic and rounded once; as soon as a variable or a
//! function application is involved the evaluator switches to complex double
//! precision. Negative zeros are canonicalised to positive zero after every
//! floating operation so that branch cuts see a single representation of
//! each value.

use std::fmt;

use num::complex::Complex64;
use thiserror::Error;

use crate::expr::{DomainPred, Env, Expr, Number};
use crate::registry::{FunctionImpl, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A genuine singularity: reciprocal of zero, logarithm of zero, ...
    Singular(&'static str),
    /// The exact value is finite but not representable as a double.
    Overflow,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Singular(what) => write!(f, "{what}"),
            Violation::Overflow => write!(f, "result is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("domain violation: {0}")]
    DomainViolation(Violation),
}

impl EvalError {
    pub fn is_overflow(&self) -> bool {
        matches!(self, EvalError::DomainViolation(Violation::Overflow))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
}

/// Numeric implementations of the built-in functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Neg,
    Recip,
    Exp,
    Ln,
    Sin,
    Cos,
    Asin,
    Acos,
    Atan,
    Raise,
}

impl Builtin {
    pub const ALL: [Builtin; 10] = [
        Builtin::Neg,
        Builtin::Recip,
        Builtin::Exp,
        Builtin::Ln,
        Builtin::Sin,
        Builtin::Cos,
        Builtin::Asin,
        Builtin::Acos,
        Builtin::Atan,
        Builtin::Raise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Neg => "unary--",
            Builtin::Recip => "unary-/",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Asin => "asin",
            Builtin::Acos => "acos",
            Builtin::Atan => "atan",
            Builtin::Raise => "raise",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Raise => 2,
            _ => 1,
        }
    }

    /// `unary--` and `unary-/` are the expression nodes `Neg` and `Recip`,
    /// never `Apply` targets.
    pub fn is_operator(self) -> bool {
        matches!(self, Builtin::Neg | Builtin::Recip)
    }

    pub fn apply(self, args: &[Complex64]) -> Result<Complex64, EvalError> {
        let z = args[0];
        let value = match self {
            Builtin::Neg => -z,
            Builtin::Recip => return recip(z),
            Builtin::Exp => z.exp(),
            Builtin::Ln => {
                if z == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DomainViolation(Violation::Singular(
                        "logarithm of zero",
                    )));
                }
                z.ln()
            }
            Builtin::Sin => z.sin(),
            Builtin::Cos => z.cos(),
            Builtin::Asin => z.asin(),
            Builtin::Acos => z.acos(),
            Builtin::Atan => z.atan(),
            Builtin::Raise => return raise(z, args[1]),
        };
        finite(value)
    }
}

fn canon(z: Complex64) -> Complex64 {
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

fn finite(z: Complex64) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(canon(z))
    } else {
        Err(EvalError::DomainViolation(Violation::Overflow))
    }
}

fn recip(z: Complex64) -> Result<Complex64, EvalError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(EvalError::DomainViolation(Violation::Singular(
            "reciprocal of zero",
        )));
    }
    if z.im == 0.0 {
        finite(Complex64::new(1.0 / z.re, 0.0))
    } else {
        finite(z.finv())
    }
}

/// Principal-branch power. Integer exponents use repeated multiplication so
/// that negative bases stay on the real line.
fn raise(base: Complex64, exponent: Complex64) -> Result<Complex64, EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    let integral = exponent.im == 0.0
        && exponent.re.fract() == 0.0
        && exponent.re.abs() <= f64::from(i32::MAX);
    if integral {
        let n = exponent.re as i32;
        if base == zero && n < 0 {
            return Err(EvalError::DomainViolation(Violation::Singular(
                "zero raised to a negative power",
            )));
        }
        return finite(base.powi(n));
    }
    if base == zero {
        return if exponent.re > 0.0 {
            Ok(zero)
        } else {
            Err(EvalError::DomainViolation(Violation::Singular(
                "zero raised to a non-positive power",
            )))
        };
    }
    finite((exponent * base.ln()).exp())
}

enum Val {
    Exact(Number),
    Float(Complex64),
}

impl Val {
    fn float(&self) -> Complex64 {
        match self {
            Val::Exact(n) => n.approx(),
            Val::Float(z) => *z,
        }
    }

    fn into_float(self) -> Result<Complex64, EvalError> {
        match self {
            Val::Exact(n) => finite(n.approx()),
            Val::Float(z) => Ok(z),
        }
    }
}

/// Evaluates `e` at `env`, dispatching applications through `reg`.
pub fn eval(e: &Expr, env: &Env, reg: &Registry) -> Result<Complex64, EvalError> {
    eval_val(e, env, reg)?.into_float()
}

fn eval_val(e: &Expr, env: &Env, reg: &Registry) -> Result<Val, EvalError> {
    match e {
        Expr::Const(n) => Ok(Val::Exact(n.clone())),
        Expr::Var(v) => env
            .get(v)
            .map(Val::Float)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Expr::Add(a, b) => match (eval_val(a, env, reg)?, eval_val(b, env, reg)?) {
            (Val::Exact(x), Val::Exact(y)) => Ok(Val::Exact(x.add(&y))),
            (x, y) => finite(x.float() + y.float()).map(Val::Float),
        },
        Expr::Mul(a, b) => match (eval_val(a, env, reg)?, eval_val(b, env, reg)?) {
            (Val::Exact(x), Val::Exact(y)) => Ok(Val::Exact(x.mul(&y))),
            (x, y) => finite(x.float() * y.float()).map(Val::Float),
        },
        Expr::Neg(a) => match eval_val(a, env, reg)? {
            Val::Exact(x) => Ok(Val::Exact(x.neg())),
            Val::Float(z) => Ok(Val::Float(canon(-z))),
        },
        Expr::Recip(a) => match eval_val(a, env, reg)? {
            Val::Exact(x) => x.recip().map(Val::Exact).ok_or(EvalError::DomainViolation(
                Violation::Singular("reciprocal of zero"),
            )),
            Val::Float(z) => recip(z).map(Val::Float),
        },
        Expr::Apply(f, args) => {
            let imp = reg
                .function(f)
                .ok_or_else(|| EvalError::UnknownFunction(f.clone()))?;
            if imp.arity() != args.len() {
                return Err(EvalError::ArityMismatch {
                    name: f.clone(),
                    expected: imp.arity(),
                    found: args.len(),
                });
            }
            let values = args
                .iter()
                .map(|a| eval_val(a, env, reg).and_then(Val::into_float))
                .collect::<Result<Vec<_>, _>>()?;
            match imp {
                FunctionImpl::Builtin(b) => b.apply(&values).map(Val::Float),
                FunctionImpl::Inline(def) => {
                    let local: Env = def.formals().zip(values).collect();
                    eval(&def.body, &local, reg).map(Val::Float)
                }
            }
        }
    }
}

/// Decides membership of `env` in the domain described by `p`. Any failure
/// to evaluate an embedded expression means "not in the domain".
pub fn eval_pred(p: &DomainPred, env: &Env, reg: &Registry) -> Result<bool, PredError> {
    Ok(match p {
        DomainPred::True => true,
        DomainPred::And(a, b) => eval_pred(a, env, reg)? && eval_pred(b, env, reg)?,
        DomainPred::NonZero(e) => eval(e, env, reg).is_ok_and(|z| z != Complex64::new(0.0, 0.0)),
        DomainPred::IsReal(e) => eval(e, env, reg).is_ok_and(|z| z.im == 0.0),
        DomainPred::InOpenInterval(e, lo, hi) => eval(e, env, reg)
            .is_ok_and(|z| z.im == 0.0 && lo.to_f64() < z.re && z.re < hi.to_f64()),
        DomainPred::Named(name, e) => {
            let def = reg
                .predicate(name)
                .ok_or_else(|| PredError::UnknownPredicate(name.clone()))?;
            match eval(e, env, reg) {
                Ok(z) => eval_pred(&def.body, &Env::single(def.formal.clone(), z), reg)?,
                Err(_) => false,
            }
        }
    })
}
