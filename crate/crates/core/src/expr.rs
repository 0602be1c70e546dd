//! Expression trees, domain predicates and evaluation environments.
//!
//! Expressions are kept in a strictly binary normal form: there is no
//! subtraction or division node. `a - b` is `Add(a, Neg(b))` and `a / b`
//! is `Mul(a, Recip(b))`. Constants are exact Gaussian rationals; the
//! floating point approximation used by the evaluator is cached alongside.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use num::complex::Complex64;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational};

/// An exact Gaussian rational `re + im·i`.
#[derive(Clone)]
pub struct Number {
    re: BigRational,
    im: BigRational,
    approx: Complex64,
}

impl Number {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        let approx = Complex64::new(ratio_to_f64(&re), ratio_to_f64(&im));
        Number { re, im, approx }
    }

    pub fn real(re: BigRational) -> Self {
        Number::new(re, BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Number::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Number::real(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// Correctly rounded double precision value.
    pub fn approx(&self) -> Complex64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, other: &Number) -> Number {
        Number::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn mul(&self, other: &Number) -> Number {
        Number::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn neg(&self) -> Number {
        Number::new(-&self.re, -&self.im)
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Number::new(&self.re / &norm, -&self.im / &norm))
    }

    /// True for real values `±2^k` with `k >= 0`; multiplying a double by
    /// such a value is exact unless it overflows.
    pub fn is_signed_power_of_two(&self) -> bool {
        if !self.im.is_zero() || !self.re.is_integer() {
            return false;
        }
        let n = self.re.to_integer().abs();
        if n.is_zero() {
            return false;
        }
        let bits = n.bits();
        n == BigInt::one() << (bits - 1)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl Eq for Number {}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.re.hash(state);
        self.im.hash(state);
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// An extended rational: a finite rational or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl Bound {
    pub fn int(n: i64) -> Self {
        Bound::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Bound::NegInf => f64::NEG_INFINITY,
            Bound::PosInf => f64::INFINITY,
            Bound::Finite(r) => ratio_to_f64(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Number),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Recip(Box<Expr>),
    Apply(String, Vec<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(n: Number) -> Expr {
        Expr::Const(n)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Number::int(n))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn recip(a: Expr) -> Expr {
        Expr::Recip(Box::new(a))
    }

    pub fn apply(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Apply(name.into(), args)
    }

    pub fn apply1(name: impl Into<String>, arg: Expr) -> Expr {
        Expr::Apply(name.into(), vec![arg])
    }

    pub fn as_const(&self) -> Option<&Number> {
        match self {
            Expr::Const(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(Number::is_zero)
    }

    pub fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(Number::is_one)
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Mul(a, b) => 1 + a.node_count() + b.node_count(),
            Expr::Neg(a) | Expr::Recip(a) => 1 + a.node_count(),
            Expr::Apply(_, args) => 1 + args.iter().map(Expr::node_count).sum::<usize>(),
        }
    }

    pub fn contains_var(&self, var: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => v == var,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.contains_var(var) || b.contains_var(var),
            Expr::Neg(a) | Expr::Recip(a) => a.contains_var(var),
            Expr::Apply(_, args) => args.iter().any(|a| a.contains_var(var)),
        }
    }

    /// Names of all functions applied anywhere in the tree.
    pub fn applied_functions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_functions(&mut out);
        out
    }

    fn collect_functions(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                a.collect_functions(out);
                b.collect_functions(out);
            }
            Expr::Neg(a) | Expr::Recip(a) => a.collect_functions(out),
            Expr::Apply(f, args) => {
                out.insert(f.clone());
                for a in args {
                    a.collect_functions(out);
                }
            }
        }
    }
}

pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_vars(e, &mut out);
    out
}

fn collect_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Const(_) => {}
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Add(a, b) | Expr::Mul(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Expr::Neg(a) | Expr::Recip(a) => collect_vars(a, out),
        Expr::Apply(_, args) => args.iter().for_each(|a| collect_vars(a, out)),
    }
}

pub fn substitute(e: &Expr, var: &str, replacement: &Expr) -> Expr {
    substitute_all(e, &[(var, replacement)])
}

/// Simultaneous substitution. Replacements are not themselves rewritten, so
/// `{x ↦ a, a ↦ x}` swaps the two variables.
pub fn substitute_all(e: &Expr, bindings: &[(&str, &Expr)]) -> Expr {
    match e {
        Expr::Const(_) => e.clone(),
        Expr::Var(v) => bindings
            .iter()
            .find(|(name, _)| name == v)
            .map_or_else(|| e.clone(), |(_, r)| (*r).clone()),
        Expr::Add(a, b) => Expr::add(substitute_all(a, bindings), substitute_all(b, bindings)),
        Expr::Mul(a, b) => Expr::mul(substitute_all(a, bindings), substitute_all(b, bindings)),
        Expr::Neg(a) => Expr::neg(substitute_all(a, bindings)),
        Expr::Recip(a) => Expr::recip(substitute_all(a, bindings)),
        Expr::Apply(f, args) => Expr::Apply(
            f.clone(),
            args.iter().map(|a| substitute_all(a, bindings)).collect(),
        ),
    }
}

/// Where an expression is defined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DomainPred {
    True,
    And(Box<DomainPred>, Box<DomainPred>),
    NonZero(Expr),
    IsReal(Expr),
    /// Real and strictly between the bounds.
    InOpenInterval(Expr, Bound, Bound),
    /// A predicate defined in the registry, applied to one expression.
    Named(String, Expr),
}

impl DomainPred {
    pub fn and(a: DomainPred, b: DomainPred) -> DomainPred {
        DomainPred::And(Box::new(a), Box::new(b))
    }

    /// Left-folded conjunction; `True` for an empty list.
    pub fn all(preds: impl IntoIterator<Item = DomainPred>) -> DomainPred {
        let mut iter = preds.into_iter();
        match iter.next() {
            None => DomainPred::True,
            Some(first) => iter.fold(first, DomainPred::and),
        }
    }

    /// Flattened list of conjuncts, in left-to-right order.
    pub fn conjuncts(&self) -> Vec<&DomainPred> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts<'a>(&'a self, out: &mut Vec<&'a DomainPred>) {
        match self {
            DomainPred::And(a, b) => {
                a.collect_conjuncts(out);
                b.collect_conjuncts(out);
            }
            other => out.push(other),
        }
    }

    pub fn substitute_all(&self, bindings: &[(&str, &Expr)]) -> DomainPred {
        match self {
            DomainPred::True => DomainPred::True,
            DomainPred::And(a, b) => {
                DomainPred::and(a.substitute_all(bindings), b.substitute_all(bindings))
            }
            DomainPred::NonZero(e) => DomainPred::NonZero(substitute_all(e, bindings)),
            DomainPred::IsReal(e) => DomainPred::IsReal(substitute_all(e, bindings)),
            DomainPred::InOpenInterval(e, lo, hi) => {
                DomainPred::InOpenInterval(substitute_all(e, bindings), lo.clone(), hi.clone())
            }
            DomainPred::Named(p, e) => DomainPred::Named(p.clone(), substitute_all(e, bindings)),
        }
    }

    pub fn substitute(&self, var: &str, replacement: &Expr) -> DomainPred {
        self.substitute_all(&[(var, replacement)])
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_expr(&mut |e| collect_vars(e, &mut out));
        out
    }

    pub fn named_predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |p| {
            if let DomainPred::Named(name, _) = p {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn for_each_expr(&self, f: &mut impl FnMut(&Expr)) {
        self.visit(&mut |p| match p {
            DomainPred::NonZero(e)
            | DomainPred::IsReal(e)
            | DomainPred::InOpenInterval(e, _, _)
            | DomainPred::Named(_, e) => f(e),
            DomainPred::True | DomainPred::And(_, _) => {}
        });
    }

    fn visit(&self, f: &mut impl FnMut(&DomainPred)) {
        f(self);
        if let DomainPred::And(a, b) = self {
            a.visit(f);
            b.visit(f);
        }
    }
}

/// Variable bindings for evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    bindings: BTreeMap<String, Complex64>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn single(name: impl Into<String>, value: Complex64) -> Self {
        let mut env = Env::new();
        env.bind(name, value);
        env
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Complex64) {
        self.bindings.insert(name.into(), value);
    }

    pub fn with(&self, name: impl Into<String>, value: Complex64) -> Self {
        let mut env = self.clone();
        env.bind(name, value);
        env
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.bindings.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Complex64)> {
        self.bindings.iter()
    }
}

impl<S: Into<String>> FromIterator<(S, Complex64)> for Env {
    fn from_iter<I: IntoIterator<Item = (S, Complex64)>>(iter: I) -> Self {
        let mut env = Env::new();
        for (k, v) in iter {
            env.bind(k, v);
        }
        env
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }

    #[test]
    fn substitute_replaces_every_occurrence() {
        let e = Expr::mul(x(), x());
        let r = Expr::add(Expr::var("y"), Expr::int(1));
        assert_eq!(substitute(&e, "x", &r), Expr::mul(r.clone(), r));
    }

    #[test]
    fn substitute_without_occurrence_is_identity() {
        assert_eq!(substitute(&Expr::int(5), "x", &Expr::var("y")), Expr::int(5));
    }

    #[test]
    fn substitute_into_reciprocal_template() {
        let template = Expr::neg(Expr::recip(Expr::mul(x(), x())));
        let u = Expr::var("u");
        assert_eq!(
            substitute(&template, "x", &u),
            Expr::neg(Expr::recip(Expr::mul(u.clone(), u)))
        );
    }

    #[test]
    fn simultaneous_substitution_does_not_rewrite_replacements() {
        let e = Expr::apply("raise", vec![x(), Expr::var("a")]);
        let swapped = substitute_all(&e, &[("x", &Expr::var("a")), ("a", &x())]);
        assert_eq!(swapped, Expr::apply("raise", vec![Expr::var("a"), x()]));
    }

    #[test]
    fn free_vars_examples() {
        assert!(free_vars(&Expr::int(3)).is_empty());
        let e = Expr::add(x(), Expr::mul(Expr::var("y"), x()));
        assert_eq!(
            free_vars(&e).into_iter().collect::<Vec<_>>(),
            vec!["x".to_string(), "y".to_string()]
        );
        assert_eq!(
            free_vars(&Expr::apply1("exp", x())).into_iter().collect::<Vec<_>>(),
            vec!["x".to_string()]
        );
    }

    #[test]
    fn gaussian_arithmetic_is_exact() {
        let i = Number::new(BigRational::zero(), BigRational::one());
        assert_eq!(i.mul(&i), Number::int(-1));
        let third = Number::ratio(1, 3);
        assert_eq!(third.add(&third).add(&third), Number::int(1));
        assert_eq!(Number::int(4).recip().unwrap(), Number::ratio(1, 4));
        assert!(Number::int(0).recip().is_none());
        assert_eq!(third.approx().re, 1.0 / 3.0);
    }

    #[test]
    fn powers_of_two() {
        for n in [1, 2, 4, -8, 1024] {
            assert!(Number::int(n).is_signed_power_of_two(), "{n}");
        }
        for n in [0, 3, 6, -12] {
            assert!(!Number::int(n).is_signed_power_of_two(), "{n}");
        }
        assert!(!Number::ratio(1, 2).is_signed_power_of_two());
    }

    #[test]
    fn conjuncts_flatten_left_and_right_nesting() {
        let a = DomainPred::NonZero(x());
        let b = DomainPred::IsReal(x());
        let p = DomainPred::and(DomainPred::and(a.clone(), DomainPred::True), b.clone());
        assert_eq!(p.conjuncts(), vec![&a, &DomainPred::True, &b]);
    }
}
