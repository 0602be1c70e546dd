//! Shared helpers for integration tests: random expressions and an
//! independent finite-difference derivative.
#![allow(dead_code)]

use num::complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use symdiff::{eval, eval_pred, DomainPred, Env, Expr, Number, Registry};

const UNARY: [&str; 6] = ["exp", "sin", "cos", "ln", "asin", "atan"];

fn small_const<R: Rng>(rng: &mut R) -> Expr {
    if rng.gen_bool(0.7) {
        Expr::int(rng.gen_range(-3..=3))
    } else {
        let d = rng.gen_range(2..=4);
        Expr::constant(Number::ratio(rng.gen_range(-3 * d..=3 * d), d))
    }
}

/// Random expression in `x` of depth at most `depth`, built from the
/// arithmetic nodes and the built-in functions, with constants in [-3, 3].
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            Expr::var("x")
        } else {
            small_const(rng)
        };
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 | 1 => Expr::add(sub(rng), sub(rng)),
        2 | 3 => Expr::mul(sub(rng), sub(rng)),
        4 => Expr::neg(sub(rng)),
        5 => Expr::recip(sub(rng)),
        6 => Expr::apply(
            "raise",
            vec![sub(rng), Expr::int(rng.gen_range(-3..=3))],
        ),
        _ => Expr::apply1(UNARY[rng.gen_range(0..UNARY.len())], sub(rng)),
    }
}

/// Random expression biased towards simplifiable shapes: zeros, ones,
/// nested constants and repeated subterms.
pub fn random_simplifiable<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..6) {
            0 => Expr::int(0),
            1 => Expr::int(1),
            2 => Expr::int(if rng.gen_bool(0.5) { 2 } else { -4 }),
            3 => small_const(rng),
            _ => Expr::var(if rng.gen_bool(0.8) { "x" } else { "y" }),
        };
    }
    let sub = |rng: &mut R| random_simplifiable(rng, depth - 1);
    match rng.gen_range(0..10) {
        0 | 1 => Expr::add(sub(rng), sub(rng)),
        2 | 3 => Expr::mul(sub(rng), sub(rng)),
        4 => {
            let e = sub(rng);
            Expr::add(e.clone(), e)
        }
        5 => Expr::neg(sub(rng)),
        6 => Expr::recip(sub(rng)),
        7 => Expr::mul(Expr::int(2), Expr::mul(Expr::int(-2), sub(rng))),
        8 => Expr::apply("raise", vec![sub(rng), Expr::int(rng.gen_range(-2..=3))]),
        _ => Expr::apply1(UNARY[rng.gen_range(0..UNARY.len())], sub(rng)),
    }
}

pub fn arb_const() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..=5).prop_map(Expr::int),
        ((-12i64..=12), (1i64..=4)).prop_map(|(n, d)| Expr::constant(Number::ratio(n, d))),
        ((-3i64..=3), (-3i64..=3)).prop_map(|(re, im)| {
            Expr::constant(Number::new(
                num::BigRational::from_integer(re.into()),
                num::BigRational::from_integer(im.into()),
            ))
        }),
    ]
}

/// Expressions over `x` and `y`.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        2 => Just(Expr::var("x")),
        1 => Just(Expr::var("y")),
        2 => arb_const(),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::recip),
            (0..UNARY.len(), inner.clone()).prop_map(|(i, a)| Expr::apply1(UNARY[i], a)),
            (inner, -3i64..=3).prop_map(|(a, n)| Expr::apply("raise", vec![a, Expr::int(n)])),
        ]
    })
}

pub fn at(x: f64) -> Env {
    Env::single("x", Complex64::new(x, 0.0))
}

/// Central difference of `f` at real `x` with step `h`.
fn central(f: &Expr, reg: &Registry, x: f64, h: f64) -> Option<Complex64> {
    let plus = eval(f, &at(x + h), reg).ok()?;
    let minus = eval(f, &at(x - h), reg).ok()?;
    Some((plus - minus) / (2.0 * h))
}

/// Richardson-extrapolated central difference over `h` and `h / 10`.
fn richardson(f: &Expr, reg: &Registry, x: f64, h: f64) -> Option<Complex64> {
    let coarse = central(f, reg, x, h)?;
    let fine = central(f, reg, x, h / 10.0)?;
    Some((fine * 100.0 - coarse) / 99.0)
}

/// Finite-difference derivative of `f` at `x`, using steps 1e-3 and 1e-4.
/// `None` when the oracle cannot resolve the derivative: a stencil point is
/// undefined, or a second estimate with doubled steps disagrees by more
/// than `1e-7` relative.
pub fn fd_derivative(f: &Expr, reg: &Registry, x: f64) -> Option<Complex64> {
    fd_derivative_on(f, &DomainPred::True, reg, x)
}

/// As [`fd_derivative`], also requiring every stencil point to lie in
/// `domain`.
pub fn fd_derivative_on(f: &Expr, domain: &DomainPred, reg: &Registry, x: f64) -> Option<Complex64> {
    for h in [1e-3, 1e-4, 2e-3, 2e-4] {
        for y in [x - h, x + h] {
            if !eval_pred(domain, &at(y), reg).unwrap_or(false) {
                return None;
            }
        }
    }
    let d = richardson(f, reg, x, 1e-3)?;
    let check = richardson(f, reg, x, 2e-3)?;
    let scale = d.norm().max(1.0);
    ((d - check).norm() <= 1e-7 * scale).then_some(d)
}

pub fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}
