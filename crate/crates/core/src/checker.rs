//! Numeric checking of obligations.
//!
//! Each obligation kind becomes a sampled test: points are drawn from a box
//! by rejection sampling against the relevant domain predicate, and the
//! property is evaluated at every accepted point. Limits become shrinking
//! step schedules. A failing check carries the point that broke it.

use std::fmt::Write as _;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differ::{DiffResult, Obligation, ObligationKind};
use crate::eval::{eval, eval_pred, EvalError};
use crate::expr::{DomainPred, Env, Expr};
use crate::parser::print_pred;
use crate::registry::Registry;

/// Bound used by the inverse-function relations and by prime-not-zero.
const RELATION_TOL: f64 = 1e-9;
/// Absolute slack in the convergence comparison of the close check.
const CONVERGENCE_SLACK: f64 = 1e-12;
const NEWTON_STEPS: usize = 60;
const NEWTON_STARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub sample_count: usize,
    pub re_range: (f64, f64),
    /// `None` picks `[-2, 2]` when the sampled domain never requires a real
    /// point, and `[0, 0]` otherwise.
    pub im_range: Option<(f64, f64)>,
    pub rng_seed: u64,
    /// Strictly decreasing positive steps.
    pub h_schedule: Vec<f64>,
    pub close_tol: f64,
    pub cont_modulus: f64,
    pub min_accepted: usize,
    pub not_close_gap: f64,
    pub image_gap: f64,
    /// Smallest step tried when the last scheduled step is not yet within
    /// tolerance.
    pub refine_floor: f64,
    /// Values for variables other than the one being sampled.
    pub params: Env,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            sample_count: 100,
            re_range: (-10.0, 10.0),
            im_range: None,
            rng_seed: 0xD1FF,
            h_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5],
            close_tol: 1e-4,
            cont_modulus: 1e-3,
            min_accepted: 10,
            not_close_gap: 0.5,
            image_gap: 1e-9,
            refine_floor: 1e-9,
            params: Env::new(),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.sample_count == 0 {
            return Err("sample count must be positive".into());
        }
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !range_ok(self.re_range) || !self.im_range.is_none_or(range_ok) {
            return Err("sampling box bounds must be finite with lo <= hi".into());
        }
        if self.h_schedule.is_empty()
            || self.h_schedule.iter().any(|h| h.is_nan() || *h <= 0.0)
            || self.h_schedule.windows(2).any(|w| w[1] >= w[0])
        {
            return Err("step schedule must be positive and strictly decreasing".into());
        }
        let positive = [
            self.close_tol,
            self.cont_modulus,
            self.not_close_gap,
            self.image_gap,
            self.refine_floor,
        ];
        if positive.iter().any(|t| t.is_nan() || *t <= 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }

    fn h_min(&self) -> f64 {
        *self.h_schedule.last().expect("validated schedule")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    InsufficientSamples,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::InsufficientSamples => "insufficient-samples",
        }
    }
}

/// Where a check failed. `other` is the second point for checks that
/// compare two points (a step or a colliding partner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub point: [f64; 2],
    pub other: Option<[f64; 2]>,
    pub detail: String,
}

impl Counterexample {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.point[0], self.point[1])
    }

    pub fn other(&self) -> Option<Complex64> {
        self.other.map(|[re, im]| Complex64::new(re, im))
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObligationReport {
    pub name: String,
    pub subject: String,
    pub status: CheckStatus,
    pub tried: usize,
    pub accepted: usize,
    /// Accepted points whose evaluation overflowed and were left out.
    pub skipped: usize,
    /// The largest violation measure seen, or for lower-bounded properties
    /// (prime-not-zero, preserves-not-close) the smallest margin. Close and
    /// continuity residuals are divided by `max(1, |value|)`, the same scale
    /// their tolerances use.
    pub residual: f64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub entries: Vec<ObligationReport>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status == CheckStatus::Pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:<6} {:>9} {:>10}  {:<40} counterexample",
            "obligation", "status", "accepted", "residual", "subject"
        );
        for e in &self.entries {
            let status = match e.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::InsufficientSamples => "EMPTY",
            };
            let counter = match &e.counterexample {
                None => "-".to_string(),
                Some(c) => match c.other() {
                    Some(o) => format!(
                        "x={} y={}: {}",
                        crate::parser::print_complex(c.point()),
                        crate::parser::print_complex(o),
                        c.detail
                    ),
                    None => format!("x={}: {}", crate::parser::print_complex(c.point()), c.detail),
                },
            };
            let _ = writeln!(
                out,
                "{:<20} {:<6} {:>9} {:>10.3e}  {:<40} {}",
                e.name,
                status,
                format!("{}/{}", e.accepted, e.tried),
                e.residual,
                e.subject,
                counter
            );
        }
        let passed = self.entries.iter().filter(|e| e.status == CheckStatus::Pass).count();
        let _ = writeln!(out, "{passed} of {} obligations passed", self.entries.len());
        out
    }

    /// One JSON object per line, one line per obligation.
    pub fn to_machine(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("report entries serialize") + "\n")
            .collect()
    }

    pub fn from_machine(text: &str) -> Result<CheckReport, serde_json::Error> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(CheckReport { entries })
    }
}

/// Checks one obligation with the configured seed.
pub fn check_obligation(ob: &Obligation, reg: &Registry, cfg: &CheckConfig) -> ObligationReport {
    check_with_stream(ob, reg, cfg, 0)
}

/// Checks every obligation of `result`, in order. Each obligation draws
/// from its own random stream, so the report does not depend on scheduling.
pub fn check_all(result: &DiffResult, reg: &Registry, cfg: &CheckConfig) -> CheckReport {
    check_obligations(&result.obligations, reg, cfg)
}

pub fn check_obligations(obs: &[Obligation], reg: &Registry, cfg: &CheckConfig) -> CheckReport {
    let entries = obs
        .par_iter()
        .enumerate()
        .map(|(i, ob)| check_with_stream(ob, reg, cfg, i as u64))
        .collect();
    CheckReport { entries }
}

/// The domain a check of `ob` samples from.
pub fn sampled_domain(ob: &Obligation) -> &DomainPred {
    match (&ob.inverse, ob.kind) {
        (
            Some(slots),
            ObligationKind::InverseInRange
            | ObligationKind::InverseRelation
            | ObligationKind::DerivRelation,
        ) => &slots.inverse_domain,
        _ => &ob.subject_domain,
    }
}

/// Whether some conjunct, possibly inside a registered predicate, forces
/// points to be real.
fn requires_real(p: &DomainPred, reg: &Registry, depth: usize) -> bool {
    match p {
        DomainPred::True | DomainPred::NonZero(_) => false,
        DomainPred::IsReal(_) | DomainPred::InOpenInterval(..) => true,
        DomainPred::And(a, b) => requires_real(a, reg, depth) || requires_real(b, reg, depth),
        DomainPred::Named(name, _) => {
            depth < 16
                && reg
                    .predicate(name)
                    .is_some_and(|def| requires_real(&def.body, reg, depth + 1))
        }
    }
}

pub fn imaginary_range(p: &DomainPred, reg: &Registry, cfg: &CheckConfig) -> (f64, f64) {
    cfg.im_range.unwrap_or(if requires_real(p, reg, 0) {
        (0.0, 0.0)
    } else {
        (-2.0, 2.0)
    })
}

pub struct Sampling {
    pub points: Vec<Complex64>,
    pub tried: usize,
}

/// Rejection-samples up to `sample_count` points of `domain` (in `var`)
/// from the configured box, trying at most 100 times that many.
pub fn sample_domain(
    domain: &DomainPred,
    var: &str,
    reg: &Registry,
    cfg: &CheckConfig,
    stream: u64,
) -> Sampling {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(stream);
    let (re_lo, re_hi) = cfg.re_range;
    let (im_lo, im_hi) = imaginary_range(domain, reg, cfg);
    let mut points = Vec::new();
    let mut tried = 0;
    while points.len() < cfg.sample_count && tried < 100 * cfg.sample_count {
        tried += 1;
        let z = Complex64::new(rng.gen_range(re_lo..=re_hi), rng.gen_range(im_lo..=im_hi));
        let env = cfg.params.with(var, z);
        if eval_pred(domain, &env, reg).unwrap_or(false) {
            points.push(z);
        }
    }
    Sampling { points, tried }
}

/// Outcome of a property at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    /// The property held; the value is its residual.
    Held(f64),
    /// An evaluation overflowed; the point says nothing.
    Skipped,
    Failed(f64, Counterexample),
}

struct Checker<'a> {
    ob: &'a Obligation,
    reg: &'a Registry,
    cfg: &'a CheckConfig,
    complex: bool,
}

impl<'a> Checker<'a> {
    fn new(ob: &'a Obligation, reg: &'a Registry, cfg: &'a CheckConfig) -> Self {
        let (lo, hi) = imaginary_range(sampled_domain(ob), reg, cfg);
        Checker {
            ob,
            reg,
            cfg,
            complex: lo < hi,
        }
    }

    fn at(&self, e: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
        eval(e, &self.cfg.params.with(self.ob.var.clone(), z), self.reg)
    }

    fn holds(&self, p: &DomainPred, z: Complex64) -> bool {
        eval_pred(p, &self.cfg.params.with(self.ob.var.clone(), z), self.reg).unwrap_or(false)
    }

    fn in_box(&self, z: Complex64) -> bool {
        let (re_lo, re_hi) = self.cfg.re_range;
        let (im_lo, im_hi) = imaginary_range(sampled_domain(self.ob), self.reg, self.cfg);
        (re_lo..=re_hi).contains(&z.re) && (im_lo..=im_hi).contains(&z.im)
    }

    fn prime(&self) -> &'a Expr {
        self.ob
            .subject_prime
            .as_ref()
            .expect("derivative obligations carry a prime")
    }

    fn directions(&self) -> Vec<Complex64> {
        let mut dirs = vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        if self.complex {
            dirs.push(Complex64::new(0.0, 1.0));
        }
        dirs
    }

    /// Steps of the schedule followed by refinements down to the floor.
    fn steps(&self) -> (Vec<f64>, Vec<f64>) {
        let mut refine = Vec::new();
        let mut h = self.cfg.h_min() / 10.0;
        while h >= self.cfg.refine_floor * (1.0 - 1e-9) {
            refine.push(h);
            h /= 10.0;
        }
        (self.cfg.h_schedule.clone(), refine)
    }
}

/// Evaluates, turning errors into an outcome: overflow skips the point,
/// anything else is a failure at `x` (with `other` as the second point).
macro_rules! value {
    ($e:expr, $x:expr, $other:expr, $what:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) if err.is_overflow() => return PointOutcome::Skipped,
            Err(err) => {
                return PointOutcome::Failed(
                    f64::INFINITY,
                    Counterexample {
                        point: pair($x),
                        other: $other.map(pair),
                        detail: format!("{} does not evaluate: {err}", $what),
                    },
                )
            }
        }
    };
}

fn fail(residual: f64, x: Complex64, other: Option<Complex64>, detail: String) -> PointOutcome {
    PointOutcome::Failed(
        residual,
        Counterexample {
            point: pair(x),
            other: other.map(pair),
            detail,
        },
    )
}

/// Rounding error bound of `|f(y) - f(x)|` relative to the step.
fn roundoff(fx: Complex64, fy: Complex64) -> f64 {
    8.0 * f64::EPSILON * (fx.norm() + fy.norm())
}

/// Checks the property of `ob` at a single point `x` of its sampled domain.
/// Not meaningful for preserves-not-close, which compares pairs; see
/// [`check_pair`].
pub fn check_point(ob: &Obligation, reg: &Registry, cfg: &CheckConfig, x: Complex64) -> PointOutcome {
    let c = Checker::new(ob, reg, cfg);
    match ob.kind {
        ObligationKind::Number | ObligationKind::Standard => finite_at(&c, &ob.subject, x, "f"),
        ObligationKind::PrimeNumber | ObligationKind::PrimeStandard => {
            finite_at(&c, c.prime(), x, "f'")
        }
        ObligationKind::Continuous => continuity_at(&c, &ob.subject, x),
        ObligationKind::PrimeContinuous => continuity_at(&c, c.prime(), x),
        ObligationKind::Close => close_at(&c, x),
        ObligationKind::DomainIsNumber => {
            if x.re.is_finite() && x.im.is_finite() {
                PointOutcome::Held(0.0)
            } else {
                fail(f64::INFINITY, x, None, "point is not a finite number".into())
            }
        }
        ObligationKind::PrimeNotZero => {
            let d = value!(c.at(c.prime(), x), x, None::<Complex64>, "f'");
            if d.norm() > RELATION_TOL {
                PointOutcome::Held(d.norm())
            } else {
                fail(d.norm(), x, None, format!("|f'(x)| = {:e}", d.norm()))
            }
        }
        ObligationKind::InverseInRange | ObligationKind::InverseRelation | ObligationKind::DerivRelation => {
            inverse_at(&c, x)
        }
        ObligationKind::PreservesNotClose => PointOutcome::Held(f64::INFINITY),
    }
}

fn finite_at(c: &Checker, f: &Expr, x: Complex64, what: &str) -> PointOutcome {
    let _ = value!(c.at(f, x), x, None::<Complex64>, what);
    PointOutcome::Held(0.0)
}

/// Deviations `|f(x + h d) - f(x)|` along the schedule in each direction.
fn continuity_at(c: &Checker, f: &Expr, x: Complex64) -> PointOutcome {
    let fx = value!(c.at(f, x), x, None::<Complex64>, "f");
    let bound = c.cfg.cont_modulus * fx.norm().max(1.0);
    let (schedule, refine) = c.steps();
    let mut worst = 0.0f64;
    for dir in c.directions() {
        let mut last: Option<(f64, f64)> = None;
        let mut prev: Option<f64> = None;
        for &h in &schedule {
            let y = x + dir * h;
            if !c.holds(&c.ob.subject_domain, y) {
                continue;
            }
            let fy = value!(c.at(f, y), x, Some(y), "f at x + h");
            let dev = (fy - fx).norm();
            if let Some(p) = prev {
                if dev > 10.0 * p + roundoff(fx, fy) && dev > bound {
                    return fail(dev / fx.norm().max(1.0), x, Some(y), format!("deviation grows as h shrinks: {dev:e} after {p:e}"));
                }
            }
            prev = Some(dev);
            last = Some((h, dev));
        }
        let Some((_, mut dev)) = last else { continue };
        if dev > bound {
            for &h in &refine {
                let y = x + dir * h;
                if !c.holds(&c.ob.subject_domain, y) {
                    continue;
                }
                let fy = value!(c.at(f, y), x, Some(y), "f at x + h");
                dev = (fy - fx).norm();
                if dev <= bound {
                    break;
                }
            }
            if dev > bound {
                return fail(
                    dev / fx.norm().max(1.0),
                    x,
                    None,
                    format!("|f(x+h) - f(x)| = {dev:e} exceeds {bound:e}"),
                );
            }
        }
        worst = worst.max(dev / fx.norm().max(1.0));
    }
    PointOutcome::Held(worst)
}

/// One-sided difference quotients against the claimed derivative.
fn close_at(c: &Checker, x: Complex64) -> PointOutcome {
    let f = &c.ob.subject;
    let fx = value!(c.at(f, x), x, None::<Complex64>, "f");
    let dx = value!(c.at(c.prime(), x), x, None::<Complex64>, "f'");
    let tol = c.cfg.close_tol * dx.norm().max(1.0);
    let (schedule, refine) = c.steps();
    let mut worst = 0.0f64;
    for dir in c.directions() {
        let residual_at = |h: f64| -> Result<Option<(f64, f64)>, PointOutcome> {
            let y = x + dir * h;
            if !c.holds(&c.ob.subject_domain, y) {
                return Ok(None);
            }
            let fy = match c.at(f, y) {
                Ok(v) => v,
                Err(err) if err.is_overflow() => return Ok(None),
                Err(err) => {
                    return Err(fail(
                        f64::INFINITY,
                        x,
                        Some(y),
                        format!("f at x + h does not evaluate: {err}"),
                    ))
                }
            };
            let q = (fx - fy) / (x - y);
            Ok(Some(((q - dx).norm(), roundoff(fx, fy) / h)))
        };
        let mut first: Option<f64> = None;
        let mut last: Option<(f64, f64)> = None;
        for &h in &schedule {
            match residual_at(h) {
                Err(out) => return out,
                Ok(None) => {}
                Ok(Some(r)) => {
                    first.get_or_insert(r.0);
                    last = Some(r);
                }
            }
        }
        let (Some(first), Some((mut r, mut noise))) = (first, last) else {
            continue;
        };
        let accept = |r: f64, noise: f64| r <= tol && r <= first + CONVERGENCE_SLACK + noise;
        if !accept(r, noise) {
            for &h in &refine {
                match residual_at(h) {
                    Err(out) => return out,
                    Ok(None) => {}
                    Ok(Some((rr, nn))) => {
                        (r, noise) = (rr, nn);
                        if accept(r, noise) {
                            break;
                        }
                    }
                }
            }
            if !accept(r, noise) {
                return fail(
                    r / dx.norm().max(1.0),
                    x,
                    None,
                    format!("difference quotient misses f'(x) by {r:e} (tolerance {tol:e})"),
                );
            }
        }
        worst = worst.max(r / dx.norm().max(1.0));
    }
    PointOutcome::Held(worst)
}

fn inverse_at(c: &Checker, x: Complex64) -> PointOutcome {
    let slots = c.ob.inverse.as_ref().expect("inverse obligations carry inverse slots");
    let g = value!(c.at(&slots.inverse, x), x, None::<Complex64>, "the inverse");
    match c.ob.kind {
        ObligationKind::InverseInRange => {
            if c.holds(&c.ob.subject_domain, g) {
                PointOutcome::Held(0.0)
            } else {
                fail(
                    f64::INFINITY,
                    x,
                    Some(g),
                    format!("inverse value lies outside {}", print_pred(&c.ob.subject_domain)),
                )
            }
        }
        ObligationKind::InverseRelation => {
            let back = value!(c.at(&c.ob.subject, g), x, Some(g), "f at the inverse");
            let err = (back - x).norm();
            if err <= RELATION_TOL * x.norm().max(1.0) {
                PointOutcome::Held(err)
            } else {
                fail(err, x, Some(g), format!("|f(g(x)) - x| = {err:e}"))
            }
        }
        _ => {
            let claimed = value!(c.at(&slots.inverse_prime, x), x, None::<Complex64>, "g'");
            let fp = value!(c.at(c.prime(), g), x, Some(g), "f' at the inverse");
            if fp.norm() == 0.0 {
                return fail(f64::INFINITY, x, Some(g), "f' vanishes at g(x)".into());
            }
            let expected = fp.inv();
            let err = (claimed - expected).norm() / expected.norm().max(1.0);
            if err <= RELATION_TOL {
                PointOutcome::Held(err)
            } else {
                fail(err, x, Some(g), format!("g'(x) differs from 1/f'(g(x)) by {err:e}"))
            }
        }
    }
}

/// Whether `x` and `y` witness a failure of preserves-not-close: both in
/// the domain and the box, at least the gap apart, with images closer than
/// `not_close_gap * image_gap`. Returns the image distance when they are a
/// valid pair.
pub fn check_pair(
    ob: &Obligation,
    reg: &Registry,
    cfg: &CheckConfig,
    x: Complex64,
    y: Complex64,
) -> Option<(f64, bool)> {
    let c = Checker::new(ob, reg, cfg);
    if (x - y).norm() < cfg.not_close_gap
        || !c.in_box(x)
        || !c.in_box(y)
        || !c.holds(&ob.subject_domain, x)
        || !c.holds(&ob.subject_domain, y)
    {
        return None;
    }
    let fx = c.at(&ob.subject, x).ok()?;
    let fy = c.at(&ob.subject, y).ok()?;
    let d = (fx - fy).norm();
    Some((d, d <= cfg.not_close_gap * cfg.image_gap))
}

/// Newton iteration for `f(y) = target` from `start`.
fn solve_for(c: &Checker, target: Complex64, start: Complex64) -> Option<Complex64> {
    let f = &c.ob.subject;
    let mut y = start;
    for _ in 0..NEWTON_STEPS {
        let fy = c.at(f, y).ok()?;
        let resid = fy - target;
        if resid.norm() <= 0.1 * c.cfg.not_close_gap * c.cfg.image_gap {
            return Some(y);
        }
        let d = c.at(c.prime(), y).ok()?;
        if d.norm() == 0.0 {
            return None;
        }
        let step = resid / d;
        y -= step;
        if !(y.re.is_finite() && y.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * y.norm().max(1.0) {
            return Some(y);
        }
    }
    Some(y)
}

fn preserves_not_close(c: &Checker, points: &[Complex64]) -> (PointOutcomeSummary, Option<Counterexample>) {
    let threshold = c.cfg.not_close_gap * c.cfg.image_gap;
    let mut summary = PointOutcomeSummary::default();
    let mut values = Vec::new();
    for &x in points {
        match c.at(&c.ob.subject, x) {
            Ok(v) => values.push((x, v)),
            Err(err) if err.is_overflow() => summary.skipped += 1,
            Err(err) => {
                return (
                    summary,
                    Some(Counterexample {
                        point: pair(x),
                        other: None,
                        detail: format!("f does not evaluate: {err}"),
                    }),
                )
            }
        }
    }
    summary.evaluated = values.len();
    let mut closest = f64::INFINITY;
    let collision = |x: Complex64, y: Complex64, d: f64| Counterexample {
        point: pair(x),
        other: Some(pair(y)),
        detail: format!("|f(x) - f(y)| = {d:e} with |x - y| = {:.3}", (x - y).norm()),
    };
    for (i, &(x, fx)) in values.iter().enumerate() {
        for &(y, fy) in &values[i + 1..] {
            if (x - y).norm() >= c.cfg.not_close_gap {
                let d = (fx - fy).norm();
                closest = closest.min(d);
                if d <= threshold {
                    summary.residual = closest;
                    return (summary, Some(collision(x, y, d)));
                }
            }
        }
        let n = values.len();
        for k in 1..=NEWTON_STARTS.min(n.saturating_sub(1)) {
            let start = values[(i + k) % n].0;
            let Some(y) = solve_for(c, fx, start) else {
                continue;
            };
            if let Some((d, violated)) = check_pair(c.ob, c.reg, c.cfg, x, y) {
                closest = closest.min(d);
                if violated {
                    summary.residual = closest;
                    return (summary, Some(collision(x, y, d)));
                }
            }
        }
    }
    summary.residual = closest;
    (summary, None)
}

#[derive(Default)]
struct PointOutcomeSummary {
    evaluated: usize,
    skipped: usize,
    residual: f64,
}

fn check_with_stream(ob: &Obligation, reg: &Registry, cfg: &CheckConfig, stream: u64) -> ObligationReport {
    let sampling = sample_domain(sampled_domain(ob), &ob.var, reg, cfg, stream);
    let mut report = ObligationReport {
        name: ob.kind.name().to_string(),
        subject: ob.label(),
        status: CheckStatus::Pass,
        tried: sampling.tried,
        accepted: sampling.points.len(),
        skipped: 0,
        residual: 0.0,
        counterexample: None,
    };
    let lower_bounded = matches!(
        ob.kind,
        ObligationKind::PrimeNotZero | ObligationKind::PreservesNotClose
    );
    let evaluated;
    if ob.kind == ObligationKind::PreservesNotClose {
        let c = Checker::new(ob, reg, cfg);
        let (summary, counter) = preserves_not_close(&c, &sampling.points);
        report.skipped = summary.skipped;
        report.residual = summary.residual;
        evaluated = summary.evaluated;
        if counter.is_some() {
            report.status = CheckStatus::Fail;
            report.counterexample = counter;
        }
    } else {
        let mut residual = if lower_bounded { f64::INFINITY } else { 0.0 };
        let mut count = 0;
        for &x in &sampling.points {
            match check_point(ob, reg, cfg, x) {
                PointOutcome::Held(r) => {
                    count += 1;
                    residual = if lower_bounded { residual.min(r) } else { residual.max(r) };
                }
                PointOutcome::Skipped => report.skipped += 1,
                PointOutcome::Failed(r, counter) => {
                    residual = if lower_bounded { residual.min(r) } else { residual.max(r) };
                    report.status = CheckStatus::Fail;
                    report.counterexample = Some(counter);
                    break;
                }
            }
        }
        report.residual = residual;
        evaluated = count;
    }
    if report.status == CheckStatus::Pass && evaluated < cfg.min_accepted {
        report.status = CheckStatus::InsufficientSamples;
    }
    if !report.residual.is_finite() {
        report.residual = f64::MAX;
    }
    report
}

/// Re-runs the failing check of a counterexample on its own. True when it
/// still fails.
pub fn refails(ob: &Obligation, reg: &Registry, cfg: &CheckConfig, counter: &Counterexample) -> bool {
    let x = counter.point();
    if ob.kind == ObligationKind::PreservesNotClose {
        return match counter.other() {
            Some(y) => check_pair(ob, reg, cfg, x, y).is_some_and(|(_, violated)| violated),
            None => Checker::new(ob, reg, cfg)
                .at(&ob.subject, x)
                .is_err_and(|e| !e.is_overflow()),
        };
    }
    matches!(check_point(ob, reg, cfg, x), PointOutcome::Failed(..))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differ::{derivative_hyps, differentiate};
    use crate::parser::{parse_expr, parse_pred};

    fn obligation(kind: ObligationKind, f: &str, fp: &str, dom: &str) -> Obligation {
        derivative_hyps(
            "x",
            &parse_expr(f).unwrap(),
            &parse_expr(fp).unwrap(),
            &parse_pred(dom).unwrap(),
        )
        .into_iter()
        .find(|o| o.kind == kind)
        .unwrap()
    }

    #[test]
    fn square_is_close_to_twice_x() {
        let reg = Registry::builtins();
        let ob = obligation(ObligationKind::Close, "(* x x)", "(* 2 x)", "t");
        let r = check_obligation(&ob, &reg, &CheckConfig::default());
        assert_eq!(r.status, CheckStatus::Pass, "{r:?}");
        assert!(r.residual <= 1e-4);
        assert_eq!(r.accepted, 100);
    }

    #[test]
    fn reciprocal_with_wrong_prime_fails() {
        let reg = Registry::builtins();
        let ob = obligation(ObligationKind::Close, "(/ x)", "1", "(nonzero x)");
        let r = check_obligation(&ob, &reg, &CheckConfig::default());
        assert_eq!(r.status, CheckStatus::Fail);
        let counter = r.counterexample.unwrap();
        assert!(refails(&ob, &reg, &CheckConfig::default(), &counter));
    }

    #[test]
    fn square_collides_with_its_reflection() {
        let reg = Registry::builtins();
        let ob = derivative_hyps("x", &parse_expr("(* x x)").unwrap(), &parse_expr("(* 2 x)").unwrap(), &DomainPred::True);
        let ob = crate::differ::inverse_hyps(
            "x",
            &parse_expr("(sqrt x)").unwrap(),
            &ob[0].subject,
            ob[0].subject_prime.as_ref().unwrap(),
            &DomainPred::True,
            &DomainPred::True,
        )
        .into_iter()
        .find(|o| o.kind == ObligationKind::PreservesNotClose)
        .unwrap();
        let cfg = CheckConfig {
            im_range: Some((0.0, 0.0)),
            ..CheckConfig::default()
        };
        let r = check_obligation(&ob, &reg, &cfg);
        assert_eq!(r.status, CheckStatus::Fail);
        let counter = r.counterexample.unwrap();
        let (x, y) = (counter.point(), counter.other().unwrap());
        assert!((x + y).norm() < 1e-6, "{x} {y}");
        assert!(refails(&ob, &reg, &cfg, &counter));
    }

    #[test]
    fn empty_box_gives_insufficient_samples() {
        let reg = Registry::builtins();
        let ob = obligation(ObligationKind::Number, "(/ x)", "(- (/ (* x x)))", "(nonzero x)");
        let cfg = CheckConfig {
            re_range: (0.0, 0.0),
            im_range: Some((0.0, 0.0)),
            ..CheckConfig::default()
        };
        let r = check_obligation(&ob, &reg, &cfg);
        assert_eq!(r.status, CheckStatus::InsufficientSamples);
        assert_eq!(r.accepted, 0);
        assert_eq!(r.tried, 100 * cfg.sample_count);
    }

    #[test]
    fn constant_passes_everything() {
        let reg = Registry::builtins();
        let result = differentiate(&parse_expr("5").unwrap(), "x", &reg).unwrap();
        assert!(check_all(&result, &reg, &CheckConfig::default()).passed());
    }

    #[test]
    fn ln_exp_pair_passes() {
        let reg = Registry::builtins();
        let result = differentiate(&parse_expr("(ln x)").unwrap(), "x", &reg).unwrap();
        let report = check_all(&result, &reg, &CheckConfig::default());
        assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn accepted_samples_satisfy_the_domain() {
        let reg = Registry::builtins();
        let dom = parse_pred("(and (realp x) (in-open x -1 1))").unwrap();
        let s = sample_domain(&dom, "x", &reg, &CheckConfig::default(), 3);
        assert_eq!(s.points.len(), 100);
        for z in s.points {
            assert!(eval_pred(&dom, &Env::single("x", z), &reg).unwrap());
        }
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let reg = Registry::builtins();
        let cfg = CheckConfig::default();
        let a = sample_domain(&DomainPred::True, "x", &reg, &cfg, 5).points;
        let b = sample_domain(&DomainPred::True, "x", &reg, &cfg, 5).points;
        let c = sample_domain(&DomainPred::True, "x", &reg, &cfg, 6).points;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn complex_sampling_only_without_real_constraints() {
        let reg = Registry::builtins();
        let cfg = CheckConfig::default();
        assert_eq!(imaginary_range(&parse_pred("(nonzero x)").unwrap(), &reg, &cfg), (-2.0, 2.0));
        assert_eq!(imaginary_range(&parse_pred("(and t (realp x))").unwrap(), &reg, &cfg), (0.0, 0.0));
    }

    #[test]
    fn machine_report_round_trips() {
        let reg = Registry::builtins();
        let result = differentiate(&parse_expr("(/ x)").unwrap(), "x", &reg).unwrap();
        let mut report = check_all(&result, &reg, &CheckConfig::default());
        let wrong = obligation(ObligationKind::Close, "(/ x)", "1", "(nonzero x)");
        report.entries.push(check_obligation(&wrong, &reg, &CheckConfig::default()));
        let text = report.to_machine();
        assert_eq!(text.lines().count(), report.entries.len());
        assert_eq!(CheckReport::from_machine(&text).unwrap(), report);
    }

    #[test]
    fn config_validation() {
        assert!(CheckConfig::default().validate().is_ok());
        let bad = CheckConfig {
            h_schedule: vec![1e-3, 1e-2],
            ..CheckConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
