//! Algebraic cleanup of derivatives and domains.
//!
//! Every rewrite preserves the value of an expression at every point where
//! the original is defined, bit for bit under [`eval`](crate::eval::eval),
//! and never turns a defined expression into an undefined one. Rewrites
//! only remove nodes or keep the count, so the process terminates.

use crate::expr::{DomainPred, Expr, Number};

pub struct RewriteRule {
    pub name: &'static str,
    /// The rewrite never extends the set of points where the result is
    /// defined beyond the original's.
    pub domain_safe: bool,
    apply: fn(&Expr) -> Option<Expr>,
}

impl RewriteRule {
    pub fn apply(&self, e: &Expr) -> Option<Expr> {
        (self.apply)(e)
    }
}

fn consts<'a>(a: &'a Expr, b: &'a Expr) -> Option<(&'a Number, &'a Number)> {
    Some((a.as_const()?, b.as_const()?))
}

fn is_leaf(e: &Expr) -> bool {
    matches!(e, Expr::Const(_) | Expr::Var(_))
}

const RULES: &[RewriteRule] = &[
    RewriteRule {
        name: "fold-add",
        domain_safe: true,
        apply: |e| match e {
            Expr::Add(a, b) => consts(a, b).map(|(x, y)| Expr::constant(x.add(y))),
            _ => None,
        },
    },
    RewriteRule {
        name: "fold-mul",
        domain_safe: true,
        apply: |e| match e {
            Expr::Mul(a, b) => consts(a, b).map(|(x, y)| Expr::constant(x.mul(y))),
            _ => None,
        },
    },
    RewriteRule {
        name: "fold-neg",
        domain_safe: true,
        apply: |e| match e {
            Expr::Neg(a) => a.as_const().map(|x| Expr::constant(x.neg())),
            _ => None,
        },
    },
    RewriteRule {
        name: "fold-recip",
        domain_safe: true,
        apply: |e| match e {
            Expr::Recip(a) => a.as_const().and_then(Number::recip).map(Expr::constant),
            _ => None,
        },
    },
    RewriteRule {
        name: "mul-one",
        domain_safe: true,
        apply: |e| match e {
            Expr::Mul(a, b) if a.is_const_one() => Some((**b).clone()),
            Expr::Mul(a, b) if b.is_const_one() => Some((**a).clone()),
            _ => None,
        },
    },
    // Only leaves are dropped: anything else might be undefined somewhere.
    RewriteRule {
        name: "mul-zero",
        domain_safe: true,
        apply: |e| match e {
            Expr::Mul(a, b) if a.is_const_zero() && is_leaf(b) => Some(Expr::int(0)),
            Expr::Mul(a, b) if b.is_const_zero() && is_leaf(a) => Some(Expr::int(0)),
            _ => None,
        },
    },
    RewriteRule {
        name: "add-zero",
        domain_safe: true,
        apply: |e| match e {
            Expr::Add(a, b) if a.is_const_zero() => Some((**b).clone()),
            Expr::Add(a, b) if b.is_const_zero() => Some((**a).clone()),
            _ => None,
        },
    },
    RewriteRule {
        name: "neg-neg",
        domain_safe: true,
        apply: |e| match e {
            Expr::Neg(a) => match &**a {
                Expr::Neg(inner) => Some((**inner).clone()),
                _ => None,
            },
            _ => None,
        },
    },
    // c1 * (c2 * e) -> (c1 c2) * e. Restricted to powers of two so that the
    // reassociation is exact in floating point.
    RewriteRule {
        name: "mul-const-assoc",
        domain_safe: true,
        apply: |e| match e {
            Expr::Mul(a, b) => {
                let c1 = a.as_const().filter(|c| c.is_signed_power_of_two())?;
                let Expr::Mul(c, rest) = &**b else {
                    return None;
                };
                let c2 = c.as_const().filter(|c| c.is_signed_power_of_two())?;
                Some(Expr::mul(Expr::constant(c1.mul(c2)), (**rest).clone()))
            }
            _ => None,
        },
    },
    RewriteRule {
        name: "add-self",
        domain_safe: true,
        apply: |e| match e {
            Expr::Add(a, b) if a == b => Some(Expr::mul(Expr::int(2), (**a).clone())),
            _ => None,
        },
    },
];

pub fn rules() -> &'static [RewriteRule] {
    RULES
}

/// Rewrites to a fixpoint, bottom-up.
pub fn simplify(e: &Expr) -> Expr {
    simplify_counted(e).0
}

/// Like [`simplify`], also returning the number of rewrites performed and
/// whether the fuel of `10 * nodes(e)` rewrites ran out.
pub fn simplify_counted(e: &Expr) -> (Expr, usize, bool) {
    let budget = 10 * e.node_count().max(1);
    let mut fuel = budget;
    let mut current = e.clone();
    loop {
        let next = pass(&current, &mut fuel);
        if next == current || fuel == 0 {
            return (next, budget - fuel, fuel == 0);
        }
        current = next;
    }
}

fn pass(e: &Expr, fuel: &mut usize) -> Expr {
    let rebuilt = match e {
        Expr::Const(_) | Expr::Var(_) => return e.clone(),
        Expr::Add(a, b) => Expr::add(pass(a, fuel), pass(b, fuel)),
        Expr::Mul(a, b) => Expr::mul(pass(a, fuel), pass(b, fuel)),
        Expr::Neg(a) => Expr::neg(pass(a, fuel)),
        Expr::Recip(a) => Expr::recip(pass(a, fuel)),
        Expr::Apply(f, args) => Expr::apply(f.clone(), args.iter().map(|a| pass(a, fuel)).collect()),
    };
    rewrite_root(rebuilt, fuel)
}

fn rewrite_root(mut e: Expr, fuel: &mut usize) -> Expr {
    'outer: while *fuel > 0 {
        for rule in RULES {
            if let Some(next) = rule.apply(&e) {
                *fuel -= 1;
                e = next;
                continue 'outer;
            }
        }
        break;
    }
    e
}

/// Flattens conjunctions, drops `True` and repeated conjuncts. The result
/// is logically equivalent to the input.
pub fn simplify_domain(p: &DomainPred) -> DomainPred {
    let mut kept: Vec<DomainPred> = Vec::new();
    for c in p.conjuncts() {
        if *c != DomainPred::True && !kept.contains(c) {
            kept.push(c.clone());
        }
    }
    DomainPred::all(kept)
}
