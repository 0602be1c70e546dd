//! Symbolic differentiation.
//!
//! [`differentiate`] walks an expression bottom-up, building the derivative
//! and the domain predicate side by side, and records for every function
//! application (and reciprocal) the obligations that together say "this is
//! the derivative of that node on that domain". Obligations are data; the
//! [`checker`](crate::checker) decides them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{substitute, substitute_all, DomainPred, Expr};
use crate::parser::print;
use crate::registry::{ElemDerivRecord, Registry, HELD_FORMAL, VARYING_FORMAL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObligationKind {
    Number,
    Standard,
    Continuous,
    PrimeNumber,
    PrimeStandard,
    PrimeContinuous,
    Close,
    InverseInRange,
    DomainIsNumber,
    InverseRelation,
    #[serde(rename = "d/dx-relation")]
    DerivRelation,
    PrimeNotZero,
    PreservesNotClose,
}

impl ObligationKind {
    pub const DERIVATIVE: [ObligationKind; 7] = [
        ObligationKind::Number,
        ObligationKind::Standard,
        ObligationKind::Continuous,
        ObligationKind::PrimeNumber,
        ObligationKind::PrimeStandard,
        ObligationKind::PrimeContinuous,
        ObligationKind::Close,
    ];

    pub const INVERSE: [ObligationKind; 6] = [
        ObligationKind::InverseInRange,
        ObligationKind::DomainIsNumber,
        ObligationKind::InverseRelation,
        ObligationKind::DerivRelation,
        ObligationKind::PrimeNotZero,
        ObligationKind::PreservesNotClose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObligationKind::Number => "number",
            ObligationKind::Standard => "standard",
            ObligationKind::Continuous => "continuous",
            ObligationKind::PrimeNumber => "prime-number",
            ObligationKind::PrimeStandard => "prime-standard",
            ObligationKind::PrimeContinuous => "prime-continuous",
            ObligationKind::Close => "close",
            ObligationKind::InverseInRange => "inverse-in-range",
            ObligationKind::DomainIsNumber => "domain-is-number",
            ObligationKind::InverseRelation => "inverse-relation",
            ObligationKind::DerivRelation => "d/dx-relation",
            ObligationKind::PrimeNotZero => "prime-not-zero",
            ObligationKind::PreservesNotClose => "preserves-not-close",
        }
    }

    pub fn is_inverse(self) -> bool {
        ObligationKind::INVERSE.contains(&self)
    }
}

impl fmt::Display for ObligationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The extra slots of an inverse-function obligation.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSlots {
    pub inverse: Expr,
    pub inverse_prime: Expr,
    pub inverse_domain: DomainPred,
}

/// One instance of a derivative or inverse-function property.
///
/// For derivative obligations `subject` is the function `f`, `subject_prime`
/// its claimed derivative and `subject_domain` where both are claimed to
/// hold. For inverse obligations `subject` is the forward function and the
/// inverse lives in [`InverseSlots`]. All expressions are functions of `var`.
#[derive(Debug, Clone, PartialEq)]
pub struct Obligation {
    pub kind: ObligationKind,
    pub var: String,
    pub subject: Expr,
    pub subject_prime: Option<Expr>,
    pub subject_domain: DomainPred,
    pub inverse: Option<InverseSlots>,
}

impl Obligation {
    /// Short human-readable description: the kind and the subject.
    pub fn label(&self) -> String {
        match &self.inverse {
            Some(slots) => format!(
                "{} {} of {}",
                self.kind,
                print(&slots.inverse, true),
                print(&self.subject, true)
            ),
            None => format!("{} {}", self.kind, print(&self.subject, true)),
        }
    }
}

/// The seven derivative obligations for `prime` being the derivative of
/// `subject` on `domain`, in the order number, standard, continuous,
/// prime-number, prime-standard, prime-continuous, close.
pub fn derivative_hyps(var: &str, subject: &Expr, prime: &Expr, domain: &DomainPred) -> Vec<Obligation> {
    ObligationKind::DERIVATIVE
        .into_iter()
        .map(|kind| Obligation {
            kind,
            var: var.to_string(),
            subject: subject.clone(),
            subject_prime: Some(prime.clone()),
            subject_domain: domain.clone(),
            inverse: None,
        })
        .collect()
}

/// The six obligations stating that `inverse` is the compositional inverse
/// of `function` (with derivative `function_prime`) between `domain` and
/// `inverse_domain`. The inverse's derivative is taken to be
/// `1 / function_prime(inverse(var))`.
pub fn inverse_hyps(
    var: &str,
    inverse: &Expr,
    function: &Expr,
    function_prime: &Expr,
    domain: &DomainPred,
    inverse_domain: &DomainPred,
) -> Vec<Obligation> {
    let inverse_prime = Expr::recip(substitute(function_prime, var, inverse));
    ObligationKind::INVERSE
        .into_iter()
        .map(|kind| Obligation {
            kind,
            var: var.to_string(),
            subject: function.clone(),
            subject_prime: Some(function_prime.clone()),
            subject_domain: domain.clone(),
            inverse: Some(InverseSlots {
                inverse: inverse.clone(),
                inverse_prime: inverse_prime.clone(),
                inverse_domain: inverse_domain.clone(),
            }),
        })
        .collect()
}

/// Which rule handled a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Constant,
    Variable,
    /// A variable other than the one being differentiated.
    Parameter,
    Sum,
    Product,
    Negation,
    Reciprocal,
    Elementary,
    /// A binary function with one argument held fixed.
    HeldElementary,
    Inline,
    Inverse,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Constant => "constant",
            Rule::Variable => "variable",
            Rule::Parameter => "parameter",
            Rule::Sum => "sum",
            Rule::Product => "product",
            Rule::Negation => "negation",
            Rule::Reciprocal => "reciprocal",
            Rule::Elementary => "elementary",
            Rule::HeldElementary => "held-elementary",
            Rule::Inline => "inline",
            Rule::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffResult {
    pub derivative: Expr,
    pub domain: DomainPred,
    pub obligations: Vec<Obligation>,
    /// Every node visited, in post-order, with the rule applied to it.
    /// Bodies of inlined definitions appear before the application node.
    pub trace: Vec<(Expr, Rule)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("argument {arg} of `{name}` is held fixed but depends on the variable")]
    VaryingHeldArgument { name: String, arg: usize },
    #[error("`{name}` cannot be applied to {found} argument(s)")]
    UnsupportedArity { name: String, found: usize },
    #[error("no derivative of `{name}` with respect to argument {arg} is registered")]
    NoDerivative { name: String, arg: usize },
}

/// Differentiates `e` with respect to `var`. Other variables are held
/// parameters.
pub fn differentiate(e: &Expr, var: &str, reg: &Registry) -> Result<DiffResult, DiffError> {
    let mut cx = Differ {
        var,
        reg,
        obligations: Vec::new(),
        trace: Vec::new(),
    };
    let (derivative, domain) = cx.diff(e)?;
    let mut obligations = derivative_hyps(var, e, &derivative, &domain);
    obligations.append(&mut cx.obligations);
    Ok(DiffResult {
        derivative,
        domain,
        obligations,
        trace: cx.trace,
    })
}

struct Differ<'a> {
    var: &'a str,
    reg: &'a Registry,
    obligations: Vec<Obligation>,
    trace: Vec<(Expr, Rule)>,
}

impl<'a> Differ<'a> {
    fn diff(&mut self, e: &Expr) -> Result<(Expr, DomainPred), DiffError> {
        let (d, dom, rule) = match e {
            Expr::Const(_) => (Expr::int(0), DomainPred::True, Rule::Constant),
            Expr::Var(v) if v == self.var => (Expr::int(1), DomainPred::True, Rule::Variable),
            Expr::Var(_) => (Expr::int(0), DomainPred::True, Rule::Parameter),
            Expr::Add(u, v) => {
                let (du, pu) = self.diff(u)?;
                let (dv, pv) = self.diff(v)?;
                (Expr::add(du, dv), DomainPred::and(pu, pv), Rule::Sum)
            }
            Expr::Mul(u, v) => {
                let (du, pu) = self.diff(u)?;
                let (dv, pv) = self.diff(v)?;
                let d = Expr::add(Expr::mul((**u).clone(), dv), Expr::mul(du, (**v).clone()));
                (d, DomainPred::and(pu, pv), Rule::Product)
            }
            Expr::Neg(u) => {
                let rec = self.operator_record("unary--")?;
                let (du, pu) = self.diff(u)?;
                let d = Expr::mul(substitute(&rec.deriv_template, VARYING_FORMAL, u), du);
                (d, pu, Rule::Negation)
            }
            Expr::Recip(u) => {
                let rec = self.operator_record("unary-/")?;
                let (du, pu) = self.diff(u)?;
                let d = Expr::mul(substitute(&rec.deriv_template, VARYING_FORMAL, u), du);
                let dom = DomainPred::and(pu, rec.domain_template.substitute(VARYING_FORMAL, u));
                self.emit(e, &d, &dom);
                (d, dom, Rule::Reciprocal)
            }
            Expr::Apply(f, args) => {
                let (d, dom, rule) = match args.as_slice() {
                    [u] => self.apply_unary(f, u)?,
                    [a0, a1] => self.apply_binary(f, a0, a1)?,
                    _ => {
                        return Err(DiffError::UnsupportedArity {
                            name: f.clone(),
                            found: args.len(),
                        })
                    }
                };
                self.emit(e, &d, &dom);
                if rule == Rule::Inverse {
                    self.emit_inverse(f)?;
                }
                (d, dom, rule)
            }
        };
        self.trace.push((e.clone(), rule));
        Ok((d, dom))
    }

    fn operator_record(&self, name: &str) -> Result<&'a ElemDerivRecord, DiffError> {
        self.reg
            .elem(name, 0)
            .ok_or_else(|| DiffError::UnknownFunction(name.to_string()))
    }

    fn emit(&mut self, node: &Expr, d: &Expr, dom: &DomainPred) {
        self.obligations
            .extend(derivative_hyps(self.var, node, d, dom));
    }

    fn unknown(&self, f: &str, found: usize) -> DiffError {
        if self.reg.function(f).is_some() {
            DiffError::UnsupportedArity {
                name: f.to_string(),
                found,
            }
        } else {
            DiffError::UnknownFunction(f.to_string())
        }
    }

    fn apply_unary(&mut self, f: &str, u: &Expr) -> Result<(Expr, DomainPred, Rule), DiffError> {
        if let Some(rec) = self.reg.elem(f, 0).filter(|r| r.arity == 1) {
            let (du, pu) = self.diff(u)?;
            let d = Expr::mul(substitute(&rec.deriv_template, VARYING_FORMAL, u), du);
            let dom = DomainPred::and(pu, rec.domain_template.substitute(VARYING_FORMAL, u));
            return Ok((d, dom, Rule::Elementary));
        }
        if let Some(inv) = self.reg.inverse(f) {
            let inv_domain = inv.inv_domain_pred.clone();
            let fn_prime = self.forward_prime(&inv.fn_name)?;
            let (du, pu) = self.diff(u)?;
            let at_inverse = Expr::apply1(f, u.clone());
            let d = Expr::mul(
                Expr::recip(substitute(&fn_prime, VARYING_FORMAL, &at_inverse)),
                du,
            );
            let dom = DomainPred::and(pu, inv_domain.substitute(VARYING_FORMAL, u));
            return Ok((d, dom, Rule::Inverse));
        }
        match self.reg.definition(f) {
            Some(def) if def.arity() == 1 => {
                let def = def.clone();
                let inner = differentiate(&def.body, &def.formal, self.reg)?;
                let (du, pu) = self.diff(u)?;
                let bindings = [(def.formal.as_str(), u)];
                let d = Expr::mul(substitute_all(&inner.derivative, &bindings), du);
                let dom = DomainPred::and(pu, inner.domain.substitute_all(&bindings));
                self.absorb(inner);
                Ok((d, dom, Rule::Inline))
            }
            _ => Err(self.unknown(f, 1)),
        }
    }

    fn apply_binary(
        &mut self,
        f: &str,
        a0: &Expr,
        a1: &Expr,
    ) -> Result<(Expr, DomainPred, Rule), DiffError> {
        let varies = [a0.contains_var(self.var), a1.contains_var(self.var)];
        let args = [a0, a1];
        if varies == [true, true] {
            return Err(DiffError::VaryingHeldArgument {
                name: f.to_string(),
                arg: if self.reg.elem(f, 0).is_some() { 1 } else { 0 },
            });
        }
        let varying = match varies {
            [false, true] => 1,
            [true, false] => 0,
            _ => usize::from(self.reg.elem(f, 0).is_none() && self.reg.elem(f, 1).is_some()),
        };
        if let Some(rec) = self.reg.elem(f, varying).filter(|r| r.arity == 2) {
            let held_ix = rec.held_arg().expect("binary record has a held argument");
            let (u, held) = (args[varying], args[held_ix]);
            let (du, pu) = self.diff(u)?;
            let held_domain = self.domain_of(held)?;
            let bindings = [(VARYING_FORMAL, u), (HELD_FORMAL, held)];
            let d = Expr::mul(substitute_all(&rec.deriv_template, &bindings), du);
            let dom = DomainPred::and(
                DomainPred::and(pu, held_domain),
                rec.domain_template.substitute_all(&bindings),
            );
            return Ok((d, dom, Rule::HeldElementary));
        }
        match self.reg.definition(f) {
            Some(def) if def.arity() == 2 => {
                if varies[1] {
                    return Err(DiffError::VaryingHeldArgument {
                        name: f.to_string(),
                        arg: 1,
                    });
                }
                let def = def.clone();
                let held_formal = def.held_formal.as_deref().expect("binary definition");
                let inner = differentiate(&def.body, &def.formal, self.reg)?;
                let (du, pu) = self.diff(a0)?;
                let held_domain = self.domain_of(a1)?;
                let bindings = [(def.formal.as_str(), a0), (held_formal, a1)];
                let d = Expr::mul(substitute_all(&inner.derivative, &bindings), du);
                let dom = DomainPred::and(
                    DomainPred::and(pu, held_domain),
                    inner.domain.substitute_all(&bindings),
                );
                self.absorb(inner);
                Ok((d, dom, Rule::Inline))
            }
            _ if self.reg.elem(f, 1 - varying).is_some() => Err(DiffError::NoDerivative {
                name: f.to_string(),
                arg: varying,
            }),
            _ => Err(self.unknown(f, 2)),
        }
    }

    /// Domain of a held argument. Its derivative and obligations are not
    /// needed: it does not depend on the variable.
    fn domain_of(&self, held: &Expr) -> Result<DomainPred, DiffError> {
        let mut scratch = Differ {
            var: self.var,
            reg: self.reg,
            obligations: Vec::new(),
            trace: Vec::new(),
        };
        Ok(scratch.diff(held)?.1)
    }

    fn absorb(&mut self, inner: DiffResult) {
        self.obligations.extend(inner.obligations);
        self.trace.extend(inner.trace);
    }

    /// Derivative of the forward function of an inverse, over the formal `x`.
    fn forward_prime(&self, fn_name: &str) -> Result<Expr, DiffError> {
        if let Some(rec) = self.reg.elem(fn_name, 0).filter(|r| r.arity == 1) {
            return Ok(rec.deriv_template.clone());
        }
        match self.reg.definition(fn_name) {
            Some(def) if def.arity() == 1 => {
                let inner = differentiate(&def.body, &def.formal, self.reg)?;
                Ok(substitute(&inner.derivative, &def.formal, &Expr::var(VARYING_FORMAL)))
            }
            _ => Err(DiffError::UnknownFunction(fn_name.to_string())),
        }
    }

    fn emit_inverse(&mut self, inv_name: &str) -> Result<(), DiffError> {
        let inv = self
            .reg
            .inverse(inv_name)
            .expect("inverse rule only fires for registered inverses");
        let x = Expr::var(VARYING_FORMAL);
        let fn_prime = self.forward_prime(&inv.fn_name)?;
        self.obligations.extend(inverse_hyps(
            VARYING_FORMAL,
            &Expr::apply1(inv_name, x.clone()),
            &Expr::apply1(inv.fn_name.clone(), x),
            &fn_prime,
            &inv.domain_pred,
            &inv.inv_domain_pred,
        ));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, print, print_pred};

    fn diff(text: &str) -> DiffResult {
        differentiate(&parse_expr(text).unwrap(), "x", &Registry::builtins()).unwrap()
    }

    #[test]
    fn product_rule_operand_order() {
        let r = diff("(* x x)");
        assert_eq!(print(&r.derivative, true), "(+ (* x 1) (* 1 x))");
        assert_eq!(print_pred(&r.domain), "(and t t)");
        assert_eq!(r.obligations.len(), 7);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let r = diff("7");
        assert_eq!(r.derivative, Expr::int(0));
        assert_eq!(r.domain, DomainPred::True);
        assert_eq!(r.obligations.len(), 7);
        assert_eq!(r.trace, vec![(Expr::int(7), Rule::Constant)]);
    }

    #[test]
    fn held_parameter_is_constant() {
        let r = diff("(* a x)");
        assert_eq!(print(&r.derivative, true), "(+ (* a 1) (* 0 x))");
    }

    #[test]
    fn reciprocal_uses_registered_template() {
        let r = diff("(/ x)");
        assert_eq!(print(&r.derivative, true), "(* (- (/ (* x x))) 1)");
        assert_eq!(print_pred(&r.domain), "(and t (nonzero x))");
        assert_eq!(r.obligations.len(), 14);
    }

    #[test]
    fn negation_domain_is_the_operand_domain() {
        let r = diff("(- (/ x))");
        assert_eq!(print(&r.derivative, true), "(* (- 1) (* (- (/ (* x x))) 1))");
        assert_eq!(print_pred(&r.domain), "(and t (nonzero x))");
    }

    #[test]
    fn chain_rule_shape() {
        let r = diff("(sin (exp (* x x)))");
        assert_eq!(
            print(&r.derivative, true),
            "(* (cos (exp (* x x))) (* (exp (* x x)) (+ (* x 1) (* 1 x))))"
        );
        assert_eq!(r.obligations.len(), 7 * 3);
    }

    #[test]
    fn inverse_rule_for_ln() {
        let r = diff("(ln x)");
        assert_eq!(
            r.derivative,
            Expr::mul(
                Expr::recip(Expr::apply1("exp", Expr::apply1("ln", Expr::var("x")))),
                Expr::int(1)
            )
        );
        assert_eq!(print_pred(&r.domain), "(and t (realp x) (in-open x 0 +inf))");
        assert_eq!(r.obligations.len(), 7 + 7 + 6);
        let inverse: Vec<_> = r.obligations.iter().filter(|o| o.kind.is_inverse()).collect();
        assert_eq!(inverse.len(), 6);
        assert_eq!(inverse[0].subject, Expr::apply1("exp", Expr::var("x")));
    }

    #[test]
    fn held_exponent_and_held_base() {
        let r = diff("(raise x 3)");
        assert_eq!(print(&r.derivative, true), "(* 3 (raise x (+ 3 -1)) 1)");
        assert_eq!(print_pred(&r.domain), "(and t t (nonzero x))");
        let r = diff("(raise 2 x)");
        assert_eq!(print(&r.derivative, true), "(* (raise 2 x) (ln 2) 1)");
        assert_eq!(print_pred(&r.domain), "(and t t (in-open 2 0 +inf))");
    }

    #[test]
    fn varying_held_argument_is_rejected() {
        let err = differentiate(&parse_expr("(raise x x)").unwrap(), "x", &Registry::builtins())
            .unwrap_err();
        assert!(matches!(err, DiffError::VaryingHeldArgument { .. }));
    }

    #[test]
    fn unknown_function_and_arity() {
        let reg = Registry::builtins();
        let err = differentiate(&parse_expr("(f x)").unwrap(), "x", &reg).unwrap_err();
        assert_eq!(err, DiffError::UnknownFunction("f".into()));
        let err = differentiate(&parse_expr("(exp x 2)").unwrap(), "x", &reg).unwrap_err();
        assert!(matches!(err, DiffError::UnsupportedArity { .. }));
        let err = differentiate(&parse_expr("(raise x)").unwrap(), "x", &reg).unwrap_err();
        assert!(matches!(err, DiffError::UnsupportedArity { .. }));
    }

    #[test]
    fn negation_needs_a_registered_fact() {
        let err = differentiate(&parse_expr("(- x)").unwrap(), "x", &Registry::new()).unwrap_err();
        assert_eq!(err, DiffError::UnknownFunction("unary--".into()));
    }

    #[test]
    fn defined_function_is_inlined() {
        let reg = Registry::builtins()
            .load_registry_file("(defun square (x) (* x x))")
            .unwrap();
        let r = differentiate(&parse_expr("(square (sin x))").unwrap(), "x", &reg).unwrap();
        assert_eq!(
            print(&r.derivative, true),
            "(* (+ (* (sin x) 1) (* 1 (sin x))) (* (cos x) 1))"
        );
        // Top level, the body's top level, sin, and the square node.
        assert_eq!(r.obligations.len(), 7 * 4);
    }

    #[test]
    fn elementary_record_takes_precedence_over_definition() {
        let reg = Registry::builtins()
            .load_registry_file(
                "(defun square (x) (* x x))
                 (def-elem-derivative square t (* 2 x))",
            )
            .unwrap();
        let r = differentiate(&parse_expr("(square x)").unwrap(), "x", &reg).unwrap();
        assert_eq!(print(&r.derivative, true), "(* 2 x 1)");
    }

    #[test]
    fn inverse_of_a_defined_function() {
        let reg = Registry::builtins()
            .load_registry_file(
                "(defun cube (x) (* x x x))
                 (def-elem-inverse cube-root cube t (realp x))",
            )
            .unwrap();
        let r = differentiate(&parse_expr("(cube-root x)").unwrap(), "x", &reg).unwrap();
        assert_eq!(
            print(&r.derivative, true),
            "(* (/ (+ (* (cube-root x) (cube-root x) 1) (* (+ (* (cube-root x) 1) (* 1 (cube-root x))) (cube-root x)))) 1)"
        );
    }

    #[test]
    fn binary_definition_with_held_formal() {
        let reg = Registry::builtins()
            .load_registry_file("(defun scale (x k) (* k x))")
            .unwrap();
        let r = differentiate(&parse_expr("(scale (sin x) 3)").unwrap(), "x", &reg).unwrap();
        assert_eq!(print(&r.derivative, true), "(* (+ (* 3 1) (* 0 (sin x))) (* (cos x) 1))");
        let err = differentiate(&parse_expr("(scale 3 x)").unwrap(), "x", &reg).unwrap_err();
        assert!(matches!(err, DiffError::VaryingHeldArgument { arg: 1, .. }));
    }

    #[test]
    fn trace_is_post_order() {
        let r = diff("(+ x 1)");
        let rules: Vec<_> = r.trace.iter().map(|(_, rule)| *rule).collect();
        assert_eq!(rules, vec![Rule::Variable, Rule::Constant, Rule::Sum]);
    }

    #[test]
    fn derivative_hyps_order() {
        let obs = derivative_hyps("x", &Expr::int(0), &Expr::int(0), &DomainPred::True);
        let names: Vec<_> = obs.iter().map(|o| o.kind.name()).collect();
        assert_eq!(
            names,
            [
                "number",
                "standard",
                "continuous",
                "prime-number",
                "prime-standard",
                "prime-continuous",
                "close"
            ]
        );
    }

    #[test]
    fn inverse_hyps_shape() {
        let x = Expr::var("x");
        let obs = inverse_hyps(
            "x",
            &Expr::apply1("ln", x.clone()),
            &Expr::apply1("exp", x.clone()),
            &Expr::apply1("exp", x.clone()),
            &DomainPred::True,
            &DomainPred::IsReal(x),
        );
        assert_eq!(obs.len(), 6);
        let slots = obs[3].inverse.as_ref().unwrap();
        assert_eq!(print(&slots.inverse_prime, true), "(/ (exp (ln x)))");
        assert_eq!(obs[3].kind.name(), "d/dx-relation");
    }
}
