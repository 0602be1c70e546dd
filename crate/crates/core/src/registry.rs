//! The table of known derivatives, inverse functions, function definitions
//! and named domain predicates.
//!
//! A [`Registry`] is a value: every registration returns a new registry and
//! leaves the original untouched. Records keep their insertion order so that
//! listings are reproducible.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use indexmap::IndexMap;
use thiserror::Error;

use crate::eval::Builtin;
use crate::expr::{DomainPred, Expr};
use crate::parser::{self, ParseError, SourceForm};

/// Formal parameter of every derivative and domain template.
pub const VARYING_FORMAL: &str = "x";
/// Formal parameter standing for the held argument of a binary function.
pub const HELD_FORMAL: &str = "a";

const BUILTINS: &str = include_str!("builtins.lisp");

static BUILTIN_REGISTRY: LazyLock<Registry> = LazyLock::new(|| {
    Registry::new()
        .load_registry_file(BUILTINS)
        .expect("built-in registry file is well formed")
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluator {
    Builtin(Builtin),
    /// Evaluated by inlining the function's definition.
    Inline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElemDerivRecord {
    pub fn_name: String,
    pub arity: usize,
    pub varying_arg: usize,
    pub domain_template: DomainPred,
    pub deriv_template: Expr,
    pub evaluator: Evaluator,
}

impl ElemDerivRecord {
    pub fn held_arg(&self) -> Option<usize> {
        (self.arity == 2).then_some(1 - self.varying_arg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseRecord {
    pub inv_name: String,
    pub fn_name: String,
    /// Domain of the forward function.
    pub domain_pred: DomainPred,
    /// Domain of the inverse, i.e. the range of the forward function.
    pub inv_domain_pred: DomainPred,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnDef {
    pub name: String,
    pub formal: String,
    pub held_formal: Option<String>,
    pub body: Expr,
}

impl FnDef {
    pub fn arity(&self) -> usize {
        1 + usize::from(self.held_formal.is_some())
    }

    /// Formals in argument order: the varying formal first, then the held one.
    pub fn formals(&self) -> impl Iterator<Item = String> + '_ {
        std::iter::once(self.formal.clone()).chain(self.held_formal.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredDef {
    pub name: String,
    pub formal: String,
    pub body: DomainPred,
}

/// How an applied function is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum FunctionImpl<'a> {
    Builtin(Builtin),
    Inline(&'a FnDef),
}

impl FunctionImpl<'_> {
    pub fn arity(&self) -> usize {
        match self {
            FunctionImpl::Builtin(b) => b.arity(),
            FunctionImpl::Inline(def) => def.arity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RecordRef {
    Elem(String, usize),
    Inverse(String),
    Def(String),
    Pred(String),
}

/// One registry entry, as returned by [`Registry::records`].
#[derive(Debug, Clone, Copy)]
pub enum Record<'a> {
    ElemDeriv(&'a ElemDerivRecord),
    Inverse(&'a InverseRecord),
    Def(&'a FnDef),
    Pred(&'a PredDef),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("`{name}` is already registered as {kind}")]
    DuplicateRegistration { kind: &'static str, name: String },
    #[error("malformed template for `{name}`: {detail}")]
    MalformedTemplate { name: String, detail: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("recursion detected: {}", cycle.join(" -> "))]
    RecursionDetected { cycle: Vec<String> },
    #[error("unsupported arity {arity} (varying argument {varying_arg}) for `{name}`")]
    UnsupportedArity {
        name: String,
        arity: usize,
        varying_arg: usize,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unrecognised registry form: {0}")]
    UnknownForm(String),
    #[error("form {index}: {source}")]
    AtForm {
        index: usize,
        source: Box<RegistryError>,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    elem: IndexMap<(String, usize), ElemDerivRecord>,
    inverses: IndexMap<String, InverseRecord>,
    defs: IndexMap<String, FnDef>,
    preds: IndexMap<String, PredDef>,
    order: Vec<RecordRef>,
}

impl Registry {
    /// An empty registry; not even negation and reciprocal are known.
    pub fn new() -> Self {
        Registry::default()
    }

    /// The seeded registry of elementary functions.
    pub fn builtins() -> Self {
        BUILTIN_REGISTRY.clone()
    }

    pub fn elem(&self, name: &str, varying_arg: usize) -> Option<&ElemDerivRecord> {
        self.elem.get(&(name.to_string(), varying_arg))
    }

    pub fn inverse(&self, inv_name: &str) -> Option<&InverseRecord> {
        self.inverses.get(inv_name)
    }

    pub fn definition(&self, name: &str) -> Option<&FnDef> {
        self.defs.get(name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredDef> {
        self.preds.get(name)
    }

    fn has_elem(&self, name: &str) -> bool {
        self.elem.keys().any(|(n, _)| n == name)
    }

    /// Evaluator for an applied function, if the registry knows it. A
    /// definition takes precedence over a built-in implementation.
    pub fn function(&self, name: &str) -> Option<FunctionImpl<'_>> {
        if let Some(def) = self.defs.get(name) {
            return Some(FunctionImpl::Inline(def));
        }
        Builtin::from_name(name)
            .filter(|b| !b.is_operator())
            .filter(|_| self.has_elem(name) || self.inverses.contains_key(name))
            .map(FunctionImpl::Builtin)
    }

    pub fn records(&self) -> impl Iterator<Item = Record<'_>> {
        self.order.iter().map(move |r| match r {
            RecordRef::Elem(name, i) => Record::ElemDeriv(&self.elem[&(name.clone(), *i)]),
            RecordRef::Inverse(name) => Record::Inverse(&self.inverses[name]),
            RecordRef::Def(name) => Record::Def(&self.defs[name]),
            RecordRef::Pred(name) => Record::Pred(&self.preds[name]),
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn check_template_functions(&self, owner: &str, e: &Expr) -> Result<(), RegistryError> {
        for f in e.applied_functions() {
            if f != owner && self.function(&f).is_none() && !self.pending_builtin(owner, &f) {
                return Err(RegistryError::UnknownFunction(f));
            }
        }
        Ok(())
    }

    /// Derivative templates of built-in functions may mention built-ins that
    /// are registered later (sin and cos refer to each other).
    fn pending_builtin(&self, owner: &str, f: &str) -> bool {
        let builtin = |name: &str| Builtin::from_name(name).is_some_and(|b| !b.is_operator());
        builtin(owner) && !self.defs.contains_key(owner) && builtin(f)
    }

    fn check_pred(&self, owner: &str, p: &DomainPred, formals: &[&str]) -> Result<(), RegistryError> {
        for name in p.named_predicates() {
            if self.predicate(&name).is_none() {
                return Err(RegistryError::UnknownPredicate(name));
            }
        }
        check_free_vars(owner, &p.free_vars(), formals)?;
        let mut result = Ok(());
        p.for_each_expr(&mut |e| {
            if result.is_ok() {
                result = self.check_template_functions(owner, e);
            }
        });
        result
    }

    pub fn register_elem_derivative(
        &self,
        fn_name: &str,
        domain_template: DomainPred,
        deriv_template: Expr,
        arity: usize,
        varying_arg: usize,
    ) -> Result<Registry, RegistryError> {
        if !(1..=2).contains(&arity) || varying_arg >= arity {
            return Err(RegistryError::UnsupportedArity {
                name: fn_name.to_string(),
                arity,
                varying_arg,
            });
        }
        if self.elem(fn_name, varying_arg).is_some() {
            return Err(RegistryError::DuplicateRegistration {
                kind: "an elementary derivative",
                name: fn_name.to_string(),
            });
        }
        let (evaluator, expected_arity) = match (self.defs.get(fn_name), Builtin::from_name(fn_name)) {
            (Some(def), _) => (Evaluator::Inline, def.arity()),
            (None, Some(b)) => (Evaluator::Builtin(b), b.arity()),
            (None, None) => return Err(RegistryError::UnknownFunction(fn_name.to_string())),
        };
        if expected_arity != arity {
            return Err(RegistryError::UnsupportedArity {
                name: fn_name.to_string(),
                arity,
                varying_arg,
            });
        }
        let formals: &[&str] = if arity == 2 {
            &[VARYING_FORMAL, HELD_FORMAL]
        } else {
            &[VARYING_FORMAL]
        };
        check_free_vars(fn_name, &crate::expr::free_vars(&deriv_template), formals)?;
        self.check_template_functions(fn_name, &deriv_template)?;
        self.check_pred(fn_name, &domain_template, formals)?;

        let mut next = self.clone();
        next.elem.insert(
            (fn_name.to_string(), varying_arg),
            ElemDerivRecord {
                fn_name: fn_name.to_string(),
                arity,
                varying_arg,
                domain_template,
                deriv_template,
                evaluator,
            },
        );
        next.order.push(RecordRef::Elem(fn_name.to_string(), varying_arg));
        Ok(next)
    }

    pub fn register_elem_inverse(
        &self,
        inv_name: &str,
        fn_name: &str,
        domain_pred: DomainPred,
        inv_domain_pred: DomainPred,
    ) -> Result<Registry, RegistryError> {
        let resolvable = self.elem(fn_name, 0).is_some_and(|r| r.arity == 1)
            || self.defs.get(fn_name).is_some_and(|d| d.arity() == 1);
        if !resolvable {
            return Err(RegistryError::UnknownFunction(fn_name.to_string()));
        }
        if self.inverses.contains_key(inv_name) {
            return Err(RegistryError::DuplicateRegistration {
                kind: "an inverse",
                name: inv_name.to_string(),
            });
        }
        self.check_pred(inv_name, &domain_pred, &[VARYING_FORMAL])?;
        self.check_pred(inv_name, &inv_domain_pred, &[VARYING_FORMAL])?;

        let mut next = self.clone();
        next.inverses.insert(
            inv_name.to_string(),
            InverseRecord {
                inv_name: inv_name.to_string(),
                fn_name: fn_name.to_string(),
                domain_pred,
                inv_domain_pred,
            },
        );
        next.order.push(RecordRef::Inverse(inv_name.to_string()));
        Ok(next)
    }

    /// Defines `name(formal[, held]) = body`. Recursion, direct or through
    /// other definitions, is rejected.
    pub fn define_function(
        &self,
        name: &str,
        formal: &str,
        held_formal: Option<&str>,
        body: Expr,
    ) -> Result<Registry, RegistryError> {
        if let Some(cycle) = self.find_cycle(name, &body) {
            return Err(RegistryError::RecursionDetected { cycle });
        }
        if self.defs.contains_key(name) || Builtin::from_name(name).is_some() {
            return Err(RegistryError::DuplicateRegistration {
                kind: "a function",
                name: name.to_string(),
            });
        }
        let mut formals = vec![formal];
        formals.extend(held_formal);
        if held_formal == Some(formal) {
            return Err(RegistryError::MalformedTemplate {
                name: name.to_string(),
                detail: "formals must be distinct".into(),
            });
        }
        check_free_vars(name, &crate::expr::free_vars(&body), &formals)?;
        self.check_template_functions(name, &body)?;

        let mut next = self.clone();
        next.defs.insert(
            name.to_string(),
            FnDef {
                name: name.to_string(),
                formal: formal.to_string(),
                held_formal: held_formal.map(str::to_string),
                body,
            },
        );
        next.order.push(RecordRef::Def(name.to_string()));
        Ok(next)
    }

    /// Depth-first search for a path from `name` back to itself, with the
    /// definition of `name` taken to be `body`.
    fn find_cycle(&self, name: &str, body: &Expr) -> Option<Vec<String>> {
        fn visit(
            reg: &Registry,
            root: &str,
            callees: BTreeSet<String>,
            path: &mut Vec<String>,
            seen: &mut BTreeSet<String>,
        ) -> bool {
            for callee in callees {
                if callee == root {
                    path.push(callee);
                    return true;
                }
                if !seen.insert(callee.clone()) {
                    continue;
                }
                if let Some(def) = reg.defs.get(&callee) {
                    path.push(callee.clone());
                    if visit(reg, root, def.body.applied_functions(), path, seen) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        let mut path = vec![name.to_string()];
        let mut seen = BTreeSet::new();
        visit(self, name, body.applied_functions(), &mut path, &mut seen).then_some(path)
    }

    pub fn define_pred(
        &self,
        name: &str,
        formal: &str,
        body: DomainPred,
    ) -> Result<Registry, RegistryError> {
        if self.preds.contains_key(name) {
            return Err(RegistryError::DuplicateRegistration {
                kind: "a predicate",
                name: name.to_string(),
            });
        }
        self.check_pred(name, &body, &[formal])?;
        let mut next = self.clone();
        next.preds.insert(
            name.to_string(),
            PredDef {
                name: name.to_string(),
                formal: formal.to_string(),
                body,
            },
        );
        next.order.push(RecordRef::Pred(name.to_string()));
        Ok(next)
    }

    /// Applies every form of a registry file in order.
    pub fn load_registry_file(&self, text: &str) -> Result<Registry, RegistryError> {
        let forms = parser::parse(text)?;
        let mut reg = self.clone();
        for (index, form) in forms.iter().enumerate() {
            reg = reg.apply_form(form).map_err(|e| RegistryError::AtForm {
                index,
                source: Box::new(e),
            })?;
        }
        Ok(reg)
    }

    fn apply_form(&self, form: &SourceForm) -> Result<Registry, RegistryError> {
        let SourceForm::List(items) = form else {
            return Err(RegistryError::UnknownForm("expected a list".into()));
        };
        let head = items.first().and_then(SourceForm::as_symbol).unwrap_or("");
        let symbol = |f: &SourceForm| -> Result<String, RegistryError> {
            f.as_symbol()
                .map(str::to_string)
                .ok_or_else(|| RegistryError::UnknownForm(format!("{head}: expected a name")))
        };
        let pred = |f: &SourceForm| parser::normalize_pred(f).map_err(RegistryError::from);
        let expr = |f: &SourceForm| parser::normalize(f).map_err(RegistryError::from);
        match (head, &items[1..]) {
            // The prefix argument of the four-argument form names proof
            // lemmas and has no counterpart here.
            ("def-elem-derivative", [name, domain, deriv])
            | ("def-elem-derivative", [name, _, domain, deriv]) => {
                self.register_elem_derivative(&symbol(name)?, pred(domain)?, expr(deriv)?, 1, 0)
            }
            ("def-elem-derivative2", [name, SourceForm::Number(k), domain, deriv]) => {
                let varying = match k {
                    k if k.is_zero() => 0,
                    k if k.is_one() => 1,
                    _ => {
                        return Err(RegistryError::UnsupportedArity {
                            name: symbol(name)?,
                            arity: 2,
                            varying_arg: usize::MAX,
                        })
                    }
                };
                self.register_elem_derivative(&symbol(name)?, pred(domain)?, expr(deriv)?, 2, varying)
            }
            ("def-elem-inverse", [inv, f, domain, inv_domain])
            | ("def-elem-inverse", [inv, _, domain, inv_domain, f]) => self
                .register_elem_inverse(&symbol(inv)?, &symbol(f)?, pred(domain)?, pred(inv_domain)?),
            ("defun", [name, SourceForm::List(formals), body]) => {
                let formals = formals.iter().map(symbol).collect::<Result<Vec<_>, _>>()?;
                match formals.as_slice() {
                    [x] => self.define_function(&symbol(name)?, x, None, expr(body)?),
                    [x, a] => self.define_function(&symbol(name)?, x, Some(a), expr(body)?),
                    _ => Err(RegistryError::UnsupportedArity {
                        name: symbol(name)?,
                        arity: formals.len(),
                        varying_arg: 0,
                    }),
                }
            }
            ("defpred", [name, SourceForm::List(formals), body]) => match formals.as_slice() {
                [x] => self.define_pred(&symbol(name)?, &symbol(x)?, pred(body)?),
                _ => Err(RegistryError::UnknownForm(
                    "defpred takes exactly one formal".into(),
                )),
            },
            _ => Err(RegistryError::UnknownForm(format!(
                "`{head}` with {} argument(s)",
                items.len().saturating_sub(1)
            ))),
        }
    }
}

fn check_free_vars(
    owner: &str,
    vars: &BTreeSet<String>,
    formals: &[&str],
) -> Result<(), RegistryError> {
    match vars.iter().find(|v| !formals.contains(&v.as_str())) {
        Some(v) => Err(RegistryError::MalformedTemplate {
            name: owner.to_string(),
            detail: format!("free variable `{v}` is not a formal ({})", formals.join(", ")),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use crate::expr::{Bound, Env};
    use crate::parser::{parse_expr, parse_pred, print};
    use num::complex::Complex64;

    fn x() -> Expr {
        Expr::var("x")
    }

    #[test]
    fn builtins_contain_reciprocal_template() {
        let reg = Registry::builtins();
        let rec = reg.elem("unary-/", 0).unwrap();
        assert_eq!(rec.deriv_template, parse_expr("(- (/ (* x x)))").unwrap());
        assert_eq!(rec.domain_template, DomainPred::NonZero(x()));
        assert_eq!(rec.evaluator, Evaluator::Builtin(Builtin::Recip));
        assert!(reg.inverse("ln").is_some());
        assert!(reg.elem("raise", 0).is_some() && reg.elem("raise", 1).is_some());
    }

    #[test]
    fn registering_reciprocal_on_a_bare_registry() {
        let reg = Registry::new()
            .register_elem_derivative(
                "unary-/",
                DomainPred::NonZero(x()),
                parse_expr("(- (/ (* x x)))").unwrap(),
                1,
                0,
            )
            .unwrap();
        assert_eq!(reg.len(), 1);
        assert!(reg.elem("unary-/", 0).is_some());
    }

    #[test]
    fn duplicate_elementary_registration() {
        let reg = Registry::new()
            .register_elem_derivative("exp", DomainPred::True, Expr::apply1("exp", x()), 1, 0)
            .unwrap();
        let err = reg
            .register_elem_derivative("exp", DomainPred::True, Expr::apply1("exp", x()), 1, 0)
            .unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateRegistration { .. }));
    }

    #[test]
    fn template_with_stray_variable_is_malformed() {
        let err = Registry::new()
            .register_elem_derivative("exp", DomainPred::True, Expr::var("y"), 1, 0)
            .unwrap_err();
        assert!(matches!(err, RegistryError::MalformedTemplate { .. }));
        let err = Registry::new()
            .register_elem_derivative("nosuch", DomainPred::True, x(), 1, 0)
            .unwrap_err();
        assert_eq!(err, RegistryError::UnknownFunction("nosuch".into()));
    }

    #[test]
    fn inverse_of_exp_on_a_bare_registry() {
        let reg = Registry::new()
            .register_elem_derivative("exp", DomainPred::True, Expr::apply1("exp", x()), 1, 0)
            .unwrap();
        let range = DomainPred::and(
            DomainPred::IsReal(x()),
            DomainPred::InOpenInterval(x(), Bound::int(0), Bound::PosInf),
        );
        let reg = reg
            .register_elem_inverse("ln", "exp", DomainPred::True, range.clone())
            .unwrap();
        assert_eq!(reg.inverse("ln").unwrap().inv_domain_pred, range);
        assert!(reg.function("ln").is_some());
    }

    /// exp maps the reals onto (0, ∞): sampled images are positive, and
    /// both ends of the interval are approached.
    #[test]
    fn exp_range_matches_the_registered_inverse_domain() {
        let reg = Registry::builtins();
        let range = &reg.inverse("ln").unwrap().inv_domain_pred;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..=400 {
            let t = -20.0 + 40.0 * f64::from(i) / 400.0;
            let y = eval(&Expr::apply1("exp", x()), &Env::single("x", Complex64::new(t, 0.0)), &reg)
                .unwrap();
            assert!(crate::eval::eval_pred(range, &Env::single("x", y), &reg).unwrap());
            lo = lo.min(y.re);
            hi = hi.max(y.re);
        }
        assert!(lo < 1e-8 && hi > 1e8);
    }

    #[test]
    fn inverse_of_unknown_function() {
        let err = Registry::builtins()
            .register_elem_inverse("g", "missing_fn", DomainPred::True, DomainPred::True)
            .unwrap_err();
        assert_eq!(err, RegistryError::UnknownFunction("missing_fn".into()));
    }

    #[test]
    fn square_inverse_with_named_predicates() {
        let reg = Registry::builtins()
            .load_registry_file(
                "(defun square (x) (* x x))
                 (defpred square-domain-p (x) (in-open x 0 +inf))
                 (defpred square-inverse-domain-p (x) (in-open x 0 +inf))",
            )
            .unwrap();
        let reg = reg
            .register_elem_inverse(
                "square-inverse",
                "square",
                parse_pred("(square-domain-p x)").unwrap(),
                parse_pred("(square-inverse-domain-p x)").unwrap(),
            )
            .unwrap();
        assert!(reg.inverse("square-inverse").is_some());
        let err = Registry::builtins()
            .load_registry_file("(defun square (x) (* x x))")
            .unwrap()
            .register_elem_inverse(
                "square-inverse",
                "square",
                parse_pred("(square-domain-p x)").unwrap(),
                DomainPred::True,
            )
            .unwrap_err();
        assert_eq!(err, RegistryError::UnknownPredicate("square-domain-p".into()));
    }

    #[test]
    fn defined_function_evaluates_by_inlining() {
        let reg = Registry::builtins()
            .define_function("square", "x", None, Expr::mul(x(), x()))
            .unwrap();
        let v = eval(&Expr::apply1("square", Expr::int(3)), &Env::new(), &reg).unwrap();
        assert_eq!(v, Complex64::new(9.0, 0.0));
    }

    #[test]
    fn self_recursion_is_rejected() {
        let err = Registry::builtins()
            .define_function("f", "x", None, Expr::apply1("f", x()))
            .unwrap_err();
        assert_eq!(
            err,
            RegistryError::RecursionDetected {
                cycle: vec!["f".into(), "f".into()]
            }
        );
    }

    #[test]
    fn mutual_recursion_is_rejected() {
        let reg = Registry::builtins()
            .define_function("h", "x", None, Expr::add(x(), Expr::int(1)))
            .unwrap()
            .define_function("g", "x", None, Expr::apply1("h", x()))
            .unwrap();
        let err = reg
            .define_function("h", "x", None, Expr::apply1("g", x()))
            .unwrap_err();
        assert_eq!(
            err,
            RegistryError::RecursionDetected {
                cycle: vec!["h".into(), "g".into(), "h".into()]
            }
        );
    }

    #[test]
    fn unknown_function_in_body() {
        let err = Registry::builtins()
            .define_function("g", "x", None, Expr::apply1("nowhere", x()))
            .unwrap_err();
        assert_eq!(err, RegistryError::UnknownFunction("nowhere".into()));
    }

    #[test]
    fn loading_files() {
        let base = Registry::new();
        let reg = base
            .load_registry_file(
                "(def-elem-derivative unary-/ elem-unary-/
                   (and (acl2-numberp x) (not (equal x 0)))
                   (- (/ (* x x))))",
            )
            .unwrap();
        assert_eq!(
            print(&reg.elem("unary-/", 0).unwrap().deriv_template, true),
            "(- (/ (* x x)))"
        );
        assert!(base.is_empty());

        let same = Registry::builtins().load_registry_file("; nothing here\n").unwrap();
        assert_eq!(same.len(), Registry::builtins().len());

        let reg = Registry::builtins()
            .load_registry_file(
                "(defun cube (x) (* x x x))
                 (def-elem-inverse cube-root cube t (realp x))",
            )
            .unwrap();
        assert!(reg.definition("cube").is_some());
        assert_eq!(reg.inverse("cube-root").unwrap().fn_name, "cube");

        // Reversed order fails: the inverse refers to a function not yet defined.
        let err = Registry::builtins()
            .load_registry_file(
                "(def-elem-inverse cube-root cube t (realp x))
                 (defun cube (x) (* x x x))",
            )
            .unwrap_err();
        assert!(matches!(err, RegistryError::AtForm { index: 0, .. }));
    }

    #[test]
    fn paper_style_inverse_form() {
        let reg = Registry::builtins()
            .load_registry_file(
                "(defun square (x) (* x x))
                 (defpred square-domain-p (x) (in-open x 0 +inf))
                 (defpred square-inverse-domain-p (x) (in-open x 0 +inf))
                 (def-elem-inverse square-inverse square-inverse
                   (square-domain-p x) (square-inverse-domain-p x) square)",
            )
            .unwrap();
        assert_eq!(reg.inverse("square-inverse").unwrap().fn_name, "square");
    }

    #[test]
    fn registration_is_persistent_and_ordered() {
        let before = Registry::builtins();
        let after = before
            .define_function("square", "x", None, Expr::mul(x(), x()))
            .unwrap();
        assert!(before.definition("square").is_none());
        assert_eq!(after.len(), before.len() + 1);
        for (a, b) in before.records().zip(after.records()) {
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
        assert!(matches!(after.records().last(), Some(Record::Def(d)) if d.name == "square"));
    }

    #[test]
    fn builtin_names_cannot_be_redefined() {
        let err = Registry::builtins()
            .define_function("exp", "x", None, x())
            .unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateRegistration { .. }));
    }

    #[test]
    fn bare_registry_knows_no_functions() {
        let reg = Registry::new();
        assert!(reg.function("exp").is_none());
        assert!(eval(&Expr::apply1("exp", x()), &Env::single("x", Complex64::new(0.0, 0.0)), &reg).is_err());
    }
}
