//! S-expression surface syntax.
//!
//! `parse` reads raw forms; `normalize` turns a form into the strictly
//! binary [`Expr`] representation, desugaring n-ary `+`/`*`, subtraction and
//! division. `print` goes the other way, either re-sugared (`+`, `*`, unary
//! `-` and `/`) or in the strict binary spelling (`binary-+`, `unary-/`, ...).

use std::fmt::Write as _;

use num::traits::Zero;
use num::{BigInt, BigRational};
use thiserror::Error;

use crate::expr::{Bound, DomainPred, Expr, Number};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceForm {
    Symbol(String),
    Number(Number),
    List(Vec<SourceForm>),
}

impl SourceForm {
    pub fn symbol(s: &str) -> SourceForm {
        SourceForm::Symbol(s.to_string())
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SourceForm::Symbol(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("`{head}` does not accept {found} argument(s)")]
    Arity { head: String, found: usize },
    #[error("malformed form: {0}")]
    Malformed(String),
    #[error("expected exactly one form, found {0}")]
    FormCount(usize),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn form(&mut self) -> Result<SourceForm, ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        match self.chars.peek() {
            None => Err(syntax(line, col, "unexpected end of input")),
            Some(')') => Err(syntax(line, col, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(syntax(
                                self.line,
                                self.col,
                                format!("unexpected end of input; `(` at {line}:{col} is not closed"),
                            ))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SourceForm::List(items));
                        }
                        Some(_) => items.push(self.form()?),
                    }
                }
            }
            Some(_) => {
                let mut token = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    token.push(c);
                    self.bump();
                }
                atom(&token).map_err(|msg| syntax(line, col, msg))
            }
        }
    }
}

fn looks_numeric(token: &str) -> bool {
    let body = token.strip_prefix(['+', '-']).unwrap_or(token);
    body.starts_with(|c: char| c.is_ascii_digit())
        || (body.starts_with('.') && body[1..].starts_with(|c: char| c.is_ascii_digit()))
}

fn atom(token: &str) -> Result<SourceForm, String> {
    if !looks_numeric(token) {
        return Ok(SourceForm::Symbol(token.to_string()));
    }
    parse_rational(token)
        .map(|r| SourceForm::Number(Number::real(r)))
        .ok_or_else(|| format!("bad numeric literal `{token}`"))
}

/// Integers, ratios (`-3/4`) and decimals with an optional exponent
/// (`2.5`, `1e-3`), all converted exactly.
pub fn parse_rational(token: &str) -> Option<BigRational> {
    let (negative, body) = match token.as_bytes().first()? {
        b'-' => (true, &token[1..]),
        b'+' => (false, &token[1..]),
        _ => (false, token),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((n, d)) = body.split_once('/') {
        if !digits(n) || !digits(d) {
            return None;
        }
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n.parse().ok()?, d)
    } else {
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if !(digits(int_part) || int_part.is_empty())
            || !(digits(frac_part) || frac_part.is_empty())
            || (int_part.is_empty() && frac_part.is_empty())
        {
            return None;
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut value = BigRational::from_integer(all_digits.parse().ok()?);
        let mut scale: i64 = -(frac_part.len() as i64);
        if let Some(exp) = exponent {
            let (sign, e) = match exp.as_bytes().first()? {
                b'-' => (-1, &exp[1..]),
                b'+' => (1, &exp[1..]),
                _ => (1, exp),
            };
            if !digits(e) || e.len() > 6 {
                return None;
            }
            scale += sign * e.parse::<i64>().ok()?;
        }
        let ten = BigRational::from_integer(BigInt::from(10));
        let factor = num::pow(ten, scale.unsigned_abs() as usize);
        if scale >= 0 {
            value *= factor;
        } else {
            value /= factor;
        }
        value
    };
    Some(if negative { -value } else { value })
}

/// Reads every top-level form in `text`; `;` starts a comment.
pub fn parse(text: &str) -> Result<Vec<SourceForm>, ParseError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut forms = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.chars.peek().is_none() {
            return Ok(forms);
        }
        forms.push(reader.form()?);
    }
}

fn parse_one(text: &str) -> Result<SourceForm, ParseError> {
    let mut forms = parse(text)?;
    if forms.len() != 1 {
        return Err(ParseError::FormCount(forms.len()));
    }
    Ok(forms.remove(0))
}

/// Parses and normalizes a single expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    normalize(&parse_one(text)?)
}

/// Parses and normalizes a single domain predicate.
pub fn parse_pred(text: &str) -> Result<DomainPred, ParseError> {
    normalize_pred(&parse_one(text)?)
}

fn fold_left(
    head: &str,
    args: &[SourceForm],
    combine: fn(Expr, Expr) -> Expr,
) -> Result<Expr, ParseError> {
    let mut exprs = args.iter().map(normalize);
    let first = exprs.next().ok_or_else(|| ParseError::Arity {
        head: head.to_string(),
        found: 0,
    })??;
    exprs.try_fold(first, |acc, e| Ok(combine(acc, e?)))
}

fn exactly<'a, const N: usize>(
    head: &str,
    args: &'a [SourceForm],
) -> Result<&'a [SourceForm; N], ParseError> {
    args.try_into().map_err(|_| ParseError::Arity {
        head: head.to_string(),
        found: args.len(),
    })
}

/// Converts a raw form into the binary expression representation.
pub fn normalize(form: &SourceForm) -> Result<Expr, ParseError> {
    let items = match form {
        SourceForm::Number(n) => return Ok(Expr::Const(n.clone())),
        SourceForm::Symbol(s) => return Ok(Expr::Var(s.clone())),
        SourceForm::List(items) => items,
    };
    let (head, args) = items
        .split_first()
        .ok_or_else(|| ParseError::Malformed("empty list".into()))?;
    let head = head
        .as_symbol()
        .ok_or_else(|| ParseError::Malformed("the head of a list must be a symbol".into()))?;
    match head {
        "+" => fold_left(head, args, Expr::add),
        "*" => fold_left(head, args, Expr::mul),
        "-" if args.len() == 1 => Ok(Expr::neg(normalize(&args[0])?)),
        "-" => fold_left(head, args, |a, b| Expr::add(a, Expr::neg(b))),
        "/" if args.len() == 1 => Ok(Expr::recip(normalize(&args[0])?)),
        "/" => fold_left(head, args, |a, b| Expr::mul(a, Expr::recip(b))),
        "binary-+" => {
            let [a, b] = exactly::<2>(head, args)?;
            Ok(Expr::add(normalize(a)?, normalize(b)?))
        }
        "binary-*" => {
            let [a, b] = exactly::<2>(head, args)?;
            Ok(Expr::mul(normalize(a)?, normalize(b)?))
        }
        "unary--" => Ok(Expr::neg(normalize(&exactly::<1>(head, args)?[0])?)),
        "unary-/" => Ok(Expr::recip(normalize(&exactly::<1>(head, args)?[0])?)),
        "complex" => match exactly::<2>(head, args)? {
            [SourceForm::Number(re), SourceForm::Number(im)] if re.is_real() && im.is_real() => {
                Ok(Expr::Const(Number::new(re.re().clone(), im.re().clone())))
            }
            _ => Err(ParseError::Malformed(
                "`complex` takes two rational literals".into(),
            )),
        },
        _ if args.is_empty() || args.len() > 2 => Err(ParseError::Arity {
            head: head.to_string(),
            found: args.len(),
        }),
        _ => Ok(Expr::Apply(
            head.to_string(),
            args.iter().map(normalize).collect::<Result<_, _>>()?,
        )),
    }
}

fn parse_bound(form: &SourceForm) -> Result<Bound, ParseError> {
    match form {
        SourceForm::Number(n) if n.is_real() => Ok(Bound::Finite(n.re().clone())),
        SourceForm::Symbol(s) if s == "-inf" => Ok(Bound::NegInf),
        SourceForm::Symbol(s) if s == "+inf" || s == "inf" => Ok(Bound::PosInf),
        _ => Err(ParseError::Malformed(
            "interval bounds are rational literals, `-inf` or `+inf`".into(),
        )),
    }
}

/// Converts a raw form into a domain predicate. Unrecognised unary heads
/// become references to named predicates.
pub fn normalize_pred(form: &SourceForm) -> Result<DomainPred, ParseError> {
    let items = match form {
        SourceForm::Symbol(s) if s == "t" => return Ok(DomainPred::True),
        SourceForm::List(items) => items,
        _ => {
            return Err(ParseError::Malformed(
                "a domain predicate is `t` or a list".into(),
            ))
        }
    };
    let (head, args) = items
        .split_first()
        .ok_or_else(|| ParseError::Malformed("empty list".into()))?;
    let head = head
        .as_symbol()
        .ok_or_else(|| ParseError::Malformed("the head of a list must be a symbol".into()))?;
    match head {
        "and" => Ok(DomainPred::all(
            args.iter().map(normalize_pred).collect::<Result<Vec<_>, _>>()?,
        )),
        "nonzero" => Ok(DomainPred::NonZero(normalize(
            &exactly::<1>(head, args)?[0],
        )?)),
        "realp" => Ok(DomainPred::IsReal(normalize(&exactly::<1>(head, args)?[0])?)),
        "in-open" => {
            let [e, lo, hi] = exactly::<3>(head, args)?;
            Ok(DomainPred::InOpenInterval(
                normalize(e)?,
                parse_bound(lo)?,
                parse_bound(hi)?,
            ))
        }
        // Every value the evaluator produces is a number.
        "acl2-numberp" => match exactly::<1>(head, args)? {
            [SourceForm::Symbol(_)] => Ok(DomainPred::True),
            _ => Err(ParseError::Malformed(
                "`acl2-numberp` is only accepted on a variable".into(),
            )),
        },
        "not" => {
            let [inner] = exactly::<1>(head, args)?;
            let SourceForm::List(eq) = inner else {
                return Err(ParseError::Malformed("`not` must wrap `(equal e 0)`".into()));
            };
            match eq.as_slice() {
                [SourceForm::Symbol(s), a, b] if s == "equal" => {
                    let is_zero = |f: &SourceForm| matches!(f, SourceForm::Number(n) if n.is_zero());
                    if is_zero(b) {
                        Ok(DomainPred::NonZero(normalize(a)?))
                    } else if is_zero(a) {
                        Ok(DomainPred::NonZero(normalize(b)?))
                    } else {
                        Err(ParseError::Malformed("`not` must wrap `(equal e 0)`".into()))
                    }
                }
                _ => Err(ParseError::Malformed("`not` must wrap `(equal e 0)`".into())),
            }
        }
        _ => {
            let [arg] = exactly::<1>(head, args)?;
            Ok(DomainPred::Named(head.to_string(), normalize(arg)?))
        }
    }
}

pub fn print_number(n: &Number) -> String {
    if n.is_real() {
        n.re().to_string()
    } else {
        format!("(complex {} {})", n.re(), n.im())
    }
}

/// Renders an expression. With `sugared` set, left-nested sums and products
/// are flattened into n-ary `+`/`*` and negation/reciprocal print as unary
/// `-`/`/`; otherwise every node prints under its strict binary name.
pub fn print(e: &Expr, sugared: bool) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, sugared);
    out
}

fn write_chain(out: &mut String, head: &str, e: &Expr, sugared: bool) {
    let mut operands = Vec::new();
    let mut cur = e;
    loop {
        match (cur, e) {
            (Expr::Add(a, b), Expr::Add(..)) | (Expr::Mul(a, b), Expr::Mul(..)) => {
                operands.push(&**b);
                cur = a;
            }
            _ => {
                operands.push(cur);
                break;
            }
        }
    }
    out.push('(');
    out.push_str(head);
    for operand in operands.into_iter().rev() {
        out.push(' ');
        write_expr(out, operand, sugared);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expr, sugared: bool) {
    match e {
        Expr::Const(n) => out.push_str(&print_number(n)),
        Expr::Var(v) => out.push_str(v),
        Expr::Add(a, b) | Expr::Mul(a, b) if !sugared => {
            out.push_str(if matches!(e, Expr::Add(..)) {
                "(binary-+ "
            } else {
                "(binary-* "
            });
            write_expr(out, a, sugared);
            out.push(' ');
            write_expr(out, b, sugared);
            out.push(')');
        }
        Expr::Add(..) => write_chain(out, "+", e, sugared),
        Expr::Mul(..) => write_chain(out, "*", e, sugared),
        Expr::Neg(a) | Expr::Recip(a) => {
            let head = match (e, sugared) {
                (Expr::Neg(_), true) => "(- ",
                (Expr::Neg(_), false) => "(unary-- ",
                (_, true) => "(/ ",
                (_, false) => "(unary-/ ",
            };
            out.push_str(head);
            write_expr(out, a, sugared);
            out.push(')');
        }
        Expr::Apply(f, args) => {
            out.push('(');
            out.push_str(f);
            for a in args {
                out.push(' ');
                write_expr(out, a, sugared);
            }
            out.push(')');
        }
    }
}

fn print_bound(b: &Bound) -> String {
    match b {
        Bound::NegInf => "-inf".into(),
        Bound::PosInf => "+inf".into(),
        Bound::Finite(r) => r.to_string(),
    }
}

/// Renders a domain predicate; conjunctions print flattened.
pub fn print_pred(p: &DomainPred) -> String {
    match p {
        DomainPred::True => "t".into(),
        DomainPred::And(..) => {
            let mut out = String::from("(and");
            for c in p.conjuncts() {
                let _ = write!(out, " {}", print_pred(c));
            }
            out.push(')');
            out
        }
        DomainPred::NonZero(e) => format!("(nonzero {})", print(e, true)),
        DomainPred::IsReal(e) => format!("(realp {})", print(e, true)),
        DomainPred::InOpenInterval(e, lo, hi) => format!(
            "(in-open {} {} {})",
            print(e, true),
            print_bound(lo),
            print_bound(hi)
        ),
        DomainPred::Named(name, e) => format!("({name} {})", print(e, true)),
    }
}

/// Formats a complex value the way `--bind` accepts it: `3`, `-1.5+2i`.
pub fn print_complex(z: num::complex::Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `RE`, `IMi` or `RE±IMi`.
pub fn parse_complex(text: &str) -> Option<num::complex::Complex64> {
    use num::complex::Complex64;
    let text = text.trim();
    let Some(body) = text.strip_suffix('i') else {
        return text.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent or leading.
    let split = body
        .char_indices()
        .rev()
        .find(|&(i, c)| {
            (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
        })
        .map(|(i, _)| i);
    let (re, im) = match split {
        Some(i) => (body[..i].parse().ok()?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse().ok()?,
    };
    Some(Complex64::new(re, im))
}
