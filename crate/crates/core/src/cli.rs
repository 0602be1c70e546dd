//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use crate::checker::{check_obligations, CheckConfig, CheckReport};
use crate::differ::{derivative_hyps, differentiate};
use crate::eval::eval;
use crate::expr::{Env, Expr};
use crate::parser::{parse_complex, parse_expr, print, print_complex, print_pred};
use crate::registry::{Record, Registry};
use crate::simplify::{simplify, simplify_domain};

#[derive(Parser, Debug)]
#[command(name = "symdiff", version, about = "Symbolic differentiation with checked obligations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Differentiate an expression and print derivative, domain and
    /// obligation count.
    Derive { expr: String },
    /// Check a claimed derivative against the seven derivative obligations.
    Check {
        expr: String,
        #[arg(long)]
        deriv: String,
    },
    /// Evaluate an expression at the points given by --bind.
    Eval { expr: String },
    /// Print the simplified form of an expression.
    Simplify { expr: String },
    /// List registry records in insertion order.
    RegistryList,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Machine,
}

#[derive(Args, Debug)]
struct Options {
    /// Variable to differentiate with respect to.
    #[arg(long, global = true, default_value = "x")]
    var: String,
    /// Registry file to load; repeatable, applied in order.
    #[arg(long = "registry", global = true)]
    registries: Vec<PathBuf>,
    /// Start from an empty registry instead of the built-in one.
    #[arg(long, global = true)]
    no_builtins: bool,
    #[arg(long, global = true)]
    simplify: bool,
    /// Check the obligations after deriving.
    #[arg(long, global = true)]
    check: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Real part range of the sampling box.
    #[arg(long = "box", global = true, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    sample_box: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    report: ReportFormat,
    /// Variable binding NAME=RE[+IMi]; repeatable.
    #[arg(long = "bind", global = true)]
    binds: Vec<String>,
}

/// Output of one invocation.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: format!("error: {message}"),
    }
}

pub fn main() -> i32 {
    let outcome = run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    outcome.code
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut stdout = String::new();
    match execute(&cli, &mut stdout) {
        Ok(code) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout,
            stderr: f.message + "\n",
        },
    }
}

fn load_registry(opts: &Options) -> Result<Registry, Failure> {
    let mut reg = if opts.no_builtins {
        Registry::new()
    } else {
        Registry::builtins()
    };
    for path in &opts.registries {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        reg = reg
            .load_registry_file(&text)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(reg)
}

fn parse_arg(text: &str) -> Result<Expr, Failure> {
    parse_expr(text).map_err(|e| usage(format!("cannot parse `{text}`: {e}")))
}

fn bindings(opts: &Options) -> Result<Env, Failure> {
    let mut env = Env::new();
    for bind in &opts.binds {
        let (name, value) = bind
            .split_once('=')
            .ok_or_else(|| usage(format!("binding `{bind}` is not NAME=VALUE")))?;
        let z: Complex64 = parse_complex(value.trim())
            .ok_or_else(|| usage(format!("binding `{bind}`: cannot read `{value}` as a number")))?;
        env.bind(name.trim(), z);
    }
    Ok(env)
}

fn check_config(opts: &Options) -> Result<CheckConfig, Failure> {
    let mut cfg = CheckConfig {
        params: bindings(opts)?,
        ..CheckConfig::default()
    };
    if let Some(seed) = opts.seed {
        cfg.rng_seed = seed;
    }
    if let Some(n) = opts.samples {
        cfg.sample_count = n;
    }
    if let Some(b) = &opts.sample_box {
        cfg.re_range = (b[0], b[1]);
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn render(report: &CheckReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Machine => report.to_machine(),
    }
}

fn execute(cli: &Cli, out: &mut String) -> Result<i32, Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Derive { expr } => {
            let e = parse_arg(expr)?;
            let reg = load_registry(opts)?;
            let result = differentiate(&e, &opts.var, &reg).map_err(usage)?;
            let derivative = if opts.simplify {
                simplify(&result.derivative)
            } else {
                result.derivative.clone()
            };
            let _ = writeln!(out, "derivative: {}", print(&derivative, true));
            let _ = writeln!(out, "domain: {}", print_pred(&simplify_domain(&result.domain)));
            let _ = writeln!(out, "obligations: {}", result.obligations.len());
            if opts.check {
                let cfg = check_config(opts)?;
                let report = check_obligations(&result.obligations, &reg, &cfg);
                out.push_str(&render(&report, opts.report));
                return Ok(if report.passed() { 0 } else { 1 });
            }
            Ok(0)
        }
        Command::Check { expr, deriv } => {
            let e = parse_arg(expr)?;
            let claimed = parse_arg(deriv)?;
            let reg = load_registry(opts)?;
            let result = differentiate(&e, &opts.var, &reg).map_err(usage)?;
            let cfg = check_config(opts)?;
            let obligations = derivative_hyps(&opts.var, &e, &claimed, &result.domain);
            let report = check_obligations(&obligations, &reg, &cfg);
            out.push_str(&render(&report, opts.report));
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Eval { expr } => {
            let e = parse_arg(expr)?;
            let reg = load_registry(opts)?;
            let env = bindings(opts)?;
            match eval(&e, &env, &reg) {
                Ok(z) => {
                    let _ = writeln!(out, "{}", print_complex(z));
                    Ok(0)
                }
                Err(err) => Err(Failure {
                    code: 1,
                    message: format!("error: {err}"),
                }),
            }
        }
        Command::Simplify { expr } => {
            let e = parse_arg(expr)?;
            let _ = writeln!(out, "{}", print(&simplify(&e), true));
            Ok(0)
        }
        Command::RegistryList => {
            let reg = load_registry(opts)?;
            for record in reg.records() {
                let _ = writeln!(out, "{}", describe(record));
            }
            Ok(0)
        }
    }
}

fn describe(record: Record<'_>) -> String {
    match record {
        Record::ElemDeriv(r) => {
            let args = if r.arity == 2 {
                format!(" (varying argument {})", r.varying_arg)
            } else {
                String::new()
            };
            format!(
                "derivative  {}{}  domain {}  derivative {}",
                r.fn_name,
                args,
                print_pred(&r.domain_template),
                print(&r.deriv_template, true)
            )
        }
        Record::Inverse(r) => format!(
            "inverse     {} of {}  domain {}  inverse domain {}",
            r.inv_name,
            r.fn_name,
            print_pred(&r.domain_pred),
            print_pred(&r.inv_domain_pred)
        ),
        Record::Def(d) => format!(
            "function    {} ({})  {}",
            d.name,
            d.formals().collect::<Vec<_>>().join(" "),
            print(&d.body, true)
        ),
        Record::Pred(p) => format!("predicate   {} ({})  {}", p.name, p.formal, print_pred(&p.body)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("symdiff").chain(args.iter().copied()))
    }

    #[test]
    fn derive_square() {
        let o = run_args(&["derive", "(* x x)", "--var", "x"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout, "derivative: (+ (* x 1) (* 1 x))\ndomain: t\nobligations: 7\n");
        let o = run_args(&["derive", "(* x x)", "--simplify"]);
        assert!(o.stdout.starts_with("derivative: (* 2 x)\n"));
    }

    #[test]
    fn unknown_function_exits_two() {
        let o = run_args(&["derive", "(f x)"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("unknown function `f`"));
    }

    #[test]
    fn eval_and_simplify() {
        assert_eq!(run_args(&["eval", "(+ x 1)", "--bind", "x=2"]).stdout, "3\n");
        assert_eq!(run_args(&["simplify", "(+ (* x 1) 0)"]).stdout, "x\n");
        assert_eq!(run_args(&["eval", "(+ x"]).code, 2);
    }

    #[test]
    fn negative_box_bounds_parse() {
        let o = run_args(&["check", "(* x x)", "--deriv", "(* 2 x)", "--box", "-1", "1"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
    }
}
