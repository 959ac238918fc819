//! `jetcalc`: batch front end for the jet-space engine.
//!
//! Exit codes: 0 when every check passes, 1 when a check produced a nonzero
//! residual, 2 on usage, parse, or shape errors.

use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jetcalc_core::evolutionary::{symmetry_residuals, time_symmetry_residual, EvolutionField};
use jetcalc_core::exprio::{
    expr_to_json, parse_characteristic, parse_chi, parse_cotuple, parse_current, parse_expr, print_chi,
    print_cotuple, report_to_json, SourceSpan,
};
use jetcalc_core::ns::{ns_build, ns_integrability_prolongations, ns_verify, Viscosity};
use jetcalc_core::reducedcomplex::{kernel_search, reduced_system_residuals, AnsatzSpec, DEFAULT_UNKNOWN_CAP};
use jetcalc_core::variational::{current_divergence, euler_operator, helmholtz_residual};
use jetcalc_core::{Error, Expr, ReductionContext, Report, Setting, Slot};

#[derive(Parser, Debug)]
#[command(name = "jetcalc", version, about = "Exact jet-space calculus for incompressible Navier-Stokes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Number of spatial dimensions.
    #[arg(long, global = true, default_value_t = 3)]
    dim: usize,
    /// Constraint setting used for reduction.
    #[arg(long, global = true, default_value = "cpe")]
    constraints: Setting,
    /// `symbolic` or a positive rational such as `1/100`.
    #[arg(long, global = true, default_value = "symbolic")]
    viscosity: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical reduced form of an expression.
    Reduce(Input),
    /// Apply total derivatives (restricted to the constraint setting).
    Tderiv {
        /// Directions, applied left to right.
        #[arg(long = "direction", short = 'd', required = true)]
        directions: Vec<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Variational derivative of a Lagrangian.
    Euler(Input),
    /// Helmholtz residual of a cotuple (`d1: ..; dp: ..`).
    Helmholtz(Input),
    /// Symmetry determining equations for a characteristic (`f1: ..; f: ..`).
    Symmetry(Input),
    /// Commutation with the Navier-Stokes evolution `D_t`.
    TimeSymmetry {
        /// Pressure component of the evolution field.
        #[arg(long, default_value = "0")]
        evolution_pressure: String,
        #[command(flatten)]
        input: Input,
    },
    /// Divergence of a current (`j1: ..; j2: ..`).
    Current(Input),
    /// Reduced-system residuals of a chi-tuple.
    ReducedSystem(Input),
    /// Basis of the kernel of the reduced operator within an ansatz.
    Kernel(KernelArgs),
    /// Navier-Stokes presets.
    Ns {
        #[command(subcommand)]
        action: NsAction,
    },
    /// Run a named check: symmetry, current, helmholtz, reduced-system or ns.
    Check {
        kind: CheckKind,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Symmetry,
    Current,
    Helmholtz,
    ReducedSystem,
    Ns,
}

#[derive(Subcommand, Debug)]
enum NsAction {
    /// Run the verification suite.
    Check {
        /// Candidate pressure evolution component for the Poisson check.
        #[arg(long)]
        pressure: Option<String>,
    },
    /// Print the presets in grammar form.
    Show,
}

#[derive(Args, Debug)]
struct Input {
    /// Input file; standard input when absent or `-`.
    file: Option<String>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Defaults to `--constraints`.
    #[arg(long)]
    setting: Option<Setting>,
    #[arg(long, default_value_t = 0)]
    max_order: u32,
    #[arg(long, default_value_t = 0)]
    max_degree: u32,
    #[arg(long, default_value_t = 0)]
    max_x_degree: u32,
    /// Allow a factor `t` in the ansatz.
    #[arg(long)]
    time: bool,
    /// Maximal number of unknown coefficients.
    #[arg(long, default_value_t = DEFAULT_UNKNOWN_CAP)]
    cap: usize,
}

/// A failure that maps to exit code 2.
struct Failure {
    message: String,
}

impl Failure {
    fn from_error(err: Error, source: Option<&str>) -> Failure {
        let mut message = format!("error: {err}");
        let span = match &err {
            Error::Syntax { span, .. } | Error::IndexArity { span, .. } | Error::NegativeIndex { span } => Some(*span),
            _ => None,
        };
        if let (Some(span), Some(text)) = (span, source) {
            message.push('\n');
            message.push_str(&caret(text, span));
        }
        Failure { message }
    }

    fn msg(message: impl Into<String>) -> Failure {
        Failure {
            message: format!("error: {}", message.into()),
        }
    }
}

/// The offending line with a caret underline.
fn caret(text: &str, span: SourceSpan) -> String {
    // errors at end of input point just past the last visible character
    let start = span.start.min(text.trim_end().len());
    let line_start = text[..start].rfind('\n').map_or(0, |k| k + 1);
    let line_end = text[start..].find('\n').map_or(text.len(), |k| start + k);
    let line_no = text[..start].matches('\n').count() + 1;
    let width = span.end.clamp(start + 1, line_end.max(start + 1)) - start;
    format!(
        "  {line_no} | {}\n  {} | {}{}",
        &text[line_start..line_end],
        " ".repeat(line_no.to_string().len()),
        " ".repeat(text[line_start..start].chars().count()),
        "^".repeat(width)
    )
}

fn read_input(input: &Input) -> Result<String, Failure> {
    match input.file.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::msg(format!("reading standard input: {e}")))?;
            Ok(s)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::msg(format!("reading {path}: {e}"))),
    }
}

struct Outcome {
    text: String,
    structured: serde_json::Value,
    pass: bool,
}

fn report_outcome(command: &str, report: &Report) -> Outcome {
    let mut text = String::new();
    for r in &report.entries {
        let tag = if r.informational { " (info)" } else { "" };
        text.push_str(&format!("{}{}: {}\n", r.name, tag, r.value));
    }
    let pass = report.passes();
    text.push_str(if pass { "result: pass\n" } else { "result: fail\n" });
    Outcome {
        text,
        structured: json!({"command": command, "passed": pass, "residuals": report_to_json(report)}),
        pass,
    }
}

fn value_outcome(command: &str, named: Vec<(String, Expr)>) -> Outcome {
    let text = if named.len() == 1 && named[0].0.is_empty() {
        format!("{}\n", named[0].1)
    } else {
        named.iter().map(|(n, e)| format!("{n}: {e}\n")).collect()
    };
    let values: Vec<serde_json::Value> = named
        .iter()
        .map(|(n, e)| json!({"name": n, "value": expr_to_json(e)}))
        .collect();
    Outcome {
        text,
        structured: json!({"command": command, "values": values}),
        pass: true,
    }
}

fn slot_name(s: Slot) -> String {
    match s {
        Slot::Velocity(mu) => format!("u{mu}"),
        Slot::Pressure => "p".to_string(),
    }
}

struct Env {
    dim: usize,
    ctx: Arc<ReductionContext>,
    viscosity: Viscosity,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let viscosity: Viscosity = g.viscosity.parse().map_err(|e| Failure::from_error(e, None))?;
    if let Viscosity::Value(c) = &viscosity {
        if *c <= jetcalc_core::expr::int(0) {
            return Err(Failure::from_error(Error::InvalidViscosity(c.to_string()), None));
        }
    }
    let ctx = Arc::new(ReductionContext::new(g.constraints, g.dim).map_err(|e| Failure::from_error(e, None))?);
    let env = Env {
        dim: g.dim,
        ctx,
        viscosity,
    };
    match &cli.command {
        Command::Reduce(input) => {
            let e = read_expr(&env, input)?;
            Ok(value_outcome("reduce", vec![(String::new(), env.ctx.reduce(&e))]))
        }
        Command::Tderiv { directions, input } => {
            let mut e = read_expr(&env, input)?;
            e = env.ctx.reduce(&e);
            for &mu in directions {
                e = env.ctx.restricted_derivative(mu, &e).map_err(|e| Failure::from_error(e, None))?;
            }
            Ok(value_outcome("tderiv", vec![(String::new(), e)]))
        }
        Command::Euler(input) => {
            let l = read_expr(&env, input)?;
            let d = euler_operator(&l, env.dim);
            let mut named: Vec<(String, Expr)> = d
                .velocity
                .iter()
                .enumerate()
                .map(|(k, e)| (format!("d{}", k + 1), e.clone()))
                .collect();
            named.push(("dp".into(), d.pressure.clone()));
            let mut out = value_outcome("euler", named);
            out.text = format!("{}\n", print_cotuple(&d));
            Ok(out)
        }
        Command::Helmholtz(input) => helmholtz(&env, input),
        Command::Symmetry(input) => symmetry(&env, input),
        Command::TimeSymmetry {
            evolution_pressure,
            input,
        } => {
            let src = read_input(input)?;
            let f = parse_characteristic(&src, env.dim).map_err(|e| Failure::from_error(e, Some(&src)))?;
            let pe = parse_expr(evolution_pressure, env.dim).map_err(|e| Failure::from_error(e, Some(evolution_pressure)))?;
            let ns = ns_build(env.dim, env.viscosity.clone()).map_err(|e| Failure::from_error(e, None))?;
            let field = EvolutionField::new(
                env.ctx.clone(),
                jetcalc_core::Characteristic::new(ns.evolution.clone(), pe),
            )
            .map_err(|e| Failure::from_error(e, None))?;
            let r = time_symmetry_residual(&field, &f).map_err(|e| Failure::from_error(e, None))?;
            let mut report = Report::new();
            for (slot, e) in r.slots() {
                report.push(format!("D_t f - E_* f [{}]", slot_name(slot)), e.clone());
            }
            Ok(report_outcome("time-symmetry", &report))
        }
        Command::Current(input) => current(&env, input),
        Command::ReducedSystem(input) => reduced_system(&env, input),
        Command::Kernel(k) => kernel(&env, k),
        Command::Ns { action } => match action {
            NsAction::Check { pressure } => ns_check(&env, pressure.as_deref()),
            NsAction::Show => ns_show(&env),
        },
        Command::Check { kind, input } => match kind {
            CheckKind::Symmetry => symmetry(&env, input),
            CheckKind::Current => current(&env, input),
            CheckKind::Helmholtz => helmholtz(&env, input),
            CheckKind::ReducedSystem => reduced_system(&env, input),
            CheckKind::Ns => ns_check(&env, None),
        },
    }
}

fn read_expr(env: &Env, input: &Input) -> Result<Expr, Failure> {
    let src = read_input(input)?;
    parse_expr(&src, env.dim).map_err(|e| Failure::from_error(e, Some(&src)))
}

fn helmholtz(env: &Env, input: &Input) -> Result<Outcome, Failure> {
    let src = read_input(input)?;
    let chi = parse_cotuple(&src, env.dim).map_err(|e| Failure::from_error(e, Some(&src)))?;
    let h = helmholtz_residual(&chi);
    let mut report = Report::new();
    for ((a, b, k), c) in h.iter() {
        report.push(format!("({}, {}, {})", slot_name(*a), slot_name(*b), k), c.clone());
    }
    if report.entries.is_empty() {
        report.push("helmholtz", Expr::zero());
    }
    Ok(report_outcome("helmholtz", &report))
}

fn symmetry(env: &Env, input: &Input) -> Result<Outcome, Failure> {
    let src = read_input(input)?;
    let f = parse_characteristic(&src, env.dim).map_err(|e| Failure::from_error(e, Some(&src)))?;
    let report = symmetry_residuals(&env.ctx, &f).map_err(|e| Failure::from_error(e, None))?;
    Ok(report_outcome("symmetry", &report))
}

fn current(env: &Env, input: &Input) -> Result<Outcome, Failure> {
    let src = read_input(input)?;
    let j = parse_current(&src, env.dim).map_err(|e| Failure::from_error(e, Some(&src)))?;
    let mut report = Report::new();
    report.push("divergence", current_divergence(&env.ctx, &j));
    Ok(report_outcome("current", &report))
}

fn reduced_system(env: &Env, input: &Input) -> Result<Outcome, Failure> {
    let src = read_input(input)?;
    let chi = parse_chi(&src, env.ctx.setting(), env.dim).map_err(|e| Failure::from_error(e, Some(&src)))?;
    let report = reduced_system_residuals(&env.ctx, &chi).map_err(|e| Failure::from_error(e, None))?;
    Ok(report_outcome("reduced-system", &report))
}

fn kernel(env: &Env, k: &KernelArgs) -> Result<Outcome, Failure> {
    let setting = k.setting.unwrap_or(env.ctx.setting());
    let ctx = if setting == env.ctx.setting() {
        env.ctx.clone()
    } else {
        Arc::new(ReductionContext::new(setting, env.dim).map_err(|e| Failure::from_error(e, None))?)
    };
    let spec = AnsatzSpec {
        max_order: k.max_order,
        max_degree: k.max_degree,
        max_x_degree: k.max_x_degree,
        include_t: k.time,
    };
    let basis = kernel_search(&ctx, &spec, k.cap).map_err(|e| Failure::from_error(e, None))?;
    let mut text: String = basis.iter().map(|chi| format!("{}\n", print_chi(chi))).collect();
    text.push_str(&format!("count: {}\n", basis.len()));
    let tuples: Vec<serde_json::Value> = basis
        .iter()
        .map(|chi| {
            serde_json::Value::Object(
                chi.components()
                    .iter()
                    .map(|(key, e)| (key.name(setting), expr_to_json(e)))
                    .collect(),
            )
        })
        .collect();
    Ok(Outcome {
        text,
        structured: json!({"command": "kernel", "setting": setting.to_string(), "count": basis.len(), "basis": tuples}),
        pass: true,
    })
}

fn ns_check(env: &Env, pressure: Option<&str>) -> Result<Outcome, Failure> {
    let ns = ns_build(env.dim, env.viscosity.clone()).map_err(|e| Failure::from_error(e, None))?;
    let candidate = match pressure {
        Some(text) => Some(parse_expr(text, env.dim).map_err(|e| Failure::from_error(e, Some(text)))?),
        None => None,
    };
    let mut report = ns_verify(&ns, candidate.as_ref()).map_err(|e| Failure::from_error(e, None))?;
    for p in ns_integrability_prolongations(&ns) {
        report.push(format!("prolongation {} on cpe", p.name), p.reduced);
    }
    Ok(report_outcome("ns check", &report))
}

fn ns_show(env: &Env) -> Result<Outcome, Failure> {
    let ns = ns_build(env.dim, env.viscosity.clone()).map_err(|e| Failure::from_error(e, None))?;
    Ok(value_outcome("ns show", ns.presets()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.global.format {
                Format::Text => print!("{}", out.text),
                Format::Structured => println!("{}", serde_json::to_string_pretty(&out.structured).unwrap()),
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(2)
        }
    }
}
