use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use witnesslab_core::arith::factorize;
use witnesslab_core::extremal::{default_budget, delta_exact, delta_greedy, GreedyOrder};
use witnesslab_core::lambda_lp::{
    epsilon_constant, lambda, lambda13_closed_form, lambda_prime_power, lambda_single_class,
};
use witnesslab_core::witness::{
    build_family, build_gauss, build_optimal_with_solution, build_trivial, WitnessFunction,
};
use witnesslab_core::Error as CoreError;

use crate::error::{CliError, CliResult};
use crate::format::{fmt_digits, fmt_set, fmt_sig};
use crate::report::verify;
use crate::table::{build_table, to_csv, to_json};

/// Agreement tolerance between λ methods.
pub const METHOD_TOL: f64 = 1e-6;
/// Tolerance of the `epsilon --check` identities.
pub const EPSILON_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "witnesslab",
    version,
    about = "Cubic-residue witness functions, their optimal constant term, and extremal avoider sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal constant term λ(C₀^(q)).
    Lambda {
        q: u64,
        #[arg(long, value_enum, default_value_t = LambdaMethod::Lp)]
        method: LambdaMethod,
        #[arg(long)]
        json: bool,
    },
    /// Largest set B ⊆ ℤ_q whose differences avoid the cubic residues.
    Delta {
        q: u64,
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        /// Search node budget (default: WITNESSLAB_BUDGET or 10⁸).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Build a witness function; print its JSON, a value, or export it.
    Witness {
        q: u64,
        #[arg(long, value_enum, default_value_t = ConstructionArg::Family)]
        construction: ConstructionArg,
        /// Print g(y) instead of the JSON.
        #[arg(long, value_name = "Y")]
        eval: Option<u64>,
        #[arg(long, value_name = "FILE")]
        export: Option<PathBuf>,
    },
    /// Check every claim up to qmax; exit 0 iff all pass.
    Verify {
        qmax: u64,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Per-modulus table of λ, family b0, q^(−ε) and δ.
    Table {
        #[arg(long)]
        qmax: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// The exponent ε.
    Epsilon {
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMethod {
    Lp,
    Closed,
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Family,
    Gauss,
    Trivial,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Runs a parsed command, writing normal output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Lambda { q, method, json } => cmd_lambda(q, method, json, out),
        Command::Delta {
            q,
            exact: _,
            greedy,
            budget,
            json,
        } => cmd_delta(q, greedy, budget.unwrap_or_else(default_budget), json, out),
        Command::Witness {
            q,
            construction,
            eval,
            export,
        } => cmd_witness(q, construction, eval, export.as_deref(), out),
        Command::Verify { qmax, report } => cmd_verify(qmax, report.as_deref(), out),
        Command::Table { qmax, out: path, format } => cmd_table(qmax, path.as_deref(), format, out),
        Command::Epsilon { check } => cmd_epsilon(check, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    writeln!(out, "{text}").map_err(|e| CliError::io("<stdout>", e))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn positive(q: u64) -> CliResult<()> {
    if q == 0 {
        return Err(CliError::Usage("modulus must be at least 1".into()));
    }
    Ok(())
}

/// `λ` by one method, with `exact = false` when the value is only an upper bound.
fn lambda_by(q: u64, method: LambdaMethod) -> witnesslab_core::Result<(f64, bool)> {
    if q == 1 {
        return Ok((1.0, true));
    }
    match method {
        LambdaMethod::Lp => Ok((lambda(q)?, true)),
        LambdaMethod::Closed => Ok((lambda_single_class(q)?, true)),
        LambdaMethod::Recursion => {
            let f = factorize(q)?;
            if !f.is_prime_power() {
                return Err(CoreError::Inapplicable(format!("{q} is not a prime power")));
            }
            let (p, m) = f.factors[0];
            Ok((lambda_prime_power(p, m)?, p != 3 || m % 3 != 1))
        }
    }
}

#[derive(Serialize)]
struct MethodCheck {
    method: LambdaMethod,
    value: f64,
    upper_bound_only: bool,
    agrees: bool,
}

#[derive(Serialize)]
struct LambdaOutput {
    q: u64,
    method: LambdaMethod,
    lambda: f64,
    upper_bound_only: bool,
    checks: Vec<MethodCheck>,
}

fn cmd_lambda(q: u64, method: LambdaMethod, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    positive(q)?;
    let (value, exact) = lambda_by(q, method)?;
    let mut checks = Vec::new();
    for other in [LambdaMethod::Lp, LambdaMethod::Closed, LambdaMethod::Recursion] {
        if other == method || q == 1 {
            continue;
        }
        let (v, other_exact) = match lambda_by(q, other) {
            Ok(r) => r,
            Err(CoreError::Inapplicable(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let agrees = match (exact, other_exact) {
            (true, true) => (v - value).abs() <= METHOD_TOL,
            (true, false) => value <= v + METHOD_TOL,
            (false, true) => v <= value + METHOD_TOL,
            (false, false) => true,
        };
        checks.push(MethodCheck {
            method: other,
            value: v,
            upper_bound_only: !other_exact,
            agrees,
        });
    }
    let ok = checks.iter().all(|c| c.agrees);
    if json {
        let o = LambdaOutput {
            q,
            method,
            lambda: value,
            upper_bound_only: !exact,
            checks,
        };
        emit(out, &serde_json::to_string(&o).expect("serializes"))?;
    } else {
        let name = |m: LambdaMethod| m.to_possible_value().expect("named").get_name().to_string();
        let note = if exact { "" } else { "  (upper bound)" };
        emit(out, &format!("lambda({q}) = {}  [{}]{note}", fmt_sig(value), name(method)))?;
        for c in &checks {
            let verdict = match (c.agrees, c.upper_bound_only) {
                (true, false) => "agrees",
                (true, true) => "consistent upper bound",
                (false, _) => "DISAGREES",
            };
            emit(out, &format!("  {:<10} {}  {verdict}", name(c.method), fmt_sig(c.value)))?;
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_delta(q: u64, greedy: bool, budget: u64, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    positive(q)?;
    let d = if greedy {
        delta_greedy(q, &GreedyOrder::Natural)?
    } else {
        delta_exact(q, budget)?
    };
    if json {
        emit(out, &d.to_json())?;
    } else {
        let kind = match (greedy, d.exact) {
            (true, _) => "greedy",
            (false, true) => "exact",
            (false, false) => "budget exhausted, lower bound",
        };
        emit(
            out,
            &format!(
                "delta({q}) = {}  {}  {kind}  (density {}, nodes {})",
                d.size,
                fmt_set(&d.witness_set),
                fmt_sig(d.density()),
                d.nodes_explored
            ),
        )?;
    }
    Ok(0)
}

fn cmd_witness(
    q: u64,
    construction: ConstructionArg,
    eval: Option<u64>,
    export: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    positive(q)?;
    let (w, json): (WitnessFunction, String) = match construction {
        ConstructionArg::Family => {
            let w = build_family(q)?;
            let j = w.to_json();
            (w, j)
        }
        ConstructionArg::Gauss => {
            let w = build_gauss(q)?;
            let j = w.to_json();
            (w, j)
        }
        ConstructionArg::Trivial => {
            let w = build_trivial(q)?;
            let j = w.to_json();
            (w, j)
        }
        ConstructionArg::Optimal => {
            let (w, solution) = build_optimal_with_solution(q)?;
            (w, solution.to_json())
        }
    };
    if let Some(path) = export {
        write_file(path, &json)?;
    }
    match eval {
        Some(y) => emit(out, &fmt_sig(w.evaluate(y)?))?,
        None if export.is_none() => emit(out, &json)?,
        None => {}
    }
    Ok(0)
}

fn cmd_verify(qmax: u64, report: Option<&Path>, out: &mut dyn Write) -> CliResult<i32> {
    if qmax < 2 {
        return Err(CliError::Usage("verify needs qmax ≥ 2".into()));
    }
    let r = verify(qmax)?;
    for c in &r.claims {
        emit(
            out,
            &format!(
                "{}  {:<26} measured={} bound={} tol={}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.claim_id,
                fmt_sig(c.measured),
                fmt_sig(c.bound),
                fmt_sig(c.tolerance),
                c.description
            ),
        )?;
    }
    emit(out, &format!("summary: {}/{} claims passed", r.summary.passed, r.summary.total))?;
    if let Some(path) = report {
        write_file(path, &r.to_json())?;
    }
    Ok(if r.pass { 0 } else { 1 })
}

fn cmd_table(qmax: u64, path: Option<&Path>, format: TableFormat, out: &mut dyn Write) -> CliResult<i32> {
    if qmax < 2 {
        return Err(CliError::Usage("table needs --qmax ≥ 2".into()));
    }
    let rows = build_table(qmax, default_budget())?;
    let text = match format {
        TableFormat::Csv => to_csv(&rows),
        TableFormat::Json => to_json(&rows) + "\n",
    };
    match path {
        Some(p) => write_file(p, &text)?,
        None => write!(out, "{text}").map_err(|e| CliError::io("<stdout>", e))?,
    }
    Ok(0)
}

fn cmd_epsilon(check: bool, out: &mut dyn Write) -> CliResult<i32> {
    let eps = epsilon_constant();
    emit(out, &format!("epsilon = {}", fmt_digits(eps, 5)))?;
    emit(out, &format!("full precision: {eps:?}"))?;
    emit(out, "definition: ε = −log(1 − 2/(2 + cos(π/13) + sin(3π/26))) / (3·log 13)")?;
    if !check {
        return Ok(0);
    }
    let lp13 = lambda(13)?;
    let b0 = build_family(2197)?.b0();
    let checks = [
        ("13^(−3ε) = λ(13) from the LP", 13f64.powf(-3.0 * eps), lp13),
        ("2197^(−ε) = family b0 at 2197", 2197f64.powf(-eps), b0),
        ("λ(13) closed form = LP", lambda13_closed_form(), lp13),
    ];
    let mut ok = true;
    for (what, a, b) in checks {
        let pass = (a - b).abs() <= EPSILON_TOL;
        ok &= pass;
        let diff = (a - b).abs();
        emit(
            out,
            &format!("{}  {what}  |diff| = {}", if pass { "PASS" } else { "FAIL" }, fmt_sig(diff)),
        )?;
    }
    Ok(if ok { 0 } else { 1 })
}
