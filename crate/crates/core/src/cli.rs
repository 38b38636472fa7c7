//! Command-line front end: `solve`, `eval` and `verify` over JSON problem
//! files.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 no representative
//! (`solve`), 3 degenerate estimator denominator (`eval`), 4 the supplied
//! pair is not a weak interpolation (`verify`).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::field::{Scalar, ZeroTest};
use crate::fitzpatrick::{pick_representative, solve, verify_weak, Pick};
use crate::neville::{NevilleState, WRow, ZeroSign};
use crate::pairmod::PairElement;
use crate::poly::Poly;
use crate::problem::{AnyProblem, Problem, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_REPRESENTATIVE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NOT_WEAK: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ratinterp",
    version,
    about = "Multivariate osculatory rational interpolation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the minimal Gröbner basis of all weak interpolations.
    Solve(CommonArgs),
    /// Evaluate the interpolant of value-only data at one point.
    Eval(EvalArgs),
    /// Check whether a pair (a, b) is a weak interpolation.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroSignArg {
    Plus,
    Minus,
}

impl From<ZeroSignArg> for ZeroSign {
    fn from(z: ZeroSignArg) -> Self {
        match z {
            ZeroSignArg::Plus => ZeroSign::Plus,
            ZeroSignArg::Minus => ZeroSign::Minus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Problem file (JSON).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Degree shift of the module order; overrides the file.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Rescale each displayed pair to leading coefficient 1.
    #[arg(long)]
    pub monic: bool,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Variables from least to most significant, e.g. `y,x` for y < x.
    #[arg(long, value_delimiter = ',')]
    pub varorder: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Query point, comma separated; overrides `evaluate_at` in the file.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Weight of rows with b(Y_0) = 0 in the sign-weighted estimator.
    #[arg(long, value_enum, default_value_t = ZeroSignArg::Plus)]
    pub zero_sign: ZeroSignArg,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Numerator, e.g. `3*x^2 + -1/2*y`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Denominator.
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Formats `x` with `digits` significant digits, positional unless the
/// magnitude is extreme.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let (_, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sig10<S: Scalar>(s: &S) -> String {
    fmt_sig(s.to_f64(), 10)
}

/// Parses the command line and runs it; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    run(&cli, out, err)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn load(common: &CommonArgs) -> Result<AnyProblem, CliError> {
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(CliError::input)?;
    AnyProblem::from_file(&file).map_err(CliError::input)
}

fn zero_test(common: &CommonArgs) -> Result<ZeroTest, CliError> {
    let d = ZeroTest::default();
    let abs = common.abs_tol.unwrap_or(d.absolute_tol);
    let rel = common.rel_tol.unwrap_or(d.relative_tol);
    if !(abs >= 0.0 && rel >= 0.0 && abs.is_finite() && rel.is_finite()) {
        return Err(CliError::Input(
            "tolerances must be finite and nonnegative".to_string(),
        ));
    }
    Ok(ZeroTest::new(abs, rel))
}

fn apply_overrides<S: Scalar>(
    mut p: Problem<S>,
    common: &CommonArgs,
) -> Result<Problem<S>, CliError> {
    if let Some(xi) = common.xi {
        p = p.with_xi(xi);
    }
    if let Some(names) = &common.varorder {
        let vo = p.resolve_varorder(names).map_err(CliError::input)?;
        p = p.with_varorder(vo);
    }
    Ok(p)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve(c) => {
            let zt = zero_test(c)?;
            match load(c)? {
                AnyProblem::Exact(p) => cmd_solve(apply_overrides(p, c)?, c, &zt, out, err),
                AnyProblem::Float(p) => cmd_solve(apply_overrides(p, c)?, c, &zt, out, err),
            }
        }
        Command::Eval(e) => {
            let c = &e.common;
            let zt = zero_test(c)?;
            match load(c)? {
                AnyProblem::Exact(p) => cmd_eval(apply_overrides(p, c)?, e, &zt, out, err),
                AnyProblem::Float(p) => cmd_eval(apply_overrides(p, c)?, e, &zt, out, err),
            }
        }
        Command::Verify(v) => {
            let c = &v.common;
            let zt = zero_test(c)?;
            match load(c)? {
                AnyProblem::Exact(p) => cmd_verify(apply_overrides(p, c)?, v, &zt, out),
                AnyProblem::Float(p) => cmd_verify(apply_overrides(p, c)?, v, &zt, out),
            }
        }
    }
}

fn display_pair<S: Scalar>(e: &PairElement<S>, p: &Problem<S>, monic: bool) -> PairElement<S> {
    if !monic {
        return e.clone();
    }
    match e.leading(p.order()) {
        Ok((_, lc)) => e.scale(&(S::one() / lc)),
        Err(_) => e.clone(),
    }
}

#[derive(Serialize)]
struct ElementOut {
    lt: String,
    a: String,
    b: String,
}

fn element_out<S: Scalar>(e: &PairElement<S>, p: &Problem<S>) -> ElementOut {
    let names = p.varnames();
    let vo = &p.order().varorder;
    let lt = e
        .leading(p.order())
        .map(|(t, _)| t.render(names))
        .unwrap_or_else(|_| "0".to_string());
    ElementOut {
        lt,
        a: e.a.render(names, vo),
        b: e.b.render(names, vo),
    }
}

fn order_label<S: Scalar>(p: &Problem<S>) -> String {
    let names: Vec<&str> = p
        .order()
        .varorder
        .iter()
        .map(|&i| p.varnames()[i].as_str())
        .collect();
    names.join(" < ")
}

fn pick_label(pick: Pick) -> String {
    match pick {
        Pick::Single(i) => format!("g_{}", i + 1),
        Pick::Sum(i, j) => format!("g_{} + g_{}", i + 1, j + 1),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_solve<S: Scalar>(
    p: Problem<S>,
    c: &CommonArgs,
    zt: &ZeroTest,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let st = solve(&p, zt).map_err(CliError::input)?;
    for w in st.warnings() {
        writeln!(err, "warning: {w}")?;
    }
    let y0 = p.evaluate_at();
    let rep = pick_representative(&st, &p, y0, zt);
    let elements: Vec<ElementOut> = st
        .basis()
        .iter()
        .map(|e| element_out(&display_pair(e, &p, c.monic), &p))
        .collect();
    let family = st.family_statement(p.varnames());
    let rep_out = rep.as_ref().ok().map(|r| {
        (
            pick_label(r.pick),
            element_out(&display_pair(&r.pair, &p, c.monic), &p),
        )
    });

    match c.format {
        Format::Text => {
            let mut s = String::new();
            writeln!(
                s,
                "basis: {} elements, xi = {}, {}",
                elements.len(),
                p.order().xi,
                order_label(&p)
            )
            .unwrap();
            for (j, e) in elements.iter().enumerate() {
                writeln!(s, "g_{}  LT {}", j + 1, e.lt).unwrap();
                writeln!(s, "  a_{} = {}", j + 1, e.a).unwrap();
                writeln!(s, "  b_{} = {}", j + 1, e.b).unwrap();
            }
            writeln!(s, "family: {family}").unwrap();
            match &rep_out {
                Some((label, e)) => {
                    writeln!(s, "representative: {label}").unwrap();
                    writeln!(s, "  a = {}", e.a).unwrap();
                    writeln!(s, "  b = {}", e.b).unwrap();
                }
                None => writeln!(s, "representative: none").unwrap(),
            }
            out.write_all(s.as_bytes())?;
        }
        Format::Json => {
            let doc = json!({
                "problem": p.to_file(),
                "basis": elements,
                "family": family,
                "representative": rep_out.as_ref().map(|(label, e)| json!({
                    "pick": label,
                    "a": e.a,
                    "b": e.b,
                })),
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            )?;
        }
        Format::Csv => {
            let mut s = String::from("index,lt,a,b\n");
            for (j, e) in elements.iter().enumerate() {
                writeln!(
                    s,
                    "{},{},{},{}",
                    j + 1,
                    csv_field(&e.lt),
                    csv_field(&e.a),
                    csv_field(&e.b)
                )
                .unwrap();
            }
            out.write_all(s.as_bytes())?;
        }
    }
    if let Err(e) = rep {
        writeln!(err, "{e}")?;
        return Ok(EXIT_NO_REPRESENTATIVE);
    }
    Ok(EXIT_OK)
}

fn parse_point<S: Scalar>(text: &str, n: usize) -> Result<Vec<S>, CliError> {
    let coords = text
        .split(',')
        .map(|t| S::parse_literal(t.trim()).map_err(|e| CliError::Input(format!("--at: {e}"))))
        .collect::<Result<Vec<S>, _>>()?;
    if coords.len() != n {
        return Err(CliError::Input(format!(
            "--at: expected {n} coordinates, found {}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn point_label<S: Scalar>(pt: &[S]) -> String {
    let parts: Vec<String> = pt.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn cmd_eval<S: Scalar>(
    p: Problem<S>,
    e: &EvalArgs,
    zt: &ZeroTest,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let c = &e.common;
    if !p.is_cauchy() {
        return Err(CliError::Input(
            "eval needs value-only data (every node with alpha = 0 only); use solve".to_string(),
        ));
    }
    let y0: Vec<S> = match (&e.at, p.evaluate_at()) {
        (Some(text), _) => parse_point(text, p.nvars())?,
        (None, Some(y)) => y.to_vec(),
        (None, None) => {
            return Err(CliError::Input(
                "no evaluation point: give --at or evaluate_at in the file".to_string(),
            ))
        }
    };
    let p = p.with_evaluate_at(y0.clone()).map_err(CliError::input)?;
    let points: Vec<Vec<S>> = p.nodes().iter().map(|n| n.point.clone()).collect();
    let values: Vec<S> = p
        .nodes()
        .iter()
        .map(|n| n.value().expect("simple node").clone())
        .collect();
    let mut st = NevilleState::init(points.clone(), values.clone(), y0, p.order().clone(), *zt)
        .map_err(CliError::input)?
        .with_zero_sign(e.zero_sign.into());
    let mut estimates: Vec<Option<S>> = Vec::with_capacity(points.len());
    for _ in 0..points.len() {
        st.step().map_err(CliError::input)?;
        estimates.push(st.estimate().ok().map(|est| est.value));
    }
    for w in st.warnings() {
        writeln!(err, "warning: {w}")?;
    }
    let final_value = estimates.last().cloned().flatten();
    let undefined = "undefined".to_string();
    let est_label = |v: &Option<S>| v.as_ref().map(sig10).unwrap_or_else(|| undefined.clone());
    let rows = st.rows();

    match c.format {
        Format::Text => {
            let labels: Vec<String> = points.iter().map(|pt| point_label(pt)).collect();
            let pw = labels.iter().map(String::len).max().unwrap_or(0).max(5);
            let mut s = String::new();
            writeln!(
                s,
                "{:>3}  {:<pw$}  {:>16}  {:>16}",
                "i", "point", "value", "estimate"
            )
            .unwrap();
            for (k, label) in labels.iter().enumerate() {
                writeln!(
                    s,
                    "{:>3}  {:<pw$}  {:>16}  {:>16}",
                    k + 1,
                    label,
                    sig10(&values[k]),
                    est_label(&estimates[k])
                )
                .unwrap();
            }
            writeln!(s, "rows at {}:", point_label(st.y0())).unwrap();
            for r in rows {
                writeln!(s, "  {}", row_text(r, &p)).unwrap();
            }
            writeln!(s, "{}", est_label(&final_value)).unwrap();
            out.write_all(s.as_bytes())?;
        }
        Format::Csv => {
            let mut s = String::from("i,point,value,estimate\n");
            for (k, pt) in points.iter().enumerate() {
                writeln!(
                    s,
                    "{},{},{},{}",
                    k + 1,
                    csv_field(&point_label(pt)),
                    values[k],
                    estimates[k]
                        .as_ref()
                        .map(|v| v.to_string())
                        .unwrap_or_default()
                )
                .unwrap();
            }
            out.write_all(s.as_bytes())?;
        }
        Format::Json => {
            let steps: Vec<_> = points
                .iter()
                .enumerate()
                .map(|(k, pt)| {
                    json!({
                        "i": k + 1,
                        "point": pt.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "value": values[k].to_string(),
                        "estimate": estimates[k].as_ref().map(|v| v.to_string()),
                    })
                })
                .collect();
            let rows_json: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "lt": r.lt.render(p.varnames()),
                        "a": r.eval.0.to_string(),
                        "b": r.eval.1.to_string(),
                    })
                })
                .collect();
            let doc = json!({
                "problem": p.to_file(),
                "steps": steps,
                "rows": rows_json,
                "value": final_value.as_ref().map(|v| v.to_string()),
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            )?;
        }
    }
    if final_value.is_none() {
        writeln!(err, "the sign-weighted denominator vanishes")?;
        return Ok(EXIT_DEGENERATE);
    }
    Ok(EXIT_OK)
}

fn row_text<S: Scalar>(r: &WRow<S>, p: &Problem<S>) -> String {
    let ratio = if r.eval.1.is_zero() {
        "-".to_string()
    } else {
        sig10(&(r.eval.0.clone() / r.eval.1.clone()))
    };
    format!(
        "{:<14} a = {:>17}  b = {:>17}  a/b = {}",
        r.lt.render(p.varnames()),
        sig10(&r.eval.0),
        sig10(&r.eval.1),
        ratio
    )
}

fn cmd_verify<S: Scalar>(
    p: Problem<S>,
    v: &VerifyArgs,
    zt: &ZeroTest,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let names = p.varnames();
    let a = Poly::<S>::parse(&v.a, names).map_err(|e| CliError::Input(format!("--a: {e}")))?;
    let b = Poly::<S>::parse(&v.b, names).map_err(|e| CliError::Input(format!("--b: {e}")))?;
    let weak = verify_weak(&PairElement::new(a, b), &p, zt);
    match v.common.format {
        Format::Json => writeln!(out, "{}", json!({ "weak": weak }))?,
        Format::Text | Format::Csv => writeln!(out, "{weak}")?,
    }
    Ok(if weak { EXIT_OK } else { EXIT_NOT_WEAK })
}
