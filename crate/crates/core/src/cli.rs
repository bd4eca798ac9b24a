//! Command-line front end: verification suites, point evaluation, kernel checks
//! and fixture emission. Exit codes: 0 all checks passed, 1 a check failed,
//! 2 usage or domain error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::cauchy::{CrossScheme, DerivativeEngine};
use crate::error::{Error, Result};
use crate::fixtures::{format_17, Fixtures};
use crate::frobenius::{flat_coordinates, Kind, StructureKind};
use crate::kernels::DoubleCovering;
use crate::prepotential::{eval_f, eval_f_double_t_grouped, eval_g, GVariant};
use crate::specialfn::{carlson_rf, dedekind_eta, theta1, Modulus, SeriesConfig};
use crate::torus_cover::{covering_from_branch_points, BranchTriple};
use crate::wdvv::{
    flatness_report, g_tau_consistency, point_suite, rauch_report, realness_check, sample_points, tau_relation_check,
    unit_field_check, VerificationReport,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "hurwitz-frobenius", version, about = "Genus-one Hurwitz Frobenius manifolds: evaluation and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suite at seeded sample points.
    Verify(VerifyArgs),
    /// Evaluate F, G or flat coordinates at a point.
    Eval(EvalArgs),
    /// Finite-difference kernel checks at a branch triple.
    Kernels(KernelArgs),
    /// Write library values at the reference points as a fixture file.
    Fixtures(FixtureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    NestedCauchy,
    MixedCentral,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// holo-s, double-s, double-t, double-combo or all.
    #[arg(long, default_value = "all")]
    pub kind: String,
    #[arg(long, default_value = "1")]
    pub sigma: String,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the tolerance of every check.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
    /// Fixed Cauchy radius; default is min(0.05, half the singularity distance).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_enum, default_value = "nested-cauchy")]
    pub scheme: Scheme,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value = "1")]
    pub sigma: String,
    /// Comma-separated flat coordinates, e.g. "1,0,0.0+0.159154943i".
    #[arg(long)]
    pub point: Option<String>,
    /// Comma-separated branch points; evaluates at their coordinate image.
    #[arg(long)]
    pub branch: Option<String>,
    /// F, F-grouped, G, G-three-quarter or coords.
    #[arg(long, default_value = "F")]
    pub what: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, default_value = "1,0,-1")]
    pub branch: String,
    /// flatness, rauch, tau or rotation.
    #[arg(long, default_value = "flatness")]
    pub check: String,
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parse `a+bi`, `a`, `bi`, `-i` with optional spaces.
pub fn parse_complex(s: &str) -> Result<C64> {
    let err = |pos: usize, what: &str| Error::Usage(format!("malformed complex literal '{s}' at position {pos}: {what}"));
    let mut chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err(0, "empty"));
    }
    if let Some(&(pos, c)) = chars
        .iter()
        .find(|(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-' | 'i' | 'j')))
    {
        return Err(err(pos, &format!("unexpected character '{c}'")));
    }
    let imag = matches!(chars.last(), Some((_, 'i' | 'j')));
    if imag {
        chars.pop();
    }
    // split at the last sign that does not follow an exponent marker
    let mut split = None;
    for k in (1..chars.len()).rev() {
        let c = chars[k].1;
        if (c == '+' || c == '-') && !matches!(chars[k - 1].1, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let text = |range: &[(usize, char)]| range.iter().map(|(_, c)| *c).collect::<String>();
    let num = |range: &[(usize, char)], unit: bool| -> Result<f64> {
        let t = text(range);
        let pos = range.first().map_or(s.len(), |(p, _)| *p);
        match t.as_str() {
            "" | "+" if unit => Ok(1.0),
            "-" if unit => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| err(pos, &format!("'{t}' is not a number"))),
        }
    };
    match (imag, split) {
        (false, None) => Ok(C64::new(num(&chars, false)?, 0.0)),
        (false, Some(k)) => Err(err(chars[k].0, "second term lacks the imaginary unit")),
        (true, None) => Ok(C64::new(0.0, num(&chars, true)?)),
        (true, Some(k)) => Ok(C64::new(num(&chars[..k], false)?, num(&chars[k..], true)?)),
    }
}

/// Comma-separated list of complex literals.
pub fn parse_point(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(parse_complex).collect()
}

/// `a+bi` with 17 significant digits.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_17(z.re), sign, format_17(z.im.abs()))
}

fn parse_branch(s: &str) -> Result<BranchTriple> {
    let v = parse_point(s)?;
    if v.len() != 3 {
        return Err(Error::Usage(format!("expected 3 branch points, got {}", v.len())));
    }
    BranchTriple::new([v[0], v[1], v[2]])
}

fn parse_kinds(kind: &str, sigma: &str) -> Result<Vec<StructureKind>> {
    let sigma = parse_complex(sigma)?;
    if kind == "all" {
        return Ok(vec![
            StructureKind::holo_s(),
            StructureKind::double_s(),
            StructureKind::double_t(),
            StructureKind::double_combo(sigma)?,
        ]);
    }
    let k: Kind = kind.parse()?;
    Ok(vec![StructureKind::new(k, sigma)?])
}

/// JSON form of a report with residuals as 17-digit decimal strings.
pub fn report_json(r: &VerificationReport) -> Value {
    let strings = |m: &std::collections::BTreeMap<String, f64>| -> Value {
        Value::Object(m.iter().map(|(k, v)| (k.clone(), Value::String(format_17(*v)))).collect::<Map<_, _>>())
    };
    let point = match &r.point {
        crate::wdvv::CheckPoint::Flat(p) => json!({ "flat": p.t.iter().map(|z| format_complex(*z)).collect::<Vec<_>>() }),
        crate::wdvv::CheckPoint::Branch(b) => {
            json!({ "branch": b.lambda.iter().map(|z| format_complex(*z)).collect::<Vec<_>>() })
        }
    };
    json!({
        "check_name": r.check_name,
        "kind": r.kind.map(|k| k.kind.name()),
        "sigma": r.kind.map(|k| format_complex(k.sigma)),
        "point": point,
        "residuals": strings(&r.residuals),
        "info": strings(&r.info),
        "notes": r.notes,
        "tolerance": format_17(r.tolerance),
        "passed": r.passed,
        "engine_config": r.engine_config,
        "seed": r.seed,
    })
}

fn render(command: &str, config: Value, reports: &[VerificationReport], format: Format) -> String {
    let passed = reports.iter().filter(|r| r.passed).count();
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "config": config,
                "checks": reports.iter().map(report_json).collect::<Vec<_>>(),
                "summary": { "total": reports.len(), "passed": passed, "failed": reports.len() - passed },
            });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("check_name,kind,seed,residual,value,tolerance,passed\n");
            for r in reports {
                for (name, v) in &r.residuals {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        r.check_name,
                        r.kind.map_or("", |k| k.kind.name()),
                        r.seed,
                        name,
                        format_17(*v),
                        format_17(r.tolerance),
                        r.passed
                    );
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(
                    s,
                    "{:<8} {:<28} {:<13} max residual {:.3e} (tol {:.0e})",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.check_name,
                    r.kind.map_or("-", |k| k.kind.name()),
                    r.max_residual(),
                    r.tolerance
                );
            }
            let _ = writeln!(s, "{passed}/{} checks passed", reports.len());
            s
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn override_tolerance(reports: &mut [VerificationReport], tol: Option<f64>) {
    if let Some(t) = tol {
        for r in reports.iter_mut() {
            r.tolerance = t;
            r.passed = r.residuals.values().all(|v| *v <= t);
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<Vec<VerificationReport>> {
    if a.samples < 1 {
        return Err(Error::Usage("--samples must be at least 1".into()));
    }
    let eng = DerivativeEngine {
        radius: a.radius,
        nodes: a.nodes,
        cross_scheme: match a.scheme {
            Scheme::NestedCauchy => CrossScheme::NestedCauchy,
            Scheme::MixedCentral => CrossScheme::MixedCentral,
        },
        ..Default::default()
    };
    eng.validate()?;
    let mut reports = Vec::new();
    let fixtures = [BranchTriple::lemniscatic(), BranchTriple::equianharmonic()];
    for kind in parse_kinds(&a.kind, &a.sigma)? {
        for (idx, p) in sample_points(&kind, a.samples, a.seed)?.iter().enumerate() {
            reports.extend(point_suite(&kind, p, &eng, a.seed.wrapping_add(idx as u64))?);
        }
        for b in &fixtures {
            reports.push(unit_field_check(b, &kind, 1e-5)?);
            if matches!(kind.kind, Kind::DoubleS | Kind::DoubleT) {
                reports.push(realness_check(b, &kind, &fixtures[1 - fixtures.iter().position(|x| x == b).unwrap_or(0)])?);
            }
            reports.push(g_tau_consistency(b, &kind, GVariant::HalfPower, 1e-5)?);
        }
    }
    override_tolerance(&mut reports, a.tolerance);
    Ok(reports)
}

fn eval(a: &EvalArgs) -> Result<String> {
    let kind = parse_kinds(&a.kind, &a.sigma)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Usage("--kind all is not valid for eval".into()))?;
    if a.kind == "all" {
        return Err(Error::Usage("--kind all is not valid for eval".into()));
    }
    let t = match (&a.point, &a.branch) {
        (Some(p), None) => parse_point(p)?,
        (None, Some(b)) => flat_coordinates(&covering_from_branch_points(&parse_branch(b)?)?, &kind)?.t,
        _ => return Err(Error::Usage("give exactly one of --point or --branch".into())),
    };
    let values: Vec<(String, C64)> = match a.what.as_str() {
        "F" => vec![("F".into(), eval_f(&kind, &t)?)],
        "F-grouped" => {
            if kind.kind != Kind::DoubleT {
                return Err(Error::Usage("F-grouped is defined for double-t".into()));
            }
            vec![("F".into(), eval_f_double_t_grouped(&t)?)]
        }
        "G" => vec![("G".into(), eval_g(&kind, &t, GVariant::HalfPower)?)],
        "G-three-quarter" => vec![("G".into(), eval_g(&kind, &t, GVariant::ThreeQuarterPower)?)],
        "coords" => t.iter().enumerate().map(|(k, v)| (format!("t{}", k + 1), *v)).collect(),
        other => return Err(Error::Usage(format!("unknown --what '{other}'"))),
    };
    Ok(match a.out.format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "eval",
                "config": { "kind": kind.kind.name(), "what": a.what },
                "values": values.iter().map(|(n, v)| (n.clone(), json!({"re": format_17(v.re), "im": format_17(v.im)}))).collect::<Map<_, _>>(),
            });
            serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("name,re,im\n");
            for (n, v) in &values {
                let _ = writeln!(s, "{n},{},{}", format_17(v.re), format_17(v.im));
            }
            s
        }
        Format::Text => values.iter().map(|(n, v)| format!("{n} = {}\n", format_complex(*v))).collect(),
    })
}

fn kernels(a: &KernelArgs) -> Result<(Option<Vec<VerificationReport>>, String)> {
    let b = parse_branch(&a.branch)?;
    let mut reports = match a.check.as_str() {
        "flatness" => vec![flatness_report(&b, a.step)?],
        "rauch" => vec![rauch_report(&b, a.step)?],
        "tau" => vec![tau_relation_check(&b, a.step)?],
        "rotation" => {
            let rot = DoubleCovering::from_branch_points(&b)?.rotation()?;
            let mut s = String::new();
            for (i, row) in rot.beta.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if i != j {
                        let _ = writeln!(s, "beta[{i}][{j}] = {}", format_complex(*v));
                    }
                }
            }
            return Ok((None, s));
        }
        other => return Err(Error::Usage(format!("unknown --check '{other}'"))),
    };
    override_tolerance(&mut reports, a.tolerance);
    Ok((Some(reports), String::new()))
}

/// Library values at the reference points, keyed like the oracle fixtures.
pub fn library_fixtures() -> Result<Fixtures> {
    let cfg = SeriesConfig::default();
    let i = Modulus::new(C64::new(0.0, 1.0))?;
    let mut f = Fixtures::default();
    f.insert("T1P_I", theta1(C64::new(0.0, 0.0), i, 1, &cfg)?);
    f.insert("ETA_I", dedekind_eta(i, &cfg)?);
    let lemn = covering_from_branch_points(&BranchTriple::lemniscatic())?;
    f.insert("ETA1_LEMN", lemn.lattice.eta1);
    f.insert("OMEGA_LEMN", lemn.omega);
    f.insert("RF_012", carlson_rf(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0))?);
    let rot = DoubleCovering::from_covering(&lemn)?.rotation()?;
    f.insert("ROT_LEMN_01", rot.beta[0][1]);
    f.insert("F_S_PT1", eval_f(&StructureKind::double_s(), &reference_point_s())?);
    Ok(f)
}

/// The generic complex 6-point used for the `F_S_PT1` fixture.
pub fn reference_point_s() -> Vec<C64> {
    vec![
        C64::new(0.3, 0.1),
        C64::new(0.8, -0.2),
        C64::new(0.094, 0.01),
        C64::new(0.4, -0.3),
        C64::new(0.7, 0.25),
        C64::new(0.022, -0.08),
    ]
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Verify(a) => {
            let reports = verify(a)?;
            let config = json!({
                "kind": a.kind, "sigma": a.sigma, "samples": a.samples, "seed": a.seed,
                "tolerance": a.tolerance.map(format_17), "nodes": a.nodes,
                "radius": a.radius.map(format_17), "scheme": format!("{:?}", a.scheme),
            });
            emit(&render("verify", config, &reports, a.out.format), &a.out.output)?;
            Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Eval(a) => {
            emit(&eval(a)?, &a.out.output)?;
            Ok(0)
        }
        Command::Kernels(a) => {
            let (reports, text) = kernels(a)?;
            match reports {
                Some(reports) => {
                    let config = json!({ "branch": a.branch, "check": a.check, "step": format_17(a.step) });
                    emit(&render("kernels", config, &reports, a.out.format), &a.out.output)?;
                    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
                }
                None => {
                    emit(&text, &a.out.output)?;
                    Ok(0)
                }
            }
        }
        Command::Fixtures(a) => {
            emit(&(library_fixtures()?.to_json() + "\n"), &a.output)?;
            Ok(0)
        }
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
