//! Command-line front end. `run` parses argv, executes one subcommand,
//! writes the report (atomically) when `--out` is given and prints a
//! one-line summary.
//!
//! Exit codes: 0 success/pass, 1 verdict fail or failed computation,
//! 2 usage error, 3 size cap or other resource error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use convexgrowth::angles::{angle_growth_report, angle_reduction_check};
use convexgrowth::func::{delta, parse, Interval};
use convexgrowth::growth::{self, FamilyKind, GrowthReport, TheoremId, TheoremRequest, Verdict, SCHEMA_VERSION};
use convexgrowth::independence::{is_k_independent, Evidence, FunctionFamily, DEFAULT_SAMPLES};
use convexgrowth::scalar::{self, format_float, Scalar};
use convexgrowth::squeeze::{squeeze_iterated, WitnessedElement};
use convexgrowth::sumset::{sumset, SignedSumSpec, DEFAULT_SIZE_CAP};
use convexgrowth::{concavity_order, convexity_order, Error, FiniteSet};

pub const SIZE_CAP_ENV: &str = "CONVEXGROWTH_SIZE_CAP";
const MIN_SIZE_CAP: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "convexgrowth", version, about = "Sumset growth experiments for convex sets and function images")]
struct Cli {
    /// MPFR precision in bits (>= 64).
    #[arg(long, global = true, default_value_t = scalar::DEFAULT_PRECISION)]
    precision: u32,
    /// Merge tolerance for float sets (default 2^(-precision/2)).
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Size cap: pairs per merge step, or bitset span; also read from CONVEXGROWTH_SIZE_CAP.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Report destination.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; csv is available for growth reports only.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Signed sumset sA - tB.
    Sumset(SumsetArgs),
    /// Convexity and concavity order of a set.
    Convexity(ConvexityArgs),
    /// Linear independence of the k-th derivatives of a family.
    Independence(IndependenceArgs),
    /// Witnessed squeezing elements.
    Squeeze(SqueezeArgs),
    /// Growth-exponent checks.
    Growth {
        #[command(subcommand)]
        command: GrowthCommand,
    },
    /// Pinned angles of A × A.
    Angles(AnglesArgs),
    /// The exponent sequences.
    Sequences(SequencesArgs),
}

#[derive(Args, Debug)]
struct SetInput {
    /// Set file: one number per line, `#` comments; `-` reads stdin.
    #[arg(long = "set")]
    set: PathBuf,
    /// Read decimal literals as exact rationals instead of switching to floats.
    #[arg(long)]
    exact_decimals: bool,
}

#[derive(Args, Debug)]
struct SumsetArgs {
    #[command(flatten)]
    input: SetInput,
    /// Second operand B (defaults to A).
    #[arg(long)]
    with: Option<PathBuf>,
    /// `s,t` for sA - tB.
    #[arg(long)]
    spec: String,
    /// Include the elements in the report.
    #[arg(long)]
    elements: bool,
}

#[derive(Args, Debug)]
struct ConvexityArgs {
    #[command(flatten)]
    input: SetInput,
    #[arg(long, default_value_t = 64)]
    k_max: usize,
}

#[derive(Args, Debug)]
struct IndependenceArgs {
    /// Family member; repeat for each function.
    #[arg(long = "fn", required = true)]
    functions: Vec<String>,
    #[arg(short, long, default_value_t = 1)]
    k: usize,
    /// `a,b`
    #[arg(long)]
    interval: String,
    /// Replace the family by Δ_d f for these comma-separated shifts of the first function.
    #[arg(long)]
    shifts: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Args, Debug)]
struct SqueezeArgs {
    #[command(flatten)]
    input: SetInput,
    #[arg(short, long, default_value_t = 1)]
    k: u32,
    /// Squeeze f(A) instead of A.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Witness list destination.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GrowthCommand {
    /// Fit the exponent of one inequality across sizes.
    Verify(VerifyArgs),
    /// A = [N], f = x^(k+1): the fitted exponent should not exceed k+1.
    Sharpness(SharpnessArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    theorem: String,
    #[arg(short, long, default_value_t = 1)]
    k: u32,
    #[arg(short, long, default_value_t = 1)]
    n: u32,
    #[arg(long = "fn")]
    functions: Vec<String>,
    /// ap, geometric, power:E, perturbed_convex, random, random_convex:K
    #[arg(long)]
    family: String,
    /// Comma-separated, strictly increasing.
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = growth::DEFAULT_SLACK)]
    slack: f64,
    /// Also write plot data here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SharpnessArgs {
    #[arg(short, long, default_value_t = 1)]
    k: u32,
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnglesArgs {
    #[command(flatten)]
    input: SetInput,
    #[arg(long, default_value = "1,1")]
    spec: String,
    /// Also run the arctan(exp(x)) reduction check (needs A ⊂ (0, 1]).
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct SequencesArgs {
    #[arg(long)]
    phi: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = writeln!(err, "{}", json!({"error": {"code": "usage", "message": rendered.trim_end()}}));
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", json!({"error": {"code": e.code(), "message": e.to_string()}}));
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_resource() => 3,
        Error::InvalidSpec { .. }
        | Error::InvalidInput(_)
        | Error::Syntax { .. }
        | Error::UnknownFunction { .. }
        | Error::BadInterval { .. } => 2,
        _ => 1,
    }
}

struct Ctx {
    precision: u32,
    tolerance: convexgrowth::rug::Float,
    cap: u64,
}

fn context(cli: &Cli) -> Result<Ctx, Error> {
    scalar::check_precision(cli.precision).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let tolerance = match &cli.tol {
        Some(t) => scalar::parse_float(t, cli.precision)?,
        None => scalar::default_tolerance(cli.precision),
    };
    let cap = match cli.cap {
        Some(c) => c,
        None => match std::env::var(SIZE_CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("{SIZE_CAP_ENV} is not an integer: `{v}`")))?,
            Err(_) => DEFAULT_SIZE_CAP,
        },
    };
    if cap < MIN_SIZE_CAP {
        return Err(Error::InvalidInput(format!("size cap must be at least {MIN_SIZE_CAP}, got {cap}")));
    }
    Ok(Ctx { precision: cli.precision, tolerance, cap })
}

fn read_set(path: &Path, exact_decimals: bool, ctx: &Ctx) -> Result<FiniteSet, Error> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
    };
    FiniteSet::parse_set_text(&text, exact_decimals, ctx.precision, ctx.tolerance.clone()).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn mode_value(a: &FiniteSet) -> Value {
    match (a.precision(), a.tolerance()) {
        (Some(p), Some(t)) => json!({"kind": "float", "precision": p, "tolerance": format_float(t)}),
        _ => json!({"kind": "exact"}),
    }
}

fn set_value(a: &FiniteSet) -> Value {
    Value::Array(a.scalars().iter().map(|s| Value::String(s.to_string())).collect())
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res.map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn report(command: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn emit_json(cli: &Cli, value: &Value) -> Result<(), Error> {
    if cli.format == "csv" {
        return Err(Error::InvalidInput("csv output is only available for growth reports".into()));
    }
    if let Some(path) = &cli.out {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        write_atomic(path, text.as_bytes())?;
    }
    Ok(())
}

/// CSV plot data for a growth report; warns on stderr when it has no rows.
pub fn emit_plot_data(report: &GrowthReport, path: &Path, err: &mut dyn Write) -> Result<(), Error> {
    if report.records.is_empty() {
        let _ = writeln!(err, "warning: report has no records; writing header only");
    }
    write_atomic(path, report.to_csv().as_bytes())
}

fn parse_spec(s: &str) -> Result<SignedSumSpec, Error> {
    s.parse::<SignedSumSpec>()
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad size `{p}`"))))
        .collect()
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Sumset(args) => {
            let spec = parse_spec(&args.spec)?;
            let a = read_set(&args.input.set, args.input.exact_decimals, &ctx)?;
            let b = match &args.with {
                Some(p) => read_set(p, args.input.exact_decimals, &ctx)?,
                None => a.clone(),
            };
            let s = sumset(&a, &b, spec, ctx.cap)?;
            let mut body = json!({
                "spec": spec.to_string(),
                "size_a": a.len(),
                "size_b": b.len(),
                "cardinality": s.len(),
                "mode": mode_value(&s),
            });
            if args.elements {
                body["elements"] = set_value(&s);
            }
            emit_json(cli, &report("sumset", body))?;
            writeln!(out, "cardinality {}", s.len())?;
        }
        Command::Convexity(args) => {
            let a = read_set(&args.input.set, args.input.exact_decimals, &ctx)?;
            let order = convexity_order(&a, args.k_max);
            let concave = concavity_order(&a, args.k_max);
            let body =
                json!({"size": a.len(), "convexity_order": order, "concavity_order": concave, "k_max": args.k_max});
            emit_json(cli, &report("convexity", body))?;
            writeln!(out, "convexity order {order}, concavity order {concave}")?;
        }
        Command::Independence(args) => {
            let interval = Interval::parse(&args.interval)?;
            let mut members = args.functions.iter().map(|f| parse(f)).collect::<Result<Vec<_>, _>>()?;
            if let Some(shifts) = &args.shifts {
                let base = members[0].clone();
                members = shifts
                    .split(',')
                    .map(|d| delta(&base, &Scalar::Exact(scalar::parse_rational(d)?)))
                    .collect::<Result<_, _>>()?;
            }
            let family = FunctionFamily::new(members, interval)?;
            let v = is_k_independent(&family, args.k, args.samples, ctx.precision)?;
            let mut body = json!({
                "k": args.k,
                "functions": family.members.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "interval": family.interval.to_string(),
                "independent": v.independent,
                "method": v.method.as_str(),
                "samples_used": v.samples_used,
                "witness_x": Value::Null,
                "wronskian_abs": Value::Null,
            });
            match &v.evidence {
                Evidence::Witness { x, wronskian_abs } => {
                    body["witness_x"] = json!(format_float(x));
                    body["wronskian_abs"] = json!(format_float(wronskian_abs));
                }
                Evidence::Combination { coefficients, residual } => {
                    body["coefficients"] = json!(coefficients.iter().map(format_float).collect::<Vec<_>>());
                    body["residual"] = json!(format_float(residual));
                }
                Evidence::Rank { rank, size } => {
                    body["rank"] = json!(rank);
                    body["size"] = json!(size);
                }
            }
            emit_json(cli, &report("independence", body))?;
            let word = if v.independent { "independent" } else { "dependent" };
            writeln!(out, "{word} ({})", v.method.as_str())?;
        }
        Command::Squeeze(args) => {
            let mut a = read_set(&args.input.set, args.input.exact_decimals, &ctx)?;
            if let Some(f) = &args.function {
                a = convexgrowth::func::image(&parse(f)?, &a, ctx.precision)?;
            }
            let (count, witnesses) = squeeze_iterated(&a, args.k, ctx.cap)?;
            let body = json!({
                "k": args.k,
                "size": a.len(),
                "count": count,
                "witnesses": witnesses.iter().map(witness_value).collect::<Vec<_>>(),
            });
            let value = report("squeeze", body);
            if let Some(p) = &args.emit {
                let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
                text.push('\n');
                write_atomic(p, text.as_bytes())?;
            }
            emit_json(cli, &value)?;
            writeln!(out, "{count} witnessed elements")?;
        }
        Command::Growth { command } => {
            let (rep, csv) = match command {
                GrowthCommand::Verify(v) => {
                    let theorem: TheoremId = v.theorem.parse()?;
                    let mut family: FamilyKind = v.family.parse()?;
                    if let Some(s) = v.seed {
                        match &mut family {
                            FamilyKind::PerturbedConvex { seed }
                            | FamilyKind::Random { seed }
                            | FamilyKind::RandomConvex { seed, .. } => *seed = s,
                            _ => {}
                        }
                    }
                    let mut req = TheoremRequest::new(theorem, family, parse_sizes(&v.sizes)?);
                    req.k = v.k;
                    req.n = v.n;
                    req.functions = v.functions.iter().map(|f| parse(f)).collect::<Result<_, _>>()?;
                    req.slack = v.slack;
                    req.cap = ctx.cap;
                    req.precision = ctx.precision;
                    (growth::verify_theorem(&req)?, v.csv.clone())
                }
                GrowthCommand::Sharpness(s) => {
                    (growth::sharpness(s.k, &parse_sizes(&s.sizes)?, ctx.cap)?, s.csv.clone())
                }
            };
            if let Some(p) = &csv {
                emit_plot_data(&rep, p, err)?;
            }
            if let Some(path) = &cli.out {
                if cli.format == "csv" {
                    emit_plot_data(&rep, path, err)?;
                } else {
                    let mut v = serde_json::to_value(&rep).map_err(|e| Error::Io(e.to_string()))?;
                    v["command"] = json!("growth");
                    let mut text = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
                    text.push('\n');
                    write_atomic(path, text.as_bytes())?;
                }
            }
            let verdict = match rep.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Inconclusive => "inconclusive",
            };
            writeln!(
                out,
                "{}: fitted {:.4}, target {:.4}, slack {}: {verdict}",
                rep.theorem, rep.fitted, rep.target, rep.slack
            )?;
            return Ok(if rep.verdict == Verdict::Fail { 1 } else { 0 });
        }
        Command::Angles(args) => {
            let spec = parse_spec(&args.spec)?;
            let a = read_set(&args.input.set, args.input.exact_decimals, &ctx)?;
            let rec = angle_growth_report(&a, spec, ctx.precision, &ctx.tolerance, ctx.cap)?;
            let mut body = serde_json::to_value(&rec).map_err(|e| Error::Io(e.to_string()))?;
            let reduction =
                if args.check { Some(angle_reduction_check(&a, ctx.precision, &ctx.tolerance)?) } else { None };
            body["reduction_check"] = json!(reduction);
            emit_json(cli, &report("angles", body))?;
            writeln!(out, "{} angles, |{}-sumset| = {}", rec.angle_count, rec.spec, rec.count)?;
            if reduction == Some(false) {
                return Ok(1);
            }
        }
        Command::Sequences(args) => {
            if args.phi.is_none() && args.p.is_none() && args.q.is_none() {
                return Err(Error::InvalidInput("give at least one of --phi, --p, --q".into()));
            }
            let mut body = Map::new();
            if let Some(n) = args.phi {
                let v = scalar::format_rational(&growth::phi(n)?);
                writeln!(out, "{v}")?;
                body.insert("phi".into(), json!({"n": n, "value": v}));
            }
            if let Some(j) = args.p {
                let v = growth::p_seq(j).to_string();
                writeln!(out, "{v}")?;
                body.insert("p".into(), json!({"n": j, "value": v}));
            }
            if let Some(k) = args.q {
                let v = growth::q_seq(k).to_string();
                writeln!(out, "{v}")?;
                body.insert("q".into(), json!({"n": k, "value": v}));
            }
            emit_json(cli, &report("sequences", Value::Object(body)))?;
        }
    }
    Ok(0)
}

fn witness_value(w: &WitnessedElement) -> Value {
    json!({
        "value": w.value.to_string(),
        "witness": w.witness.iter().map(|(g, s)| json!({"generator": g.to_string(), "sign": s})).collect::<Vec<_>>(),
        "tag": w.tag,
        "interval": {"lower": w.lower.to_string(), "upper": w.upper.to_string(), "upper_closed": w.upper_closed},
    })
}
