//! `symtorus`: evaluate theta functions and run the verification suites.

mod parse;
mod suites;

/// `println!` that stops quietly when stdout is closed.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use symtorus::algebra::quantum_theta_support;
use symtorus::fock::{default_order, ResidualReport};
use symtorus::siegel::CVector;
use symtorus::symplectic::{is_abelian, is_closed, stabilizer_search};
use symtorus::theta::{invariant_theta_sum, modular_ratio, theta_sum};
use symtorus::{algebra, Error, SiegelPoint, TruncationParams};

use suites::{Context, Suite};

#[derive(Parser)]
#[command(name = "symtorus", version, about = "Theta functions and quantum tori under Sp(2n, Z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical theta function theta(z, T).
    Theta {
        /// Complex entries as re,im pairs; zero when omitted.
        #[arg(long)]
        z: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The Sp(2n, Z)-invariant theta function at a real coordinate.
    InvariantTheta {
        /// x1 followed by x2, comma separated.
        #[arg(long)]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// The eighth root of unity in the modular transformation law.
    ModularRatio {
        /// Integer rows of a symplectic matrix.
        #[arg(long)]
        g: String,
        /// Complex entries as re,im pairs; 0.1+0.05i in each entry when omitted.
        #[arg(long)]
        z: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Coefficients of the quantum theta element.
    Qtheta {
        #[command(flatten)]
        common: Common,
    },
    /// Run an invariant suite and report one residual per check.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stab: StabilizerArgs,
    },
    /// Search the stabilizer of T by words in the standard generators.
    Stabilizer {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stab: StabilizerArgs,
    },
}

#[derive(Args)]
struct Common {
    /// Genus; inferred from T when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Period matrix as JSON rows of [re, im] pairs; defaults to i times the identity.
    #[arg(long = "T", value_name = "JSON")]
    t: Option<String>,
    /// Fixed truncation radius; fitted to the tail tolerance when omitted.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, env = "SYMTORUS_TAIL_TOL", default_value_t = 1e-14)]
    tail_tol: f64,
    /// Gauss-Hermite points per axis.
    #[arg(long)]
    order: Option<usize>,
    /// Overrides the tolerance of every residual check.
    #[arg(long, env = "SYMTORUS_TOL")]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct StabilizerArgs {
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    #[arg(long, env = "SYMTORUS_STAB_TOL", default_value_t = symtorus::symplectic::DEFAULT_STABILIZER_TOL)]
    stab_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

enum Failure {
    Validation(String),
    Numeric(String),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncation { .. }
            | Error::NearZero(_)
            | Error::Singular(_)
            | Error::Overflow
            | Error::NotInStabilizer(_)
            | Error::NotClosed => Failure::Numeric(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

struct Job {
    n: usize,
    t: SiegelPoint,
    trunc: TruncationParams,
    order: usize,
    tol: Option<f64>,
    seed: u64,
    format: Format,
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{name} must be positive, got {v}")))
    }
}

impl Job {
    fn new(c: &Common) -> Result<Self, Failure> {
        let t = match &c.t {
            Some(text) => Some(parse::siegel(text)?),
            None => None,
        };
        let n = match (c.n, &t) {
            (Some(n), Some(t)) if n != t.dim() => {
                return Err(Failure::Validation(format!("--n {n} does not match T of size {}", t.dim())))
            }
            (Some(n), _) => n,
            (None, Some(t)) => t.dim(),
            (None, None) => 1,
        };
        if n == 0 {
            return Err(Failure::Validation("--n must be at least 1".into()));
        }
        positive("--tail-tol", c.tail_tol)?;
        if let Some(r) = c.radius {
            positive("--radius", r)?;
        }
        if let Some(tol) = c.tol {
            positive("--tol", tol)?;
        }
        let order = c.order.unwrap_or_else(|| default_order(n));
        if order == 0 {
            return Err(Failure::Validation("--order must be at least 1".into()));
        }
        Ok(Self {
            n,
            t: t.unwrap_or_else(|| SiegelPoint::i_identity(n)),
            trunc: TruncationParams { radius: c.radius, tail_tolerance: c.tail_tol },
            order,
            tol: c.tol,
            seed: c.seed,
            format: c.format,
        })
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) | Value::Null => v.to_string(),
        _ => format!("\"{}\"", v.to_string().replace('"', "\"\"")),
    }
}

/// Prints a flat JSON object in the requested format.
fn emit(format: Format, record: &Value, elapsed: f64) {
    let Value::Object(map) = record else { unreachable!("records are objects") };
    match format {
        Format::Json => out!("{record}"),
        Format::Csv => {
            out!("{}", map.keys().cloned().collect::<Vec<_>>().join(","));
            out!("{}", map.values().map(csv_field).collect::<Vec<_>>().join(","));
        }
        Format::Human => {
            for (k, v) in map {
                out!("{k:>14}: {v}");
            }
            out!("{:>14}: {elapsed:.3}s", "elapsed");
        }
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn z_or(job: &Job, z: &Option<String>, fill: Complex64) -> Result<CVector, Failure> {
    Ok(match z {
        Some(text) => parse::complex_vector(text, job.n)?,
        None => CVector::from_element(job.n, fill),
    })
}

fn cmd_theta(job: &Job, z: &Option<String>) -> Result<(), Failure> {
    let start = Instant::now();
    let z = z_or(job, z, Complex64::new(0.0, 0.0))?;
    let sum = theta_sum(&z, &job.t, &job.trunc)?;
    let record = json!({
        "value": complex_json(sum.value),
        "radius": sum.radius,
        "tail_bound": sum.tail_bound,
        "terms": sum.terms,
    });
    emit(job.format, &record, start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_invariant(job: &Job, x: &str) -> Result<(), Failure> {
    let start = Instant::now();
    let x = parse::real_coordinate(x, job.n)?;
    let sum = invariant_theta_sum(&x, &job.t, &job.trunc)?;
    let record = json!({
        "value": complex_json(sum.value),
        "radius": sum.radius,
        "tail_bound": sum.tail_bound,
        "terms": sum.terms,
    });
    emit(job.format, &record, start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_modular(job: &Job, g: &str, z: &Option<String>) -> Result<(), Failure> {
    let start = Instant::now();
    let g = parse::symplectic(g)?;
    if g.n() != job.n {
        return Err(Failure::Validation(format!("g is {0}x{0}, expected {1}x{1}", 2 * g.n(), 2 * job.n)));
    }
    let z = z_or(job, z, Complex64::new(0.1, 0.05))?;
    let xi = modular_ratio(&g, &z, &job.t, &job.trunc)?;
    let record = json!({
        "ratio": complex_json(xi),
        "modulus_defect": (xi.norm() - 1.0).abs(),
        "eighth_power_defect": (xi.powi(8) - 1.0).norm(),
        "theta_group": g.is_theta_group(),
    });
    emit(job.format, &record, start.elapsed().as_secs_f64());
    Ok(())
}

#[derive(Serialize)]
struct QthetaTerm {
    w1: Vec<i64>,
    w2: Vec<i64>,
    re: f64,
    im: f64,
}

fn cmd_qtheta(job: &Job) -> Result<(), Failure> {
    let start = Instant::now();
    let (_, radius, tail_bound) = quantum_theta_support(&job.t, &job.trunc)?;
    let element = algebra::quantum_theta(&job.t, &job.trunc)?;
    let terms: Vec<QthetaTerm> =
        element.to_json_terms().into_iter().map(|t| QthetaTerm { w1: t.w1, w2: t.w2, re: t.re, im: t.im }).collect();
    match job.format {
        Format::Json => out!("{}", json!({"radius": radius, "tail_bound": tail_bound, "terms": terms})),
        Format::Csv => {
            out!("w1,w2,re,im");
            for t in &terms {
                out!("\"{:?}\",\"{:?}\",{:e},{:e}", t.w1, t.w2, t.re, t.im);
            }
        }
        Format::Human => {
            out!("radius {radius}, tail bound {tail_bound:e}, {} terms", terms.len());
            for t in &terms {
                out!("  e({:?}, {:?})  {:+.16e}", t.w1, t.w2, t.re);
            }
            out!("elapsed {:.3}s", start.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn cmd_verify(job: &Job, suite: Suite, stab: &StabilizerArgs) -> Result<(), Failure> {
    let start = Instant::now();
    positive("--stab-tol", stab.stab_tol)?;
    let mut ctx = Context {
        n: job.n,
        fiber: job.t.clone(),
        trunc: job.trunc,
        order: job.order,
        tol: job.tol,
        max_len: stab.max_len,
        stab_tol: stab.stab_tol,
        rng: ChaCha8Rng::seed_from_u64(job.seed),
    };
    let reports = suites::run(suite, &mut ctx)?;
    print_reports(job.format, &reports);
    if job.format == Format::Human {
        out!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.check.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}

fn print_reports(format: Format, reports: &[ResidualReport]) {
    match format {
        Format::Json => {
            for r in reports {
                out!("{}", serde_json::to_string(r).expect("reports serialize"));
            }
        }
        Format::Csv => {
            out!("check,residual,tolerance,pass,parameters");
            for r in reports {
                out!("{},{:e},{:e},{},{}", r.check, r.residual, r.tolerance, r.pass, csv_field(&r.parameters));
            }
        }
        Format::Human => {
            for r in reports {
                let relation = if r.residual < r.tolerance { "<" } else { ">=" };
                out!(
                    "{} {:<40} {:.3e} {relation} {:.0e}",
                    if r.pass { "ok  " } else { "FAIL" },
                    r.check,
                    r.residual,
                    r.tolerance
                );
            }
        }
    }
}

fn cmd_stabilizer(job: &Job, stab: &StabilizerArgs) -> Result<(), Failure> {
    let start = Instant::now();
    positive("--stab-tol", stab.stab_tol)?;
    let group = stabilizer_search(&job.t, stab.max_len, stab.stab_tol)?;
    let qtheta = algebra::quantum_theta(&job.t, &job.trunc)?;
    let closed = is_closed(&group);
    let abelian = is_abelian(&group);
    let bound = 4 * group.len().max(1);
    let mut elements = Vec::new();
    for g in &group {
        let residual = qtheta.eps_action(g)?.max_diff(&qtheta);
        elements.push(json!({
            "g": g.matrix().to_rows(),
            "order": g.order(bound),
            "qtheta_residual": residual,
            "qtheta_invariant": residual < job.tol.unwrap_or(1e-12),
        }));
    }
    let cyclic = closed && group.iter().any(|g| g.order(bound) == Some(group.len()));
    let record = json!({
        "size": group.len(),
        "closed": closed,
        "abelian": abelian,
        "cyclic": cyclic,
        "max_word_length": stab.max_len,
        "elements": elements,
    });
    match job.format {
        Format::Json => out!("{record}"),
        Format::Csv => {
            out!("g,order,qtheta_residual,qtheta_invariant");
            for e in &elements {
                out!("{},{},{},{}", csv_field(&e["g"]), e["order"], e["qtheta_residual"], e["qtheta_invariant"]);
            }
        }
        Format::Human => {
            let mut line = format!("{} elements", group.len());
            if cyclic {
                let _ = write!(line, ", cyclic of order {}", group.len());
            } else {
                let _ = write!(line, ", closed: {closed}, abelian: {abelian}");
            }
            out!("{line}");
            for e in &elements {
                out!(
                    "  order {:>4}  qtheta {:.1e}  {}",
                    e["order"],
                    e["qtheta_residual"].as_f64().unwrap_or(f64::NAN),
                    e["g"]
                );
            }
            out!("elapsed {:.3}s", start.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Theta { z, common } => cmd_theta(&Job::new(common)?, z),
        Command::InvariantTheta { x, common } => cmd_invariant(&Job::new(common)?, x),
        Command::ModularRatio { g, z, common } => cmd_modular(&Job::new(common)?, g, z),
        Command::Qtheta { common } => cmd_qtheta(&Job::new(common)?),
        Command::Verify { suite, common, stab } => cmd_verify(&Job::new(common)?, *suite, stab),
        Command::Stabilizer { common, stab } => cmd_stabilizer(&Job::new(common)?, stab),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(failed)) => {
            eprintln!("failed checks: {}", failed.join(", "));
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
