//! `capra`: evaluate coordinate norms, Capra conjugates and ball envelopes,
//! export envelope surfaces, and run the verification suites.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use capra_core::conjugacy::{CapraConjugator, Coupling, ZeroHomFn, DEFAULT_SPHERE_POINTS};
use capra_core::envelope::{ball_eval_grid, BallEnvelope, SurfaceSummary};
use capra_core::norms::{
    best_norm_object, conjugate_exponent, k_support_norm, lp_value, top_k_norm, NormConfig,
    Normalization, PhiSpec, SourceNorm,
};
use capra_core::numerics::ExtReal;
use capra_core::verify::{
    oracle_convex_envelope, oracle_k_support, oracle_naive_conjugate, oracle_support_function,
    run_suite, OracleKind, Suite,
};
use capra_core::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "capra", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm at a point.
    Norm(NormArgs),
    /// Capra conjugate of a 0-homogeneous function at a dual point.
    Conjugate(ConjugateArgs),
    /// Tightest closed convex function below f on the unit ball of ν.
    Envelope(EnvelopeArgs),
    /// Run verification suites or a reference oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    /// top-(q,k) norm
    Topk,
    /// (p,k)-support norm
    Ksupport,
    /// best norm below φ ∘ ℓ0 on the ℓp unit ball
    Best,
    /// ℓp norm
    Lp,
}

#[derive(clap::Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    kind: NormKind,
    /// Source exponent p (ksupport, best, lp). Overrides the config file.
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    /// Dual exponent q for topk; defaults to the conjugate of --p.
    #[arg(long, value_parser = parse_ext)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// `id` or a comma list φ(0),…,φ(d) with `+inf` allowed.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// JSON config: {"source": {"lp": p}, "phi": [...], "nu": {"lp": p}}.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FunctionArgs {
    /// `l0`, `zero`, or `phi:<φ(0),…,φ(d)>` for φ ∘ ℓ0.
    #[arg(long, default_value = "l0", allow_hyphen_values = true)]
    f: String,
    /// Normalization `lp:<p>`, p > 0 or `inf`.
    #[arg(long, default_value = "lp:2")]
    nu: String,
}

#[derive(clap::Args)]
struct ConjugateArgs {
    #[command(flatten)]
    func: FunctionArgs,
    /// Dual point, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Sphere sample size when no closed form applies.
    #[arg(long, default_value_t = DEFAULT_SPHERE_POINTS)]
    sphere: usize,
}

#[derive(clap::Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    func: FunctionArgs,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Nodes per axis of the evaluation grid.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Surface CSV: x_1,…,x_d,value with `+inf` outside the ball.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary: value range and checkpoints.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// conjugacy, norms, envelope or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed, default_value = "0x5EED")]
    seed: u64,
    /// naive-conjugate, convex-envelope, support-function or k-support.
    #[arg(long)]
    oracle: Option<OracleKind>,
    #[command(flatten)]
    func: FunctionArgs,
    /// Evaluation point (x for primal oracles, y for naive-conjugate).
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, value_parser = parse_ext, default_value = "2")]
    p: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// `id` or a comma list, for support-function.
    #[arg(long, default_value = "id", allow_hyphen_values = true)]
    phi: String,
    /// Nodes per axis for grid oracles.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Dual cube radius for convex-envelope.
    #[arg(long, default_value_t = 4.0)]
    dual_radius: f64,
    /// Dual nodes per axis for convex-envelope.
    #[arg(long, default_value_t = 161)]
    dual_count: usize,
    /// Direction count for sampling oracles.
    #[arg(long, default_value_t = 100_000)]
    directions: usize,
}

enum Failure {
    Parse(String),
    Domain(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Io(_) => Failure::Parse(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_ext(s: &str) -> std::result::Result<f64, String> {
    s.parse::<ExtReal>()
        .map(|v| v.to_f64())
        .map_err(|e| e.to_string())
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.parse::<ExtReal>()
                .map(|v| v.to_f64())
                .map_err(|e| Failure::Parse(e.to_string()))
        })
        .collect()
}

/// Like [`parse_list`] but every coordinate must be finite.
fn parse_point(s: &str) -> CliResult<Vec<f64>> {
    let x = parse_list(s)?;
    if x.iter().any(|c| c.is_infinite()) {
        return Err(Failure::Parse(format!("point coordinates must be finite: {s:?}")));
    }
    Ok(x)
}

fn parse_phi(s: &str, dim: usize) -> CliResult<PhiSpec> {
    if s == "id" {
        return Ok(PhiSpec::identity(dim));
    }
    let phi = PhiSpec::from_f64(&parse_list(s)?)?;
    if phi.dim() != dim {
        return Err(Failure::Domain(
            Error::DimensionMismatch {
                expected: dim,
                got: phi.dim(),
            }
            .to_string(),
        ));
    }
    Ok(phi)
}

fn parse_nu(s: &str) -> CliResult<Normalization> {
    let p = s
        .strip_prefix("lp:")
        .ok_or_else(|| Failure::Parse(format!("expected lp:<p>, got {s:?}")))?;
    let p = parse_ext(p).map_err(Failure::Parse)?;
    Ok(Normalization::lp(p)?)
}

fn parse_function(s: &str, dim: usize) -> CliResult<ZeroHomFn> {
    match s {
        "l0" => Ok(ZeroHomFn::l0(dim)),
        "zero" => Ok(ZeroHomFn::Zero),
        other => match other.strip_prefix("phi:") {
            Some(list) => Ok(ZeroHomFn::L0Composite(parse_phi(list, dim)?)),
            None => Err(Failure::Parse(format!(
                "expected l0, zero or phi:<list>, got {other:?}"
            ))),
        },
    }
}

/// Twelve significant digits; infinities as `+inf` / `-inf`.
fn format_value(v: f64) -> String {
    if v.is_infinite() {
        return ExtReal::new(v).to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{}", rounded + 0.0)
}

fn format_ext(v: ExtReal) -> String {
    format_value(v.to_f64())
}

fn format_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|c| format_value(*c)).collect();
    format!("({})", parts.join(","))
}

fn cmd_norm(args: NormArgs) -> CliResult<()> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            NormConfig::from_json(&text)?
        }
        None => NormConfig::default(),
    };
    let x = parse_point(&args.x)?;
    let d = x.len();
    let p = match args.p {
        Some(p) => Some(p),
        None => config.source_norm()?.and_then(|s| s.exponent()),
    };
    let need_p = || p.ok_or_else(|| Failure::Parse("--p is required".into()));
    let need_k = || args.k.ok_or_else(|| Failure::Parse("--k is required".into()));
    let value = match args.kind {
        NormKind::Topk => {
            let q = match args.q {
                Some(q) => q,
                None => conjugate_exponent(need_p()?)?,
            };
            top_k_norm(&x, q, need_k()?)?
        }
        NormKind::Ksupport => k_support_norm(&x, need_p()?, need_k()?)?,
        NormKind::Lp => lp_value(&x, need_p()?)?,
        NormKind::Best => {
            let phi = match &args.phi {
                Some(s) => parse_phi(s, d)?,
                None => config
                    .phi
                    .clone()
                    .ok_or_else(|| Failure::Parse("--phi is required".into()))?,
            };
            let source = SourceNorm::lp(need_p()?)?;
            let norm = best_norm_object(&phi, &source)?;
            if phi.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: phi.dim(),
                    got: d,
                }
                .into());
            }
            norm.eval(&x)
        }
    };
    println!("{}", format_value(value));
    Ok(())
}

fn cmd_conjugate(args: ConjugateArgs) -> CliResult<()> {
    let y = parse_point(&args.y)?;
    let nu = parse_nu(&args.func.nu)?;
    let f = parse_function(&args.func.f, y.len())?;
    let conj = CapraConjugator::new(f, Coupling::new(nu), y.len(), args.sphere)?;
    println!("{}", format_ext(conj.value(&y)?));
    Ok(())
}

/// Sparse and diagonal points of the unit sphere of `ν`.
fn checkpoints(nu: &Normalization, dim: usize) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dim]];
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    points.push(nu.normalize(&e1));
    if dim > 1 {
        let mut diag = vec![0.0; dim];
        diag[0] = 1.0;
        diag[1] = 1.0;
        points.push(nu.normalize(&diag));
        points.push(nu.normalize(&vec![1.0; dim]));
        points.dedup();
    }
    points
}

fn cmd_envelope(args: EnvelopeArgs) -> CliResult<()> {
    let nu = parse_nu(&args.func.nu).map_err(|e| match e {
        Failure::Parse(m) => Failure::Domain(format!("invalid normalization: {m}")),
        other => other,
    })?;
    let f = parse_function(&args.func.f, args.dim)?;
    let env = BallEnvelope::new(f, nu.clone(), args.dim)?;
    let points = checkpoints(&nu, args.dim);
    if args.out.is_some() || args.summary.is_some() {
        let grid = ball_eval_grid(&nu, args.dim, args.grid)?;
        let surface = env.sample(&grid)?;
        if let Some(path) = &args.out {
            let file = File::create(path).map_err(Error::from)?;
            surface.write_csv(BufWriter::new(file))?;
        }
        if let Some(path) = &args.summary {
            let json = SurfaceSummary::new(&surface, &env, &points).to_json()?;
            std::fs::write(path, json + "\n").map_err(Error::from)?;
        }
    }
    for x in &points {
        println!("{} {}", format_point(x), format_ext(env.value_at(x)));
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let Some(kind) = args.oracle else {
        let report = run_suite(args.suite, args.seed)?;
        println!("{}", report.to_json()?);
        return if report.passed {
            Ok(())
        } else {
            Err(Failure::Checks)
        };
    };
    let at = parse_point(
        args.at
            .as_deref()
            .ok_or_else(|| Failure::Parse("--at is required with --oracle".into()))?,
    )?;
    let d = at.len();
    match kind {
        OracleKind::NaiveConjugate => {
            let nu = parse_nu(&args.func.nu)?;
            let f = parse_function(&args.func.f, d)?;
            let v = oracle_naive_conjugate(&f, &nu, &at, args.grid)?;
            println!("{}", format_ext(v));
        }
        OracleKind::ConvexEnvelope => {
            let nu = parse_nu(&args.func.nu)?;
            let f = parse_function(&args.func.f, d)?;
            let (node, v) = oracle_convex_envelope(&f, &nu, &at, args.grid, args.dual_radius, args.dual_count)?;
            println!("{} {}", format_point(&node), format_ext(v));
        }
        OracleKind::SupportFunction => {
            let phi = parse_phi(&args.phi, d)?;
            let v = oracle_support_function(&at, &phi, args.p, args.directions, args.seed)?;
            println!("{}", format_value(v));
        }
        OracleKind::KSupport => {
            let v = oracle_k_support(&at, args.p, args.k, args.directions, args.seed)?;
            println!("{}", format_value(v));
        }
    }
    Ok(())
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("CAPRA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Parse(format!("CAPRA_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Domain(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Norm(a) => cmd_norm(a),
        Command::Conjugate(a) => cmd_conjugate(a),
        Command::Envelope(a) => cmd_envelope(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
