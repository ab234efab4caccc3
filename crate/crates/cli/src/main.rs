use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mval::geometry::{random_polytope, Ball, BodyHandle, Polytope};
use mval::grassmann::sample_grassmann;
use mval::harness::{replay, run_suite, Suite, SuiteConfig, Witness};
use mval::measures::{area_measure, AreaOptions};
use mval::sphere::{build_sphere_grid, GridKind};
use mval::valuations::OperatorSpec;
use mval::{Report, ReportFormat};

#[derive(Parser)]
#[command(
    name = "mval",
    version,
    about = "Minkowski valuations and their verification suites"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a body, grid, Grassmann sample or area measure file.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Apply one operator to one body and tabulate the resulting support function.
    Compute(ComputeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Re-run the single failing instance recorded in a witness.
    Replay {
        /// A witness file, or a result carrying a `witness` field.
        witness: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Convert a JSON report to another format.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// A polytope or ball body file.
    Body {
        #[arg(long, value_enum, default_value = "random")]
        kind: BodyKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A quadrature grid on the sphere.
    Grid {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        nodes: usize,
        #[arg(long, default_value = "fibonacci")]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A uniform weighted sample of the Grassmannian, usable as a Crofton measure.
    Grassmann {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The area measure `S_i` of a polytope body file.
    AreaMeasure {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BodyKind {
    Random,
    Cube,
    Simplex,
    Ball,
}

#[derive(Args)]
struct ComputeArgs {
    /// Operator spec as inline JSON or a path to a JSON file, e.g. `{"op":"pi_i","i":2}`.
    #[arg(long)]
    op: String,
    /// Polytope body file.
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = 2000)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    gr_samples: Option<usize>,
    #[arg(long)]
    inner: Option<usize>,
    #[arg(long)]
    tol_mult: Option<f64>,
    #[arg(long)]
    bodies: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Inequalities,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => Self::Json,
            Format::Csv => Self::Csv,
            Format::Markdown => Self::Markdown,
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, out)
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_polytope(path: &Path) -> Result<Polytope> {
    match BodyHandle::from_json(&read_json(path)?)? {
        BodyHandle::Polytope(p) => Ok(p),
        _ => bail!("{} is not a polytope body file", path.display()),
    }
}

fn gen(what: GenCommand) -> Result<()> {
    match what {
        GenCommand::Body {
            kind,
            n,
            vertices,
            seed,
            out,
        } => {
            let body: BodyHandle = match kind {
                BodyKind::Random => random_polytope(n, vertices, seed)?.into(),
                BodyKind::Cube => Polytope::unit_cube(n).into(),
                BodyKind::Simplex => Polytope::standard_simplex(n).into(),
                BodyKind::Ball => Ball::unit(n).into(),
            };
            emit_json(&body.to_json(), out.as_deref())
        }
        GenCommand::Grid {
            n,
            nodes,
            kind,
            seed,
            out,
        } => {
            let kind: GridKind = kind.parse()?;
            emit_json(
                &build_sphere_grid(n, nodes, kind, seed)?.to_json(),
                out.as_deref(),
            )
        }
        GenCommand::Grassmann {
            n,
            i,
            count,
            seed,
            out,
        } => emit_json(
            &sample_grassmann(n, i, count, seed)?.to_json(),
            out.as_deref(),
        ),
        GenCommand::AreaMeasure { body, i, seed, out } => {
            let p = read_polytope(&body)?;
            let opts = AreaOptions {
                seed,
                ..AreaOptions::default()
            };
            emit_json(&area_measure(&p, i, &opts)?.to_json(), out.as_deref())
        }
    }
}

fn compute(args: ComputeArgs) -> Result<()> {
    let (spec_value, base) = if args.op.trim_start().starts_with('{') {
        (
            serde_json::from_str(&args.op).context("parsing operator spec")?,
            PathBuf::from("."),
        )
    } else {
        let path = PathBuf::from(&args.op);
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        (read_json(&path)?, base)
    };
    let spec: OperatorSpec = serde_json::from_value(spec_value).context("invalid operator spec")?;
    let op = spec.resolve(&base, args.seed)?;
    let k = read_polytope(&args.body)?;
    let grid = Arc::new(build_sphere_grid(
        k.dim(),
        args.nodes,
        GridKind::Fibonacci,
        args.seed,
    )?);
    let h = op.apply(&k, grid.clone())?;
    let mut value = BodyHandle::Support(mval::SupportBody::new(h.function.clone())).to_json();
    value["operator"] = json!(op.name());
    value["se"] = json!(h.se);
    emit_json(&value, args.out.as_deref())
}

fn suite_config(args: &VerifyArgs) -> Result<SuiteConfig> {
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_value(read_json(p)?)
            .with_context(|| format!("invalid config {}", p.display()))?,
        None => SuiteConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.nodes {
        cfg.nodes = v;
    }
    if let Some(v) = args.gr_samples {
        cfg.gr_samples = v;
    }
    if let Some(v) = args.inner {
        cfg.inner = v;
    }
    if let Some(v) = args.tol_mult {
        cfg.tol_mult = v;
    }
    if let Some(v) = args.bodies {
        cfg.bodies = v;
    }
    if let Some(v) = args.pairs {
        cfg.pairs = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let cfg = suite_config(&args)?;
    let suite = match args.suite {
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Inequalities => Suite::Inequalities,
    };
    let start = Instant::now();
    let mut report = run_suite(suite, &cfg)?;
    if args.timing {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    emit(&report.render(args.format.into()), args.out.as_deref())?;
    eprintln!(
        "{}: {} checks, {} passed, {} failed",
        report.suite, report.summary.total, report.summary.passed, report.summary.failed
    );
    Ok(report.all_passed())
}

fn replay_witness(path: &Path, format: Format) -> Result<bool> {
    let value = read_json(path)?;
    let value = value.get("witness").cloned().unwrap_or(value);
    let witness: Witness = serde_json::from_value(value).context("not a witness file")?;
    let result = replay(&witness)?;
    let report = Report::new(&witness.suite, witness.config.clone(), vec![result]);
    emit(&report.render(format.into()), None)?;
    Ok(report.all_passed())
}

fn convert(input: &Path, format: Format, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let report = mval::harness::result::from_json(&text)?;
    emit(&report.render(format.into()), out)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    match cli.command {
        Command::Gen { what } => gen(what).map(|_| true),
        Command::Compute(args) => compute(args).map(|_| true),
        Command::Verify(args) => verify(args),
        Command::Replay { witness, format } => replay_witness(&witness, format),
        Command::Report { input, format, out } => {
            convert(&input, format, out.as_deref()).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
