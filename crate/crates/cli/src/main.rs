use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tilings_core::algebra::{AlgebraContext, AlgebraElement, Grading};
use tilings_core::enumerator::{
    enumerate_centered, Budget, EnumerationError, IndexError, OperationIndex,
};
use tilings_core::operations::{OperationError, Operations};
use tilings_core::verifier::{
    grading_audit, json_lines_sink, sweep_with, unitality_sweep_with, SweepConfig, SweepOutcome,
};
use tilings_core::weight::WeightVector;

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tilings",
    version,
    about = "Tiling graphs and weighted operations on C(m,1)"
)]
struct Cli {
    /// Directory for cached operation indices.
    #[arg(long, global = true, env = "TILINGS_CACHE_DIR")]
    cache: Option<PathBuf>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct AlgebraArgs {
    /// The parameter m >= 3 of C(m,1).
    #[arg(short, long)]
    m: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two elements.
    Mul {
        #[command(flatten)]
        alg: AlgebraArgs,
        a: String,
        b: String,
    },
    /// Print every centered tiling graph with d internal vertices.
    Enumerate {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(short, long)]
        d: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate mu^w_n on the given inputs.
    Op {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Weight vector, comma separated, e.g. 0,0,1,0.
        #[arg(short, long)]
        w: String,
        /// Largest number of internal vertices to enumerate (default: what the inputs need).
        #[arg(short = 'd', long = "d-max")]
        d_max: Option<usize>,
        #[arg(allow_hyphen_values = true)]
        inputs: Vec<String>,
    },
    /// Sweep the A-infinity relation and the grading laws.
    Verify {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 8)]
        grading_bound: u32,
        #[arg(long, default_value_t = 0)]
        weight_bound: u32,
        /// Largest number of internal vertices to enumerate (default: what the bounds need).
        #[arg(short = 'd', long = "d-max")]
        d_max: Option<usize>,
        /// Also sweep sequences with an idempotent inserted.
        #[arg(long)]
        unitality: bool,
        /// Write the JSON-lines report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the shadow and gr gradings of an element.
    Gradings {
        #[command(flatten)]
        alg: AlgebraArgs,
        expr: String,
    },
    /// Build an operation index and store it.
    IndexBuild {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(short = 'd', long = "d-max")]
        d_max: usize,
        /// Destination file (default: the cache directory).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn budget(message: impl ToString) -> Self {
        Failure {
            code: EXIT_BUDGET,
            message: message.to_string(),
        }
    }

    fn failed(message: impl ToString) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::failed(format!("i/o error: {e}"))
    }
}

impl From<IndexError> for Failure {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Enumeration(EnumerationError::Budget { .. }) => Failure::budget(e),
            IndexError::Enumeration(_) => Failure::usage(e),
            _ => Failure::failed(e),
        }
    }
}

impl From<OperationError> for Failure {
    fn from(e: OperationError) -> Self {
        match e {
            OperationError::OutOfBudget { .. } => Failure::budget(e),
            _ => Failure::usage(e),
        }
    }
}

fn context(m: usize) -> Result<AlgebraContext, Failure> {
    AlgebraContext::new(m).map_err(Failure::usage)
}

fn parse(ctx: &AlgebraContext, text: &str) -> Result<AlgebraElement, Failure> {
    ctx.parse(text)
        .map_err(|e| Failure::usage(format!("in '{text}': {e}")))
}

fn parse_weight(m: usize, text: &str) -> Result<WeightVector, Failure> {
    let w: WeightVector = text.parse().map_err(Failure::usage)?;
    if w.m() != m {
        return Err(Failure::usage(format!(
            "weight {w} has {} entries, expected {m}",
            w.m()
        )));
    }
    Ok(w)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn index(cache: &Option<PathBuf>, m: usize, d_max: usize) -> Result<OperationIndex, Failure> {
    Ok(match cache {
        Some(dir) => OperationIndex::load_or_build(dir, m, d_max)?,
        None => OperationIndex::build(m, d_max)?,
    })
}

fn cmd_mul(alg: &AlgebraArgs, a: &str, b: &str) -> Result<(), Failure> {
    let ctx = context(alg.m)?;
    let x = parse(&ctx, a)?;
    let y = parse(&ctx, b)?;
    let p = ctx.multiply(&x, &y).map_err(Failure::usage)?;
    println!("{p}");
    Ok(())
}

fn cmd_enumerate(
    format: Format,
    alg: &AlgebraArgs,
    d: usize,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    context(alg.m)?;
    let graphs = enumerate_centered(alg.m, d, Budget::default()).map_err(|e| match e {
        EnumerationError::Budget { .. } => Failure::budget(e),
        _ => Failure::usage(e),
    })?;
    let mut out = open_output(output)?;
    match format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = graphs.iter().map(|g| g.to_json()).collect();
            serde_json::to_writer_pretty(&mut out, &docs)
                .map_err(|e| Failure::failed(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Dot => {
            for g in &graphs {
                write!(out, "{}", g.to_dot())?;
            }
        }
        Format::Text => {
            for g in &graphs {
                let seq = g
                    .algebra_sequence()
                    .map_err(|e| Failure::failed(e.to_string()))?;
                let inputs: Vec<String> = seq.inputs.iter().map(|p| p.to_string()).collect();
                writeln!(
                    out,
                    "{}\tI{}\tt^{}\tw={}\t{}",
                    g.canonical_form(),
                    seq.idempotent,
                    seq.d,
                    seq.weight,
                    inputs.join(", ")
                )?;
            }
            writeln!(out, "# {} graphs", graphs.len())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_op(
    cli: &Cli,
    alg: &AlgebraArgs,
    w: &str,
    d_max: Option<usize>,
    inputs: &[String],
) -> Result<(), Failure> {
    let ctx = context(alg.m)?;
    let w = parse_weight(alg.m, w)?;
    let inputs = inputs
        .iter()
        .map(|s| parse(&ctx, s))
        .collect::<Result<Vec<_>, _>>()?;
    // Enough vertices for the heaviest monomial of every input.
    let heaviest: u32 = inputs
        .iter()
        .map(|x| {
            x.terms()
                .map(|(mono, _)| mono.path.doubled_total())
                .max()
                .unwrap_or(0)
        })
        .sum();
    let needed = ((heaviest + 2 * w.total()) / (2 * alg.m as u32)) as usize;
    let index = index(&cli.cache, alg.m, d_max.unwrap_or(needed))?;
    let ops = Operations::new(&ctx, &index)?;
    let out = ops.mu(&w, &inputs)?;
    if cli.format == Format::Json {
        let doc = serde_json::json!({
            "m": alg.m,
            "weight": w,
            "inputs": inputs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "output": out.to_string(),
        });
        println!("{doc}");
    } else {
        println!("{out}");
    }
    Ok(())
}

fn print_summary(label: &str, s: &SweepOutcome) {
    eprintln!(
        "{label}: checked {}, passed {}, failed {}, skipped (infeasible) {}, budget-aborted {}{}",
        s.checked,
        s.passed,
        s.failed(),
        s.skipped_infeasible,
        s.budget_aborted,
        if s.complete { "" } else { ", INCOMPLETE" }
    );
    if let Some(e) = &s.error {
        eprintln!("{label}: {e}");
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    cli: &Cli,
    alg: &AlgebraArgs,
    grading_bound: u32,
    weight_bound: u32,
    d_max: Option<usize>,
    unitality: bool,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    let ctx = context(alg.m)?;
    let config = SweepConfig {
        grading_bound,
        weight_bound,
    };
    let d_max = d_max.unwrap_or_else(|| config.required_d(alg.m).max(1));
    let index = index(&cli.cache, alg.m, d_max)?;
    let ops = Operations::recording(&ctx, &index)?;
    let write_lines = output.is_some() || cli.format == Format::Json;
    let mut out: Box<dyn Write> = if write_lines {
        open_output(output)?
    } else {
        Box::new(io::sink())
    };
    let mut outcomes = vec![(
        "relation",
        sweep_with(&ops, config, &mut json_lines_sink(&mut out))?,
    )];
    if unitality {
        outcomes.push((
            "unitality",
            unitality_sweep_with(&ops, config, &mut json_lines_sink(&mut out))?,
        ));
    }
    let audit = grading_audit(&ops, &ops.samples());
    for (_, s) in &outcomes {
        s.write_summary(&mut out)?;
    }
    writeln!(
        out,
        "{}",
        serde_json::json!({"audit": {"audited": audit.audited, "violations": audit.violations.len()}})
    )?;
    out.flush()?;
    for (label, s) in &outcomes {
        print_summary(label, s);
    }
    eprintln!(
        "audit: {} nonzero operations, {} violations",
        audit.audited,
        audit.violations.len()
    );
    for v in audit.violations.iter().take(10) {
        eprintln!(
            "  {:?}: {} (witnesses: {})",
            v.check,
            v.detail,
            v.witnesses.len()
        );
    }
    if outcomes.iter().any(|(_, s)| !s.complete) {
        return Err(Failure::budget(
            "sweep aborted: index budget too small for the bounds",
        ));
    }
    let failed: usize = outcomes.iter().map(|(_, s)| s.failed()).sum();
    if failed > 0 || !audit.violations.is_empty() {
        return Err(Failure::failed(format!(
            "{failed} relation failures, {} audit violations",
            audit.violations.len()
        )));
    }
    Ok(())
}

fn cmd_gradings(cli: &Cli, alg: &AlgebraArgs, expr: &str) -> Result<(), Failure> {
    let ctx = context(alg.m)?;
    let x = parse(&ctx, expr)?;
    let g = ctx.gradings(&x);
    let shadow = match &g.shadow {
        Grading::Zero => "any".to_string(),
        Grading::Homogeneous(v) => v.to_string(),
        Grading::Nonhomogeneous => "nonhomogeneous".to_string(),
    };
    let gr = match &g.gr {
        Grading::Zero => "any".to_string(),
        Grading::Homogeneous(v) => v.to_string(),
        Grading::Nonhomogeneous => "nonhomogeneous".to_string(),
    };
    if cli.format == Format::Json {
        println!(
            "{}",
            serde_json::json!({"element": x.to_string(), "shadow": shadow, "gr": gr})
        );
    } else {
        println!("shadow: {shadow}");
        println!("gr: {gr}");
    }
    Ok(())
}

fn cmd_index_build(
    cli: &Cli,
    alg: &AlgebraArgs,
    d_max: usize,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    context(alg.m)?;
    let path = match (output, &cli.cache) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir)?;
            dir.join(OperationIndex::cache_file_name(alg.m, d_max))
        }
        (None, None) => {
            return Err(Failure::usage(
                "give --output or a cache directory (--cache or TILINGS_CACHE_DIR)",
            ))
        }
    };
    let index = OperationIndex::build(alg.m, d_max)?;
    index.store(Path::new(&path))?;
    println!(
        "{}: {} keys, {} graphs",
        path.display(),
        index.len(),
        index.graph_count()
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Mul { alg, a, b } => cmd_mul(alg, a, b),
        Command::Enumerate { alg, d, output } => cmd_enumerate(cli.format, alg, *d, output),
        Command::Op {
            alg,
            w,
            d_max,
            inputs,
        } => cmd_op(cli, alg, w, *d_max, inputs),
        Command::Verify {
            alg,
            grading_bound,
            weight_bound,
            d_max,
            unitality,
            output,
        } => cmd_verify(
            cli,
            alg,
            *grading_bound,
            *weight_bound,
            *d_max,
            *unitality,
            output,
        ),
        Command::Gradings { alg, expr } => cmd_gradings(cli, alg, expr),
        Command::IndexBuild { alg, d_max, output } => cmd_index_build(cli, alg, *d_max, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
