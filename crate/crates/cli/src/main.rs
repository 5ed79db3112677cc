use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use el_abduct::bench::{generate_corpus, read_corpus, run_corpus, summary_rows, write_corpus};
use el_abduct::syntax::parse_timeout;
use el_abduct::{parse_document, parse_problem, Report, WallClock};
use el_abduct_core::bench::Family;
use el_abduct_core::oracle::OracleConfig;
use el_abduct_core::pipeline::{run_abduce, PipelineConfig};
use el_abduct_core::preprocess::PreprocessError;
use el_abduct_core::reasoner::Reasoner;

#[derive(Parser)]
#[command(
    name = "el-abduct",
    version,
    about = "Connection-minimal TBox abduction for EL"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute hypotheses for a problem file.
    Abduce(AbduceArgs),
    /// Print the atomic subsumptions of a TBox.
    Classify(ClassifyArgs),
    /// Generate a benchmark corpus from an ontology.
    BenchGen(BenchGenArgs),
    /// Run a corpus and print per-family statistics.
    BenchRun(BenchRunArgs),
}

#[derive(Args)]
struct Io {
    /// Input file; standard input when absent or `-`.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent or `-`.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Limits {
    /// Skip module extraction.
    #[arg(long)]
    no_modules: bool,
    /// Skip presaturation with the classification.
    #[arg(long)]
    no_presaturation: bool,
    /// Stop saturation after SECS and report what was found (`none` to disable).
    #[arg(long, value_name = "SECS", value_parser = timeout)]
    soft_timeout: Option<Timeout>,
    /// Abort after SECS (`none` to disable).
    #[arg(long, value_name = "SECS", value_parser = timeout)]
    hard_timeout: Option<Timeout>,
}

#[derive(Clone, Copy)]
struct Timeout(Option<Duration>);

fn timeout(s: &str) -> Result<Timeout, String> {
    parse_timeout(s).map(Timeout)
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct AbduceArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    limits: Limits,
    /// Override the computed Skolem depth bound.
    #[arg(long, value_name = "N")]
    depth_bound: Option<usize>,
    /// Re-check each hypothesis with the reasoner and the brute-force oracle.
    #[arg(long)]
    verify: bool,
    /// Write the saturation trace to PATH.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BenchGenArgs {
    #[command(flatten)]
    io: Io,
    /// Families to generate; all three when absent.
    #[arg(long, value_name = "FAMILY")]
    family: Vec<Family>,
    /// Seeds to try per family.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchRunArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    limits: Limits,
    /// Worker threads; the available parallelism when absent.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Input(String),
    AlreadyEntailed(String),
    NoHypotheses,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::AlreadyEntailed(_) => 2,
            Failure::NoHypotheses => 3,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn is_stdio(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

fn read_input(io: &Io) -> Result<(String, String), Failure> {
    let mut text = String::new();
    if is_stdio(&io.input) {
        io::stdin().read_to_string(&mut text)?;
        return Ok(("<stdin>".into(), text));
    }
    let path = io.input.as_deref().expect("checked above");
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((path.display().to_string(), text))
}

fn open_output(io: &Io) -> Result<Box<dyn Write>, Failure> {
    if is_stdio(&io.output) {
        return Ok(Box::new(io::stdout().lock()));
    }
    let path = io.output.as_deref().expect("checked above");
    let file =
        fs::File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Box::new(io::BufWriter::new(file)))
}

impl Limits {
    fn apply(&self, cfg: &mut PipelineConfig) {
        cfg.use_modules &= !self.no_modules;
        cfg.presaturate &= !self.no_presaturation;
        if let Some(Timeout(t)) = self.soft_timeout {
            cfg.soft_limit = t;
        }
        if let Some(Timeout(t)) = self.hard_timeout {
            cfg.hard_limit = t;
        }
    }
}

fn abduce(args: &AbduceArgs) -> Result<(), Failure> {
    let (name, text) = read_input(&args.io)?;
    let file = parse_problem(&text).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    let problem = file.to_problem().map_err(|e| match e {
        PreprocessError::AlreadyEntailed(_) => Failure::AlreadyEntailed(e.to_string()),
    })?;

    let mut cfg = PipelineConfig::default();
    let o = &file.options;
    cfg.depth_bound = o.depth_bound;
    cfg.use_modules = o.modules.unwrap_or(true);
    cfg.presaturate = o.presaturation.unwrap_or(true);
    if let Some(t) = o.soft_timeout {
        cfg.soft_limit = t;
    }
    if let Some(t) = o.hard_timeout {
        cfg.hard_limit = t;
    }
    args.limits.apply(&mut cfg);
    cfg.depth_bound = args.depth_bound.or(cfg.depth_bound);
    cfg.trace = args.trace.is_some();

    let out = run_abduce(&problem, &cfg, &WallClock::start()).map_err(|e| {
        eprintln!("error: {e}");
        Failure::NoHypotheses
    })?;
    if let Some(path) = &args.trace {
        let mut body = out.trace.join("\n");
        body.push('\n');
        fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    let mut report = Report::new(&out);
    if args.verify {
        report.verify(&problem, OracleConfig::default());
    }
    let mut w = open_output(&args.io)?;
    match args.format {
        Format::Json => writeln!(w, "{}", report.to_json())?,
        Format::Text => write!(w, "{}", report.to_text())?,
    }
    w.flush()?;
    if report.hypotheses.is_empty() {
        return Err(Failure::NoHypotheses);
    }
    Ok(())
}

fn classify(args: &ClassifyArgs) -> Result<(), Failure> {
    let (name, text) = read_input(&args.io)?;
    let doc = parse_document(&text).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    let table = Reasoner::new(&doc.tbox).table();
    let mut w = open_output(&args.io)?;
    match args.format {
        Format::Text => {
            for (a, b) in table.strict_pairs() {
                writeln!(w, "{a} SubClassOf {b}")?;
            }
        }
        Format::Json => {
            let map: std::collections::BTreeMap<String, Vec<String>> = table
                .entries()
                .iter()
                .map(|(a, bs)| {
                    let sups = bs.iter().filter(|b| *b != a).map(|b| b.to_string());
                    (a.to_string(), sups.collect())
                })
                .collect();
            let body = serde_json::to_string_pretty(&map).map_err(io::Error::other)?;
            writeln!(w, "{body}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn bench_gen(args: &BenchGenArgs) -> Result<(), Failure> {
    let (name, text) = read_input(&args.io)?;
    let doc = parse_document(&text).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    let families = if args.family.is_empty() {
        Family::ALL.to_vec()
    } else {
        args.family.clone()
    };
    let ontology = args
        .io
        .input
        .as_deref()
        .and_then(Path::file_stem)
        .map_or_else(|| "stdin".into(), |s| s.to_string_lossy().into_owned());
    let (entries, skipped) =
        generate_corpus(&doc.tbox, &ontology, &families, args.count, args.seed);
    if skipped > 0 {
        eprintln!("skipped {skipped} seeds without a candidate observation");
    }
    let mut w = open_output(&args.io)?;
    write_corpus(&entries, &mut w)?;
    w.flush()?;
    Ok(())
}

fn bench_run(args: &BenchRunArgs) -> Result<(), Failure> {
    let (name, text) = read_input(&args.io)?;
    let problems = read_corpus(BufReader::new(text.as_bytes()))
        .map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    let mut cfg = PipelineConfig::default();
    args.limits.apply(&mut cfg);
    let threads = args.threads.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, std::num::NonZeroUsize::get)
    });
    let runs = run_corpus(&problems, &cfg, threads);
    let rows = summary_rows(&runs);
    let mut w = open_output(&args.io)?;
    match args.format {
        TableFormat::Csv => {
            el_abduct::bench::write_csv(&rows, &mut w).map_err(|e| Failure::Input(e.to_string()))?
        }
        TableFormat::Json => el_abduct::bench::write_json(&rows, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Abduce(a) => abduce(a),
        Command::Classify(a) => classify(a),
        Command::BenchGen(a) => bench_gen(a),
        Command::BenchRun(a) => bench_run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(msg) | Failure::AlreadyEntailed(msg) => eprintln!("error: {msg}"),
                Failure::NoHypotheses => {}
            }
            ExitCode::from(f.code())
        }
    }
}
