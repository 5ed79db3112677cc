//! Benchmark corpora (JSON lines) and summary tables (CSV or JSON).

use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use el_abduct_core::bench::{
    generate, run_problem, summarize, BenchError, BenchProblem, Family, FamilySummary, RunStats,
    SourceMeta, Spread,
};
use el_abduct_core::pipeline::PipelineConfig;
use el_abduct_core::TBox;
use serde::{Deserialize, Serialize};

use crate::clock::WallClock;
use crate::syntax::{parse_axiom, parse_problem, ParseError, ProblemFile};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("corpus line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("corpus line {line}: {source}")]
    Bench { line: usize, source: BenchError },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One generated problem, with the problem in the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: usize,
    pub family: String,
    pub seed: u64,
    pub ontology: String,
    pub alpha: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removed: Option<String>,
    pub problem: String,
}

impl CorpusEntry {
    pub fn new(id: usize, bp: &BenchProblem) -> Self {
        Self {
            id,
            family: bp.family.to_string(),
            seed: bp.seed,
            ontology: bp.meta.ontology.clone(),
            alpha: bp.meta.alpha.to_string(),
            removed: bp.meta.removed.as_ref().map(ToString::to_string),
            problem: ProblemFile::from_problem(&bp.problem).to_string(),
        }
    }

    pub fn to_bench_problem(&self, line: usize) -> Result<BenchProblem, CorpusError> {
        let parse = |source| CorpusError::Parse { line, source };
        let bench = |source| CorpusError::Bench { line, source };
        let family: Family = self.family.parse().map_err(bench)?;
        let file = parse_problem(&self.problem).map_err(parse)?;
        let problem = file
            .to_problem()
            .map_err(|e| bench(BenchError::Preprocess(e)))?;
        Ok(BenchProblem {
            family,
            problem,
            seed: self.seed,
            meta: SourceMeta {
                ontology: self.ontology.clone(),
                alpha: parse_axiom(&self.alpha).map_err(parse)?,
                removed: self
                    .removed
                    .as_deref()
                    .map(parse_axiom)
                    .transpose()
                    .map_err(parse)?,
            },
        })
    }
}

/// Up to `count` problems per family from seeds `seed, seed + 1, …`; seeds
/// for which the family has no candidate are skipped and counted.
pub fn generate_corpus(
    tbox: &TBox,
    ontology: &str,
    families: &[Family],
    count: usize,
    seed: u64,
) -> (Vec<CorpusEntry>, usize) {
    let mut out = Vec::new();
    let mut skipped = 0;
    for &family in families {
        for s in (0..count as u64).map(|i| seed.wrapping_add(i)) {
            match generate(family, tbox, s) {
                Ok(mut bp) => {
                    bp.meta.ontology = ontology.to_string();
                    out.push(CorpusEntry::new(out.len(), &bp));
                }
                Err(_) => skipped += 1,
            }
        }
    }
    (out, skipped)
}

pub fn write_corpus(entries: &[CorpusEntry], mut w: impl Write) -> io::Result<()> {
    for e in entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_corpus(r: impl BufRead) -> Result<Vec<BenchProblem>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CorpusEntry =
            serde_json::from_str(&line).map_err(|source| CorpusError::Json {
                line: i + 1,
                source,
            })?;
        out.push(entry.to_bench_problem(i + 1)?);
    }
    Ok(out)
}

/// Runs every problem on `threads` workers; results keep corpus order.
pub fn run_corpus(
    problems: &[BenchProblem],
    cfg: &PipelineConfig,
    threads: usize,
) -> Vec<RunStats> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunStats>>> = Mutex::new(vec![None; problems.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(bp) = problems.get(i) else { break };
                let stats = run_problem(bp, cfg, &WallClock::start());
                slots.lock().expect("no worker panicked")[i] = Some(stats);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect()
}

/// One row of the summary table; spreads are empty when a family produced no
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub problems: usize,
    pub success_rate: f64,
    pub completion_rate: f64,
    pub num_h_median: Option<f64>,
    pub num_h_mean: Option<f64>,
    pub num_h_max: Option<f64>,
    pub h_size_median: Option<f64>,
    pub h_size_mean: Option<f64>,
    pub h_size_max: Option<f64>,
    pub axiom_size_median: Option<f64>,
    pub axiom_size_mean: Option<f64>,
    pub axiom_size_max: Option<f64>,
    pub time_median_s: Option<f64>,
    pub time_mean_s: Option<f64>,
    pub time_max_s: Option<f64>,
}

pub const SUMMARY_COLUMNS: [&str; 16] = [
    "family",
    "problems",
    "success_rate",
    "completion_rate",
    "num_h_median",
    "num_h_mean",
    "num_h_max",
    "h_size_median",
    "h_size_mean",
    "h_size_max",
    "axiom_size_median",
    "axiom_size_mean",
    "axiom_size_max",
    "time_median_s",
    "time_mean_s",
    "time_max_s",
];

fn parts(s: Option<Spread>) -> (Option<f64>, Option<f64>, Option<f64>) {
    match s {
        Some(s) => (Some(s.median), Some(s.mean), Some(s.max)),
        None => (None, None, None),
    }
}

impl From<&FamilySummary> for SummaryRow {
    fn from(f: &FamilySummary) -> Self {
        let (num_h_median, num_h_mean, num_h_max) = parts(f.num_hypotheses);
        let (h_size_median, h_size_mean, h_size_max) = parts(f.hypothesis_size);
        let (axiom_size_median, axiom_size_mean, axiom_size_max) = parts(f.axiom_size);
        let (time_median_s, time_mean_s, time_max_s) = parts(f.time_seconds);
        Self {
            family: f.family.to_string(),
            problems: f.problems,
            success_rate: f.success_rate,
            completion_rate: f.completion_rate,
            num_h_median,
            num_h_mean,
            num_h_max,
            h_size_median,
            h_size_mean,
            h_size_max,
            axiom_size_median,
            axiom_size_mean,
            axiom_size_max,
            time_median_s,
            time_mean_s,
            time_max_s,
        }
    }
}

pub fn summary_rows(runs: &[RunStats]) -> Vec<SummaryRow> {
    summarize(runs).iter().map(SummaryRow::from).collect()
}

pub fn write_csv(rows: &[SummaryRow], w: impl Write) -> Result<(), CorpusError> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(SUMMARY_COLUMNS)?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json(rows: &[SummaryRow], mut w: impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")
}
