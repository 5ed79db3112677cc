//! Benchmark problem families and run statistics.
//!
//! ORIGIN asks for a non-entailed atomic CI over the full ontology, JUSTIF
//! takes a justification of an entailed CI minus one axiom, and REPAIR a
//! maximal subset that no longer entails it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::Clock;
use crate::concept::{ConceptInclusion, TBox};
use crate::pipeline::{run_abduce, Phase, PipelineConfig, PipelineError};
use crate::preprocess::{AbductionProblem, PreprocessError};
use crate::reasoner::{entails_ci, Reasoner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Origin,
    Justif,
    Repair,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Origin, Family::Justif, Family::Repair];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Origin => "ORIGIN",
            Family::Justif => "JUSTIF",
            Family::Repair => "REPAIR",
        })
    }
}

impl core::str::FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ORIGIN" => Ok(Family::Origin),
            "JUSTIF" => Ok(Family::Justif),
            "REPAIR" => Ok(Family::Repair),
            _ => Err(BenchError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("no candidate observation in this TBox")]
    NoCandidate,
    #[error("`{0}` is not entailed by the TBox")]
    NotEntailed(String),
    #[error("`{0}` is a tautology and has no repair")]
    Tautology(String),
    #[error("unknown problem family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}

#[derive(Debug, Clone)]
pub struct SourceMeta {
    pub ontology: String,
    pub alpha: ConceptInclusion,
    /// The axiom dropped from the justification (JUSTIF only).
    pub removed: Option<ConceptInclusion>,
}

#[derive(Debug, Clone)]
pub struct BenchProblem {
    pub family: Family,
    pub problem: AbductionProblem,
    pub seed: u64,
    pub meta: SourceMeta,
}

/// Atomic CIs `A ⊑ B`, `A ≠ B`, over the signature of `t`, split by
/// whether `t` entails them.
fn atomic_candidates(t: &TBox) -> (Vec<ConceptInclusion>, Vec<ConceptInclusion>) {
    let table = Reasoner::new(t).table();
    let names: Vec<_> = t.signature().concepts.into_iter().collect();
    let mut entailed = Vec::new();
    let mut open = Vec::new();
    for a in &names {
        for b in names.iter().filter(|b| *b != a) {
            let ci = ConceptInclusion::atomic(a.clone(), b.clone());
            if table.subsumes(a, b) {
                entailed.push(ci);
            } else {
                open.push(ci);
            }
        }
    }
    (entailed, open)
}

pub fn gen_origin(t: &TBox, seed: u64) -> Result<BenchProblem, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, open) = atomic_candidates(t);
    let alpha = open
        .choose(&mut rng)
        .ok_or(BenchError::NoCandidate)?
        .clone();
    Ok(BenchProblem {
        family: Family::Origin,
        problem: AbductionProblem::with_full_signature(t.clone(), alpha.clone())?,
        seed,
        meta: SourceMeta {
            ontology: String::new(),
            alpha,
            removed: None,
        },
    })
}

/// A ⊆-minimal subset of `t` entailing `alpha` (expand, then shrink).
pub fn compute_justification(t: &TBox, alpha: &ConceptInclusion) -> Result<TBox, BenchError> {
    if !entails_ci(t, alpha) {
        return Err(BenchError::NotEntailed(alpha.to_string()));
    }
    let mut kept: Vec<ConceptInclusion> = Vec::new();
    for ci in t.iter() {
        kept.push(ci.clone());
        if entails_ci(&kept.iter().cloned().collect(), alpha) {
            break;
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let without: TBox = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| c.clone())
            .collect();
        if entails_ci(&without, alpha) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept.into_iter().collect())
}

/// A ⊆-maximal subset of `t` not entailing `alpha`: break every
/// justification by dropping a random axiom, then add back what is safe.
pub fn compute_repair(
    t: &TBox,
    alpha: &ConceptInclusion,
    rng: &mut impl Rng,
) -> Result<TBox, BenchError> {
    if entails_ci(&TBox::new(), alpha) {
        return Err(BenchError::Tautology(alpha.to_string()));
    }
    if !entails_ci(t, alpha) {
        return Err(BenchError::NotEntailed(alpha.to_string()));
    }
    let mut kept = t.clone();
    let mut removed = Vec::new();
    while entails_ci(&kept, alpha) {
        let just = compute_justification(&kept, alpha)?;
        let victim = just
            .axioms()
            .choose(rng)
            .expect("a justification of a non-tautology is non-empty")
            .clone();
        kept = kept.iter().filter(|ci| **ci != victim).cloned().collect();
        removed.push(victim);
    }
    for ci in removed {
        let mut candidate = kept.clone();
        candidate.insert(ci);
        if !entails_ci(&candidate, alpha) {
            kept = candidate;
        }
    }
    Ok(t.iter().filter(|ci| kept.contains(ci)).cloned().collect())
}

pub fn gen_justif(t: &TBox, seed: u64) -> Result<BenchProblem, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (entailed, _) = atomic_candidates(t);
    let candidates: Vec<_> = entailed.into_iter().filter(|ci| !t.contains(ci)).collect();
    let alpha = candidates
        .choose(&mut rng)
        .ok_or(BenchError::NoCandidate)?
        .clone();
    let just = compute_justification(t, &alpha)?;
    let removed = just.axioms().choose(&mut rng).cloned();
    let background: TBox = just
        .iter()
        .filter(|ci| Some(*ci) != removed.as_ref())
        .cloned()
        .collect();
    Ok(BenchProblem {
        family: Family::Justif,
        problem: AbductionProblem::with_full_signature(background, alpha.clone())?,
        seed,
        meta: SourceMeta {
            ontology: String::new(),
            alpha,
            removed,
        },
    })
}

pub fn gen_repair(t: &TBox, seed: u64) -> Result<BenchProblem, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (entailed, _) = atomic_candidates(t);
    let alpha = entailed
        .choose(&mut rng)
        .ok_or(BenchError::NoCandidate)?
        .clone();
    let background = compute_repair(t, &alpha, &mut rng)?;
    Ok(BenchProblem {
        family: Family::Repair,
        problem: AbductionProblem::with_full_signature(background, alpha.clone())?,
        seed,
        meta: SourceMeta {
            ontology: String::new(),
            alpha,
            removed: None,
        },
    })
}

pub fn generate(family: Family, t: &TBox, seed: u64) -> Result<BenchProblem, BenchError> {
    match family {
        Family::Origin => gen_origin(t, seed),
        Family::Justif => gen_justif(t, seed),
        Family::Repair => gen_repair(t, seed),
    }
}

/// Outcome of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub family: Family,
    /// Saturation finished within the hard limit with a non-empty set of
    /// prime implicates.
    pub success: bool,
    pub complete: bool,
    pub num_hypotheses: usize,
    /// CIs per hypothesis.
    pub hypothesis_sizes: Vec<usize>,
    /// Atomic concepts per CI, over all hypotheses.
    pub axiom_sizes: Vec<usize>,
    /// Saturation time.
    pub time: Duration,
    pub phases: Vec<(Phase, Duration)>,
}

pub fn run_problem(bp: &BenchProblem, cfg: &PipelineConfig, clock: &dyn Clock) -> RunStats {
    let failed = |time| RunStats {
        family: bp.family,
        success: false,
        complete: false,
        num_hypotheses: 0,
        hypothesis_sizes: Vec::new(),
        axiom_sizes: Vec::new(),
        time,
        phases: Vec::new(),
    };
    let start = clock.now();
    match run_abduce(&bp.problem, cfg, clock) {
        Err(PipelineError::HardTimeout(_) | PipelineError::Reasoner(_)) => {
            failed(clock.now().saturating_sub(start))
        }
        Ok(out) => {
            let pi = &out.implicates;
            let time = out
                .timings
                .iter()
                .find(|(p, _)| *p == Phase::Saturate)
                .map_or(Duration::ZERO, |(_, d)| *d);
            RunStats {
                family: bp.family,
                success: !(pi.positive.is_empty() && pi.roles.is_empty() && pi.negative.is_empty()),
                complete: pi.complete,
                num_hypotheses: out.hypotheses.len(),
                hypothesis_sizes: out.hypotheses.iter().map(|h| h.len()).collect(),
                axiom_sizes: out
                    .hypotheses
                    .iter()
                    .flat_map(|h| h.axioms.iter().map(|a| a.size()))
                    .collect(),
                time,
                phases: out.timings,
            }
        }
    }
}

/// Median, mean and maximum of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        let mean = v.iter().sum::<f64>() / n as f64;
        Some(Self {
            median,
            mean,
            max: v[n - 1],
        })
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySummary {
    pub family: Family,
    pub problems: usize,
    pub success_rate: f64,
    pub completion_rate: f64,
    pub num_hypotheses: Option<Spread>,
    pub hypothesis_size: Option<Spread>,
    pub axiom_size: Option<Spread>,
    pub time_seconds: Option<Spread>,
}

/// Aggregates per family, in [`Family::ALL`] order, skipping empty families.
pub fn summarize(runs: &[RunStats]) -> Vec<FamilySummary> {
    Family::ALL
        .into_iter()
        .filter_map(|family| {
            let rs: Vec<_> = runs.iter().filter(|r| r.family == family).collect();
            if rs.is_empty() {
                return None;
            }
            let n = rs.len() as f64;
            let rate = |f: fn(&RunStats) -> bool| rs.iter().filter(|r| f(r)).count() as f64 / n;
            Some(FamilySummary {
                family,
                problems: rs.len(),
                success_rate: rate(|r| r.success),
                completion_rate: rate(|r| r.complete),
                num_hypotheses: Spread::of(rs.iter().map(|r| r.num_hypotheses as f64)),
                hypothesis_size: Spread::of(
                    rs.iter()
                        .flat_map(|r| r.hypothesis_sizes.iter().map(|&s| s as f64)),
                ),
                axiom_size: Spread::of(
                    rs.iter()
                        .flat_map(|r| r.axiom_sizes.iter().map(|&s| s as f64)),
                ),
                time_seconds: Spread::of(rs.iter().map(|r| r.time.as_secs_f64())),
            })
        })
        .collect()
}
