//! prepare → translate → presaturate → saturate → recombine.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, string::ToString};
use core::time::Duration;

use crate::clock::{Clock, Deadline};
use crate::engine::{saturate, EngineStats, PrimeImplicates, SaturationConfig};
use crate::fol::{presaturate, translate, ClauseSet};
use crate::preprocess::{
    prepare, AbductionProblem, PrepareOptions, PreparedProblem, DEFAULT_FRESH_PREFIX,
};
use crate::reasoner::{classify, ReasonerError};
use crate::recombine::{recombine, Hypothesis};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("hard time limit of {0:?} exceeded")]
    HardTimeout(Duration),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub use_modules: bool,
    pub presaturate: bool,
    /// Replaces the computed `n × m` bound.
    pub depth_bound: Option<usize>,
    pub soft_limit: Option<Duration>,
    pub hard_limit: Option<Duration>,
    pub fresh_prefix: String,
    pub trace: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            use_modules: true,
            presaturate: true,
            depth_bound: None,
            soft_limit: Some(Duration::from_secs(30)),
            hard_limit: Some(Duration::from_secs(90)),
            fresh_prefix: DEFAULT_FRESH_PREFIX.to_string(),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Prepare,
    Translate,
    Presaturate,
    Saturate,
    Recombine,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Prepare => "prepare",
            Phase::Translate => "translate",
            Phase::Presaturate => "presaturate",
            Phase::Saturate => "saturate",
            Phase::Recombine => "recombine",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbductionOutcome {
    pub prepared: PreparedProblem,
    pub clauses: ClauseSet,
    /// Bound derived from the clause set, before any override.
    pub computed_bound: usize,
    pub depth_bound: usize,
    pub implicates: PrimeImplicates,
    pub hypotheses: Vec<Hypothesis>,
    pub engine: EngineStats,
    pub timings: Vec<(Phase, Duration)>,
    pub warnings: Vec<String>,
    pub trace: Vec<String>,
}

impl AbductionOutcome {
    pub fn complete(&self) -> bool {
        self.implicates.complete
    }

    pub fn total_time(&self) -> Duration {
        self.timings.iter().map(|(_, d)| *d).sum()
    }
}

struct Timer<'a> {
    clock: &'a dyn Clock,
    hard: Deadline,
    hard_limit: Option<Duration>,
    last: Duration,
    timings: Vec<(Phase, Duration)>,
}

impl Timer<'_> {
    fn lap(&mut self, phase: Phase) -> Result<(), PipelineError> {
        let now = self.clock.now();
        self.timings.push((phase, now.saturating_sub(self.last)));
        self.last = now;
        match self.hard_limit {
            Some(limit) if self.hard.expired(self.clock) => Err(PipelineError::HardTimeout(limit)),
            _ => Ok(()),
        }
    }
}

pub fn run_abduce(
    problem: &AbductionProblem,
    cfg: &PipelineConfig,
    clock: &dyn Clock,
) -> Result<AbductionOutcome, PipelineError> {
    let soft = Deadline::after(clock, cfg.soft_limit);
    let mut timer = Timer {
        clock,
        hard: Deadline::after(clock, cfg.hard_limit),
        hard_limit: cfg.hard_limit,
        last: clock.now(),
        timings: Vec::new(),
    };

    let opts = PrepareOptions {
        use_modules: cfg.use_modules,
        fresh_prefix: cfg.fresh_prefix.clone(),
    };
    let prepared = prepare(problem, &opts);
    timer.lap(Phase::Prepare)?;

    let mut clauses = translate(&prepared);
    let computed_bound = clauses.depth_bound();
    timer.lap(Phase::Translate)?;

    if cfg.presaturate {
        let table = classify(&prepared.tbox)?;
        clauses = presaturate(&clauses, &table);
        timer.lap(Phase::Presaturate)?;
    }

    let depth_bound = cfg.depth_bound.unwrap_or(computed_bound);
    let sat_cfg = SaturationConfig {
        depth_bound,
        record_trace: cfg.trace,
    };
    let saturated = saturate(&clauses, &sat_cfg, clock, soft);
    timer.lap(Phase::Saturate)?;

    let mut warnings = Vec::new();
    if !saturated.implicates.complete {
        warnings.push(format!(
            "saturation stopped at the soft time limit after {} given clauses; hypotheses may be incomplete",
            saturated.stats.given
        ));
    }
    let hypotheses = recombine(
        &saturated.implicates,
        problem.abducibles(),
        problem.background(),
    );
    timer.lap(Phase::Recombine)?;

    let trace = if cfg.trace {
        saturated.trace_lines()
    } else {
        Vec::new()
    };
    Ok(AbductionOutcome {
        prepared,
        clauses,
        computed_bound,
        depth_bound,
        implicates: saturated.implicates,
        hypotheses,
        engine: saturated.stats,
        timings: timer.timings,
        warnings,
        trace,
    })
}
