//! JSON and text renderings of an abduction run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use el_abduct_core::oracle::{check_connection_minimal, OracleConfig};
use el_abduct_core::pipeline::AbductionOutcome;
use el_abduct_core::recombine::verify_solution;
use el_abduct_core::{AbductionProblem, ConceptName, FlatCi, Hypothesis};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub complete: bool,
    pub depth_bound: usize,
    /// The bound derived from the clause set, before any override.
    pub computed_depth_bound: usize,
    pub hypotheses: Vec<HypothesisReport>,
    pub implicates: ImplicateReport,
    pub stats: Stats,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub axioms: Vec<AxiomReport>,
    pub constructible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceReport {
    pub negative_implicate: String,
    pub terms: Vec<TermSupport>,
}

/// The names found at one Skolem term: positive atoms that became left-hand
/// sides and negated atoms that became right-hand sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSupport {
    pub term: String,
    pub positive: Vec<String>,
    pub negated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub solution: bool,
    /// `None` when the oracle ran out of search bounds.
    pub connection_minimal: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicateReport {
    pub positive: Vec<String>,
    pub roles: Vec<String>,
    pub negative: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub phase_ms: BTreeMap<String, f64>,
    pub total_ms: f64,
    pub num_hypotheses: usize,
    pub module_axioms: usize,
    pub clauses: usize,
    pub concept_names: usize,
    pub existentials: usize,
    pub given: usize,
    pub generated: usize,
    pub retained: usize,
    pub forward_subsumed: usize,
    pub backward_subsumed: usize,
    pub discarded_mixed: usize,
    pub discarded_bound: usize,
    pub discarded_vars: usize,
    pub max_term_depth: usize,
}

fn strings<'a>(names: impl IntoIterator<Item = &'a ConceptName>) -> Vec<String> {
    names.into_iter().map(ToString::to_string).collect()
}

impl AxiomReport {
    pub fn to_flat(&self) -> Option<FlatCi> {
        let set = |v: &[String]| v.iter().map(|n| ConceptName::new(n)).collect();
        FlatCi::new(set(&self.lhs), set(&self.rhs))
    }
}

impl HypothesisReport {
    pub fn new(h: &Hypothesis) -> Self {
        let axioms = h
            .axioms
            .iter()
            .map(|a| AxiomReport {
                lhs: strings(&a.lhs),
                rhs: strings(&a.rhs),
            })
            .collect();
        let provenance = h.provenance.as_ref().map(|p| ProvenanceReport {
            negative_implicate: p.negative.to_string(),
            terms: p
                .support
                .iter()
                .map(|(t, (pos, neg))| TermSupport {
                    term: t.to_string(),
                    positive: strings(pos),
                    negated: strings(neg),
                })
                .collect(),
        });
        Self {
            axioms,
            constructible: h.constructible,
            provenance,
            verification: None,
        }
    }

    /// The axioms back as a hypothesis; axioms that are empty after dropping
    /// tautological names are skipped.
    pub fn to_hypothesis(&self) -> Hypothesis {
        Hypothesis::new(self.axioms.iter().filter_map(AxiomReport::to_flat))
    }

    pub fn display(&self) -> String {
        self.to_hypothesis().to_string()
    }
}

const PHASES: [&str; 5] = [
    "prepare",
    "translate",
    "presaturate",
    "saturate",
    "recombine",
];

fn millis(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl Report {
    pub fn new(out: &AbductionOutcome) -> Self {
        let pi = &out.implicates;
        let implicates = ImplicateReport {
            positive: pi
                .positive_atoms()
                .map(|(t, n)| format!("{n}({t})"))
                .collect(),
            roles: pi.roles.iter().map(ToString::to_string).collect(),
            negative: pi.negative.iter().map(ToString::to_string).collect(),
        };
        let e = &out.engine;
        let stats = Stats {
            phase_ms: out
                .timings
                .iter()
                .map(|(p, d)| (p.name().to_string(), millis(*d)))
                .collect(),
            total_ms: millis(out.total_time()),
            num_hypotheses: out.hypotheses.len(),
            module_axioms: out.prepared.module.len(),
            clauses: out.clauses.clauses.len(),
            concept_names: out.clauses.n_concepts,
            existentials: out.clauses.m_existentials,
            given: e.given,
            generated: e.generated,
            retained: e.retained,
            forward_subsumed: e.forward_subsumed,
            backward_subsumed: e.backward_subsumed,
            discarded_mixed: e.discarded_mixed,
            discarded_bound: e.discarded_bound,
            discarded_vars: e.discarded_vars,
            max_term_depth: e.max_term_depth,
        };
        Self {
            complete: out.complete(),
            depth_bound: out.depth_bound,
            computed_depth_bound: out.computed_bound,
            hypotheses: out.hypotheses.iter().map(HypothesisReport::new).collect(),
            implicates,
            stats,
            warnings: out.warnings.clone(),
        }
    }

    /// Re-checks every hypothesis with the reasoner and the connection
    /// minimality oracle, adding a warning for each failure.
    pub fn verify(&mut self, problem: &AbductionProblem, cfg: OracleConfig) {
        let (bg, obs) = (problem.background(), problem.observation());
        for (i, h) in self.hypotheses.iter_mut().enumerate() {
            let hyp = h.to_hypothesis();
            let solution = verify_solution(bg, &hyp, obs);
            let connection_minimal = check_connection_minimal(bg, obs, &hyp, cfg).ok();
            if !solution {
                self.warnings
                    .push(format!("hypothesis {} is not a solution", i + 1));
            }
            match connection_minimal {
                Some(false) => self
                    .warnings
                    .push(format!("hypothesis {} is not connection-minimal", i + 1)),
                None => self.warnings.push(format!(
                    "connection minimality of hypothesis {} undecided within oracle bounds",
                    i + 1
                )),
                Some(true) => {}
            }
            h.verification = Some(Verification {
                solution,
                connection_minimal,
            });
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "complete: {}", self.complete);
        if self.depth_bound == self.computed_depth_bound {
            let _ = writeln!(s, "depth bound: {}", self.depth_bound);
        } else {
            let _ = writeln!(
                s,
                "depth bound: {} (computed {})",
                self.depth_bound, self.computed_depth_bound
            );
        }
        let _ = writeln!(s, "hypotheses: {}", self.hypotheses.len());
        for (i, h) in self.hypotheses.iter().enumerate() {
            let _ = write!(s, "  {}. {}", i + 1, h.display());
            if !h.constructible {
                s.push_str("  [not constructible]");
            }
            s.push('\n');
            if let Some(p) = &h.provenance {
                let _ = writeln!(s, "     from {}", p.negative_implicate);
            }
            if let Some(v) = &h.verification {
                let cm = match v.connection_minimal {
                    Some(b) => b.to_string(),
                    None => "unknown".into(),
                };
                let _ = writeln!(s, "     solution: {}, connection-minimal: {cm}", v.solution);
            }
        }
        let phases: Vec<String> = PHASES
            .iter()
            .filter_map(|p| {
                self.stats
                    .phase_ms
                    .get(*p)
                    .map(|ms| format!("{p} {ms:.2} ms"))
            })
            .collect();
        let _ = writeln!(s, "phases: {}", phases.join(", "));
        let _ = writeln!(
            s,
            "clauses: {} given, {} generated, {} retained, max term depth {}",
            self.stats.given, self.stats.generated, self.stats.retained, self.stats.max_term_depth
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}
