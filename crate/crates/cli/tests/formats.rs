mod common;

use std::time::Duration;

use common::{name, Gen};
use el_abduct::report::Report;
use el_abduct::syntax::{parse_concept, parse_document, Abducibles, FileOptions};
use el_abduct::{parse_problem, ProblemFile, WallClock};
use el_abduct_core::pipeline::{run_abduce, PipelineConfig};
use el_abduct_core::recombine::verify_solution;
use el_abduct_core::ConceptInclusion;
use proptest::prelude::*;

fn options() -> impl Strategy<Value = FileOptions> {
    let timeout = prop::option::of(prop::option::of(
        (0u64..100_000).prop_map(Duration::from_millis),
    ));
    (
        prop::option::of(0usize..500),
        timeout.clone(),
        timeout,
        prop::option::of(any::<bool>()),
        prop::option::of(any::<bool>()),
    )
        .prop_map(
            |(depth_bound, soft_timeout, hard_timeout, modules, presaturation)| FileOptions {
                depth_bound,
                soft_timeout,
                hard_timeout,
                modules,
                presaturation,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_problems_parse_back(seed in any::<u64>(), all in any::<bool>(), opts in options()) {
        let mut g = Gen::new(seed);
        let tbox = g.tbox(8, 6, 3);
        let observation = ConceptInclusion::new(g.concept(0..8, 2, true), g.concept(0..8, 2, true));
        let mut sig = tbox.signature();
        sig.extend(&observation.signature());
        let abducibles = if all || sig.concepts.is_empty() {
            Abducibles::All
        } else {
            Abducibles::Names(sig.concepts.iter().step_by(2).cloned().collect())
        };
        let file = ProblemFile { tbox, observation, abducibles, options: opts };
        let text = file.to_string();
        prop_assert_eq!(parse_problem(&text).unwrap(), file, "{}", text);
    }

    #[test]
    fn concepts_parse_back(seed in any::<u64>()) {
        let c = Gen::new(seed).concept(0..6, 4, true);
        prop_assert_eq!(parse_concept(&c.to_string()).unwrap().canonical(), c.canonical());
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-zA-Z0-9 (){}:,#\n]{0,120}") {
        let _ = parse_document(&text);
        let _ = parse_problem(&text);
    }

    #[test]
    fn emitted_json_hypotheses_are_solutions(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let p = g.problem_with(6, |g| g.tbox(8, 6, 2));
        let cfg = PipelineConfig { soft_limit: Some(Duration::from_millis(300)), hard_limit: None, ..Default::default() };
        let out = run_abduce(&p, &cfg, &WallClock::start()).unwrap();
        let json = Report::new(&out).to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.hypotheses.len(), out.hypotheses.len());
        for (h, orig) in back.hypotheses.iter().zip(&out.hypotheses) {
            let parsed = h.to_hypothesis();
            prop_assert_eq!(&parsed, orig);
            prop_assert!(verify_solution(p.background(), &parsed, p.observation()), "{}", parsed);
        }
    }
}

#[test]
fn report_lists_phases_and_provenance() {
    let text = std::fs::read_to_string(common::example("academia.abd")).unwrap();
    let p = parse_problem(&text).unwrap().to_problem().unwrap();
    let out = run_abduce(&p, &PipelineConfig::default(), &WallClock::start()).unwrap();
    let mut report = Report::new(&out);
    report.verify(&p, Default::default());
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["complete"], true);
    assert_eq!(json["stats"]["num_hypotheses"], 2);
    for phase in [
        "prepare",
        "translate",
        "presaturate",
        "saturate",
        "recombine",
    ] {
        assert!(json["stats"]["phase_ms"][phase].is_number(), "{phase}");
    }
    let first = &json["hypotheses"][0];
    assert_eq!(first["axioms"][0]["lhs"][0], "Chair");
    assert_eq!(
        first["provenance"]["negative_implicate"],
        "~ResearchPosition'(sk1(sk0)) | ~Diploma'(sk2(sk0))"
    );
    assert_eq!(first["verification"]["connection_minimal"], true);
    assert!(report
        .to_text()
        .contains("2. {Doctor and Professor SubClassOf Researcher}"));
    assert!(report.warnings.is_empty());
}

#[test]
fn observation_names_may_be_new() {
    let text =
        "tbox {\n  A0 SubClassOf A1\n}\nobservation: A0 SubClassOf Fresh\nabducibles: A1, Fresh\n";
    let file = parse_problem(text).unwrap();
    let p = file.to_problem().unwrap();
    assert!(p
        .abducibles()
        .contains(&el_abduct_core::ConceptName::new("Fresh")));
    assert!(p.abducibles().contains(&name(1)));
}
