use std::sync::OnceLock;

use repdigit_prover::baker::ChainMode;
use repdigit_prover::prover::*;
use repdigit_prover::reduction::Lambda3Sign;
use repdigit_prover::PrecisionPolicy;

const THEOREM_VALUES: [&str; 12] = [
    "114", "151", "200", "265", "351", "465", "616", "816", "3329", "4410", "7739", "922111",
];

fn default_cert() -> &'static Certificate {
    static C: OnceLock<Certificate> = OnceLock::new();
    C.get_or_init(|| prove(&ProveOptions::default()).unwrap())
}

#[test]
fn default_proof_is_complete() {
    let c = default_cert();
    assert_eq!(c.solution_values(), THEOREM_VALUES);
    assert_eq!(c.final_bound, 546);
    assert_eq!(c.round_bound(1), Some(62));
    assert_eq!(c.round_bound(2), Some(66));
    let k = &c.contradiction;
    assert!(k.proof_complete);
    assert_eq!(
        (k.search_ceiling, k.hypothesis_n_at_least, k.reduced_bound),
        (560, 561, 546)
    );
    assert_eq!(c.reduction_rounds.len(), 3);
    assert!(c.tight_chain.is_none());
    assert_eq!(c.bound_chain.mode, ChainMode::Published);
}

#[test]
fn binet_checks_match_the_published_range() {
    let b = &default_cert().binet_checks;
    assert_eq!((b.n_min, b.n_max), (1, 500));
    assert!(b.binet_error_failures.is_empty());
    assert_eq!(b.growth_bracket_failures, vec![3]);
    assert!(b.binet_error_at_hypothesis);
    assert!(b.conjugate_term_below_one);
}

#[test]
fn canonical_json_round_trips_and_is_deterministic() {
    let c = default_cert();
    let json = canonical_json(c);
    let back: Certificate = serde_json::from_str(&json).unwrap();
    assert_eq!(&back, c);
    assert!(!json.contains("generated_at"));

    let again = prove(&ProveOptions::default()).unwrap();
    assert_eq!(canonical_json(&again), json);

    // the timestamp never reaches the canonical form
    let stamped = Certificate {
        generated_at: Some("2026-01-01T00:00:00Z".into()),
        ..c.clone()
    };
    assert_eq!(canonical_json(&stamped), json);
}

#[test]
fn text_report_lists_every_solution() {
    let text = emit_report(default_cert(), ReportFormat::Text);
    for v in THEOREM_VALUES {
        assert!(text.contains(v), "{v} missing");
    }
    assert!(text.contains("proof complete: true"));
    assert_eq!(
        emit_report(default_cert(), ReportFormat::Json),
        canonical_json(default_cert())
    );
}

#[test]
fn certificate_carries_notes() {
    let c = default_cert();
    let ids: Vec<&str> = c
        .resolved_typos
        .iter()
        .chain(&c.open_questions)
        .map(|n| n.id.as_str())
        .collect();
    for id in [
        "gamma3_coefficient",
        "alpha_half_exponent",
        "growth_bracket_n3",
        "lambda3_sign",
        "nonvanishing",
    ] {
        assert!(ids.contains(&id), "{id}");
    }
}

#[test]
fn low_ceiling_leaves_a_gap() {
    let opts = ProveOptions {
        search_ceiling: 540,
        ..ProveOptions::default()
    };
    match prove(&opts) {
        Err(ProveError::ProofIncomplete {
            stage: Stage::Contradiction,
            certificate: Some(cert),
            ..
        }) => {
            assert!(!cert.contradiction.proof_complete);
            assert_eq!(cert.final_bound, 546);
        }
        other => panic!("expected an incomplete proof, got {other:?}"),
    }
}

#[test]
fn paper_faithful_runs_both_signs() {
    let opts = ProveOptions {
        paper_faithful: true,
        tight: true,
        ..ProveOptions::default()
    };
    let c = prove(&opts).unwrap();
    let signs: Vec<_> = c.reduction_rounds.iter().filter_map(|r| r.lambda3_sign).collect();
    assert_eq!(signs, vec![Lambda3Sign::Minus, Lambda3Sign::Plus]);
    assert!(c
        .reduction_rounds
        .iter()
        .filter(|r| r.round == 3)
        .all(|r| r.max_y == 546));
    assert_eq!(c.final_bound, 546);
    assert!(c.contradiction.proof_complete);
    // the published chain still supplies X0
    assert_eq!(c.bound_chain, default_cert().bound_chain);
    let tight = c.tight_chain.as_ref().unwrap();
    assert_eq!(tight.mode, ChainMode::Tight);
    assert!(tight.checks.iter().all(|k| k.holds));
    let json = canonical_json(&c);
    assert!(json.contains("\"lambda3_sign\": \"plus\""));
}

#[test]
fn precision_cap_is_reported() {
    let opts = ProveOptions {
        precision: PrecisionPolicy::new(32, 32, 2.0).unwrap(),
        ..ProveOptions::default()
    };
    assert!(matches!(prove(&opts), Err(ProveError::PrecisionExhausted { .. })));
}
