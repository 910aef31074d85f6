//! Acceptance gate. Prints one line per criterion and exits nonzero on any
//! unexpected failure.
//!
//! Criterion 2 fails by design: the growth bracket `α^(n−3) ≤ P_n` is false
//! at n = 3. The gate requires that to be the only failure of that suite.

use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use repdigit_prover::baker::{bound_chain, guzman_luca, ChainMode, FormLabel, HeightFactor, LinearFormSpec};
use repdigit_prover::prover::Certificate;
use repdigit_prover::reduction::*;
use repdigit_prover::search::{concat_value, decompose, search, ConcatPattern};
use repdigit_prover::sequence::{certify_range, RecurrenceDef};
use repdigit_prover::{Ball, Dyadic, PrecisionPolicy};

const THEOREM_VALUES: [u64; 12] = [114, 151, 200, 265, 351, 465, 616, 816, 3329, 4410, 7739, 922111];
const PUBLISHED_Y: [u64; 3] = [62, 66, 546];
const PUBLISHED_TAILS: [&str; 3] = ["974051600", "740408498", "580710675"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn lit(s: &str) -> Ball {
    Ball::from_decimal(s, 256).unwrap()
}

fn le(a: &Ball, b: &Ball) -> bool {
    a.certify_le(b) == Some(true)
}

fn x0() -> BigUint {
    BigUint::from(2u32) * BigUint::from(10u32).pow(56)
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn solution_set() -> Outcome {
    let t = Instant::now();
    let sols = search(1, 560, &RecurrenceDef::padovan()).unwrap();
    let elapsed = t.elapsed();
    let values: Vec<BigUint> = sols.iter().map(|s| s.value.clone()).collect();
    let expected: Vec<BigUint> = THEOREM_VALUES.iter().map(|&v| v.into()).collect();
    outcome(
        values == expected && elapsed < Duration::from_secs(60),
        format!(
            "{} values, exact match {}, {}",
            values.len(),
            values == expected,
            secs(elapsed)
        ),
    )
}

/// Returns the outcome and whether the failure is exactly the known one.
fn binet_suite() -> (Outcome, bool) {
    let policy = PrecisionPolicy::default();
    let t = Instant::now();
    let binet = certify_range(500, &policy, |d, n| d.binet_error_holds(n)).unwrap();
    let growth = certify_range(500, &policy, |d, n| d.growth_bracket_holds(n)).unwrap();
    let elapsed = t.elapsed();
    let pass = binet.is_empty() && growth.is_empty() && elapsed < Duration::from_secs(60);
    let known = binet.is_empty() && growth == [3];
    (
        outcome(
            pass,
            format!(
                "Binet error failures {binet:?}, growth bracket failures {growth:?}, {}",
                secs(elapsed)
            ),
        ),
        known,
    )
}

fn matveev_constants() -> Outcome {
    let spec = LinearFormSpec::standard(FormLabel::Gamma1, HeightFactor::constant(lit("16.32")), 256).unwrap();
    let (g1, _) = spec.coefficient(256).unwrap();
    let chain = bound_chain(ChainMode::Published, &PrecisionPolicy::default()).unwrap();
    let checks = [
        ("G1 >= 8.50e13", le(&lit("8.50e13"), &g1)),
        ("G1 <= 8.58e13", le(&g1, &lit("8.58e13"))),
        ("K1 <= 8.59e13", le(&chain.k1, &lit("8.59e13"))),
        ("K2 <= 1.37e27", le(&chain.k2, &lit("1.37e27"))),
        ("K3 <= 4.35e48", le(&chain.k3, &lit("4.35e48"))),
        ("H <= 15.6e48", le(&chain.h, &lit("15.6e48"))),
        ("chain", chain.all_hold()),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!("G1 = {:.4e}, failed {failed:?}", g1.to_f64()),
    )
}

fn absolute_bound() -> Outcome {
    let x = guzman_luca(3, &lit("15.6e48")).unwrap();
    let lo = BigUint::from(17u32) * BigUint::from(10u32).pow(55);
    let in_window = lo <= x && x <= x0();
    let s = x.to_string();
    outcome(
        in_window,
        format!("8H(ln H)^3 = {}.{}e{}", &s[..1], &s[1..4], s.len() - 1),
    )
}

fn convergents(e: &CFExpansion) -> Outcome {
    let mut found = Vec::new();
    for (round, tail) in (1u8..=3).zip(PUBLISHED_TAILS) {
        let q = published_denominator(round);
        let hit = e.index_of_denominator(&q).filter(|_| q.to_string().ends_with(tail));
        found.push(hit);
    }
    outcome(
        found.iter().all(Option::is_some) && e.check_invariants().is_ok(),
        format!("indices {found:?} among {} certified convergents", e.len()),
    )
}

fn rounds(cert: &Certificate, e: &CFExpansion) -> Outcome {
    let published: Vec<u64> = (1..=3).map(|r| cert.round_bound(r).unwrap()).collect();
    let fallbacks: Vec<u64> = cert.reduction_rounds.iter().map(|r| r.fallbacks).collect();
    let mut auto = Vec::new();
    let mut r3_time = Duration::ZERO;
    let base = RoundConfig {
        policy: ConvergentPolicy::Increasing,
        ..RoundConfig::new(1, x0())
    };
    for round in 1..=3u8 {
        let cfg = RoundConfig {
            round,
            ..base
                .clone()
                .with_bounds(auto.first().copied().unwrap_or(0), auto.get(1).copied().unwrap_or(0))
        };
        let t = Instant::now();
        let r = run_round(&cfg, e).unwrap();
        if round == 3 {
            r3_time = t.elapsed();
        }
        auto.push(r.max_y);
    }
    let within = auto.iter().zip(PUBLISHED_Y).all(|(&a, p)| a <= p + 4);
    let pass = published == PUBLISHED_Y && within && auto[2] <= 560 && r3_time < Duration::from_secs(1800);
    outcome(
        pass,
        format!(
            "published-first {published:?} (fallbacks {fallbacks:?}), automatic {auto:?}, round 3 {} on {} threads",
            secs(r3_time),
            rayon::current_num_threads()
        ),
    )
}

fn end_to_end() -> (Outcome, Option<Certificate>) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let t = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_repdigit-prover"))
        .args(["prove", "--output"])
        .arg(&path)
        .stderr(Stdio::null())
        .status()
        .unwrap();
    let elapsed = t.elapsed();
    let cert: Option<Certificate> = std::fs::read_to_string(&path)
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok());
    let Some(c) = cert else {
        return (
            outcome(false, format!("no certificate, exit {:?}", status.code())),
            None,
        );
    };
    let k = &c.contradiction;
    let pass = status.code() == Some(0) && k.proof_complete && c.final_bound <= 560 && k.hypothesis_n_at_least == 561;
    (
        outcome(
            pass,
            format!(
                "exit {:?}, proof_complete {}, n <= {} against n >= {}, {}",
                status.code(),
                k.proof_complete,
                c.final_bound,
                k.hypothesis_n_at_least,
                secs(elapsed)
            ),
        ),
        Some(c),
    )
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn brute_force_has_split(n: u64) -> bool {
    let s = n.to_string().into_bytes();
    let constant = |w: &[u8]| w.iter().all(|&c| c == w[0]);
    (1..s.len()).any(|i| (i + 1..s.len()).any(|j| constant(&s[..i]) && constant(&s[i..j]) && constant(&s[j..])))
}

fn encloses_ratio(ball: &Ball, p: &BigInt, q: &BigInt) -> bool {
    let (pd, qd) = (Dyadic::from_int(p.clone()), Dyadic::from_int(q.clone()));
    ball.lo().mul(&qd) <= pd && pd <= ball.hi().mul(&qd)
}

fn property_suites(e: &CFExpansion) -> Outcome {
    let mut failed = Vec::new();

    let deep = CFExpansion::of_ball(&theta(8192).unwrap(), usize::MAX);
    if e.check_invariants().is_err() || deep.check_invariants().is_err() || deep.len() < e.len() {
        failed.push("cf invariants");
    }

    let pattern = (1u8..=9, 0u8..=9, 0u8..=9, 1u32..=10, 1u32..=10, 1u32..=10)
        .prop_map(|(a, b, c, l, m, k)| ConcatPattern::new(a, l, b, m, c, k).unwrap());
    let round_trip = runner(10_000).run(&pattern, |p| {
        let v = concat_value(&p).unwrap();
        let cuts = decompose(&v).unwrap();
        prop_assert!(cuts.contains(&p));
        for q in cuts {
            prop_assert_eq!(concat_value(&q).unwrap(), v.clone());
        }
        Ok(())
    });
    if round_trip.is_err() {
        failed.push("round trip");
    }

    if !(100u64..=1_000_000).all(|n| !decompose(&BigUint::from(n)).unwrap().is_empty() == brute_force_has_split(n)) {
        failed.push("decompose oracle");
    }

    let rational = (-1_000_000i64..1_000_000, 1i64..1_000_000);
    let arith = runner(2_000).run(
        &(rational.clone(), rational, 24u32..256),
        |((an, ad), (bn, bd), prec)| {
            let ball = |n: i64, d: i64| Ball::from_ratio(&BigInt::from(n), &BigInt::from(d), prec).unwrap();
            let (a, b) = (ball(an, ad), ball(bn, bd));
            let (an, ad, bn, bd) = (BigInt::from(an), BigInt::from(ad), BigInt::from(bn), BigInt::from(bd));
            prop_assert!(encloses_ratio(&a.add(&b), &(&an * &bd + &bn * &ad), &(&ad * &bd)));
            prop_assert!(encloses_ratio(&a.sub(&b), &(&an * &bd - &bn * &ad), &(&ad * &bd)));
            prop_assert!(encloses_ratio(&a.mul(&b), &(&an * &bn), &(&ad * &bd)));
            Ok(())
        },
    );
    if arith.is_err() {
        failed.push("enclosure soundness");
    }

    outcome(
        failed.is_empty(),
        format!("{} and {} convergents checked, failed {failed:?}", e.len(), deep.len()),
    )
}

fn main() -> ExitCode {
    let mut unexpected = 0;
    let mut report = |id: u32, name: &str, o: &Outcome, expected_failure: bool| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && expected_failure {
            " (known, see notes)"
        } else {
            ""
        };
        println!("criterion {id} {name}: {verdict}{note} | {}", o.detail);
        if !o.pass && !expected_failure {
            unexpected += 1;
        }
    };

    report(1, "solution set", &solution_set(), false);
    let (binet, known) = binet_suite();
    report(2, "Binet and growth bounds", &binet, known);
    report(3, "Matveev constants", &matveev_constants(), false);
    report(4, "absolute bound", &absolute_bound(), false);
    let e = theta_expansion(&x0(), RoundConfig::DEFAULT_MARGIN, &PrecisionPolicy::default()).unwrap();
    report(5, "published convergents", &convergents(&e), false);
    let (e2e, cert) = end_to_end();
    match &cert {
        Some(c) => report(6, "reduction rounds", &rounds(c, &e), false),
        None => report(6, "reduction rounds", &outcome(false, "no certificate"), false),
    }
    report(7, "end to end", &e2e, false);
    report(8, "property suites", &property_suites(&e), false);

    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failures");
        ExitCode::FAILURE
    }
}
