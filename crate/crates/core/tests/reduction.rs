use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::Pow;
use proptest::prelude::*;
use repdigit_prover::reduction::rounds::{candidate_order, round_reducer};
use repdigit_prover::reduction::*;
use repdigit_prover::sequence::alpha_enclosure;
use repdigit_prover::{Ball, PrecisionPolicy};

fn x0() -> BigUint {
    BigUint::from(2u32) * BigUint::from(10u32).pow(56u32)
}

fn expansion() -> &'static CFExpansion {
    static E: OnceLock<CFExpansion> = OnceLock::new();
    E.get_or_init(|| theta_expansion(&x0(), RoundConfig::DEFAULT_MARGIN, &PrecisionPolicy::default()).unwrap())
}

/// Quotients of lnα/ln10 from an independent 150-digit evaluation.
const THETA_PREFIX: [u32; 12] = [0, 8, 5, 3, 3, 1, 5, 1, 8, 4, 6, 1];

#[test]
fn theta_expansion_is_certified() {
    let e = expansion();
    e.check_invariants().unwrap();
    let first: Vec<BigInt> = THETA_PREFIX.iter().map(|&a| BigInt::from(a)).collect();
    assert_eq!(&e.partial_quotients[..first.len()], &first[..]);
    let idx = e.first_above(&x0()).unwrap();
    assert_eq!(idx, 118);
    assert_eq!(e.len(), idx + RoundConfig::DEFAULT_MARGIN + 1);
}

#[test]
fn published_denominators_are_convergents() {
    let e = expansion();
    for (round, idx) in [(1u8, 121usize), (2, 124), (3, 125)] {
        let q = published_denominator(round);
        assert_eq!(e.index_of_denominator(&q), Some(idx));
    }
    // numerators as published
    assert_eq!(
        e.convergents[121].0.to_string(),
        "17548495448098062534665425097069587403994668418373610729747"
    );
    assert_eq!(
        e.convergents[125].0.to_string(),
        "2616187734565998164447356816798847641018036629887990573914437"
    );
}

#[test]
fn golden_ratio_conjugate_is_all_ones() {
    let sqrt5 = Ball::from_int(5, 512).sqrt().unwrap();
    let phi = sqrt5.sub(&Ball::one(512)).mul_pow2(-1);
    let e = CFExpansion::of_ball(&phi, 200);
    assert!(e.len() > 150);
    assert_eq!(e.partial_quotients[0], BigInt::from(0));
    assert!(e.partial_quotients[1..].iter().all(|a| *a == BigInt::from(1)));
    e.check_invariants().unwrap();
    // denominators are Fibonacci numbers
    assert_eq!(e.convergents[10].1, BigInt::from(89));
}

#[test]
fn half_with_even_q_fails_and_scan_advances() {
    let e = expansion();
    let prec = 512;
    let problem = ReductionProblem {
        c: Ball::from_int(22, prec),
        delta: repdigit_prover::precision::ln10(prec),
        x0: x0(),
        expansion: e,
        psi: Ball::from_ratio(&BigInt::from(1), &BigInt::from(2), prec).unwrap(),
        combo: Combo::Round1 { a: 1 },
        margin: RoundConfig::DEFAULT_MARGIN,
    };
    let out = deweger_reduce(&problem).unwrap();
    assert_eq!(out.status, Status::Reduced);
    let first = e.first_above(&x0()).unwrap();
    // ‖q/2‖ is 0 for even q and 1/2 for odd q, so a convergent is rejected
    // exactly when q is even or 2X0/q >= 1/2
    for i in first..out.q_index {
        let q = e.q(i);
        assert!(!q.bit(0) || x0() * 4u32 >= q, "q_{i} should have passed");
    }
    assert!(out.q_used.bit(0) && x0() * 4u32 < out.q_used);
    assert!(out.q_index > first);
}

#[test]
fn round_one_with_published_convergent() {
    let cfg = RoundConfig::new(1, x0());
    let r = run_round(&cfg, expansion()).unwrap();
    assert_eq!(r.max_y, 62);
    assert_eq!(r.combos, 9);
    assert_eq!(r.fallbacks, 0);
    assert_eq!(r.candidates[0].q, published_denominator(1));
    assert_eq!(r.candidates[0].combos_reduced, 9);
}

#[test]
fn round_two_with_published_convergent() {
    let cfg = RoundConfig::new(2, x0()).with_bounds(62, 0);
    let start = Instant::now();
    let r = run_round(&cfg, expansion()).unwrap();
    println!("round 2: {:?}, fallbacks {}", start.elapsed(), r.fallbacks);
    for f in &r.fallback_examples {
        println!("  {:?} -> q_{} y {:?}", f.combo, f.q_index, f.y_bound);
    }
    assert_eq!(r.max_y, 66);
    assert_eq!(r.combos, 9 * 10 * 62);
}

#[test]
fn round_three_slice() {
    let cfg = RoundConfig::new(3, x0()).with_bounds(4, 66);
    let start = Instant::now();
    let r = run_round(&cfg, expansion()).unwrap();
    println!(
        "round 3 slice: {} combos in {:?}, max {}",
        r.combos,
        start.elapsed(),
        r.max_y
    );
    assert!(r.max_y <= 546);
}

#[test]
fn published_first_order_puts_published_q_first() {
    let e = expansion();
    let order = candidate_order(e, &x0(), ConvergentPolicy::PublishedFirst, 3, 30).unwrap();
    assert_eq!(order[0], 125);
    assert_eq!(&order[1..8], &[118, 119, 120, 121, 122, 123, 124]);
    assert_eq!(order.len(), 31);
    let inc = candidate_order(e, &x0(), ConvergentPolicy::Increasing, 3, 30).unwrap();
    assert_eq!(inc, (118..=148).collect::<Vec<_>>());
}

#[test]
fn lemma_bounds_of_published_convergents() {
    // ln(q^2 c / (ln10 X0)) / delta, evaluated independently at 120 digits:
    // 62.994, 66.100, 546.148
    let e = expansion();
    for (round, y) in [(1u8, 62u64), (2, 66), (3, 546)] {
        let cfg = RoundConfig::new(round, x0()).with_bounds(1, 1);
        let (reducer, _) = round_reducer(&cfg, e).unwrap();
        assert_eq!(reducer.candidates[0].q, published_denominator(round));
        assert_eq!(reducer.candidates[0].y_bound, y);
    }
}

/// Small deterministic generator for picking sample combos.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self, n: u64) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 33) % n
    }

    fn combo3(&mut self) -> Combo {
        Combo::Round3 {
            a: 1 + self.next(9) as u8,
            b: self.next(10) as u8,
            c: self.next(10) as u8,
            l: 1 + self.next(62),
            m: 1 + self.next(66),
        }
    }
}

#[test]
fn reduced_outcomes_recertify_at_double_precision() {
    let e = expansion();
    let mut rng = Lcg(7);
    for round in [2u8, 3] {
        let cfg = RoundConfig::new(round, x0()).with_bounds(62, 66);
        let (reducer, ctx) = round_reducer(&cfg, e).unwrap();
        let fine = PsiContext::new(2 * ctx.prec).unwrap();
        for _ in 0..50 {
            let combo = match round {
                2 => Combo::Round2 {
                    a: 1 + rng.next(9) as u8,
                    b: rng.next(10) as u8,
                    l: 1 + rng.next(62),
                },
                _ => rng.combo3(),
            };
            let out = reducer
                .reduce(combo, &|bits| PsiContext::new(bits)?.psi(combo, cfg.sign))
                .unwrap();
            assert_eq!(out.status, Status::Reduced);
            let psi = fine.psi(combo, cfg.sign).unwrap();
            assert!(out.psi.sub(&psi).contains_zero());
            assert!(reducer.verify(&out, &psi), "{combo:?}");
        }
    }
}

#[test]
fn no_solutions_just_above_the_reduced_bound() {
    // min over k of |Λ₃| is ln10·‖ψ − nϑ‖; above Y it must exceed 5·α^(−n)
    let e = expansion();
    let cfg = RoundConfig::new(3, x0()).with_bounds(62, 66);
    let (reducer, ctx) = round_reducer(&cfg, e).unwrap();
    let prec = ctx.prec;
    let alpha = alpha_enclosure(prec);
    let ln10 = repdigit_prover::precision::ln10(prec);
    let theta = e.theta.rounded(prec);
    let mut rng = Lcg(11);
    for _ in 0..20 {
        let combo = rng.combo3();
        let out = reducer.reduce(combo, &|_| ctx.psi(combo, cfg.sign)).unwrap();
        let y = out.y_bound.unwrap();
        for n in y + 1..=y + 50 {
            let x = out.psi.sub(&theta.mul_int(&BigInt::from(n)));
            let (_, lower) = x.nearest_int_distance().unwrap();
            let min_lambda = Ball::exact(lower, prec).mul(&ln10);
            let rhs = Ball::from_int(5, prec).mul(&alpha.powi(-(n as i64)).unwrap());
            assert_eq!(rhs.certify_lt(&min_lambda), Some(true), "{combo:?} n = {n}");
        }
    }
}

#[test]
fn round_result_is_independent_of_thread_count() {
    let cfg = RoundConfig::new(3, x0()).with_bounds(2, 66);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_round(&cfg, expansion()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn failing_round_reports_combos() {
    // with no fallback the published round-2 convergent misses (5, 4, 33)
    let mut cfg = RoundConfig::new(2, x0()).with_bounds(62, 0);
    cfg.margin = 0;
    match run_round(&cfg, expansion()) {
        Err(ReductionError::RoundFailed { round, failures }) => {
            assert_eq!(round, 2);
            assert_eq!(failures, vec![Combo::Round2 { a: 5, b: 4, l: 33 }]);
        }
        other => panic!("expected a failed round, got {other:?}"),
    }
}

#[test]
fn round_config_validation() {
    assert!(matches!(
        run_round(&RoundConfig::new(2, x0()), expansion()),
        Err(ReductionError::InvalidInput(_))
    ));
    assert!(matches!(
        run_round(&RoundConfig::new(4, x0()), expansion()),
        Err(ReductionError::InvalidInput(_))
    ));
    // X0 beyond the expansion
    let far = BigUint::from(10u32).pow(100u32);
    assert!(matches!(
        run_round(&RoundConfig::new(1, far), expansion()),
        Err(ReductionError::ExpansionTooShort { .. })
    ));
}

#[test]
fn outcome_report_round_trips() {
    let cfg = RoundConfig::new(1, x0());
    let r = run_round(&cfg, expansion()).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: RoundResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let w = &r.worst_cases[0];
    assert_eq!(w.q.to_string(), PUBLISHED_DENOMINATORS[0]);
    assert!(w.psi.mid.len() > 70);
}

fn exact_cf(mut n: BigInt, mut d: BigInt) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut out = Vec::new();
    while d != BigInt::from(0) {
        let a = n.div_floor(&d);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        out.push(a);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ball_quotients_prefix_exact_expansion(n in -100_000i64..100_000, d in 1i64..100_000, prec in 8u32..200) {
        let ball = Ball::from_ratio(&BigInt::from(n), &BigInt::from(d), prec).unwrap();
        let certified = repdigit_prover::reduction::cf::certified_quotients(&ball, usize::MAX);
        let exact = exact_cf(BigInt::from(n), BigInt::from(d));
        prop_assert!(certified.len() <= exact.len());
        prop_assert_eq!(&exact[..certified.len()], &certified[..]);
    }

    #[test]
    fn quadratic_irrational_invariants(k in 2u32..10_000, prec in 64u32..600) {
        let r = (k as f64).sqrt() as u32;
        prop_assume!(r * r != k);
        let ball = Ball::from_int(k, prec).sqrt().unwrap();
        let e = CFExpansion::of_ball(&ball, usize::MAX);
        prop_assert!(e.len() > 2);
        prop_assert_eq!(&e.partial_quotients[0], &BigInt::from(r));
        e.check_invariants().map_err(TestCaseError::fail)?;
    }
}
