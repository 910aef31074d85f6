use std::time::Instant;

use num_bigint::BigUint;
use proptest::prelude::*;
use repdigit_prover::search::*;
use repdigit_prover::sequence::RecurrenceDef;

const THEOREM_VALUES: [u64; 12] = [114, 151, 200, 265, 351, 465, 616, 816, 3329, 4410, 7739, 922111];

/// Independent oracle: try every pair of cut points on the digit string.
fn brute_force_has_split(n: u64) -> bool {
    let s: Vec<char> = n.to_string().chars().collect();
    let constant = |w: &[char]| w.iter().all(|&c| c == w[0]);
    let len = s.len();
    for i in 1..len {
        for j in (i + 1)..len {
            if constant(&s[..i]) && constant(&s[i..j]) && constant(&s[j..]) {
                return true;
            }
        }
    }
    false
}

#[test]
fn theorem_solution_set() {
    let start = Instant::now();
    let sols = search(1, 560, &RecurrenceDef::padovan()).unwrap();
    let values: Vec<BigUint> = sols.iter().map(|s| s.value.clone()).collect();
    let expected: Vec<BigUint> = THEOREM_VALUES.iter().map(|&v| BigUint::from(v)).collect();
    assert_eq!(values, expected);
    assert!(start.elapsed().as_secs() < 60);
    for s in &sols {
        assert_eq!(s.indices, vec![s.n]);
        assert_eq!(s.value, repdigit_prover::sequence::padovan_exact(s.n));
        for p in &s.patterns {
            assert_eq!(concat_value(p).unwrap(), s.value);
        }
    }
    assert_eq!(sols[0].n, 18);
    assert_eq!(sols[0].case_tag, CaseTag::AEqB);
    assert_eq!(sols[2].case_tag, CaseTag::BEqC);
    assert_eq!(sols.last().unwrap().case_tag, CaseTag::AllDistinct);
}

#[test]
fn decompose_matches_oracle_up_to_a_million() {
    for n in 100u64..=1_000_000 {
        let found = !decompose(&BigUint::from(n)).unwrap().is_empty();
        assert_eq!(found, brute_force_has_split(n), "N = {n}");
    }
}

#[test]
fn every_three_digit_number_splits() {
    for n in 100u32..=999 {
        let d = decompose(&BigUint::from(n)).unwrap();
        assert_eq!(d.len(), 1, "N = {n}");
        assert_eq!((d[0].l, d[0].m, d[0].k), (1, 1, 1));
    }
}

#[test]
fn duplicate_values_are_merged() {
    // 3, 0, 2, 3, 2, 5, 5, 7, 10, 12, 17, 22, 29, 39, 51, 68, 90, 119, ...
    let perrin = RecurrenceDef::perrin();
    let sols = search(1, 40, &perrin).unwrap();
    assert!(sols.iter().all(|s| s.value >= BigUint::from(100u32)));
    // a recurrence that repeats a three-digit value
    let flat = RecurrenceDef {
        initial_terms: [111, 0, 111],
    };
    let sols = search(1, 6, &flat).unwrap();
    // terms: 111, 0, 111, 111, 111, 222, 222
    let v111 = sols.iter().find(|s| s.value == BigUint::from(111u32)).unwrap();
    assert_eq!(v111.indices, vec![2, 3, 4]);
    let v222 = sols.iter().find(|s| s.value == BigUint::from(222u32)).unwrap();
    assert_eq!(v222.indices, vec![5, 6]);
    assert_eq!(v222.case_tag, CaseTag::AllEqual);
}

#[test]
fn solution_json_shape() {
    let sols = search(19, 19, &RecurrenceDef::padovan()).unwrap();
    let v = serde_json::to_value(&sols).unwrap();
    assert_eq!(v[0]["value"], "151");
    assert_eq!(v[0]["case_tag"], "all_distinct");
    assert_eq!(v[0]["patterns"][0]["b"], 5);
    let back: Vec<Solution> = serde_json::from_value(v).unwrap();
    assert_eq!(back, sols);
}

fn pattern_strategy(max_len: u32) -> impl Strategy<Value = ConcatPattern> {
    (
        1u8..=9,
        0u8..=9,
        0u8..=9,
        1u32..=max_len - 2,
        1u32..=max_len - 2,
        1u32..=max_len - 2,
    )
        .prop_filter("total length", move |(_, _, _, l, m, k)| l + m + k <= max_len)
        .prop_map(|(a, b, c, l, m, k)| ConcatPattern::new(a, l, b, m, c, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn round_trip(p in pattern_strategy(12)) {
        let v = concat_value(&p).unwrap();
        prop_assert_eq!(v.to_string().len() as u64, p.digit_len());
        let cuts = decompose(&v).unwrap();
        prop_assert!(cuts.contains(&p));
        for q in cuts {
            prop_assert_eq!(concat_value(&q).unwrap(), v.clone());
        }
    }

    #[test]
    fn closed_form_agrees_with_string(p in pattern_strategy(60)) {
        let v = concat_value(&p).unwrap();
        prop_assert_eq!(v.to_string(), p.digit_string());
    }
}
