mod common;

use ccf_siso::codes::{dual, rm_code, spc_code};
use ccf_siso::gtg::{build_ccf_model, conditioned_model};
use ccf_siso::siso::*;
use common::{max_diff, oracle_app, random_input, rng};
use proptest::prelude::*;

#[test]
fn ccf_matches_enumeration() {
    let mut r = rng(11);
    for m in 2..=5 {
        let code = rm_code(1, m).unwrap();
        for ring in Ring::ALL {
            for _ in 0..50 {
                let input = random_input(&mut r, 1 << m, 6.0);
                let got = ccf_decode_rm1(m, &input, ring).unwrap();
                let want = oracle_app(&code, &input, ring);
                assert!(max_diff(&got.app, &want) < 1e-9, "m = {m}, {ring}");
            }
        }
    }
}

#[test]
fn brute_force_matches_enumeration() {
    let mut r = rng(12);
    let code = dual(&rm_code(2, 4).unwrap()).unwrap();
    for ring in Ring::ALL {
        let input = random_input(&mut r, 16, 4.0);
        let got = brute_force_siso(&code, &input, ring).unwrap();
        assert!(max_diff(&got.app, &oracle_app(&code, &input, ring)) < 1e-9);
    }
}

#[test]
fn dual_decoder_matches_enumeration() {
    let mut r = rng(13);
    for m in 3..=4 {
        let code = rm_code(m - 2, m).unwrap();
        for _ in 0..40 {
            let input = random_input(&mut r, 1 << m, 8.0);
            let got = dual_decode(m, &input, Ring::SumProduct).unwrap();
            let want = oracle_app(&code, &input, Ring::SumProduct);
            assert!(max_diff(&got.app, &want) < 1e-8, "m = {m}");
        }
    }
}

#[test]
fn dual_decoder_evidence_is_the_log_partition() {
    let mut r = rng(14);
    let code = rm_code(2, 4).unwrap();
    let input = random_input(&mut r, 16, 3.0);
    let got = dual_decode(4, &input, Ring::SumProduct).unwrap();
    let want = brute_force_siso(&code, &input, Ring::SumProduct).unwrap();
    assert!((got.evidence - want.evidence).abs() < 1e-9);
}

#[test]
fn rm1_operation_counts_match_reference() {
    let expected = [
        (72, 32),
        (192, 80),
        (480, 192),
        (1152, 448),
        (2688, 1024),
        (6144, 2304),
    ];
    for (m, &(a, c)) in (3..=8).zip(&expected) {
        let ops = ccf_decode_rm1(m, &vec![0.5; 1 << m], Ring::MinSum)
            .unwrap()
            .ops;
        assert_eq!(ops, OpCount::new(a, c), "m = {m}");
        assert_eq!(ccf_op_count_recursion(m), ops);
    }
}

#[test]
fn op_counts_do_not_depend_on_ring_or_input() {
    let mut r = rng(15);
    let input = random_input(&mut r, 32, 5.0);
    let counts: Vec<OpCount> = Ring::ALL
        .iter()
        .map(|&ring| ccf_decode_rm1(5, &input, ring).unwrap().ops)
        .collect();
    assert!(counts.iter().all(|&c| c == counts[0]));
}

#[test]
fn conditional_tree_rounds_recover_the_full_decoder() {
    let mut r = rng(16);
    for m in 3..=5 {
        let model = build_ccf_model(m).unwrap();
        let f = model.degree();
        for ring in Ring::ALL {
            let input = random_input(&mut r, 1 << m, 4.0);
            let rounds: Vec<DecodeResult> = (0..1u32 << f)
                .map(|a| {
                    let bits: Vec<u8> = (0..f).map(|i| (a >> i & 1) as u8).collect();
                    tree_siso(&conditioned_model(&model, &bits).unwrap(), &input, ring).unwrap()
                })
                .collect();
            let merged = marginalize_rounds(&rounds, ring).unwrap();
            let direct = ccf_decode_rm1(m, &input, ring).unwrap();
            assert!(
                merged.app.max_abs_diff(&direct.app) < 1e-9,
                "m = {m}, {ring}"
            );
        }
    }
}

#[test]
fn ring_names() {
    assert_eq!("minstar".parse::<Ring>().unwrap(), Ring::MinStarSum);
    assert_eq!(Ring::SumProduct.to_string(), "sumprod");
}

#[test]
fn min_sum_evidence_brackets_the_exact_metric() {
    // −ln Σ e^(−x) ≤ min x ≤ −ln Σ e^(−x) + ln |set|
    let mut r = rng(17);
    let input = random_input(&mut r, 8, 3.0);
    let a = brute_force_siso(&spc_code(8).unwrap(), &input, Ring::MinSum).unwrap();
    let b = brute_force_siso(&spc_code(8).unwrap(), &input, Ring::MinStarSum).unwrap();
    assert!(b.evidence <= a.evidence + 1e-12);
    assert!(a.evidence <= b.evidence + (128f64).ln() + 1e-12);
}

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::MinSum),
        Just(Ring::MinStarSum),
        Just(Ring::SumProduct)
    ]
}

proptest! {
    #[test]
    fn negating_along_a_codeword_flips_outputs(
        input in proptest::collection::vec(-8.0f64..8.0, 16),
        msg in proptest::collection::vec(0u8..2, 5),
        ring in ring(),
    ) {
        let code = rm_code(1, 4).unwrap();
        let c = code.encode(&msg).unwrap();
        let flipped: Vec<f64> = input
            .iter()
            .zip(&c)
            .map(|(&l, &b)| if b == 1 { -l } else { l })
            .collect();
        let a = ccf_decode_rm1(4, &input, ring).unwrap();
        let b = ccf_decode_rm1(4, &flipped, ring).unwrap();
        for (i, &bit) in c.iter().enumerate() {
            let s = if bit == 1 { -1.0 } else { 1.0 };
            prop_assert!((a.extrinsic[i] * s - b.extrinsic[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn extrinsic_is_app_minus_input(
        input in proptest::collection::vec(-20.0f64..20.0, 32),
        ring in ring(),
    ) {
        let r = ccf_decode_rm1(5, &input, ring).unwrap();
        for (i, &l) in input.iter().enumerate() {
            prop_assert!((r.app[i] - l - r.extrinsic[i]).abs() < 1e-9);
        }
        prop_assert!(r.app.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn dual_outputs_stay_finite(input in proptest::collection::vec(-500.0f64..500.0, 64)) {
        let r = dual_decode(6, &input, Ring::MinStarSum).unwrap();
        prop_assert!(r.extrinsic.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn extrinsic_does_not_depend_on_own_input(
        input in proptest::collection::vec(-6.0f64..6.0, 8),
        j in 0usize..8,
        delta in -5.0f64..5.0,
        ring in ring(),
    ) {
        let mut moved = input.clone();
        moved[j] += delta;
        let a = ccf_decode_rm1(3, &input, ring).unwrap();
        let b = ccf_decode_rm1(3, &moved, ring).unwrap();
        prop_assert!((a.extrinsic[j] - b.extrinsic[j]).abs() < 1e-9);
    }
}
