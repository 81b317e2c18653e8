mod common;

use std::collections::BTreeSet;

use ccf_siso::codes::{dual, repetition_code, rm_code, spc_code, universe_code, LinearCode};
use ccf_siso::siso::{ccf_decode_rm1, Ring};
use ccf_siso::trellis::*;
use common::{marginals, max_diff, oracle_app, random_input, rng};
use proptest::prelude::*;
use rand::Rng;

fn test_codes() -> Vec<(String, LinearCode)> {
    let mut codes = vec![
        ("spc4".to_string(), spc_code(4).unwrap()),
        ("rep4".into(), repetition_code(4).unwrap()),
        ("universe3".into(), universe_code(3).unwrap()),
        ("eh8".into(), rm_code(1, 3).unwrap()),
        ("eh16".into(), rm_code(2, 4).unwrap()),
        ("rm14".into(), rm_code(1, 4).unwrap()),
        ("rm15".into(), rm_code(1, 5).unwrap()),
        ("spc10-dual".into(), dual(&spc_code(10).unwrap()).unwrap()),
        ("spc12".into(), spc_code(12).unwrap()),
        ("rm04".into(), rm_code(0, 4).unwrap()),
    ];
    codes.sort_by_key(|(_, c)| c.n());
    codes
}

#[test]
fn syndrome_trellis_paths_are_the_codewords() {
    for (name, code) in test_codes() {
        assert!(code.k() <= 12);
        let t = syndrome_trellis(&code).unwrap();
        let paths: BTreeSet<Vec<u8>> = t.paths().unwrap().into_iter().collect();
        assert_eq!(paths.len() as u128, t.path_count(), "{name}");
        assert_eq!(paths, code.codeword_set().unwrap(), "{name}");
        assert!(t.max_states() <= 1 << (code.n() - code.k()), "{name}");
    }
}

#[test]
fn bcjr_matches_enumeration_on_all_test_codes() {
    let mut r = rng(21);
    for (name, code) in test_codes() {
        let t = syndrome_trellis(&code).unwrap();
        for ring in Ring::ALL {
            for _ in 0..10 {
                let input = random_input(&mut r, code.n(), 5.0);
                let got = bcjr_siso(&t, &input, ring).unwrap();
                let want = oracle_app(&code, &input, ring);
                assert!(max_diff(&got.app, &want) < 1e-9, "{name} {ring}");
            }
        }
    }
}

#[test]
fn bcjr_agrees_with_ccf_on_rm13() {
    let mut r = rng(22);
    let t = syndrome_trellis(&rm_code(1, 3).unwrap()).unwrap();
    for ring in Ring::ALL {
        let input = random_input(&mut r, 8, 5.0);
        let a = bcjr_siso(&t, &input, ring).unwrap();
        let b = ccf_decode_rm1(3, &input, ring).unwrap();
        assert!(a.app.max_abs_diff(&b.app) < 1e-9);
    }
}

#[test]
fn bcjr_zero_input_and_length_check() {
    let t = syndrome_trellis(&rm_code(1, 4).unwrap()).unwrap();
    let r = bcjr_siso(&t, &[0.0; 16], Ring::SumProduct).unwrap();
    assert!(r.extrinsic.iter().all(|x| x.abs() < 1e-12));
    assert!(bcjr_siso(&t, &[0.0; 15], Ring::SumProduct).is_err());
}

/// Precoder and partial-response filter run directly on an input with its flush tail.
fn direct_channel(x: &[u8]) -> (Vec<f64>, Vec<u8>) {
    let mut y: Vec<u8> = Vec::new();
    let yb = |y: &[u8], t: isize| if t >= 0 { y[t as usize] } else { 0 };
    let mut full = x.to_vec();
    for t in 0..x.len() + 3 {
        if t >= x.len() {
            full.push(if t < x.len() + 2 {
                yb(&y, t as isize - 2)
            } else {
                0
            });
        }
        let v = full[t] ^ yb(&y, t as isize - 2);
        y.push(v);
    }
    let b = |t: isize| 1.0 - 2.0 * yb(&y, t) as f64;
    let z = (0..y.len() as isize)
        .map(|t| b(t) + b(t - 1) - b(t - 2) - b(t - 3))
        .collect();
    (z, y)
}

#[test]
fn channel_outputs_match_direct_filtering() {
    let mut r = rng(23);
    for len in [1, 2, 5, 40] {
        let x: Vec<u8> = (0..len).map(|_| r.random::<bool>() as u8).collect();
        let (z, y) = direct_channel(&x);
        assert_eq!(ChannelModel::noiseless(&x), z);
        assert_eq!(&y[len..], &[0, 0, 0]);
        assert!(z.iter().all(|v| [-4.0, -2.0, 0.0, 2.0, 4.0].contains(v)));
    }
}

#[test]
fn all_zero_input_stays_at_level_zero() {
    assert!(ChannelModel::noiseless(&[0; 20]).iter().all(|&z| z == 0.0));
}

#[test]
fn precoder_is_recursive() {
    let mut x = vec![0u8; 256];
    x[0] = 1;
    let y = ChannelModel::precode(&x);
    // 1/(1⊕D²): the impulse repeats every second step for the whole horizon
    for (t, &bit) in y.iter().enumerate().take(256) {
        assert_eq!(bit, (t % 2 == 0) as u8);
    }
}

#[test]
fn channel_siso_matches_enumeration_over_all_inputs() {
    let len = 12;
    let mut r = rng(24);
    let words: Vec<Vec<u8>> = (0u32..1 << len)
        .map(|w| (0..len).map(|i| (w >> i & 1) as u8).collect())
        .collect();
    let outputs: Vec<Vec<f64>> = words.iter().map(|w| direct_channel(w).0).collect();
    for trial in 0..100 {
        let ring = Ring::ALL[trial % 3];
        let sigma2 = r.random_range(0.3..2.0);
        let truth = &outputs[r.random_range(0..outputs.len())];
        let z: Vec<f64> = truth
            .iter()
            .map(|s| s + r.random_range(-1.5..1.5))
            .collect();
        let priors = random_input(&mut r, len, 2.0);
        let metrics: Vec<f64> = words
            .iter()
            .zip(&outputs)
            .map(|(w, s)| {
                let channel: f64 = z
                    .iter()
                    .zip(s)
                    .map(|(a, b)| (a - b) * (a - b) / (2.0 * sigma2))
                    .sum();
                let prior: f64 = w
                    .iter()
                    .zip(&priors)
                    .filter(|(&b, _)| b == 1)
                    .map(|(_, l)| l)
                    .sum();
                channel + prior
            })
            .collect();
        let want = marginals(&words, &metrics, ring, len);
        let got = channel_siso(&z, &priors, sigma2, ring).unwrap();
        assert!(max_diff(&got.app, &want) < 1e-8, "trial {trial}, {ring}");
    }
}

#[test]
fn vanishing_noise_recovers_the_input() {
    let mut r = rng(25);
    let x: Vec<u8> = (0..200).map(|_| r.random::<bool>() as u8).collect();
    let z = ChannelModel::noiseless(&x);
    for ring in Ring::ALL {
        let out = channel_siso(&z, &[0.0; 200], 1e-4, ring).unwrap();
        assert_eq!(out.app.hard_decisions(), x);
    }
}

#[test]
fn uninformative_observations_give_no_extrinsic() {
    let mut r = rng(26);
    let z: Vec<f64> = (0..13).map(|_| r.random_range(-4.0..4.0)).collect();
    let out = channel_siso(&z, &[0.0; 10], 1e9, Ring::SumProduct).unwrap();
    assert!(out.extrinsic.iter().all(|e| e.abs() < 1e-6));
}

#[test]
fn channel_lengths_and_variance_are_checked() {
    assert!(matches!(
        channel_siso(&[0.0; 5], &[0.0; 3], 1.0, Ring::MinSum),
        Err(ccf_siso::Error::LengthMismatch { .. })
    ));
    assert!(channel_siso(&[0.0; 6], &[0.0; 3], -1.0, Ring::MinSum).is_err());
}

proptest! {
    #[test]
    fn zero_prefix_shifts_extrinsics(
        x in proptest::collection::vec(0u8..2, 6..30),
        noise in proptest::collection::vec(-0.8f64..0.8, 40),
        prefix in 1usize..6,
    ) {
        let z: Vec<f64> = ChannelModel::noiseless(&x)
            .iter()
            .zip(&noise)
            .map(|(a, b)| a + b)
            .collect();
        let mut zp = vec![0.0; prefix];
        zp.extend(&z);
        let a = channel_siso(&z, &vec![0.0; x.len()], 0.7, Ring::MinStarSum).unwrap();
        let priors: Vec<f64> = std::iter::repeat_n(60.0, prefix).chain(vec![0.0; x.len()]).collect();
        let b = channel_siso(&zp, &priors, 0.7, Ring::MinStarSum).unwrap();
        prop_assert!(max_diff(&a.extrinsic, &b.extrinsic[prefix..]) < 1e-6);
    }
}
