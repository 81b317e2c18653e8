#![allow(dead_code)]

use ccf_siso::codes::LinearCode;
use ccf_siso::siso::Ring;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every `k`-bit message times the generator, XOR by XOR.
pub fn all_codewords(code: &LinearCode) -> Vec<Vec<u8>> {
    let rows = code.generator().to_rows();
    let n = code.n();
    (0u64..1 << rows.len())
        .map(|msg| {
            let mut w = vec![0u8; n];
            for (i, row) in rows.iter().enumerate() {
                if msg >> i & 1 == 1 {
                    w.iter_mut().zip(row).for_each(|(a, b)| *a ^= b);
                }
            }
            w
        })
        .collect()
}

/// Semiring sum of metrics: plain min or `−ln Σ e^(−x)`.
pub fn metric_sum(ring: Ring, xs: &[f64]) -> f64 {
    let best = xs.iter().copied().fold(f64::INFINITY, f64::min);
    if ring == Ring::MinSum || !best.is_finite() {
        return best;
    }
    best - xs.iter().map(|x| (best - x).exp()).sum::<f64>().ln()
}

/// Per-bit `M(1) − M(0)` over a list of admissible words with the given metrics.
pub fn marginals(words: &[Vec<u8>], metrics: &[f64], ring: Ring, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let split = |b: u8| -> Vec<f64> {
                words
                    .iter()
                    .zip(metrics)
                    .filter(|(w, _)| w[i] == b)
                    .map(|(_, &m)| m)
                    .collect()
            };
            metric_sum(ring, &split(1)) - metric_sum(ring, &split(0))
        })
        .collect()
}

/// Exact APP of a block code for soft input `input` (metric charged on 1-bits).
pub fn oracle_app(code: &LinearCode, input: &[f64], ring: Ring) -> Vec<f64> {
    let words = all_codewords(code);
    let metrics: Vec<f64> = words
        .iter()
        .map(|w| {
            w.iter()
                .zip(input)
                .filter(|(&b, _)| b == 1)
                .map(|(_, l)| l)
                .sum()
        })
        .collect();
    marginals(&words, &metrics, ring, code.n())
}

pub fn random_input<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
