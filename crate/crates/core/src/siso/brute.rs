use super::{DecodeResult, OpCount, Ring};
use crate::codes::{unpack, LinearCode};
use crate::error::{Error, Result};

const MAX_K: usize = 22;

/// Exact per-bit marginals by enumerating every codeword. Sum-product is evaluated in
/// the log domain (identical marginals to min*-sum).
pub fn brute_force_siso(code: &LinearCode, input: &[f64], ring: Ring) -> Result<DecodeResult> {
    if input.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: input.len(),
        });
    }
    if code.k() > MAX_K {
        return Err(Error::SizeGuard(format!(
            "2^{} codewords (limit 2^{MAX_K})",
            code.k()
        )));
    }
    let n = code.n();
    let mut best = vec![[f64::INFINITY; 2]; n];
    let mut evidence = f64::INFINITY;
    let mut ops = OpCount::default();
    code.for_each_codeword(|w| {
        let bits = unpack(w, n);
        let metric: f64 = bits
            .iter()
            .zip(input)
            .filter(|(&b, _)| b == 1)
            .map(|(_, &l)| l)
            .sum();
        ops.additions += bits.iter().filter(|&&b| b == 1).count() as u64;
        for (slot, &b) in best.iter_mut().zip(&bits) {
            slot[b as usize] = ring.metric_plus(slot[b as usize], metric);
        }
        evidence = ring.metric_plus(evidence, metric);
        ops.comparisons += n as u64 + 1;
    })?;
    let app = best.iter().map(|m| m[1] - m[0]).collect();
    Ok(DecodeResult::from_app(input, app, ops, evidence))
}
