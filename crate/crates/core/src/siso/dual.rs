//! SISO decoding of the extended Hamming code RM(m−2,m) through its dual, RM(1,m).
//!
//! With bit probabilities `(p0, p1)` mapped to `(p0 + p1, p0 − p1) = (1, tanh(λ/2))`,
//! the extrinsic of a bit of the dual code satisfies
//!
//! ```text
//! tanh(λ_ext,j / 2) = Σ_{y ∈ RM(1,m), y_j = 1} Π_{i≠j} q_i(y_i)
//!                   / Σ_{y ∈ RM(1,m), y_j = 0} Π_{i≠j} q_i(y_i)
//! ```
//!
//! and both sums are exactly the sum-product extrinsic pair of RM(1,m) on the
//! transformed (signed) inputs, which the CCF recursion computes directly.

use super::ccf::ccf_extrinsic_pairs;
use super::{DecodeResult, Ring, SumProduct};
use crate::error::{Error, Result};

/// Input magnitudes are clipped here before the transform so that `tanh` stays
/// strictly inside (−1, 1).
pub const DUAL_LLR_CLAMP: f64 = 30.0;

const RATIO_LIMIT: f64 = 1.0 - 1e-15;

/// Exact APP decoding of RM(m−2,m) (coordinates of [`crate::codes::rm_code`]).
///
/// The dual-domain recursion runs in probability-difference arithmetic for every
/// `ring`; min*-sum and sum-product describe the same marginals, and a min-sum
/// request also receives the exact APP values. The reported operation count is the
/// RM(1,m) recursion's; the two transforms are not counted.
pub fn dual_decode(m: usize, input: &[f64], ring: Ring) -> Result<DecodeResult> {
    let _ = ring;
    if !(2..=24).contains(&m) {
        return Err(Error::InvalidParameters(format!("m must be ≥ 2, got {m}")));
    }
    let n = 1usize << m;
    if input.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: input.len(),
        });
    }
    let clamped: Vec<f64> = input
        .iter()
        .map(|l| l.clamp(-DUAL_LLR_CLAMP, DUAL_LLR_CLAMP))
        .collect();
    let q: Vec<[f64; 2]> = clamped.iter().map(|&l| [1.0, (0.5 * l).tanh()]).collect();
    let (ext, ops) = ccf_extrinsic_pairs::<SumProduct>(&q)?;

    let app: Vec<f64> = ext
        .iter()
        .zip(input)
        .map(|(e, &l)| {
            let r = (e[1] / e[0]).clamp(-RATIO_LIMIT, RATIO_LIMIT);
            2.0 * r.atanh() + l
        })
        .collect();

    // Σ_{x ∈ dual} Π p_i(x_i) = 2^-(m+1) Σ_{y ∈ RM(1,m)} Π q_i(y_i), with p normalized.
    let z_dual = (q[0][0] * ext[0][0] + q[0][1] * ext[0][1]) / (2 * n) as f64;
    let softplus: f64 = clamped.iter().map(|&l| (-l).exp().ln_1p()).sum();
    let evidence = -z_dual.ln() - softplus;
    Ok(DecodeResult::from_app(input, app, ops, evidence))
}
