//! Optimal SISO decoding of RM(1,m) on its conditionally cycle-free generalized
//! Tanner graph.
//!
//! Each codeword is `(u, u+v)` with `u ∈ RM(1,m−1)` and `v ∈ {0…0, 1…1}`. Fixing the
//! hidden repetition value `v` turns every check `c_j + c_(j+h) + v = 0` into an
//! (inverted) equality, so one round per value of `v` is a tree pass:
//!
//! 1. combine the halves into the conditional input `λ'_j = λ_j ⊗ λ_(j+h)` (bit of the
//!    second half flipped when `v = 1`),
//! 2. decode RM(1,m−1) on `λ'` recursively,
//! 3. extend the inner extrinsics back to both halves,
//! 4. merge the two rounds per output bit.
//!
//! The recursion bottoms out at the [4,3,2] parity check, decoded by forward-backward
//! over its two-state parity trellis.
//!
//! Operation accounting: level steps act on whole binary messages and are charged
//! once per message (one addition per equality combine or extension, one comparison
//! per round merge). The [4,3,2] leaf is charged per scalar semiring operation
//! (24 additions, 12 comparisons). This gives `A_m = 3·2^m + 2·A_(m−1)` and
//! `C_m = 2^m + 2·C_(m−1)`.

use super::{
    llr_from_pair, normalization_offset, pair_from_llr, Counted, DecodeResult, OpCount, Pair, Ring,
    Semiring,
};
use crate::error::{Error, Result};
use crate::with_semiring;

#[inline]
fn flip(p: Pair, v: usize) -> Pair {
    if v == 0 {
        p
    } else {
        [p[1], p[0]]
    }
}

/// Extrinsic messages of the [4,3,2] single parity-check code.
fn spc4_extrinsic<S: Semiring>(input: &[Pair], ops: &mut Counted<S>) -> Vec<Pair> {
    debug_assert_eq!(input.len(), 4);
    // alpha[t]: parity of bits 0..=t, beta[t]: parity of bits t..=3.
    let a1 = input[0];
    let a2 = ops.parity(a1, input[1]);
    let a3 = ops.parity(a2, input[2]);
    let b4 = input[3];
    let b3 = ops.parity(input[2], b4);
    let b2 = ops.parity(input[1], b3);
    let e2 = ops.parity(a1, b3);
    let e3 = ops.parity(a2, b4);
    // The overall parity is even, so each bit equals the parity of the others.
    vec![b2, e2, e3, a3]
}

fn recurse<S: Semiring>(input: &[Pair], ops: &mut Counted<S>) -> Vec<Pair> {
    let n = input.len();
    if n == 4 {
        return spc4_extrinsic(input, ops);
    }
    let h = n / 2;
    let mut out = vec![[S::zero(); 2]; n];
    for v in 0..2 {
        let cond: Vec<Pair> = (0..h)
            .map(|j| {
                ops.ops.additions += 1;
                let hi = flip(input[j + h], v);
                [S::times(input[j][0], hi[0]), S::times(input[j][1], hi[1])]
            })
            .collect();
        let inner = recurse(&cond, ops);
        for j in 0..h {
            let hi = flip(input[j + h], v);
            let lo_ext = [S::times(inner[j][0], hi[0]), S::times(inner[j][1], hi[1])];
            let hi_ext = flip(
                [
                    S::times(inner[j][0], input[j][0]),
                    S::times(inner[j][1], input[j][1]),
                ],
                v,
            );
            ops.ops.additions += 2;
            if v == 0 {
                out[j] = lo_ext;
                out[j + h] = hi_ext;
            } else {
                for (slot, e) in [(j, lo_ext), (j + h, hi_ext)] {
                    out[slot] = [S::plus(out[slot][0], e[0]), S::plus(out[slot][1], e[1])];
                }
                ops.ops.comparisons += 2;
            }
        }
    }
    out
}

/// Extrinsic element-domain messages for RM(1,m) given element-domain input pairs.
/// Inputs may be any ring elements, including the signed values used in dual-domain
/// decoding.
pub fn ccf_extrinsic_pairs<S: Semiring>(input: &[[f64; 2]]) -> Result<(Vec<[f64; 2]>, OpCount)> {
    let n = input.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidParameters(format!(
            "RM(1,m) decoding needs length 2^m with m ≥ 2, got {n}"
        )));
    }
    let mut ops = Counted::<S>::new();
    let ext = recurse(input, &mut ops);
    Ok((ext, ops.ops))
}

/// Optimal SISO decoding of RM(1,m) (coordinates as produced by
/// [`crate::codes::rm_code`]`(1, m)`).
pub fn ccf_decode_rm1(m: usize, input: &[f64], ring: Ring) -> Result<DecodeResult> {
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
    with_semiring!(ring, S => decode_with::<S>(input))
}

fn decode_with<S: Semiring>(input: &[f64]) -> Result<DecodeResult> {
    let pairs: Vec<Pair> = input.iter().map(|&l| pair_from_llr::<S>(l)).collect();
    let (ext, ops) = ccf_extrinsic_pairs::<S>(&pairs)?;
    let app: Vec<f64> = ext
        .iter()
        .zip(input)
        .map(|(&e, &l)| llr_from_pair::<S>(e) + l)
        .collect();
    let z = S::plus(
        S::times(pairs[0][0], ext[0][0]),
        S::times(pairs[0][1], ext[0][1]),
    );
    let evidence = S::to_metric(z) + normalization_offset(input);
    Ok(DecodeResult::from_app(input, app, ops, evidence))
}

/// Closed-form operation counts `(A_m, C_m)` from the recursion with
/// `(A_2, C_2) = (24, 12)`.
pub fn ccf_op_count_recursion(m: usize) -> OpCount {
    assert!(m >= 2);
    let (mut a, mut c) = (24u64, 12u64);
    for t in 3..=m {
        a = 3 * (1 << t) + 2 * a;
        c = (1 << t) + 2 * c;
    }
    OpCount::new(a, c)
}
