//! Soft-in soft-out decoding under a choice of semiring.
//!
//! Soft values crossing the public API are one real per bit: the metric difference
//! `λ = M(1) − M(0)` with `M = −ln p`, so positive values favour bit 0. Internally the
//! decoders carry unnormalized metric pairs in the element domain of the semiring,
//! which keeps per-round weights intact and makes round marginalization exact.

mod brute;
mod ccf;
mod dual;
mod marginal;
mod semiring;
mod tree;

pub use brute::brute_force_siso;
pub use ccf::{ccf_decode_rm1, ccf_extrinsic_pairs, ccf_op_count_recursion};
pub use dual::{dual_decode, DUAL_LLR_CLAMP};
pub use marginal::marginalize_rounds;
pub use semiring::{min_star, MinStarSum, MinSum, Ring, Semiring, SumProduct};
pub use tree::tree_siso;

use std::ops::{Add, AddAssign, Deref, DerefMut};

/// Per-bit soft information (metric differences).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SoftVector(pub Vec<f64>);

impl SoftVector {
    pub fn zeros(n: usize) -> Self {
        SoftVector(vec![0.0; n])
    }

    /// Bit 1 where the value is strictly negative; ties go to 0.
    pub fn hard_decisions(&self) -> Vec<u8> {
        self.0.iter().map(|&x| (x < 0.0) as u8).collect()
    }

    pub fn negated(&self) -> Self {
        SoftVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn max_abs_diff(&self, other: &SoftVector) -> f64 {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SoftVector {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for SoftVector {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for SoftVector {
    fn from(v: Vec<f64>) -> Self {
        SoftVector(v)
    }
}

/// Operation tallies. `additions` counts semiring products (metric additions),
/// `comparisons` counts semiring sums (min, min* or probability sums).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub additions: u64,
    pub comparisons: u64,
}

impl OpCount {
    pub fn new(additions: u64, comparisons: u64) -> Self {
        OpCount {
            additions,
            comparisons,
        }
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(
            self.additions + rhs.additions,
            self.comparisons + rhs.comparisons,
        )
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.additions += rhs.additions;
        self.comparisons += rhs.comparisons;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Complete soft output.
    pub app: SoftVector,
    /// `app − input`.
    pub extrinsic: SoftVector,
    pub ops: OpCount,
    /// Semiring sum over all admissible configurations of the word metric
    /// `Σ_{c_i = 1} λ_i`. Needed to merge conditional decoding rounds.
    pub evidence: f64,
}

impl DecodeResult {
    pub(crate) fn from_app(input: &[f64], app: Vec<f64>, ops: OpCount, evidence: f64) -> Self {
        let extrinsic = app.iter().zip(input).map(|(a, l)| a - l).collect();
        DecodeResult {
            app: SoftVector(app),
            extrinsic: SoftVector(extrinsic),
            ops,
            evidence,
        }
    }
}

/// A binary message: semiring weights of bit 0 and bit 1.
pub(crate) type Pair = [f64; 2];

/// Element-domain pair for a metric difference, normalized so the better bit has
/// metric 0 (weight `one`).
#[inline]
pub(crate) fn pair_from_llr<S: Semiring>(llr: f64) -> Pair {
    let (m0, m1) = if llr >= 0.0 { (0.0, llr) } else { (-llr, 0.0) };
    [S::from_metric(m0), S::from_metric(m1)]
}

#[inline]
pub(crate) fn llr_from_pair<S: Semiring>(p: Pair) -> f64 {
    S::to_metric(p[1]) - S::to_metric(p[0])
}

/// Offset between the normalized pair metrics and the "relative to all-zero" word
/// metric used for `evidence`.
pub(crate) fn normalization_offset(input: &[f64]) -> f64 {
    input.iter().map(|&l| l.min(0.0)).sum()
}

/// Rescales `values` so the best entry becomes `one` and returns the metric that was
/// removed. An all-`zero` vector is left untouched and reports 0.
pub(crate) fn rescale<S: Semiring>(values: &mut [f64]) -> f64 {
    let best = if S::RING == Ring::SumProduct {
        S::to_metric(values.iter().copied().fold(0.0, f64::max))
    } else {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if !best.is_finite() {
        return 0.0;
    }
    S::normalize(values);
    best
}

/// Scalar semiring arithmetic with operation counting.
pub(crate) struct Counted<S: Semiring> {
    pub ops: OpCount,
    _ring: std::marker::PhantomData<S>,
}

impl<S: Semiring> Counted<S> {
    pub fn new() -> Self {
        Counted {
            ops: OpCount::default(),
            _ring: std::marker::PhantomData,
        }
    }

    #[inline]
    pub fn times(&mut self, a: f64, b: f64) -> f64 {
        self.ops.additions += 1;
        S::times(a, b)
    }

    #[inline]
    pub fn plus(&mut self, a: f64, b: f64) -> f64 {
        self.ops.comparisons += 1;
        S::plus(a, b)
    }

    /// Elementwise product of two binary messages (an equality-node combine).
    #[inline]
    pub fn combine(&mut self, a: Pair, b: Pair) -> Pair {
        [self.times(a[0], b[0]), self.times(a[1], b[1])]
    }

    /// Parity convolution: weight of `x ⊕ y = p` for each `p`.
    #[inline]
    pub fn parity(&mut self, a: Pair, b: Pair) -> Pair {
        let p0 = {
            let x = self.times(a[0], b[0]);
            let y = self.times(a[1], b[1]);
            self.plus(x, y)
        };
        let p1 = {
            let x = self.times(a[0], b[1]);
            let y = self.times(a[1], b[0]);
            self.plus(x, y)
        };
        [p0, p1]
    }
}

/// Runs `$body` with `$S` bound to the semiring type selected by `$ring`.
#[macro_export]
macro_rules! with_semiring {
    ($ring:expr, $S:ident => $body:expr) => {
        match $ring {
            $crate::siso::Ring::MinSum => {
                type $S = $crate::siso::MinSum;
                $body
            }
            $crate::siso::Ring::MinStarSum => {
                type $S = $crate::siso::MinStarSum;
                $body
            }
            $crate::siso::Ring::SumProduct => {
                type $S = $crate::siso::SumProduct;
                $body
            }
        }
    };
}
