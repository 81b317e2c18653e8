use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// `min(x, y) − ln(1 + e^(−|x−y|))`, the exact log-domain sum of two metrics.
#[inline]
pub fn min_star(x: f64, y: f64) -> f64 {
    if x == f64::INFINITY {
        return y;
    }
    if y == f64::INFINITY {
        return x;
    }
    x.min(y) - (-(x - y).abs()).exp().ln_1p()
}

/// The algebra soft information is processed under. Elements are `f64`: metrics for
/// the two metric-domain rings, probabilities (weights) for sum-product.
pub trait Semiring: Copy + Send + Sync + 'static {
    const RING: Ring;

    /// Additive identity (an impossible event).
    fn zero() -> f64;
    /// Multiplicative identity (a certain event).
    fn one() -> f64;
    fn plus(a: f64, b: f64) -> f64;
    fn times(a: f64, b: f64) -> f64;
    fn from_metric(m: f64) -> f64;
    fn to_metric(x: f64) -> f64;
    /// Rescales a vector so its best entry becomes `one`. Ratios are preserved.
    fn normalize(values: &mut [f64]);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MinSum;

#[derive(Clone, Copy, Debug, Default)]
pub struct MinStarSum;

#[derive(Clone, Copy, Debug, Default)]
pub struct SumProduct;

fn normalize_metrics(values: &mut [f64]) {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        values.iter_mut().for_each(|v| *v -= best);
    }
}

impl Semiring for MinSum {
    const RING: Ring = Ring::MinSum;

    fn zero() -> f64 {
        f64::INFINITY
    }
    fn one() -> f64 {
        0.0
    }
    #[inline]
    fn plus(a: f64, b: f64) -> f64 {
        a.min(b)
    }
    #[inline]
    fn times(a: f64, b: f64) -> f64 {
        a + b
    }
    fn from_metric(m: f64) -> f64 {
        m
    }
    fn to_metric(x: f64) -> f64 {
        x
    }
    fn normalize(values: &mut [f64]) {
        normalize_metrics(values)
    }
}

impl Semiring for MinStarSum {
    const RING: Ring = Ring::MinStarSum;

    fn zero() -> f64 {
        f64::INFINITY
    }
    fn one() -> f64 {
        0.0
    }
    #[inline]
    fn plus(a: f64, b: f64) -> f64 {
        min_star(a, b)
    }
    #[inline]
    fn times(a: f64, b: f64) -> f64 {
        a + b
    }
    fn from_metric(m: f64) -> f64 {
        m
    }
    fn to_metric(x: f64) -> f64 {
        x
    }
    fn normalize(values: &mut [f64]) {
        normalize_metrics(values)
    }
}

impl Semiring for SumProduct {
    const RING: Ring = Ring::SumProduct;

    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    #[inline]
    fn plus(a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline]
    fn times(a: f64, b: f64) -> f64 {
        a * b
    }
    fn from_metric(m: f64) -> f64 {
        (-m).exp()
    }
    fn to_metric(x: f64) -> f64 {
        -x.ln()
    }
    fn normalize(values: &mut [f64]) {
        let best = values.iter().copied().fold(0.0, f64::max);
        if best > 0.0 {
            values.iter_mut().for_each(|v| *v /= best);
        }
    }
}

/// Runtime choice of semiring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    MinSum,
    MinStarSum,
    SumProduct,
}

impl Ring {
    pub const ALL: [Ring; 3] = [Ring::MinSum, Ring::MinStarSum, Ring::SumProduct];

    /// Semiring sum of two metrics. Sum-product is evaluated in the log domain, where
    /// it coincides with min*.
    #[inline]
    pub fn metric_plus(self, a: f64, b: f64) -> f64 {
        match self {
            Ring::MinSum => a.min(b),
            Ring::MinStarSum | Ring::SumProduct => min_star(a, b),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::MinSum => "min",
            Ring::MinStarSum => "minstar",
            Ring::SumProduct => "sumprod",
        })
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" | "min-sum" | "minsum" => Ok(Ring::MinSum),
            "minstar" | "min*" | "min*-sum" | "minstar-sum" => Ok(Ring::MinStarSum),
            "sumprod" | "sum-product" | "sumproduct" => Ok(Ring::SumProduct),
            other => Err(Error::Parse(format!(
                "unknown ring {other:?} (expected min, minstar or sumprod)"
            ))),
        }
    }
}
