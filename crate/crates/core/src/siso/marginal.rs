use super::{DecodeResult, OpCount, Ring, SoftVector};
use crate::error::{Error, Result};

/// Merges conditional decoding rounds into unconditional marginals.
///
/// Each round carries per-bit metric differences plus its `evidence`, which together
/// pin down the absolute metrics `M_v(0)`, `M_v(1)`. The merged metrics are the
/// per-value semiring sums over rounds. Rounds with infinite evidence (no admissible
/// configuration) are skipped. One comparison is charged per bit per extra round.
pub fn marginalize_rounds(rounds: &[DecodeResult], ring: Ring) -> Result<DecodeResult> {
    let first = rounds.first().ok_or(Error::EmptyRounds)?;
    let n = first.app.len();
    if let Some(bad) = rounds.iter().find(|r| r.app.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: bad.app.len(),
        });
    }
    let mut ops = rounds.iter().fold(OpCount::default(), |acc, r| acc + r.ops);
    ops.comparisons += ((rounds.len() - 1) * n) as u64;

    let live: Vec<&DecodeResult> = rounds.iter().filter(|r| r.evidence.is_finite()).collect();
    if live.is_empty() {
        let mut out = first.clone();
        out.ops = ops;
        return Ok(out);
    }
    if live.len() == 1 {
        let mut out = live[0].clone();
        out.ops = ops;
        return Ok(out);
    }

    let input: Vec<f64> = first
        .app
        .iter()
        .zip(first.extrinsic.iter())
        .map(|(a, e)| a - e)
        .collect();

    let mut app = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = [f64::INFINITY; 2];
        for r in &live {
            let l = r.app[i];
            let m0 = r.evidence - ring.metric_plus(0.0, l);
            let m1 = m0 + l;
            acc[0] = ring.metric_plus(acc[0], m0);
            acc[1] = ring.metric_plus(acc[1], m1);
        }
        app.push(acc[1] - acc[0]);
    }
    let evidence = live
        .iter()
        .fold(f64::INFINITY, |acc, r| ring.metric_plus(acc, r.evidence));
    let extrinsic = app.iter().zip(&input).map(|(a, l)| a - l).collect();
    Ok(DecodeResult {
        app: SoftVector(app),
        extrinsic: SoftVector(extrinsic),
        ops,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(app: Vec<f64>, input: &[f64], evidence: f64) -> DecodeResult {
        DecodeResult::from_app(input, app, OpCount::new(3, 1), evidence)
    }

    #[test]
    fn single_round_is_identity() {
        let input = [0.5, -0.2];
        let r = round(vec![1.0, -2.0], &input, 0.3);
        let m = marginalize_rounds(std::slice::from_ref(&r), Ring::MinSum).unwrap();
        assert_eq!(m, r);
    }

    #[test]
    fn identical_rounds_min_sum() {
        let input = [0.5, -0.2, 1.5];
        let r = round(vec![1.0, -2.0, 0.25], &input, -0.7);
        let m = marginalize_rounds(&[r.clone(), r.clone()], Ring::MinSum).unwrap();
        assert!(m.app.max_abs_diff(&r.app) < 1e-12);
        assert_eq!(m.ops, OpCount::new(6, 2 + 3));
    }

    #[test]
    fn empty_rounds() {
        assert_eq!(
            marginalize_rounds(&[], Ring::SumProduct),
            Err(Error::EmptyRounds)
        );
    }

    #[test]
    fn impossible_round_is_ignored() {
        let input = [0.5];
        let a = round(vec![1.0], &input, 0.0);
        let b = round(vec![-3.0], &input, f64::INFINITY);
        let m = marginalize_rounds(&[a.clone(), b], Ring::MinStarSum).unwrap();
        assert_eq!(m.app, a.app);
    }
}
