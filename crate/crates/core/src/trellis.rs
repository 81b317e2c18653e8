//! Sectionalized trellises: syndrome trellises of block codes, BCJR forward-backward
//! decoding, and the 8-state trellis of the precoded EPR4 recording channel.

use std::collections::HashMap;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::siso::{rescale, Counted, DecodeResult, Ring, Semiring};
use crate::with_semiring;

/// A labelled transition between consecutive depths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub input: u8,
    /// Code bit for block-code trellises, noiseless channel level for the channel.
    pub output: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub edges: Vec<Edge>,
}

/// `state_counts[t]` states live at depth `t`; section `t` joins depth `t` to `t + 1`.
/// Paths run from `start` at depth 0 to `end` at the last depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Trellis {
    state_counts: Vec<usize>,
    sections: Vec<Section>,
    start: usize,
    end: usize,
}

impl Trellis {
    pub fn new(
        state_counts: Vec<usize>,
        sections: Vec<Section>,
        start: usize,
        end: usize,
    ) -> Result<Self> {
        if state_counts.len() != sections.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} depths for {} sections",
                state_counts.len(),
                sections.len()
            )));
        }
        let last = *state_counts.last().unwrap();
        if start >= state_counts[0] || end >= last {
            return Err(Error::InvalidParameters(
                "start or end state out of range".into(),
            ));
        }
        for (t, sec) in sections.iter().enumerate() {
            for e in &sec.edges {
                if e.from >= state_counts[t] || e.to >= state_counts[t + 1] || e.input > 1 {
                    return Err(Error::InvalidParameters(format!(
                        "malformed edge {e:?} in section {t}"
                    )));
                }
            }
        }
        Ok(Trellis {
            state_counts,
            sections,
            start,
            end,
        })
    }

    pub fn num_sections(&self) -> usize {
        self.sections.len()
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn state_counts(&self) -> &[usize] {
        &self.state_counts
    }

    pub fn max_states(&self) -> usize {
        self.state_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// Number of start-to-end paths.
    pub fn path_count(&self) -> u128 {
        let mut count = vec![0u128; self.state_counts[0]];
        count[self.start] = 1;
        for (t, sec) in self.sections.iter().enumerate() {
            let mut next = vec![0u128; self.state_counts[t + 1]];
            for e in &sec.edges {
                next[e.to] += count[e.from];
            }
            count = next;
        }
        count[self.end]
    }

    /// Input labels of every start-to-end path.
    pub fn paths(&self) -> Result<Vec<Vec<u8>>> {
        let total = self.path_count();
        if total > 1 << 22 {
            return Err(Error::SizeGuard(format!("{total} paths")));
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut labels = Vec::with_capacity(self.sections.len());
        self.walk(0, self.start, &mut labels, &mut out);
        Ok(out)
    }

    fn walk(&self, t: usize, state: usize, labels: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if t == self.sections.len() {
            if state == self.end {
                out.push(labels.clone());
            }
            return;
        }
        for e in self.sections[t].edges.iter().filter(|e| e.from == state) {
            labels.push(e.input);
            self.walk(t + 1, e.to, labels, out);
            labels.pop();
        }
    }
}

/// Largest number of states allowed at any depth of a syndrome trellis.
pub const MAX_SYNDROME_STATES: usize = 1 << 16;

/// XOR basis indexed by leading bit, for span membership of syndromes.
#[derive(Clone)]
struct SpanBasis([u64; 64]);

impl SpanBasis {
    fn reduce(&self, mut s: u64) -> u64 {
        while s != 0 {
            let top = 63 - s.leading_zeros() as usize;
            if self.0[top] == 0 {
                break;
            }
            s ^= self.0[top];
        }
        s
    }

    fn insert(&mut self, v: u64) {
        let r = self.reduce(v);
        if r != 0 {
            self.0[63 - r.leading_zeros() as usize] = r;
        }
    }
}

/// Wolf trellis: states at depth `t` are the partial syndromes of codeword prefixes,
/// i.e. syndromes reachable from the first `t` coordinates that the remaining
/// coordinates can still cancel.
pub fn syndrome_trellis(code: &LinearCode) -> Result<Trellis> {
    let h = code.parity_check();
    let r = h.rows();
    if r > 64 {
        return Err(Error::SizeGuard(format!("n − k = {r} (limit 64)")));
    }
    let n = code.n();
    let columns: Vec<u64> = (0..n)
        .map(|j| (0..r).fold(0u64, |acc, i| acc | (h.get(i, j) as u64) << i))
        .collect();

    // suffix[t] spans columns t..n.
    let mut suffix = vec![SpanBasis([0; 64]); n + 1];
    for t in (0..n).rev() {
        suffix[t] = suffix[t + 1].clone();
        suffix[t].insert(columns[t]);
    }

    let mut labels: Vec<Vec<u64>> = vec![vec![0]];
    let mut sections = Vec::with_capacity(n);
    for t in 0..n {
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut next = Vec::new();
        let mut edges = Vec::new();
        for (from, &s) in labels[t].iter().enumerate() {
            for bit in 0..2u8 {
                let to_label = if bit == 1 { s ^ columns[t] } else { s };
                if suffix[t + 1].reduce(to_label) != 0 {
                    continue;
                }
                let to = *index.entry(to_label).or_insert_with(|| {
                    next.push(to_label);
                    next.len() - 1
                });
                edges.push(Edge {
                    from,
                    to,
                    input: bit,
                    output: bit as f64,
                });
            }
        }
        if next.len() > MAX_SYNDROME_STATES {
            return Err(Error::SizeGuard(format!(
                "{} states at depth {} (limit {MAX_SYNDROME_STATES})",
                next.len(),
                t + 1
            )));
        }
        labels.push(next);
        sections.push(Section { edges });
    }
    let counts = labels.iter().map(Vec::len).collect();
    Trellis::new(counts, sections, 0, 0)
}

/// Forward-backward on `trellis` with per-edge metrics from `metric`. Returns the
/// per-section metric pairs `(M(0), M(1))` of the edge input bit, the log-domain
/// total over all paths, and the operation count.
fn forward_backward<S: Semiring>(
    trellis: &Trellis,
    metric: impl Fn(usize, &Edge) -> f64,
) -> (Vec<[f64; 2]>, f64, Counted<S>) {
    let n = trellis.num_sections();
    let counts = trellis.state_counts();
    let mut ops = Counted::<S>::new();
    let mut total = 0.0;

    let weights: Vec<Vec<f64>> = trellis
        .sections()
        .iter()
        .enumerate()
        .map(|(t, sec)| {
            let m: Vec<f64> = sec.edges.iter().map(|e| metric(t, e)).collect();
            let shift = m.iter().copied().fold(f64::INFINITY, f64::min);
            let shift = if shift.is_finite() { shift } else { 0.0 };
            total += shift;
            m.iter().map(|&x| S::from_metric(x - shift)).collect()
        })
        .collect();

    let mut alpha = Vec::with_capacity(n + 1);
    let mut a0 = vec![S::zero(); counts[0]];
    a0[trellis.start()] = S::one();
    alpha.push(a0);
    for (t, sec) in trellis.sections().iter().enumerate() {
        let mut next = vec![S::zero(); counts[t + 1]];
        for (e, &w) in sec.edges.iter().zip(&weights[t]) {
            let x = ops.times(alpha[t][e.from], w);
            next[e.to] = ops.plus(next[e.to], x);
        }
        total += rescale::<S>(&mut next);
        alpha.push(next);
    }
    total += S::to_metric(alpha[n][trellis.end()]);

    let mut beta = vec![S::zero(); counts[n]];
    beta[trellis.end()] = S::one();
    let mut pairs = vec![[S::zero(); 2]; n];
    for t in (0..n).rev() {
        let sec = &trellis.sections()[t];
        let mut prev = vec![S::zero(); counts[t]];
        for (e, &w) in sec.edges.iter().zip(&weights[t]) {
            let wb = ops.times(w, beta[e.to]);
            prev[e.from] = ops.plus(prev[e.from], wb);
            let full = ops.times(alpha[t][e.from], wb);
            let slot = &mut pairs[t][e.input as usize];
            *slot = ops.plus(*slot, full);
        }
        rescale::<S>(&mut prev);
        beta = prev;
    }
    let metrics = pairs
        .iter()
        .map(|p| [S::to_metric(p[0]), S::to_metric(p[1])])
        .collect();
    (metrics, total, ops)
}

/// Exact SISO decoding of the code a trellis represents. `input` holds one metric
/// difference per section, charged on edges whose input bit is 1.
pub fn bcjr_siso(trellis: &Trellis, input: &[f64], ring: Ring) -> Result<DecodeResult> {
    if input.len() != trellis.num_sections() {
        return Err(Error::LengthMismatch {
            expected: trellis.num_sections(),
            actual: input.len(),
        });
    }
    with_semiring!(ring, S => {
        let (m, evidence, ops) =
            forward_backward::<S>(trellis, |t, e| if e.input == 1 { input[t] } else { 0.0 });
        let app = m.iter().map(|p| p[1] - p[0]).collect();
        Ok(DecodeResult::from_app(input, app, ops.ops, evidence))
    })
}

/// Bipolar symbol of a bit: 0 → +1, 1 → −1.
#[inline]
pub fn bipolar(bit: u8) -> f64 {
    1.0 - 2.0 * bit as f64
}

/// Samples appended after each block: two precoder flush bits plus one more section
/// for the last ISI tap.
pub const CHANNEL_TAIL: usize = 3;

pub const CHANNEL_STATES: usize = 8;

/// The 1/(1⊕D²) precoder followed by the 1+D−D²−D³ partial-response target with
/// additive white Gaussian noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    sigma2: f64,
}

impl ChannelModel {
    pub const TAPS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2.is_nan() || sigma2 <= 0.0 || sigma2.is_infinite() {
            return Err(Error::InvalidVariance(sigma2));
        }
        Ok(ChannelModel { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Precoder output `y_t = x_t ⊕ y_(t−2)` including the flush bits, which drive
    /// the precoder back to zero (`CHANNEL_TAIL` extra entries).
    pub fn precode(input: &[u8]) -> Vec<u8> {
        let mut y: Vec<u8> = Vec::with_capacity(input.len() + CHANNEL_TAIL);
        let back = |y: &[u8], k: usize| if y.len() >= k { y[y.len() - k] } else { 0 };
        for &x in input {
            let v = (x & 1) ^ back(&y, 2);
            y.push(v);
        }
        y.extend([0; CHANNEL_TAIL]);
        y
    }

    /// Flush bits that terminate the precoder after `input`.
    pub fn flush_bits(input: &[u8]) -> [u8; CHANNEL_TAIL] {
        let y = Self::precode(input);
        let n = input.len();
        let at = |i: isize| if i >= 0 { y[i as usize] } else { 0 };
        [at(n as isize - 2), at(n as isize - 1), 0]
    }

    /// Noiseless channel levels for `input` followed by the termination tail.
    pub fn noiseless(input: &[u8]) -> Vec<f64> {
        let y = Self::precode(input);
        let b = |i: isize| if i >= 0 { bipolar(y[i as usize]) } else { 1.0 };
        (0..y.len() as isize)
            .map(|t| {
                Self::TAPS
                    .iter()
                    .enumerate()
                    .map(|(d, tap)| tap * b(t - d as isize))
                    .sum()
            })
            .collect()
    }
}

/// State `s` packs `(y_(t−1), y_(t−2), y_(t−3))` into bits 0, 1, 2.
fn channel_edge(from: usize, x: u8) -> Edge {
    let y1 = (from & 1) as u8;
    let y2 = ((from >> 1) & 1) as u8;
    let y3 = ((from >> 2) & 1) as u8;
    let y = x ^ y2;
    let output = bipolar(y) + bipolar(y1) - bipolar(y2) - bipolar(y3);
    Edge {
        from,
        to: (y as usize) | (y1 as usize) << 1 | (y2 as usize) << 2,
        input: x,
        output,
    }
}

/// One section of the time-invariant 8-state channel trellis.
pub fn build_channel_trellis() -> Trellis {
    let edges = (0..CHANNEL_STATES)
        .flat_map(|s| [channel_edge(s, 0), channel_edge(s, 1)])
        .collect();
    Trellis::new(vec![CHANNEL_STATES; 2], vec![Section { edges }], 0, 0)
        .expect("static channel trellis")
}

/// The channel trellis unrolled over `len` input bits plus the termination tail,
/// pinned to the zero state at both ends. Tail sections keep only the flush edge
/// `x_t = y_(t−2)`.
pub fn terminated_channel_trellis(len: usize) -> Trellis {
    let free = build_channel_trellis().sections[0].clone();
    let tail = Section {
        edges: free
            .edges
            .iter()
            .copied()
            .filter(|e| e.input == ((e.from >> 1) & 1) as u8)
            .collect(),
    };
    let mut sections = vec![free; len];
    sections.extend(std::iter::repeat_n(tail, CHANNEL_TAIL));
    Trellis::new(vec![CHANNEL_STATES; len + CHANNEL_TAIL + 1], sections, 0, 0)
        .expect("unrolled channel trellis")
}

/// SISO decoding of the precoded EPR4 channel. `observations` holds
/// `priors.len() + CHANNEL_TAIL` samples; the output covers the data bits only.
pub fn channel_siso(
    observations: &[f64],
    priors: &[f64],
    sigma2: f64,
    ring: Ring,
) -> Result<DecodeResult> {
    let model = ChannelModel::new(sigma2)?;
    let len = priors.len();
    if observations.len() != len + CHANNEL_TAIL {
        return Err(Error::LengthMismatch {
            expected: len + CHANNEL_TAIL,
            actual: observations.len(),
        });
    }
    let trellis = terminated_channel_trellis(len);
    let scale = 0.5 / model.sigma2;
    with_semiring!(ring, S => {
        let (m, evidence, ops) = forward_backward::<S>(&trellis, |t, e| {
            let d = observations[t] - e.output;
            let prior = if t < len && e.input == 1 { priors[t] } else { 0.0 };
            d * d * scale + prior
        });
        let app = m[..len].iter().map(|p| p[1] - p[0]).collect();
        Ok(DecodeResult::from_app(priors, app, ops.ops, evidence))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{repetition_code, rm_code, spc_code};

    #[test]
    fn small_syndrome_trellises() {
        let spc = syndrome_trellis(&spc_code(4).unwrap()).unwrap();
        assert_eq!(spc.max_states(), 2);
        assert_eq!(spc.path_count(), 8);
        let rep = syndrome_trellis(&repetition_code(4).unwrap()).unwrap();
        assert_eq!(rep.paths().unwrap().len(), 2);
        let rm = syndrome_trellis(&rm_code(1, 3).unwrap()).unwrap();
        assert!(rm.max_states() <= 16);
        assert_eq!(rm.path_count(), 16);
    }

    #[test]
    fn channel_trellis_shape() {
        let t = build_channel_trellis();
        assert_eq!(t.state_counts(), &[8, 8]);
        for s in 0..8 {
            assert_eq!(
                t.sections()[0].edges.iter().filter(|e| e.from == s).count(),
                2
            );
        }
        for e in &t.sections()[0].edges {
            assert!([-4.0, -2.0, 0.0, 2.0, 4.0].contains(&e.output));
        }
    }

    #[test]
    fn trellis_walk_matches_direct_filter() {
        let input = [1u8, 0, 1, 1, 0, 0, 1, 0, 1, 1];
        let t = terminated_channel_trellis(input.len());
        let flush = ChannelModel::flush_bits(&input);
        let full: Vec<u8> = input.iter().copied().chain(flush).collect();
        let mut state = 0;
        let mut levels = Vec::new();
        for (sec, &x) in t.sections().iter().zip(&full) {
            let e = sec
                .edges
                .iter()
                .find(|e| e.from == state && e.input == x)
                .unwrap();
            levels.push(e.output);
            state = e.to;
        }
        assert_eq!(state, 0);
        assert_eq!(levels, ChannelModel::noiseless(&input));
    }

    #[test]
    fn variance_must_be_positive() {
        assert_eq!(
            channel_siso(&[0.0; 4], &[0.0], 0.0, Ring::MinSum),
            Err(Error::InvalidVariance(0.0))
        );
    }
}
