//! Binary linear block codes: Reed-Muller construction, the squaring construction,
//! generalized (partial-parity) extensions, duals, systematic encoding and
//! exhaustive analysis helpers.

mod matrix;

pub use matrix::BitMatrix;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Largest enumeration (in codewords or syndromes) the exhaustive helpers will attempt.
pub const ENUMERATION_GUARD: u64 = 1 << 26;

/// An `[n, k]` binary linear code held as a generator / parity-check pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity_check: BitMatrix,
    systematic: BitMatrix,
    info_positions: Vec<usize>,
}

impl LinearCode {
    /// Builds a code from any spanning set of codewords. Dependent rows are dropped.
    pub fn from_generator(g: &BitMatrix) -> Result<Self> {
        let (basis, _) = g.rref();
        let h = basis.null_space();
        Self::assemble(basis, h)
    }

    /// Builds a code as the null space of `h`. Dependent checks are dropped.
    pub fn from_parity_check(h: &BitMatrix) -> Result<Self> {
        let g = h.null_space();
        let (h, _) = h.rref();
        Self::assemble(g, h)
    }

    /// Uses the given matrices verbatim after checking `G·Hᵀ = 0` and the rank conditions.
    pub fn from_parts(generator: BitMatrix, parity_check: BitMatrix) -> Result<Self> {
        Self::assemble(generator, parity_check)
    }

    fn assemble(generator: BitMatrix, parity_check: BitMatrix) -> Result<Self> {
        let n = generator.cols();
        if parity_check.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator has {n} columns, parity check has {}",
                parity_check.cols()
            )));
        }
        let (systematic, info_positions) = generator.rref();
        let k = info_positions.len();
        if k != generator.rows() {
            return Err(Error::InvalidParameters(format!(
                "generator rows are dependent (rank {k} of {})",
                generator.rows()
            )));
        }
        if parity_check.rank() != n - k || parity_check.rows() != n - k {
            return Err(Error::InvalidParameters(format!(
                "parity check must have full rank {} (has {} rows, rank {})",
                n - k,
                parity_check.rows(),
                parity_check.rank()
            )));
        }
        if !generator.mul(&parity_check.transpose())?.is_zero() {
            return Err(Error::InvalidParameters("G·Hᵀ ≠ 0".into()));
        }
        Ok(LinearCode {
            n,
            k,
            generator,
            parity_check,
            systematic,
            info_positions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// Coordinates that carry the message bits under [`LinearCode::encode`].
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Column permutation of the systematic form: information positions first, then
    /// the remaining (parity) positions, both ascending.
    pub fn systematic_permutation(&self) -> Vec<usize> {
        let mut perm = self.info_positions.clone();
        let mut is_info = vec![false; self.n];
        for &p in &self.info_positions {
            is_info[p] = true;
        }
        perm.extend((0..self.n).filter(|&c| !is_info[c]));
        perm
    }

    /// Systematic encoding. The codeword stays in the code's own coordinate order and
    /// `codeword[info_positions()[i]] == message[i]`.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: message.len(),
            });
        }
        if self.k == 0 {
            return Ok(vec![0; self.n]);
        }
        Ok(self.systematic.vec_mul(message))
    }

    /// Inverse of [`LinearCode::encode`] for a valid codeword.
    pub fn extract_message(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| codeword[p]).collect()
    }

    pub fn syndrome(&self, word: &[u8]) -> Vec<u8> {
        self.parity_check.mul_vec(word)
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndrome(word).iter().all(|&s| s == 0)
    }

    /// Same codeword set, decided by row-space comparison.
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.n == other.n && self.k == other.k && self.systematic == other.systematic
    }

    /// Visits every codeword in Gray-code order. Words are passed packed, 64 bits per word.
    pub fn for_each_codeword<F: FnMut(&[u64])>(&self, mut f: F) -> Result<()> {
        if self.k >= 63 || (1u64 << self.k) > ENUMERATION_GUARD {
            return Err(Error::SizeGuard(format!("2^{} codewords", self.k)));
        }
        let stride = self.n.div_ceil(64);
        let mut word = vec![0u64; stride.max(1)];
        f(&word);
        for i in 1u64..(1u64 << self.k) {
            let row = i.trailing_zeros() as usize;
            for (w, g) in word.iter_mut().zip(self.systematic.row_words(row)) {
                *w ^= g;
            }
            f(&word);
        }
        Ok(())
    }

    /// All codewords as 0/1 vectors.
    pub fn codewords(&self) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::with_capacity(1 << self.k.min(26));
        let n = self.n;
        self.for_each_codeword(|w| out.push(unpack(w, n)))?;
        Ok(out)
    }

    pub fn codeword_set(&self) -> Result<BTreeSet<Vec<u8>>> {
        Ok(self.codewords()?.into_iter().collect())
    }

    /// Text form: a header line `n k` followed by the `k` generator rows as 0/1 strings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.k);
        for r in 0..self.k {
            let row: String = self
                .generator
                .row_bits(r)
                .iter()
                .map(|&b| if b == 1 { '1' } else { '0' })
                .collect();
            let _ = writeln!(s, "{row}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `n k` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad header field {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [n, k] = dims[..] else {
            return Err(Error::Parse(format!(
                "header must be `n k`, got {header:?}"
            )));
        };
        let rows: Vec<&str> = lines.collect();
        if rows.len() != k {
            return Err(Error::Parse(format!(
                "header declares {k} rows, found {}",
                rows.len()
            )));
        }
        let g = if k == 0 {
            BitMatrix::zeros(0, n)
        } else {
            BitMatrix::parse_rows(&rows)?
        };
        if g.cols() != n {
            return Err(Error::Parse(format!(
                "header declares n={n}, rows have {} bits",
                g.cols()
            )));
        }
        let code = Self::from_generator(&g)?;
        if code.k != k {
            return Err(Error::Parse(format!(
                "generator rows are dependent (rank {})",
                code.k
            )));
        }
        Ok(code)
    }
}

pub(crate) fn unpack(words: &[u64], n: usize) -> Vec<u8> {
    (0..n)
        .map(|c| ((words[c / 64] >> (c % 64)) & 1) as u8)
        .collect()
}

fn monomials(r: usize, m: usize) -> Vec<Vec<usize>> {
    fn combos(
        start: usize,
        m: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..m {
            cur.push(v);
            combos(v + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=r {
        combos(0, m, deg, &mut Vec::new(), &mut out);
    }
    out
}

/// The Reed-Muller code RM(r, m): length `2^m`, dimension `Σ_{j≤r} C(m, j)`,
/// minimum distance `2^(m−r)`.
///
/// Generator rows are the evaluations of the monomials of degree ≤ r in graded
/// lexicographic order. Coordinate `i` is the point whose variable `x_{l+1}` is bit
/// `l` of `i`, so the top variable splits the coordinates into halves and
/// `RM(r,m) = {(u, u+v) : u ∈ RM(r,m−1), v ∈ RM(r−1,m−1)}` holds positionally.
pub fn rm_code(r: usize, m: usize) -> Result<LinearCode> {
    if m == 0 || r > m || m > 12 {
        return Err(Error::InvalidParameters(format!(
            "RM({r},{m}) requires 0 ≤ r ≤ m and 1 ≤ m ≤ 12"
        )));
    }
    let n = 1usize << m;
    let monos = monomials(r, m);
    let mut g = BitMatrix::zeros(monos.len(), n);
    for (row, mono) in monos.iter().enumerate() {
        for point in 0..n {
            if mono.iter().all(|&v| (point >> v) & 1 == 1) {
                g.set(row, point, true);
            }
        }
    }
    LinearCode::from_generator(&g)
}

/// The `[n, n−1, 2]` single parity-check code.
pub fn spc_code(n: usize) -> Result<LinearCode> {
    let h = BitMatrix::from_rows(&[vec![1u8; n]])?;
    LinearCode::from_parity_check(&h)
}

/// The `[n, 1, n]` repetition code.
pub fn repetition_code(n: usize) -> Result<LinearCode> {
    let g = BitMatrix::from_rows(&[vec![1u8; n]])?;
    LinearCode::from_generator(&g)
}

/// The `[n, n, 1]` code containing every word.
pub fn universe_code(n: usize) -> Result<LinearCode> {
    LinearCode::from_generator(&BitMatrix::identity(n))
}

/// `{(u, u+v) : u ∈ cu, v ∈ cv}`.
pub fn squaring_construct(cu: &LinearCode, cv: &LinearCode) -> Result<LinearCode> {
    if cu.n != cv.n {
        return Err(Error::LengthMismatch {
            expected: cu.n,
            actual: cv.n,
        });
    }
    let gu = cu.generator.hstack(&cu.generator)?;
    let gv = BitMatrix::zeros(cv.k, cv.n).hstack(&cv.generator)?;
    LinearCode::from_generator(&gu.vstack(&gv)?)
}

/// The index sets of a degree-g generalized extension. Set `j` (0-based) may reference
/// the original coordinates and the `j` partial parities added before it, i.e. indices
/// `< n + j`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    index_sets: Vec<Vec<usize>>,
}

impl ExtensionSpec {
    pub fn new(index_sets: Vec<Vec<usize>>) -> Self {
        let index_sets = index_sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        ExtensionSpec { index_sets }
    }

    /// A single partial parity over `set`.
    pub fn single(set: Vec<usize>) -> Self {
        Self::new(vec![set])
    }

    pub fn degree(&self) -> usize {
        self.index_sets.len()
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (j, set) in self.index_sets.iter().enumerate() {
            if let Some(&bad) = set.iter().find(|&&i| i >= n + j) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    limit: n + j,
                });
            }
        }
        Ok(())
    }
}

/// Appends one partial-parity bit per index set.
///
/// The parity-check matrix keeps the original checks and adds one row per partial
/// parity (its index set plus the new column), giving the `(n−k+g) × (n+g)` shape
/// with no further reduction.
pub fn generalized_extend(code: &LinearCode, spec: &ExtensionSpec) -> Result<LinearCode> {
    spec.validate(code.n)?;
    let g = spec.degree();
    let n_ext = code.n + g;

    let mut gen = BitMatrix::zeros(code.k, n_ext);
    for r in 0..code.k {
        let mut bits = code.generator.row_bits(r);
        for set in &spec.index_sets {
            let p = set.iter().fold(0u8, |acc, &i| acc ^ bits[i]);
            bits.push(p);
        }
        for (c, &b) in bits.iter().enumerate() {
            gen.set(r, c, b == 1);
        }
    }

    let h0 = &code.parity_check;
    let mut h = BitMatrix::zeros(h0.rows() + g, n_ext);
    for r in 0..h0.rows() {
        for c in 0..code.n {
            h.set(r, c, h0.get(r, c));
        }
    }
    for (j, set) in spec.index_sets.iter().enumerate() {
        let row = h0.rows() + j;
        for &i in set {
            h.set(row, i, true);
        }
        h.set(row, code.n + j, true);
    }
    LinearCode::from_parts(gen, h)
}

/// The dual code: generator and parity check swap roles.
pub fn dual(code: &LinearCode) -> Result<LinearCode> {
    LinearCode::from_parts(code.parity_check.clone(), code.generator.clone())
}

/// Exact minimum Hamming weight over nonzero codewords.
///
/// Enumerates the `2^k` codewords when that is the cheaper side, otherwise searches the
/// `2^(n−k)` syndrome space: `d = 1 + min_j dist_{−j}(h_j)`, where `dist_{−j}` is the
/// breadth-first distance from the zero syndrome using every column except `j`.
/// Returns `None` for the zero code.
pub fn min_distance(code: &LinearCode) -> Result<Option<usize>> {
    if code.k == 0 {
        return Ok(None);
    }
    let r = code.n - code.k;
    let enum_cost = if code.k < 63 {
        1u64 << code.k
    } else {
        u64::MAX
    };
    let syn_cost = if r < 40 {
        (1u64 << r).saturating_mul((code.n * code.n) as u64)
    } else {
        u64::MAX
    };
    if enum_cost <= ENUMERATION_GUARD && enum_cost <= syn_cost {
        let mut best = usize::MAX;
        let mut first = true;
        code.for_each_codeword(|w| {
            if first {
                first = false;
                return;
            }
            let wt: usize = w.iter().map(|x| x.count_ones() as usize).sum();
            best = best.min(wt);
        })?;
        return Ok(Some(best));
    }
    if syn_cost > ENUMERATION_GUARD {
        return Err(Error::SizeGuard(format!(
            "min distance of a [{}, {}] code",
            code.n, code.k
        )));
    }
    Ok(Some(min_distance_by_syndromes(code)))
}

fn min_distance_by_syndromes(code: &LinearCode) -> usize {
    let h = &code.parity_check;
    let cols: Vec<u64> = (0..code.n)
        .map(|c| (0..h.rows()).fold(0u64, |acc, r| acc | ((h.get(r, c) as u64) << r)))
        .collect();
    if cols.contains(&0) {
        return 1;
    }
    let size = 1usize << h.rows();
    let mut best = code.n + 1;
    let mut dist = vec![u32::MAX; size];
    let mut frontier = Vec::new();
    let mut next = Vec::new();
    for (j, &target) in cols.iter().enumerate() {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[0] = 0;
        frontier.clear();
        frontier.push(0u64);
        let mut depth = 0usize;
        'bfs: while !frontier.is_empty() && depth + 2 < best {
            next.clear();
            for &s in &frontier {
                for (c, &col) in cols.iter().enumerate() {
                    if c == j {
                        continue;
                    }
                    let t = s ^ col;
                    if dist[t as usize] == u32::MAX {
                        dist[t as usize] = depth as u32 + 1;
                        if t == target {
                            best = best.min(depth + 2);
                            break 'bfs;
                        }
                        next.push(t);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            depth += 1;
        }
    }
    best
}

/// Maximum error exponent of a serial concatenation with a recursive inner code:
/// `−⌊(d + 1) / 2⌋` for an outer code of minimum distance `d`.
pub fn alpha_max(d_min_outer: u32) -> i64 {
    -(((d_min_outer as i64) + 1) / 2)
}
