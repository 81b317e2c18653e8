//! Serial concatenation of mixed extended Hamming outer codes with the precoded EPR4
//! channel through an s-random interleaver.

mod interleaver;
mod sim;

pub use interleaver::{default_spread, spread_holds, srandom_interleaver, Interleaver};
pub use sim::{
    monte_carlo, parse_config, parse_snr_list, write_csv, BerRecord, IterationStats,
    IterativeOutput, SccSystem, SimConfig, CSV_HEADER,
};

use std::fmt;
use std::str::FromStr;

use crate::codes::{rm_code, LinearCode};
use crate::error::{Error, Result};
use crate::siso::{dual_decode, OpCount, Ring};

pub const SUPPORTED_M: std::ops::RangeInclusive<usize> = 5..=8;

/// A block of extended Hamming codewords: `(m, count)` pairs, smallest `m` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureSpec {
    components: Vec<(usize, usize)>,
}

impl MixtureSpec {
    pub fn new(mut components: Vec<(usize, usize)>) -> Result<Self> {
        components.retain(|&(_, c)| c > 0);
        if components.is_empty() {
            return Err(Error::InvalidParameters("empty mixture".into()));
        }
        if let Some(&(m, _)) = components.iter().find(|(m, _)| !SUPPORTED_M.contains(m)) {
            return Err(Error::Unsupported(format!(
                "component length 2^{m} (supported m = 5..=8)"
            )));
        }
        components.sort_by_key(|&(m, _)| m);
        let mut merged: Vec<(usize, usize)> = Vec::new();
        for (m, c) in components {
            match merged.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => merged.push((m, c)),
            }
        }
        Ok(MixtureSpec { components: merged })
    }

    /// The rate 8/9, 9/10, 11/12 and 16/17 systems.
    pub fn canonical(name: &str) -> Option<Self> {
        let components = match name {
            "8/9" => vec![(5, 3), (6, 69)],
            "9/10" => vec![(6, 56), (7, 7)],
            "11/12" => vec![(6, 30), (7, 19)],
            "16/17" => vec![(6, 2), (7, 26), (8, 3)],
            _ => return None,
        };
        MixtureSpec::new(components).ok()
    }

    pub const CANONICAL: [&'static str; 4] = ["8/9", "9/10", "11/12", "16/17"];

    pub fn components(&self) -> &[(usize, usize)] {
        &self.components
    }

    /// Information bits per block.
    pub fn k(&self) -> usize {
        self.components
            .iter()
            .map(|&(m, c)| c * ((1 << m) - m - 1))
            .sum()
    }

    /// Coded bits per block.
    pub fn n(&self) -> usize {
        self.components.iter().map(|&(m, c)| c << m).sum()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}

impl fmt::Display for MixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(m, c)| format!("{m}:{c}"))
            .collect();
        write!(f, "custom:{}", parts.join(","))
    }
}

impl FromStr for MixtureSpec {
    type Err = Error;

    /// A canonical rate name or `custom:<m>:<count>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(spec) = MixtureSpec::canonical(s) {
            return Ok(spec);
        }
        let list = s.strip_prefix("custom:").ok_or_else(|| {
            Error::Parse(format!(
                "unknown mixture {s:?} (expected 8/9, 9/10, 11/12, 16/17 or custom:m:count,...)"
            ))
        })?;
        let components = list
            .split(',')
            .map(|item| {
                let (m, c) = item
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("bad component {item:?}")))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad number {x:?}")))
                };
                Ok((parse(m)?, parse(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        MixtureSpec::new(components)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Block {
    m: usize,
    k_offset: usize,
    n_offset: usize,
}

/// Encoder and SISO decoder for a mixture: component codewords are concatenated in
/// order, and each component is decoded independently in the dual domain.
#[derive(Clone, Debug)]
pub struct OuterCode {
    spec: MixtureSpec,
    codes: Vec<(usize, LinearCode)>,
    blocks: Vec<Block>,
}

pub fn build_mixture(spec: &MixtureSpec) -> Result<OuterCode> {
    let codes = spec
        .components()
        .iter()
        .map(|&(m, _)| Ok((m, rm_code(m - 2, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut blocks = Vec::new();
    let (mut k_offset, mut n_offset) = (0, 0);
    for &(m, count) in spec.components() {
        for _ in 0..count {
            blocks.push(Block {
                m,
                k_offset,
                n_offset,
            });
            k_offset += (1 << m) - m - 1;
            n_offset += 1 << m;
        }
    }
    Ok(OuterCode {
        spec: spec.clone(),
        codes,
        blocks,
    })
}

impl OuterCode {
    pub fn spec(&self) -> &MixtureSpec {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    fn code(&self, m: usize) -> &LinearCode {
        &self.codes.iter().find(|(cm, _)| *cm == m).unwrap().1
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: message.len(),
            });
        }
        let mut out = Vec::with_capacity(self.n());
        for b in &self.blocks {
            let code = self.code(b.m);
            out.extend(code.encode(&message[b.k_offset..b.k_offset + code.k()])?);
        }
        Ok(out)
    }

    /// Information-bit values of a coded block (any per-coordinate data).
    pub fn extract_info<T: Copy>(&self, coded: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.k());
        for b in &self.blocks {
            let code = self.code(b.m);
            out.extend(code.info_positions().iter().map(|&p| coded[b.n_offset + p]));
        }
        out
    }

    /// Per-component dual-domain SISO decoding. Returns `(app, extrinsic)` over the
    /// coded bits and the summed operation count.
    pub fn decode(&self, input: &[f64], ring: Ring) -> Result<(Vec<f64>, Vec<f64>, OpCount)> {
        if input.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: input.len(),
            });
        }
        let mut app = Vec::with_capacity(self.n());
        let mut ext = Vec::with_capacity(self.n());
        let mut ops = OpCount::default();
        for b in &self.blocks {
            let r = dual_decode(b.m, &input[b.n_offset..b.n_offset + (1 << b.m)], ring)?;
            app.extend_from_slice(&r.app);
            ext.extend_from_slice(&r.extrinsic);
            ops += r.ops;
        }
        Ok((app, ext, ops))
    }
}

/// Average outer-decoder operations per information bit and iteration, measured
/// from the component decoders' counters.
pub fn ops_per_bit(spec: &MixtureSpec) -> Result<(f64, f64)> {
    let mut total = OpCount::default();
    for &(m, count) in spec.components() {
        let ops = dual_decode(m, &vec![0.0; 1 << m], Ring::MinSum)?.ops;
        total.additions += count as u64 * ops.additions;
        total.comparisons += count as u64 * ops.comparisons;
    }
    let k = spec.k() as f64;
    Ok((total.additions as f64 / k, total.comparisons as f64 / k))
}
