use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::interleaver::{default_spread, srandom_interleaver, Interleaver};
use super::{build_mixture, MixtureSpec, OuterCode};
use crate::error::{Error, Result};
use crate::siso::Ring;
use crate::trellis::{channel_siso, ChannelModel};

const INTERLEAVER_RESTARTS: usize = 50;

/// Blocks simulated per parallel batch. Fixed so the stopping point does not depend
/// on the worker count.
const BATCH: u64 = 32;

/// Outer code, interleaver and channel of one concatenated system.
#[derive(Clone, Debug)]
pub struct SccSystem {
    outer: OuterCode,
    interleaver: Interleaver,
}

/// Hard decisions on the information bits and outer extrinsics, one entry per
/// iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterativeOutput {
    pub decisions: Vec<Vec<u8>>,
    pub outer_extrinsic: Vec<Vec<f64>>,
}

impl IterativeOutput {
    pub fn final_decisions(&self) -> &[u8] {
        self.decisions.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl SccSystem {
    /// Builds the system with an s-random interleaver of spread `floor(sqrt(N/2))`.
    pub fn new(spec: &MixtureSpec, interleaver_seed: u64) -> Result<Self> {
        let n = spec.n();
        let il = srandom_interleaver(n, default_spread(n), interleaver_seed, INTERLEAVER_RESTARTS)?;
        Self::with_interleaver(spec, il)
    }

    pub fn with_interleaver(spec: &MixtureSpec, interleaver: Interleaver) -> Result<Self> {
        if interleaver.len() != spec.n() {
            return Err(Error::LengthMismatch {
                expected: spec.n(),
                actual: interleaver.len(),
            });
        }
        Ok(SccSystem {
            outer: build_mixture(spec)?,
            interleaver,
        })
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub fn k(&self) -> usize {
        self.outer.k()
    }

    pub fn n(&self) -> usize {
        self.outer.n()
    }

    pub fn rate(&self) -> f64 {
        self.outer.spec().rate()
    }

    /// Noise variance per real sample for unit-energy channel symbols, with
    /// `Eb = Es / R` (termination overhead excluded from `R`).
    pub fn sigma2(&self, ebn0_db: f64) -> f64 {
        1.0 / (2.0 * self.rate() * 10f64.powf(ebn0_db / 10.0))
    }

    /// Outer encoding followed by interleaving.
    pub fn channel_input(&self, message: &[u8]) -> Result<Vec<u8>> {
        Ok(self.interleaver.interleave(&self.outer.encode(message)?))
    }

    /// Channel observations (`N + 3` samples). `sigma2 = 0` gives the noiseless levels.
    pub fn transmit<R: Rng>(&self, message: &[u8], sigma2: f64, rng: &mut R) -> Result<Vec<f64>> {
        let mut z = ChannelModel::noiseless(&self.channel_input(message)?);
        if sigma2 > 0.0 {
            let noise =
                Normal::new(0.0, sigma2.sqrt()).map_err(|_| Error::InvalidVariance(sigma2))?;
            z.iter_mut().for_each(|x| *x += noise.sample(rng));
        } else if sigma2 < 0.0 {
            return Err(Error::InvalidVariance(sigma2));
        }
        Ok(z)
    }

    /// Serial turbo schedule: channel SISO, deinterleave, outer SISO, interleave back.
    /// `ring` selects the channel decoder's semiring; the outer decoder always works in
    /// the dual domain.
    pub fn iterative_decode(
        &self,
        observations: &[f64],
        sigma2: f64,
        iterations: usize,
        ring: Ring,
    ) -> Result<IterativeOutput> {
        if iterations == 0 {
            return Err(Error::InvalidParameters("iterations must be ≥ 1".into()));
        }
        let mut priors = vec![0.0; self.n()];
        let mut out = IterativeOutput {
            decisions: Vec::with_capacity(iterations),
            outer_extrinsic: Vec::with_capacity(iterations),
        };
        for _ in 0..iterations {
            let inner = channel_siso(observations, &priors, sigma2, ring)?;
            let outer_in = self.interleaver.deinterleave(&inner.extrinsic);
            let (app, ext, _) = self.outer.decode(&outer_in, ring)?;
            let info = self.outer.extract_info(&app);
            out.decisions
                .push(info.iter().map(|&x| (x < 0.0) as u8).collect());
            priors = self.interleaver.interleave(&ext);
            out.outer_extrinsic.push(ext);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub mixture: MixtureSpec,
    pub ebn0_db: Vec<f64>,
    pub iterations: usize,
    pub max_blocks: u64,
    /// Stop a point once the final-iteration bit errors reach this count (0 disables).
    pub min_bit_errors: u64,
    pub seed: u64,
    pub interleaver_seed: u64,
    pub ring: Ring,
}

impl SimConfig {
    pub fn new(mixture: MixtureSpec, ebn0_db: Vec<f64>) -> Self {
        SimConfig {
            mixture,
            ebn0_db,
            iterations: 10,
            max_blocks: 1000,
            min_bit_errors: 100,
            seed: 1,
            interleaver_seed: 0,
            ring: Ring::MinStarSum,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameters("iterations must be ≥ 1".into()));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters("non-finite Eb/N0".into()));
        }
        Ok(())
    }
}

/// Errors accumulated after one iteration. `sum_sq` is the sum over blocks of the
/// squared per-block bit error count, used for confidence intervals.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IterationStats {
    pub bit_errors: u64,
    pub cw_errors: u64,
    pub sum_sq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub blocks: u64,
    pub info_bits: usize,
    /// One entry per decoding iteration.
    pub iterations: Vec<IterationStats>,
}

impl BerRecord {
    fn last(&self) -> IterationStats {
        self.iterations.last().copied().unwrap_or_default()
    }

    pub fn bit_errors(&self) -> u64 {
        self.last().bit_errors
    }

    pub fn cw_errors(&self) -> u64 {
        self.last().cw_errors
    }

    pub fn ber(&self) -> f64 {
        self.ber_at(self.iterations.len() - 1)
    }

    pub fn cer(&self) -> f64 {
        self.cer_at(self.iterations.len() - 1)
    }

    pub fn ber_at(&self, iteration: usize) -> f64 {
        self.iterations[iteration].bit_errors as f64 / (self.blocks as f64 * self.info_bits as f64)
    }

    pub fn cer_at(&self, iteration: usize) -> f64 {
        self.iterations[iteration].cw_errors as f64 / self.blocks as f64
    }

    /// 95% interval for the BER after `iteration`, from the spread of per-block error
    /// counts (errors within a block are not independent). With no errors the upper
    /// end is the rule-of-three bound `3 / (blocks · K)`.
    pub fn ber_ci95(&self, iteration: usize) -> (f64, f64) {
        let s = self.iterations[iteration];
        let b = self.blocks as f64;
        let k = self.info_bits as f64;
        if s.bit_errors == 0 {
            return (0.0, 3.0 / (b * k));
        }
        let mean = s.bit_errors as f64 / b;
        let var = if self.blocks > 1 {
            ((s.sum_sq - b * mean * mean) / (b - 1.0)).max(0.0)
        } else {
            mean * mean
        };
        let half = 1.96 * (var / b).sqrt();
        (((mean - half) / k).max(0.0), (mean + half) / k)
    }
}

fn block_rng(seed: u64, point: usize, block: u64) -> ChaCha8Rng {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (point as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(block);
    rng
}

fn run_block(
    system: &SccSystem,
    config: &SimConfig,
    sigma2: f64,
    point: usize,
    block: u64,
) -> Result<Vec<u64>> {
    let mut rng = block_rng(config.seed, point, block);
    let msg: Vec<u8> = (0..system.k())
        .map(|_| rng.random::<bool>() as u8)
        .collect();
    let z = system.transmit(&msg, sigma2, &mut rng)?;
    let out = system.iterative_decode(&z, sigma2, config.iterations, config.ring)?;
    Ok(out
        .decisions
        .iter()
        .map(|d| d.iter().zip(&msg).filter(|(a, b)| a != b).count() as u64)
        .collect())
}

/// Simulates every Eb/N0 point of `config`. Block `b` of point `p` draws from its
/// own random stream and batches are merged in block order, so the records do not
/// depend on the number of worker threads.
pub fn monte_carlo(config: &SimConfig) -> Result<Vec<BerRecord>> {
    config.validate()?;
    if config.max_blocks == 0 {
        return Ok(Vec::new());
    }
    let system = SccSystem::new(&config.mixture, config.interleaver_seed)?;
    let mut records = Vec::with_capacity(config.ebn0_db.len());
    for (point, &ebn0) in config.ebn0_db.iter().enumerate() {
        let sigma2 = system.sigma2(ebn0);
        let mut rec = BerRecord {
            ebn0_db: ebn0,
            blocks: 0,
            info_bits: system.k(),
            iterations: vec![IterationStats::default(); config.iterations],
        };
        let mut next = 0u64;
        'point: while next < config.max_blocks {
            let end = (next + BATCH).min(config.max_blocks);
            let batch: Vec<Result<Vec<u64>>> = (next..end)
                .into_par_iter()
                .map(|b| run_block(&system, config, sigma2, point, b))
                .collect();
            for errors in batch {
                let errors = errors?;
                rec.blocks += 1;
                for (s, &e) in rec.iterations.iter_mut().zip(&errors) {
                    s.bit_errors += e;
                    s.cw_errors += (e > 0) as u64;
                    s.sum_sq += (e * e) as f64;
                }
                if config.min_bit_errors > 0 && rec.bit_errors() >= config.min_bit_errors {
                    break 'point;
                }
            }
            next = end;
        }
        records.push(rec);
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "ebn0_db,blocks,bit_errors,cw_errors,ber,cer,iteration";

/// One row per (Eb/N0, iteration), iterations numbered from 1.
pub fn write_csv(records: &[BerRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        for (i, s) in r.iterations.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6e},{:.6e},{}",
                r.ebn0_db,
                r.blocks,
                s.bit_errors,
                s.cw_errors,
                r.ber_at(i),
                r.cer_at(i),
                i + 1
            );
        }
    }
    out
}

/// Parses `key = value` lines. Blank lines and `#` comments are ignored. Keys:
/// `mixture`, `snr` (comma list, dB), `iterations`, `seed`, `interleaver_seed`,
/// `max_blocks`, `min_bit_errors`, `ring`.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut mixture = None;
    let mut snr = None;
    let mut config = SimConfig::new(MixtureSpec::canonical("8/9").unwrap(), Vec::new());
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Parse(format!("line {}: bad integer {v:?}", lineno + 1)))
        };
        match key {
            "mixture" => mixture = Some(value.parse::<MixtureSpec>()?),
            "snr" | "ebn0_db" => snr = Some(parse_snr_list(value)?),
            "iterations" => config.iterations = int(value)? as usize,
            "seed" => config.seed = int(value)?,
            "interleaver_seed" => config.interleaver_seed = int(value)?,
            "max_blocks" => config.max_blocks = int(value)?,
            "min_bit_errors" => config.min_bit_errors = int(value)?,
            "ring" => config.ring = value.parse()?,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    config.mixture = mixture.ok_or_else(|| Error::Parse("missing key: mixture".into()))?;
    config.ebn0_db = snr.ok_or_else(|| Error::Parse("missing key: snr".into()))?;
    config.validate()?;
    Ok(config)
}

/// Comma-separated Eb/N0 values in dB.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad Eb/N0 value {x:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MixtureSpec {
        MixtureSpec::new(vec![(5, 2), (6, 1)]).unwrap()
    }

    #[test]
    fn config_round_trip() {
        let cfg = parse_config(
            "# sweep\nmixture = 9/10\nsnr = 4.0, 4.5\niterations = 3\nring = min\nmax_blocks=7\n",
        )
        .unwrap();
        assert_eq!(cfg.mixture, MixtureSpec::canonical("9/10").unwrap());
        assert_eq!(cfg.ebn0_db, vec![4.0, 4.5]);
        assert_eq!(cfg.iterations, 3);
        assert_eq!(cfg.ring, Ring::MinSum);
        assert_eq!(cfg.max_blocks, 7);
        assert!(parse_config("snr = 1").is_err());
        assert!(parse_config("mixture = 8/9\nsnr = 1\nbogus = 2").is_err());
    }

    #[test]
    fn zero_budget_is_empty() {
        let mut cfg = SimConfig::new(small(), vec![3.0]);
        cfg.max_blocks = 0;
        assert!(monte_carlo(&cfg).unwrap().is_empty());
    }

    #[test]
    fn noiseless_decoding_recovers_message() {
        let sys = SccSystem::new(&small(), 3).unwrap();
        let msg: Vec<u8> = (0..sys.k()).map(|i| (i % 3 == 1) as u8).collect();
        let z = sys
            .transmit(&msg, 0.0, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        let out = sys.iterative_decode(&z, 1e-3, 1, Ring::MinStarSum).unwrap();
        assert_eq!(out.final_decisions(), msg.as_slice());
    }

    #[test]
    fn csv_layout() {
        let mut cfg = SimConfig::new(small(), vec![6.0]);
        cfg.max_blocks = 3;
        cfg.iterations = 2;
        let csv = write_csv(&monte_carlo(&cfg).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",2"));
    }
}
