use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A permutation of `0..len` with spread `s`: positions at most `s` apart map to
/// values at least `s` apart. Coded bit `i` is sent at channel position `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
    spread: usize,
    seed: u64,
}

/// The usual feasibility bound `floor(sqrt(len / 2))`.
pub fn default_spread(len: usize) -> usize {
    ((len / 2) as f64).sqrt().floor() as usize
}

impl Interleaver {
    /// Wraps an explicit permutation after checking bijectivity and spread.
    pub fn from_permutation(perm: Vec<usize>, spread: usize) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameters("not a permutation".into()));
            }
        }
        if !spread_holds(&perm, spread) {
            return Err(Error::InvalidParameters(format!(
                "spread {spread} violated"
            )));
        }
        Ok(Interleaver {
            perm,
            spread,
            seed: 0,
        })
    }

    pub fn identity(len: usize) -> Self {
        Interleaver {
            perm: (0..len).collect(),
            spread: 1.min(len),
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn spread(&self) -> usize {
        self.spread
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy + Default>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.perm.len());
        let mut y = vec![T::default(); x.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = x[i];
        }
        y
    }

    pub fn deinterleave<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.perm.len());
        self.perm.iter().map(|&p| y[p]).collect()
    }

    pub fn verify(&self) -> bool {
        spread_holds(&self.perm, self.spread)
    }
}

/// Exhaustive check of the spread property.
pub fn spread_holds(perm: &[usize], s: usize) -> bool {
    (0..perm.len())
        .all(|i| (i + 1..perm.len().min(i + s + 1)).all(|j| perm[i].abs_diff(perm[j]) >= s))
}

fn conflict_free(perm: &[usize], i: usize, s: usize) -> bool {
    let lo = i.saturating_sub(s);
    let hi = perm.len().min(i + s + 1);
    (lo..hi).all(|j| j == i || perm[i].abs_diff(perm[j]) >= s)
}

/// Randomized greedy construction followed by swap repair of the positions the
/// greedy pass could not place. Deterministic for a given seed.
pub fn srandom_interleaver(
    len: usize,
    s: usize,
    seed: u64,
    max_restarts: usize,
) -> Result<Interleaver> {
    if s <= 1 || len < 2 {
        return Ok(Interleaver {
            perm: (0..len).collect(),
            spread: s,
            seed,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=max_restarts {
        if let Some(perm) = attempt(len, s, &mut rng) {
            debug_assert!(spread_holds(&perm, s));
            return Ok(Interleaver {
                perm,
                spread: s,
                seed,
            });
        }
    }
    Err(Error::InterleaverFailed {
        len,
        spread: s,
        restarts: max_restarts,
    })
}

fn attempt(len: usize, s: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut pool: Vec<usize> = (0..len).collect();
    pool.shuffle(rng);
    let mut perm = Vec::with_capacity(len);
    for i in 0..len {
        let lo = i.saturating_sub(s);
        let pick = pool
            .iter()
            .position(|&v| perm[lo..i].iter().all(|&u: &usize| u.abs_diff(v) >= s))
            .unwrap_or(0);
        perm.push(pool.swap_remove(pick));
    }

    let budget = 200 * len;
    let mut tries = 0;
    loop {
        let bad: Vec<usize> = (0..len).filter(|&i| !conflict_free(&perm, i, s)).collect();
        if bad.is_empty() {
            return Some(perm);
        }
        for i in bad {
            if conflict_free(&perm, i, s) {
                continue;
            }
            loop {
                tries += 1;
                if tries > budget {
                    return None;
                }
                let j = rng.random_range(0..len);
                perm.swap(i, j);
                if conflict_free(&perm, i, s) && conflict_free(&perm, j, s) {
                    break;
                }
                perm.swap(i, j);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spread() {
        let il = srandom_interleaver(16, 2, 7, 10).unwrap();
        assert!(spread_holds(il.permutation(), 2));
    }

    #[test]
    fn round_trip() {
        let il = srandom_interleaver(200, 10, 1, 10).unwrap();
        let x: Vec<u32> = (0..200).collect();
        assert_eq!(il.deinterleave(&il.interleave(&x)), x);
    }

    #[test]
    fn deterministic() {
        let a = srandom_interleaver(300, 12, 5, 10).unwrap();
        let b = srandom_interleaver(300, 12, 5, 10).unwrap();
        assert_eq!(a, b);
    }
}
