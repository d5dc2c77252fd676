//! Instance generation and input-file loading.
//!
//! Default generators: marked sets uniform over the size-`k` subsets of
//! `[N]`; vectors i.i.d. uniform `b`-bit fractions. Either can be replaced
//! by an input file.

use std::path::Path;

use qsearch_core::oracle::{parse_bit_string, parse_vector};
use qsearch_core::{BitStringOracle, Error, FixedVector, LedgerHandle, Rng};

/// Uniform random size-`k` subset of `[1, n]`, sorted.
pub fn random_marked(n: u64, k: u64, rng: &mut Rng) -> Vec<u64> {
    assert!(k <= n);
    // partial Fisher-Yates on the index set
    let mut pool: Vec<u64> = (1..=n).collect();
    for i in 0..k as usize {
        let j = i + rng.below(n - i as u64) as usize;
        pool.swap(i, j);
    }
    let mut marked = pool[..k as usize].to_vec();
    marked.sort_unstable();
    marked
}

/// Fresh oracle over a uniform random `k`-subset instance.
pub fn random_oracle(n: u64, k: u64, rng: &mut Rng) -> Result<BitStringOracle, Error> {
    let marked = random_marked(n, k, rng);
    BitStringOracle::from_marked(n, &marked, LedgerHandle::default())
}

/// Fresh vector of `n` i.i.d. uniform `bits`-bit fractions.
pub fn random_fixed_vector(n: u64, bits: u32, rng: &mut Rng) -> Result<FixedVector, Error> {
    let max = (1u64 << bits) - 1;
    let raw: Vec<u64> = (0..n).map(|_| rng.below(max + 1)).collect();
    FixedVector::new(raw, bits, LedgerHandle::default())
}

/// Load a search string from a text file of 0/1 characters.
pub fn load_oracle(path: &Path) -> Result<BitStringOracle, Error> {
    let text = std::fs::read_to_string(path)?;
    BitStringOracle::new(parse_bit_string(&text)?, LedgerHandle::default())
}

/// Load a vector from a text file, one entry per line (binary fraction or
/// decimal in `[0, 1]`).
pub fn load_vector(path: &Path, bits: u32) -> Result<FixedVector, Error> {
    let text = std::fs::read_to_string(path)?;
    FixedVector::new(parse_vector(&text, bits)?, bits, LedgerHandle::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsearch_core::Oracle;

    #[test]
    fn random_marked_has_requested_size_and_range() {
        let mut rng = Rng::new(1);
        for _ in 0..50 {
            let m = random_marked(128, 10, &mut rng);
            assert_eq!(m.len(), 10);
            assert!(m.windows(2).all(|w| w[0] < w[1]));
            assert!(m.iter().all(|&i| (1..=128).contains(&i)));
        }
    }

    #[test]
    fn random_marked_is_uniform_over_elements() {
        let mut rng = Rng::new(2);
        let mut counts = vec![0u64; 16];
        for _ in 0..20_000 {
            for i in random_marked(16, 4, &mut rng) {
                counts[i as usize - 1] += 1;
            }
        }
        assert!(qsearch_core::stats::chi2_uniform_pvalue(&counts) > 0.001);
    }

    #[test]
    fn random_oracle_matches_its_marked_set() {
        let mut rng = Rng::new(3);
        let o = random_oracle(64, 7, &mut rng).unwrap();
        assert_eq!(o.marked_count(), 7);
    }

    #[test]
    fn random_vector_entries_in_range() {
        let mut rng = Rng::new(4);
        let v = random_fixed_vector(256, 32, &mut rng).unwrap();
        for i in 1..=256 {
            let x = v.value(i);
            assert!((0.0..1.0).contains(&x));
        }
    }
}
