//! Compact splitting statistics shared by the number-field families.
//!
//! Families at desk scale have millions of members, so the pipelines stream
//! each member into a [`FamilyStats`] (counts per prime and splitting symbol,
//! plus the summed log conductor) instead of keeping every record.

use crate::polyfactor::{all_symbols, SplittingSymbol};
use serde::Serialize;
use std::collections::HashMap;

/// Dense numbering of the splitting symbols of a fixed degree.
#[derive(Clone, Debug)]
pub struct SymbolIndex {
    n: u32,
    symbols: Vec<SplittingSymbol>,
    codes: HashMap<SplittingSymbol, u8>,
}

impl SymbolIndex {
    pub fn new(n: u32) -> Self {
        Self::from_symbols(n, all_symbols(n))
    }

    pub fn from_symbols(n: u32, symbols: Vec<SplittingSymbol>) -> Self {
        assert!(symbols.len() < 256, "too many symbols for a byte code");
        let codes = symbols.iter().enumerate().map(|(i, s)| (s.clone(), i as u8)).collect();
        SymbolIndex { n, symbols, codes }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[SplittingSymbol] {
        &self.symbols
    }

    pub fn code(&self, s: &SplittingSymbol) -> u8 {
        *self.codes.get(s).unwrap_or_else(|| panic!("symbol {s} not of degree {}", self.n))
    }

    pub fn symbol(&self, code: u8) -> &SplittingSymbol {
        &self.symbols[code as usize]
    }
}

/// Counts of splitting symbols per prime over a family, with the data
/// needed for average conductors.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyStats {
    pub n: u32,
    pub primes: Vec<u64>,
    pub symbols: Vec<SplittingSymbol>,
    counts: Vec<u64>,
    pub total: u64,
    pub sum_log_conductor: f64,
}

impl FamilyStats {
    pub fn new(index: &SymbolIndex, primes: Vec<u64>) -> Self {
        let counts = vec![0; primes.len() * index.len()];
        FamilyStats {
            n: index.n(),
            primes,
            symbols: index.symbols().to_vec(),
            counts,
            total: 0,
            sum_log_conductor: 0.0,
        }
    }

    /// Record one member: `codes[i]` is its symbol code at `primes[i]`.
    pub fn add(&mut self, codes: &[u8], log_conductor: f64) {
        debug_assert_eq!(codes.len(), self.primes.len());
        let m = self.symbols.len();
        for (i, &c) in codes.iter().enumerate() {
            self.counts[i * m + c as usize] += 1;
        }
        self.total += 1;
        self.sum_log_conductor += log_conductor;
    }

    /// Componentwise sum; both sides must share primes and symbols.
    pub fn merge(&mut self, other: &FamilyStats) {
        assert_eq!(self.primes, other.primes);
        assert_eq!(self.symbols, other.symbols);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.sum_log_conductor += other.sum_log_conductor;
    }

    pub fn prime_index(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    pub fn max_prime(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }

    /// Count of members with the given symbol at `p` (0 if `p` is not cached).
    pub fn count(&self, p: u64, s: &SplittingSymbol) -> u64 {
        match (self.prime_index(p), self.symbols.iter().position(|t| t == s)) {
            (Some(i), Some(j)) => self.counts[i * self.symbols.len() + j],
            _ => 0,
        }
    }

    /// (symbol, count) pairs at the cached prime `p`.
    pub fn counts_at(&self, p: u64) -> Option<Vec<(SplittingSymbol, u64)>> {
        let i = self.prime_index(p)?;
        let m = self.symbols.len();
        Some(self.symbols.iter().cloned().zip(self.counts[i * m..(i + 1) * m].iter().copied()).collect())
    }

    pub fn mean_log_conductor(&self) -> Option<f64> {
        (self.total > 0).then(|| self.sum_log_conductor / self.total as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let idx = SymbolIndex::new(3);
        assert_eq!(idx.len(), 5);
        for (i, s) in idx.symbols().iter().enumerate() {
            assert_eq!(idx.code(s) as usize, i);
        }
    }

    #[test]
    fn stats_merge() {
        let idx = SymbolIndex::new(3);
        let inert: SplittingSymbol = "1:3".parse().unwrap();
        let split: SplittingSymbol = "1:1+1:1+1:1".parse().unwrap();
        let mut a = FamilyStats::new(&idx, vec![2, 3]);
        let mut b = a.clone();
        a.add(&[idx.code(&inert), idx.code(&split)], 1.0);
        b.add(&[idx.code(&inert), idx.code(&inert)], 3.0);
        a.merge(&b);
        assert_eq!(a.total, 2);
        assert_eq!(a.count(2, &inert), 2);
        assert_eq!(a.count(3, &split), 1);
        assert_eq!(a.count(5, &split), 0);
        assert_eq!(a.mean_log_conductor(), Some(2.0));
    }
}
