//! Semantic oracle models and query accounting.
//!
//! A [`BitStringOracle`] models unitary access to a bit string `x` in the
//! sense of `U_x |i>|b> = |i>|b XOR x_i>`; a [`FixedVector`] models binary
//! access to `(0,b)` fixed-point entries of a vector. Algorithms interact
//! with oracles only through queries, which charge the trial's ledger; the
//! simulation engine additionally reads ground truth through `peek`-style
//! accessors, which never charge.
//!
//! Derived oracles (masking, interval restriction, thresholding) forward
//! their query charges to the root ledger, so the root totals account for
//! every query a composite algorithm makes.

use std::cell::RefCell;

use crate::error::Error;
use crate::ledger::LedgerHandle;
use crate::rng::Rng;

/// Sorted, duplicate-free list of 1-based indices with O(log) lookup.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SortedIndexList {
    idx: Vec<u64>,
}

impl SortedIndexList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sorted(idx: Vec<u64>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        SortedIndexList { idx }
    }

    /// Insert; returns false if already present.
    pub fn insert(&mut self, i: u64) -> bool {
        match self.idx.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.idx.insert(pos, i);
                true
            }
        }
    }

    pub fn contains(&self, i: u64) -> bool {
        self.idx.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.idx
    }
}

/// Query access to a (possibly derived) bit string over a power-of-two
/// domain, with exact ledger accounting.
pub trait Oracle {
    /// Domain size (power of two).
    fn domain_size(&self) -> u64;

    fn ledger(&self) -> &LedgerHandle;

    /// Ledger cost of `n` queries to this oracle, without reading a bit.
    fn charge_queries(&self, n: u64);

    /// Ground-truth bit at 1-based `i`; simulation-internal, never charges.
    fn peek(&self, i: u64) -> bool;

    /// Ground-truth marked count; simulation-internal.
    fn marked_count(&self) -> u64;

    /// Ground-truth sorted marked indices (1-based); simulation-internal.
    fn marked_indices(&self) -> Vec<u64>;

    /// One quantum query: charges the ledger and returns the bit.
    fn query(&self, i: u64) -> Result<bool, Error> {
        if i < 1 || i > self.domain_size() {
            return Err(Error::Domain(format!(
                "index {i} outside [1, {}]",
                self.domain_size()
            )));
        }
        self.charge_queries(1);
        Ok(self.peek(i))
    }
}

/// Oracle for a concrete bit string of power-of-two length.
#[derive(Debug, Clone)]
pub struct BitStringOracle {
    bits: Vec<bool>,
    ledger: LedgerHandle,
    /// sorted 1-based marked indices, precomputed
    marked: Vec<u64>,
}

impl BitStringOracle {
    pub fn new(bits: Vec<bool>, ledger: LedgerHandle) -> Result<Self, Error> {
        if bits.len() < 2 || !bits.len().is_power_of_two() {
            return Err(Error::Domain(
                "bit string length must be a power of two >= 2".into(),
            ));
        }
        let marked = bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i as u64 + 1))
            .collect();
        Ok(BitStringOracle { bits, ledger, marked })
    }

    /// Build from a marked set over `[1, n]`.
    pub fn from_marked(n: u64, marked: &[u64], ledger: LedgerHandle) -> Result<Self, Error> {
        let mut bits = vec![false; n as usize];
        for &i in marked {
            assert!((1..=n).contains(&i));
            bits[i as usize - 1] = true;
        }
        Self::new(bits, ledger)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl Oracle for BitStringOracle {
    fn domain_size(&self) -> u64 {
        self.bits.len() as u64
    }

    fn ledger(&self) -> &LedgerHandle {
        &self.ledger
    }

    fn charge_queries(&self, n: u64) {
        self.ledger.charge_queries(n);
    }

    fn peek(&self, i: u64) -> bool {
        self.bits[i as usize - 1]
    }

    fn marked_count(&self) -> u64 {
        self.marked.len() as u64
    }

    fn marked_indices(&self) -> Vec<u64> {
        self.marked.clone()
    }
}

/// `z_i = x_i` for `i` outside the masked set, `z_i = 0` inside: the
/// control-on-`j`-NOT composition used to exclude already-found indices.
/// Each query costs one parent query plus `|J| log2(N)` analytic gates.
pub struct MaskedOracle<'a> {
    parent: &'a dyn Oracle,
    masked: RefCell<SortedIndexList>,
}

/// Build a masked oracle; every masked index must be marked in the parent.
pub fn mask_found<'a>(
    parent: &'a dyn Oracle,
    found: &SortedIndexList,
) -> Result<MaskedOracle<'a>, Error> {
    for &j in found.as_slice() {
        if j < 1 || j > parent.domain_size() {
            return Err(Error::Domain(format!("masked index {j} out of range")));
        }
        if !parent.peek(j) {
            return Err(Error::Precondition(format!(
                "masking non-marked index {j}"
            )));
        }
    }
    Ok(MaskedOracle {
        parent,
        masked: RefCell::new(found.clone()),
    })
}

impl MaskedOracle<'_> {
    /// Extend the mask with a newly found marked index.
    pub fn add_mask(&self, j: u64) -> Result<(), Error> {
        if !self.parent.peek(j) {
            return Err(Error::Precondition(format!(
                "masking non-marked index {j}"
            )));
        }
        self.masked.borrow_mut().insert(j);
        Ok(())
    }

    pub fn masked_len(&self) -> usize {
        self.masked.borrow().len()
    }
}

impl Oracle for MaskedOracle<'_> {
    fn domain_size(&self) -> u64 {
        self.parent.domain_size()
    }

    fn ledger(&self) -> &LedgerHandle {
        self.parent.ledger()
    }

    fn charge_queries(&self, n: u64) {
        self.parent.charge_queries(n);
        let per_query = self.masked.borrow().len() as f64 * (self.domain_size() as f64).log2();
        self.ledger().charge_gates(n as f64 * per_query);
    }

    fn peek(&self, i: u64) -> bool {
        !self.masked.borrow().contains(i) && self.parent.peek(i)
    }

    fn marked_count(&self) -> u64 {
        self.parent.marked_count() - self.masked.borrow().len() as u64
    }

    fn marked_indices(&self) -> Vec<u64> {
        let masked = self.masked.borrow();
        self.parent
            .marked_indices()
            .into_iter()
            .filter(|&i| !masked.contains(i))
            .collect()
    }
}

/// Restriction of a parent oracle to the open interval `(lo, hi)`, padded up
/// to a power-of-two domain. Index `j` of the restriction maps to parent
/// index `lo + j`; padding positions are unmarked. Each query costs one
/// parent query plus `log2(N)` gates for the addition and comparison.
pub struct IntervalOracle<'a> {
    parent: &'a dyn Oracle,
    lo: u64,
    hi: u64,
    domain: u64,
}

/// Restrict `oracle` to the open interval `(lo, hi)`; requires
/// `0 <= lo < hi <= N+1` with at least one interior point.
pub fn restrict_interval<'a>(
    parent: &'a dyn Oracle,
    lo: u64,
    hi: u64,
) -> Result<IntervalOracle<'a>, Error> {
    let n = parent.domain_size();
    if lo >= hi || hi > n + 1 || hi - lo < 2 {
        return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
    }
    let width = hi - 1 - lo;
    let domain = width.next_power_of_two();
    Ok(IntervalOracle { parent, lo, hi, domain })
}

impl Oracle for IntervalOracle<'_> {
    fn domain_size(&self) -> u64 {
        self.domain
    }

    fn ledger(&self) -> &LedgerHandle {
        self.parent.ledger()
    }

    fn charge_queries(&self, n: u64) {
        self.parent.charge_queries(n);
        self.ledger()
            .charge_gates(n as f64 * (self.parent.domain_size() as f64).log2());
    }

    fn peek(&self, j: u64) -> bool {
        let i = self.lo + j;
        i < self.hi && i <= self.parent.domain_size() && self.parent.peek(i)
    }

    fn marked_count(&self) -> u64 {
        self.marked_indices().len() as u64
    }

    fn marked_indices(&self) -> Vec<u64> {
        self.parent
            .marked_indices()
            .into_iter()
            .filter(|&i| i > self.lo && i < self.hi)
            .map(|i| i - self.lo)
            .collect()
    }
}

/// A `(0,b)` fixed-point value together with its tie-break index; ordering is
/// lexicographic on `(raw, tie)`, which makes all stored entries distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedKey {
    pub raw: u64,
    pub tie: u64,
}

impl FixedKey {
    /// A plain threshold value with the lowest tie-break, so `key >= plain(z)`
    /// reduces to `raw >= z`.
    pub fn plain(raw: u64) -> Self {
        FixedKey { raw, tie: 0 }
    }
}

/// Vector of `(0,b)` fixed-point entries with binary oracle access.
/// Entry values are `raw / 2^b` in `[0, 1 - 2^-b]`; comparisons are
/// tie-broken by index, so entries are pairwise distinct.
#[derive(Debug, Clone)]
pub struct FixedVector {
    raw: Vec<u64>,
    bits: u32,
    ledger: LedgerHandle,
    /// entry indices (1-based) sorted ascending by key
    order: Vec<u64>,
}

impl FixedVector {
    pub fn new(raw: Vec<u64>, bits: u32, ledger: LedgerHandle) -> Result<Self, Error> {
        if bits == 0 || bits > 63 {
            return Err(Error::Domain("bit width must be in [1, 63]".into()));
        }
        if raw.len() < 1 {
            return Err(Error::Domain("empty vector".into()));
        }
        let max = (1u64 << bits) - 1;
        if raw.iter().any(|&r| r > max) {
            return Err(Error::Domain("entry exceeds 1 - 2^-b".into()));
        }
        let mut order: Vec<u64> = (1..=raw.len() as u64).collect();
        order.sort_by_key(|&i| (raw[i as usize - 1], i));
        Ok(FixedVector { raw, bits, ledger, order })
    }

    /// Build from real values in `[0, 1]`, rounded to the nearest `b`-bit
    /// fraction (values rounding to 1 clamp to `1 - 2^-b`).
    pub fn from_values(values: &[f64], bits: u32, ledger: LedgerHandle) -> Result<Self, Error> {
        let max = (1u64 << bits) - 1;
        let raw = values
            .iter()
            .map(|&v| {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Domain(format!("value {v} outside [0,1]")));
                }
                Ok(((v * (1u64 << bits) as f64).round() as u64).min(max))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw, bits, ledger)
    }

    pub fn len(&self) -> u64 {
        self.raw.len() as u64
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn ledger(&self) -> &LedgerHandle {
        &self.ledger
    }

    /// Real value of entry `i` (1-based); ground truth, no charge.
    pub fn value(&self, i: u64) -> f64 {
        self.raw[i as usize - 1] as f64 / (1u64 << self.bits) as f64
    }

    pub fn raw(&self, i: u64) -> u64 {
        self.raw[i as usize - 1]
    }

    pub fn key(&self, i: u64) -> FixedKey {
        FixedKey { raw: self.raw[i as usize - 1], tie: i }
    }

    /// One binary query `U_v`: charges 1 and returns the raw entry.
    pub fn query_raw(&self, i: u64) -> Result<u64, Error> {
        if i < 1 || i > self.len() {
            return Err(Error::Domain(format!("index {i} out of range")));
        }
        self.ledger.charge_queries(1);
        Ok(self.raw[i as usize - 1])
    }

    /// Charge `n` vector queries without reading.
    pub fn charge_queries(&self, n: u64) {
        self.ledger.charge_queries(n);
    }

    /// Ground-truth number of entries with key `>= z`.
    pub fn rank_geq(&self, z: FixedKey) -> u64 {
        let below = self
            .order
            .partition_point(|&i| (self.raw[i as usize - 1], i) < (z.raw, z.tie));
        self.len() - below as u64
    }

    /// Ground-truth number of entries with key strictly above `z`.
    pub fn rank_gt(&self, z: FixedKey) -> u64 {
        let not_above = self
            .order
            .partition_point(|&i| (self.raw[i as usize - 1], i) <= (z.raw, z.tie));
        self.len() - not_above as u64
    }

    /// The entry index holding the `r`-th largest key (`r = 1` is the max).
    pub fn select_largest(&self, r: u64) -> u64 {
        assert!(r >= 1 && r <= self.len());
        self.order[self.order.len() - r as usize]
    }

    /// Ground-truth argmax under the tie-broken order.
    pub fn max_index(&self) -> u64 {
        *self.order.last().unwrap()
    }

    /// Exact sum of all entry values.
    pub fn sum(&self) -> f64 {
        let scale = (1u64 << self.bits) as f64;
        self.raw.iter().map(|&r| r as f64).sum::<f64>() / scale
    }

    /// Indices (1-based, ascending by key) of entries with key `>= z`.
    pub fn indices_geq(&self, z: FixedKey) -> Vec<u64> {
        let below = self
            .order
            .partition_point(|&i| (self.raw[i as usize - 1], i) < (z.raw, z.tie));
        self.order[below..].to_vec()
    }

    /// Slice `[lo, hi)` of the key-ascending index order.
    pub(crate) fn order_slice(&self, lo: usize, hi: usize) -> &[u64] {
        &self.order[lo..hi]
    }
}

/// Comparison mode for threshold oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cmp {
    /// Marked iff `key_i >= z`.
    Geq,
    /// Marked iff `key_i > z`.
    Gt,
}

/// Bit-string view of a fixed vector marking the entries inside a key band:
/// at or above a lower threshold (inclusive or strict) and, optionally,
/// strictly below an upper one. Each query costs two vector queries (compute
/// and uncompute) plus `b` gates for the comparison.
pub struct ThresholdOracle<'a> {
    vector: &'a FixedVector,
    lower: Option<(FixedKey, Cmp)>,
    upper: Option<FixedKey>,
    domain: u64,
}

/// Threshold oracle over `v` with `x_i = [v_i >= z]` under the tie-broken
/// comparison.
pub fn threshold_oracle<'a>(vector: &'a FixedVector, z: FixedKey) -> ThresholdOracle<'a> {
    threshold_oracle_cmp(vector, z, Cmp::Geq)
}

pub fn threshold_oracle_cmp<'a>(
    vector: &'a FixedVector,
    z: FixedKey,
    cmp: Cmp,
) -> ThresholdOracle<'a> {
    band_oracle(vector, Some((z, cmp)), None)
}

/// Oracle marking entries with `lower <= key < upper` (lower per its
/// comparison mode; either bound may be absent).
pub fn band_oracle<'a>(
    vector: &'a FixedVector,
    lower: Option<(FixedKey, Cmp)>,
    upper: Option<FixedKey>,
) -> ThresholdOracle<'a> {
    let domain = vector.len().next_power_of_two().max(2);
    ThresholdOracle { vector, lower, upper, domain }
}

impl ThresholdOracle<'_> {
    /// Position range of the marked entries in the vector's sorted order.
    fn order_range(&self) -> (usize, usize) {
        let lo = match self.lower {
            None => 0,
            Some((z, Cmp::Geq)) => self.vector.len() - self.vector.rank_geq(z),
            Some((z, Cmp::Gt)) => self.vector.len() - self.vector.rank_gt(z),
        } as usize;
        let hi = match self.upper {
            None => self.vector.len(),
            Some(u) => self.vector.len() - self.vector.rank_geq(u),
        } as usize;
        (lo, hi.max(lo))
    }
}

impl Oracle for ThresholdOracle<'_> {
    fn domain_size(&self) -> u64 {
        self.domain
    }

    fn ledger(&self) -> &LedgerHandle {
        self.vector.ledger()
    }

    fn charge_queries(&self, n: u64) {
        self.vector.charge_queries(2 * n);
        self.ledger().charge_gates(n as f64 * self.vector.bits() as f64);
    }

    fn peek(&self, i: u64) -> bool {
        if i > self.vector.len() {
            return false; // padding
        }
        let k = self.vector.key(i);
        let above = match self.lower {
            None => true,
            Some((z, Cmp::Geq)) => k >= z,
            Some((z, Cmp::Gt)) => k > z,
        };
        above && self.upper.map_or(true, |u| k < u)
    }

    fn marked_count(&self) -> u64 {
        let (lo, hi) = self.order_range();
        (hi - lo) as u64
    }

    fn marked_indices(&self) -> Vec<u64> {
        let (lo, hi) = self.order_range();
        let mut v = self.vector.order_slice(lo, hi).to_vec();
        v.sort_unstable();
        v
    }
}

/// Rescaled-amplitude input for the summing estimator: computes
/// `a = (1/N) sum_i sin^2(alpha_i)` where `alpha_i` is the rounded
/// `ceil(log2(4N/delta))`-bit approximation of `arcsin(sqrt(w_i))` and
/// `w_i = v_i / z` for entries strictly below the threshold, else 0.
pub fn rescaled_amplitude(v: &FixedVector, z: FixedKey, delta: f64) -> Result<f64, Error> {
    if z.raw == 0 {
        return Err(Error::Precondition(
            "zero threshold: take the classical-sum branch".into(),
        ));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Domain("delta must be in (0,1)".into()));
    }
    let n = v.len();
    let frac_bits = (4.0 * n as f64 / delta).log2().ceil() as i32;
    let scale = 2f64.powi(frac_bits);
    let mut acc = 0.0;
    for i in 1..=n {
        if v.key(i) >= z {
            continue;
        }
        let w = v.raw(i) as f64 / z.raw as f64;
        let alpha = (w.sqrt().asin() * scale).round() / scale;
        acc += alpha.sin().powi(2);
    }
    Ok(acc / n as f64)
}

/// Uniform random sample from the ground-truth marked set of `oracle`.
/// Simulation-internal. Returns `None` when nothing is marked.
pub fn sample_marked(oracle: &dyn Oracle, rng: &mut Rng) -> Option<u64> {
    let marked = oracle.marked_indices();
    if marked.is_empty() {
        None
    } else {
        Some(marked[rng.below(marked.len() as u64) as usize])
    }
}

/// Parse a bit string from text: 0/1 characters, whitespace ignored.
pub fn parse_bit_string(text: &str) -> Result<Vec<bool>, Error> {
    let mut bits = Vec::new();
    for c in text.chars() {
        match c {
            '0' => bits.push(false),
            '1' => bits.push(true),
            c if c.is_whitespace() => {}
            c => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    if bits.is_empty() || !bits.len().is_power_of_two() {
        return Err(Error::Parse(format!(
            "bit string length {} is not a power of two",
            bits.len()
        )));
    }
    Ok(bits)
}

/// Parse vector entries, one per line: either a binary fraction (`0101` or
/// `0.0101`, bits after the point) or a decimal in `[0,1]` converted with
/// round-to-nearest.
pub fn parse_vector(text: &str, bits: u32) -> Result<Vec<u64>, Error> {
    let max = (1u64 << bits) - 1;
    let mut raw = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let frac = line.strip_prefix("0.").or_else(|| line.strip_prefix('.'));
        let as_binary = frac.unwrap_or(line);
        if as_binary.chars().all(|c| c == '0' || c == '1') && (frac.is_some() || !line.contains('.'))
        {
            // binary fraction, MSB first; extra bits round to nearest
            let mut value = 0u64;
            for (j, c) in as_binary.chars().enumerate() {
                if (j as u32) < bits {
                    value = (value << 1) | (c == '1') as u64;
                } else if j as u32 == bits {
                    value = value.wrapping_add((c == '1') as u64).min(max);
                }
            }
            let shortfall = bits.saturating_sub(as_binary.len() as u32);
            raw.push((value << shortfall).min(max));
        } else {
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("bad entry {line:?}")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Parse(format!("entry {v} outside [0,1]")));
            }
            raw.push(((v * (1u64 << bits) as f64).round() as u64).min(max));
        }
    }
    if raw.is_empty() {
        return Err(Error::Parse("no vector entries".into()));
    }
    Ok(raw)
}
