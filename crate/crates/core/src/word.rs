//! Finite words, fixed-point prefixes, and the suffix order on the fixed point.
//!
//! Public positions are 1-based (`ω₁ω₂…`); slices and internal indices are
//! 0-based.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::pattern::{PatternCensus, PatternSets};

/// A finite word over `{0, 1}`, stored as symbols `0`/`1`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    /// Panics if a symbol is not 0 or 1.
    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        assert!(symbols.iter().all(|&c| c <= 1), "binary symbols only");
        Word(symbols)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// `self` followed by one more symbol.
    pub fn extended(&self, symbol: u8) -> Word {
        let mut v = self.0.clone();
        v.push(symbol);
        Word::from_symbols(v)
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word::from_symbols(s.to_vec())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::MalformedSpec(format!(
                    "{s:?} contains a non-binary symbol"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&c| if c == 0 { '0' } else { '1' }).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `φ^depth(0)` for a fixed morphism.
#[derive(Clone, Debug)]
pub struct Prefix {
    morphism: Morphism,
    symbols: Vec<u8>,
    depth: u32,
    max_len: usize,
}

impl Prefix {
    pub(crate) fn generate(m: &Morphism, min_len: usize, cap: usize) -> Result<Self> {
        let mut p = Prefix {
            morphism: m.clone(),
            symbols: vec![0],
            depth: 0,
            max_len: cap,
        };
        p.grow_to(min_len)?;
        Ok(p)
    }

    /// Re-applies the morphism until the prefix holds at least `min_len` symbols.
    pub fn grow_to(&mut self, min_len: usize) -> Result<()> {
        while self.symbols.len() < min_len {
            let next = self.symbols.len() * self.morphism.block_len();
            if next > self.max_len {
                return Err(Error::LengthCapExceeded {
                    requested: min_len.max(next),
                    cap: self.max_len,
                });
            }
            self.symbols = self.morphism.apply(&self.symbols).as_slice().to_vec();
            self.depth += 1;
        }
        Ok(())
    }

    /// Grows to exactly `φ^depth(0)` if currently shallower.
    pub fn grow_to_depth(&mut self, depth: u32) -> Result<()> {
        while self.depth < depth {
            let target = self.symbols.len() * self.morphism.block_len();
            self.grow_to(target)?;
        }
        Ok(())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// `ω_pos` for a 1-based position inside the prefix.
    pub fn symbol(&self, pos: usize) -> Option<u8> {
        pos.checked_sub(1).and_then(|i| self.symbols.get(i)).copied()
    }

    pub fn to_word(&self) -> Word {
        Word(self.symbols.clone())
    }
}

/// An occurrence `(u, position)` with a 1-based start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub position: usize,
    pub length: usize,
}

/// The relation between two distinct suffix values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Less,
    Greater,
}

impl Order {
    pub fn reverse(self) -> Order {
        match self {
            Order::Less => Order::Greater,
            Order::Greater => Order::Less,
        }
    }
}

impl From<Order> for Ordering {
    fn from(o: Order) -> Ordering {
        match o {
            Order::Less => Ordering::Less,
            Order::Greater => Ordering::Greater,
        }
    }
}

/// Compares `R_ω(i)` with `R_ω(j)` by the first index where the suffixes differ.
///
/// Grows the prefix when the scan runs past its end.
pub fn compare_suffixes(p: &mut Prefix, i: usize, j: usize, cap: usize) -> Result<Order> {
    if i == j || i == 0 || j == 0 {
        return Err(Error::InvalidArgument(format!(
            "suffix positions must be distinct and 1-based (got {i}, {j})"
        )));
    }
    let (a, b) = (i - 1, j - 1);
    for k in 0..cap {
        let need = a.max(b) + k + 1;
        if need > p.len() {
            p.grow_to(need)?;
        }
        let (x, y) = (p.symbols[a + k], p.symbols[b + k]);
        if x != y {
            return Ok(if x < y { Order::Less } else { Order::Greater });
        }
    }
    Err(Error::LookaheadCapExceeded { i, j, cap })
}

/// The first `max_count` occurrences of `u` in the prefix, in increasing order.
pub fn occurrences(p: &Prefix, u: &[u8], max_count: usize) -> Vec<Occurrence> {
    if u.is_empty() || u.len() > p.len() {
        return Vec::new();
    }
    p.symbols
        .windows(u.len())
        .enumerate()
        .filter(|(_, w)| *w == u)
        .take(max_count)
        .map(|(i, _)| Occurrence {
            position: i + 1,
            length: u.len(),
        })
        .collect()
}

/// Computation limits shared by every analysis of one fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest prefix ever generated, in symbols.
    pub max_prefix: usize,
    /// Symbols scanned by a single suffix comparison; `None` means `64·l·L_ω`
    /// plus a distance allowance.
    pub lookahead_cap: Option<usize>,
    /// Largest synchronization length tried; `None` means `8·l`.
    pub sync_search_bound: Option<usize>,
    /// Replaces the default base threshold `l·(L_ω + 2)` when set.
    pub base_threshold_override: Option<usize>,
}

pub const DEFAULT_MAX_PREFIX: usize = 1 << 20;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_prefix: DEFAULT_MAX_PREFIX,
            lookahead_cap: None,
            sync_search_bound: None,
            base_threshold_override: None,
        }
    }
}

/// Where a factor was seen and at which phases `(position − 1) mod l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSite {
    /// 1-based position of the first occurrence.
    pub first: usize,
    /// 1-based position of the second occurrence, if the prefix has one.
    pub second: Option<usize>,
    pub phases: BTreeSet<usize>,
    /// Occurrences inside the enumerated prefix.
    pub count: usize,
}

/// All factors of one length, read off a prefix deep enough to contain them.
#[derive(Debug, Clone)]
pub struct FactorCensus {
    pub n: usize,
    /// Depth whose windows were enumerated; depth + 1 served as the witness.
    pub depth: u32,
    pub sites: BTreeMap<Word, FactorSite>,
}

impl FactorCensus {
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.sites.keys()
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.sites.contains_key(&Word::from(w))
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Newline-delimited, sorted dump of the factor set.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for w in self.sites.keys() {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

/// Global order of the suffixes starting in `[0, scan)`.
///
/// `rank[i]` is `u32::MAX` when the prefix was too short to decide suffix `i`.
#[derive(Debug, Clone)]
pub(crate) struct SuffixOrder {
    pub(crate) scan: usize,
    pub(crate) rank: Vec<u32>,
}

impl SuffixOrder {
    fn build(symbols: &[u8], scan: usize) -> Self {
        let mut idx: Vec<u32> = (0..scan as u32).collect();
        idx.sort_unstable_by(|&a, &b| symbols[a as usize..].cmp(&symbols[b as usize..]));
        let mut rank = vec![0u32; scan];
        for (r, &i) in idx.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        // A truncated suffix that is a prefix of another one has an unknown
        // place; such pairs are adjacent after sorting.
        for w in idx.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            if symbols[b..].starts_with(&symbols[a..]) {
                rank[a] = u32::MAX;
            }
        }
        SuffixOrder { scan, rank }
    }
}

/// Analysis context for the fixed point `ω = lim φ^d(0)` of one morphism.
///
/// Holds the growing prefix and caches every derived table. Methods take
/// `&mut self` because prefix growth is the only mutation and has a single
/// writer; the cached tables are handed out as shared `Arc`s.
#[derive(Debug)]
pub struct FixedPoint {
    morphism: Morphism,
    limits: Limits,
    pub(crate) prefix: Prefix,
    pair_depth: Option<u32>,
    pub(crate) order: Option<SuffixOrder>,
    factor_cache: HashMap<usize, Arc<FactorCensus>>,
    pub(crate) pattern_cache: HashMap<usize, Arc<PatternCensus>>,
    pub(crate) sets_cache: HashMap<Word, Arc<PatternSets>>,
    sync_length: Option<usize>,
}

impl FixedPoint {
    pub fn new(morphism: Morphism) -> Self {
        Self::with_limits(morphism, Limits::default())
    }

    pub fn with_limits(morphism: Morphism, limits: Limits) -> Self {
        let prefix = Prefix {
            morphism: morphism.clone(),
            symbols: vec![0],
            depth: 0,
            max_len: limits.max_prefix,
        };
        FixedPoint {
            morphism,
            limits,
            prefix,
            pair_depth: None,
            order: None,
            factor_cache: HashMap::new(),
            pattern_cache: HashMap::new(),
            sets_cache: HashMap::new(),
            sync_length: None,
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn block_len(&self) -> usize {
        self.morphism.block_len()
    }

    pub fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    /// The prefix grown to at least `min_len` symbols.
    pub fn prefix_of_len(&mut self, min_len: usize) -> Result<&Prefix> {
        self.prefix.grow_to(min_len)?;
        Ok(&self.prefix)
    }

    pub fn lookahead_cap(&mut self) -> Result<usize> {
        match self.limits.lookahead_cap {
            Some(c) => Ok(c),
            None => Ok(64 * self.block_len() * self.synchronization_length()?),
        }
    }

    /// Compares `R_ω(i)` and `R_ω(j)`.
    ///
    /// Common prefixes of a power-free word grow with the distance between
    /// the positions, so the default cap gets an allowance of `8·l·|i − j|`.
    /// An explicit cap is used as is.
    pub fn compare_suffixes(&mut self, i: usize, j: usize) -> Result<Order> {
        let cap = match self.limits.lookahead_cap {
            Some(c) => c,
            None => self.lookahead_cap()? + 8 * self.block_len() * i.abs_diff(j),
        };
        compare_suffixes(&mut self.prefix, i, j, cap)
    }

    /// Smallest depth whose prefix contains every length-2 factor of ω.
    ///
    /// Every factor of length at most `l^k + 1` lies inside `φ^k(ab)` for a
    /// length-2 factor `ab`, so `pair_depth + k` bounds where it first appears.
    fn pair_depth(&mut self) -> Result<u32> {
        if let Some(d) = self.pair_depth {
            return Ok(d);
        }
        let m = &self.morphism;
        let mut pairs: BTreeSet<[u8; 2]> = BTreeSet::new();
        let mut frontier: Vec<Word> = vec![m.block(0).clone()];
        if m.block(0).as_slice().contains(&1) {
            frontier.push(m.block(1).clone());
        }
        while let Some(w) = frontier.pop() {
            for p in w.as_slice().windows(2) {
                let pair = [p[0], p[1]];
                if pairs.insert(pair) {
                    frontier.push(m.apply(&pair));
                }
            }
        }
        let mut depth = 0;
        loop {
            self.prefix.grow_to_depth(depth)?;
            let seen: BTreeSet<[u8; 2]> = self
                .prefix
                .symbols
                .windows(2)
                .map(|p| [p[0], p[1]])
                .collect();
            if pairs.is_subset(&seen) {
                self.pair_depth = Some(depth);
                return Ok(depth);
            }
            depth += 1;
        }
    }

    /// A depth whose prefix provably contains every factor of length `n`.
    pub fn factor_depth(&mut self, n: usize) -> Result<u32> {
        let l = self.block_len();
        let mut k = 0u32;
        let mut span = 1usize;
        while span + 1 < n {
            span = span.saturating_mul(l);
            k += 1;
        }
        let mut d = self.pair_depth()? + k;
        // at least one full window
        while l.checked_pow(d).is_none_or(|x| x < n) {
            d += 1;
        }
        Ok(d)
    }

    fn census_at(&self, n: usize, depth: u32) -> BTreeMap<Word, FactorSite> {
        let l = self.block_len();
        let end = l.pow(depth);
        let mut sites: BTreeMap<Word, FactorSite> = BTreeMap::new();
        let mut seen: HashMap<&[u8], usize> = HashMap::new();
        let mut raw: Vec<(usize, Option<usize>, BTreeSet<usize>, usize)> = Vec::new();
        for (i, w) in self.prefix.symbols[..end].windows(n).enumerate() {
            let slot = *seen.entry(w).or_insert_with(|| {
                raw.push((i + 1, None, BTreeSet::new(), 0));
                raw.len() - 1
            });
            let site = &mut raw[slot];
            if site.3 == 1 {
                site.1 = Some(i + 1);
            }
            site.2.insert(i % l);
            site.3 += 1;
        }
        for (w, slot) in seen {
            let (first, second, phases, count) = std::mem::take(&mut raw[slot]);
            sites.insert(
                Word::from(w),
                FactorSite {
                    first,
                    second,
                    phases,
                    count,
                },
            );
        }
        sites
    }

    /// The length-`n` factors of ω with first occurrences and phases.
    ///
    /// Windows of `φ^d(0)` are enumerated at a depth known to contain every
    /// factor; the next depth must add nothing (and no new phase).
    pub fn factor_census(&mut self, n: usize) -> Result<Arc<FactorCensus>> {
        if n == 0 {
            return Err(Error::InvalidArgument("factor length must be positive".into()));
        }
        if let Some(c) = self.factor_cache.get(&n) {
            return Ok(c.clone());
        }
        let mut depth = self.factor_depth(n)?;
        loop {
            self.prefix.grow_to_depth(depth + 1).map_err(|e| match e {
                Error::LengthCapExceeded { cap, .. } => Error::StabilizationCapExceeded {
                    what: format!("factor set of length {n}"),
                    cap,
                },
                e => e,
            })?;
            let here = self.census_at(n, depth);
            let next = self.census_at(n, depth + 1);
            let stable = here.len() == next.len()
                && here
                    .iter()
                    .zip(next.iter())
                    .all(|((a, x), (b, y))| a == b && x.phases == y.phases);
            if stable {
                let census = Arc::new(FactorCensus {
                    n,
                    depth,
                    sites: next,
                });
                self.factor_cache.insert(n, census.clone());
                return Ok(census);
            }
            depth += 1;
        }
    }

    pub fn factors(&mut self, n: usize) -> Result<BTreeSet<Word>> {
        Ok(self.factor_census(n)?.sites.keys().cloned().collect())
    }

    pub fn is_factor(&mut self, u: &[u8]) -> Result<bool> {
        if u.is_empty() {
            return Ok(true);
        }
        Ok(self.factor_census(u.len())?.contains(u))
    }

    /// The smallest `L` such that every factor of length `L` occurs at a
    /// single phase modulo `l`.
    pub fn synchronization_length(&mut self) -> Result<usize> {
        if let Some(s) = self.sync_length {
            return Ok(s);
        }
        let bound = self
            .limits
            .sync_search_bound
            .unwrap_or(8 * self.block_len());
        for len in 1..=bound {
            let census = self.factor_census(len)?;
            if census.sites.values().all(|s| s.phases.len() == 1) {
                self.sync_length = Some(len);
                return Ok(len);
            }
        }
        Err(Error::NotCircular { bound })
    }

    /// Suffix ranks valid for every window inside `[0, scan)`.
    pub(crate) fn suffix_order(&mut self, scan: usize) -> Result<&SuffixOrder> {
        let fresh = match &self.order {
            Some(o) => o.scan < scan,
            None => true,
        };
        if fresh {
            let l = self.block_len();
            let mut len = scan.saturating_mul(l);
            loop {
                self.prefix.grow_to(len).map_err(|e| match e {
                    Error::LengthCapExceeded { cap, .. } => Error::StabilizationCapExceeded {
                        what: format!("suffix order over {scan} positions"),
                        cap,
                    },
                    e => e,
                })?;
                let order = SuffixOrder::build(&self.prefix.symbols, scan);
                if order.rank.iter().all(|&r| r != u32::MAX) {
                    self.order = Some(order);
                    break;
                }
                len = self.prefix.len() * l;
            }
        }
        Ok(self.order.as_ref().expect("order built above"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm() -> FixedPoint {
        FixedPoint::new(Morphism::thue_morse())
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn prefixes_of_thue_morse() {
        let m = Morphism::thue_morse();
        let p = m.fixed_point_prefix(4, 1 << 10).unwrap();
        assert_eq!(p.to_word(), w("0110"));
        assert_eq!(p.depth(), 2);
        let p = m.fixed_point_prefix(16, 1 << 10).unwrap();
        assert_eq!(p.to_word(), w("0110100110010110"));
        assert_eq!(p.symbol(1), Some(0));
        assert!(matches!(
            m.fixed_point_prefix(2048, 1024),
            Err(Error::LengthCapExceeded { .. })
        ));
    }

    #[test]
    fn prefix_of_form_a_example() {
        let m: Morphism = "011101/100010".parse().unwrap();
        let p = m.fixed_point_prefix(36, 1 << 10).unwrap();
        // hand expansion of φ(011101)
        let hand = "011101 100010 100010 100010 011101 100010".replace(' ', "");
        assert_eq!(p.to_word().to_string(), hand);
        assert_eq!(p.depth(), 2);
    }

    #[test]
    fn suffix_comparisons() {
        let mut p = Morphism::thue_morse().fixed_point_prefix(2, 1 << 12).unwrap();
        assert_eq!(compare_suffixes(&mut p, 1, 2, 100).unwrap(), Order::Less);
        // 0110100110… vs 100110…
        assert_eq!(compare_suffixes(&mut p, 1, 5, 100).unwrap(), Order::Less);
        assert_eq!(compare_suffixes(&mut p, 5, 1, 100).unwrap(), Order::Greater);
        assert!(p.len() >= 5);
        assert!(matches!(
            compare_suffixes(&mut p, 1, 1, 100),
            Err(Error::InvalidArgument(_))
        ));
        // ω₁ω₂… and ω₉ω₁₀… = 0110 1001 / 1001 0110: differ at once, but
        // positions 1 and 4 share "0" then "11" vs "01"
        assert!(matches!(
            compare_suffixes(&mut p, 1, 7, 1),
            Err(Error::LookaheadCapExceeded { .. })
        ));
    }

    #[test]
    fn occurrence_search() {
        let p = Morphism::thue_morse().fixed_point_prefix(16, 1 << 10).unwrap();
        let found: Vec<usize> = occurrences(&p, &[0, 1, 0], 2)
            .iter()
            .map(|o| o.position)
            .collect();
        assert_eq!(found, vec![4, 11]);
        let p4 = Morphism::thue_morse().fixed_point_prefix(4, 1 << 10).unwrap();
        assert_eq!(occurrences(&p4, &[1, 1], 10).len(), 1);
        assert_eq!(occurrences(&p4, &[1, 1], 10)[0].position, 2);
        assert!(occurrences(&p, &[0, 0, 0], 10).is_empty());
    }

    #[test]
    fn thue_morse_factor_sets() {
        let mut fp = tm();
        let two: Vec<String> = fp.factors(2).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(two, ["00", "01", "10", "11"]);
        let three: Vec<String> = fp.factors(3).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(three, ["001", "010", "011", "100", "101", "110"]);
        assert_eq!(fp.factors(1).unwrap().len(), 2);
        assert_eq!(fp.factor_census(3).unwrap().dump(), "001\n010\n011\n100\n101\n110\n");
    }

    #[test]
    fn synchronization_lengths() {
        let mut fp = tm();
        assert_eq!(fp.synchronization_length().unwrap(), 4);
        let census = fp.factor_census(2).unwrap();
        assert_eq!(census.sites[&w("01")].phases.len(), 2);
    }

    #[test]
    fn suffix_order_agrees_with_direct_comparison() {
        let mut fp = tm();
        let ranks = fp.suffix_order(200).unwrap().rank.clone();
        for i in 1..=60usize {
            for j in (i + 1)..=60 {
                let direct = fp.compare_suffixes(i, j).unwrap();
                let bulk = if ranks[i - 1] < ranks[j - 1] {
                    Order::Less
                } else {
                    Order::Greater
                };
                assert_eq!(direct, bulk, "{i} vs {j}");
            }
        }
    }
}
