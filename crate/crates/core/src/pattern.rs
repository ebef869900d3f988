//! Finite permutation patterns induced by consecutive suffix values, their
//! equivalence, and the per-word pattern statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{FixedPoint, Order, Word};

/// A permutation `π₁…π_n` of `{1, …, n}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Vec<u16>);

impl Pattern {
    pub fn new(ranks: Vec<u16>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            let r = usize::from(r);
            if r == 0 || r > n || std::mem::replace(&mut seen[r - 1], true) {
                return Err(Error::InvalidArgument(format!(
                    "{ranks:?} is not a permutation of 1..{n}"
                )));
            }
        }
        Ok(Pattern(ranks))
    }

    /// The relative order of distinct values.
    pub fn from_values<T: Ord>(values: &[T]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_unstable_by(|&a, &b| values[a].cmp(&values[b]));
        let mut ranks = vec![0u16; values.len()];
        for (r, &i) in idx.iter().enumerate() {
            ranks[i] = (r + 1) as u16;
        }
        Pattern(ranks)
    }

    pub fn ranks(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The relation `γ(π_s, π_t)` for 0-based indices.
    pub fn relation(&self, s: usize, t: usize) -> Order {
        if self.0[s] < self.0[t] {
            Order::Less
        } else {
            Order::Greater
        }
    }

    /// The pattern with the relation between its extreme elements flipped,
    /// if that is again a permutation pattern.
    pub fn flip_extremes(&self) -> Option<Pattern> {
        if !can_have_equivalent(self) {
            return None;
        }
        let k = self.0.len();
        // Swapping two adjacent values changes only their mutual relation.
        let mut ranks = self.0.clone();
        ranks.swap(0, k - 1);
        Some(Pattern(ranks))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Accepts space-separated ranks, or bare digits when every rank is below 10.
impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse pattern {s:?}"));
        let ranks: Vec<u16> = if s.trim().contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u16).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        Pattern::new(ranks)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The pattern induced by `R(pos), …, R(pos + n − 1)` (1-based `pos`).
///
/// Uses pairwise suffix comparison; the bulk census uses precomputed ranks.
pub fn extract_pattern(fp: &mut FixedPoint, pos: usize, n: usize) -> Result<Pattern> {
    if pos == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "pattern needs a 1-based position and positive length (got {pos}, {n})"
        )));
    }
    let mut below = vec![0u16; n];
    for s in 0..n {
        for t in (s + 1)..n {
            match fp.compare_suffixes(pos + s, pos + t)? {
                Order::Less => below[t] += 1,
                Order::Greater => below[s] += 1,
            }
        }
    }
    Ok(Pattern(below.into_iter().map(|b| b + 1).collect()))
}

/// Two patterns are equivalent when they differ exactly in the relation of
/// their first and last elements.
pub fn equivalent(x: &Pattern, y: &Pattern) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let k = x.len();
    if k < 2 || x.relation(0, k - 1) == y.relation(0, k - 1) {
        return Ok(false);
    }
    for s in 0..k {
        for t in (s + 1)..k {
            if (s, t) != (0, k - 1) && x.relation(s, t) != y.relation(s, t) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An equivalent pattern exists iff `|x₁ − x_k| = 1`.
pub fn can_have_equivalent(x: &Pattern) -> bool {
    let k = x.len();
    k >= 2 && x.0[0].abs_diff(x.0[k - 1]) == 1
}

/// Patterns generated by a word, split into equivalent pairs and the rest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PatternSets {
    pub m_set: BTreeSet<Pattern>,
    pub n_pairs: BTreeSet<(Pattern, Pattern)>,
}

impl PatternSets {
    pub fn partition(patterns: &BTreeSet<Pattern>) -> Self {
        let mut out = PatternSets::default();
        let mut paired: HashSet<&Pattern> = HashSet::new();
        let all: Vec<&Pattern> = patterns.iter().collect();
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                if !paired.contains(x)
                    && !paired.contains(y)
                    && equivalent(x, y).expect("patterns of one word share a length")
                {
                    paired.insert(x);
                    paired.insert(y);
                    out.n_pairs.insert(((*x).clone(), (*y).clone()));
                }
            }
        }
        out.m_set = patterns
            .iter()
            .filter(|p| !paired.contains(p))
            .cloned()
            .collect();
        out
    }

    /// `m_u`, the number of unpaired patterns.
    pub fn m(&self) -> usize {
        self.m_set.len()
    }

    /// `n_u`, the number of equivalent pairs.
    pub fn n(&self) -> usize {
        self.n_pairs.len()
    }

    /// `f(u)`, the number of distinct patterns generated.
    pub fn f(&self) -> usize {
        self.m() + 2 * self.n()
    }

    pub fn is_bad(&self) -> bool {
        !self.n_pairs.is_empty()
    }

    pub fn all(&self) -> BTreeSet<Pattern> {
        let mut out = self.m_set.clone();
        for (a, b) in &self.n_pairs {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }
}

/// Pattern overlap statistics of a special word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialStats {
    pub k: u64,
    pub t: u64,
    pub r: u64,
}

/// Every pattern of length `n`, grouped by the factor that generates it.
#[derive(Debug, Clone)]
pub struct PatternCensus {
    pub n: usize,
    /// Depth whose windows were scanned; the next depth agreed exactly.
    pub depth: u32,
    pub by_factor: BTreeMap<Word, BTreeSet<Pattern>>,
}

impl PatternCensus {
    pub fn distinct_patterns(&self) -> BTreeSet<&Pattern> {
        self.by_factor.values().flatten().collect()
    }
}

type RawCensus = HashMap<Vec<u8>, HashSet<Vec<u16>>>;

fn scan_windows(symbols: &[u8], rank: &[u32], n: usize, from: usize, to: usize, into: &mut RawCensus) {
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    let mut scratch = vec![0u16; n];
    for p in from..to {
        let window = &rank[p..p + n];
        idx.clear();
        idx.extend(0..n);
        idx.sort_unstable_by_key(|&i| window[i]);
        for (r, &i) in idx.iter().enumerate() {
            scratch[i] = (r + 1) as u16;
        }
        let slot = match into.get_mut(&symbols[p..p + n]) {
            Some(s) => s,
            None => into.entry(symbols[p..p + n].to_vec()).or_default(),
        };
        if !slot.contains(scratch.as_slice()) {
            slot.insert(scratch.clone());
        }
    }
}

fn freeze(raw: RawCensus) -> BTreeMap<Word, BTreeSet<Pattern>> {
    raw.into_iter()
        .map(|(w, ps)| {
            (
                Word::from_symbols(w),
                ps.into_iter().map(Pattern).collect(),
            )
        })
        .collect()
}

impl FixedPoint {
    /// Patterns of every window of length `n` in `φ^depth(0)`.
    pub fn pattern_census_at(&mut self, n: usize, depth: u32) -> Result<PatternCensus> {
        let end = self.block_len().pow(depth);
        if end < n {
            return Err(Error::InvalidArgument(format!(
                "depth {depth} is too shallow for length {n}"
            )));
        }
        self.suffix_order(end)?;
        let order = self.order.as_ref().expect("built above");
        let mut raw = RawCensus::new();
        scan_windows(self.prefix.symbols(), &order.rank, n, 0, end + 1 - n, &mut raw);
        Ok(PatternCensus {
            n,
            depth,
            by_factor: freeze(raw),
        })
    }

    /// Patterns of length `n` grouped by factor, stabilized across depths.
    ///
    /// Scanning starts at the depth that provably contains every factor and
    /// stops once one more depth adds no pattern to any factor.
    pub fn pattern_census(&mut self, n: usize) -> Result<Arc<PatternCensus>> {
        if n == 0 {
            return Err(Error::InvalidArgument("pattern length must be positive".into()));
        }
        if let Some(c) = self.pattern_cache.get(&n) {
            return Ok(c.clone());
        }
        let l = self.block_len();
        let mut depth = self.factor_census(n)?.depth;
        let mut raw = RawCensus::new();
        let mut scanned = 0usize;
        let mut previous: Option<(u32, usize)> = None;
        loop {
            let end = l.pow(depth);
            let cap = self.limits().max_prefix;
            self.suffix_order(end).map_err(|e| match e {
                Error::StabilizationCapExceeded { .. } | Error::LengthCapExceeded { .. } => {
                    Error::StabilizationCapExceeded {
                        what: format!("pattern set of length {n}"),
                        cap,
                    }
                }
                e => e,
            })?;
            let stop = end + 1 - n;
            let order = self.order.as_ref().expect("built above");
            scan_windows(self.prefix.symbols(), &order.rank, n, scanned, stop, &mut raw);
            scanned = stop;
            let total: usize = raw.values().map(HashSet::len).sum();
            if let Some((d, before)) = previous {
                if before == total {
                    let census = Arc::new(PatternCensus {
                        n,
                        depth: d,
                        by_factor: freeze(raw),
                    });
                    self.pattern_cache.insert(n, census.clone());
                    return Ok(census);
                }
            }
            previous = Some((depth, total));
            depth += 1;
        }
    }

    pub fn pattern_sets(&mut self, u: &[u8]) -> Result<Arc<PatternSets>> {
        pattern_sets(self, u)
    }
}

/// `M_u` and `N_u` for a factor `u`.
pub fn pattern_sets(fp: &mut FixedPoint, u: &[u8]) -> Result<Arc<PatternSets>> {
    if u.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    let word = Word::from(u);
    if let Some(s) = fp.sets_cache.get(&word) {
        return Ok(s.clone());
    }
    let census = fp.pattern_census(u.len())?;
    let patterns = census
        .by_factor
        .get(&word)
        .ok_or_else(|| Error::NotAFactor(word.to_string()))?;
    let sets = Arc::new(PatternSets::partition(patterns));
    fp.sets_cache.insert(word, sets.clone());
    Ok(sets)
}

/// Both `v0` and `v1` are factors.
pub fn is_special(fp: &mut FixedPoint, v: &[u8]) -> Result<bool> {
    let v = Word::from(v);
    let census = fp.factor_census(v.len() + 1)?;
    Ok(census.contains(v.extended(0).as_slice()) && census.contains(v.extended(1).as_slice()))
}

/// `k_v`, `t_v`, `r_v` for a special word.
///
/// With `c` the first symbol of `v`, only `vc` can generate equivalent
/// pairs; it plays the role of `v0` and `vc̄` that of `v1`.
pub fn special_stats(fp: &mut FixedPoint, v: &[u8]) -> Result<SpecialStats> {
    let word = Word::from(v);
    if v.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    if !is_special(fp, v)? {
        return Err(Error::NotSpecial(word.to_string()));
    }
    let c = v[0];
    let same = pattern_sets(fp, word.extended(c).as_slice())?;
    let other = pattern_sets(fp, word.extended(1 - c).as_slice())?;
    if other.is_bad() {
        return Err(Error::InvariantViolation(format!(
            "{} generates equivalent patterns",
            word.extended(1 - c)
        )));
    }
    let others = &other.m_set;
    let has_equivalent = |x: &Pattern| others.iter().any(|y| equivalent(x, y).unwrap_or(false));
    let k = same.m_set.intersection(others).count() as u64;
    let t = same.m_set.iter().filter(|x| has_equivalent(x)).count() as u64;
    let r = same
        .n_pairs
        .iter()
        .filter(|(x, y)| (others.contains(x) && has_equivalent(y)) || (others.contains(y) && has_equivalent(x)))
        .count() as u64;
    Ok(SpecialStats { k, t, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn tm() -> FixedPoint {
        FixedPoint::new(Morphism::thue_morse())
    }

    #[test]
    fn patterns_parse_and_print() {
        assert_eq!(p("132").to_string(), "1 3 2");
        assert_eq!(p("1 3 2"), p("132"));
        assert_eq!(p("10 1 2 3 4 5 6 7 8 9").len(), 10);
        assert!("122".parse::<Pattern>().is_err());
        assert!("0 1".parse::<Pattern>().is_err());
    }

    #[test]
    fn thue_morse_patterns_at_known_positions() {
        let mut fp = tm();
        assert_eq!(extract_pattern(&mut fp, 4, 3).unwrap(), p("231"));
        assert_eq!(extract_pattern(&mut fp, 11, 3).unwrap(), p("132"));
        // ω₁ω₂ = 01
        assert_eq!(extract_pattern(&mut fp, 1, 2).unwrap(), p("12"));
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&p("132"), &p("231")).unwrap());
        assert!(!equivalent(&p("1324"), &p("3421")).unwrap());
        assert!(equivalent(&p("12"), &p("21")).unwrap());
        assert!(!equivalent(&p("12"), &p("12")).unwrap());
        assert!(matches!(
            equivalent(&p("12"), &p("123")),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn equivalence_criterion_examples() {
        assert!(can_have_equivalent(&p("132")));
        assert!(!can_have_equivalent(&p("1324")));
        assert!(can_have_equivalent(&p("12")));
        assert_eq!(p("132").flip_extremes(), Some(p("231")));
        assert_eq!(p("1324").flip_extremes(), None);
    }

    #[test]
    fn thue_morse_pattern_sets() {
        let mut fp = tm();
        let s = fp.pattern_sets(&[0, 1, 0]).unwrap();
        assert_eq!((s.m(), s.n(), s.f()), (0, 1, 2));
        assert_eq!(s.n_pairs.iter().next().unwrap(), &(p("132"), p("231")));
        let s = fp.pattern_sets(&[0, 1, 1]).unwrap();
        assert_eq!((s.m(), s.n(), s.f()), (1, 0, 1));
        assert!(s.m_set.contains(&p("132")));
        let s = fp.pattern_sets(&[0, 0]).unwrap();
        assert_eq!((s.m(), s.n()), (1, 0));
        assert!(matches!(
            fp.pattern_sets(&[0, 0, 0]),
            Err(Error::NotAFactor(_))
        ));
    }

    #[test]
    fn special_words_of_thue_morse() {
        let mut fp = tm();
        assert!(is_special(&mut fp, &[0, 1]).unwrap());
        assert!(!is_special(&mut fp, &[0, 0]).unwrap());
        // 01100 and 01101 are both length-5 factors
        let five = fp.factors(5).unwrap();
        let expected = five.contains(&"01100".parse().unwrap()) && five.contains(&"01101".parse().unwrap());
        assert_eq!(is_special(&mut fp, &[0, 1, 1, 0]).unwrap(), expected);
    }

    #[test]
    fn special_statistics_of_thue_morse() {
        let mut fp = tm();
        let stats = |fp: &mut FixedPoint, s: &str| {
            let w: Word = s.parse().unwrap();
            special_stats(fp, w.as_slice()).unwrap()
        };
        assert_eq!(stats(&mut fp, "01"), SpecialStats { k: 0, t: 0, r: 1 });
        assert_eq!(stats(&mut fp, "10"), SpecialStats { k: 0, t: 0, r: 1 });
        assert_eq!(stats(&mut fp, "010"), SpecialStats::default());
        assert_eq!(stats(&mut fp, "101"), SpecialStats::default());
        assert!(matches!(
            special_stats(&mut fp, &[0, 0]),
            Err(Error::NotSpecial(_))
        ));
    }

    #[test]
    fn census_matches_pairwise_extraction() {
        let mut fp = tm();
        let census = fp.pattern_census(5).unwrap();
        let prefix = fp.prefix_of_len(300).unwrap().symbols().to_vec();
        for pos in 1..=200 {
            let direct = extract_pattern(&mut fp, pos, 5).unwrap();
            let w = Word::from(&prefix[pos - 1..pos + 4]);
            assert!(census.by_factor[&w].contains(&direct), "position {pos}");
        }
    }
}
