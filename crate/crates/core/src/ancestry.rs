//! Interpretations, ancestor chains, word classes and the seed tables that
//! anchor the recurrences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::pattern::{is_special, special_stats, SpecialStats};
use crate::word::{FixedPoint, Word};

/// `⟨v, i, j⟩`: `u` is `φ(v)` with `i` symbols cut on the left and `j` on the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interpretation {
    pub ancestor: Word,
    pub left_cut: usize,
    pub right_cut: usize,
}

fn interpretation_at(fp: &FixedPoint, pos: usize, n: usize) -> Interpretation {
    let l = fp.block_len();
    let q = pos - 1;
    let i = q % l;
    let k = (i + n).div_ceil(l);
    let start = q / l;
    // ω = φ(ω), so block t of ω is the image of ω_t.
    let ancestor = Word::from(&fp.prefix().symbols()[start..start + k]);
    Interpretation {
        ancestor,
        left_cut: i,
        right_cut: k * l - i - n,
    }
}

/// The unique interpretation of a factor of length at least `L_ω`.
pub fn interpret(fp: &mut FixedPoint, u: &[u8]) -> Result<Interpretation> {
    let sync_length = fp.synchronization_length()?;
    if u.len() < sync_length {
        return Err(Error::TooShort {
            len: u.len(),
            sync_length,
        });
    }
    let census = fp.factor_census(u.len())?;
    let site = census
        .sites
        .get(&Word::from(u))
        .ok_or_else(|| Error::NotAFactor(Word::from(u).to_string()))?;
    let found = interpretation_at(fp, site.first, u.len());
    if let Some(second) = site.second {
        let other = interpretation_at(fp, second, u.len());
        if other != found {
            return Err(Error::InvariantViolation(format!(
                "{} has two interpretations: {found:?} and {other:?}",
                Word::from(u)
            )));
        }
    }
    let image = fp.morphism().apply(found.ancestor.as_slice());
    let image = image.as_slice();
    if &image[found.left_cut..image.len() - found.right_cut] != u {
        return Err(Error::InvariantViolation(format!(
            "interpretation {found:?} does not reproduce {}",
            Word::from(u)
        )));
    }
    Ok(found)
}

/// `[u, u₁, …, u_m]` where `u_m` is the first element shorter than `L_ω`.
pub fn ancestor_chain(fp: &mut FixedPoint, u: &[u8]) -> Result<Vec<Word>> {
    let sync_length = fp.synchronization_length()?;
    if u.len() < sync_length {
        return Err(Error::TooShort {
            len: u.len(),
            sync_length,
        });
    }
    let mut chain = vec![Word::from(u)];
    while chain.last().expect("non-empty").len() >= sync_length {
        let next = interpret(fp, chain.last().expect("non-empty").as_slice())?.ancestor;
        chain.push(next);
    }
    Ok(chain)
}

/// The chain terminal of any factor: itself below `L_ω`, else the last
/// element of its ancestor chain.
pub fn terminal(fp: &mut FixedPoint, u: &[u8]) -> Result<Word> {
    if u.len() < fp.synchronization_length()? {
        if !fp.is_factor(u)? {
            return Err(Error::NotAFactor(Word::from(u).to_string()));
        }
        return Ok(Word::from(u));
    }
    Ok(ancestor_chain(fp, u)?.pop().expect("non-empty chain"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Bad,
    Narrow,
    Wide,
    Neutral,
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordClass::Bad => "bad",
            WordClass::Narrow => "narrow",
            WordClass::Wide => "wide",
            WordClass::Neutral => "neutral",
        })
    }
}

/// Bad, narrow, wide or neutral, per the first bad word of the chain.
pub fn classify(fp: &mut FixedPoint, u: &[u8]) -> Result<WordClass> {
    if fp.pattern_sets(u)?.is_bad() {
        return Ok(WordClass::Bad);
    }
    if u.len() < fp.synchronization_length()? {
        return Ok(WordClass::Neutral);
    }
    let chain = ancestor_chain(fp, u)?;
    let l = fp.block_len();
    for k in 1..chain.len() {
        if fp.pattern_sets(chain[k].as_slice())?.is_bad() {
            let child = &chain[k - 1];
            let s = interpret(fp, child.as_slice())?;
            return match (s.left_cut + 1).cmp(&(l - s.right_cut)) {
                std::cmp::Ordering::Greater => Ok(WordClass::Narrow),
                std::cmp::Ordering::Less => Ok(WordClass::Wide),
                std::cmp::Ordering::Equal => Err(Error::DegenerateBoundary {
                    word: child.to_string(),
                }),
            };
        }
    }
    Ok(WordClass::Neutral)
}

/// Which count a query asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Bad,
    Narrow,
    Wide,
    Any,
    Special,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Bad, Kind::Narrow, Kind::Wide, Kind::Any, Kind::Special];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Bad => "bad",
            Kind::Narrow => "narrow",
            Kind::Wide => "wide",
            Kind::Any => "any",
            Kind::Special => "special",
        }
    }

    /// The class-restricted kind a word of this class contributes to.
    pub fn of_class(c: WordClass) -> Option<Kind> {
        match c {
            WordClass::Bad => Some(Kind::Bad),
            WordClass::Narrow => Some(Kind::Narrow),
            WordClass::Wide => Some(Kind::Wide),
            WordClass::Neutral => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown count kind {s:?}")))
    }
}

/// `(m_a, n_a)` of a bad seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSeed {
    pub m: u64,
    pub n: u64,
}

/// Everything the recurrence engine needs about one fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedTables {
    pub block_len: usize,
    pub sync_length: usize,
    pub base_threshold: usize,
    pub a1: BTreeMap<Word, BadSeed>,
    pub a2: BTreeMap<Word, u64>,
    pub b: BTreeMap<Word, SpecialStats>,
    /// Brute-force counts for `n ≤ base_threshold`; absent keys are zero.
    pub base_counts: BTreeMap<(Word, Kind, usize), u64>,
    /// Brute-force `λ(n)` for `2 ≤ n ≤ base_threshold`.
    pub base_lambda: BTreeMap<usize, u64>,
}

impl SeedTables {
    pub fn base_count(&self, seed: &Word, kind: Kind, n: usize) -> u64 {
        self.base_counts
            .get(&(seed.clone(), kind, n))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_seed(&self, seed: &Word, kind: Kind) -> bool {
        match kind {
            Kind::Bad | Kind::Narrow | Kind::Wide | Kind::Any => {
                self.a1.contains_key(seed) || self.a2.contains_key(seed)
            }
            Kind::Special => self.b.contains_key(seed),
        }
    }

    /// Canonical JSON with sorted keys at every level.
    pub fn to_json(&self) -> Value {
        let a1: Map<String, Value> = self
            .a1
            .iter()
            .map(|(w, s)| (w.to_string(), json!({"m": s.m, "n": s.n})))
            .collect();
        let a2: Map<String, Value> = self
            .a2
            .iter()
            .map(|(w, m)| (w.to_string(), json!(m)))
            .collect();
        let b: Map<String, Value> = self
            .b
            .iter()
            .map(|(w, s)| (w.to_string(), json!({"k": s.k, "t": s.t, "r": s.r})))
            .collect();
        let base_counts: Map<String, Value> = self
            .base_counts
            .iter()
            .map(|((w, k, n), c)| (format!("{w}|{k}|{n}"), json!(c)))
            .collect();
        let base_lambda: Map<String, Value> = self
            .base_lambda
            .iter()
            .map(|(n, c)| (n.to_string(), json!(c)))
            .collect();
        json!({
            "block_len": self.block_len,
            "sync_length": self.sync_length,
            "base_threshold": self.base_threshold,
            "a1": a1,
            "a2": a2,
            "b": b,
            "base_counts": base_counts,
            "base_lambda": base_lambda,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::MalformedSpec(format!("seed table JSON: {what}"));
        let obj = |key: &str| v.get(key).and_then(Value::as_object).ok_or_else(|| bad(key));
        let uint = |x: &Value, what: &str| x.as_u64().ok_or_else(|| bad(what));
        let word = |s: &str| s.parse::<Word>();
        let field = |x: &Value, key: &str| x.get(key).ok_or_else(|| bad(key)).and_then(|y| uint(y, key));

        let mut a1 = BTreeMap::new();
        for (w, s) in obj("a1")? {
            a1.insert(word(w)?, BadSeed { m: field(s, "m")?, n: field(s, "n")? });
        }
        let mut a2 = BTreeMap::new();
        for (w, m) in obj("a2")? {
            a2.insert(word(w)?, uint(m, "a2")?);
        }
        let mut b = BTreeMap::new();
        for (w, s) in obj("b")? {
            let stats = SpecialStats {
                k: field(s, "k")?,
                t: field(s, "t")?,
                r: field(s, "r")?,
            };
            b.insert(word(w)?, stats);
        }
        let mut base_counts = BTreeMap::new();
        for (key, c) in obj("base_counts")? {
            let mut parts = key.split('|');
            let (Some(w), Some(k), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad(key));
            };
            let n: usize = n.parse().map_err(|_| bad(key))?;
            base_counts.insert((word(w)?, k.parse()?, n), uint(c, key)?);
        }
        let mut base_lambda = BTreeMap::new();
        for (n, c) in obj("base_lambda")? {
            base_lambda.insert(n.parse().map_err(|_| bad(n))?, uint(c, n)?);
        }
        let size = |key: &str| {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(key))
        };
        Ok(SeedTables {
            block_len: size("block_len")?,
            sync_length: size("sync_length")?,
            base_threshold: size("base_threshold")?,
            a1,
            a2,
            b,
            base_counts,
            base_lambda,
        })
    }
}

/// Terminal and class of every factor of one length, by direct enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedFactor {
    pub word: Word,
    pub terminal: Word,
    pub class: WordClass,
}

pub fn classify_all(fp: &mut FixedPoint, n: usize) -> Result<Vec<ClassifiedFactor>> {
    let words: Vec<Word> = fp.factors(n)?.into_iter().collect();
    words
        .into_iter()
        .map(|w| {
            Ok(ClassifiedFactor {
                terminal: terminal(fp, w.as_slice())?,
                class: classify(fp, w.as_slice())?,
                word: w,
            })
        })
        .collect()
}

/// Default `T = l·(L_ω + 2)`, or the configured override.
pub fn base_threshold(fp: &mut FixedPoint) -> Result<usize> {
    let sync_length = fp.synchronization_length()?;
    Ok(fp
        .limits()
        .base_threshold_override
        .unwrap_or(fp.block_len() * (sync_length + 2)))
}

/// Enumerates every factor up to the base threshold and tabulates seeds,
/// their statistics, and the brute-force base counts.
pub fn build_seed_tables(fp: &mut FixedPoint) -> Result<SeedTables> {
    let sync_length = fp.synchronization_length()?;
    let t = base_threshold(fp)?;
    if t < sync_length {
        return Err(Error::InvalidArgument(format!(
            "base threshold {t} is below the synchronization length {sync_length}"
        )));
    }
    let mut seeds: BTreeSet<Word> = BTreeSet::new();
    let mut special_seeds: BTreeSet<Word> = BTreeSet::new();
    let mut counts: HashMap<(Word, Kind, usize), u64> = HashMap::new();
    let mut base_lambda = BTreeMap::new();
    for n in 1..=t {
        for cf in classify_all(fp, n)? {
            if n >= sync_length {
                seeds.insert(cf.terminal.clone());
            }
            *counts.entry((cf.terminal.clone(), Kind::Any, n)).or_default() += 1;
            if let Some(kind) = Kind::of_class(cf.class) {
                *counts.entry((cf.terminal.clone(), kind, n)).or_default() += 1;
            }
            if is_special(fp, cf.word.as_slice())? {
                if n >= sync_length {
                    special_seeds.insert(cf.terminal.clone());
                }
                *counts.entry((cf.terminal, Kind::Special, n)).or_default() += 1;
            }
        }
        if n >= 2 {
            let census = fp.pattern_census(n)?;
            base_lambda.insert(n, census.distinct_patterns().len() as u64);
        }
    }
    let mut a1 = BTreeMap::new();
    let mut a2 = BTreeMap::new();
    for a in seeds {
        let sets = fp.pattern_sets(a.as_slice())?;
        if sets.is_bad() {
            a1.insert(a, BadSeed { m: sets.m() as u64, n: sets.n() as u64 });
        } else {
            a2.insert(a, sets.m() as u64);
        }
    }
    let mut b = BTreeMap::new();
    for v in special_seeds {
        let stats = special_stats(fp, v.as_slice())?;
        b.insert(v, stats);
    }
    Ok(SeedTables {
        block_len: fp.block_len(),
        sync_length,
        base_threshold: t,
        a1,
        a2,
        b,
        base_counts: counts.into_iter().filter(|(_, c)| *c > 0).collect(),
        base_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;

    fn tm() -> FixedPoint {
        FixedPoint::new(Morphism::thue_morse())
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn words(list: &[&str]) -> Vec<Word> {
        list.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn interpretations_of_thue_morse_factors() {
        let mut fp = tm();
        let s = interpret(&mut fp, &[0, 1, 1, 0]).unwrap();
        assert_eq!((s.ancestor, s.left_cut, s.right_cut), (w("01"), 0, 0));
        let s = interpret(&mut fp, w("011001").as_slice()).unwrap();
        assert_eq!((s.ancestor, s.left_cut, s.right_cut), (w("010"), 0, 0));
        // 1001 = φ(10); the odd phase would need 00 as a block
        let s = interpret(&mut fp, w("1001").as_slice()).unwrap();
        assert_eq!((s.ancestor, s.left_cut, s.right_cut), (w("10"), 0, 0));
        let s = interpret(&mut fp, w("00110").as_slice()).unwrap();
        assert_eq!((s.ancestor, s.left_cut, s.right_cut), (w("101"), 1, 0));
        assert_eq!(
            interpret(&mut fp, &[0, 1, 0]),
            Err(Error::TooShort { len: 3, sync_length: 4 })
        );
        assert_eq!(
            interpret(&mut fp, &[0, 0, 0, 0]),
            Err(Error::NotAFactor("0000".into()))
        );
    }

    #[test]
    fn chains_stop_below_sync_length() {
        let mut fp = tm();
        let chain = ancestor_chain(&mut fp, w("01101001").as_slice()).unwrap();
        assert_eq!(chain, words(&["01101001", "0110", "01"]));
        for u in fp.factors(5).unwrap() {
            let chain = ancestor_chain(&mut fp, u.as_slice()).unwrap();
            assert!(chain.len() >= 2);
            assert!(chain.last().unwrap().len() <= 3);
        }
    }

    #[test]
    fn thue_morse_classes() {
        let mut fp = tm();
        assert_eq!(classify(&mut fp, &[0, 1, 0]).unwrap(), WordClass::Bad);
        assert_eq!(classify(&mut fp, &[0, 1, 1]).unwrap(), WordClass::Neutral);
        // 0101 = φ(00) exactly; 00 is not bad, so no bad ancestor exists.
        let s = interpret(&mut fp, w("0101").as_slice()).unwrap();
        assert_eq!((s.ancestor, s.left_cut, s.right_cut), (w("00"), 0, 0));
        assert_eq!(classify(&mut fp, w("0101").as_slice()).unwrap(), WordClass::Neutral);
    }

    #[test]
    fn thue_morse_seed_tables() {
        let mut fp = tm();
        let t = build_seed_tables(&mut fp).unwrap();
        assert_eq!((t.sync_length, t.base_threshold, t.block_len), (4, 12, 2));
        let a1: Vec<Word> = t.a1.keys().cloned().collect();
        assert_eq!(a1, words(&["010", "101"]));
        assert!(t.a1.values().all(|s| *s == BadSeed { m: 0, n: 1 }));
        // 01001 is φ(110) = 101001 less its first symbol, so 110 is a seed
        assert_eq!(ancestor_chain(&mut fp, w("01001").as_slice()).unwrap(), words(&["01001", "110"]));
        let a2: Vec<Word> = t.a2.keys().cloned().collect();
        assert_eq!(a2, words(&["00", "001", "01", "011", "10", "100", "11", "110"]));
        assert!(t.a2.values().all(|&m| m == 1));
        let b: Vec<(String, (u64, u64, u64))> = t
            .b
            .iter()
            .map(|(w, s)| (w.to_string(), (s.k, s.t, s.r)))
            .collect();
        let want = [
            ("001", (1, 0, 0)),
            ("01", (0, 0, 1)),
            ("010", (0, 0, 0)),
            ("10", (0, 0, 1)),
            ("101", (0, 0, 0)),
            ("110", (1, 0, 0)),
        ];
        assert_eq!(b, want.map(|(w, s)| (w.to_string(), s)));
        // S_01 and S_001 alternate; their sum is one special word per length
        let s01: Vec<u64> = (4..=12).map(|n| t.base_count(&w("01"), Kind::Special, n)).collect();
        let s001: Vec<u64> = (4..=12).map(|n| t.base_count(&w("001"), Kind::Special, n)).collect();
        assert!(s01.iter().zip(&s001).all(|(a, b)| a + b == 1), "{s01:?} {s001:?}");
        assert_eq!(t.base_count(&w("010"), Kind::Bad, 5), 2);
    }
}
