//! Binary uniform marked morphisms and membership in the class Q.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Prefix, Word};

/// A uniform marked morphism on `{0, 1}` given by its two blocks.
///
/// Construction enforces `|φ(0)| = |φ(1)| = l ≥ 2`, distinct first symbols,
/// distinct last symbols, and `φ(0)` starting with `0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    blocks: [Word; 2],
}

impl Morphism {
    pub fn new(block0: Word, block1: Word) -> Result<Self> {
        if block0.len() != block1.len() {
            return Err(Error::MalformedSpec(format!(
                "blocks have different lengths ({} and {})",
                block0.len(),
                block1.len()
            )));
        }
        if block0.len() < 2 {
            return Err(Error::MalformedSpec(format!(
                "block length {} is below 2",
                block0.len()
            )));
        }
        if block0.first() == block1.first() {
            return Err(Error::NotMarked(format!(
                "both blocks start with {}",
                block0.as_slice()[0]
            )));
        }
        if block0.last() == block1.last() {
            return Err(Error::NotMarked(format!(
                "both blocks end with {}",
                block0.as_slice()[block0.len() - 1]
            )));
        }
        if block0.first() != Some(0) {
            return Err(Error::NoFixedPoint);
        }
        Ok(Morphism {
            blocks: [block0, block1],
        })
    }

    /// The Thue-Morse morphism `0 -> 01, 1 -> 10`.
    pub fn thue_morse() -> Self {
        "01/10".parse().expect("valid literal")
    }

    pub fn block_len(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn block(&self, symbol: u8) -> &Word {
        &self.blocks[usize::from(symbol != 0)]
    }

    pub fn apply(&self, w: &[u8]) -> Word {
        let mut out = Vec::with_capacity(w.len() * self.block_len());
        for &c in w {
            out.extend_from_slice(self.block(c).as_slice());
        }
        Word::from_symbols(out)
    }

    /// The prefix `φ^d(0)` with the smallest `d` such that `l^d ≥ min_len`.
    pub fn fixed_point_prefix(&self, min_len: usize, cap: usize) -> Result<Prefix> {
        Prefix::generate(self, min_len.max(1), cap)
    }

    pub fn classify_q(&self) -> QMembership {
        classify_q(self)
    }
}

pub fn parse_morphism(spec: &str) -> Result<Morphism> {
    spec.parse()
}

impl FromStr for Morphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::MalformedSpec(format!("expected <block0>/<block1>, got {s:?}")))?;
        Morphism::new(a.parse()?, b.parse()?)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.blocks[0], self.blocks[1])
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({self})")
    }
}

/// Which of the two shapes of class Q a morphism has, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum QMembership {
    /// `φ(0) = 0·1ⁿ·0·x·1`, `φ(1) = 1·0ᵐ·1·y·0`.
    FormA { n: usize, m: usize },
    /// `φ(0) = 0·1ⁿ`, `φ(1) = 1·0ⁿ` with `n = l − 1`.
    FormB { n: usize },
    NotInQ { reason: String },
}

impl QMembership {
    pub fn is_in_q(&self) -> bool {
        !matches!(self, QMembership::NotInQ { .. })
    }
}

impl fmt::Display for QMembership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QMembership::FormA { n, m } => write!(f, "FormA(n={n}, m={m})"),
            QMembership::FormB { n } => write!(f, "FormB(n={n})"),
            QMembership::NotInQ { reason } => write!(f, "NotInQ({reason})"),
        }
    }
}

fn run_from(w: &[u8], start: usize, symbol: u8) -> usize {
    w.iter().skip(start).take_while(|&&c| c == symbol).count()
}

fn count_factor(w: &[u8], pattern: &[u8]) -> usize {
    if pattern.is_empty() {
        return w.len() + 1;
    }
    w.windows(pattern.len()).filter(|x| *x == pattern).count()
}

/// Checks one block against `a·bᵏ·a·z·b` where `a` is its first symbol.
///
/// Returns the run length `k`.
fn form_a_block(block: &[u8], name: &str) -> std::result::Result<usize, String> {
    let head = block[0];
    let body = 1 - head;
    let k = run_from(block, 1, body);
    if k == 0 {
        return Err(format!("{name} does not start with {head}{body}"));
    }
    if block.len() < k + 3 || block[k + 1] != head {
        return Err(format!("{name} is not of the form {head}{body}^{k}{head}…{body}"));
    }
    if block[block.len() - 1] != body {
        return Err(format!("{name} does not end with {body}"));
    }
    let run = vec![body; k];
    let occurrences = count_factor(block, &run);
    if occurrences != 1 {
        return Err(format!("{body}^{k} occurs {occurrences} times in {name}"));
    }
    // 1^0 is the empty word, which every block ends with.
    if block.ends_with(&run[..k - 1]) {
        return Err(format!("{name} ends with {body}^{}", k - 1));
    }
    Ok(k)
}

pub fn classify_q(m: &Morphism) -> QMembership {
    let x = m.block(0).as_slice();
    let y = m.block(1).as_slice();
    let l = m.block_len();
    if x[1..].iter().all(|&c| c == 1) && y[1..].iter().all(|&c| c == 0) {
        return QMembership::FormB { n: l - 1 };
    }
    match (form_a_block(x, "φ(0)"), form_a_block(y, "φ(1)")) {
        (Ok(n), Ok(m)) => QMembership::FormA { n, m },
        (Err(reason), _) | (_, Err(reason)) => QMembership::NotInQ { reason },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Morphism {
        s.parse().unwrap()
    }

    #[test]
    fn parses_valid_specs() {
        assert_eq!(m("011101/100010").block_len(), 6);
        assert_eq!(m("01/10").block_len(), 2);
        assert_eq!(m(" 01/10\n").to_string(), "01/10");
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!("01/11".parse::<Morphism>(), Err(Error::NotMarked(_))));
        assert!(matches!("00/10".parse::<Morphism>(), Err(Error::NotMarked(_))));
        assert!(matches!("01/1".parse::<Morphism>(), Err(Error::MalformedSpec(_))));
        assert!(matches!("0/1".parse::<Morphism>(), Err(Error::MalformedSpec(_))));
        assert!(matches!("01/1x".parse::<Morphism>(), Err(Error::MalformedSpec(_))));
        assert!(matches!("0110".parse::<Morphism>(), Err(Error::MalformedSpec(_))));
        assert!(matches!("10/01".parse::<Morphism>(), Err(Error::NoFixedPoint)));
    }

    #[test]
    fn class_q_examples() {
        assert_eq!(m("011101/100010").classify_q(), QMembership::FormA { n: 3, m: 3 });
        assert!(!m("01011/10000").classify_q().is_in_q());
        assert_eq!(m("01/10").classify_q(), QMembership::FormB { n: 1 });
        assert_eq!(m("0111/1000").classify_q(), QMembership::FormB { n: 3 });
    }

    #[test]
    fn form_a_rejections_name_the_condition() {
        let QMembership::NotInQ { reason } = m("01100/10011").classify_q() else {
            panic!()
        };
        assert!(reason.contains("does not end with 1"), "{reason}");
        // trailing run of three 1s contains 1^3 a second time
        let QMembership::NotInQ { reason } = m("01110111/10001000").classify_q() else {
            panic!()
        };
        assert!(reason.contains("occurs 2 times"), "{reason}");
        // n = 2 can never satisfy the suffix condition since φ(0) ends with 1
        let QMembership::NotInQ { reason } = m("0110001/1001110").classify_q() else {
            panic!()
        };
        assert!(reason.contains("ends with 1^1"), "{reason}");
    }

    #[test]
    fn apply_concatenates_blocks() {
        let tm = Morphism::thue_morse();
        assert_eq!(tm.apply(&[0]).to_string(), "01");
        assert_eq!(tm.apply(&[0, 1, 1]).to_string(), "011010");
        assert_eq!(m("011101/100010").apply(&[0, 1]).to_string(), "011101100010");
    }
}
