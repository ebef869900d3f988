//! Ground truth by direct enumeration of windows in a stabilized prefix.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::ancestry::{classify_all, Kind};
use crate::error::{Error, Result};
use crate::pattern::is_special;
use crate::word::{FixedPoint, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub lambda: u64,
    pub per_factor_f: BTreeMap<Word, u64>,
    /// Common patterns of `v0` and `v1` for each special `v` of length `n − 1`.
    pub per_special_g: BTreeMap<Word, u64>,
    pub stabilized_at_depth: u32,
    /// False for morphisms outside class Q, where the identities are unproven.
    pub assumptions_verified: bool,
}

impl OracleReport {
    pub fn sum_f(&self) -> u64 {
        self.per_factor_f.values().sum()
    }

    pub fn sum_g(&self) -> u64 {
        self.per_special_g.values().sum()
    }

    /// Canonical JSON with sorted keys.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Counts distinct patterns of length `n` directly.
///
/// Also checks `λ = Σf − Σg` on the enumerated data.
pub fn lambda_bruteforce(fp: &mut FixedPoint, n: usize) -> Result<OracleReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("length {n} is below 2")));
    }
    let census = fp.pattern_census(n)?;
    let lambda = census.distinct_patterns().len() as u64;
    let per_factor_f: BTreeMap<Word, u64> = census
        .by_factor
        .iter()
        .map(|(w, ps)| (w.clone(), ps.len() as u64))
        .collect();
    let mut per_special_g = BTreeMap::new();
    for v in fp.factors(n - 1)? {
        if !is_special(fp, v.as_slice())? {
            continue;
        }
        let p0 = &census.by_factor[&v.extended(0)];
        let p1 = &census.by_factor[&v.extended(1)];
        per_special_g.insert(v, p0.intersection(p1).count() as u64);
    }
    let report = OracleReport {
        n,
        lambda,
        per_factor_f,
        per_special_g,
        stabilized_at_depth: census.depth,
        assumptions_verified: fp.morphism().classify_q().is_in_q(),
    };
    if report.assumptions_verified && report.sum_f() < report.sum_g()
        || report.assumptions_verified && report.sum_f() - report.sum_g() != lambda
    {
        return Err(Error::InvariantViolation(format!(
            "lambda({n}) = {lambda} but the enumerated sums give {} - {}",
            report.sum_f(),
            report.sum_g()
        )));
    }
    Ok(report)
}

/// Number of factors of length `n` per chain terminal and kind, by direct
/// classification. `Any` counts every factor of a terminal.
pub fn classified_counts_bruteforce(
    fp: &mut FixedPoint,
    n: usize,
) -> Result<BTreeMap<(Word, Kind), u64>> {
    let mut out = BTreeMap::new();
    for cf in classify_all(fp, n)? {
        *out.entry((cf.terminal.clone(), Kind::Any)).or_default() += 1;
        if let Some(kind) = Kind::of_class(cf.class) {
            *out.entry((cf.terminal, kind)).or_default() += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn thue_morse_small_lambdas() {
        let mut fp = FixedPoint::new(Morphism::thue_morse());
        let expected = [2, 6, 8, 14, 16, 18, 20, 30, 32, 34, 36, 38, 40, 42, 44, 62, 64, 66];
        for (n, want) in (2..).zip(expected) {
            assert_eq!(lambda_bruteforce(&mut fp, n).unwrap().lambda, want, "n = {n}");
        }
    }

    #[test]
    fn report_shape() {
        let mut fp = FixedPoint::new(Morphism::thue_morse());
        let r = lambda_bruteforce(&mut fp, 6).unwrap();
        assert_eq!(r.lambda, 16);
        assert_eq!(r.per_factor_f.len(), fp.factors(6).unwrap().len());
        assert_eq!(r.sum_f() - r.sum_g(), 16);
        let json = r.to_json();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn thue_morse_classified_counts() {
        let mut fp = FixedPoint::new(Morphism::thue_morse());
        let c = classified_counts_bruteforce(&mut fp, 5).unwrap();
        assert_eq!(c[&(w("010"), Kind::Bad)], 2);
        let c = classified_counts_bruteforce(&mut fp, 10).unwrap();
        assert_eq!(c[&(w("010"), Kind::Wide)], 3);
        let c = classified_counts_bruteforce(&mut fp, 7).unwrap();
        assert_eq!(c.get(&(w("010"), Kind::Wide)), None);
    }

    #[test]
    fn form_a_small_lambdas() {
        let mut fp = FixedPoint::new("011101/100010".parse().unwrap());
        let expected = [2, 6, 16, 18, 20, 22, 24, 28, 32, 36, 40, 56, 62, 68, 74, 80, 86, 106];
        for (n, want) in (2..).zip(expected) {
            assert_eq!(lambda_bruteforce(&mut fp, n).unwrap().lambda, want, "n = {n}");
        }
    }

    #[test]
    fn deeper_prefixes_change_nothing() {
        let mut fp = FixedPoint::new("011101/100010".parse().unwrap());
        for n in [3, 7, 13] {
            let report = lambda_bruteforce(&mut fp, n).unwrap();
            let deeper = fp.pattern_census_at(n, report.stabilized_at_depth + 2).unwrap();
            assert_eq!(deeper.distinct_patterns().len() as u64, report.lambda, "n = {n}");
        }
    }
}
