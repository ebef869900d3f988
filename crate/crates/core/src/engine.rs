//! Recurrences for the classified counts and the resulting `λ(n)`.

use std::collections::HashMap;

use crate::ancestry::{Kind, SeedTables};
use crate::count::Count;
use crate::error::{Error, Result};
use crate::word::Word;

/// One linear term `coefficient · count(kind, n)` of a recurrence.
type Term = (usize, Kind, usize);

/// Evaluates counts and `λ(n)` over seed tables, memoizing every value.
#[derive(Debug, Clone)]
pub struct Engine<C> {
    tables: SeedTables,
    memo: HashMap<(Word, Kind, usize), C>,
}

impl<C: Count> Engine<C> {
    pub fn new(tables: SeedTables) -> Self {
        Engine {
            tables,
            memo: HashMap::new(),
        }
    }

    pub fn tables(&self) -> &SeedTables {
        &self.tables
    }

    fn l(&self) -> usize {
        self.tables.block_len
    }

    fn lift(&self, x: u64, context: impl Fn() -> String) -> Result<C> {
        C::from_u64(x).ok_or_else(|| Error::ArithmeticOverflow { context: context() })
    }

    /// `n = l^s·|b|` for some `s ≥ 1`.
    fn is_anchor(&self, n: usize, b: &Word) -> bool {
        let mut x = b.len();
        while let Some(next) = x.checked_mul(self.l()) {
            x = next;
            if x == n {
                return true;
            }
            if x > n {
                break;
            }
        }
        false
    }

    /// The recurrence for `n > T` as a linear combination of smaller counts,
    /// or `Err(value)` when it is a constant (zero or an anchor).
    fn terms(&self, seed: &Word, kind: Kind, n: usize) -> std::result::Result<Vec<Term>, u64> {
        let l = self.l();
        let (x, r) = (n / l, n % l);
        let t = match kind {
            Kind::Bad if r == 1 => vec![(l, Kind::Bad, x + 1)],
            Kind::Bad => return Err(0),
            Kind::Narrow if r >= 1 => vec![
                (r - 1, Kind::Narrow, x + 2),
                (r - 1, Kind::Bad, x + 2),
                (l - r + 1, Kind::Narrow, x + 1),
            ],
            Kind::Narrow => vec![
                (l - 1, Kind::Narrow, x + 1),
                (l - 1, Kind::Bad, x + 1),
                (1, Kind::Narrow, x),
            ],
            Kind::Wide if r >= 2 => vec![
                (r - 1, Kind::Wide, x + 2),
                (l - r + 1, Kind::Wide, x + 1),
                (l - r + 1, Kind::Bad, x + 1),
            ],
            Kind::Wide if r == 1 => vec![(l, Kind::Wide, x + 1)],
            Kind::Wide => vec![
                (l - 1, Kind::Wide, x + 1),
                (1, Kind::Wide, x),
                (1, Kind::Bad, x),
            ],
            Kind::Any if r >= 1 => vec![(r - 1, Kind::Any, x + 2), (l - r + 1, Kind::Any, x + 1)],
            Kind::Any => vec![(l - 1, Kind::Any, x + 1), (1, Kind::Any, x)],
            Kind::Special if self.is_anchor(n, seed) => return Err(1),
            Kind::Special if r > 0 => vec![(1, Kind::Special, x + 1)],
            Kind::Special => vec![(1, Kind::Special, x)],
        };
        Ok(t.into_iter().filter(|(c, _, _)| *c > 0).collect())
    }

    fn check_seed(&self, seed: &Word, kind: Kind) -> Result<()> {
        if self.tables.is_seed(seed, kind) {
            Ok(())
        } else {
            Err(Error::UnknownSeed {
                seed: seed.to_string(),
                kind: kind.to_string(),
            })
        }
    }

    /// `C_a^bad`, `C_a^nar`, `C_a^wide`, `C_a` or `S_b` at `n`.
    ///
    /// Table values answer `n ≤ T`; above it the recurrences are unrolled
    /// with an explicit worklist.
    pub fn count(&mut self, seed: &Word, kind: Kind, n: usize) -> Result<C> {
        if n == 0 {
            return Err(Error::InvalidArgument("count length must be positive".into()));
        }
        self.check_seed(seed, kind)?;
        let mut stack = vec![(kind, n)];
        while let Some(&(k, m)) = stack.last() {
            let key = (seed.clone(), k, m);
            if self.memo.contains_key(&key) {
                stack.pop();
                continue;
            }
            let context = || format!("{k} count of {seed} at {m}");
            if m <= self.tables.base_threshold {
                let v = self.lift(self.tables.base_count(seed, k, m), context)?;
                self.memo.insert(key, v);
                stack.pop();
                continue;
            }
            let terms = match self.terms(seed, k, m) {
                Ok(t) => t,
                Err(constant) => {
                    let v = self.lift(constant, context)?;
                    self.memo.insert(key, v);
                    stack.pop();
                    continue;
                }
            };
            let missing: Vec<_> = terms
                .iter()
                .filter(|(_, k2, m2)| !self.memo.contains_key(&(seed.clone(), *k2, *m2)))
                .map(|&(_, k2, m2)| (k2, m2))
                .collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let mut total = C::zero();
            for (c, k2, m2) in terms {
                let coef = self.lift(c as u64, context)?;
                let part = coef
                    .checked_mul(&self.memo[&(seed.clone(), k2, m2)])
                    .ok_or_else(|| Error::ArithmeticOverflow { context: context() })?;
                total = total
                    .checked_add(&part)
                    .ok_or_else(|| Error::ArithmeticOverflow { context: context() })?;
            }
            self.memo.insert(key, total);
            stack.pop();
        }
        Ok(self.memo[&(seed.clone(), kind, n)].clone())
    }

    fn accumulate(total: &mut C, part: C, context: &str) -> Result<()> {
        *total = total.checked_add(&part).ok_or_else(|| Error::ArithmeticOverflow {
            context: context.to_string(),
        })?;
        Ok(())
    }

    fn times(&self, a: C, b: u64, context: &str) -> Result<C> {
        let b = self.lift(b, || context.to_string())?;
        a.checked_mul(&b).ok_or_else(|| Error::ArithmeticOverflow {
            context: context.to_string(),
        })
    }

    /// `Σ_{|u|=n} f(u)` from the classified counts.
    pub fn sum_f(&mut self, n: usize) -> Result<C> {
        check_length(n)?;
        let ctx = format!("sum_f({n})");
        let mut total = C::zero();
        let a1: Vec<_> = self.tables.a1.iter().map(|(w, s)| (w.clone(), *s)).collect();
        for (a, s) in a1 {
            let nar = self.count(&a, Kind::Narrow, n)?;
            let bad = self.count(&a, Kind::Bad, n)?;
            let wide = self.count(&a, Kind::Wide, n)?;
            let part = self.times(nar, s.m + s.n, &ctx)?;
            Self::accumulate(&mut total, part, &ctx)?;
            let mut bw = bad;
            Self::accumulate(&mut bw, wide, &ctx)?;
            let part = self.times(bw, s.m + 2 * s.n, &ctx)?;
            Self::accumulate(&mut total, part, &ctx)?;
        }
        let a2: Vec<_> = self.tables.a2.iter().map(|(w, m)| (w.clone(), *m)).collect();
        for (a, m) in a2 {
            let any = self.count(&a, Kind::Any, n)?;
            let part = self.times(any, m, &ctx)?;
            Self::accumulate(&mut total, part, &ctx)?;
        }
        Ok(total)
    }

    /// 0 exactly when `n = l^s·|b| + 1` for some `s ≥ 1`.
    pub fn delta(&self, n: usize, b: &Word) -> u8 {
        if n >= 1 && self.is_anchor(n - 1, b) {
            0
        } else {
            1
        }
    }

    /// `Σ_{v ∈ B(n−1)} g(v)` from the special counts and statistics.
    pub fn sum_g(&mut self, n: usize) -> Result<C> {
        check_length(n)?;
        let ctx = format!("sum_g({n})");
        let mut total = C::zero();
        let b: Vec<_> = self.tables.b.iter().map(|(w, s)| (w.clone(), *s)).collect();
        for (v, s) in b {
            let part = if self.delta(n, &v) == 1 {
                let count = self.count(&v, Kind::Special, n - 1)?;
                self.times(count, s.k + s.t + s.r, &ctx)?
            } else {
                self.lift(s.k + s.r, || ctx.clone())?
            };
            Self::accumulate(&mut total, part, &ctx)?;
        }
        Ok(total)
    }

    /// `Σf − Σg` at any `n ≥ 2`, ignoring the brute-force table for `λ`.
    pub fn lambda_by_sums(&mut self, n: usize) -> Result<C> {
        let f = self.sum_f(n)?;
        let g = self.sum_g(n)?;
        f.checked_sub(&g).ok_or_else(|| Error::NegativeResult {
            n: n as u64,
            sum_f: f.to_string(),
            sum_g: g.to_string(),
        })
    }

    /// `λ(n)`: brute force up to the base threshold, `Σf − Σg` above it.
    pub fn lambda(&mut self, n: usize) -> Result<C> {
        check_length(n)?;
        if n <= self.tables.base_threshold {
            let v = self.tables.base_lambda.get(&n).copied().ok_or_else(|| {
                Error::InvariantViolation(format!("no brute-force value for lambda({n})"))
            })?;
            return self.lift(v, || format!("lambda({n})"));
        }
        self.lambda_by_sums(n)
    }

    pub fn lambda_range(&mut self, lo: usize, hi: usize) -> Result<Vec<(usize, C)>> {
        if lo < 2 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "range {lo}..{hi} must satisfy 2 ≤ lo ≤ hi"
            )));
        }
        (lo..=hi).map(|n| Ok((n, self.lambda(n)?))).collect()
    }
}

fn check_length(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("length {n} is below 2")));
    }
    Ok(())
}
