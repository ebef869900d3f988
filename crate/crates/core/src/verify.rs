//! Invariant suite: each property is checked exhaustively over a window of
//! factor lengths and reports its first (shortest) counterexample.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use crate::ancestry::{
    ancestor_chain, build_seed_tables, classify, interpret, terminal, Kind, SeedTables, WordClass,
};
use crate::engine::Engine;
use crate::error::Result;
use crate::oracle::lambda_bruteforce;
use crate::pattern::{can_have_equivalent, equivalent, is_special, special_stats, Pattern};
use crate::word::{FixedPoint, Order, Word};

/// Positions `1..=ORDER_SPAN` are compared pairwise for the order laws.
pub const ORDER_SPAN: usize = 600;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub morphism: String,
    pub window: usize,
    pub outcomes: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

struct Check(PropertyOutcome);

impl Check {
    fn new(name: &'static str) -> Self {
        Check(PropertyOutcome {
            name,
            checked: 0,
            counterexample: None,
        })
    }

    fn check(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.0.checked += 1;
        if !ok && self.0.counterexample.is_none() {
            self.0.counterexample = Some(why());
        }
    }
}

/// Runs every property over factors of length at most `window`.
pub fn verify(fp: &mut FixedPoint, window: usize) -> Result<VerifyReport> {
    let tables = build_seed_tables(fp)?;
    let mut outcomes = vec![
        block_start_order(fp)?,
        phase_and_type_determine_order(fp)?,
        image_preserves_order(fp)?,
        equivalence_criterion(fp, window.min(8))?,
    ];
    outcomes.extend(word_laws(fp, &tables, window)?);
    outcomes.extend(special_laws(fp, &tables, window)?);
    outcomes.push(recurrence_overlap(&tables));
    outcomes.push(partition(fp, &tables)?);
    outcomes.extend(sums_identity(fp, &tables, window)?);
    Ok(VerifyReport {
        morphism: fp.morphism().to_string(),
        window,
        outcomes,
    })
}

fn block_start_order(fp: &mut FixedPoint) -> Result<PropertyOutcome> {
    let mut c = Check::new("block-start order");
    let l = fp.block_len();
    fp.prefix_of_len(ORDER_SPAN)?;
    let sym: Vec<u8> = fp.prefix().symbols()[..ORDER_SPAN].to_vec();
    for i in 1..=ORDER_SPAN {
        if (i - 1) % l != 0 {
            continue;
        }
        for j in 1..=ORDER_SPAN {
            if (j - 1) % l == 0 || sym[i - 1] != sym[j - 1] {
                continue;
            }
            let want = if sym[i - 1] == 0 { Order::Greater } else { Order::Less };
            let got = fp.compare_suffixes(i, j)?;
            c.check(got == want, || {
                format!("R({i}) vs R({j}) is {got:?}, block starts should be {want:?}")
            });
        }
    }
    Ok(c.0)
}

fn phase_and_type_determine_order(fp: &mut FixedPoint) -> Result<PropertyOutcome> {
    let mut c = Check::new("phase and block type determine order");
    let l = fp.block_len();
    fp.prefix_of_len(ORDER_SPAN)?;
    let sym: Vec<u8> = fp.prefix().symbols()[..ORDER_SPAN].to_vec();
    // block type of a 1-based position is the symbol it was generated from
    let ty = |p: usize| sym[(p - 1) / l];
    type Key = (usize, usize, u8, u8, u8);
    let mut seen: std::collections::HashMap<Key, (Order, usize, usize)> = Default::default();
    for i in 1..=ORDER_SPAN {
        for j in 1..=ORDER_SPAN {
            let (pi, pj) = ((i - 1) % l, (j - 1) % l);
            if i == j || sym[i - 1] != sym[j - 1] || (pi == pj && ty(i) == ty(j)) {
                continue;
            }
            let got = fp.compare_suffixes(i, j)?;
            let key = (pi, pj, ty(i), ty(j), sym[i - 1]);
            let first = *seen.entry(key).or_insert((got, i, j));
            c.check(first.0 == got, || {
                format!(
                    "R({i}) vs R({j}) is {got:?} but R({}) vs R({}) with the same phases and types is {:?}",
                    first.1, first.2, first.0
                )
            });
        }
    }
    Ok(c.0)
}

fn image_preserves_order(fp: &mut FixedPoint) -> Result<PropertyOutcome> {
    let mut c = Check::new("block images preserve order");
    let l = fp.block_len();
    fp.prefix_of_len(ORDER_SPAN * l)?;
    let sym: Vec<u8> = fp.prefix().symbols()[..ORDER_SPAN].to_vec();
    for i in 1..=ORDER_SPAN {
        for j in (i + 1)..=ORDER_SPAN {
            if sym[i - 1] != sym[j - 1] {
                continue;
            }
            let base = fp.compare_suffixes(i, j)?;
            for r in 1..=l {
                let (a, b) = ((i - 1) * l + r, (j - 1) * l + r);
                let got = fp.compare_suffixes(a, b)?;
                c.check(got == base, || {
                    format!("R({i}) vs R({j}) is {base:?} but R({a}) vs R({b}) is {got:?}")
                });
            }
        }
    }
    Ok(c.0)
}

fn permutations(k: usize) -> Vec<Vec<u16>> {
    fn rec(cur: &mut Vec<u16>, used: &mut [bool], out: &mut Vec<Vec<u16>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v as u16 + 1);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Compares the closed criterion against a search over all of `S_k`.
fn equivalence_criterion(fp: &mut FixedPoint, max_len: usize) -> Result<PropertyOutcome> {
    let mut c = Check::new("equivalence criterion");
    for k in 2..=max_len {
        let all: Vec<Pattern> = permutations(k)
            .into_iter()
            .map(|p| Pattern::new(p).expect("permutation"))
            .collect();
        let census = fp.pattern_census(k)?;
        let generated: BTreeSet<Pattern> = census.distinct_patterns().into_iter().cloned().collect();
        for x in generated {
            let found = all.iter().any(|y| equivalent(&x, y).expect("same length"));
            c.check(found == can_have_equivalent(&x), || {
                format!("{x}: search says {found}, criterion says {}", can_have_equivalent(&x))
            });
        }
    }
    Ok(c.0)
}

fn word_laws(fp: &mut FixedPoint, tables: &SeedTables, window: usize) -> Result<Vec<PropertyOutcome>> {
    let sync = tables.sync_length;
    let l = fp.block_len();
    let mut ancestor_f = Check::new("ancestor bounds f");
    let mut bad_parent = Check::new("bad words have bad ancestors");
    let mut mod_l = Check::new("bad length is 1 mod l");
    let mut first_bad = Check::new("narrow and wide f against first bad ancestor");
    let mut terminal_f = Check::new("f from chain terminal");
    for n in sync..=window {
        for u in fp.factors(n)? {
            let us = u.as_slice();
            let su = fp.pattern_sets(us)?;
            let chain = ancestor_chain(fp, us)?;
            let parent = fp.pattern_sets(chain[1].as_slice())?;
            ancestor_f.check(su.f() <= parent.f(), || {
                format!("f({u}) = {} exceeds f({}) = {}", su.f(), chain[1], parent.f())
            });
            if !parent.is_bad() {
                ancestor_f.check(!su.is_bad() && su.f() == parent.f(), || {
                    format!("{u} differs from its non-bad ancestor {}", chain[1])
                });
            }
            let class = classify(fp, us)?;
            if class == WordClass::Bad {
                bad_parent.check(
                    parent.is_bad()
                        && su.f() == parent.f()
                        && su.m() == parent.m()
                        && su.n() == parent.n(),
                    || format!("bad {u} with ancestor {} (m, n) = ({}, {})", chain[1], parent.m(), parent.n()),
                );
                mod_l.check(n % l == 1 % l, || format!("bad {u} has length {n}"));
            }
            if matches!(class, WordClass::Narrow | WordClass::Wide) {
                let mut first = None;
                for w in &chain[1..] {
                    let s = fp.pattern_sets(w.as_slice())?;
                    if s.is_bad() {
                        first = Some((w.clone(), s));
                        break;
                    }
                }
                let (w, s) = first.expect("narrow and wide words have a bad ancestor");
                let want = if class == WordClass::Narrow { s.m() + s.n() } else { s.m() + 2 * s.n() };
                first_bad.check(!su.is_bad() && su.f() == want, || {
                    format!("{class} {u}: f = {}, first bad ancestor {w} gives {want}", su.f())
                });
            }
            let a = chain.last().expect("non-empty");
            let want = match (tables.a1.get(a), tables.a2.get(a), class) {
                (Some(s), _, WordClass::Narrow) => s.m + s.n,
                (Some(s), _, WordClass::Bad | WordClass::Wide) => s.m + 2 * s.n,
                (None, Some(&m), WordClass::Neutral) => m,
                _ => {
                    terminal_f.check(false, || format!("{u} is {class} with terminal {a}"));
                    continue;
                }
            };
            terminal_f.check(su.f() as u64 == want, || {
                format!("{class} {u} has f = {} but terminal {a} gives {want}", su.f())
            });
        }
    }
    Ok(vec![ancestor_f.0, bad_parent.0, mod_l.0, first_bad.0, terminal_f.0])
}

fn special_laws(fp: &mut FixedPoint, tables: &SeedTables, window: usize) -> Result<Vec<PropertyOutcome>> {
    let sync = tables.sync_length;
    let l = fp.block_len();
    let mut closed = Check::new("special chains stay special");
    let mut right_cut = Check::new("special words end on a block boundary");
    let mut stats = Check::new("special statistics along chains");
    let mut g_values = Check::new("common patterns of special words");
    let mut anchor = Check::new("special count anchor");
    for n in sync..window {
        for v in fp.factors(n)? {
            let vs = v.as_slice();
            if !is_special(fp, vs)? {
                continue;
            }
            let s = interpret(fp, vs)?;
            right_cut.check(s.right_cut == 0, || format!("special {v} has {s:?}"));
            let parent = s.ancestor;
            let parent_special = is_special(fp, parent.as_slice())?;
            closed.check(parent_special, || format!("special {v} has non-special ancestor {parent}"));
            if !parent_special {
                continue;
            }
            let sv = special_stats(fp, vs)?;
            let sp = special_stats(fp, parent.as_slice())?;
            let (m, mp) = (v.len(), parent.len());
            if m < l * mp {
                stats.check(sv.k == sp.k + sp.t + sp.r && sv.t == 0 && sv.r == 0, || {
                    format!("{v} {sv:?} from shorter-than-image ancestor {parent} {sp:?}")
                });
            }
            if m == l * mp {
                stats.check(sv == sp, || format!("{v} {sv:?} from exact-image ancestor {parent} {sp:?}"));
            }
            if sp.t == 0 && sp.r == 0 {
                stats.check(sv.k == sp.k && sv.t == 0 && sv.r == 0, || {
                    format!("{v} {sv:?} from ancestor {parent} {sp:?} with t = r = 0")
                });
            }
            let b = terminal(fp, vs)?;
            let Some(bs) = tables.b.get(&b) else {
                g_values.check(false, || format!("special {v} has terminal {b} outside B"));
                continue;
            };
            let census = fp.pattern_census(n + 1)?;
            let g = census.by_factor[&v.extended(0)]
                .intersection(&census.by_factor[&v.extended(1)])
                .count() as u64;
            let mut exact = b.len();
            let mut hits_anchor = false;
            while exact < n {
                exact *= l;
                hits_anchor |= exact == n;
            }
            let want = if hits_anchor { bs.k + bs.r } else { bs.k + bs.t + bs.r };
            g_values.check(g == want, || {
                format!("g({v}) = {g}, terminal {b} {bs:?} predicts {want}")
            });
        }
    }
    for b in tables.b.keys() {
        let mut x = b.len() * l;
        while x <= tables.base_threshold {
            let got = tables.base_count(b, Kind::Special, x);
            if x >= sync {
                anchor.check(got == 1, || format!("{} special words of length {x} descend from {b}", got));
            }
            x *= l;
        }
    }
    Ok(vec![closed.0, right_cut.0, stats.0, g_values.0, anchor.0])
}

/// One recurrence step from table values, for `n` inside the table.
fn one_step(tables: &SeedTables, seed: &Word, kind: Kind, n: usize) -> u64 {
    let l = tables.block_len;
    let (x, r) = ((n / l) as u64, n % l);
    let g = |k: Kind, m: u64| if m == 0 { 0 } else { tables.base_count(seed, k, m as usize) };
    let (lu, ru) = (l as u64, r as u64);
    match (kind, r) {
        (Kind::Bad, 1) => lu * g(Kind::Bad, x + 1),
        (Kind::Bad, _) => 0,
        (Kind::Narrow, 0) => (lu - 1) * g(Kind::Narrow, x + 1) + (lu - 1) * g(Kind::Bad, x + 1) + g(Kind::Narrow, x),
        (Kind::Narrow, _) => {
            (ru - 1) * g(Kind::Narrow, x + 2) + (ru - 1) * g(Kind::Bad, x + 2) + (lu - ru + 1) * g(Kind::Narrow, x + 1)
        }
        (Kind::Wide, 0) => (lu - 1) * g(Kind::Wide, x + 1) + g(Kind::Wide, x) + g(Kind::Bad, x),
        (Kind::Wide, 1) => lu * g(Kind::Wide, x + 1),
        (Kind::Wide, _) => {
            (ru - 1) * g(Kind::Wide, x + 2) + (lu - ru + 1) * g(Kind::Wide, x + 1) + (lu - ru + 1) * g(Kind::Bad, x + 1)
        }
        (Kind::Any, 0) => (lu - 1) * g(Kind::Any, x + 1) + g(Kind::Any, x),
        (Kind::Any, _) => (ru - 1) * g(Kind::Any, x + 2) + (lu - ru + 1) * g(Kind::Any, x + 1),
        (Kind::Special, 0) => g(Kind::Special, x),
        (Kind::Special, _) => g(Kind::Special, x + 1),
    }
}

fn recurrence_overlap(tables: &SeedTables) -> PropertyOutcome {
    let mut c = Check::new("recurrences agree with enumeration");
    let word_seeds: Vec<&Word> = tables.a1.keys().chain(tables.a2.keys()).collect();
    for n in tables.sync_length..=tables.base_threshold {
        for &seed in &word_seeds {
            for kind in [Kind::Bad, Kind::Narrow, Kind::Wide, Kind::Any] {
                let (want, got) = (tables.base_count(seed, kind, n), one_step(tables, seed, kind, n));
                c.check(want == got, || {
                    format!("{kind} count of {seed} at {n}: enumerated {want}, recurrence {got}")
                });
            }
        }
        for seed in tables.b.keys() {
            let (want, got) = (
                tables.base_count(seed, Kind::Special, n),
                one_step(tables, seed, Kind::Special, n),
            );
            c.check(want == got, || {
                format!("special count of {seed} at {n}: enumerated {want}, recurrence {got}")
            });
        }
    }
    c.0
}

fn partition(fp: &mut FixedPoint, tables: &SeedTables) -> Result<PropertyOutcome> {
    let mut c = Check::new("every factor has one terminal and one class");
    for n in tables.sync_length..=tables.base_threshold {
        let total = fp.factors(n)?.len() as u64;
        let seeds: Vec<&Word> = tables.a1.keys().chain(tables.a2.keys()).collect();
        let any: u64 = seeds.iter().map(|s| tables.base_count(s, Kind::Any, n)).sum();
        c.check(any == total, || format!("{any} terminal counts for {total} factors of length {n}"));
        for s in tables.a1.keys() {
            let classed: u64 = [Kind::Bad, Kind::Narrow, Kind::Wide]
                .iter()
                .map(|&k| tables.base_count(s, k, n))
                .sum();
            let all = tables.base_count(s, Kind::Any, n);
            c.check(classed == all, || {
                format!("terminal {s} at {n}: {classed} classified of {all} descendants")
            });
        }
    }
    Ok(c.0)
}

fn sums_identity(fp: &mut FixedPoint, tables: &SeedTables, window: usize) -> Result<Vec<PropertyOutcome>> {
    let mut identity = Check::new("lambda equals sum f minus sum g");
    let mut monotone = Check::new("lambda is non-decreasing");
    let mut engine: Engine<u64> = Engine::new(tables.clone());
    let mut previous: Option<u64> = None;
    for n in 2..=window {
        let oracle = lambda_bruteforce(fp, n)?.lambda;
        if n >= tables.sync_length {
            let got = engine.lambda_by_sums(n);
            identity.check(got.as_ref().ok() == Some(&oracle), || {
                format!("lambda({n}): enumeration {oracle}, recurrences {got:?}")
            });
        }
        if let Some(p) = previous {
            monotone.check(oracle >= p, || format!("lambda({n}) = {oracle} < lambda({}) = {p}", n - 1));
        }
        previous = Some(oracle);
    }
    Ok(vec![identity.0, monotone.0])
}
