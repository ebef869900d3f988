use permc::ancestry::{ancestor_chain, interpret};
use permc::pattern::{can_have_equivalent, equivalent, extract_pattern};
use permc::word::Order;
use permc::{FixedPoint, Morphism, Pattern, Word};
use proptest::prelude::*;

fn morphisms() -> impl Strategy<Value = Morphism> {
    prop_oneof![
        Just(Morphism::thue_morse()),
        Just("011101/100010".parse().unwrap()),
        Just("0111/1000".parse().unwrap()),
    ]
}

fn permutation(max_len: usize) -> impl Strategy<Value = Pattern> {
    (2..=max_len)
        .prop_flat_map(|k| Just((1..=k as u16).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Pattern::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_round_trip(bits in prop::collection::vec(0u8..2, 0..40)) {
        let w = Word::from_symbols(bits);
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn patterns_round_trip(p in permutation(12)) {
        let back: Pattern = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn equivalence_is_symmetric_and_irreflexive(x in permutation(7), y in permutation(7)) {
        prop_assume!(x.len() == y.len());
        prop_assert_eq!(equivalent(&x, &y).unwrap(), equivalent(&y, &x).unwrap());
        prop_assert!(!equivalent(&x, &x).unwrap());
    }

    #[test]
    fn flipping_extremes_is_an_involution(x in permutation(10)) {
        match x.flip_extremes() {
            Some(y) => {
                prop_assert!(can_have_equivalent(&x));
                prop_assert!(equivalent(&x, &y).unwrap());
                prop_assert_eq!(y.flip_extremes(), Some(x));
            }
            None => prop_assert!(!can_have_equivalent(&x)),
        }
    }

    #[test]
    fn suffix_order_is_antisymmetric_and_transitive(
        m in morphisms(),
        i in 1usize..400,
        j in 1usize..400,
        k in 1usize..400,
    ) {
        prop_assume!(i != j && j != k && i != k);
        let mut fp = FixedPoint::new(m);
        let ij = fp.compare_suffixes(i, j).unwrap();
        prop_assert_eq!(fp.compare_suffixes(j, i).unwrap(), ij.reverse());
        let jk = fp.compare_suffixes(j, k).unwrap();
        if ij == jk {
            prop_assert_eq!(fp.compare_suffixes(i, k).unwrap(), ij);
        }
    }

    #[test]
    fn window_patterns_are_in_the_census(m in morphisms(), pos in 1usize..300, n in 2usize..12) {
        let mut fp = FixedPoint::new(m);
        let p = extract_pattern(&mut fp, pos, n).unwrap();
        let census = fp.pattern_census(n).unwrap();
        let factor = Word::from(&fp.prefix().symbols()[pos - 1..pos - 1 + n]);
        prop_assert!(census.by_factor[&factor].contains(&p));
    }

    #[test]
    fn interpretations_rebuild_the_word(m in morphisms(), pos in 1usize..500, extra in 0usize..20) {
        let mut fp = FixedPoint::new(m.clone());
        let n = fp.synchronization_length().unwrap() + extra;
        fp.prefix_of_len(pos + n).unwrap();
        let u = fp.prefix().symbols()[pos - 1..pos - 1 + n].to_vec();
        let s = interpret(&mut fp, &u).unwrap();
        let l = m.block_len();
        prop_assert!(s.left_cut < l && s.right_cut < l);
        let image = m.apply(s.ancestor.as_slice());
        prop_assert_eq!(&image.as_slice()[s.left_cut..image.len() - s.right_cut], &u[..]);
        let chain = ancestor_chain(&mut fp, &u).unwrap();
        for pair in chain.windows(2) {
            prop_assert!(pair[1].len() <= pair[0].len().div_ceil(l) + 1);
        }
    }
}

#[test]
fn equivalent_windows_of_thue_morse() {
    let mut fp = FixedPoint::new(Morphism::thue_morse());
    let a = extract_pattern(&mut fp, 4, 3).unwrap();
    let b = extract_pattern(&mut fp, 11, 3).unwrap();
    assert!(equivalent(&a, &b).unwrap());
    // 01001… against 01011…
    assert_eq!(fp.compare_suffixes(4, 11).unwrap(), Order::Less);
}
