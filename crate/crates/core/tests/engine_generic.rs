use num_bigint::BigUint;
use permc::ancestry::build_seed_tables;
use permc::oracle::lambda_bruteforce;
use permc::{Engine, Engine128, Engine64, Error, FixedPoint, Kind, Limits, Morphism, SeedTables};

fn tables(spec: &str) -> SeedTables {
    build_seed_tables(&mut FixedPoint::new(spec.parse().unwrap())).unwrap()
}

#[test]
fn count_types_agree() {
    let t = tables("01/10");
    let mut a = Engine64::new(t.clone());
    let mut b = Engine128::new(t.clone());
    let mut c: Engine<BigUint> = Engine::new(t);
    for n in [13, 100, 1000, 65_537, 1 << 20] {
        let x = a.lambda(n).unwrap();
        assert_eq!(u128::from(x), b.lambda(n).unwrap());
        assert_eq!(BigUint::from(x), c.lambda(n).unwrap());
    }
}

#[test]
fn huge_lengths_stay_exact() {
    let mut e: Engine<BigUint> = Engine::new(tables("01/10"));
    // n = 2^60 + 2^59: k = 60, b = 2^59
    let n = (1usize << 60) + (1 << 59);
    let want = BigUint::from(2u8) * (BigUint::from(1u8) << 61usize) + BigUint::from(1u64 << 60) - 4u8;
    assert_eq!(e.lambda(n).unwrap(), want);
}

#[test]
fn small_count_types_report_overflow() {
    let mut e: Engine<u8> = Engine::new(tables("01/10"));
    let err = e.lambda(5000).unwrap_err();
    assert!(matches!(err, Error::ArithmeticOverflow { .. }), "{err}");
}

#[test]
fn form_a_beyond_the_base_threshold() {
    let mut fp = FixedPoint::new("011101/100010".parse().unwrap());
    let mut e = Engine64::new(build_seed_tables(&mut fp).unwrap());
    assert_eq!(e.tables().base_threshold, 42);
    for n in 43..=60 {
        assert_eq!(e.lambda(n).unwrap(), lambda_bruteforce(&mut fp, n).unwrap().lambda, "n = {n}");
    }
    assert_eq!(e.lambda(12).unwrap(), 40);
}

#[test]
fn partition_of_counts_in_overlap_window() {
    let t = tables("011101/100010");
    let mut e = Engine64::new(t.clone());
    let seeds: Vec<_> = t.a1.keys().chain(t.a2.keys()).cloned().collect();
    let mut fp = FixedPoint::new("011101/100010".parse().unwrap());
    for n in t.sync_length..=t.base_threshold {
        let any: u64 = seeds.iter().map(|s| e.count(s, Kind::Any, n).unwrap()).sum();
        assert_eq!(any, fp.factors(n).unwrap().len() as u64, "n = {n}");
    }
}

#[test]
fn tables_round_trip_through_json() {
    let t = tables("011101/100010");
    let json = t.to_json();
    let back = SeedTables::from_json(&json).unwrap();
    assert_eq!(back, t);
    let text = serde_json::to_string(&json).unwrap();
    assert_eq!(text, serde_json::to_string(&back.to_json()).unwrap());
    assert!(text.starts_with("{\"a1\":"));
}

#[test]
fn unknown_seeds_and_short_lengths() {
    let mut e = Engine64::new(tables("01/10"));
    assert!(matches!(
        e.count(&"111".parse().unwrap(), Kind::Any, 50),
        Err(Error::UnknownSeed { .. })
    ));
    assert!(e.count(&"001".parse().unwrap(), Kind::Special, 50).is_ok());
    assert!(matches!(e.lambda(1), Err(Error::InvalidArgument(_))));
    assert!(matches!(e.lambda_range(9, 6), Err(Error::InvalidArgument(_))));
}

#[test]
fn base_threshold_override_moves_the_switch_point() {
    let limits = Limits {
        base_threshold_override: Some(20),
        ..Limits::default()
    };
    let mut fp = FixedPoint::with_limits(Morphism::thue_morse(), limits);
    let t = build_seed_tables(&mut fp).unwrap();
    assert_eq!(t.base_threshold, 20);
    let mut wide = Engine64::new(t);
    let mut narrow = Engine64::new(tables("01/10"));
    for n in 2..200 {
        assert_eq!(wide.lambda(n).unwrap(), narrow.lambda(n).unwrap(), "n = {n}");
    }
}

#[test]
fn prefix_cap_is_enforced() {
    let limits = Limits {
        max_prefix: 64,
        ..Limits::default()
    };
    let mut fp = FixedPoint::with_limits(Morphism::thue_morse(), limits);
    let err = lambda_bruteforce(&mut fp, 40).unwrap_err();
    assert!(matches!(err, Error::StabilizationCapExceeded { .. }), "{err}");
}
