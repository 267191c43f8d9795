use perminv::inverter::{grover_spi, FullTableInverter, InverterKind};
use perminv::oracle::Permutation;
use perminv::qrac::rank::{rank_injection, rank_subset, unrank_injection, unrank_subset};
use perminv::qrac::{case1_length, case2_length, Encoding, Payload, QracParams, QracScheme};
use proptest::prelude::*;

proptest! {
    #[test]
    fn subset_ranks_round_trip(n in 1u64..40, mask in any::<u64>()) {
        let subset: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let r = rank_subset(&subset, n).unwrap();
        prop_assert_eq!(unrank_subset(&r, n, subset.len() as u64).unwrap(), subset);
    }

    #[test]
    fn injection_ranks_round_trip(seed in any::<u64>(), n in 2usize..=5, len_raw in any::<u64>()) {
        let p = Permutation::from_seed(n, seed);
        let len = len_raw % (p.size() + 1);
        let values: Vec<u64> = p.table()[..len as usize].to_vec();
        let r = rank_injection(&values, p.size()).unwrap();
        prop_assert_eq!(unrank_injection(&r, p.size(), len).unwrap(), values);
    }
}

#[test]
fn full_table_encoding_decodes_every_image() {
    let inv = FullTableInverter { kind: InverterKind::Search };
    let params = QracParams::new(0.5, 0.5, 5, 1.0).unwrap();
    let scheme = QracScheme::new(&inv, &params).unwrap();
    for seed in 0..5 {
        let perm = Permutation::from_seed(3, 100 + seed);
        let enc = scheme.encode(&perm, seed).unwrap();
        let r_size = scheme.subset(3, seed).unwrap().len() as u64;
        let want = match &enc.payload {
            Payload::Table { .. } => case1_length(3),
            Payload::Good { good_count, .. } => case2_length(3, r_size, *good_count, 5, 24),
        };
        assert_eq!(enc.length_bits, want);
        assert_eq!(enc.to_bits(r_size).unwrap().len() as u64, want);
        let ctx = scheme.layout(3, seed, r_size).unwrap();
        let back = Encoding::from_bytes(&enc.to_bytes(r_size).unwrap(), &ctx).unwrap();
        assert_eq!(back.payload, enc.payload);
        let dec = scheme.decoder(&back, seed).unwrap();
        for y in 0..8 {
            assert_eq!(dec.decode(y, 7 * y).unwrap().candidate, perm.invert(y));
        }
    }
}

#[test]
fn grover_encodings_have_formula_length() {
    let inv = grover_spi(1);
    let params = QracParams::new(0.9, 0.5, 7, 0.78).unwrap();
    let scheme = QracScheme::new(&inv, &params).unwrap();
    for seed in 0..4 {
        let perm = Permutation::from_seed(3, seed);
        let enc = scheme.encode(&perm, seed).unwrap();
        let r_size = scheme.subset(3, seed).unwrap().len() as u64;
        let want = match &enc.payload {
            Payload::Table { .. } => case1_length(3),
            Payload::Good { good_count, .. } => case2_length(3, r_size, *good_count, 7, 0),
        };
        assert_eq!(enc.length_bits, want);
        let ctx = scheme.layout(3, seed, r_size).unwrap();
        assert_eq!(Encoding::from_bytes(&enc.to_bytes(r_size).unwrap(), &ctx).unwrap().payload, enc.payload);
    }
}

#[test]
fn case_one_length_is_ceil_log_factorial() {
    // 8! = 40320 needs 16 bits, plus the case flag
    assert_eq!(case1_length(3), 17);
    // 4! = 24 needs 5 bits
    assert_eq!(case1_length(2), 6);
}
