use perminv::oracle::{
    decode_flagged, encode_flagged, make_two_sided, reject_element, Direction, OracleHandle,
    Permutation, QueryOracle,
};
use perminv::Error;
use proptest::prelude::*;

proptest! {
    #[test]
    fn permutation_inverse_round_trips(n in 1usize..=8, seed in any::<u64>()) {
        let p = Permutation::from_seed(n, seed);
        let mut seen = vec![false; p.size() as usize];
        for x in 0..p.size() {
            let y = p.apply(x);
            prop_assert!(!seen[y as usize]);
            seen[y as usize] = true;
            prop_assert_eq!(p.invert(y), x);
        }
    }

    #[test]
    fn flagged_encoding_round_trips(w in 0u64..1 << 20, b in 0u64..2) {
        prop_assert_eq!(decode_flagged(encode_flagged(w, b)), (w, b));
    }

    #[test]
    fn punctured_inverse_answers_everywhere_but_the_challenge(
        n in 1usize..=6,
        seed in any::<u64>(),
        y_raw in any::<u64>(),
    ) {
        let p = Permutation::from_seed(n, seed);
        let y = y_raw % p.size();
        let mut h = make_two_sided(p.clone(), y).unwrap();
        for w in 0..p.size() {
            prop_assert_eq!(h.forward_classical(w).unwrap(), p.apply(w));
            let unflagged = h.inverse_classical(encode_flagged(w, 0)).unwrap();
            if w == y {
                prop_assert_eq!(unflagged, reject_element(n));
            } else {
                prop_assert_eq!(unflagged, encode_flagged(p.invert(w), 0));
            }
            prop_assert_eq!(h.inverse_classical(encode_flagged(w, 1)).unwrap(), reject_element(n));
        }
        prop_assert_eq!(h.query_count(), 3 * p.size());
    }
}

#[test]
fn reject_element_is_all_ones() {
    assert_eq!(reject_element(3), 0b1111);
    assert_eq!(decode_flagged(reject_element(3)), (7, 1));
}

#[test]
fn unpunctured_inverse_answers_at_every_image() {
    let p = Permutation::from_seed(4, 9);
    let mut h = OracleHandle::unpunctured(p.clone());
    for w in 0..16 {
        assert_eq!(h.inverse_classical(encode_flagged(w, 0)).unwrap(), encode_flagged(p.invert(w), 0));
    }
}

#[test]
fn budget_is_enforced() {
    let mut h = make_two_sided(Permutation::from_seed(3, 1), 0).unwrap().with_budget(2);
    h.forward_classical(1).unwrap();
    h.inverse_classical(2).unwrap();
    match h.forward_classical(3) {
        Err(Error::BudgetExceeded { budget: 2, .. }) => {}
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn magnitude_probe_accumulates_classical_queries() {
    let mut h = make_two_sided(Permutation::from_seed(3, 4), 0).unwrap();
    let probe = h.add_probe(Direction::Forward, &[1, 2]).unwrap();
    for w in [1, 2, 3, 1] {
        h.forward_classical(w).unwrap();
    }
    assert_eq!(h.total_query_magnitude(probe).unwrap(), 3.0);
}
