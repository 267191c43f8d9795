use num_complex::Complex64;
use perminv::sim::{RegisterLayout, StateVector};
use proptest::prelude::*;

fn random_state(layout: &RegisterLayout, raw: &[(f64, f64)], sparsity: &[bool]) -> StateVector {
    let mut amps: Vec<Complex64> = raw
        .iter()
        .zip(sparsity)
        .map(|(&(re, im), &keep)| if keep { Complex64::new(re, im) } else { Complex64::new(0.0, 0.0) })
        .collect();
    if amps.iter().all(|a| a.norm() == 0.0) {
        amps[0] = Complex64::new(1.0, 0.0);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(layout.clone(), amps).unwrap()
}

const W: usize = 3;

fn layout() -> RegisterLayout {
    RegisterLayout::packed(&[("x", W), ("z", W)]).unwrap()
}

fn state_strategy() -> impl Strategy<Value = StateVector> {
    let dim = 1usize << (2 * W);
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim),
        prop::collection::vec(prop::bool::weighted(0.3), dim),
    )
        .prop_map(|(raw, keep)| random_state(&layout(), &raw, &keep))
}

proptest! {
    #[test]
    fn xor_oracle_moves_amplitudes_like_the_dense_definition(
        s in state_strategy(),
        table in prop::collection::vec(0u64..(1 << W), 1 << W),
    ) {
        let l = layout();
        let mut got = s.clone();
        got.apply_xor_fn("x", "z", |x| table[x as usize]).unwrap();
        for x in 0..1u64 << W {
            for z in 0..1u64 << W {
                let before = s.amplitude(&[("x", x), ("z", z)]).unwrap();
                let after = got.amplitude(&[("x", x), ("z", z ^ table[x as usize])]).unwrap();
                prop_assert_eq!(before, after);
            }
        }
        prop_assert_eq!(got.layout(), &l);
    }

    #[test]
    fn xor_oracle_is_an_involution(
        s in state_strategy(),
        table in prop::collection::vec(0u64..(1 << W), 1 << W),
    ) {
        let mut t = s.clone();
        t.apply_xor_fn("x", "z", |x| table[x as usize]).unwrap();
        t.apply_xor_fn("x", "z", |x| table[x as usize]).unwrap();
        prop_assert_eq!(t, s);
    }

    #[test]
    fn multi_input_xor_matches_single_input(s in state_strategy(), k in 0u64..(1 << W)) {
        let mut a = s.clone();
        a.apply_xor_multi(&["x"], "z", |v| v[0] ^ k).unwrap();
        let mut b = s.clone();
        b.apply_xor_fn("x", "z", |x| x ^ k).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn swap_bits_and_not_are_involutions(s in state_strategy(), a in 0..W, b in 0..W) {
        let mut t = s.clone();
        t.apply_swap_bits("x", a, b).unwrap();
        t.apply_not("z").unwrap();
        t.apply_not("z").unwrap();
        t.apply_swap_bits("x", a, b).unwrap();
        prop_assert_eq!(t, s);
    }

    #[test]
    fn hadamard_twice_is_identity(s in state_strategy()) {
        let mut t = s.clone();
        t.apply_hadamard("x").unwrap();
        prop_assert!((t.norm() - 1.0).abs() < 1e-12);
        t.apply_hadamard("x").unwrap();
        prop_assert!(t.max_deviation(&s).unwrap() < 1e-12);
    }
}

#[test]
fn extend_and_discard_restore_the_state() {
    let mut s = StateVector::basis(layout(), &[("x", 5), ("z", 2)]).unwrap();
    let before = s.clone();
    s.extend("aux", 2).unwrap();
    s.apply_xor_fn("x", "aux", |x| x & 3).unwrap();
    assert!(s.discard_clean("aux").is_err());
    s.apply_xor_fn("x", "aux", |x| x & 3).unwrap();
    s.discard_clean("aux").unwrap();
    assert_eq!(s, before);
}
