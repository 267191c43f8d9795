use perminv::bounds::{
    averaging_subset, chernoff_lower_tail, chernoff_majority, random_swapping_instance,
    reverse_markov, swapping_check,
};
use perminv::rng::Coins;
use proptest::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};

proptest! {
    #[test]
    fn chernoff_lower_tail_dominates_the_exact_tail(n in 1u64..300, p in 0.05f64..0.95, delta in 0.01f64..0.99) {
        let b = Binomial::new(p, n).unwrap();
        let cut = (1.0 - delta) * n as f64 * p;
        // Pr[X < cut]
        let exact = if cut <= 0.0 { 0.0 } else { b.cdf(cut.ceil() as u64 - 1) };
        let bound = chernoff_lower_tail(n, p, delta).unwrap();
        prop_assert!(exact <= bound.bound_value + 1e-12);
        prop_assert!((0.0..=1.0).contains(&bound.bound_value));
    }

    #[test]
    fn chernoff_majority_dominates_the_exact_failure(n in 1u64..300, p in 0.51f64..0.99) {
        let exact = Binomial::new(p, n).unwrap().cdf(n / 2);
        prop_assert!(exact <= chernoff_majority(n, p).unwrap().bound_value + 1e-12);
    }

    #[test]
    fn reverse_markov_is_a_valid_lower_bound(seed in any::<u64>(), theta in 0.05f64..0.95) {
        let mut coins = Coins::from_seed(seed);
        let table: Vec<f64> = (0..64).map(|_| coins.unit()).collect();
        let mean = table.iter().sum::<f64>() / 64.0;
        let frac = table.iter().filter(|&&v| v >= theta).count() as f64 / 64.0;
        prop_assert!(frac >= reverse_markov(mean, theta).unwrap().bound_value - 1e-12);
        let sub = averaging_subset(&table, mean, theta).unwrap();
        prop_assert!(sub.iter().all(|&x| table[x as usize] >= theta * mean));
    }

    #[test]
    fn hybrid_bound_holds_on_random_instances(bits in 1usize..=3, queries in 1u64..=5, seed in any::<u64>()) {
        let (c, f, g) = random_swapping_instance(bits, queries, seed).unwrap();
        let r = swapping_check(&c, &f, &g, queries).unwrap();
        prop_assert!(r.holds_hybrid, "distance {} above {}", r.distance, r.hybrid_bound);
    }
}

#[test]
fn identical_functions_give_zero_distance() {
    let (c, f, _) = random_swapping_instance(2, 4, 11).unwrap();
    let r = swapping_check(&c, &f, &f, 4).unwrap();
    assert_eq!(r.distance, 0.0);
    assert_eq!(r.magnitude, 0.0);
    assert!(r.holds);
}

#[test]
fn majority_bound_needs_an_advantage() {
    assert!(chernoff_majority(10, 0.5).is_err());
    assert!(chernoff_lower_tail(10, 0.5, 1.5).is_err());
}
