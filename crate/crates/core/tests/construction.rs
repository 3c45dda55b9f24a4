use polarscatter::construct::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_is_a_permutation(eps in 0.01f64..0.99, n in 1u32..=10) {
        let order = ReliabilityOrder::from_bec(DesignChannel::new(eps).unwrap(), n).unwrap();
        let mut seen = vec![false; 1 << n];
        for &i in order.as_slice() {
            prop_assert!(!std::mem::replace(&mut seen[i], true));
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn capacity_mean_is_conserved(c in 0.0f64..=1.0, n in 1u32..=12) {
        let caps = capacity_evolve(c, n).unwrap();
        let mean = caps.iter().sum::<f64>() / caps.len() as f64;
        prop_assert!((mean - c).abs() < 1e-12);
        prop_assert!(caps.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn bhattacharyya_and_capacity_are_complements(eps in 0.0f64..=1.0, n in 1u32..=8) {
        let z = bhattacharyya_evolve(eps, n).unwrap();
        let c = capacity_evolve(1.0 - eps, n).unwrap();
        for (a, b) in z.iter().zip(&c) {
            prop_assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn info_sets_nest_and_are_domination_closed(eps in 0.05f64..0.95, n in 2u32..=9, k_frac in 0.05f64..0.95) {
        let order = ReliabilityOrder::from_bec(DesignChannel::new(eps).unwrap(), n).unwrap();
        let big = ((1usize << n) as f64 * k_frac).ceil() as usize;
        let small = (big / 2).max(1);
        let a = make_code_spec(&order, big).unwrap();
        let b = make_code_spec(&order, small).unwrap();
        prop_assert!(b.info_set().iter().all(|&i| a.is_info(i)));
        prop_assert!(a.is_domination_closed());
        prop_assert!(b.is_domination_closed());
        prop_assert_eq!(a.info_set().len() + a.frozen_set().len(), 1 << n);
    }

    #[test]
    fn more_reliable_under_plain_z(eps in 0.1f64..0.9, n in 1u32..=6) {
        // where the plain-domain values are far from the ends they decide the order
        let z = bhattacharyya_evolve(eps, n).unwrap();
        let order = ReliabilityOrder::from_bec(DesignChannel::new(eps).unwrap(), n).unwrap();
        for w in order.as_slice().windows(2) {
            prop_assert!(z[w[0]] <= z[w[1]] + 1e-12);
        }
    }
}

#[test]
fn n4_worked_example() {
    let z = bhattacharyya_evolve(0.5, 2).unwrap();
    assert_eq!(z, vec![0.9375, 0.5625, 0.4375, 0.0625]);
    let order = build_reliability_order(&z).unwrap();
    assert_eq!(order.as_slice(), &[3, 2, 1, 0]);
    assert_eq!(order.one_based(), vec![4, 3, 2, 1]);
}

#[test]
fn long_codes_keep_distinct_extremes() {
    // plain doubles collapse many tail values at N = 2^16; the log-domain order must still
    // put index N-1 first and index 0 last
    let order = ReliabilityOrder::from_bec(DesignChannel::default(), 16).unwrap();
    assert_eq!(order.as_slice()[0], (1 << 16) - 1);
    assert_eq!(*order.as_slice().last().unwrap(), 0);
    assert!(make_code_spec(&order, 1 << 15).unwrap().is_domination_closed());
}

#[test]
fn bad_inputs() {
    assert!(DesignChannel::new(1.5).is_err());
    assert!(bhattacharyya_evolve(-0.1, 3).is_err());
    assert!(bhattacharyya_evolve(0.5, MAX_LOG2 + 1).is_err());
    assert!(build_reliability_order(&[0.1, 0.2, 0.3]).is_err());
    assert!(build_reliability_order(&[0.1, f64::NAN]).is_err());
    let order = ReliabilityOrder::from_bec(DesignChannel::default(), 3).unwrap();
    assert!(make_code_spec(&order, 0).is_err());
    assert!(make_code_spec(&order, 9).is_err());
}
