mod common;

use common::*;
use polarscatter::bits::AuxMeter;
use polarscatter::construct::{CodeSpec, DesignChannel, ReliabilityOrder, make_code_spec};
use polarscatter::dense::kronecker_generator;
use polarscatter::encode::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn streaming_matches_gaussian_elimination_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, k) in [(3u32, 4usize), (4, 5), (5, 16), (6, 40), (7, 64), (8, 100)] {
        let spec = CodeSpec::bec(n, k).unwrap();
        let inv = gf2_inverse(&g_aa(&spec), k).expect("G_AA invertible");
        for _ in 0..20 {
            let info = random_bits(k, &mut rng);
            let cw = encode_systematic_streaming(&info, &spec).unwrap();
            assert_eq!(cw.bits(), systematic_via_dense(&info, &spec, &inv).as_slice(), "N=2^{n} K={k}");
            assert_eq!(cw.info(&spec), info);
        }
    }
}

#[test]
fn g_aa_is_an_involution_for_closed_sets() {
    for (n, k) in [(4u32, 7usize), (6, 30), (8, 128)] {
        let spec = CodeSpec::bec(n, k).unwrap();
        let m = g_aa(&spec);
        assert_eq!(gf2_inverse(&m, k).unwrap(), m);
    }
}

#[test]
fn non_closed_sets_are_rejected() {
    // {1, 2} is not closed: 3 dominates both but is frozen
    let order = ReliabilityOrder::from_permutation(vec![1, 2, 3, 0]).unwrap();
    let spec = make_code_spec(&order, 2).unwrap();
    assert!(!spec.is_domination_closed());
    assert!(encode_systematic_streaming(&[1, 0], &spec).is_err());
}

#[test]
fn generator_elements_match_kronecker() {
    for n in 0..=6u32 {
        let g = kronecker_generator(n).unwrap();
        for r in 0..1usize << n {
            for c in 0..1usize << n {
                assert_eq!(g_element(n, r, c).unwrap(), g.get(r, c));
            }
        }
    }
    assert!(g_element(3, 8, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_and_systematic(n in 3u32..=9, k_frac in 0.1f64..0.9, seed in any::<u64>()) {
        let k = (((1usize << n) as f64) * k_frac).ceil() as usize;
        let spec = CodeSpec::bec(n, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_bits(k, &mut rng);
        let b = random_bits(k, &mut rng);
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = encode_systematic_streaming(&a, &spec).unwrap();
        let cb = encode_systematic_streaming(&b, &spec).unwrap();
        let cs = encode_systematic_streaming(&sum, &spec).unwrap();
        let xor: Vec<u8> = ca.bits().iter().zip(cb.bits()).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(cs.bits(), xor.as_slice());
        prop_assert_eq!(ca.info(&spec), a);
    }

    #[test]
    fn codewords_satisfy_frozen_constraints(n in 2u32..=9, seed in any::<u64>(), eps in 0.2f64..0.9) {
        // re-encoding a codeword through the transform recovers u with zeros on the frozen set
        let k = (1usize << n) / 2;
        let spec = make_code_spec(&ReliabilityOrder::from_bec(DesignChannel::new(eps).unwrap(), n).unwrap(), k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cw = encode_systematic_streaming(&random_bits(k, &mut rng), &spec).unwrap();
        let mut u = cw.bits().to_vec();
        polarscatter::bits::polar_transform_in_place(&mut u);
        for &f in spec.frozen_set() {
            prop_assert_eq!(u[f], 0);
        }
    }

    #[test]
    fn working_memory_stays_within_two_k(n in 3u32..=10, k_frac in 0.05f64..0.95, seed in any::<u64>()) {
        let k = (((1usize << n) as f64) * k_frac).ceil() as usize;
        let spec = CodeSpec::bec(n, k).unwrap();
        let meter = AuxMeter::new();
        let info = random_bits(k, &mut ChaCha8Rng::seed_from_u64(seed));
        encode_systematic_streaming_metered(&info, &spec, &meter).unwrap();
        prop_assert!(meter.peak_bits() <= 2 * k + 128, "peak {} for K={}", meter.peak_bits(), k);
    }
}

#[test]
fn storage_model_is_monotone() {
    let ratios: Vec<f64> = (3..=12).map(|n| storage_report(n, 1 << (n - 1)).unwrap().ratio()).collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
    assert!(storage_report(2, 2).is_err());
}
