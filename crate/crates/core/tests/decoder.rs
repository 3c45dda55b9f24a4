mod common;

use common::*;
use polarscatter::construct::CodeSpec;
use polarscatter::decode::*;
use polarscatter::encode::encode_systematic_streaming;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bp_tracks_ml_on_a_small_code() {
    let spec = CodeSpec::bec(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut agree = 0;
    for _ in 0..300 {
        let info = random_bits(4, &mut rng);
        let cw = encode_systematic_streaming(&info, &spec).unwrap();
        let llrs = ChannelLLRs(bpsk_llrs(cw.bits(), 2.0, &mut rng));
        let bp = bp_decode(&llrs, &spec, &BpConfig::default()).unwrap();
        agree += (bp.info_bits == ml_decode_oracle(&llrs, &spec).unwrap()) as usize;
    }
    assert!(agree >= 294, "agreement {agree}/300");
}

#[test]
fn min_sum_is_scale_invariant() {
    // scaling every channel LLR and the frozen prior by c leaves min-sum decisions unchanged
    let spec = CodeSpec::bec(6, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let info = random_bits(32, &mut rng);
        let cw = encode_systematic_streaming(&info, &spec).unwrap();
        let llrs = bpsk_llrs(cw.bits(), 1.0, &mut rng);
        let base = BpConfig { update_rule: UpdateRule::MinSum, early_stop: EarlyStop::None, max_iters: 20, ..BpConfig::default() };
        let r1 = bp_decode(&ChannelLLRs(llrs.clone()), &spec, &base).unwrap();
        for c in [0.25, 3.0, 17.0] {
            let scaled = BpConfig { frozen_prior: base.frozen_prior * c, ..base };
            let r2 = bp_decode(&ChannelLLRs(llrs.iter().map(|l| l * c).collect()), &spec, &scaled).unwrap();
            assert_eq!(r1.info_bits, r2.info_bits);
            assert_eq!(r1.frozen_hard, r2.frozen_hard);
        }
    }
}

#[test]
fn exact_rule_is_nearly_scale_invariant() {
    let spec = CodeSpec::bec(6, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = BpConfig::default();
    let mut agree = 0;
    for _ in 0..100 {
        let cw = encode_systematic_streaming(&random_bits(32, &mut rng), &spec).unwrap();
        let llrs = bpsk_llrs(cw.bits(), 1.0, &mut rng);
        let base = bp_decode(&ChannelLLRs(llrs.clone()), &spec, &cfg).unwrap().info_bits;
        agree += [0.5, 2.0]
            .iter()
            .filter(|&&c| bp_decode(&ChannelLLRs(llrs.iter().map(|l| l * c).collect()), &spec, &cfg).unwrap().info_bits == base)
            .count();
    }
    assert!(agree >= 198, "{agree}/200");
}

#[test]
fn high_snr_blocks_decode_cleanly() {
    let spec = CodeSpec::bec(7, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let errors = (0..1000)
        .filter(|_| {
            let info = random_bits(64, &mut rng);
            let cw = encode_systematic_streaming(&info, &spec).unwrap();
            bp_decode(&ChannelLLRs(bpsk_llrs(cw.bits(), 8.0, &mut rng)), &spec, &BpConfig::default()).unwrap().info_bits != info
        })
        .count();
    assert_eq!(errors, 0);
}

#[test]
fn punctured_positions_leave_frozen_evidence_at_zero() {
    let spec = CodeSpec::bec(5, 8).unwrap();
    let mut llrs = ChannelLLRs::zeros(32);
    let cw = encode_systematic_streaming(&[1, 0, 1, 1, 0, 0, 1, 0], &spec).unwrap();
    for &p in spec.info_set() {
        llrs.0[p] = if cw.bits()[p] == 0 { 6.0 } else { -6.0 };
    }
    let r = bp_decode(&llrs, &spec, &BpConfig::default()).unwrap();
    assert!(r.frozen_llrs.contains(&0.0));
    assert!((0.0..=1.0).contains(&r.fber));
    assert_eq!(compute_fber(&r), r.fber);
}

#[test]
fn fber_rises_with_noise() {
    let spec = CodeSpec::bec(8, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mean_fber = |esn0: f64, rng: &mut ChaCha8Rng| {
        (0..40)
            .map(|_| {
                let cw = encode_systematic_streaming(&random_bits(128, rng), &spec).unwrap();
                bp_decode(&ChannelLLRs(bpsk_llrs(cw.bits(), esn0, rng)), &spec, &BpConfig::default()).unwrap().fber
            })
            .sum::<f64>()
            / 40.0
    };
    let clean = mean_fber(8.0, &mut rng);
    let noisy = mean_fber(-6.0, &mut rng);
    assert!(clean < 0.01 && noisy > 0.2, "clean {clean}, noisy {noisy}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noiseless_decode_is_exact(n in 2u32..=9, k_frac in 0.1f64..0.9, seed in any::<u64>(), mag in 2.0f64..30.0) {
        let k = (((1usize << n) as f64) * k_frac).ceil() as usize;
        let spec = CodeSpec::bec(n, k).unwrap();
        let info = random_bits(k, &mut ChaCha8Rng::seed_from_u64(seed));
        let cw = encode_systematic_streaming(&info, &spec).unwrap();
        for rule in [UpdateRule::ExactTanh, UpdateRule::MinSum] {
            let cfg = BpConfig { update_rule: rule, ..BpConfig::default() };
            let r = bp_decode(&ChannelLLRs::from_codeword(cw.bits(), mag), &spec, &cfg).unwrap();
            prop_assert_eq!(&r.info_bits, &info);
            prop_assert!(r.converged);
            prop_assert_eq!(r.fber, 0.0);
            prop_assert_eq!(r.codeword.as_slice(), cw.bits());
        }
    }

    #[test]
    fn combining_is_additive_and_commutative(v in prop::collection::vec(-50.0f64..50.0, 1..64), w in prop::collection::vec(-50.0f64..50.0, 1..64)) {
        let n = v.len().min(w.len());
        let a = ChannelLLRs(v[..n].to_vec());
        let b = ChannelLLRs(w[..n].to_vec());
        let ab = combine_llrs(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(&ab, &combine_llrs(&[b, a.clone()]).unwrap());
        prop_assert_eq!(&combine_llrs(&[a.clone(), ChannelLLRs::zeros(n)]).unwrap(), &a);
    }
}
