use bliss_ldpc::oracle::enumerate_posteriors;
use bliss_ldpc::rll::RllCode;
use bliss_ldpc::trellis::{bcjr, build_precoder_trellis, build_rll_unipolar_trellis, viterbi, SisoMode};
use proptest::prelude::*;

fn llrs(len: usize, bound: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-bound..bound, len)
}

proptest! {
    #[test]
    fn precoder_logmap_equals_enumeration((prior, channel) in (1usize..=10).prop_flat_map(|n| (llrs(n, 5.0), llrs(n, 8.0)))) {
        let trellis = build_precoder_trellis();
        let (inputs, outputs) = enumerate_posteriors(&trellis, &prior, &channel);
        let siso = bcjr(&trellis, &prior, &channel, SisoMode::LogMap)?;
        for (a, b) in siso.input_posterior.iter().zip(&inputs).chain(siso.output_posterior.iter().zip(&outputs)) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn rll_logmap_equals_enumeration((prior, channel) in (1usize..=4).prop_flat_map(|n| (llrs(2 * n, 3.0), llrs(3 * n, 6.0)))) {
        let trellis = build_rll_unipolar_trellis(&RllCode::default());
        let (inputs, _) = enumerate_posteriors(&trellis, &prior, &channel);
        let siso = bcjr(&trellis, &prior, &channel, SisoMode::LogMap)?;
        for (a, b) in siso.input_posterior.iter().zip(&inputs) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn maxlog_signs_follow_viterbi((prior, channel) in (1usize..=12).prop_flat_map(|n| (llrs(2 * n, 3.0), llrs(3 * n, 6.0)))) {
        let trellis = build_rll_unipolar_trellis(&RllCode::default());
        let siso = bcjr(&trellis, &prior, &channel, SisoMode::MaxLog)?;
        let path = viterbi(&trellis, &prior, &channel)?;
        for (l, &bit) in siso.input_posterior.iter().zip(&path) {
            // Ties are measure zero with continuous LLRs; skip near-ties anyway.
            if l.abs() > 1e-9 {
                prop_assert_eq!(u8::from(*l < 0.0), bit);
            }
        }
    }

    #[test]
    fn extrinsic_is_posterior_minus_prior((prior, channel) in (1usize..=8).prop_flat_map(|n| (llrs(n, 5.0), llrs(n, 5.0)))) {
        let siso = bcjr(&build_precoder_trellis(), &prior, &channel, SisoMode::LogMap)?;
        for ((e, p), a) in siso.input_extrinsic.iter().zip(&siso.input_posterior).zip(&prior) {
            prop_assert!((e - (p - a)).abs() < 1e-12);
        }
    }
}

#[test]
fn known_zero_priors_are_respected() {
    let trellis = build_rll_unipolar_trellis(&RllCode::default());
    let prior = [0.0, 0.0, f64::INFINITY, f64::INFINITY];
    let channel = [1.0, -2.0, 0.5, 0.0, 0.0, 0.0];
    let siso = bcjr(&trellis, &prior, &channel, SisoMode::LogMap).unwrap();
    assert!(siso.input_posterior.iter().all(|x| !x.is_nan()));
    assert_eq!(siso.input_posterior[2], f64::INFINITY);
    let (inputs, _) = enumerate_posteriors(&trellis, &prior, &channel);
    for (a, b) in siso.input_posterior[..2].iter().zip(&inputs) {
        assert!((a - b).abs() < 1e-9);
    }
}
