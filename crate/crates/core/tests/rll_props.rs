use bliss_ldpc::constraint::count_violations;
use bliss_ldpc::rll::{inverse_precode, precode, rll_decode, rll_encode, PrecoderState, RllCode};
use proptest::prelude::*;

fn pairs(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..max).prop_map(|mut v| {
        v.truncate(v.len() / 2 * 2);
        v
    })
}

fn max_zero_run(bits: &[u8]) -> (usize, usize) {
    // (shortest run of zeros between ones, longest run of zeros anywhere)
    let ones: Vec<usize> = bits.iter().enumerate().filter(|(_, b)| **b == 1).map(|(i, _)| i).collect();
    let d = ones.windows(2).map(|w| w[1] - w[0] - 1).min().unwrap_or(usize::MAX);
    let mut longest = 0;
    let mut run = 0;
    for &b in bits {
        run = if b == 0 { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    (d, longest)
}

proptest! {
    #[test]
    fn round_trip(user in pairs(200)) {
        let code = RllCode::default();
        prop_assert_eq!(rll_decode(&rll_encode(&user, &code)?, &code)?, user);
    }

    #[test]
    fn stream_rate_is_three_halves(user in pairs(200)) {
        let (out, _) = RllCode::default().encode_stream(&user)?;
        prop_assert_eq!(out.len() * 2, user.len() * 3);
    }

    #[test]
    fn output_respects_d_and_k(user in pairs(300)) {
        let code = RllCode::default();
        let out = rll_encode(&user, &code)?;
        let (d, _) = max_zero_run(&out);
        prop_assert!(d >= 1);
        // Interior zero runs only: the frame may start or end mid-run.
        let first = out.iter().position(|&b| b == 1);
        let last = out.iter().rposition(|&b| b == 1);
        if let (Some(f), Some(l)) = (first, last) {
            prop_assert!(max_zero_run(&out[f..=l]).1 <= 7);
        }
        let channel = precode(&out, &mut PrecoderState::default());
        prop_assert_eq!(count_violations(&channel, 0..channel.len()), 0);
    }

    #[test]
    fn precoder_flip_complements_output(diff in prop::collection::vec(0u8..2, 0..100)) {
        let a = precode(&diff, &mut PrecoderState { last_bit: 0 });
        let b = precode(&diff, &mut PrecoderState { last_bit: 1 });
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x ^ y == 1));
        prop_assert_eq!(inverse_precode(&a, 0), diff.clone());
        prop_assert_eq!(inverse_precode(&b, 1), diff);
    }

    #[test]
    fn precoder_state_carries_across_calls(diff in prop::collection::vec(0u8..2, 0..100), split in 0usize..100) {
        let split = split.min(diff.len());
        let whole = precode(&diff, &mut PrecoderState::default());
        let mut state = PrecoderState::default();
        let mut parts = precode(&diff[..split], &mut state);
        parts.extend(precode(&diff[split..], &mut state));
        prop_assert_eq!(whole, parts);
    }
}

#[test]
fn odd_length_is_rejected() {
    assert!(rll_encode(&[0, 1, 1], &RllCode::default()).is_err());
}
