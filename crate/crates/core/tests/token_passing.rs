mod support;

use ctr_core::hmm::viterbi;
use ctr_core::ld::LdKind;
use ctr_core::token::{isolated_cost, recognize_isolated, BeamConfig, Recognition, Recognizer};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

const KINDS: [LdKind; 3] = [LdKind::Baseline, LdKind::Unigram, LdKind::Biclass];

#[test]
fn connected_matches_composed_viterbi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..90 {
        let kind = KINDS[case % 3];
        let od = random_od(&mut rng, 5, 5);
        let ld = random_ld(&mut rng, kind, od.vocabulary());
        let input = random_input(&mut rng, 11);
        let symbols = od.encode_utterance(&input).unwrap();
        let rec = Recognizer::new(&ld, &od).unwrap();
        let got = rec.decode_symbols(&symbols, BeamConfig::Unbounded).unwrap();
        let oracle = ComposedModel::build(&ld, &od).decode(&symbols);
        match (got, oracle) {
            (Recognition::Parsed(p), Some((cost, words))) => {
                assert!((p.cost - cost).abs() < 1e-9, "case {case}: {} vs {cost}", p.cost);
                assert_eq!(p.words, words, "case {case} input {input:?}");
            }
            (Recognition::NoParse(_), None) => {}
            (g, o) => panic!("case {case}: {g:?} vs {o:?}"),
        }
    }
}

#[test]
fn isolated_matches_viterbi_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let od = random_od(&mut rng, 4, 5);
        let input = random_input(&mut rng, 9);
        let symbols = od.encode_utterance(&input).unwrap();
        let ranked = recognize_isolated(&od, &input).unwrap();
        for (k, m) in od.models().iter().enumerate() {
            let v = viterbi(m, &symbols).unwrap().cost;
            assert_eq!(isolated_cost(m, &symbols), v);
            if v.is_finite() {
                assert!(ranked.contains(&(k, v)));
            }
        }
        assert!(ranked.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}

#[test]
fn decoding_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let od = random_od(&mut rng, 5, 5);
    let ld = random_ld(&mut rng, LdKind::Biclass, od.vocabulary());
    let rec = Recognizer::new(&ld, &od).unwrap();
    let a = rec.decode("abc ab cab", BeamConfig::Width(3.0)).unwrap();
    let b = rec.decode("abc ab cab", BeamConfig::Width(3.0)).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn narrower_beam_never_decodes_cheaper(seed in any::<u64>(), b1 in 0.1f64..6.0, extra in 0.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let od = random_od(&mut rng, 5, 5);
        let ld = random_ld(&mut rng, LdKind::Unigram, od.vocabulary());
        let input = random_input(&mut rng, 11);
        let rec = Recognizer::new(&ld, &od).unwrap();
        let narrow = rec.decode(&input, BeamConfig::Width(b1)).unwrap().cost();
        let wide = rec.decode(&input, BeamConfig::Width(b1 + extra)).unwrap().cost();
        let exact = rec.decode(&input, BeamConfig::Unbounded).unwrap().cost();
        prop_assert!(narrow >= wide);
        prop_assert!(wide >= exact);
    }

    #[test]
    fn word_boundaries_increase_and_end_at_input_end(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let od = random_od(&mut rng, 4, 4);
        let ld = random_ld(&mut rng, LdKind::Biclass, od.vocabulary());
        let input = random_input(&mut rng, 11);
        let rec = Recognizer::new(&ld, &od).unwrap();
        if let Recognition::Parsed(p) = rec.decode(&input, BeamConfig::Unbounded).unwrap() {
            prop_assert!(p.boundaries.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(*p.boundaries.last().unwrap(), input.chars().count() + 1);
            prop_assert!(p.cost >= 0.0);
        }
    }
}
