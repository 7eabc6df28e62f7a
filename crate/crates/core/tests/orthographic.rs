mod support;

use std::collections::BTreeSet;

use ctr_core::od::{build_od, generate_error_corpus, ErrorType, ErrorTypeSet, KeyboardMap, TrainingParams, Vocabulary};
use proptest::prelude::*;
use support::osa_distance;

/// Every single-edit variant, built edit type by edit type without regard
/// to generation order.
fn expected_variants(word: &str, types: &[ErrorType], keyboard: &KeyboardMap) -> BTreeSet<String> {
    let w: Vec<char> = word.chars().collect();
    let n = w.len();
    let s = |v: Vec<char>| v.into_iter().collect::<String>();
    let mut out = BTreeSet::new();
    for &t in types {
        for p in 0..n {
            match t {
                ErrorType::Substitution => {
                    for c in keyboard.neighbours(w[p]) {
                        let mut v = w.clone();
                        v[p] = c;
                        out.insert(s(v));
                    }
                }
                ErrorType::Deletion => {
                    out.insert(s([&w[..p], &w[p + 1..]].concat()));
                }
                ErrorType::Insertion => {
                    for c in keyboard.neighbours(w[p]) {
                        out.insert(s([&w[..p], &[c], &w[p..]].concat()));
                        out.insert(s([&w[..=p], &[c], &w[p + 1..]].concat()));
                    }
                }
                ErrorType::Transposition if p + 1 < n => {
                    out.insert(s([&w[..p], &[w[p + 1], w[p]], &w[p + 2..]].concat()));
                }
                ErrorType::WhiteSpaceInsertion if p >= 1 && p + 1 < n => {
                    out.insert(s([&w[..=p], &[' '], &w[p + 1..]].concat()));
                }
                ErrorType::DoubleStroke => {
                    out.insert(s([&w[..=p], &w[p..]].concat()));
                }
                _ => {}
            }
        }
    }
    out.remove(word);
    out.remove("");
    out
}

fn type_subset() -> impl Strategy<Value = Vec<ErrorType>> {
    proptest::sample::subsequence(ErrorType::ALL.to_vec(), 1..=ErrorType::ALL.len())
}

proptest! {
    #[test]
    fn error_corpus_matches_independent_enumeration(body in "[a-z]{1,7}", types in type_subset()) {
        let keyboard = KeyboardMap::qwerty();
        let word = format!(" {body}");
        let corpus = generate_error_corpus(&word, ErrorTypeSet::of(&types), &keyboard).unwrap();
        prop_assert_eq!(&corpus[0], &word);
        let variants: BTreeSet<String> = corpus[1..].iter().cloned().collect();
        prop_assert_eq!(variants.len(), corpus.len() - 1, "duplicates in corpus");
        prop_assert_eq!(&variants, &expected_variants(&word, &types, &keyboard));
        for v in &variants {
            prop_assert_eq!(osa_distance(v, &word), 1, "{:?}", v);
        }
    }
}

#[test]
fn build_is_deterministic_and_never_impossible() {
    let vocab = Vocabulary::new(["show", "me", "the", "saab 900", "?", "1990"]).unwrap();
    let keyboard = KeyboardMap::qwerty();
    let params = TrainingParams::default();
    let a = build_od(&vocab, ErrorTypeSet::standard(), &keyboard, &params).unwrap();
    let b = build_od(&vocab, ErrorTypeSet::standard(), &keyboard, &params).unwrap();
    assert_eq!(a, b);
    for m in a.models() {
        for j in 0..m.states() {
            assert!(m.emission_row(j).iter().all(|c| c.is_finite()));
        }
    }
    assert!(a.is_special(4) && a.is_special(5) && !a.is_special(3));
}

#[test]
fn saved_models_load_back_identically() {
    let vocab = Vocabulary::new(["cars", "volvo 240"]).unwrap();
    let od = build_od(
        &vocab,
        ErrorTypeSet::all(),
        &KeyboardMap::qwerty(),
        &TrainingParams::default(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    od.save(dir.path()).unwrap();
    let loaded = ctr_core::od::OdSet::load(dir.path()).unwrap();
    assert_eq!(loaded.vocabulary(), od.vocabulary());
    assert_eq!(loaded.alphabet(), od.alphabet());
    for (x, y) in loaded.models().iter().zip(od.models()) {
        for j in 0..x.states() {
            for (a, b) in x.emission_row(j).iter().zip(y.emission_row(j)) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }
}
