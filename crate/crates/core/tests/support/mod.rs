//! Test oracles shared by the integration and acceptance targets.

#![allow(dead_code)]

use ctr_core::hmm::{prob_to_cost, viterbi, Alphabet, Cost, Hmm, INF};
use ctr_core::ld::{baseline_ld, LdKind, LinguisticDecoder};
use ctr_core::od::{OdSet, Vocabulary};
use rand::seq::SliceRandom;
use rand::Rng;

pub const LETTERS: [char; 3] = ['a', 'b', 'c'];

pub fn toy_alphabet() -> Alphabet {
    Alphabet::new([' ', 'a', 'b', 'c']).unwrap()
}

fn random_row<R: Rng>(rng: &mut R, allowed: &[bool]) -> Vec<f64> {
    let w: Vec<f64> = allowed
        .iter()
        .map(|&a| if a { rng.gen_range(0.05..1.0) } else { 0.0 })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Left-to-right word-model shape (self, next, skip arcs; entry into the
/// first two states; exit from the last two) with random probabilities.
pub fn random_word_model<R: Rng>(rng: &mut R, states: usize, symbols: usize) -> Hmm {
    let n = states;
    let entry = random_row(rng, &(0..n).map(|j| j < 2).collect::<Vec<_>>());
    let mut transitions = vec![0.0; n * n];
    let mut exit = vec![0.0; n];
    for i in 0..n {
        let mut allowed: Vec<bool> = (0..n).map(|j| j >= i && j <= i + 2).collect();
        allowed.push(i + 2 >= n);
        let row = random_row(rng, &allowed);
        transitions[i * n..(i + 1) * n].copy_from_slice(&row[..n]);
        exit[i] = row[n];
    }
    let mut emissions = Vec::with_capacity(n * symbols);
    for _ in 0..n {
        emissions.extend(random_row(rng, &vec![true; symbols]));
    }
    Hmm::from_probs(n, symbols, &entry, &transitions, &exit, &emissions, true).unwrap()
}

/// Up to `max_words` distinct words of 1..=`max_len` letters with random
/// models over the toy alphabet.
pub fn random_od<R: Rng>(rng: &mut R, max_words: usize, max_len: usize) -> OdSet {
    let alphabet = toy_alphabet();
    let count = rng.gen_range(1..=max_words);
    let mut words: Vec<String> = Vec::new();
    while words.len() < count {
        let len = rng.gen_range(1..=max_len);
        let w: String = (0..len).map(|_| *LETTERS.choose(rng).unwrap()).collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    let vocab = Vocabulary::new(&words).unwrap();
    let models = words
        .iter()
        .map(|w| random_word_model(rng, w.len() + 1, alphabet.len()))
        .collect();
    OdSet::new(vocab, alphabet, models, vec![false; count]).unwrap()
}

pub fn random_ld<R: Rng>(rng: &mut R, kind: LdKind, vocab: &Vocabulary) -> LinguisticDecoder {
    let v = vocab.len();
    match kind {
        LdKind::Baseline => baseline_ld(vocab),
        LdKind::Unigram => {
            let p = random_row(rng, &vec![true; v]);
            let emissions = p.into_iter().map(prob_to_cost).collect();
            let hmm = Hmm::from_costs(1, v, vec![0.0], vec![0.0], vec![0.0], emissions, false).unwrap();
            LinguisticDecoder::new(LdKind::Unigram, hmm, Vec::new()).unwrap()
        }
        LdKind::Biclass => {
            let c = rng.gen_range(1..=3);
            let entry = random_row(rng, &vec![true; c]);
            let mut transitions = Vec::new();
            let mut exit = Vec::new();
            for _ in 0..c {
                let row = random_row(rng, &vec![true; c + 1]);
                transitions.extend_from_slice(&row[..c]);
                exit.push(row[c]);
            }
            let mut emissions = Vec::new();
            for _ in 0..c {
                // some words missing from some classes
                let mut allowed: Vec<bool> = (0..v).map(|_| rng.gen_bool(0.7)).collect();
                let keep = rng.gen_range(0..v);
                allowed[keep] = true;
                emissions.extend(random_row(rng, &allowed));
            }
            let hmm = Hmm::from_probs(c, v, &entry, &transitions, &exit, &emissions, true).unwrap();
            let classes = (0..c).map(|i| format!("C{i}")).collect();
            LinguisticDecoder::new(LdKind::Biclass, hmm, classes).unwrap()
        }
    }
}

pub fn random_input<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    let mut s: String = (0..len)
        .map(|_| {
            if rng.gen_bool(0.2) {
                ' '
            } else {
                *LETTERS.choose(rng).unwrap()
            }
        })
        .collect();
    if s.starts_with(' ') {
        s.replace_range(0..1, "a");
    }
    s
}

/// One flat HMM equivalent to the layered decoders. A composed state is a
/// (linguistic state, word, word-model state) triple; a word boundary is a
/// transition out of one word model's exit, through the linguistic layer,
/// into a word model's entry.
pub struct ComposedModel {
    pub hmm: Hmm,
    states: Vec<(usize, usize, usize)>,
    in_model: Vec<Cost>,
    cross: Vec<Cost>,
}

impl ComposedModel {
    pub fn build(ld: &LinguisticDecoder, od: &OdSet) -> Self {
        let l = ld.hmm();
        let mut states = Vec::new();
        for j in 0..l.states() {
            for k in 0..od.len() {
                if l.emission_cost(j, k) < INF {
                    for s in 0..od.model(k).states() {
                        states.push((j, k, s));
                    }
                }
            }
        }
        let n = states.len();
        let m = od.alphabet().len();
        let mut entry = vec![INF; n];
        let mut exit = vec![INF; n];
        let mut emissions = vec![INF; n * m];
        let mut in_model = vec![INF; n * n];
        let mut cross = vec![INF; n * n];
        for (p, &(j, k, s)) in states.iter().enumerate() {
            let w = od.model(k);
            entry[p] = l.entry_cost(j) + l.emission_cost(j, k) + w.entry_cost(s);
            exit[p] = w.exit_cost(s) + l.exit_cost(j);
            emissions[p * m..(p + 1) * m].copy_from_slice(w.emission_row(s));
            for (q, &(j2, k2, s2)) in states.iter().enumerate() {
                if (j2, k2) == (j, k) {
                    in_model[p * n + q] = w.transition_cost(s, s2);
                }
                let w2 = od.model(k2);
                cross[p * n + q] =
                    w.exit_cost(s) + l.transition_cost(j, j2) + l.emission_cost(j2, k2) + w2.entry_cost(s2);
            }
        }
        let transitions = in_model.iter().zip(&cross).map(|(&a, &b)| a.min(b)).collect();
        let hmm = Hmm::from_costs(n, m, entry, transitions, exit, emissions, false).unwrap();
        ComposedModel {
            hmm,
            states,
            in_model,
            cross,
        }
    }

    /// Best cost and word sequence, or `None` when no path exists.
    pub fn decode(&self, symbols: &[usize]) -> Option<(Cost, Vec<usize>)> {
        let r = viterbi(&self.hmm, symbols).unwrap();
        if r.cost == INF {
            return None;
        }
        let n = self.states.len();
        let mut words = vec![self.states[r.path[0]].1];
        for pair in r.path.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            if self.cross[p * n + q] < self.in_model[p * n + q] {
                words.push(self.states[q].1);
            }
        }
        Some((r.cost, words))
    }
}

/// Optimal string alignment distance: edits are single-character
/// insertions, deletions, substitutions and adjacent transpositions.
pub fn osa_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[a.len()][b.len()]
}
