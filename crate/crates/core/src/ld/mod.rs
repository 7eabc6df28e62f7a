//! The linguistic decoder: a word-emitting HMM whose observables are the
//! orthographic decoder's word models.
//!
//! Three realizations are provided. The baseline adds no cost at all. The
//! unigram model is a single emitting state whose emission row is the
//! smoothed word distribution. The biclass model has one emitting state per
//! word class, smoothed class-bigram transitions, a smoothed end-of-utterance
//! exit, and smoothed per-class word emissions.

mod corpus;

use std::fmt;
use std::str::FromStr;

pub use corpus::{ClassInventory, Dialogue, TaggedCorpus, TaggedToken, Utterance, DIALOGUE_SEPARATOR};

use crate::error::{Error, Result};
use crate::hmm::{self, prob_to_cost, Cost, Hmm};
use crate::od::Vocabulary;
use crate::smoothing::{smooth_additive, CountTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LdKind {
    Baseline,
    Unigram,
    Biclass,
}

impl LdKind {
    pub fn name(self) -> &'static str {
        match self {
            LdKind::Baseline => "baseline",
            LdKind::Unigram => "unigram",
            LdKind::Biclass => "biclass",
        }
    }
}

impl fmt::Display for LdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LdKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(LdKind::Baseline),
            "unigram" => Ok(LdKind::Unigram),
            "biclass" => Ok(LdKind::Biclass),
            other => Err(Error::Parameter(format!(
                "unknown LD kind {other:?} (expected baseline, unigram or biclass)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticDecoder {
    kind: LdKind,
    hmm: Hmm,
    classes: Vec<String>,
}

impl LinguisticDecoder {
    pub fn new(kind: LdKind, hmm: Hmm, classes: Vec<String>) -> Result<Self> {
        let states_ok = match kind {
            LdKind::Baseline | LdKind::Unigram => hmm.states() == 1,
            LdKind::Biclass => hmm.states() == classes.len(),
        };
        if !states_ok {
            return Err(Error::InvalidModel(format!(
                "{kind} decoder with {} states and {} classes",
                hmm.states(),
                classes.len()
            )));
        }
        if kind == LdKind::Biclass && !hmm.is_normalized() {
            return Err(Error::InvalidModel("a biclass decoder must be normalized".into()));
        }
        Ok(LinguisticDecoder { kind, hmm, classes })
    }

    pub fn kind(&self) -> LdKind {
        self.kind
    }

    pub fn hmm(&self) -> &Hmm {
        &self.hmm
    }

    /// Class label per emitting state (biclass only; empty otherwise).
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn vocabulary_size(&self) -> usize {
        self.hmm.symbol_count()
    }

    /// Serialize as `ld <kind>`, a `classes` line, then the model block with
    /// vocabulary entries as symbol labels.
    pub fn to_file_string(&self, vocabulary: &Vocabulary) -> Result<String> {
        if vocabulary.len() != self.vocabulary_size() {
            return Err(Error::InvalidInput("vocabulary does not match the decoder".into()));
        }
        let mut out = format!("ld {}\nclasses", self.kind);
        for c in &self.classes {
            out.push(' ');
            out.push_str(c);
        }
        out.push('\n');
        out.push_str(&hmm::io::write_hmm(&self.hmm, vocabulary.entries())?);
        Ok(out)
    }

    /// Parse a decoder file, returning the vocabulary it was built over.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::data(1, "empty decoder file"))?;
        let kind: LdKind = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["ld", k] => k.parse().map_err(|e: Error| Error::data(1, e.to_string()))?,
            _ => return Err(Error::data(1, "expected `ld <kind>`")),
        };
        let classes_line = lines.next().ok_or_else(|| Error::data(2, "missing classes line"))?;
        let mut fields = classes_line.split_whitespace();
        if fields.next() != Some("classes") {
            return Err(Error::data(2, "expected `classes ...`"));
        }
        let classes: Vec<String> = fields.map(str::to_string).collect();
        let (hmm, labels) = hmm::io::read_hmm_lines(&mut lines, 3)?;
        let ld = LinguisticDecoder::new(kind, hmm, classes).map_err(|e| Error::data(1, e.to_string()))?;
        Ok((ld, labels))
    }
}

/// No linguistic constraint: every cost is zero.
pub fn baseline_ld(vocabulary: &Vocabulary) -> LinguisticDecoder {
    let v = vocabulary.len();
    let hmm = Hmm::from_costs(1, v, vec![0.0], vec![0.0], vec![0.0], vec![0.0; v], false)
        .expect("baseline tables are well formed");
    LinguisticDecoder {
        kind: LdKind::Baseline,
        hmm,
        classes: Vec::new(),
    }
}

/// Word ids of an utterance, matching multi-word entries greedily
/// longest-first. Tokens outside the vocabulary are dropped.
fn utterance_ids(utt: &Utterance, vocabulary: &Vocabulary) -> Vec<usize> {
    let text = TaggedCorpus::text(utt);
    let toks: Vec<&str> = text.split(' ').collect();
    vocabulary
        .match_tokens(&toks)
        .into_iter()
        .filter_map(|m| m.ok())
        .collect()
}

fn costs(probs: Vec<f64>) -> Vec<Cost> {
    probs.into_iter().map(prob_to_cost).collect()
}

/// Unigram model `P(w) = Count(w) / N`, additively smoothed over the whole
/// vocabulary. Loop and exit costs are zero, so the decode objective is the
/// plain product of word probabilities.
pub fn estimate_unigram(corpus: &TaggedCorpus, vocabulary: &Vocabulary, delta: f64) -> Result<LinguisticDecoder> {
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut counts = CountTable::new();
    for utt in corpus.utterances() {
        for id in utterance_ids(utt, vocabulary) {
            counts.add(id);
        }
    }
    let weights: Vec<f64> = (0..vocabulary.len()).map(|w| counts.get(&w) as f64).collect();
    let emissions = costs(smooth_additive(&weights, delta)?);
    let hmm = Hmm::from_costs(1, vocabulary.len(), vec![0.0], vec![0.0], vec![0.0], emissions, false)?;
    LinguisticDecoder::new(LdKind::Unigram, hmm, Vec::new())
}

/// Class-bigram model:
/// `P(Cl'|Cl) = Count(Cl, Cl') / Count(Cl)`, `P(w|Cl) = Count(Cl, w) / Count(Cl)`,
/// with the utterance end as one more successor event of every class and the
/// utterance-initial class distribution as the entry row. Every row is
/// additively smoothed.
pub fn estimate_biclass(
    corpus: &TaggedCorpus,
    vocabulary: &Vocabulary,
    inventory: &ClassInventory,
    delta: f64,
) -> Result<LinguisticDecoder> {
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let c = inventory.len();
    let v = vocabulary.len();
    let end = c;
    let mut initial = CountTable::new();
    let mut bigrams = CountTable::new();
    let mut emits = CountTable::new();
    for utt in corpus.utterances() {
        let mut classes = Vec::with_capacity(utt.len());
        for tok in utt {
            let tag = tok
                .class
                .as_deref()
                .ok_or_else(|| Error::data(tok.line, format!("token {:?} has no class tag", tok.word)))?;
            let cl = inventory
                .index_of(tag)
                .ok_or_else(|| Error::data(tok.line, format!("class {tag:?} is not in the inventory")))?;
            classes.push(cl);
            if let Some(w) = vocabulary.id_of(&tok.word) {
                emits.add((cl, w));
            }
        }
        let Some(&first) = classes.first() else { continue };
        initial.add(first);
        for pair in classes.windows(2) {
            bigrams.add((pair[0], pair[1]));
        }
        bigrams.add((*classes.last().expect("non-empty"), end));
    }

    let entry_w: Vec<f64> = (0..c).map(|k| initial.get(&k) as f64).collect();
    let entry = costs(smooth_additive(&entry_w, delta)?);
    let mut transitions = Vec::with_capacity(c * c);
    let mut exit = Vec::with_capacity(c);
    for from in 0..c {
        let row: Vec<f64> = (0..=c).map(|to| bigrams.get(&(from, to)) as f64).collect();
        let p = smooth_additive(&row, delta)?;
        transitions.extend(p[..c].iter().map(|&x| prob_to_cost(x)));
        exit.push(prob_to_cost(p[c]));
    }
    let mut emissions = Vec::with_capacity(c * v);
    for cl in 0..c {
        let row: Vec<f64> = (0..v).map(|w| emits.get(&(cl, w)) as f64).collect();
        emissions.extend(costs(smooth_additive(&row, delta)?));
    }
    let hmm = Hmm::from_costs(c, v, entry, transitions, exit, emissions, true)?;
    LinguisticDecoder::new(LdKind::Biclass, hmm, inventory.classes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmm::cost_to_prob;

    fn corpus(utts: &[&[(&str, &str)]]) -> TaggedCorpus {
        TaggedCorpus::new(vec![Dialogue {
            utterances: utts
                .iter()
                .map(|u| u.iter().map(|(w, c)| TaggedToken::new(w, Some(c))).collect())
                .collect(),
        }])
    }

    #[test]
    fn unigram_counts_and_smoothing() {
        let v = Vocabulary::new(["a", "b", "c"]).unwrap();
        let corp = corpus(&[&[("a", "X"), ("a", "X"), ("b", "X")]]);
        let ld = estimate_unigram(&corp, &v, 1.0).unwrap();
        let p: Vec<f64> = ld.hmm().emission_row(0).iter().map(|&c| cost_to_prob(c)).collect();
        for (got, want) in p.iter().zip([3.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(ld.hmm().states(), 1);
        assert_eq!(ld.hmm().transition_cost(0, 0), 0.0);
        assert_eq!(ld.hmm().exit_cost(0), 0.0);
        let best = (0..3).min_by(|&x, &y| ld.hmm().emission_cost(0, x).total_cmp(&ld.hmm().emission_cost(0, y)));
        assert_eq!(best, Some(0));
    }

    #[test]
    fn unigram_on_empty_counts_is_uniform() {
        let v = Vocabulary::new(["a", "b"]).unwrap();
        let ld = estimate_unigram(&TaggedCorpus::default(), &v, 0.3).unwrap();
        assert_eq!(ld.hmm().emission_cost(0, 0), ld.hmm().emission_cost(0, 1));
    }

    #[test]
    fn unigram_matches_multiword_entries() {
        let v = Vocabulary::new(["saab", "saab 900", "900"]).unwrap();
        let corp = TaggedCorpus::parse("saab\n900\n").unwrap();
        let ld = estimate_unigram(&corp, &v, 1.0).unwrap();
        // "saab 900" counted once, the single tokens not at all
        let p1 = cost_to_prob(ld.hmm().emission_cost(0, 1));
        assert!((p1 - 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn biclass_two_token_corpus_in_the_small_delta_limit() {
        let v = Vocabulary::new(["show", "cars"]).unwrap();
        let inv = ClassInventory::new(["CH", "OH"]).unwrap();
        let corp = corpus(&[&[("show", "CH"), ("cars", "OH")]]);
        let ld = estimate_biclass(&corp, &v, &inv, 1e-12).unwrap();
        let h = ld.hmm();
        assert!((cost_to_prob(h.transition_cost(0, 1)) - 1.0).abs() < 1e-9);
        assert!((cost_to_prob(h.exit_cost(1)) - 1.0).abs() < 1e-9);
        assert!((cost_to_prob(h.emission_cost(0, 0)) - 1.0).abs() < 1e-9);
        assert!((cost_to_prob(h.entry_cost(0)) - 1.0).abs() < 1e-9);
        assert!(h.check_normalized(1e-9).is_ok());
    }

    #[test]
    fn biclass_with_positive_delta_has_no_zeros() {
        let v = Vocabulary::new(["show", "cars", "all"]).unwrap();
        let inv = ClassInventory::new(["CH", "OH", "DT"]).unwrap();
        let corp = corpus(&[&[("show", "CH"), ("cars", "OH")]]);
        let ld = estimate_biclass(&corp, &v, &inv, 0.01).unwrap();
        let h = ld.hmm();
        for i in 0..3 {
            assert!(h.transition_row(i).iter().all(|c| c.is_finite()));
            assert!(h.emission_row(i).iter().all(|c| c.is_finite()));
            assert!(h.exit_cost(i).is_finite());
        }
    }

    #[test]
    fn single_class_ranks_like_unigram() {
        let v = Vocabulary::new(["a", "b", "c", "d"]).unwrap();
        let inv = ClassInventory::new(["X"]).unwrap();
        let corp = corpus(&[&[("a", "X"), ("b", "X"), ("a", "X")], &[("c", "X"), ("a", "X")]]);
        let bi = estimate_biclass(&corp, &v, &inv, 0.5).unwrap();
        let uni = estimate_unigram(&corp, &v, 0.5).unwrap();
        assert_eq!(bi.hmm().states(), 1);
        for w in 0..4 {
            let (x, y) = (bi.hmm().emission_cost(0, w), uni.hmm().emission_cost(0, w));
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_class_reports_line() {
        let v = Vocabulary::new(["show"]).unwrap();
        let inv = ClassInventory::new(["CH"]).unwrap();
        let corp = TaggedCorpus::parse("show\tCH\nshow\tZZ\n").unwrap();
        assert!(matches!(
            estimate_biclass(&corp, &v, &inv, 0.1),
            Err(Error::Data { line: 2, .. })
        ));
        let untagged = TaggedCorpus::parse("show\n").unwrap();
        assert!(estimate_biclass(&untagged, &v, &inv, 0.1).is_err());
    }

    #[test]
    fn baseline_is_all_zero() {
        let v = Vocabulary::new(["a", "b"]).unwrap();
        let ld = baseline_ld(&v);
        assert!(!ld.hmm().is_normalized());
        assert_eq!(ld.hmm().entry_cost(0), 0.0);
        assert!(ld.hmm().emission_row(0).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn file_round_trip() {
        let v = Vocabulary::new(["show", "saab 900"]).unwrap();
        let inv = ClassInventory::new(["CH", "OH"]).unwrap();
        let corp = corpus(&[&[("show", "CH"), ("saab 900", "OH")]]);
        let ld = estimate_biclass(&corp, &v, &inv, 0.1).unwrap();
        let text = ld.to_file_string(&v).unwrap();
        let (back, labels) = LinguisticDecoder::parse(&text).unwrap();
        assert_eq!(back, ld);
        assert_eq!(labels, v.entries());
        assert!("trigram".parse::<LdKind>().is_err());
    }
}
