//! The orthographic decoder: one character-level HMM per vocabulary entry.
//!
//! Models are built from a fixed left-to-right topology, trained with
//! Baum-Welch on a synthetic corpus of single-edit variants of the word,
//! and smoothed so that no input character can make a model impossible.

mod errors;
mod keyboard;
mod topology;
mod vocabulary;

use std::fs;
use std::path::Path;

use rayon::prelude::*;

pub use errors::{generate_error_corpus, ErrorType, ErrorTypeSet};
pub use keyboard::KeyboardMap;
pub use topology::build_word_topology;
pub use vocabulary::{canonical_spacing, Vocabulary};

use crate::error::{Error, Result};
use crate::hmm::{self, baum_welch, cost_to_prob, prob_to_cost, Alphabet, Cost, Hmm, INF};
use crate::smoothing::smooth_additive;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingParams {
    /// Initial emission probability of each state's own character.
    pub bias: f64,
    pub bw_iterations: usize,
    pub smoothing_delta: f64,
    /// Copies of the clean word string in each training corpus.
    pub clean_weight: usize,
}

impl Default for TrainingParams {
    fn default() -> Self {
        TrainingParams {
            bias: 0.9,
            bw_iterations: 10,
            smoothing_delta: 1e-3,
            clean_weight: 5,
        }
    }
}

/// Single characters and numeric tokens get a white-space-insertion-only
/// training corpus.
pub fn classify_special(entry: &str) -> bool {
    let mut chars = entry.chars();
    if let (Some(_), None) = (chars.next(), chars.next()) {
        return true;
    }
    entry.chars().any(|c| c.is_ascii_digit())
        && entry
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '+' | '-'))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdSet {
    vocabulary: Vocabulary,
    alphabet: Alphabet,
    models: Vec<Hmm>,
    special: Vec<bool>,
}

impl OdSet {
    pub fn new(vocabulary: Vocabulary, alphabet: Alphabet, models: Vec<Hmm>, special: Vec<bool>) -> Result<Self> {
        if models.len() != vocabulary.len() || special.len() != vocabulary.len() {
            return Err(Error::InvalidModel(format!(
                "{} models and {} special flags for {} vocabulary entries",
                models.len(),
                special.len(),
                vocabulary.len()
            )));
        }
        if let Some(m) = models.iter().find(|m| m.symbol_count() != alphabet.len()) {
            return Err(Error::InvalidModel(format!(
                "model over {} symbols, alphabet has {}",
                m.symbol_count(),
                alphabet.len()
            )));
        }
        Ok(OdSet {
            vocabulary,
            alphabet,
            models,
            special,
        })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn model(&self, id: usize) -> &Hmm {
        &self.models[id]
    }

    pub fn models(&self) -> &[Hmm] {
        &self.models
    }

    pub fn is_special(&self, id: usize) -> bool {
        self.special[id]
    }

    /// Encode an utterance for decoding, prepending the single space every
    /// word model expects in front of its word.
    pub fn encode_utterance(&self, text: &str) -> Result<Vec<usize>> {
        if text.is_empty() {
            return Err(Error::InvalidInput("cannot decode an empty utterance".into()));
        }
        let mut s = String::with_capacity(text.len() + 1);
        s.push(' ');
        s.push_str(text);
        self.alphabet.encode(&s).map_err(|e| match e {
            Error::UnknownSymbol { symbol, position } => Error::UnknownSymbol {
                symbol,
                position: position - 1,
            },
            e => e,
        })
    }

    /// Write the set as a directory: `manifest.tsv` (`entry<TAB>file<TAB>special`)
    /// and one model file per entry.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let labels = self.alphabet.labels();
        let mut manifest = String::new();
        for (id, model) in self.models.iter().enumerate() {
            let file = format!("model_{id:05}.hmm");
            let text = hmm::io::write_hmm(model, &labels)?;
            let path = dir.join(&file);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            manifest.push_str(&format!(
                "{}\t{}\t{}\n",
                self.vocabulary.entry(id),
                file,
                u8::from(self.special[id])
            ));
        }
        let path = dir.join("manifest.tsv");
        fs::write(&path, manifest).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mpath = dir.join("manifest.tsv");
        let manifest = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
        let mut entries = Vec::new();
        let mut models = Vec::new();
        let mut special = Vec::new();
        let mut labels: Option<Vec<String>> = None;
        for (n, line) in manifest.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [entry, file, flag] = fields.as_slice() else {
                return Err(Error::data(n + 1, "expected `entry<TAB>file<TAB>special`").with_path(&mpath));
            };
            let flag = match *flag {
                "0" => false,
                "1" => true,
                _ => return Err(Error::data(n + 1, "special flag must be 0 or 1").with_path(&mpath)),
            };
            let path = dir.join(file);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let (model, l) = hmm::io::read_hmm(&text).map_err(|e| e.with_path(&path))?;
            match &labels {
                None => labels = Some(l),
                Some(prev) if *prev != l => {
                    return Err(Error::data(1, "alphabet differs from the other models").with_path(&path))
                }
                _ => {}
            }
            entries.push(entry.to_string());
            models.push(model);
            special.push(flag);
        }
        let labels = labels.ok_or(Error::EmptyVocabulary)?;
        let mut chars = Vec::with_capacity(labels.len());
        for l in &labels {
            let mut it = l.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => chars.push(c),
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "alphabet symbol {l:?} is not one character"
                    )))
                }
            }
        }
        OdSet::new(Vocabulary::new(entries)?, Alphabet::new(chars)?, models, special)
    }
}

/// Smooth `row` over the arcs where `support` is finite, leaving the rest
/// forbidden.
fn smooth_over_support(row: &[Cost], support: &[Cost], delta: f64) -> Result<Vec<Cost>> {
    let idx: Vec<usize> = (0..row.len()).filter(|&k| support[k] < INF).collect();
    if idx.is_empty() {
        return Ok(row.to_vec());
    }
    let weights: Vec<f64> = idx.iter().map(|&k| cost_to_prob(row[k])).collect();
    let smoothed = smooth_additive(&weights, delta)?;
    let mut out = vec![INF; row.len()];
    for (&k, p) in idx.iter().zip(smoothed) {
        out[k] = prob_to_cost(p);
    }
    Ok(out)
}

/// Smooth every row of `trained` over the arcs allowed by `topology`, and
/// every emission row over the whole alphabet.
fn smooth_model(trained: &Hmm, topology: &Hmm, delta: f64) -> Result<Hmm> {
    let n = trained.states();
    let entry = smooth_over_support(trained.entry_costs(), topology.entry_costs(), delta)?;
    let mut transitions = Vec::with_capacity(n * n);
    let mut exit = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = trained.transition_row(i).to_vec();
        row.push(trained.exit_cost(i));
        let mut support = topology.transition_row(i).to_vec();
        support.push(topology.exit_cost(i));
        let s = smooth_over_support(&row, &support, delta)?;
        transitions.extend_from_slice(&s[..n]);
        exit.push(s[n]);
    }
    let mut emissions = Vec::with_capacity(n * trained.symbol_count());
    for j in 0..n {
        let weights: Vec<f64> = trained.emission_row(j).iter().map(|&c| cost_to_prob(c)).collect();
        emissions.extend(smooth_additive(&weights, delta)?.into_iter().map(prob_to_cost));
    }
    trained.with_tables(entry, transitions, exit, emissions)
}

/// Build and train one word model.
pub fn train_word_model(
    entry: &str,
    alphabet: &Alphabet,
    error_types: ErrorTypeSet,
    keyboard: &KeyboardMap,
    params: &TrainingParams,
) -> Result<Hmm> {
    let word = format!(" {entry}");
    let topology = build_word_topology(&word, alphabet, params.bias)?;
    let types = if classify_special(entry) {
        ErrorTypeSet::special()
    } else {
        error_types
    };
    let variants = generate_error_corpus(&word, types, keyboard)?;
    let clean = alphabet.encode(&word)?;
    let mut corpus: Vec<Vec<usize>> = std::iter::repeat_n(clean, params.clean_weight).collect();
    corpus.extend(variants.iter().skip(1).filter_map(|v| alphabet.encode(v).ok()));
    let trained = baum_welch(&topology, &corpus, params.bw_iterations)?.model;
    smooth_model(&trained, &topology, params.smoothing_delta)
}

fn check_params(params: &TrainingParams) -> Result<()> {
    if params.clean_weight == 0 {
        return Err(Error::Parameter("clean weight must be at least 1".into()));
    }
    if !(params.smoothing_delta > 0.0 && params.smoothing_delta.is_finite()) {
        return Err(Error::Parameter(format!(
            "smoothing delta must be positive, got {}",
            params.smoothing_delta
        )));
    }
    Ok(())
}

/// Build the OD over an alphabet covering the vocabulary and the keyboard.
pub fn build_od(
    vocabulary: &Vocabulary,
    error_types: ErrorTypeSet,
    keyboard: &KeyboardMap,
    params: &TrainingParams,
) -> Result<OdSet> {
    let mut texts: Vec<String> = vocabulary.entries().to_vec();
    texts.push(keyboard.characters().collect());
    let alphabet = Alphabet::covering(texts.iter().map(String::as_str));
    build_od_with_alphabet(vocabulary, alphabet, error_types, keyboard, params)
}

/// Build the OD over a caller-chosen alphabet. Error variants using
/// characters outside the alphabet are left out of the training corpora.
pub fn build_od_with_alphabet(
    vocabulary: &Vocabulary,
    alphabet: Alphabet,
    error_types: ErrorTypeSet,
    keyboard: &KeyboardMap,
    params: &TrainingParams,
) -> Result<OdSet> {
    check_params(params)?;
    if error_types.is_empty() {
        return Err(Error::Parameter("at least one error type must be enabled".into()));
    }
    let models = vocabulary
        .entries()
        .par_iter()
        .map(|entry| {
            train_word_model(entry, &alphabet, error_types, keyboard, params).map_err(|e| match e {
                e @ Error::Parameter(_) => e,
                e => Error::Training {
                    word: entry.clone(),
                    source: Box::new(e),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let special = vocabulary.entries().iter().map(|e| classify_special(e)).collect();
    OdSet::new(vocabulary.clone(), alphabet, models, special)
}
