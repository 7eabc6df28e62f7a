//! Seeded typing-error synthesis over a clean corpus.

use std::collections::HashSet;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{Category, EvaluationKey, UtterancePair};
use crate::ld::TaggedCorpus;
use crate::od::KeyboardMap;

/// Redraws allowed when a corrupted utterance collides with a clean
/// utterance or an earlier key original.
const MAX_REDRAWS: usize = 20;

/// Error rates. Substitution, deletion and space insertion are drawn per
/// character; insertion, transposition and double stroke per word.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticErrorSpec {
    pub substitution: f64,
    pub deletion: f64,
    pub space_insertion: f64,
    pub insertion: f64,
    pub transposition: f64,
    pub double_stroke: f64,
    pub seed: u64,
}

impl Default for SyntheticErrorSpec {
    /// About one erroneous utterance in five for utterances of 20 to 30
    /// characters, using substitution, deletion and space insertion.
    fn default() -> Self {
        SyntheticErrorSpec {
            substitution: 0.004,
            deletion: 0.003,
            space_insertion: 0.002,
            insertion: 0.0,
            transposition: 0.0,
            double_stroke: 0.0,
            seed: 0,
        }
    }
}

impl SyntheticErrorSpec {
    pub fn none(seed: u64) -> Self {
        SyntheticErrorSpec {
            substitution: 0.0,
            deletion: 0.0,
            space_insertion: 0.0,
            insertion: 0.0,
            transposition: 0.0,
            double_stroke: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("substitution", self.substitution),
            ("deletion", self.deletion),
            ("space insertion", self.space_insertion),
            ("insertion", self.insertion),
            ("transposition", self.transposition),
            ("double stroke", self.double_stroke),
        ];
        for (name, r) in rates {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Parameter(format!("{name} rate {r} is outside [0, 1)")));
            }
        }
        if self.substitution + self.deletion >= 1.0 {
            return Err(Error::Parameter(
                "substitution and deletion rates must sum below 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    /// Typed utterances, by dialogue, parallel to the clean corpus.
    pub noisy: Vec<Vec<String>>,
    pub key: EvaluationKey,
}

impl SyntheticCorpus {
    pub fn category_counts(&self) -> [(Category, usize); 3] {
        self.key.category_counts()
    }
}

struct Corrupter<'a> {
    spec: &'a SyntheticErrorSpec,
    keyboard: &'a KeyboardMap,
    rng: ChaCha8Rng,
}

impl Corrupter<'_> {
    fn neighbour(&mut self, c: char) -> Option<char> {
        self.keyboard.neighbours(c).choose(&mut self.rng)
    }

    fn word(&mut self, word: &str) -> String {
        let chars: Vec<char> = word.chars().collect();
        let len = chars.len();
        let mut out: Vec<char> = Vec::with_capacity(len + 2);
        for (p, &c) in chars.iter().enumerate() {
            let r: f64 = self.rng.gen();
            if r < self.spec.substitution {
                out.push(self.neighbour(c).unwrap_or(c));
            } else if r < self.spec.substitution + self.spec.deletion && len > 1 {
                // a one-character word is never deleted outright
            } else {
                out.push(c);
            }
            if p + 1 < len && self.rng.gen_bool(self.spec.space_insertion) {
                out.push(' ');
            }
        }
        // a deletion next to an inserted space must not leave it dangling
        let joined: String = out.into_iter().collect();
        let mut out: Vec<char> = joined
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .chars()
            .collect();
        let letters: Vec<usize> = (0..out.len()).filter(|&i| out[i] != ' ').collect();
        if !letters.is_empty() && self.rng.gen_bool(self.spec.insertion) {
            let i = letters[self.rng.gen_range(0..letters.len())];
            if let Some(n) = self.neighbour(out[i]) {
                let at = if self.rng.gen_bool(0.5) { i } else { i + 1 };
                out.insert(at, n);
            }
        }
        if out.len() > 1 && self.rng.gen_bool(self.spec.transposition) {
            let i = self.rng.gen_range(0..out.len() - 1);
            if out[i] != ' ' && out[i + 1] != ' ' {
                out.swap(i, i + 1);
            }
        }
        if !out.is_empty() && self.rng.gen_bool(self.spec.double_stroke) {
            let i = self.rng.gen_range(0..out.len());
            if out[i] != ' ' {
                out.insert(i, out[i]);
            }
        }
        out.into_iter().collect()
    }

    /// Corrupt an utterance of single-space-separated words. A separating
    /// space is dropped at the deletion rate, producing a run-on.
    fn utterance(&mut self, text: &str) -> String {
        let mut out = String::with_capacity(text.len() + 4);
        for (i, w) in text.split(' ').enumerate() {
            if i > 0 {
                let r: f64 = self.rng.gen();
                let dropped = r >= self.spec.substitution && r < self.spec.substitution + self.spec.deletion;
                if !dropped {
                    out.push(' ');
                }
            }
            out.push_str(&self.word(w));
        }
        out
    }
}

/// Corrupt every utterance of `clean` with seeded random typing errors.
/// Each corrupted utterance becomes a key pair (typed, clean). A corruption
/// that reproduces some clean utterance or an earlier key original is
/// redrawn; after repeated collisions the utterance is left clean.
pub fn synthesize_corpus(
    clean: &TaggedCorpus,
    spec: &SyntheticErrorSpec,
    keyboard: &KeyboardMap,
) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let clean_texts: HashSet<String> = clean.utterances().map(TaggedCorpus::text).collect();
    let mut corrupter = Corrupter {
        spec,
        keyboard,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };
    let mut taken: HashSet<String> = HashSet::new();
    let mut pairs = Vec::new();
    let mut noisy = Vec::with_capacity(clean.dialogues.len());
    for dialogue in &clean.dialogues {
        let mut lines = Vec::with_capacity(dialogue.utterances.len());
        for utt in &dialogue.utterances {
            let text = TaggedCorpus::text(utt);
            let mut typed = text.clone();
            for _ in 0..MAX_REDRAWS {
                let candidate = corrupter.utterance(&text);
                if candidate == text {
                    break;
                }
                let candidate_trimmed = candidate.trim();
                if candidate_trimmed.is_empty()
                    || candidate_trimmed != candidate
                    || clean_texts.contains(&candidate)
                    || taken.contains(&candidate)
                {
                    continue;
                }
                typed = candidate;
                break;
            }
            if typed != text {
                taken.insert(typed.clone());
                pairs.push(UtterancePair::new(typed.clone(), text));
            }
            lines.push(typed);
        }
        noisy.push(lines);
    }
    Ok(SyntheticCorpus {
        noisy,
        key: EvaluationKey::new(pairs)?,
    })
}
