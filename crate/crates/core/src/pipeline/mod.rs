//! Batch recognition, synthetic data and cross-validated experiments.

mod grammar;
mod synth;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

pub use grammar::{car_class_inventory, generate_car_corpus, CAR_CLASSES};
pub use synth::{synthesize_corpus, SyntheticCorpus, SyntheticErrorSpec};

use crate::error::{Error, Result};
use crate::eval::{crossval_partitions, evaluate_pairs, EvaluationKey, EvaluationReport, UtterancePair};
use crate::ld::{
    baseline_ld, estimate_biclass, estimate_unigram, ClassInventory, LdKind, LinguisticDecoder, TaggedCorpus,
    DIALOGUE_SEPARATOR,
};
use crate::od::{build_od, ErrorTypeSet, KeyboardMap, OdSet, TrainingParams, Vocabulary};
use crate::token::{BeamConfig, Recognition, Recognizer};

pub const DEFAULT_BEAM: f64 = 50.0;
pub const DEFAULT_LD_DELTA: f64 = 0.1;

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Every corpus token type, plus the entries of an optional lexicon.
pub fn derive_vocabulary(corpus: &TaggedCorpus, lexicon: Option<&Vocabulary>) -> Result<Vocabulary> {
    let mut words = corpus.word_types();
    if let Some(lex) = lexicon {
        for e in lex.entries() {
            if !words.contains(e) {
                words.push(e.clone());
            }
        }
    }
    Vocabulary::new(words)
}

/// Read an utterance file: one utterance per line, `##dialogue` lines
/// between dialogues. Blank lines are ignored.
pub fn parse_dialogue_lines(text: &str) -> Vec<Vec<String>> {
    let mut dialogues = vec![Vec::new()];
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim() == DIALOGUE_SEPARATOR {
            if !dialogues.last().expect("never empty").is_empty() {
                dialogues.push(Vec::new());
            }
        } else if !line.trim().is_empty() {
            dialogues.last_mut().expect("never empty").push(line.to_string());
        }
    }
    if dialogues.last().is_some_and(Vec::is_empty) {
        dialogues.pop();
    }
    dialogues
}

pub fn dialogue_lines_to_string(dialogues: &[Vec<String>]) -> String {
    let mut out = String::new();
    for (i, d) in dialogues.iter().enumerate() {
        if i > 0 {
            out.push_str(DIALOGUE_SEPARATOR);
            out.push('\n');
        }
        for u in d {
            out.push_str(u);
            out.push('\n');
        }
    }
    out
}

/// Why an utterance was passed through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub enum PassThrough {
    NoParse { best_cost: f64, time: usize },
    Unreadable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceResult {
    pub original: String,
    pub normalized: String,
    pub pass_through: Option<PassThrough>,
}

/// Decode utterances in parallel, keeping input order. Utterances that
/// cannot be decoded are returned unchanged with the reason attached.
pub fn recognize_utterances(
    recognizer: &Recognizer<'_>,
    utterances: &[String],
    beam: BeamConfig,
) -> Vec<UtteranceResult> {
    utterances
        .par_iter()
        .map(|u| {
            let (normalized, pass_through) = match recognizer.decode(u, beam) {
                Ok(Recognition::Parsed(p)) => (recognizer.text(&p), None),
                Ok(Recognition::NoParse(np)) => (
                    u.clone(),
                    Some(PassThrough::NoParse {
                        best_cost: np.best_cost,
                        time: np.time,
                    }),
                ),
                Err(e) => (u.clone(), Some(PassThrough::Unreadable(e.to_string()))),
            };
            UtteranceResult {
                original: u.clone(),
                normalized,
                pass_through,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchOutput {
    /// One line per input line.
    pub output: String,
    pub pairs: Vec<UtterancePair>,
    /// `line<TAB>reason<TAB>detail` for every passed-through utterance.
    pub diagnostics: String,
    pub processed: usize,
}

/// Normalize every utterance line of `input`. Blank and `##dialogue`
/// lines are copied as they are.
pub fn recognize_text(recognizer: &Recognizer<'_>, input: &str, beam: BeamConfig) -> BatchOutput {
    let lines: Vec<&str> = input.lines().map(|l| l.trim_end_matches('\r')).collect();
    let is_utt = |l: &str| !l.trim().is_empty() && l.trim() != DIALOGUE_SEPARATOR;
    let utts: Vec<String> = lines.iter().filter(|l| is_utt(l)).map(|l| l.to_string()).collect();
    let results = recognize_utterances(recognizer, &utts, beam);
    let mut out = BatchOutput {
        processed: results.len(),
        ..BatchOutput::default()
    };
    let mut next = results.iter();
    for (n, line) in lines.iter().enumerate() {
        if !is_utt(line) {
            out.output.push_str(line);
            out.output.push('\n');
            continue;
        }
        let r = next.next().expect("one result per utterance line");
        out.output.push_str(&r.normalized);
        out.output.push('\n');
        out.pairs
            .push(UtterancePair::new(r.original.clone(), r.normalized.clone()));
        match &r.pass_through {
            Some(PassThrough::NoParse { best_cost, time }) => {
                let _ = writeln!(
                    out.diagnostics,
                    "{}\tno-parse\tbest_cost={best_cost} time={time}",
                    n + 1
                );
            }
            Some(PassThrough::Unreadable(msg)) => {
                let _ = writeln!(out.diagnostics, "{}\tunreadable\t{msg}", n + 1);
            }
            None => {}
        }
    }
    out
}

/// File-level batch recognition. Writes the normalized utterances to
/// `output`, the pair stream to `<output>.pairs.tsv` and the pass-through
/// diagnostics to `<output>.diag.tsv`. Returns the number of utterances.
pub fn run_recognize(
    ld: &LinguisticDecoder,
    od: &OdSet,
    beam: BeamConfig,
    input: &Path,
    output: &Path,
) -> Result<usize> {
    let text = read_file(input)?;
    let recognizer = Recognizer::new(ld, od)?;
    let out = recognize_text(&recognizer, &text, beam);
    write_file(output, &out.output)?;
    write_file(&sidecar(output, "pairs.tsv"), &crate::eval::pairs_to_string(&out.pairs))?;
    write_file(&sidecar(output, "diag.tsv"), &out.diagnostics)?;
    Ok(out.processed)
}

pub fn sidecar(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    s.into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ld_kind: LdKind,
    pub od_params: TrainingParams,
    pub error_types: ErrorTypeSet,
    /// Additive smoothing constant of the linguistic decoder.
    pub ld_delta: f64,
    pub beam: BeamConfig,
    pub folds: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ld_kind: LdKind::Baseline,
            od_params: TrainingParams::default(),
            error_types: ErrorTypeSet::standard(),
            ld_delta: DEFAULT_LD_DELTA,
            beam: BeamConfig::Width(DEFAULT_BEAM),
            folds: 5,
            seed: 0,
        }
    }
}

/// Everything an experiment runs on. `noisy` holds the typed utterances,
/// dialogue by dialogue, parallel to the clean tagged `corpus`.
pub struct ExperimentData<'a> {
    pub corpus: &'a TaggedCorpus,
    pub noisy: &'a [Vec<String>],
    pub key: &'a EvaluationKey,
    pub inventory: Option<&'a ClassInventory>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub test_dialogues: Vec<usize>,
    pub report: EvaluationReport,
    pub pairs: Vec<UtterancePair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub folds: Vec<FoldResult>,
    pub pooled: EvaluationReport,
}

pub fn estimate_ld(
    kind: LdKind,
    corpus: &TaggedCorpus,
    vocabulary: &Vocabulary,
    inventory: Option<&ClassInventory>,
    delta: f64,
) -> Result<LinguisticDecoder> {
    match kind {
        LdKind::Baseline => Ok(baseline_ld(vocabulary)),
        LdKind::Unigram => estimate_unigram(corpus, vocabulary, delta),
        LdKind::Biclass => {
            let inv = inventory.ok_or_else(|| Error::Parameter("a biclass decoder needs a class inventory".into()))?;
            estimate_biclass(corpus, vocabulary, inv, delta)
        }
    }
}

/// Cross-validated experiment with a shared, prebuilt orthographic decoder:
/// per fold, estimate the linguistic decoder on the training dialogues,
/// decode the typed test dialogues and score them against the key entries
/// of those dialogues. The pooled report scores all test outcomes at once.
pub fn run_experiment_with_od(
    config: &ExperimentConfig,
    data: &ExperimentData<'_>,
    od: &OdSet,
) -> Result<ExperimentResult> {
    if data.noisy.len() != data.corpus.dialogues.len()
        || data
            .noisy
            .iter()
            .zip(&data.corpus.dialogues)
            .any(|(n, c)| n.len() != c.utterances.len())
    {
        return Err(Error::InvalidInput(
            "typed utterances do not line up with the corpus dialogues".into(),
        ));
    }
    if config.ld_kind == LdKind::Biclass && data.inventory.is_none() {
        return Err(Error::Parameter("a biclass experiment needs a class inventory".into()));
    }
    let folds = crossval_partitions(data.corpus.dialogues.len(), config.folds, config.seed)?;
    let mut results = Vec::with_capacity(folds.len());
    let mut all_pairs = Vec::new();
    for fold in &folds {
        let train = data.corpus.subset(&fold.train);
        let ld = estimate_ld(config.ld_kind, &train, od.vocabulary(), data.inventory, config.ld_delta)?;
        let recognizer = Recognizer::new(&ld, od)?;
        let utts: Vec<String> = fold.test.iter().flat_map(|&d| data.noisy[d].iter().cloned()).collect();
        let pairs: Vec<UtterancePair> = recognize_utterances(&recognizer, &utts, config.beam)
            .into_iter()
            .map(|r| UtterancePair::new(r.original, r.normalized))
            .collect();
        let originals: std::collections::HashSet<&str> = utts.iter().map(String::as_str).collect();
        let fold_key = data.key.restrict(|o| originals.contains(o));
        results.push(FoldResult {
            test_dialogues: fold.test.clone(),
            report: evaluate_pairs(&pairs, &fold_key),
            pairs: pairs.clone(),
        });
        all_pairs.extend(pairs);
    }
    let tested: std::collections::HashSet<&str> = all_pairs.iter().map(|p| p.original.as_str()).collect();
    let pooled_key = data.key.restrict(|o| tested.contains(o));
    Ok(ExperimentResult {
        folds: results,
        pooled: evaluate_pairs(&all_pairs, &pooled_key),
    })
}

/// Build the orthographic decoder over the corpus vocabulary, then run
/// [`run_experiment_with_od`].
pub fn run_experiment(
    config: &ExperimentConfig,
    data: &ExperimentData<'_>,
    keyboard: &KeyboardMap,
) -> Result<ExperimentResult> {
    let vocab = derive_vocabulary(data.corpus, None)?;
    let od = build_od(&vocab, config.error_types, keyboard, &config.od_params)?;
    run_experiment_with_od(config, data, &od)
}
