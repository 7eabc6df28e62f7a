//! Key/outcome evaluation with recall and precision per error category,
//! and cross-validation fold construction.
//!
//! The key (set A) holds hand-made pairs of an erroneous utterance and its
//! correction. The outcome (set C) holds every produced pair that changed
//! the utterance or whose original is a key original. B is their
//! intersection. Token-level categories are derived by aligning each pair
//! and collecting its changed token groups.

mod align;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use align::{align_token_pairs, categorize, Category, TokenEdit};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UtterancePair {
    pub original: String,
    pub normalized: String,
}

impl UtterancePair {
    pub fn new(original: impl Into<String>, normalized: impl Into<String>) -> Self {
        UtterancePair {
            original: original.into(),
            normalized: normalized.into(),
        }
    }

    pub fn is_changed(&self) -> bool {
        self.original != self.normalized
    }
}

/// Parse `original<TAB>normalized` lines. Blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<UtterancePair>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| Error::data(n + 1, "expected `original<TAB>normalized`"))?;
        if b.contains('\t') {
            return Err(Error::data(n + 1, "more than two tab-separated fields"));
        }
        out.push(UtterancePair::new(a, b));
    }
    Ok(out)
}

pub fn pairs_to_string(pairs: &[UtterancePair]) -> String {
    let mut out = String::new();
    for p in pairs {
        let _ = writeln!(out, "{}\t{}", p.original, p.normalized);
    }
    out
}

/// A changed token group within one utterance pair, identified by the
/// utterance and token position so that repeats stay distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenItem {
    pub category: Category,
    pub original: String,
    pub index: usize,
    pub source: String,
    pub target: String,
}

/// Categorized token groups of a pair.
pub fn token_items(pair: &UtterancePair) -> Vec<TokenItem> {
    align_token_pairs(&pair.original, &pair.normalized)
        .iter()
        .flat_map(categorize)
        .map(|(e, category)| TokenItem {
            category,
            original: pair.original.clone(),
            index: e.index,
            source: e.source_text(),
            target: e.target_text(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvaluationKey {
    pairs: Vec<UtterancePair>,
    index: HashMap<String, usize>,
}

impl EvaluationKey {
    pub fn new(pairs: impl IntoIterator<Item = UtterancePair>) -> Result<Self> {
        let mut key = EvaluationKey::default();
        for p in pairs {
            key.insert(p).map_err(Error::InvalidInput)?;
        }
        Ok(key)
    }

    fn insert(&mut self, p: UtterancePair) -> std::result::Result<(), String> {
        if p.original.trim().is_empty() || p.normalized.trim().is_empty() {
            return Err("key pairs must be non-empty".into());
        }
        if !p.is_changed() {
            return Err(format!("key pair {:?} has no correction", p.original));
        }
        if self.index.contains_key(&p.original) {
            return Err(format!("duplicate key original {:?}", p.original));
        }
        self.index.insert(p.original.clone(), self.pairs.len());
        self.pairs.push(p);
        Ok(())
    }

    /// Key file: `original<TAB>corrected` per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut key = EvaluationKey::default();
        let mut line_of = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if !line.trim().is_empty() {
                line_of.push(n + 1);
            }
        }
        for (p, line) in parse_pairs(text)?.into_iter().zip(line_of) {
            key.insert(p).map_err(|m| Error::data(line, m))?;
        }
        Ok(key)
    }

    pub fn to_file_string(&self) -> String {
        pairs_to_string(&self.pairs)
    }

    pub fn pairs(&self) -> &[UtterancePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains_original(&self, original: &str) -> bool {
        self.index.contains_key(original)
    }

    pub fn correction(&self, original: &str) -> Option<&str> {
        self.index.get(original).map(|&i| self.pairs[i].normalized.as_str())
    }

    /// The key pairs whose originals satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> EvaluationKey {
        EvaluationKey::new(self.pairs.iter().filter(|p| keep(&p.original)).cloned())
            .expect("a subset of a valid key is valid")
    }

    pub fn token_items(&self) -> BTreeSet<TokenItem> {
        self.pairs.iter().flat_map(token_items).collect()
    }

    /// Token-level error counts per category.
    pub fn category_counts(&self) -> [(Category, usize); 3] {
        let items = self.token_items();
        Category::ALL.map(|c| (c, items.iter().filter(|i| i.category == c).count()))
    }
}

/// Pairs that changed the utterance, or whose original is a key original.
pub fn build_outcome(pairs: &[UtterancePair], key: &EvaluationKey) -> BTreeSet<UtterancePair> {
    pairs
        .iter()
        .filter(|p| p.is_changed() || key.contains_original(&p.original))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReportCategory {
    Utterances,
    Total,
    Misspellings,
    RunOns,
    Splits,
}

impl ReportCategory {
    pub const ALL: [ReportCategory; 5] = [
        ReportCategory::Utterances,
        ReportCategory::Total,
        ReportCategory::Misspellings,
        ReportCategory::RunOns,
        ReportCategory::Splits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReportCategory::Utterances => "utterances",
            ReportCategory::Total => "total",
            ReportCategory::Misspellings => "misspellings",
            ReportCategory::RunOns => "run-ons",
            ReportCategory::Splits => "splits",
        }
    }

    fn token_category(self) -> Option<Category> {
        match self {
            ReportCategory::Misspellings => Some(Category::Misspelling),
            ReportCategory::RunOns => Some(Category::RunOn),
            ReportCategory::Splits => Some(Category::Split),
            _ => None,
        }
    }
}

impl fmt::Display for ReportCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryScore {
    pub category: ReportCategory,
    pub key: usize,
    pub correct: usize,
    pub outcome: usize,
}

impl CategoryScore {
    fn new(category: ReportCategory, key: usize, correct: usize, outcome: usize) -> Self {
        CategoryScore {
            category,
            key,
            correct,
            outcome,
        }
    }

    /// `|B| / |A| · 100`, undefined for an empty key.
    pub fn recall(&self) -> Option<f64> {
        (self.key > 0).then(|| self.correct as f64 / self.key as f64 * 100.0)
    }

    /// `|B| / |C| · 100`, undefined for an empty outcome.
    pub fn precision(&self) -> Option<f64> {
        (self.outcome > 0).then(|| self.correct as f64 / self.outcome as f64 * 100.0)
    }
}

fn percent(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.0} %"))
}

fn percent_raw(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<CategoryScore>,
}

impl EvaluationReport {
    pub fn row(&self, category: ReportCategory) -> &CategoryScore {
        self.rows
            .iter()
            .find(|r| r.category == category)
            .expect("every category has a row")
    }

    /// Plain-text table: one row per category with recall and precision.
    pub fn to_table(&self, experiment: &str) -> String {
        let width = experiment.len().max("Experiment".len());
        let mut out = format!(
            "{:<width$}  {:<22}  {:>9}  {:>9}\n",
            "Experiment", "Performance categories", "Recall", "Precision"
        );
        for (i, r) in self.rows.iter().enumerate() {
            let label = if i == 0 { experiment } else { "" };
            let _ = writeln!(
                out,
                "{:<width$}  {:<22}  {:>9}  {:>9}",
                label,
                r.category.name(),
                percent(r.recall()),
                percent(r.precision())
            );
        }
        out
    }

    /// Tab-separated: category, |A|, |B|, |C|, recall, precision.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("category\tA\tB\tC\trecall\tprecision\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.category.name(),
                r.key,
                r.correct,
                r.outcome,
                percent_raw(r.recall()),
                percent_raw(r.precision())
            );
        }
        out
    }
}

/// Score an outcome against a key: `B = A ∩ C` by exact equality of both
/// pair elements, at utterance level and per token category.
pub fn score(outcome: &BTreeSet<UtterancePair>, key: &EvaluationKey) -> EvaluationReport {
    let key_pairs: BTreeSet<&UtterancePair> = key.pairs().iter().collect();
    let utt_b = outcome.iter().filter(|p| key_pairs.contains(p)).count();

    let a_items = key.token_items();
    let c_items: BTreeSet<TokenItem> = outcome.iter().flat_map(token_items).collect();
    let count = |set: &BTreeSet<TokenItem>, c: Option<Category>| {
        set.iter().filter(|i| c.is_none_or(|c| i.category == c)).count()
    };

    let rows = ReportCategory::ALL
        .iter()
        .map(|&rc| match rc {
            ReportCategory::Utterances => CategoryScore::new(rc, key.len(), utt_b, outcome.len()),
            _ => {
                let c = rc.token_category();
                let b = a_items
                    .iter()
                    .filter(|i| c.is_none_or(|c| i.category == c) && c_items.contains(*i))
                    .count();
                CategoryScore::new(rc, count(&a_items, c), b, count(&c_items, c))
            }
        })
        .collect();
    EvaluationReport { rows }
}

/// Outcome construction followed by scoring.
pub fn evaluate_pairs(pairs: &[UtterancePair], key: &EvaluationKey) -> EvaluationReport {
    score(&build_outcome(pairs, key), key)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffle `count` items with `seed` and cut them into `parts` nearly equal
/// parts (the first `count % parts` one larger). Each fold holds out one
/// part for testing and trains on the rest.
pub fn crossval_partitions(count: usize, parts: usize, seed: u64) -> Result<Vec<Fold>> {
    if parts < 2 {
        return Err(Error::Parameter(format!("need at least 2 folds, got {parts}")));
    }
    if parts > count {
        return Err(Error::Parameter(format!("{parts} folds for only {count} dialogues")));
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (count / parts, count % parts);
    let mut groups = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        let mut g = order[start..start + len].to_vec();
        g.sort_unstable();
        groups.push(g);
        start += len;
    }
    Ok((0..parts)
        .map(|p| {
            let mut train: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .flat_map(|(_, g)| g.iter().copied())
                .collect();
            train.sort_unstable();
            Fold {
                train,
                test: groups[p].clone(),
            }
        })
        .collect())
}
