use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::od::canonical_spacing;

pub const DIALOGUE_SEPARATOR: &str = "##dialogue";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub word: String,
    pub class: Option<String>,
    /// 1-based source line, 0 when built in memory.
    pub line: usize,
}

impl TaggedToken {
    pub fn new(word: impl AsRef<str>, class: Option<&str>) -> Self {
        TaggedToken {
            word: canonical_spacing(word.as_ref()),
            class: class.map(str::to_string),
            line: 0,
        }
    }
}

pub type Utterance = Vec<TaggedToken>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dialogue {
    pub utterances: Vec<Utterance>,
}

/// Dialogues of utterances of (word, optional class) tokens.
///
/// File format: one token per line as `<token>\t<class>` (or just `<token>`
/// for untagged corpora), a blank line between utterances and a
/// `##dialogue` line between dialogues.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TaggedCorpus {
    pub dialogues: Vec<Dialogue>,
}

impl TaggedCorpus {
    pub fn new(dialogues: Vec<Dialogue>) -> Self {
        TaggedCorpus { dialogues }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut dialogues = Vec::new();
        let mut dialogue = Dialogue::default();
        let mut utterance = Utterance::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim() == DIALOGUE_SEPARATOR {
                if !utterance.is_empty() {
                    dialogue.utterances.push(std::mem::take(&mut utterance));
                }
                if !dialogue.utterances.is_empty() {
                    dialogues.push(std::mem::take(&mut dialogue));
                }
                continue;
            }
            if line.trim().is_empty() {
                if !utterance.is_empty() {
                    dialogue.utterances.push(std::mem::take(&mut utterance));
                }
                continue;
            }
            let mut parts = line.split('\t');
            let word = canonical_spacing(parts.next().unwrap_or(""));
            let class = parts.next().map(|c| c.trim().to_string());
            if parts.next().is_some() {
                return Err(Error::data(n + 1, "expected `<token>` or `<token>\\t<class>`"));
            }
            if word.is_empty() {
                return Err(Error::data(n + 1, "empty word token"));
            }
            if matches!(&class, Some(c) if c.is_empty()) {
                return Err(Error::data(n + 1, "empty class tag"));
            }
            utterance.push(TaggedToken {
                word,
                class,
                line: n + 1,
            });
        }
        if !utterance.is_empty() {
            dialogue.utterances.push(utterance);
        }
        if !dialogue.utterances.is_empty() {
            dialogues.push(dialogue);
        }
        Ok(TaggedCorpus { dialogues })
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (d, dialogue) in self.dialogues.iter().enumerate() {
            if d > 0 {
                out.push_str(DIALOGUE_SEPARATOR);
                out.push('\n');
            }
            for (u, utt) in dialogue.utterances.iter().enumerate() {
                if u > 0 {
                    out.push('\n');
                }
                for tok in utt {
                    out.push_str(&tok.word);
                    if let Some(c) = &tok.class {
                        out.push('\t');
                        out.push_str(c);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.dialogues.iter().flat_map(|d| d.utterances.iter())
    }

    pub fn utterance_count(&self) -> usize {
        self.dialogues.iter().map(|d| d.utterances.len()).sum()
    }

    pub fn token_count(&self) -> usize {
        self.utterances().map(Vec::len).sum()
    }

    /// Space-joined text of an utterance.
    pub fn text(utterance: &Utterance) -> String {
        utterance.iter().map(|t| t.word.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Word types in order of first appearance.
    pub fn word_types(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.utterances()
            .flatten()
            .filter(|t| seen.insert(t.word.clone()))
            .map(|t| t.word.clone())
            .collect()
    }

    /// Class tags in order of first appearance.
    pub fn class_tags(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.utterances()
            .flatten()
            .filter_map(|t| t.class.clone())
            .filter(|c| seen.insert(c.clone()))
            .collect()
    }

    /// The corpus restricted to the given dialogues, in the given order.
    pub fn subset(&self, dialogues: &[usize]) -> TaggedCorpus {
        TaggedCorpus {
            dialogues: dialogues.iter().map(|&d| self.dialogues[d].clone()).collect(),
        }
    }
}

/// Ordered set of class identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInventory {
    classes: Vec<String>,
    index: HashMap<String, usize>,
}

impl ClassInventory {
    pub fn new<S: AsRef<str>>(classes: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for c in classes {
            let c = c.as_ref().trim().to_string();
            if c.is_empty() || c.contains(char::is_whitespace) {
                return Err(Error::InvalidInput(format!("bad class identifier {c:?}")));
            }
            if index.insert(c.clone(), list.len()).is_some() {
                return Err(Error::InvalidInput(format!("duplicate class {c:?}")));
            }
            list.push(c);
        }
        if list.is_empty() {
            return Err(Error::Parameter("class inventory is empty".into()));
        }
        Ok(ClassInventory { classes: list, index })
    }

    /// One class per line; blank and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        ClassInventory::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn index_of(&self, class: &str) -> Option<usize> {
        self.index.get(class).copied()
    }
}
