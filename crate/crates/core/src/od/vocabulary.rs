use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordered, unique list of word entries. An entry may span several
/// whitespace tokens (`saab 900`); its model string is the entry with one
/// leading space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashMap<String, usize>,
    longest: usize,
}

/// Collapse runs of whitespace to single spaces and trim the ends.
pub fn canonical_spacing(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl Vocabulary {
    pub fn new<S: AsRef<str>>(entries: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        let mut longest = 0;
        for e in entries {
            let raw = e.as_ref();
            if raw.contains(['\n', '\t']) {
                return Err(Error::InvalidInput(format!(
                    "vocabulary entry {raw:?} contains a tab or newline"
                )));
            }
            let entry = canonical_spacing(raw);
            if entry.is_empty() {
                return Err(Error::InvalidInput("vocabulary entries cannot be blank".into()));
            }
            if index.insert(entry.clone(), out.len()).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vocabulary entry {entry:?}")));
            }
            longest = longest.max(entry.split(' ').count());
            out.push(entry);
        }
        if out.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(Vocabulary {
            entries: out,
            index,
            longest,
        })
    }

    /// Vocabulary file: one entry per line, `#` starts a comment line, a
    /// literal leading `#` is written `\#`. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let line = line.strip_prefix('\\').filter(|l| l.starts_with('#')).unwrap_or(line);
            if line.contains('\t') {
                return Err(Error::data(n + 1, "vocabulary entries cannot contain tabs"));
            }
            entries.push(line.to_string());
        }
        Vocabulary::new(entries)
    }

    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            if e.starts_with('#') {
                s.push('\\');
            }
            s.push_str(e);
            s.push('\n');
        }
        s
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &str {
        &self.entries[id]
    }

    pub fn id_of(&self, entry: &str) -> Option<usize> {
        self.index.get(entry).copied()
    }

    /// The entry prefixed with the canonical leading space.
    pub fn model_string(&self, id: usize) -> String {
        format!(" {}", self.entries[id])
    }

    /// Greedy longest-first matching of whitespace tokens against entries.
    /// Tokens that start no entry come back as `Err(token)`.
    pub fn match_tokens<'a>(&self, tokens: &[&'a str]) -> Vec<std::result::Result<usize, &'a str>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let max = self.longest.min(tokens.len() - i);
            let hit = (1..=max).rev().find_map(|n| {
                let cand = tokens[i..i + n].join(" ");
                self.id_of(&cand).map(|id| (id, n))
            });
            match hit {
                Some((id, n)) => {
                    out.push(Ok(id));
                    i += n;
                }
                None => {
                    out.push(Err(tokens[i]));
                    i += 1;
                }
            }
        }
        out
    }
}
