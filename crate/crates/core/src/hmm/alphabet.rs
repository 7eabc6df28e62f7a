use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordered set of characters observable by the word models.
///
/// The space character is an ordinary member; word models rely on it for
/// their leading-space state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: HashMap<char, usize>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Parameter("alphabet must not be empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if c == '\n' {
                return Err(Error::Parameter("newline cannot be an alphabet symbol".into()));
            }
            if index.insert(c, i).is_some() {
                return Err(Error::Parameter(format!("duplicate alphabet symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Sorted, de-duplicated alphabet over every character of `texts`, always
    /// including the space character.
    pub fn covering<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut chars: Vec<char> = texts
            .into_iter()
            .flat_map(|t| t.chars())
            .filter(|&c| c != '\n')
            .chain(std::iter::once(' '))
            .collect();
        chars.sort_unstable();
        chars.dedup();
        Alphabet::new(chars).expect("covering alphabet is non-empty and unique")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> char {
        self.symbols[i]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    /// Map a string onto symbol indices, rejecting characters outside the
    /// alphabet.
    pub fn encode(&self, text: &str) -> Result<Vec<usize>> {
        text.chars()
            .enumerate()
            .map(|(position, c)| {
                self.index_of(c).ok_or(Error::UnknownSymbol {
                    symbol: c.to_string(),
                    position,
                })
            })
            .collect()
    }

    pub fn decode(&self, indices: &[usize]) -> String {
        indices.iter().map(|&i| self.symbols[i]).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.symbols.iter().map(|c| c.to_string()).collect()
    }
}
