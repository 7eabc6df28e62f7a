//! Synthetic error corpora for word-model training.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::keyboard::KeyboardMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorType {
    Substitution,
    Deletion,
    Insertion,
    Transposition,
    WhiteSpaceInsertion,
    DoubleStroke,
}

impl ErrorType {
    /// Generation order within a character position.
    pub const ALL: [ErrorType; 6] = [
        ErrorType::Substitution,
        ErrorType::Deletion,
        ErrorType::Insertion,
        ErrorType::Transposition,
        ErrorType::WhiteSpaceInsertion,
        ErrorType::DoubleStroke,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorType::Substitution => "substitution",
            ErrorType::Deletion => "deletion",
            ErrorType::Insertion => "insertion",
            ErrorType::Transposition => "transposition",
            ErrorType::WhiteSpaceInsertion => "white-space-insertion",
            ErrorType::DoubleStroke => "double-stroke",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErrorType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown error type {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorTypeSet {
    bits: u8,
}

impl ErrorTypeSet {
    pub const NONE: ErrorTypeSet = ErrorTypeSet { bits: 0 };

    pub fn of(types: &[ErrorType]) -> Self {
        types.iter().fold(Self::NONE, |s, &t| s.with(t))
    }

    /// Substitution, deletion and white-space insertion.
    pub fn standard() -> Self {
        Self::of(&[
            ErrorType::Substitution,
            ErrorType::Deletion,
            ErrorType::WhiteSpaceInsertion,
        ])
    }

    /// White-space insertion only, used for single characters and numbers.
    pub fn special() -> Self {
        Self::of(&[ErrorType::WhiteSpaceInsertion])
    }

    pub fn all() -> Self {
        Self::of(&ErrorType::ALL)
    }

    pub fn with(self, t: ErrorType) -> Self {
        ErrorTypeSet {
            bits: self.bits | (1 << t as u8),
        }
    }

    pub fn contains(self, t: ErrorType) -> bool {
        self.bits & (1 << t as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ErrorType> {
        ErrorType::ALL.into_iter().filter(move |&t| self.contains(t))
    }
}

/// The clean word string followed by every single-edit variant, position by
/// position and, within a position, in [`ErrorType::ALL`] order. Duplicates
/// keep their first occurrence.
///
/// White-space insertion only puts a space between two characters of the
/// word proper, never next to the leading space or after the last character.
pub fn generate_error_corpus(word: &str, types: ErrorTypeSet, keyboard: &KeyboardMap) -> Result<Vec<String>> {
    if types.is_empty() {
        return Err(Error::Parameter("at least one error type must be enabled".into()));
    }
    let chars: Vec<char> = word.chars().collect();
    let len = chars.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |s: Vec<char>| {
        if s.is_empty() {
            return;
        }
        let s: String = s.into_iter().collect();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    };
    push(chars.clone());

    let edit = |f: &dyn Fn(&mut Vec<char>)| {
        let mut v = chars.clone();
        f(&mut v);
        v
    };
    for p in 0..len {
        for t in types.iter() {
            match t {
                ErrorType::Substitution => {
                    for n in keyboard.neighbours(chars[p]) {
                        push(edit(&|v| v[p] = n));
                    }
                }
                ErrorType::Deletion => push(edit(&|v| {
                    v.remove(p);
                })),
                ErrorType::Insertion => {
                    for n in keyboard.neighbours(chars[p]) {
                        push(edit(&|v| v.insert(p, n)));
                        push(edit(&|v| v.insert(p + 1, n)));
                    }
                }
                ErrorType::Transposition => {
                    if p + 1 < len {
                        push(edit(&|v| v.swap(p, p + 1)));
                    }
                }
                ErrorType::WhiteSpaceInsertion => {
                    if p >= 1 && p + 1 < len {
                        push(edit(&|v| v.insert(p + 1, ' ')));
                    }
                }
                ErrorType::DoubleStroke => push(edit(&|v| v.insert(p, chars[p]))),
            }
        }
    }
    Ok(out)
}
