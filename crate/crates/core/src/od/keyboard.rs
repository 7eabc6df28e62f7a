use std::collections::HashMap;

use crate::error::{Error, Result};

const QWERTY_ROWS: [&str; 4] = ["1234567890-=", "qwertyuiop[]", "asdfghjkl;'", "zxcvbnm,./"];

/// Left and right keyboard neighbours per character.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyboardMap {
    neighbours: HashMap<char, (Option<char>, Option<char>)>,
}

impl KeyboardMap {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a map where each row's characters neighbour their left and right
    /// row-mates.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Self {
        let mut neighbours = HashMap::new();
        for row in rows {
            let keys: Vec<char> = row.as_ref().chars().collect();
            for (i, &c) in keys.iter().enumerate() {
                let left = i.checked_sub(1).map(|j| keys[j]);
                let right = keys.get(i + 1).copied();
                neighbours.insert(c, (left, right));
            }
        }
        KeyboardMap { neighbours }
    }

    pub fn qwerty() -> Self {
        Self::from_rows(&QWERTY_ROWS)
    }

    pub fn set(&mut self, c: char, left: Option<char>, right: Option<char>) {
        self.neighbours.insert(c, (left, right));
    }

    /// Left neighbour first, then right.
    pub fn neighbours(&self, c: char) -> impl Iterator<Item = char> + '_ {
        let (l, r) = self.neighbours.get(&c).copied().unwrap_or((None, None));
        l.into_iter().chain(r)
    }

    pub fn characters(&self) -> impl Iterator<Item = char> + '_ {
        self.neighbours
            .iter()
            .flat_map(|(&c, &(l, r))| std::iter::once(c).chain(l).chain(r))
    }

    /// Keyboard file: `<char> <left-or-'-'> <right-or-'-'>` per line. `\s`
    /// stands for space, `\\` for backslash and `\-` for a literal dash in a
    /// neighbour column. `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = KeyboardMap::empty();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [key, left, right] = fields.as_slice() else {
                return Err(Error::data(n + 1, "expected `<char> <left> <right>`"));
            };
            let key = parse_key(key, false).map_err(|e| Error::data(n + 1, e))?;
            let left = parse_key(left, true).map_err(|e| Error::data(n + 1, e))?;
            let right = parse_key(right, true).map_err(|e| Error::data(n + 1, e))?;
            map.set(key.expect("key column is never empty"), left, right);
        }
        Ok(map)
    }
}

fn parse_key(field: &str, dash_is_none: bool) -> std::result::Result<Option<char>, String> {
    match field {
        "-" if dash_is_none => Ok(None),
        "\\s" => Ok(Some(' ')),
        "\\\\" => Ok(Some('\\')),
        "\\-" => Ok(Some('-')),
        f => {
            let mut cs = f.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(Some(c)),
                _ => Err(format!("{f:?} is not a single character")),
            }
        }
    }
}
