//! Token-level alignment of an utterance with its correction.

use std::fmt;

use strsim::levenshtein;

/// One aligned group of original tokens and the tokens replacing them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenEdit {
    /// Position of the first source token in the original utterance.
    pub index: usize,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl TokenEdit {
    pub fn source_text(&self) -> String {
        self.source.join(" ")
    }

    pub fn target_text(&self) -> String {
        self.target.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Misspelling,
    RunOn,
    Split,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Misspelling, Category::RunOn, Category::Split];

    /// Category of a 1→1, 1→n or n→1 edit; `None` for m→n.
    pub fn of(edit: &TokenEdit) -> Option<Category> {
        match (edit.source.len(), edit.target.len()) {
            (1, 1) => Some(Category::Misspelling),
            (1, _) => Some(Category::RunOn),
            (_, 1) => Some(Category::Split),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Misspelling => "misspellings",
            Category::RunOn => "run-ons",
            Category::Split => "splits",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Score of a partial alignment, compared lexicographically: edit cost,
/// then multi-token groups, then groups.
type Score = (usize, usize, usize);

fn block_cost(source: &[&str], target: &[&str]) -> usize {
    levenshtein(&source.join(" "), &target.join(" ")) + (source.len() - 1) + (target.len() - 1)
}

/// Minimal-edit alignment of `source` onto `target` using 1→1, 1→n and
/// n→1 groups.
fn align(source: &[&str], target: &[&str], offset: usize) -> Vec<TokenEdit> {
    let (n, m) = (source.len(), target.len());
    let mut best: Vec<Option<(Score, usize, usize)>> = vec![None; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    best[at(0, 0)] = Some(((0, 0, 0), 0, 0));
    for i in 0..=n {
        for j in 0..=m {
            let Some((score, _, _)) = best[at(i, j)] else { continue };
            for p in 1..=n - i {
                for q in 1..=m - j {
                    if p > 1 && q > 1 {
                        break;
                    }
                    let (s, t) = (&source[i..i + p], &target[j..j + q]);
                    let identical = p == 1 && q == 1 && s[0] == t[0];
                    let cost = if identical { 0 } else { block_cost(s, t) };
                    let next = (
                        score.0 + cost,
                        score.1 + usize::from(p > 1 || q > 1),
                        score.2 + usize::from(!identical),
                    );
                    let slot = &mut best[at(i + p, j + q)];
                    if slot.is_none_or(|(old, _, _)| next < old) {
                        *slot = Some((next, p, q));
                    }
                }
            }
        }
    }
    let mut edits = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let (_, p, q) = best[at(i, j)].expect("every cell with a predecessor is reachable");
        let (s, t) = (&source[i - p..i], &target[j - q..j]);
        if !(p == 1 && q == 1 && s[0] == t[0]) {
            edits.push(TokenEdit {
                index: offset + i - p,
                source: s.iter().map(|x| x.to_string()).collect(),
                target: t.iter().map(|x| x.to_string()).collect(),
            });
        }
        i -= p;
        j -= q;
    }
    edits.reverse();
    edits
}

/// Align the whitespace tokens of an utterance and its correction. Each
/// returned edit is a changed group; identical tokens are left out. Among
/// equally cheap alignments the one with fewer multi-token groups, then
/// fewer groups, then the leftmost grouping wins.
pub fn align_token_pairs(original: &str, normalized: &str) -> Vec<TokenEdit> {
    let s: Vec<&str> = original.split_whitespace().collect();
    let t: Vec<&str> = normalized.split_whitespace().collect();
    if s.is_empty() || t.is_empty() {
        if s == t {
            return Vec::new();
        }
        return vec![TokenEdit {
            index: 0,
            source: s.iter().map(|x| x.to_string()).collect(),
            target: t.iter().map(|x| x.to_string()).collect(),
        }];
    }
    align(&s, &t, 0)
}

/// Categorize an edit. An m→n group (both sides longer than one token) is
/// first re-aligned into 1→1, 1→n and n→1 pieces by character edit cost.
pub fn categorize(edit: &TokenEdit) -> Vec<(TokenEdit, Category)> {
    if let Some(c) = Category::of(edit) {
        return vec![(edit.clone(), c)];
    }
    if edit.source.is_empty() || edit.target.is_empty() {
        return Vec::new();
    }
    let s: Vec<&str> = edit.source.iter().map(String::as_str).collect();
    let t: Vec<&str> = edit.target.iter().map(String::as_str).collect();
    align(&s, &t, edit.index)
        .into_iter()
        .filter_map(|e| Category::of(&e).map(|c| (e, c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edit(index: usize, s: &str, t: &str) -> TokenEdit {
        TokenEdit {
            index,
            source: s.split(' ').map(str::to_string).collect(),
            target: t.split(' ').map(str::to_string).collect(),
        }
    }

    #[test]
    fn misspelling_and_run_on() {
        let e = align_token_pairs("rust protetion forthese", "rust protection for these");
        assert_eq!(
            e,
            vec![edit(1, "protetion", "protection"), edit(2, "forthese", "for these")]
        );
        assert_eq!(Category::of(&e[0]), Some(Category::Misspelling));
        assert_eq!(Category::of(&e[1]), Some(Category::RunOn));
    }

    #[test]
    fn three_way_split() {
        let e = align_token_pairs("a coup é space b", "a coupé-space b");
        assert_eq!(e, vec![edit(1, "coup é space", "coupé-space")]);
        assert_eq!(Category::of(&e[0]), Some(Category::Split));
        let e = align_token_pairs("for these", "forthese");
        assert_eq!(Category::of(&e[0]), Some(Category::Split));
    }

    #[test]
    fn identical_is_empty() {
        assert!(align_token_pairs("show all cars", "show all cars").is_empty());
        assert!(align_token_pairs("show  all", "show all").is_empty());
    }

    #[test]
    fn prefers_one_to_one_on_cost_ties() {
        let e = align_token_pairs("ab cd", "ab ce");
        assert_eq!(e, vec![edit(1, "cd", "ce")]);
    }

    #[test]
    fn many_to_many_is_decomposed() {
        let pieces = categorize(&edit(3, "ab cd", "a bc d"));
        let cats: Vec<Category> = pieces.iter().map(|p| p.1).collect();
        assert_eq!(pieces.len(), 2);
        assert!(cats.contains(&Category::RunOn));
        assert!(pieces.iter().all(|(e, _)| e.index >= 3));
        let covered: usize = pieces.iter().map(|(e, _)| e.source.len()).sum();
        assert_eq!(covered, 2);
    }
}
