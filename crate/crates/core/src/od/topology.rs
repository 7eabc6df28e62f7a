use crate::error::{Error, Result};
use crate::hmm::{Alphabet, Hmm};

/// Left-to-right word model for a space-prefixed word string.
///
/// One emitting state per character, each emitting its own character with
/// probability `bias` and spreading the rest evenly over the alphabet.
/// Arcs: self-loop (insertions), next state (match), skip one state
/// (deletion). The entry reaches the first two states so a missing leading
/// space is tolerated; the exit is reachable from the last two states. Every
/// row starts uniform over its allowed targets.
pub fn build_word_topology(word: &str, alphabet: &Alphabet, bias: f64) -> Result<Hmm> {
    let m = alphabet.len();
    if !(bias > 1.0 / m as f64 && bias < 1.0) {
        return Err(Error::Parameter(format!("emission bias {bias} must lie in (1/{m}, 1)")));
    }
    if !word.starts_with(' ') {
        return Err(Error::InvalidInput(format!(
            "word string {word:?} must start with a space"
        )));
    }
    let symbols = alphabet.encode(word)?;
    let n = symbols.len();

    let uniform = |k: usize| 1.0 / k as f64;
    let mut entry = vec![0.0; n];
    let entry_targets = n.min(2);
    for p in entry.iter_mut().take(entry_targets) {
        *p = uniform(entry_targets);
    }

    let mut transitions = vec![0.0; n * n];
    let mut exit = vec![0.0; n];
    for i in 0..n {
        let targets: Vec<usize> = (i..n.min(i + 3)).collect();
        let exits = i + 2 >= n;
        let k = targets.len() + usize::from(exits);
        for j in targets {
            transitions[i * n + j] = uniform(k);
        }
        if exits {
            exit[i] = uniform(k);
        }
    }

    let rest = (1.0 - bias) / (m - 1) as f64;
    let mut emissions = vec![rest; n * m];
    for (j, &s) in symbols.iter().enumerate() {
        emissions[j * m + s] = bias;
    }
    Hmm::from_probs(n, m, &entry, &transitions, &exit, &emissions, true)
}
