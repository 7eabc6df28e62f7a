use rayon::prelude::*;

use super::{step_model, OdActivation, Token};
use crate::error::{Error, Result};
use crate::hmm::{Cost, Hmm};
use crate::od::OdSet;

/// Exit cost of one word model after consuming `symbols` from a start token.
pub fn isolated_cost(hmm: &Hmm, symbols: &[usize]) -> Cost {
    let mut act = OdActivation::new(0, hmm);
    act.offer_entry(Token::START);
    for &s in symbols {
        step_model(&mut act, hmm, s);
    }
    act.exit().cost
}

/// Score `input` as a single word against every model. Returns the words
/// with a finite cost, cheapest first, ties in vocabulary order.
pub fn recognize_isolated(od: &OdSet, input: &str) -> Result<Vec<(usize, Cost)>> {
    if od.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let symbols = od.encode_utterance(input)?;
    let mut ranked: Vec<(usize, Cost)> = od
        .models()
        .par_iter()
        .enumerate()
        .map(|(k, m)| (k, isolated_cost(m, &symbols)))
        .filter(|(_, c)| c.is_finite())
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}
