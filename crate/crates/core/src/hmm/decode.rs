use super::{Cost, Hmm, INF};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiResult {
    pub cost: Cost,
    /// Emitting state per input symbol; empty when no finite-cost path exists.
    pub path: Vec<usize>,
}

pub(crate) fn validate(hmm: &Hmm, sequence: &[usize]) -> Result<()> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("sequence must contain at least one symbol".into()));
    }
    for (position, &s) in sequence.iter().enumerate() {
        if s >= hmm.symbol_count() {
            return Err(Error::UnknownSymbol {
                symbol: format!("#{s}"),
                position,
            });
        }
    }
    Ok(())
}

/// Minimum-cost entry → states → exit alignment of `sequence`.
///
/// The cost is accumulated time-synchronously, in the same order the token
/// passer uses, so the two agree bit for bit. Among equally cheap paths the
/// lexicographically smallest state sequence is returned.
pub fn viterbi(hmm: &Hmm, sequence: &[usize]) -> Result<ViterbiResult> {
    validate(hmm, sequence)?;
    let n = hmm.states();
    let t_len = sequence.len();

    let mut delta: Vec<Cost> = (0..n)
        .map(|j| hmm.entry_cost(j) + hmm.emission_cost(j, sequence[0]))
        .collect();
    let mut next = vec![INF; n];
    for &sym in &sequence[1..] {
        next.iter_mut().for_each(|c| *c = INF);
        for (i, &d) in delta.iter().enumerate() {
            if d == INF {
                continue;
            }
            for &(j, a) in hmm.successors(i) {
                let c = d + a;
                if c < next[j] {
                    next[j] = c;
                }
            }
        }
        for (j, c) in next.iter_mut().enumerate() {
            *c += hmm.emission_cost(j, sym);
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let cost = delta
        .iter()
        .zip(hmm.exit_costs())
        .map(|(&d, &e)| d + e)
        .fold(INF, f64::min);
    if cost == INF {
        return Ok(ViterbiResult {
            cost: INF,
            path: Vec::new(),
        });
    }

    // Cost-to-go table, then a forward greedy walk picking the smallest
    // state index among the minimizers at every step.
    let mut beta = vec![INF; t_len * n];
    beta[(t_len - 1) * n..].copy_from_slice(hmm.exit_costs());
    for t in (0..t_len - 1).rev() {
        let sym = sequence[t + 1];
        for i in 0..n {
            let mut best = INF;
            for &(j, a) in hmm.successors(i) {
                let c = a + hmm.emission_cost(j, sym) + beta[(t + 1) * n + j];
                if c < best {
                    best = c;
                }
            }
            beta[t * n + i] = best;
        }
    }
    let argmin = |cands: &mut dyn Iterator<Item = (usize, Cost)>| {
        let mut best = (usize::MAX, INF);
        for (j, c) in cands {
            if c < best.1 {
                best = (j, c);
            }
        }
        best.0
    };
    let mut path = Vec::with_capacity(t_len);
    let first = argmin(&mut (0..n).map(|j| (j, hmm.entry_cost(j) + hmm.emission_cost(j, sequence[0]) + beta[j])));
    path.push(first);
    for t in 1..t_len {
        let prev = path[t - 1];
        let sym = sequence[t];
        let next_state = argmin(
            &mut hmm
                .successors(prev)
                .iter()
                .map(|&(j, a)| (j, a + hmm.emission_cost(j, sym) + beta[t * n + j])),
        );
        path.push(next_state);
    }
    Ok(ViterbiResult { cost, path })
}

pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Forward log-probabilities `alpha[t * states + j]` (natural log).
pub(crate) fn forward_table(hmm: &Hmm, sequence: &[usize]) -> Vec<f64> {
    let n = hmm.states();
    let mut alpha = vec![f64::NEG_INFINITY; sequence.len() * n];
    for j in 0..n {
        alpha[j] = -(hmm.entry_cost(j) + hmm.emission_cost(j, sequence[0]));
    }
    for t in 1..sequence.len() {
        let (done, rest) = alpha.split_at_mut(t * n);
        let prev = &done[(t - 1) * n..];
        let cur = &mut rest[..n];
        for (i, &p) in prev.iter().enumerate() {
            if p == f64::NEG_INFINITY {
                continue;
            }
            for &(j, a) in hmm.successors(i) {
                cur[j] = log_sum_exp(cur[j], p - a);
            }
        }
        for (j, c) in cur.iter_mut().enumerate() {
            *c -= hmm.emission_cost(j, sequence[t]);
        }
    }
    alpha
}

/// `log P(sequence)` summed over every entry → exit path; `-inf` when the
/// sequence is impossible.
pub fn forward_log_likelihood(hmm: &Hmm, sequence: &[usize]) -> Result<f64> {
    validate(hmm, sequence)?;
    let n = hmm.states();
    let alpha = forward_table(hmm, sequence);
    let last = &alpha[(sequence.len() - 1) * n..];
    Ok(last
        .iter()
        .zip(hmm.exit_costs())
        .fold(f64::NEG_INFINITY, |acc, (&a, &e)| log_sum_exp(acc, a - e)))
}
