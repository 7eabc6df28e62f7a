use rayon::prelude::*;

use super::decode::{forward_table, log_sum_exp, validate};
use super::{prob_to_cost, Hmm};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BaumWelchReport {
    pub model: Hmm,
    /// Training-set log-likelihood of the model entering each iteration,
    /// followed by that of the returned model (`iterations + 1` values).
    pub log_likelihoods: Vec<f64>,
    /// `(iteration, sequence index)` for every sequence skipped because the
    /// model of that iteration gave it zero probability.
    pub skipped: Vec<(usize, usize)>,
}

/// Expected counts gathered from one sequence.
struct Expectations {
    log_likelihood: f64,
    entry: Vec<f64>,
    transitions: Vec<f64>,
    exit: Vec<f64>,
    emissions: Vec<f64>,
}

impl Expectations {
    fn zeros(n: usize, m: usize) -> Self {
        Expectations {
            log_likelihood: 0.0,
            entry: vec![0.0; n],
            transitions: vec![0.0; n * n],
            exit: vec![0.0; n],
            emissions: vec![0.0; n * m],
        }
    }

    fn add(&mut self, other: &Expectations) {
        self.log_likelihood += other.log_likelihood;
        let acc = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        acc(&mut self.entry, &other.entry);
        acc(&mut self.transitions, &other.transitions);
        acc(&mut self.exit, &other.exit);
        acc(&mut self.emissions, &other.emissions);
    }
}

fn expectations(hmm: &Hmm, seq: &[usize]) -> Option<Expectations> {
    let n = hmm.states();
    let m = hmm.symbol_count();
    let t_len = seq.len();
    let alpha = forward_table(hmm, seq);
    let log_p = alpha[(t_len - 1) * n..]
        .iter()
        .zip(hmm.exit_costs())
        .fold(f64::NEG_INFINITY, |acc, (&a, &e)| log_sum_exp(acc, a - e));
    if log_p == f64::NEG_INFINITY {
        return None;
    }

    let mut beta = vec![f64::NEG_INFINITY; t_len * n];
    for i in 0..n {
        beta[(t_len - 1) * n + i] = -hmm.exit_cost(i);
    }
    for t in (0..t_len - 1).rev() {
        for i in 0..n {
            let mut acc = f64::NEG_INFINITY;
            for &(j, a) in hmm.successors(i) {
                acc = log_sum_exp(acc, -a - hmm.emission_cost(j, seq[t + 1]) + beta[(t + 1) * n + j]);
            }
            beta[t * n + i] = acc;
        }
    }

    let mut e = Expectations::zeros(n, m);
    e.log_likelihood = log_p;
    for t in 0..t_len {
        for i in 0..n {
            let g = (alpha[t * n + i] + beta[t * n + i] - log_p).exp();
            if g == 0.0 {
                continue;
            }
            e.emissions[i * m + seq[t]] += g;
            if t == 0 {
                e.entry[i] += g;
            }
            if t == t_len - 1 {
                e.exit[i] += g;
            }
        }
        if t + 1 < t_len {
            for i in 0..n {
                let a_t = alpha[t * n + i];
                if a_t == f64::NEG_INFINITY {
                    continue;
                }
                for &(j, a) in hmm.successors(i) {
                    let x = a_t - a - hmm.emission_cost(j, seq[t + 1]) + beta[(t + 1) * n + j] - log_p;
                    e.transitions[i * n + j] += x.exp();
                }
            }
        }
    }
    Some(e)
}

/// Gather expectations over the whole set; the reduction runs in sequence
/// order so results do not depend on thread scheduling.
fn e_step(hmm: &Hmm, sequences: &[Vec<usize>]) -> (Expectations, Vec<usize>) {
    let per_seq: Vec<Option<Expectations>> = sequences.par_iter().map(|s| expectations(hmm, s)).collect();
    let mut total = Expectations::zeros(hmm.states(), hmm.symbol_count());
    let mut skipped = Vec::new();
    for (k, e) in per_seq.iter().enumerate() {
        match e {
            Some(e) => total.add(e),
            None => skipped.push(k),
        }
    }
    (total, skipped)
}

fn m_step(hmm: &Hmm, e: &Expectations) -> Result<Hmm> {
    let n = hmm.states();
    let m = hmm.symbol_count();

    let entry_total: f64 = e.entry.iter().sum();
    let entry = if entry_total > 0.0 {
        e.entry.iter().map(|&x| prob_to_cost(x / entry_total)).collect()
    } else {
        hmm.entry_costs().to_vec()
    };

    // The exit arc is one more column of the transition row.
    let mut transitions = Vec::with_capacity(n * n);
    let mut exit = Vec::with_capacity(n);
    for i in 0..n {
        let row = &e.transitions[i * n..(i + 1) * n];
        let denom: f64 = row.iter().sum::<f64>() + e.exit[i];
        if denom > 0.0 {
            transitions.extend(row.iter().map(|&x| prob_to_cost(x / denom)));
            exit.push(prob_to_cost(e.exit[i] / denom));
        } else {
            transitions.extend_from_slice(hmm.transition_row(i));
            exit.push(hmm.exit_cost(i));
        }
    }

    let mut emissions = Vec::with_capacity(n * m);
    for j in 0..n {
        let row = &e.emissions[j * m..(j + 1) * m];
        let denom: f64 = row.iter().sum();
        if denom > 0.0 {
            emissions.extend(row.iter().map(|&x| prob_to_cost(x / denom)));
        } else {
            emissions.extend_from_slice(hmm.emission_row(j));
        }
    }
    hmm.with_tables(entry, transitions, exit, emissions)
}

/// Baum-Welch reestimation with exit-state handling.
///
/// Exit probabilities are reestimated from the expected occupancy of each
/// state at the last time step and normalized together with the state's
/// outgoing transitions. Entry costs are reestimated like any other row.
/// Sequences with zero likelihood under the current model are skipped for
/// that iteration and listed in the report.
pub fn baum_welch(hmm: &Hmm, sequences: &[Vec<usize>], iterations: usize) -> Result<BaumWelchReport> {
    if !hmm.is_normalized() {
        return Err(Error::Parameter("Baum-Welch needs a normalized model".into()));
    }
    if sequences.is_empty() {
        return Err(Error::InvalidInput("no training sequences".into()));
    }
    for s in sequences {
        validate(hmm, s)?;
    }

    let mut model = hmm.clone();
    let mut log_likelihoods = Vec::with_capacity(iterations + 1);
    let mut skipped = Vec::new();
    for it in 0..=iterations {
        let (e, skip) = e_step(&model, sequences);
        if skip.len() == sequences.len() {
            return Err(Error::ZeroLikelihood);
        }
        log_likelihoods.push(e.log_likelihood);
        if it == iterations {
            break;
        }
        skipped.extend(skip.into_iter().map(|k| (it, k)));
        model = m_step(&model, &e)?;
    }
    Ok(BaumWelchReport {
        model,
        log_likelihoods,
        skipped,
    })
}
