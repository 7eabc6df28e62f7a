//! Discrete HMMs with non-emitting entry and exit states.
//!
//! All parameters live in the cost domain: a cost is the negative natural
//! logarithm of a probability, and `f64::INFINITY` marks a forbidden
//! transition or an impossible emission. Emitting states are indexed from 0;
//! the entry and exit states are implicit and carry no index.
//!
//! The entry row is the initial state distribution. The exit costs give,
//! for each emitting state, the probability of moving to the absorbing exit
//! state, and that mass counts in the state's transition row.

mod alphabet;
mod decode;
pub mod io;
mod train;

pub use alphabet::Alphabet;
pub use decode::{forward_log_likelihood, viterbi, ViterbiResult};
pub use train::{baum_welch, BaumWelchReport};

use crate::error::{Error, Result};

pub type Cost = f64;

pub const INF: Cost = f64::INFINITY;

/// Row sums of a normalized model must land within this distance of 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

pub fn prob_to_cost(p: f64) -> Cost {
    if p <= 0.0 {
        return INF;
    }
    let c = -p.ln();
    if c <= 0.0 {
        0.0
    } else {
        c
    }
}

pub fn cost_to_prob(c: Cost) -> f64 {
    (-c).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hmm {
    states: usize,
    symbols: usize,
    entry: Vec<Cost>,
    transitions: Vec<Cost>,
    exit: Vec<Cost>,
    emissions: Vec<Cost>,
    normalized: bool,
    successors: Vec<Vec<(usize, Cost)>>,
}

impl Hmm {
    /// Build a model from cost tables. `transitions` is row-major
    /// `states × states`, `emissions` is row-major `states × symbols`.
    ///
    /// When `normalized` is set, every entry, transition (with exit mass)
    /// and emission row must sum to one.
    pub fn from_costs(
        states: usize,
        symbols: usize,
        entry: Vec<Cost>,
        transitions: Vec<Cost>,
        exit: Vec<Cost>,
        emissions: Vec<Cost>,
        normalized: bool,
    ) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidModel("a model needs at least one emitting state".into()));
        }
        if symbols == 0 {
            return Err(Error::InvalidModel("a model needs at least one symbol".into()));
        }
        let check_len = |name: &str, v: &[Cost], want: usize| {
            if v.len() != want {
                Err(Error::InvalidModel(format!(
                    "{name} has {} values, expected {want}",
                    v.len()
                )))
            } else {
                Ok(())
            }
        };
        check_len("entry", &entry, states)?;
        check_len("transitions", &transitions, states * states)?;
        check_len("exit", &exit, states)?;
        check_len("emissions", &emissions, states * symbols)?;
        for &c in entry.iter().chain(&transitions).chain(&exit).chain(&emissions) {
            if c.is_nan() || c < 0.0 {
                return Err(Error::InvalidModel(format!("cost {c} is not a non-negative value")));
            }
        }
        let successors = (0..states)
            .map(|i| {
                (0..states)
                    .filter_map(|j| {
                        let c = transitions[i * states + j];
                        c.is_finite().then_some((j, c))
                    })
                    .collect()
            })
            .collect();
        let hmm = Hmm {
            states,
            symbols,
            entry,
            transitions,
            exit,
            emissions,
            normalized,
            successors,
        };
        if normalized {
            hmm.check_normalized(NORMALIZATION_TOLERANCE)?;
        }
        Ok(hmm)
    }

    /// Same as [`Hmm::from_costs`] with probability tables.
    pub fn from_probs(
        states: usize,
        symbols: usize,
        entry: &[f64],
        transitions: &[f64],
        exit: &[f64],
        emissions: &[f64],
        normalized: bool,
    ) -> Result<Self> {
        let conv = |v: &[f64]| v.iter().map(|&p| prob_to_cost(p)).collect();
        Hmm::from_costs(
            states,
            symbols,
            conv(entry),
            conv(transitions),
            conv(exit),
            conv(emissions),
            normalized,
        )
    }

    /// A left-to-right chain emitting exactly `word`, with every used
    /// probability equal to one.
    pub fn deterministic_chain(word: &[usize], symbols: usize) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Err(Error::InvalidModel("chain needs at least one symbol".into()));
        }
        let mut entry = vec![INF; n];
        entry[0] = 0.0;
        let mut transitions = vec![INF; n * n];
        for i in 0..n - 1 {
            transitions[i * n + i + 1] = 0.0;
        }
        let mut exit = vec![INF; n];
        exit[n - 1] = 0.0;
        let mut emissions = vec![INF; n * symbols];
        for (j, &s) in word.iter().enumerate() {
            if s >= symbols {
                return Err(Error::InvalidModel(format!("symbol {s} outside alphabet of {symbols}")));
            }
            emissions[j * symbols + s] = 0.0;
        }
        Hmm::from_costs(n, symbols, entry, transitions, exit, emissions, true)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn entry_cost(&self, j: usize) -> Cost {
        self.entry[j]
    }

    pub fn entry_costs(&self) -> &[Cost] {
        &self.entry
    }

    pub fn transition_cost(&self, i: usize, j: usize) -> Cost {
        self.transitions[i * self.states + j]
    }

    pub fn transition_row(&self, i: usize) -> &[Cost] {
        &self.transitions[i * self.states..(i + 1) * self.states]
    }

    pub fn exit_cost(&self, i: usize) -> Cost {
        self.exit[i]
    }

    pub fn exit_costs(&self) -> &[Cost] {
        &self.exit
    }

    pub fn emission_cost(&self, j: usize, symbol: usize) -> Cost {
        self.emissions[j * self.symbols + symbol]
    }

    pub fn emission_row(&self, j: usize) -> &[Cost] {
        &self.emissions[j * self.symbols..(j + 1) * self.symbols]
    }

    /// Finite-cost transitions out of emitting state `i`, by target index.
    pub fn successors(&self, i: usize) -> &[(usize, Cost)] {
        &self.successors[i]
    }

    /// Probability sums of every distribution in the model: the entry row,
    /// each transition row including its exit mass, and each emission row.
    pub fn distribution_sums(&self) -> Vec<f64> {
        let psum = |v: &[Cost]| v.iter().map(|&c| cost_to_prob(c)).sum::<f64>();
        let mut sums = Vec::with_capacity(1 + 2 * self.states);
        sums.push(psum(&self.entry));
        for i in 0..self.states {
            sums.push(psum(self.transition_row(i)) + cost_to_prob(self.exit[i]));
        }
        for j in 0..self.states {
            sums.push(psum(self.emission_row(j)));
        }
        sums
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        for (n, s) in self.distribution_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > tolerance {
                let what = match n {
                    0 => "entry row".to_string(),
                    n if n <= self.states => format!("transition row {}", n - 1),
                    n => format!("emission row {}", n - 1 - self.states),
                };
                return Err(Error::InvalidModel(format!("{what} sums to {s}, not 1")));
            }
        }
        Ok(())
    }

    /// Replace the emission table, keeping structure and normalization flag.
    pub fn with_emissions(&self, emissions: Vec<Cost>) -> Result<Self> {
        Hmm::from_costs(
            self.states,
            self.symbols,
            self.entry.clone(),
            self.transitions.clone(),
            self.exit.clone(),
            emissions,
            self.normalized,
        )
    }

    /// Replace every table at once, keeping the normalization flag.
    pub(crate) fn with_tables(
        &self,
        entry: Vec<Cost>,
        transitions: Vec<Cost>,
        exit: Vec<Cost>,
        emissions: Vec<Cost>,
    ) -> Result<Self> {
        Hmm::from_costs(
            self.states,
            self.symbols,
            entry,
            transitions,
            exit,
            emissions,
            self.normalized,
        )
    }
}

#[cfg(test)]
pub(crate) mod test_models {
    use super::*;

    /// The two-state model used throughout the unit tests: entry always to
    /// state 0, state 0 splits evenly between itself and state 1, state 1
    /// splits evenly between itself and the exit. Symbols are `a`, `b`.
    pub fn two_state() -> Hmm {
        Hmm::from_probs(
            2,
            2,
            &[1.0, 0.0],
            &[0.5, 0.5, 0.0, 0.5],
            &[0.0, 0.5],
            &[0.9, 0.1, 0.2, 0.8],
            true,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_model_rejects_bad_rows() {
        let err = Hmm::from_probs(1, 2, &[1.0], &[0.5], &[0.4], &[0.5, 0.5], true);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
        let ok = Hmm::from_probs(1, 2, &[1.0], &[0.5], &[0.4], &[0.5, 0.5], false);
        assert!(ok.is_ok());
    }

    #[test]
    fn rejects_negative_and_nan_costs() {
        assert!(Hmm::from_costs(1, 1, vec![-1.0], vec![0.0], vec![0.0], vec![0.0], false).is_err());
        assert!(Hmm::from_costs(1, 1, vec![f64::NAN], vec![0.0], vec![0.0], vec![0.0], false).is_err());
    }

    #[test]
    fn probability_one_has_zero_cost() {
        assert_eq!(prob_to_cost(1.0), 0.0);
        assert!(prob_to_cost(1.0).is_sign_positive());
        assert_eq!(prob_to_cost(0.0), INF);
    }

    #[test]
    fn successors_skip_forbidden_arcs() {
        let h = test_models::two_state();
        assert_eq!(h.successors(0).len(), 2);
        assert_eq!(h.successors(1).iter().map(|s| s.0).collect::<Vec<_>>(), vec![1]);
        assert!(h.check_normalized(1e-12).is_ok());
    }
}
