//! Event counting and additive smoothing.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Event counts with a running total. Absent events count zero.
#[derive(Debug, Clone)]
pub struct CountTable<K> {
    counts: HashMap<K, u64>,
    total: u64,
}

impl<K: Hash + Eq> Default for CountTable<K> {
    fn default() -> Self {
        CountTable {
            counts: HashMap::new(),
            total: 0,
        }
    }
}

impl<K: Hash + Eq> CountTable<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K) {
        self.add_n(key, 1);
    }

    pub fn add_n(&mut self, key: K, n: u64) {
        *self.counts.entry(key).or_insert(0) += n;
        self.total += n;
    }

    pub fn get(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }
}

/// Additive smoothing: `(w(e) + delta) / (W + delta * |events|)`.
///
/// `weights` may be raw counts or an existing distribution; every event ends
/// up with probability at least `delta / (W + delta * |events|)`.
pub fn smooth_additive(weights: &[f64], delta: f64) -> Result<Vec<f64>> {
    if delta.is_nan() || delta <= 0.0 || !delta.is_finite() {
        return Err(Error::Parameter(format!(
            "smoothing delta must be positive, got {delta}"
        )));
    }
    if weights.is_empty() {
        return Err(Error::Parameter("cannot smooth over an empty event set".into()));
    }
    if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0 || !w.is_finite()) {
        return Err(Error::Parameter(format!(
            "event weight {w} is not a non-negative number"
        )));
    }
    let total: f64 = weights.iter().sum();
    let denom = total + delta * weights.len() as f64;
    Ok(weights.iter().map(|w| (w + delta) / denom).collect())
}
