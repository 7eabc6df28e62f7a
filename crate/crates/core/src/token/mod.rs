//! Token passing: Viterbi decoding as tokens moving through model states.
//!
//! A token is the head of the best path into a state and carries that
//! path's cost. Isolated word recognition runs every word model on its own;
//! connected text recognition couples the word models to a linguistic
//! decoder, passing tokens down into word models at word starts and back up
//! when a word model's exit is reached.

mod connected;
mod isolated;

use std::fmt;
use std::str::FromStr;

pub use connected::{recognize_connected, NoParse, Parse, Recognition, Recognizer};
pub use isolated::{isolated_cost, recognize_isolated};

use crate::error::{Error, Result};
use crate::hmm::{Cost, Hmm, INF};

/// Index of a [`WordLinkRecord`] in a [`LinkArena`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkId(u32);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Token {
    pub cost: Cost,
    /// Linguistic decoder state whose word the token is currently inside.
    pub ld_origin: Option<usize>,
    /// Most recent completed word on the token's path.
    pub link: Option<LinkId>,
}

impl Token {
    pub const NULL: Token = Token {
        cost: INF,
        ld_origin: None,
        link: None,
    };

    pub const START: Token = Token {
        cost: 0.0,
        ld_origin: None,
        link: None,
    };

    pub fn is_null(&self) -> bool {
        self.cost == INF
    }

    fn extended(&self, cost: Cost) -> Token {
        if cost == INF {
            Token::NULL
        } else {
            Token { cost, ..*self }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordLinkRecord {
    pub word_id: usize,
    /// 1-based index of the input character consumed when the word ended.
    pub boundary_time: usize,
    pub boundary_cost: Cost,
    pub predecessor: Option<LinkId>,
}

/// Per-decode storage of word boundary records.
#[derive(Debug, Clone, Default)]
pub struct LinkArena {
    records: Vec<WordLinkRecord>,
}

impl LinkArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: WordLinkRecord) -> LinkId {
        debug_assert!(record
            .predecessor
            .is_none_or(|p| self.get(p).boundary_time < record.boundary_time));
        self.records.push(record);
        LinkId((self.records.len() - 1) as u32)
    }

    pub fn get(&self, id: LinkId) -> &WordLinkRecord {
        &self.records[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Follow a token's record chain back to the start and return its records
/// in temporal order.
pub fn backtrack_records(token: &Token, arena: &LinkArena) -> Result<Vec<WordLinkRecord>> {
    if token.is_null() {
        return Err(Error::InvalidInput("cannot back-track a null token".into()));
    }
    let mut out = Vec::new();
    let mut cur = token.link;
    while let Some(id) = cur {
        let r = *arena.get(id);
        out.push(r);
        cur = r.predecessor;
    }
    out.reverse();
    Ok(out)
}

/// Word ids on a token's path, in temporal order.
pub fn backtrack(token: &Token, arena: &LinkArena) -> Result<Vec<usize>> {
    Ok(backtrack_records(token, arena)?
        .into_iter()
        .map(|r| r.word_id)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BeamConfig {
    #[default]
    Unbounded,
    Width(f64),
}

impl BeamConfig {
    /// A finite positive width, or `Unbounded` for `+inf`.
    pub fn width(w: f64) -> Result<Self> {
        if w == INF {
            Ok(BeamConfig::Unbounded)
        } else if w.is_finite() && w > 0.0 {
            Ok(BeamConfig::Width(w))
        } else {
            Err(Error::Parameter(format!("beam width must be positive, got {w}")))
        }
    }
}

impl fmt::Display for BeamConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeamConfig::Unbounded => f.write_str("inf"),
            BeamConfig::Width(w) => write!(f, "{w}"),
        }
    }
}

impl FromStr for BeamConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "unbounded" | "none" => Ok(BeamConfig::Unbounded),
            other => {
                let w: f64 = other
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad beam width {other:?}")))?;
                BeamConfig::width(w)
            }
        }
    }
}

/// Token slots of one word model instance: the entry state, every emitting
/// state, then the exit state.
#[derive(Debug, Clone, PartialEq)]
pub struct OdActivation {
    model_id: usize,
    slots: Vec<Token>,
    active: bool,
    scratch: Vec<Token>,
}

impl OdActivation {
    pub fn new(model_id: usize, hmm: &Hmm) -> Self {
        OdActivation {
            model_id,
            slots: vec![Token::NULL; hmm.states() + 2],
            active: false,
            scratch: vec![Token::NULL; hmm.states()],
        }
    }

    pub fn model_id(&self) -> usize {
        self.model_id
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn slots(&self) -> &[Token] {
        &self.slots
    }

    pub fn entry(&self) -> &Token {
        &self.slots[0]
    }

    pub fn exit(&self) -> &Token {
        self.slots.last().expect("at least two slots")
    }

    pub fn state(&self, j: usize) -> &Token {
        &self.slots[j + 1]
    }

    /// Put a token in the entry state if it beats the one already there.
    pub fn offer_entry(&mut self, token: Token) {
        if token.cost < self.slots[0].cost {
            self.slots[0] = token;
            self.active = true;
        }
    }

    pub fn take_exit(&mut self) -> Token {
        let last = self.slots.len() - 1;
        let t = std::mem::replace(&mut self.slots[last], Token::NULL);
        self.refresh();
        t
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|t| *t = Token::NULL);
        self.active = false;
    }

    fn refresh(&mut self) {
        self.active = self.slots.iter().any(|t| !t.is_null());
    }

    fn min_live(&self) -> Cost {
        self.slots.iter().map(|t| t.cost).fold(INF, f64::min)
    }

    fn prune_above(&mut self, threshold: Cost) {
        for t in &mut self.slots {
            if t.cost > threshold {
                *t = Token::NULL;
            }
        }
        self.refresh();
    }
}

/// Advance an activation by one input symbol.
///
/// Every token moves along each finite-cost arc out of its state, entry
/// state included, picking up the arc cost and the emission cost of the
/// target. Each emitting state keeps the cheapest arrival; on a tie the
/// token from the smaller source index wins, the entry state counting as
/// smallest. The exit state then takes the cheapest emitting-state token
/// plus its exit cost. The entry state is left empty.
pub fn step_model(activation: &mut OdActivation, hmm: &Hmm, symbol: usize) {
    let n = hmm.states();
    debug_assert_eq!(activation.slots.len(), n + 2);
    if !activation.active {
        return;
    }
    let next = &mut activation.scratch;
    next.iter_mut().for_each(|t| *t = Token::NULL);

    let entry = activation.slots[0];
    if !entry.is_null() {
        for (j, &a) in hmm.entry_costs().iter().enumerate() {
            let c = entry.cost + a;
            if c < next[j].cost {
                next[j] = entry.extended(c);
            }
        }
    }
    for i in 0..n {
        let tok = activation.slots[i + 1];
        if tok.is_null() {
            continue;
        }
        for &(j, a) in hmm.successors(i) {
            let c = tok.cost + a;
            if c < next[j].cost {
                next[j] = tok.extended(c);
            }
        }
    }
    let mut exit = Token::NULL;
    let mut any = false;
    for (j, tok) in next.iter_mut().enumerate() {
        if tok.is_null() {
            continue;
        }
        *tok = tok.extended(tok.cost + hmm.emission_cost(j, symbol));
        if tok.is_null() {
            continue;
        }
        any = true;
        let c = tok.cost + hmm.exit_cost(j);
        if c < exit.cost {
            exit = tok.extended(c);
        }
    }
    activation.slots[0] = Token::NULL;
    activation.slots[1..=n].copy_from_slice(next);
    activation.slots[n + 1] = exit;
    activation.active = any;
}

/// Null every token costing more than the cheapest live token plus the
/// beam width, and deactivate instances left empty.
pub fn prune(activations: &mut [OdActivation], beam: BeamConfig) {
    let BeamConfig::Width(w) = beam else { return };
    let best = activations
        .iter()
        .filter(|a| a.active)
        .map(OdActivation::min_live)
        .fold(INF, f64::min);
    if best == INF {
        return;
    }
    let threshold = best + w;
    for a in activations.iter_mut().filter(|a| a.active) {
        a.prune_above(threshold);
    }
}
