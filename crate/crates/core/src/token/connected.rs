use std::ops::Range;

use super::{backtrack_records, prune, step_model, BeamConfig, LinkArena, OdActivation, Token, WordLinkRecord};
use crate::error::{Error, Result};
use crate::hmm::{Cost, INF};
use crate::ld::LinguisticDecoder;
use crate::od::OdSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Parse {
    pub words: Vec<usize>,
    /// Input index (1-based, leading space included) at which each word ends.
    pub boundaries: Vec<usize>,
    pub cost: Cost,
}

/// No complete word sequence survived. Carries the cheapest token still
/// alive at the last time step that had one, for beam tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoParse {
    pub best_cost: Cost,
    pub time: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recognition {
    Parsed(Parse),
    NoParse(NoParse),
}

impl Recognition {
    pub fn parse(&self) -> Option<&Parse> {
        match self {
            Recognition::Parsed(p) => Some(p),
            Recognition::NoParse(_) => None,
        }
    }

    /// Total cost, `+inf` when there is no parse.
    pub fn cost(&self) -> Cost {
        self.parse().map_or(INF, |p| p.cost)
    }
}

#[derive(Debug, Clone, Copy)]
struct Instance {
    ld_state: usize,
    word: usize,
    emission: Cost,
}

/// Connected text recognizer over a fixed pair of decoders.
///
/// Word model instances are kept per linguistic state and word: every word
/// a state can emit gets its own instance, so tokens that will return to
/// different states never compete inside one word model. Within an
/// instance, tokens dispatched from different source states compete for the
/// entry slot, the smaller source state index winning a tie.
#[derive(Debug, Clone)]
pub struct Recognizer<'a> {
    ld: &'a LinguisticDecoder,
    od: &'a OdSet,
    instances: Vec<Instance>,
    by_state: Vec<Range<usize>>,
}

impl<'a> Recognizer<'a> {
    pub fn new(ld: &'a LinguisticDecoder, od: &'a OdSet) -> Result<Self> {
        if od.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if ld.vocabulary_size() != od.len() {
            return Err(Error::InvalidModel(format!(
                "linguistic decoder has {} observables, orthographic decoder {} models",
                ld.vocabulary_size(),
                od.len()
            )));
        }
        let h = ld.hmm();
        let mut instances = Vec::new();
        let mut by_state = Vec::with_capacity(h.states());
        for j in 0..h.states() {
            let start = instances.len();
            for (k, &c) in h.emission_row(j).iter().enumerate() {
                if c < INF {
                    instances.push(Instance {
                        ld_state: j,
                        word: k,
                        emission: c,
                    });
                }
            }
            by_state.push(start..instances.len());
        }
        Ok(Recognizer {
            ld,
            od,
            instances,
            by_state,
        })
    }

    pub fn od(&self) -> &OdSet {
        self.od
    }

    pub fn ld(&self) -> &LinguisticDecoder {
        self.ld
    }

    /// Decode an utterance; a single space is prepended before decoding.
    pub fn decode(&self, text: &str, beam: BeamConfig) -> Result<Recognition> {
        let symbols = self.od.encode_utterance(text)?;
        self.decode_symbols(&symbols, beam)
    }

    /// Decode an already encoded symbol sequence as is.
    pub fn decode_symbols(&self, symbols: &[usize], beam: BeamConfig) -> Result<Recognition> {
        self.run(symbols, Some(beam))
    }

    /// Decode without ever calling the pruning step.
    #[doc(hidden)]
    pub fn decode_symbols_unpruned(&self, symbols: &[usize]) -> Result<Recognition> {
        self.run(symbols, None)
    }

    /// The decoded words joined by single spaces.
    pub fn text(&self, parse: &Parse) -> String {
        let v = self.od.vocabulary();
        parse.words.iter().map(|&k| v.entry(k)).collect::<Vec<_>>().join(" ")
    }

    fn run(&self, symbols: &[usize], beam: Option<BeamConfig>) -> Result<Recognition> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("cannot decode an empty input".into()));
        }
        let m = self.od.alphabet().len();
        if let Some(p) = symbols.iter().position(|&s| s >= m) {
            return Err(Error::UnknownSymbol {
                symbol: format!("#{}", symbols[p]),
                position: p,
            });
        }
        let h = self.ld.hmm();
        let l = h.states();
        let mut acts: Vec<OdActivation> = self
            .instances
            .iter()
            .map(|inst| OdActivation::new(inst.word, self.od.model(inst.word)))
            .collect();
        let mut arena = LinkArena::new();
        let mut ld_tokens = vec![Token::NULL; l];
        let mut into = vec![Token::NULL; l];
        let mut winners: Vec<Option<(usize, Token)>> = vec![None; l];
        let mut best_live = NoParse {
            best_cost: INF,
            time: 0,
        };

        for (idx, &sym) in symbols.iter().enumerate() {
            let t = idx + 1;

            // Dispatch from the linguistic layer into word model entries.
            into.iter_mut().for_each(|x| *x = Token::NULL);
            if t == 1 {
                for (j, &a) in h.entry_costs().iter().enumerate() {
                    let c = Token::START.cost + a;
                    if c < into[j].cost {
                        into[j] = Token::START.extended(c);
                    }
                }
            }
            for (i, tok) in ld_tokens.iter().enumerate() {
                if tok.is_null() {
                    continue;
                }
                for &(j, a) in h.successors(i) {
                    let c = tok.cost + a;
                    if c < into[j].cost {
                        into[j] = tok.extended(c);
                    }
                }
            }
            for (j, src) in into.iter().enumerate() {
                if src.is_null() {
                    continue;
                }
                for n in self.by_state[j].clone() {
                    let c = src.cost + self.instances[n].emission;
                    if c < INF {
                        acts[n].offer_entry(Token {
                            cost: c,
                            ld_origin: Some(j),
                            link: src.link,
                        });
                    }
                }
            }
            ld_tokens.iter_mut().for_each(|x| *x = Token::NULL);

            for (n, act) in acts.iter_mut().enumerate() {
                if act.is_active() {
                    step_model(act, self.od.model(self.instances[n].word), sym);
                }
            }
            if let Some(beam) = beam {
                prune(&mut acts, beam);
            }
            let live = acts
                .iter()
                .filter(|a| a.is_active())
                .flat_map(|a| a.slots().iter().map(|s| s.cost))
                .fold(INF, f64::min);
            if live < INF {
                best_live = NoParse {
                    best_cost: live,
                    time: t,
                };
            }

            // Word ends go back up to the state that emitted the word.
            winners.iter_mut().for_each(|w| *w = None);
            for (n, act) in acts.iter_mut().enumerate() {
                if !act.is_active() || act.exit().is_null() {
                    continue;
                }
                let tok = act.take_exit();
                let j = self.instances[n].ld_state;
                if winners[j].is_none_or(|(_, w)| tok.cost < w.cost) {
                    winners[j] = Some((n, tok));
                }
            }
            for (j, w) in winners.iter().enumerate() {
                if let Some((n, tok)) = *w {
                    let id = arena.push(WordLinkRecord {
                        word_id: self.instances[n].word,
                        boundary_time: t,
                        boundary_cost: tok.cost,
                        predecessor: tok.link,
                    });
                    ld_tokens[j] = Token {
                        cost: tok.cost,
                        ld_origin: Some(j),
                        link: Some(id),
                    };
                }
            }
        }

        let mut last = Token::NULL;
        for (j, tok) in ld_tokens.iter().enumerate() {
            let c = tok.cost + h.exit_cost(j);
            if c < last.cost {
                last = tok.extended(c);
            }
        }
        if last.is_null() {
            return Ok(Recognition::NoParse(best_live));
        }
        let records = backtrack_records(&last, &arena)?;
        debug_assert_eq!(records.last().map(|r| r.boundary_time), Some(symbols.len()));
        Ok(Recognition::Parsed(Parse {
            words: records.iter().map(|r| r.word_id).collect(),
            boundaries: records.iter().map(|r| r.boundary_time).collect(),
            cost: last.cost,
        }))
    }
}

/// One-shot connected decode of `input`.
pub fn recognize_connected(ld: &LinguisticDecoder, od: &OdSet, input: &str, beam: BeamConfig) -> Result<Recognition> {
    Recognizer::new(ld, od)?.decode(input, beam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmm::{Alphabet, Hmm};
    use crate::ld::baseline_ld;
    use crate::od::{build_od, ErrorTypeSet, KeyboardMap, TrainingParams, Vocabulary};

    fn chain_od(words: &[&str], extra: &str) -> OdSet {
        let vocab = Vocabulary::new(words.iter().copied()).unwrap();
        let alphabet = Alphabet::covering(words.iter().copied().chain([extra]));
        let models = (0..vocab.len())
            .map(|k| {
                Hmm::deterministic_chain(&alphabet.encode(&vocab.model_string(k)).unwrap(), alphabet.len()).unwrap()
            })
            .collect();
        OdSet::new(vocab, alphabet, models, vec![false; words.len()]).unwrap()
    }

    #[test]
    fn two_chain_words() {
        let od = chain_od(&["a", "b"], "");
        let ld = baseline_ld(od.vocabulary());
        let r = recognize_connected(&ld, &od, "a b", BeamConfig::Unbounded).unwrap();
        let p = r.parse().unwrap();
        assert_eq!(p.words, vec![0, 1]);
        assert_eq!(p.boundaries, vec![2, 4]);
        assert_eq!(p.cost, 0.0);
        let rec = Recognizer::new(&ld, &od).unwrap();
        assert_eq!(rec.text(p), "a b");
    }

    #[test]
    fn impossible_input_is_no_parse() {
        let od = chain_od(&["a", "b"], "c");
        let ld = baseline_ld(od.vocabulary());
        let r = recognize_connected(&ld, &od, "a c", BeamConfig::Unbounded).unwrap();
        match r {
            Recognition::NoParse(np) => {
                assert_eq!(np.time, 3);
                assert_eq!(np.best_cost, 0.0);
            }
            other => panic!("expected no parse, got {other:?}"),
        }
    }

    #[test]
    fn run_on_is_split_by_trained_models() {
        let vocab = Vocabulary::new(["for", "these"]).unwrap();
        let od = build_od(
            &vocab,
            ErrorTypeSet::standard(),
            &KeyboardMap::qwerty(),
            &TrainingParams::default(),
        )
        .unwrap();
        let ld = baseline_ld(&vocab);
        let r = recognize_connected(&ld, &od, "forthese", BeamConfig::Unbounded).unwrap();
        assert_eq!(r.parse().unwrap().words, vec![0, 1]);
    }

    #[test]
    fn tight_beam_can_lose_the_parse() {
        // word 0 is cheap on 'a' but cannot emit 'b'; word 1 can
        let alphabet = Alphabet::new([' ', 'a', 'b']).unwrap();
        let vocab = Vocabulary::new(["aa", "ab"]).unwrap();
        let w0 = Hmm::from_probs(
            3,
            3,
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            true,
        )
        .unwrap();
        let w1 = Hmm::from_probs(
            3,
            3,
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5],
            true,
        )
        .unwrap();
        let od = OdSet::new(vocab, alphabet, vec![w0, w1], vec![false, false]).unwrap();
        let ld = baseline_ld(od.vocabulary());
        let rec = Recognizer::new(&ld, &od).unwrap();
        let exact = rec.decode("ab", BeamConfig::Unbounded).unwrap();
        assert_eq!(exact.parse().unwrap().words, vec![1]);
        let tight = rec.decode("ab", BeamConfig::Width(1e-6)).unwrap();
        assert_eq!(
            tight,
            Recognition::NoParse(NoParse {
                best_cost: 0.0,
                time: 2
            })
        );
        assert_eq!(rec.decode("ab", BeamConfig::Width(50.0)).unwrap(), exact);
    }

    #[test]
    fn mismatched_decoders_are_rejected() {
        let od = chain_od(&["a", "b"], "");
        let other = Vocabulary::new(["a"]).unwrap();
        let ld = baseline_ld(&other);
        assert!(Recognizer::new(&ld, &od).is_err());
    }
}
