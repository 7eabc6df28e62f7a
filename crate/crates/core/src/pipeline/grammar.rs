//! A small template grammar producing class-tagged dialogues about cars.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ld::{ClassInventory, Dialogue, TaggedCorpus, TaggedToken};

/// Communicative heads, function words, object heads, aspect heads,
/// modifiers and numbers.
pub const CAR_CLASSES: [&str; 6] = ["CH", "FW", "OH", "AH", "MD", "NU"];

const CH: &[&str] = &["show", "list", "give", "find", "display"];
const OH: &[&str] = &[
    "cars",
    "models",
    "saab 900",
    "volvo 240",
    "volvo 740",
    "audi 80",
    "sedans",
    "wagons",
    "bmw 318",
    "convertibles",
];
const AH: &[&str] = &[
    "price",
    "costs",
    "acceleration",
    "safety",
    "mileage",
    "weight",
    "insurance",
    "colours",
    "engine",
    "tyres",
    "seats",
    "speed",
    "rust protection",
];
const MD: &[&str] = &[
    "cheap",
    "cheapest",
    "fast",
    "safe",
    "new",
    "used",
    "red",
    "small",
    "large",
    "good",
    "best",
    "expensive",
    "reliable",
    "swedish",
    "german",
];
const OH_SINGULAR: &[&str] = &["car", "model", "sedan", "wagon", "convertible"];
const NU: &[&str] = &["1990", "1995", "1998", "2000", "100", "150", "200"];

enum Slot {
    Word(&'static str),
    Class(&'static str, &'static [&'static str]),
    /// An object head, biased towards the dialogue's cars in focus.
    Object,
}

use Slot::{Class, Object, Word};

fn templates() -> Vec<Vec<Slot>> {
    vec![
        vec![
            Class("CH", CH),
            Word("me"),
            Word("the"),
            Class("AH", AH),
            Word("of"),
            Object,
        ],
        vec![Class("CH", CH), Word("all"), Class("MD", MD), Object],
        vec![
            Word("what"),
            Word("is"),
            Word("the"),
            Class("AH", AH),
            Word("of"),
            Object,
            Word("?"),
        ],
        vec![Class("CH", CH), Object, Word("with"), Class("MD", MD), Class("AH", AH)],
        vec![
            Word("which"),
            Object,
            Word("have"),
            Class("MD", MD),
            Class("AH", AH),
            Word("?"),
        ],
        vec![
            Word("is"),
            Word("the"),
            Class("AH", AH),
            Word("of"),
            Object,
            Class("MD", MD),
            Word("?"),
        ],
        vec![Class("CH", CH), Object, Word("from"), Class("NU", NU)],
        vec![Word("compare"), Object, Word("and"), Object],
        vec![
            Class("CH", CH),
            Word("the"),
            Class("AH", AH),
            Word("for"),
            Word("these"),
            Object,
        ],
        vec![
            Word("are"),
            Word("there"),
            Word("any"),
            Class("MD", MD),
            Object,
            Word("?"),
        ],
        vec![Class("CH", CH), Word("me"), Object, Word("under"), Class("NU", NU)],
        vec![Class("MD", MD), Object, Word("please")],
        vec![
            Word("what"),
            Word("does"),
            Word("the"),
            Class("OH", OH_SINGULAR),
            Word("cost"),
            Word("?"),
        ],
        vec![
            Word("is"),
            Word("the"),
            Class("MD", MD),
            Class("OH", OH_SINGULAR),
            Word("safe"),
            Word("?"),
        ],
    ]
}

fn class_of_fixed(word: &str) -> &'static str {
    match word {
        "compare" => "CH",
        "cost" => "AH",
        "safe" => "MD",
        _ => "FW",
    }
}

pub fn car_class_inventory() -> ClassInventory {
    ClassInventory::new(CAR_CLASSES).expect("fixed class list is valid")
}

/// `dialogues` dialogues of `utterances` utterances each, drawn from a
/// fixed set of templates with seeded slot fillers.
pub fn generate_car_corpus(dialogues: usize, utterances: usize, seed: u64) -> TaggedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates = templates();
    let mut out = Vec::with_capacity(dialogues);
    for _ in 0..dialogues {
        // each dialogue dwells on a couple of cars, as a user session would
        let focus: Vec<&str> = OH.choose_multiple(&mut rng, 2).copied().collect();
        let mut d = Dialogue::default();
        for _ in 0..utterances {
            let t = templates.choose(&mut rng).expect("templates are non-empty");
            let utt = t
                .iter()
                .map(|slot| match slot {
                    Word(w) => TaggedToken::new(w, Some(class_of_fixed(w))),
                    Object => {
                        let w = if rng.gen_bool(0.5) {
                            focus.choose(&mut rng)
                        } else {
                            OH.choose(&mut rng)
                        };
                        TaggedToken::new(w.expect("non-empty pool"), Some("OH"))
                    }
                    Class(c, pool) => TaggedToken::new(pool.choose(&mut rng).expect("non-empty pool"), Some(c)),
                })
                .collect();
            d.utterances.push(utt);
        }
        out.push(d);
    }
    TaggedCorpus::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let c = generate_car_corpus(4, 5, 1);
        assert_eq!(c.dialogues.len(), 4);
        assert_eq!(c.utterance_count(), 20);
        assert_eq!(c, generate_car_corpus(4, 5, 1));
        let inv = car_class_inventory();
        assert!(c.class_tags().iter().all(|t| inv.index_of(t).is_some()));
        assert!(c.utterances().flatten().all(|t| !t.word.is_empty()));
    }
}
