//! Seeded generator of labeled review-like documents.
//!
//! Every document picks one planted topic vocabulary uniformly at random and
//! draws its tokens from it, mixed with neutral filler words. `Action`
//! documents additionally draw each token from a hygiene cue lexicon with
//! probability `cue_strength`. The generated text is test scaffolding with a
//! known signal; it says nothing about real reviews.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::LabeledDocument;
use crate::label::Label;
use crate::seed;

pub const REVIEWS_FILE: &str = "reviews.jsonl";
pub const INSPECTIONS_FILE: &str = "inspections.csv";
pub const LINKS_FILE: &str = "links.csv";

const CUE_WORDS: &[&str] = &["gross", "mess", "sticky", "smell", "dirty"];

const FILLER_WORDS: &[&str] = &[
    "food",
    "place",
    "service",
    "time",
    "good",
    "great",
    "really",
    "staff",
    "menu",
    "order",
    "friendly",
    "table",
    "visit",
    "price",
    "nice",
    "pretty",
    "lunch",
    "dinner",
    "night",
    "friend",
    "experience",
    "restaurant",
    "amazing",
    "delicious",
    "fresh",
    "wait",
    "portion",
    "location",
    "parking",
    "weekend",
];

const TOPIC_WORDS: &[&[&str]] = &[
    &[
        "sushi", "salmon", "tuna", "wasabi", "sashimi", "miso", "tempura", "ginger", "edamame",
        "nigiri", "udon", "seaweed",
    ],
    &[
        "pizza",
        "crust",
        "pepperoni",
        "mozzarella",
        "oven",
        "slice",
        "basil",
        "calzone",
        "marinara",
        "parmesan",
        "olive",
        "dough",
    ],
    &[
        "burger",
        "fries",
        "patty",
        "bun",
        "cheddar",
        "bacon",
        "pickle",
        "ketchup",
        "onion",
        "milkshake",
        "grill",
        "mustard",
    ],
    &[
        "coffee",
        "espresso",
        "latte",
        "tea",
        "cappuccino",
        "barista",
        "mug",
        "muffin",
        "scone",
        "pastry",
        "croissant",
        "brew",
    ],
    &[
        "thai",
        "curry",
        "noodle",
        "lemongrass",
        "coconut",
        "peanut",
        "satay",
        "tamarind",
        "lime",
        "chili",
        "jasmine",
        "papaya",
    ],
    &[
        "dumpling", "wonton", "szechuan", "chow", "tofu", "bok", "hoisin", "soy", "spring",
        "congee", "bao", "duck",
    ],
    &[
        "breakfast",
        "pancake",
        "waffle",
        "omelette",
        "egg",
        "syrup",
        "toast",
        "brunch",
        "hash",
        "sausage",
        "bagel",
        "berry",
    ],
    &[
        "wings", "buffalo", "ranch", "celery", "hockey", "beer", "pitcher", "nachos", "sauce",
        "tap", "lager", "trivia",
    ],
    &[
        "taco",
        "burrito",
        "salsa",
        "guacamole",
        "tortilla",
        "cilantro",
        "queso",
        "enchilada",
        "carnitas",
        "jalapeno",
        "churro",
        "quesadilla",
    ],
    &[
        "cake",
        "cupcake",
        "gelato",
        "sundae",
        "cookie",
        "brownie",
        "frosting",
        "sprinkles",
        "vanilla",
        "chocolate",
        "cheesecake",
        "macaron",
    ],
];

fn owned(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub action_fraction: f64,
    /// Per-token probability that an `Action` document emits a cue word.
    pub cue_strength: f64,
    /// Pairwise-disjoint planted topic vocabularies.
    pub topic_vocabs: Vec<Vec<String>>,
    pub cue_words: Vec<String>,
    pub filler_words: Vec<String>,
    /// Per-token probability of a filler word (among non-cue tokens).
    pub filler_rate: f64,
    /// Inclusive token-count range.
    pub doc_length: (usize, usize),
    pub reviews_per_business: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 1200,
            action_fraction: 0.5,
            cue_strength: 0.15,
            topic_vocabs: TOPIC_WORDS.iter().map(|t| owned(t)).collect(),
            cue_words: owned(CUE_WORDS),
            filler_words: owned(FILLER_WORDS),
            filler_rate: 0.3,
            doc_length: (20, 40),
            reviews_per_business: 8,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(format!("synth: {m}")));
        if self.n_docs < 10 {
            return fail(format!("n_docs must be at least 10, got {}", self.n_docs));
        }
        if !(self.action_fraction > 0.0 && self.action_fraction < 1.0) {
            return fail("action_fraction must lie in (0, 1)".into());
        }
        if !(0.0..=1.0).contains(&self.cue_strength) || !(0.0..=1.0).contains(&self.filler_rate) {
            return fail("cue_strength and filler_rate must lie in [0, 1]".into());
        }
        if self.topic_vocabs.is_empty() || self.topic_vocabs.iter().any(Vec::is_empty) {
            return fail("need at least one non-empty topic vocabulary".into());
        }
        if self.cue_strength > 0.0 && self.cue_words.is_empty() {
            return fail("cue_strength > 0 needs cue words".into());
        }
        if self.filler_rate > 0.0 && self.filler_words.is_empty() {
            return fail("filler_rate > 0 needs filler words".into());
        }
        let (lo, hi) = self.doc_length;
        if lo == 0 || lo > hi {
            return fail(format!("invalid doc_length range {lo}..={hi}"));
        }
        if self.reviews_per_business == 0 {
            return fail("reviews_per_business must be at least 1".into());
        }
        let mut seen = std::collections::HashSet::new();
        for word in self.topic_vocabs.iter().flatten() {
            if !seen.insert(word) {
                return fail(format!("topic vocabularies overlap on {word:?}"));
            }
        }
        Ok(())
    }

    pub fn n_action(&self) -> usize {
        (self.n_docs as f64 * self.action_fraction).round() as usize
    }
}

/// Generate `cfg.n_docs` documents with exactly `round(n_docs ·
/// action_fraction)` labeled `Action`. Documents of one business share a
/// label.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<Vec<LabeledDocument>> {
    cfg.validate()?;
    let mut rng = seed::rng(cfg.seed);
    let n_action = cfg.n_action();
    let mut labels: Vec<Label> = (0..cfg.n_docs)
        .map(|i| {
            if i < n_action {
                Label::Action
            } else {
                Label::NoAction
            }
        })
        .collect();
    labels.shuffle(&mut rng);

    let mut docs = Vec::with_capacity(cfg.n_docs);
    let mut per_label_seen = [0usize; 2];
    for (i, &label) in labels.iter().enumerate() {
        let topic = &cfg.topic_vocabs[rng.random_range(0..cfg.topic_vocabs.len())];
        let len = rng.random_range(cfg.doc_length.0..=cfg.doc_length.1);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            let pool = if label == Label::Action && rng.random::<f64>() < cfg.cue_strength {
                &cfg.cue_words
            } else if rng.random::<f64>() < cfg.filler_rate {
                &cfg.filler_words
            } else {
                topic
            };
            words.push(&pool[rng.random_range(0..pool.len())]);
        }
        // businesses are homogeneous in label so that file round trips
        // through inspection records reproduce the labels
        let slot = per_label_seen[label.index()];
        per_label_seen[label.index()] += 1;
        let business = slot / cfg.reviews_per_business;
        let prefix = match label {
            Label::Action => "a",
            Label::NoAction => "n",
        };
        docs.push(LabeledDocument {
            doc_id: format!("r{:05}", i + 1),
            text: words.join(" "),
            label,
            business_id: format!("b{prefix}{business:04}"),
        });
    }
    Ok(docs)
}

#[derive(Serialize)]
struct ReviewOut<'a> {
    review_id: &'a str,
    business_id: &'a str,
    date: String,
    text: &'a str,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn base_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date")
}

/// Days between the base date and the single inspection of every business.
const INSPECTION_DAY: i64 = 330;

/// Write documents as review, inspection and link files in `dir`.
///
/// Reviews are dated within the 300 days after 2015-01-01; every business
/// gets one inspection on day 330 whose action flag is the business label,
/// so labeling with any window of at least 330 days reproduces the labels.
pub fn write_dataset(docs: &[LabeledDocument], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| -> Result<(BufWriter<File>, std::path::PathBuf)> {
        let path = dir.join(name);
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok((BufWriter::new(f), path))
    };

    let (mut reviews, path) = create(REVIEWS_FILE)?;
    for (i, d) in docs.iter().enumerate() {
        let date = base_date() + chrono::Duration::days((i as i64 * 37) % 300);
        let rec = ReviewOut {
            review_id: &d.doc_id,
            business_id: &d.business_id,
            date: date.format("%Y-%m-%d").to_string(),
            text: &d.text,
        };
        let line = serde_json::to_string(&rec).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(reviews, "{line}").map_err(|e| Error::io(&path, e))?;
    }
    reviews.flush().map_err(|e| Error::io(&path, e))?;

    let mut businesses: Vec<(&str, Label)> = Vec::new();
    for d in docs {
        if !businesses.iter().any(|(b, _)| *b == d.business_id) {
            businesses.push((&d.business_id, d.label));
        }
    }
    let inspection_date = (base_date() + chrono::Duration::days(INSPECTION_DAY)).format("%Y-%m-%d");

    let (mut inspections, path) = create(INSPECTIONS_FILE)?;
    let (mut links, links_path) = create(LINKS_FILE)?;
    writeln!(inspections, "facility_id,date,action").map_err(io_err(&path))?;
    writeln!(links, "business_id,facility_id").map_err(io_err(&links_path))?;
    for (business, label) in &businesses {
        let facility = format!("f{}", &business[1..]);
        let flag = if *label == Label::Action { "Y" } else { "N" };
        writeln!(inspections, "{facility},{inspection_date},{flag}").map_err(io_err(&path))?;
        writeln!(links, "{business},{facility}").map_err(io_err(&links_path))?;
    }
    inspections.flush().map_err(io_err(&path))?;
    links.flush().map_err(io_err(&links_path))?;
    Ok(())
}
