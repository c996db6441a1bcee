//! Deterministic generator for a small newswire-like NER corpus.
//!
//! Entity names are built from syllables and drawn with Zipf-like
//! frequencies, so a model sees the frequent names early and keeps meeting
//! new ones as the sample grows. Context words cue the entity type but
//! not perfectly, and a share of names are used for two types.
//! Output is tagged IOB1 like the CoNLL-2003 release.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{LabeledCorpus, Scheme, Token};
use crate::seed;

/// Token count of the corpus shipped in `data/desk_ner.conll`.
pub const BUNDLED_TOKENS: usize = 30_000;
pub const BUNDLED_SEED: u64 = 2020;

/// The corpus shipped with the crate.
pub fn bundled() -> LabeledCorpus {
    super::parse_conll(include_str!("../../data/desk_ner.conll")).expect("bundled corpus parses")
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ra", "ven", "tor", "sel", "dan", "bri", "mar", "quin", "zu", "el", "os",
    "an", "ter", "pol", "gra", "fen", "lin", "ba", "ro", "shi", "ne", "vo", "cal", "dre", "um",
    "ith", "jo", "ke", "sa",
];

const FILLER: &[&str] = &[
    "the", "a", "of", "to", "and", "on", "for", "with", "was", "has", "will", "that", "after",
    "last", "week", "year", "new", "first", "two", "three", "percent", "million", "officials",
    "market", "government", "talks", "report", "season", "police", "prices", "early", "later",
    "also", "but", "by", "from", "at", "its", "their", "more", "than", "over", "up", "down",
];

const DAYS: &[&str] = &["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Per,
    Loc,
    Org,
    Misc,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Per => "PER",
            Kind::Loc => "LOC",
            Kind::Org => "ORG",
            Kind::Misc => "MISC",
        }
    }
}

/// Sentence templates. `{X}` slots are entities, `{D}` a weekday, `{N}` a
/// number, `{F}` one to three filler words.
const TEMPLATES: &[&str] = &[
    "{PER} said on {D} that {ORG} would cut {N} jobs .",
    "{PER} , who joined {ORG} in {N} , told reporters in {LOC} {F} .",
    "shares of {ORG} rose {N} percent in {LOC} {F} .",
    "the {MISC} government said {PER} would visit {LOC} next week .",
    "{ORG} beat {ORG} {N} - {N} in {LOC} on {D} .",
    "police in {LOC} arrested {N} people after {F} protests .",
    "{PER} scored twice as {ORG} won the {MISC} Cup .",
    "the {MISC} minister met {PER} in {LOC} {F} .",
    "{LOC} and {LOC} signed a trade deal on {D} .",
    "Mr {PER} , chairman of {ORG} , resigned {F} .",
    "the {MISC} team lost to {ORG} {F} .",
    "{F} in {LOC} , {PER} told {ORG} {F} .",
    "{ORG} said its profit rose {N} percent {F} .",
    "rain delayed play in {LOC} on {D} .",
    "{PER} of {LOC} finished ahead of {PER} {F} .",
    "{MISC} officials said {F} talks with {LOC} would resume .",
    "the {ORG} {ORG} merger was approved on {D} .",
    "{F} {N} {F} .",
    "{PER} met {PER} at the {MISC} summit in {LOC} .",
    "{ORG} shares fell {N} percent after {PER} {F} .",
    "prices in {LOC} {F} {N} percent .",
    "{PER} , a {MISC} striker , joined {ORG} on {D} .",
];

struct Gazetteer {
    first: Vec<String>,
    last: Vec<String>,
    loc: Vec<Vec<String>>,
    org: Vec<Vec<String>>,
    misc: Vec<Vec<String>>,
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn coin(rng: &mut ChaCha8Rng, syllables: std::ops::RangeInclusive<usize>) -> String {
    let k = rng.random_range(syllables);
    let word: String = (0..k).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    capitalize(&word)
}

impl Gazetteer {
    fn build(rng: &mut ChaCha8Rng) -> Self {
        let first: Vec<String> = (0..250).map(|_| coin(rng, 2..=2)).collect();
        let last: Vec<String> = (0..500).map(|_| coin(rng, 2..=3)).collect();
        let mut loc: Vec<Vec<String>> = (0..350)
            .map(|i| match i % 7 {
                0 => vec!["Port".to_string(), coin(rng, 2..=2)],
                1 => vec![coin(rng, 2..=3), "City".to_string()],
                _ => vec![coin(rng, 2..=3)],
            })
            .collect();
        let org_suffix = ["Corp", "Bank", "United", "Group", "Airlines"];
        let mut org: Vec<Vec<String>> = (0..300)
            .map(|i| match i % 3 {
                0 => vec![coin(rng, 2..=3)],
                _ => vec![coin(rng, 1..=2), org_suffix[i % org_suffix.len()].to_string()],
            })
            .collect();
        let misc: Vec<Vec<String>> = (0..150)
            .map(|i| match i % 2 {
                0 => vec![format!("{}ian", coin(rng, 1..=2))],
                _ => vec![coin(rng, 2..=2), "Open".to_string()],
            })
            .collect();
        // Club names borrowed from places: the same surface is LOC in one
        // sentence and ORG in another.
        for i in 0..40 {
            org[3 * i] = loc[5 * i + 2].clone();
        }
        // Some surnames double as place names.
        for i in 0..30 {
            loc[7 * i + 4] = vec![last[11 * i].clone()];
        }
        Gazetteer {
            first,
            last,
            loc,
            org,
            misc,
        }
    }

    fn mention(&self, kind: Kind, rng: &mut ChaCha8Rng) -> Vec<String> {
        match kind {
            Kind::Per => {
                let last = self.last[zipf(rng, self.last.len())].clone();
                match rng.random_range(0..10) {
                    0..=5 => vec![self.first[zipf(rng, self.first.len())].clone(), last],
                    6..=8 => vec![last],
                    _ => vec![self.first[zipf(rng, self.first.len())].clone()],
                }
            }
            Kind::Loc => self.loc[zipf(rng, self.loc.len())].clone(),
            Kind::Org => self.org[zipf(rng, self.org.len())].clone(),
            Kind::Misc => self.misc[zipf(rng, self.misc.len())].clone(),
        }
    }
}

/// Index in `0..len` with probability proportional to `1 / (i + 1)`.
fn zipf(rng: &mut ChaCha8Rng, len: usize) -> usize {
    // Inverse CDF of the continuous approximation on [1, len + 1).
    let u: f64 = rng.random();
    let x = ((len as f64 + 1.0).ln() * u).exp() - 1.0;
    (x as usize).min(len - 1)
}

/// Generates sentences until at least `target_tokens` tokens exist.
pub fn generate(target_tokens: usize, seed: u64) -> LabeledCorpus {
    let mut rng = seed::rng(seed);
    let gaz = Gazetteer::build(&mut rng);
    let mut sentences = Vec::new();
    let mut count = 0;
    while count < target_tokens.max(1) {
        let template = TEMPLATES.choose(&mut rng).unwrap();
        let sentence = fill(template, &gaz, &mut rng);
        count += sentence.len();
        sentences.push(sentence);
    }
    LabeledCorpus::new(sentences, Scheme::Iob1).expect("generated corpus is valid IOB1")
}

fn fill(template: &str, gaz: &Gazetteer, rng: &mut ChaCha8Rng) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::new();
    let mut prev_kind: Option<Kind> = None;
    for slot in template.split_whitespace() {
        let kind = match slot {
            "{PER}" => Some(Kind::Per),
            "{LOC}" => Some(Kind::Loc),
            "{ORG}" => Some(Kind::Org),
            "{MISC}" => Some(Kind::Misc),
            _ => None,
        };
        if let Some(kind) = kind {
            let prefix = if prev_kind == Some(kind) { "B" } else { "I" };
            for (i, word) in gaz.mention(kind, rng).into_iter().enumerate() {
                let p = if i == 0 { prefix } else { "I" };
                out.push(Token::new(word, format!("{p}-{}", kind.tag())));
            }
            prev_kind = Some(kind);
            continue;
        }
        prev_kind = None;
        match slot {
            "{D}" => out.push(Token::new(*DAYS.choose(rng).unwrap(), "O")),
            "{N}" => out.push(Token::new(rng.random_range(1..100).to_string(), "O")),
            "{F}" => {
                for _ in 0..rng.random_range(1..=3) {
                    out.push(Token::new(*FILLER.choose(rng).unwrap(), "O"));
                }
            }
            word => out.push(Token::new(word, "O")),
        }
    }
    out
}
