//! CoNLL ingestion, tagging-scheme conversion and window features.

mod embed;
mod scheme;
pub mod synth;
mod window;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use embed::{load_vectors, EmbeddingSource, EmbeddingTable, DEFAULT_DIM};
pub use scheme::{convert_io_to_iob2, iob1_to_iob2, label_type, strip_prefix};
pub use window::{embed_window, extract_windows, window_at, WindowSample, CONTEXT};

pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Iob1,
    Iob2,
    Io,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Iob1 => "IOB1",
            Scheme::Iob2 => "IOB2",
            Scheme::Io => "IO",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub label: String,
}

impl Token {
    pub fn new(surface: impl Into<String>, label: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            label: label.into(),
        }
    }
}

/// Pre-tokenized sentences with per-token tags in one scheme.
///
/// `label_set` holds entity *types* (prefixes stripped), `O` first and the
/// remaining types sorted, so label indices do not depend on corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    sentences: Vec<Vec<Token>>,
    scheme: Scheme,
    label_set: Vec<String>,
}

impl LabeledCorpus {
    /// Validates every label against `scheme` and builds the label set.
    pub fn new(sentences: Vec<Vec<Token>>, scheme: Scheme) -> Result<Self> {
        let sentences: Vec<Vec<Token>> = sentences.into_iter().filter(|s| !s.is_empty()).collect();
        if sentences.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut types = BTreeSet::new();
        for sentence in &sentences {
            let mut prev: Option<&str> = None;
            for token in sentence {
                if token.surface.is_empty() || token.label.is_empty() {
                    return Err(Error::InvalidConfig(format!(
                        "token {:?}/{:?} has an empty field",
                        token.surface, token.label
                    )));
                }
                check_label(&token.label, prev, scheme)?;
                types.insert(label_type(&token.label).to_string());
                prev = Some(&token.label);
            }
        }
        types.remove(OUTSIDE);
        let mut label_set = vec![OUTSIDE.to_string()];
        label_set.extend(types);
        Ok(LabeledCorpus {
            sentences,
            scheme,
            label_set,
        })
    }

    pub fn sentences(&self) -> &[Vec<Token>] {
        &self.sentences
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn label_set(&self) -> &[String] {
        &self.label_set
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    /// Index of a label's type in `label_set`.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        let ty = label_type(label);
        self.label_set.iter().position(|l| l == ty)
    }

    /// Type indices of every token in corpus order.
    pub fn label_indices(&self) -> Vec<usize> {
        self.tokens()
            .map(|t| self.label_index(&t.label).expect("label set covers corpus"))
            .collect()
    }

    /// Strips B-/I- prefixes, producing an IO corpus.
    pub fn convert_iob_to_io(&self) -> Result<LabeledCorpus> {
        if self.scheme == Scheme::Io {
            return Err(Error::WrongScheme(Scheme::Io.name()));
        }
        let sentences = self
            .sentences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| Token::new(t.surface.clone(), strip_prefix(&t.label)))
                    .collect()
            })
            .collect();
        Ok(LabeledCorpus {
            sentences,
            scheme: Scheme::Io,
            label_set: self.label_set.clone(),
        })
    }

    /// Labels of one sentence rewritten as IOB2.
    pub fn sentence_iob2(&self, index: usize) -> Vec<String> {
        let labels: Vec<String> = self.sentences[index].iter().map(|t| t.label.clone()).collect();
        match self.scheme {
            Scheme::Iob2 => labels,
            Scheme::Iob1 => iob1_to_iob2(&labels),
            Scheme::Io => convert_io_to_iob2(&labels),
        }
    }

    /// CoNLL text: `surface label` per line, blank line between sentences.
    pub fn to_conll(&self) -> String {
        let mut out = String::new();
        for (i, sentence) in self.sentences.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for token in sentence {
                out.push_str(&token.surface);
                out.push(' ');
                out.push_str(&token.label);
                out.push('\n');
            }
        }
        out
    }

    pub fn read(path: &Path, scheme: Scheme) -> Result<LabeledCorpus> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
            path: path.to_path_buf(),
            source,
        })?;
        parse_conll_as(&text, scheme)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_conll())?;
        Ok(())
    }
}

fn check_label(label: &str, prev: Option<&str>, scheme: Scheme) -> Result<()> {
    let bad = |why: &str| Error::InvalidConfig(format!("label {label:?} {why} under {scheme}"));
    let prefixed = label.starts_with("B-") || label.starts_with("I-");
    match scheme {
        Scheme::Io if prefixed => Err(bad("carries a B-/I- prefix")),
        Scheme::Io => Ok(()),
        _ if label == OUTSIDE => Ok(()),
        _ if !prefixed || label.len() == 2 => Err(bad("lacks a B-/I- prefix")),
        Scheme::Iob2 if label.starts_with("I-") => match prev {
            Some(p) if p != OUTSIDE && label_type(p) == label_type(label) => Ok(()),
            _ => Err(bad("does not continue a span")),
        },
        _ => Ok(()),
    }
}

/// Parses CoNLL text, assuming IOB1 tags as in the CoNLL-2003 release.
pub fn parse_conll(text: &str) -> Result<LabeledCorpus> {
    parse_conll_as(text, Scheme::Iob1)
}

/// Whitespace-column CoNLL: first column is the surface, last column the
/// label. Blank lines and `-DOCSTART-` lines end a sentence.
pub fn parse_conll_as(text: &str, scheme: Scheme) -> Result<LabeledCorpus> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut cols = line.split_whitespace();
        let Some(first) = cols.next() else {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        };
        if first == "-DOCSTART-" {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let Some(last) = cols.last() else {
            return Err(Error::MalformedLine {
                line: lineno + 1,
                content: line.to_string(),
            });
        };
        current.push(Token::new(first, last));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    LabeledCorpus::new(sentences, scheme)
}
