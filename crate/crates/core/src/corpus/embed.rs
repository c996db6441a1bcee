use std::borrow::Cow;
use std::collections::HashMap;
use std::path::Path;

use rand_distr::{Distribution, Normal};

use crate::{seed, Error, Result};

pub const DEFAULT_DIM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingSource {
    Hashed,
    Loaded,
}

/// Word vectors, either loaded from a text file or synthesized on demand.
///
/// A hashed vector is a pure function of `(lowercased word, dim, seed)`:
/// components are i.i.d. normal with standard deviation `1/sqrt(dim)`.
/// Loaded tables fall back to hashed vectors for unknown words.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    seed: u64,
    source: EmbeddingSource,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn hashed(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dim,
            seed,
            source: EmbeddingSource::Hashed,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> EmbeddingSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Seed used for hashed fallbacks.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn lookup(&self, word: &str) -> Cow<'_, [f64]> {
        if let Some(v) = self.vectors.get(word) {
            return Cow::Borrowed(v);
        }
        let lower = word.to_lowercase();
        if let Some(v) = self.vectors.get(&lower) {
            return Cow::Borrowed(v);
        }
        Cow::Owned(hashed_vector(&lower, self.dim, self.seed))
    }
}

fn hashed_vector(lowercased: &str, dim: usize, global_seed: u64) -> Vec<f64> {
    let key = seed::derive(global_seed, &[seed::fnv1a(lowercased.as_bytes()), dim as u64]);
    let mut rng = seed::rng(key);
    let normal = Normal::new(0.0, 1.0 / (dim as f64).sqrt()).expect("positive std");
    (0..dim).map(|_| normal.sample(&mut rng)).collect()
}

/// Reads `word v1 ... vd` lines. A leading `count dim` header is skipped.
pub fn load_vectors(path: &Path) -> Result<EmbeddingTable> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_vectors(&text)
}

pub(crate) fn parse_vectors(text: &str) -> Result<EmbeddingTable> {
    let mut dim = None;
    let mut vectors = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if lineno == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
            continue;
        }
        let malformed = || Error::MalformedLine {
            line: lineno + 1,
            content: line.chars().take(80).collect(),
        };
        if fields.len() < 2 {
            return Err(malformed());
        }
        let values = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| malformed()))
            .collect::<Result<Vec<f64>>>()?;
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected {
            return Err(Error::InconsistentDim {
                line: lineno + 1,
                expected,
                found: values.len(),
            });
        }
        vectors.insert(fields[0].to_string(), values);
    }
    let dim = dim.ok_or(Error::EmptyInput)?;
    Ok(EmbeddingTable {
        dim,
        seed: 0,
        source: EmbeddingSource::Loaded,
        vectors,
    })
}
