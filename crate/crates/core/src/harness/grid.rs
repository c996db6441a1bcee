use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::DEFAULT_DIM;
use crate::mtlnet::{AdamConfig, LossNorm};
use crate::{seed, Error, Result};

/// Learner settings shared by every cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSettings {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub loss_norm: LossNorm,
    /// Optional `word v1 ... vd` file; unknown words fall back to hashing.
    pub vectors: Option<PathBuf>,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            embedding_dim: DEFAULT_DIM,
            hidden_dim: 64,
            epochs: 100,
            batch_size: 100,
            adam: AdamConfig::default(),
            loss_norm: LossNorm::Sum,
            vectors: None,
        }
    }
}

/// Sweep definition, read from JSON.
///
/// Balanced grids list `n`; unbalanced grids list `n_ner` and `n_syn`
/// instead, and cells with `n_syn < n_ner` are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(default = "default_true")]
    pub balanced: bool,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub n_ner: Vec<usize>,
    #[serde(default)]
    pub n_syn: Vec<usize>,
    #[serde(rename = "T")]
    pub tasks: Vec<usize>,
    pub alpha: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// CoNLL file; the bundled corpus when absent.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// Size of the held-out tail; `min(2000, 20% of the corpus)` when absent.
    #[serde(default)]
    pub eval_tokens: Option<usize>,
    #[serde(default)]
    pub model: ModelSettings,
}

fn default_true() -> bool {
    true
}

fn default_runs() -> usize {
    5
}

/// Coordinates of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Tokens of the real task (`n_ner` in unbalanced grids).
    pub n: usize,
    /// Tokens of each synthetic task when it differs from `n`.
    pub n_syn: Option<usize>,
    pub tasks: usize,
    pub alpha: f64,
}

impl Cell {
    pub fn synthetic_tokens(&self) -> usize {
        self.n_syn.unwrap_or(self.n)
    }

    /// Seed of this cell, a function of its coordinates only.
    pub fn seed(&self, base: u64) -> u64 {
        seed::derive(
            base,
            &[
                self.n as u64,
                self.n_syn.map_or(u64::MAX, |v| v as u64),
                self.tasks as u64,
                self.alpha.to_bits(),
            ],
        )
    }

    pub fn same_coordinates(&self, other: &Cell) -> bool {
        self.n == other.n
            && self.n_syn == other.n_syn
            && self.tasks == other.tasks
            && self.alpha.to_bits() == other.alpha.to_bits()
    }
}

impl SweepGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        let grid: SweepGrid = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("sweep config: {e}")))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::UnreadableFile {
            path: path.to_path_buf(),
            source,
        })?;
        SweepGrid::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.balanced && self.n.is_empty() {
            return bad("balanced grid needs a non-empty n list".into());
        }
        if !self.balanced && (self.n_ner.is_empty() || self.n_syn.is_empty()) {
            return bad("unbalanced grid needs non-empty n_ner and n_syn lists".into());
        }
        if self.tasks.is_empty() || self.tasks.contains(&0) {
            return bad("T list must be non-empty with T >= 1".into());
        }
        if self.alpha.is_empty() {
            return bad("alpha list must be non-empty".into());
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return bad(format!("alpha {a} outside (0, 1]"));
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        let m = &self.model;
        if m.embedding_dim == 0 || m.hidden_dim == 0 || m.batch_size == 0 {
            return bad("model dimensions and batch size must be positive".into());
        }
        if self.cells().is_empty() {
            return bad("grid has no valid cells (need n_syn >= n_ner)".into());
        }
        Ok(())
    }

    /// Cartesian product in canonical order: sizes, then T, then alpha.
    pub fn cells(&self) -> Vec<Cell> {
        let sizes: Vec<(usize, Option<usize>)> = if self.balanced {
            self.n.iter().map(|&n| (n, None)).collect()
        } else {
            self.n_ner
                .iter()
                .flat_map(|&a| self.n_syn.iter().map(move |&b| (a, b)))
                .filter(|(a, b)| b >= a)
                .map(|(a, b)| (a, Some(b)))
                .collect()
        };
        let mut cells = Vec::new();
        for &(n, n_syn) in &sizes {
            for &tasks in &self.tasks {
                for &alpha in &self.alpha {
                    cells.push(Cell {
                        n,
                        n_syn,
                        tasks,
                        alpha,
                    });
                }
            }
        }
        cells
    }
}
