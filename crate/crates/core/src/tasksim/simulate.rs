use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adjusted_mutual_information;
use crate::{seed, Error, Result};

const COLUMN_TOL: f64 = 1e-12;

/// Column-stochastic `P(synthetic = s_i | real = r_j)` with `alpha` on the
/// diagonal and the remaining mass spread evenly.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    labels: Vec<String>,
    alpha: f64,
    entries: Vec<Vec<f64>>,
}

impl LabelMatrix {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `entries()[i][j]` is the probability of synthetic label `i` given real label `j`.
    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Draws a synthetic label given real label `real` from one uniform variate.
    fn sample(&self, real: usize, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, row) in self.entries.iter().enumerate() {
            acc += row[real];
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap below 1.0; take the last nonzero entry.
        (0..self.size()).rev().find(|&i| self.entries[i][real] > 0.0).unwrap_or(real)
    }
}

pub fn generate_label_matrix(labels: &[String], alpha: f64) -> Result<LabelMatrix> {
    let c = labels.len();
    if c < 2 {
        return Err(Error::InvalidConfig(format!(
            "label matrix needs at least 2 labels, got {c}"
        )));
    }
    let min = 1.0 / c as f64;
    if !(alpha >= min - COLUMN_TOL && alpha <= 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            min,
            classes: c,
        });
    }
    let off = (1.0 - alpha) / (c - 1) as f64;
    let entries = (0..c)
        .map(|i| (0..c).map(|j| if i == j { alpha } else { off }).collect())
        .collect();
    Ok(LabelMatrix {
        labels: labels.to_vec(),
        alpha,
        entries,
    })
}

/// A real label column plus synthetic columns simulated from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSet {
    pub n: usize,
    /// Total task count, the real task included.
    #[serde(rename = "T")]
    pub tasks: usize,
    pub alphas: Vec<f64>,
    pub ami: Vec<f64>,
    pub labels: Vec<String>,
    pub real: Vec<usize>,
    pub synthetic: Vec<Vec<usize>>,
}

impl TaskSet {
    pub fn synthetic_count(&self) -> usize {
        self.synthetic.len()
    }

    pub fn mean_ami(&self) -> Option<f64> {
        (!self.ami.is_empty()).then(|| self.ami.iter().sum::<f64>() / self.ami.len() as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<TaskSet> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Simulates `tasks - 1` synthetic label columns over the first `n` real
/// labels, one per entry of `alphas`.
///
/// Task `t` draws from its own stream of the seeded generator, so tasks are
/// independent and adding a task never changes the earlier ones.
pub fn simulate_tasks(
    real_labels: &[usize],
    labels: &[String],
    tasks: usize,
    n: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<TaskSet> {
    if tasks == 0 || alphas.len() != tasks - 1 {
        return Err(Error::InvalidConfig(format!(
            "{} alphas for {tasks} tasks; need one per synthetic task",
            alphas.len()
        )));
    }
    if n > real_labels.len() {
        return Err(Error::NotEnoughTokens {
            requested: n,
            available: real_labels.len(),
        });
    }
    let real = &real_labels[..n];
    if let Some(&bad) = real.iter().find(|&&r| r >= labels.len()) {
        return Err(Error::InvalidConfig(format!(
            "real label index {bad} outside a legend of {}",
            labels.len()
        )));
    }
    let matrices = alphas
        .iter()
        .map(|&a| generate_label_matrix(labels, a))
        .collect::<Result<Vec<_>>>()?;

    let mut synthetic = Vec::with_capacity(matrices.len());
    let mut ami = Vec::with_capacity(matrices.len());
    for (t, m) in matrices.iter().enumerate() {
        let mut rng = seed::rng_stream(seed, t as u64);
        let column: Vec<usize> = real.iter().map(|&r| m.sample(r, rng.random::<f64>())).collect();
        ami.push(if n == 0 {
            0.0
        } else {
            adjusted_mutual_information(real, &column)?
        });
        synthetic.push(column);
    }
    Ok(TaskSet {
        n,
        tasks,
        alphas: alphas.to_vec(),
        ami,
        labels: labels.to_vec(),
        real: real.to_vec(),
        synthetic,
    })
}
