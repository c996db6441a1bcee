use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::variation::{mutate_hoist, mutate_point, mutate_subtree, random_expr, subtree_crossover};
use super::Expr;
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub p_crossover: f64,
    pub p_subtree_mutation: f64,
    pub p_hoist_mutation: f64,
    pub p_point_mutation: f64,
    /// Fitness penalty per node.
    pub parsimony: f64,
    pub const_range: (f64, f64),
    pub init_depth: (usize, usize),
    pub seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            population_size: 1000,
            generations: 20,
            tournament_size: 20,
            p_crossover: 0.7,
            p_subtree_mutation: 0.1,
            p_hoist_mutation: 0.1,
            p_point_mutation: 0.1,
            parsimony: 0.2,
            const_range: (-1.0, 1.0),
            init_depth: (2, 6),
            seed: 0,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.population_size == 0 || self.generations == 0 || self.tournament_size == 0 {
            return bad("population, generations and tournament size must be positive");
        }
        let probs = [
            self.p_crossover,
            self.p_subtree_mutation,
            self.p_hoist_mutation,
            self.p_point_mutation,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || probs.iter().sum::<f64>() > 1.0 + 1e-9 {
            return bad("operator probabilities must lie in [0, 1] and sum to at most 1");
        }
        if self.parsimony.is_nan() || self.parsimony < 0.0 {
            return bad("parsimony must be non-negative");
        }
        let (lo, hi) = self.const_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad("constant range must be finite and ordered");
        }
        let (dlo, dhi) = self.init_depth;
        if dlo > dhi || dhi > super::MAX_DEPTH {
            return bad("initial depth range must be ordered and within the depth limit");
        }
        Ok(())
    }
}

/// Regression rows and targets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let width = x.first().map_or(0, Vec::len);
        if x.iter().any(|r| r.len() != width) {
            return Err(Error::ShapeMismatch("rows differ in width".into()));
        }
        if x.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("data must be finite".into()));
        }
        Ok(Dataset { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: rows.iter().map(|&i| self.x[i].clone()).collect(),
            y: rows.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// Shuffled `(train, test)` row indices with `round(n * fraction)` train rows.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng(seed));
    let cut = ((n as f64 * train_fraction).round() as usize).min(n);
    let test = idx.split_off(cut);
    (idx, test)
}

/// Mean squared error, saturating at `f64::MAX`.
pub fn mse(e: &Expr, data: &Dataset) -> f64 {
    let mut stack = Vec::with_capacity(e.len());
    let sum: f64 = data
        .x
        .iter()
        .zip(&data.y)
        .map(|(row, y)| {
            let d = e.eval_unchecked(row, &mut stack) - y;
            d * d
        })
        .sum();
    let m = sum / data.len() as f64;
    if m.is_finite() {
        m
    } else {
        f64::MAX
    }
}

/// Penalized fitness: MSE plus `parsimony` per node. Lower is better.
pub fn fitness(e: &Expr, data: &Dataset, parsimony: f64) -> f64 {
    mse(e, data) + parsimony * e.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub expr: Expr,
    pub mse: f64,
    pub fitness: f64,
}

impl Individual {
    fn score(expr: Expr, data: &Dataset, parsimony: f64) -> Self {
        let mse = mse(&expr, data);
        let fitness = mse + parsimony * expr.len() as f64;
        Individual { expr, mse, fitness }
    }
}

/// Index of the best by `key`, ties to fewer nodes then earlier index.
fn argmin_by(pop: &[Individual], key: impl Fn(&Individual) -> f64) -> usize {
    let mut best = 0;
    for (i, ind) in pop.iter().enumerate().skip(1) {
        let b = &pop[best];
        let ord = key(ind)
            .total_cmp(&key(b))
            .then(ind.expr.len().cmp(&b.expr.len()));
        if ord.is_lt() {
            best = i;
        }
    }
    best
}

/// Best of `k` uniform draws (with replacement) by penalized fitness.
pub fn tournament_select<'a>(pop: &'a [Individual], k: usize, rng: &mut impl Rng) -> &'a Individual {
    assert!(!pop.is_empty() && k >= 1, "tournament needs a population and k >= 1");
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..k {
        let c = rng.random_range(0..pop.len());
        let (a, b) = (&pop[c], &pop[best]);
        let ord = a
            .fitness
            .total_cmp(&b.fitness)
            .then(a.expr.len().cmp(&b.expr.len()))
            .then(c.cmp(&best));
        if ord.is_lt() {
            best = c;
        }
    }
    &pop[best]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub best: Expr,
    pub train_mse: f64,
    /// MSE on the held-out rows; `None` when there were none.
    pub test_mse: Option<f64>,
    /// Best penalized fitness after each generation.
    pub trace: Vec<f64>,
    /// Factor the target was multiplied by before fitting.
    pub scale: f64,
}

/// Runs `cfg.generations` rounds of selection and variation on `train`.
///
/// The single best individual survives every generation unchanged. The
/// returned expression is the final population's lowest raw training MSE.
/// Randomness for individual `i` of generation `g` comes from its own
/// stream, so the run is identical however rayon schedules it.
pub fn evolve(cfg: &GpConfig, train: &Dataset, test: &Dataset) -> Result<FitResult> {
    cfg.validate()?;
    if train.len() < 2 {
        return Err(Error::TooFewRecords {
            required: 2,
            found: train.len(),
        });
    }
    let n_vars = train.n_vars();
    if n_vars == 0 {
        return Err(Error::InvalidConfig("no input columns".into()));
    }
    if !test.is_empty() && test.n_vars() != n_vars {
        return Err(Error::ShapeMismatch("train and test widths differ".into()));
    }
    let held_out = |e: &Expr| (!test.is_empty()).then(|| mse(e, test));

    if train.y.iter().all(|&v| v == train.y[0]) {
        let best = Expr::constant(train.y[0]);
        return Ok(FitResult {
            test_mse: held_out(&best),
            train_mse: 0.0,
            trace: vec![cfg.parsimony; cfg.generations],
            best,
            scale: 1.0,
        });
    }

    let stream_key = |g: usize| seed::derive(cfg.seed, &[g as u64]);
    let key0 = stream_key(0);
    let mut pop: Vec<Individual> = (0..cfg.population_size)
        .into_par_iter()
        .map(|i| {
            let e = random_expr(cfg, n_vars, &mut seed::rng_stream(key0, i as u64));
            Individual::score(e, train, cfg.parsimony)
        })
        .collect();

    let mut thresholds = [
        cfg.p_crossover,
        cfg.p_subtree_mutation,
        cfg.p_hoist_mutation,
        cfg.p_point_mutation,
    ];
    for k in 1..thresholds.len() {
        thresholds[k] += thresholds[k - 1];
    }

    let mut trace = Vec::with_capacity(cfg.generations);
    for g in 1..=cfg.generations {
        let key = stream_key(g);
        let elite = argmin_by(&pop, |ind| ind.fitness);
        let next: Vec<Individual> = (0..cfg.population_size)
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return pop[elite].clone();
                }
                let mut rng = seed::rng_stream(key, i as u64);
                let parent = &tournament_select(&pop, cfg.tournament_size, &mut rng).expr;
                let roll: f64 = rng.random();
                let child = if roll < thresholds[0] {
                    let donor = &tournament_select(&pop, cfg.tournament_size, &mut rng).expr;
                    subtree_crossover(parent, donor, &mut rng)
                } else if roll < thresholds[1] {
                    mutate_subtree(parent, cfg, n_vars, &mut rng)
                } else if roll < thresholds[2] {
                    mutate_hoist(parent, &mut rng)
                } else if roll < thresholds[3] {
                    mutate_point(parent, cfg, n_vars, &mut rng)
                } else {
                    parent.clone()
                };
                Individual::score(child, train, cfg.parsimony)
            })
            .collect();
        pop = next;
        trace.push(pop[argmin_by(&pop, |ind| ind.fitness)].fitness);
    }

    let best = pop.swap_remove(argmin_by(&pop, |ind| ind.mse));
    Ok(FitResult {
        test_mse: held_out(&best.expr),
        train_mse: best.mse,
        best: best.expr,
        trace,
        scale: 1.0,
    })
}
