//! Genetic-programming symbolic regression.
//!
//! Expressions are prefix-ordered node arrays over a small primitive set
//! with protected semantics, so every tree evaluates to a finite number on
//! finite input. Search follows the usual recipe: ramped half-and-half
//! initialization, tournament selection, subtree crossover, subtree, hoist
//! and point mutation, and a parsimony penalty on tree size.

mod evolve;
mod expr;
mod variation;

pub use evolve::{
    evolve, fitness, mse, split_indices, tournament_select, Dataset, FitResult, GpConfig,
    Individual,
};
pub use expr::{Expr, Node, Op, MAX_DEPTH};
pub use variation::{mutate_hoist, mutate_point, mutate_subtree, random_expr, subtree_crossover};
