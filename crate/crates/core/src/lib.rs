//! Laboratory for measuring how multitask sequence labelers generalize.
//!
//! The crate is organised around the experimental pipeline:
//!
//! * [`corpus`] reads CoNLL-style data, converts tagging schemes and turns
//!   tokens into fixed-width context-window features.
//! * [`tasksim`] derives synthetic tasks from a real label sequence with a
//!   controlled amount of shared information, measured by adjusted mutual
//!   information.
//! * [`mtlnet`] trains a shared-encoder model with one softmax head per task
//!   and scores the real task with span F1.
//! * [`harness`] sweeps `(n, T, alpha)` grids and stores one record per cell.
//! * [`symreg`] searches for closed-form formulas over those records with
//!   genetic programming.

pub mod corpus;
mod error;
pub mod harness;
pub mod mtlnet;
pub mod seed;
pub mod symreg;
pub mod tasksim;

pub use error::{Error, Result};

pub use corpus::{EmbeddingTable, LabeledCorpus, Scheme, Token, WindowSample};
pub use harness::{ExperimentRecord, RecordSet, SweepGrid};
pub use mtlnet::{ModelConfig, MultitaskModel};
pub use symreg::{Expr, FitResult, GpConfig};
pub use tasksim::{LabelMatrix, TaskSet};
