//! Shared-encoder multitask classifier over window features.
//!
//! One dense `tanh` layer is shared by all tasks; every task owns a softmax
//! head. Training minimizes the per-task mean cross-entropy summed over tasks
//! with Adam.

mod adam;
mod eval;
mod model;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use eval::{extract_spans, span_f1, Span, SpanScores};
pub use model::{
    Batch, Features, LossNorm, ModelConfig, MultitaskModel, Parameters, TaskBatch, TaskHead,
};
pub use train::{loss_history_csv, train, TaskData, TrainingSet};
