//! Experiment sweeps over `(n, T, alpha)` grids and formula fitting on the
//! resulting records.

mod cell;
mod fit;
mod grid;
mod record;
pub mod report;
mod sweep;

pub use cell::{run_cell, SweepContext};
pub use fit::{evaluate_formula, fit_formula, split_records, FitReport, TRAIN_FRACTION};
pub use grid::{Cell, ModelSettings, SweepGrid};
pub use record::{load_records, save_records, ExperimentRecord, RecordSet, Schema};
pub use sweep::{run_sweep, SweepOptions, SweepOutcome};
