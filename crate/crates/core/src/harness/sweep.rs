use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;

use super::{run_cell, Cell, ExperimentRecord, RecordSet, Schema, SweepContext, SweepGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Record file; existing rows are kept and their cells skipped.
    pub output: Option<PathBuf>,
    /// Worker threads; rayon's default when `None`.
    pub parallel: Option<usize>,
    /// Stop after computing this many new cells.
    pub max_new_cells: Option<usize>,
    /// Print one line per finished cell to stderr.
    pub progress: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: RecordSet,
    pub computed: usize,
    pub skipped: usize,
    /// Every cell of the grid has a record.
    pub complete: bool,
}

fn schema_of(grid: &SweepGrid) -> Schema {
    if grid.balanced {
        Schema::Balanced
    } else {
        Schema::Unbalanced
    }
}

fn cell_of(r: &ExperimentRecord) -> Cell {
    Cell {
        n: r.n,
        n_syn: r.n_syn,
        tasks: r.tasks,
        alpha: r.alpha,
    }
}

/// Grid cells in grid order first, then any other records as they were.
fn canonical(grid: &[Cell], schema: Schema, records: &[ExperimentRecord]) -> RecordSet {
    let mut out = RecordSet::new(schema);
    for c in grid {
        out.records
            .extend(records.iter().find(|r| cell_of(r).same_coordinates(c)).cloned());
    }
    out.records.extend(
        records
            .iter()
            .filter(|r| !grid.iter().any(|c| cell_of(r).same_coordinates(c)))
            .cloned(),
    );
    out
}

/// Writes through a temporary file so an interrupted write leaves the old
/// file intact.
fn write_atomic(path: &Path, rs: &RecordSet) -> Result<()> {
    let tmp = path.with_extension("csv.partial");
    std::fs::write(&tmp, rs.to_csv()?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Computes every missing cell of `grid`.
///
/// The record file is rewritten in canonical order after each cell, so a
/// run stopped at any point resumes where it left off and a finished sweep
/// is byte-identical however it was scheduled or interrupted.
pub fn run_sweep(grid: &SweepGrid, opts: &SweepOptions) -> Result<SweepOutcome> {
    grid.validate()?;
    let schema = schema_of(grid);
    let cells = grid.cells();
    let existing = match &opts.output {
        Some(path) if path.exists() => super::load_records(path, Some(schema))?.records,
        _ => Vec::new(),
    };
    let pending: Vec<Cell> = cells
        .iter()
        .filter(|c| !existing.iter().any(|r| cell_of(r).same_coordinates(c)))
        .copied()
        .collect();
    let skipped = cells.len() - pending.len();
    let todo = &pending[..opts.max_new_cells.unwrap_or(usize::MAX).min(pending.len())];

    let state = Mutex::new(existing);
    if !todo.is_empty() {
        let ctx = SweepContext::new(grid)?;
        let work = || {
            todo.par_iter().try_for_each(|cell| -> Result<()> {
                let record = run_cell(&ctx, cell)?;
                let mut records = state.lock().expect("no panics while holding the lock");
                records.push(record.clone());
                if let Some(path) = &opts.output {
                    write_atomic(path, &canonical(&cells, schema, &records))?;
                }
                if opts.progress {
                    eprintln!(
                        "[{}/{}] n={} T={} alpha={} f1={:.4} ami={:.4}",
                        records.len(),
                        cells.len(),
                        record.n,
                        record.tasks,
                        record.alpha,
                        record.f1_mean,
                        record.ami
                    );
                }
                Ok(())
            })
        };
        match opts.parallel {
            Some(threads) => rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
                .install(work)?,
            None => work()?,
        }
    }

    let records = canonical(&cells, schema, &state.into_inner().expect("lock not poisoned"));
    if let Some(path) = &opts.output {
        write_atomic(path, &records)?;
    }
    let complete = cells
        .iter()
        .all(|c| records.records.iter().any(|r| cell_of(r).same_coordinates(c)));
    Ok(SweepOutcome {
        records,
        computed: todo.len(),
        skipped,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SweepGrid {
        let mut g = SweepGrid::from_json(
            r#"{"n": [200, 300], "T": [1, 2], "alpha": [0.9], "runs": 1, "eval_tokens": 200}"#,
        )
        .unwrap();
        g.model.epochs = 1;
        g.model.hidden_dim = 4;
        g.model.embedding_dim = 4;
        g
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let full = dir.path().join("full.csv");
        let part = dir.path().join("part.csv");
        let g = grid();
        let out = run_sweep(&g, &SweepOptions { output: Some(full.clone()), ..Default::default() }).unwrap();
        assert!(out.complete);
        assert_eq!(out.computed, 4);

        let opts = SweepOptions {
            output: Some(part.clone()),
            max_new_cells: Some(2),
            ..Default::default()
        };
        let first = run_sweep(&g, &opts).unwrap();
        assert!(!first.complete);
        let opts = SweepOptions { max_new_cells: None, ..opts };
        let second = run_sweep(&g, &opts).unwrap();
        assert_eq!((second.computed, second.skipped), (2, 2));
        assert_eq!(std::fs::read(&full).unwrap(), std::fs::read(&part).unwrap());

        let third = run_sweep(&g, &opts).unwrap();
        assert_eq!(third.computed, 0);
        assert!(third.complete);
    }

    #[test]
    fn schema_clash_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "n_ner,n_syn,T,alpha,ami,f1_mean,f1_std,runs,seed\n").unwrap();
        let err = run_sweep(&grid(), &SweepOptions { output: Some(path), ..Default::default() });
        assert!(matches!(err, Err(Error::SchemaMismatch(_))));
    }
}
