use serde::{Deserialize, Serialize};

use super::RecordSet;
use crate::symreg::{evolve, mse, split_indices, Dataset, Expr, FitResult, GpConfig};
use crate::{Error, Result};

pub const TRAIN_FRACTION: f64 = 0.9;

/// Fewest records a fit will split.
const MIN_RECORDS: usize = 10;

/// Random disjoint split of the records, the same for the same seed.
pub fn split_records(rs: &RecordSet, train_fraction: f64, seed: u64) -> Result<(RecordSet, RecordSet)> {
    if rs.len() < MIN_RECORDS {
        return Err(Error::TooFewRecords {
            required: MIN_RECORDS,
            found: rs.len(),
        });
    }
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidConfig(format!("train fraction {train_fraction} outside [0, 1]")));
    }
    let (train, test) = split_indices(rs.len(), train_fraction, seed);
    let pick = |rows: &[usize]| RecordSet {
        schema: rs.schema,
        records: rows.iter().map(|&i| rs.records[i].clone()).collect(),
    };
    Ok((pick(&train), pick(&test)))
}

fn dataset(rs: &RecordSet, inputs: &[&str], target: &str, scale: f64) -> Result<Dataset> {
    if inputs.is_empty() {
        return Err(Error::InvalidConfig("at least one input column is required".into()));
    }
    let x = rs.columns(inputs)?;
    let y = rs.column(target)?.into_iter().map(|v| scale * v).collect();
    Dataset::new(x, y)
}

/// Fits `scale * target` as a function of the input columns, which become
/// `x1..xk` in order. The split uses the GP seed.
pub fn fit_formula(
    rs: &RecordSet,
    inputs: &[&str],
    target: &str,
    scale: f64,
    gp: &GpConfig,
) -> Result<FitResult> {
    let (train, test) = split_records(rs, TRAIN_FRACTION, gp.seed)?;
    let mut fit = evolve(
        gp,
        &dataset(&train, inputs, target, scale)?,
        &dataset(&test, inputs, target, scale)?,
    )?;
    fit.scale = scale;
    Ok(fit)
}

/// MSE of `expr` against `scale * target` over every record.
pub fn evaluate_formula(expr: &Expr, rs: &RecordSet, inputs: &[&str], target: &str, scale: f64) -> Result<f64> {
    let data = dataset(rs, inputs, target, scale)?;
    if let Some(v) = expr.max_var().filter(|&v| v >= inputs.len()) {
        return Err(Error::UnboundVariable {
            index: v,
            available: inputs.len(),
        });
    }
    Ok(mse(expr, &data))
}

/// Serializable summary of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub inputs: Vec<String>,
    pub target: String,
    pub scale: f64,
    pub sexpr: String,
    pub infix: String,
    pub train_mse: f64,
    pub test_mse: Option<f64>,
    pub trace: Vec<f64>,
    pub seed: u64,
    pub rows: usize,
}

impl FitReport {
    pub fn new(fit: &FitResult, inputs: &[&str], target: &str, seed: u64, rows: usize) -> Self {
        FitReport {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            target: target.to_string(),
            scale: fit.scale,
            sexpr: fit.best.to_sexpr(),
            infix: fit.best.to_infix(),
            train_mse: fit.train_mse,
            test_mse: fit.test_mse,
            trace: fit.trace.clone(),
            seed,
            rows,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
