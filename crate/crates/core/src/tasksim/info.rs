//! Entropy, mutual information and its chance-adjusted variant.
//!
//! All quantities are in nats. The expected mutual information is the mean
//! MI over all permutations of one labeling with both margins fixed, using
//! the hypergeometric distribution of each cell.

use std::collections::BTreeMap;

use crate::{Error, Result};

const DENOM_EPS: f64 = 1e-12;

/// Cross-tabulation of two labelings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    /// Builds a table from raw counts. Rows or columns summing to zero are kept.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = counts.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: cols,
                right: bad.len(),
            });
        }
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let total = row_sums.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Counts co-occurrences; clusters are the distinct values in sorted order.
pub fn contingency<A: Ord + Copy, B: Ord + Copy>(u: &[A], v: &[B]) -> Result<ContingencyTable> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = dense_index(u);
    let cols = dense_index(v);
    let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
    for (a, b) in u.iter().zip(v) {
        counts[rows[a]][cols[b]] += 1;
    }
    ContingencyTable::from_counts(counts)
}

fn dense_index<T: Ord + Copy>(xs: &[T]) -> BTreeMap<T, usize> {
    let mut map: BTreeMap<T, usize> = xs.iter().map(|&x| (x, 0)).collect();
    for (i, slot) in map.values_mut().enumerate() {
        *slot = i;
    }
    map
}

/// Shannon entropy of a marginal with `total = sum(marginal)`.
pub fn entropy(marginal: &[u64], total: u64) -> f64 {
    let n = total as f64;
    -marginal
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| {
            let p = a as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total as f64;
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            let outer = t.row_sums[i] as f64 * t.col_sums[j] as f64;
            mi += nij / n * (n * nij / outer).ln();
        }
    }
    mi
}

/// `ln k!` for `k = 0..=n`.
fn log_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Expected MI under the permutation model with the table's margins.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let total = t.total;
    let n = total as f64;
    let lf = log_factorials(total);
    let f = |k: u64| lf[k as usize];
    let mut emi = 0.0;
    for &a in &t.row_sums {
        if a == 0 {
            continue;
        }
        for &b in &t.col_sums {
            if b == 0 {
                continue;
            }
            let lo = (a + b).saturating_sub(total).max(1);
            let hi = a.min(b);
            // Terms of the hypergeometric log-probability that do not depend on m.
            let fixed = f(a) + f(b) + f(total - a) + f(total - b) - f(total);
            let ab = a as f64 * b as f64;
            for m in lo..=hi {
                let mf = m as f64;
                let log_p = fixed - f(m) - f(a - m) - f(b - m) - f(total + m - a - b);
                emi += mf / n * (n * mf / ab).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Chance-adjusted mutual information of two labelings.
///
/// Returns 1 when both labelings are a single cluster and 0 when the
/// normalizer vanishes otherwise. Values below zero are reported as-is.
pub fn adjusted_mutual_information<T: Ord + Copy>(u: &[T], v: &[T]) -> Result<f64> {
    // Fixed orientation makes the result exactly symmetric.
    let (u, v) = if u <= v { (u, v) } else { (v, u) };
    let table = contingency(u, v)?;
    let h_u = entropy(&table.row_sums, table.total);
    let h_v = entropy(&table.col_sums, table.total);
    if table.row_sums.len() == 1 && table.col_sums.len() == 1 {
        return Ok(1.0);
    }
    let mi = mutual_information(&table);
    let emi = expected_mutual_information(&table);
    let denom = h_u.max(h_v) - emi;
    if denom <= DENOM_EPS {
        return Ok(0.0);
    }
    Ok((mi - emi) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn contingency_counts() {
        let t = contingency(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert_eq!(t.counts(), [vec![1, 1], vec![1, 1]]);
        let t = contingency(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap();
        assert_eq!(t.counts(), [vec![2, 0], vec![0, 2]]);
        assert_eq!((t.row_sums(), t.col_sums(), t.total()), (&[2, 2][..], &[2, 2][..], 4));
    }

    #[test]
    fn contingency_errors() {
        assert!(matches!(
            contingency(&[0], &[0, 1]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(contingency::<u8, u8>(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[4], 4), 0.0);
        assert!((entropy(&[2, 2], 4) - LN_2).abs() < 1e-15);
        assert!((entropy(&[1, 1, 1, 1], 4) - 4f64.ln()).abs() < 1e-15);
        assert!((entropy(&[3, 0, 3], 6) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_values() {
        let same = contingency(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap();
        assert!((mutual_information(&same) - LN_2).abs() < 1e-15);
        let indep = contingency(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert!(mutual_information(&indep).abs() < 1e-15);
    }

    #[test]
    fn expected_mi_of_two_by_two() {
        // Permutation oracle (see tests/oracles.rs): P(n11 = 1) = 2/3 with MI 0,
        // otherwise MI = ln 2.
        let t = ContingencyTable::from_counts(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert!((expected_mutual_information(&t) - LN_2 / 3.0).abs() < 1e-12);
        assert!((LN_2 / 3.0 - 0.231_049).abs() < 1e-6);
    }

    #[test]
    fn expected_mi_single_cluster() {
        let t = ContingencyTable::from_counts(vec![vec![9]]).unwrap();
        assert_eq!(expected_mutual_information(&t), 0.0);
    }

    #[test]
    fn ami_examples() {
        let ami = |u: &[u32], v: &[u32]| adjusted_mutual_information(u, v).unwrap();
        assert!((ami(&[0, 1, 2, 2, 1, 0, 3], &[0, 1, 2, 2, 1, 0, 3]) - 1.0).abs() < 1e-9);
        assert!((ami(&[0, 0, 1, 1], &[1, 1, 0, 0]) - 1.0).abs() < 1e-9);
        assert!((ami(&[0, 0, 1, 1], &[0, 1, 0, 1]) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ami_degenerate_cases() {
        assert_eq!(adjusted_mutual_information(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        // One side constant, the other not: max entropy > 0, MI = EMI = 0.
        assert_eq!(adjusted_mutual_information(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
        // Every point its own cluster on both sides: EMI = H, normalizer vanishes.
        assert_eq!(adjusted_mutual_information(&[0, 1, 2], &[2, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn ami_errors() {
        assert!(matches!(adjusted_mutual_information(&[0, 1], &[0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(adjusted_mutual_information::<u8>(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn large_tables_stay_finite() {
        let u: Vec<u32> = (0..5000).map(|i| (i * 7 % 5) as u32).collect();
        let v: Vec<u32> = (0..5000).map(|i| (i * 13 % 5) as u32).collect();
        let ami = adjusted_mutual_information(&u, &v).unwrap();
        assert!(ami.is_finite() && ami <= 1.0 + 1e-9);
    }
}
