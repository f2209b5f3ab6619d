//! Agreement between two partitions: adjusted Rand index and normalized
//! mutual information.

use crate::error::{Error, Result};

/// Counts `n_kl` of items with first label `k` and second label `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    pub fn new(left: &[usize], right: &[usize]) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::LengthMismatch {
                expected: left.len(),
                actual: right.len(),
            });
        }
        let rows = left.iter().copied().max().map_or(0, |m| m + 1);
        let cols = right.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; rows * cols];
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for (&a, &b) in left.iter().zip(right) {
            counts[a * cols + b] += 1;
            row_sums[a] += 1;
            col_sums[b] += 1;
        }
        Ok(Self {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            n: left.len() as u64,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

fn pairs(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index. Returns 1 when the chance-corrected denominator
/// vanishes (both partitions trivial in the same way, or fewer than 2 items).
pub fn adjusted_rand(left: &[usize], right: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(left, right)?;
    let index: f64 = table.counts.iter().map(|&c| pairs(c)).sum();
    let a: f64 = table.row_sums.iter().map(|&c| pairs(c)).sum();
    let b: f64 = table.col_sums.iter().map(|&c| pairs(c)).sum();
    let total = pairs(table.n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = a * b / total;
    let denominator = 0.5 * (a + b) - expected;
    if denominator == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denominator)
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the geometric mean of the two entropies.
/// Two constant labelings score 1; exactly one constant labeling scores 0.
pub fn nmi(left: &[usize], right: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(left, right)?;
    if table.n == 0 {
        return Ok(1.0);
    }
    let n = table.n as f64;
    let h_left = entropy(&table.row_sums, n);
    let h_right = entropy(&table.col_sums, n);
    if h_left == 0.0 && h_right == 0.0 {
        return Ok(1.0);
    }
    if h_left == 0.0 || h_right == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for r in 0..table.rows {
        for c in 0..table.cols {
            let count = table.get(r, c);
            if count == 0 {
                continue;
            }
            let joint = count as f64 / n;
            let outer = (table.row_sums[r] as f64 / n) * (table.col_sums[c] as f64 / n);
            mi += joint * (joint / outer).ln();
        }
    }
    Ok((mi / (h_left * h_right).sqrt()).clamp(0.0, 1.0))
}
