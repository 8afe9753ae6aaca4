//! Observation matrices, componentwise ranks and CSV ingestion.
//!
//! Ranks are 1-based: the rank of `X[i][j]` is the number of `k` with
//! `X[k][j] <= X[i][j]`. Tied values are either rejected or broken by a
//! uniformly random permutation of the tied rank block, drawn from a
//! dedicated seeded stream so that estimation on tied data can be replayed.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CopulaError, Result};

/// An `n x d` matrix of finite observations stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample from row-major values, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(crate::error::domain("a sample needs at least one row and one column"));
        }
        if values.len() != rows * cols {
            return Err(CopulaError::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(CopulaError::NonFiniteInput {
                row: pos / cols,
                column: pos % cols,
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(CopulaError::Parse {
                line: i + 1,
                message: format!("expected {cols} fields, found {}", r.len()),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// How tied observations within a column are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    Error,
    Random { seed: u64 },
}

/// Componentwise ranks; every column is a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    rows: usize,
    cols: usize,
    ranks: Vec<u32>,
    tie_seed: Option<u64>,
}

impl RankMatrix {
    /// Wraps precomputed ranks, checking that each column is a permutation.
    pub fn from_ranks(rows: usize, cols: usize, ranks: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(crate::error::domain("rank matrix must be nonempty"));
        }
        if ranks.len() != rows * cols {
            return Err(CopulaError::DimensionMismatch {
                expected: rows * cols,
                found: ranks.len(),
            });
        }
        let mut seen = vec![false; rows];
        for j in 0..cols {
            seen.iter_mut().for_each(|s| *s = false);
            for i in 0..rows {
                let r = ranks[i * cols + j] as usize;
                if r == 0 || r > rows || seen[r - 1] {
                    return Err(CopulaError::TiedRanks { column: j });
                }
                seen[r - 1] = true;
            }
        }
        Ok(Self {
            rows,
            cols,
            ranks,
            tie_seed: None,
        })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(crate::error::domain("ragged rank rows"));
        }
        Self::from_ranks(rows.len(), cols, rows.concat())
    }

    /// Sample size `n`.
    pub fn n(&self) -> usize {
        self.rows
    }

    /// Dimension `d`.
    pub fn d(&self) -> usize {
        self.cols
    }

    pub fn rank(&self, i: usize, j: usize) -> u32 {
        self.ranks[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.ranks[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[u32]> {
        self.ranks.chunks_exact(self.cols)
    }

    pub fn tie_seed(&self) -> Option<u64> {
        self.tie_seed
    }

    /// Pseudo-observations `R / n`.
    pub fn pseudo_observations(&self) -> Sample {
        let n = self.rows as f64;
        let values = self.ranks.iter().map(|&r| r as f64 / n).collect();
        Sample {
            rows: self.rows,
            cols: self.cols,
            values,
        }
    }
}

/// Computes componentwise ranks of `sample`.
pub fn compute_ranks(sample: &Sample, tie_policy: TiePolicy) -> Result<RankMatrix> {
    let (n, d) = (sample.rows(), sample.cols());
    let mut ranks = vec![0u32; n * d];
    let mut rng = match tie_policy {
        TiePolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        TiePolicy::Error => None,
    };
    let mut ties_broken = false;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut block: Vec<u32> = Vec::new();

    for j in 0..d {
        order.clear();
        order.extend(0..n);
        order.sort_by(|&a, &b| sample.get(a, j).total_cmp(&sample.get(b, j)));

        let mut start = 0;
        while start < n {
            let value = sample.get(order[start], j);
            let mut end = start + 1;
            while end < n && sample.get(order[end], j) == value {
                end += 1;
            }
            if end - start == 1 {
                ranks[order[start] * d + j] = (start + 1) as u32;
            } else {
                let rng = rng.as_mut().ok_or(CopulaError::TiesPresent { column: j })?;
                ties_broken = true;
                block.clear();
                block.extend((start + 1) as u32..=end as u32);
                block.shuffle(rng);
                for (k, &r) in block.iter().enumerate() {
                    ranks[order[start + k] * d + j] = r;
                }
            }
            start = end;
        }
    }

    let tie_seed = match tie_policy {
        TiePolicy::Random { seed } if ties_broken => Some(seed),
        _ => None,
    };
    Ok(RankMatrix {
        rows: n,
        cols: d,
        ranks,
        tie_seed,
    })
}

/// Reads a comma-separated file of reals, one observation per line.
pub fn read_sample_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Sample> {
    let file = std::fs::File::open(path.as_ref())?;
    read_sample(file, has_header)
}

/// Reads CSV observations from any reader; see [`read_sample_csv`].
pub fn read_sample<R: std::io::Read>(reader: R, has_header: bool) -> Result<Sample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1 + usize::from(has_header);
        let record = record.map_err(|e| CopulaError::Parse {
            line,
            message: e.to_string(),
        })?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| CopulaError::Parse {
                    line,
                    message: format!("not a number: {field:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CopulaError::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Sample::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> Sample {
        Sample::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn strict_ordering_gives_counts() {
        let r = compute_ranks(&column(&[3.1, 1.2, 2.7]), TiePolicy::Error).unwrap();
        assert_eq!((0..3).map(|i| r.rank(i, 0)).collect::<Vec<_>>(), vec![3, 1, 2]);
        assert_eq!(r.tie_seed(), None);
    }

    #[test]
    fn single_observation() {
        let r = compute_ranks(&column(&[5.0]), TiePolicy::Error).unwrap();
        assert_eq!(r.rank(0, 0), 1);
    }

    #[test]
    fn ties_rejected_under_error_policy() {
        let err = compute_ranks(&column(&[2.0, 2.0]), TiePolicy::Error).unwrap_err();
        assert!(matches!(err, CopulaError::TiesPresent { column: 0 }));
    }

    #[test]
    fn tie_break_is_fair_coin() {
        let s = column(&[2.0, 2.0]);
        let draws = 10_000;
        let first = (0..draws)
            .filter(|&seed| compute_ranks(&s, TiePolicy::Random { seed }).unwrap().rank(0, 0) == 1)
            .count();
        let freq = first as f64 / draws as f64;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn tie_break_records_seed_and_is_replayable() {
        let s = column(&[1.0, 2.0, 2.0, 2.0, 0.5]);
        let a = compute_ranks(&s, TiePolicy::Random { seed: 9 }).unwrap();
        let b = compute_ranks(&s, TiePolicy::Random { seed: 9 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tie_seed(), Some(9));
        assert_eq!(a.rank(0, 0), 2);
        assert_eq!(a.rank(4, 0), 1);
        let mut block: Vec<u32> = [1, 2, 3].iter().map(|&i| a.rank(i, 0)).collect();
        block.sort_unstable();
        assert_eq!(block, vec![3, 4, 5]);
    }

    #[test]
    fn tie_block_ranks_are_uniform() {
        // Chi-square on the rank given to the first of four tied values.
        let s = column(&[7.0, 7.0, 7.0, 7.0, 1.0, 9.0]);
        let runs = 20_000u64;
        let mut counts = [0f64; 4];
        for seed in 0..runs {
            let r = compute_ranks(&s, TiePolicy::Random { seed }).unwrap();
            counts[(r.rank(0, 0) - 2) as usize] += 1.0;
        }
        let expected = runs as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-square with 3 degrees of freedom.
        assert!(chi2 < 16.266, "chi2 = {chi2}");
    }

    #[test]
    fn non_finite_rejected() {
        let err = Sample::new(2, 1, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, CopulaError::NonFiniteInput { row: 1, column: 0 }));
    }

    #[test]
    fn rank_matrix_rejects_duplicates() {
        let err = RankMatrix::from_rows(&[vec![1, 1], vec![1, 2]]).unwrap_err();
        assert!(matches!(err, CopulaError::TiedRanks { column: 0 }));
    }

    #[test]
    fn csv_parsing() {
        let s = read_sample("0.1,0.2\n0.3,0.4".as_bytes(), false).unwrap();
        assert_eq!((s.rows(), s.cols()), (2, 2));
        assert_eq!(s.get(1, 0), 0.3);

        let s = read_sample("x,y\n1,2\n3,4\n5,6\n".as_bytes(), true).unwrap();
        assert_eq!(s.rows(), 3);

        assert!(read_sample("".as_bytes(), false).is_err());
        assert!(matches!(
            read_sample("1,2\n3\n".as_bytes(), false),
            Err(CopulaError::Parse { .. })
        ));
        assert!(matches!(
            read_sample("1,abc\n".as_bytes(), false),
            Err(CopulaError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_sample_csv("/nonexistent/definitely/not/here.csv", false).unwrap_err();
        assert!(matches!(err, CopulaError::Io(_)));
    }
}
