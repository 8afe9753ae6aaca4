//! Sampling from a fitted empirical beta copula.
//!
//! Two equivalent schemes are provided. The order-statistic scheme draws `n` fresh
//! uniforms per coordinate, sorts them, and returns the order statistics selected by a
//! uniformly chosen rank vector. The direct scheme picks the rank vector and then draws
//! each coordinate from Beta(R, n + 1 - R), the law of the R-th order statistic.

use ndarray::ArrayD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{RankMatrix, Sample};
use crate::error::{domain, CopulaError, Result};
use crate::special::beta_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    OrderStatistic,
    #[default]
    DirectBeta,
}

#[derive(Debug, Clone)]
pub struct BetaSampler {
    ranks: RankMatrix,
    scheme: Scheme,
    seed: u64,
}

impl BetaSampler {
    pub fn new(ranks: RankMatrix, scheme: Scheme, seed: u64) -> Self {
        Self { ranks, scheme, seed }
    }

    pub fn ranks(&self) -> &RankMatrix {
        &self.ranks
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws `count` vectors from the stream seeded by the sampler seed.
    pub fn draw(&self, count: usize) -> Result<Sample> {
        self.draw_with(count, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }

    pub fn draw_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Sample> {
        if count == 0 {
            return Err(domain("count must be positive"));
        }
        let (n, d) = (self.ranks.n(), self.ranks.d());
        let mut values = Vec::with_capacity(count * d);
        let mut column = vec![0.0f64; n];
        for _ in 0..count {
            let row = self.ranks.row(rng.random_range(0..n));
            for &r in row {
                let k = r as usize - 1;
                let v = match self.scheme {
                    Scheme::OrderStatistic => {
                        column.iter_mut().for_each(|x| *x = rng.random());
                        *column.select_nth_unstable_by(k, f64::total_cmp).1
                    }
                    Scheme::DirectBeta => beta_quantile(r as f64, (n - k) as f64, rng.random()),
                };
                values.push(v);
            }
        }
        Sample::new(count, d, values)
    }
}

/// Empirical distribution function of `sample` on the tensor grid spanned by the
/// ascending `axes`: `(1/N) #{i : x_ij <= g_j for all j}` at every grid point.
pub fn empirical_cdf_on_grid(sample: &Sample, axes: &[Vec<f64>]) -> Result<ArrayD<f64>> {
    let d = sample.cols();
    if axes.len() != d {
        return Err(CopulaError::DimensionMismatch {
            expected: d,
            found: axes.len(),
        });
    }
    if !axes.iter().all(|a| a.is_sorted()) {
        return Err(domain("grid axes must be ascending"));
    }
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut hist = ArrayD::<f64>::zeros(shape);
    let mut cell = vec![0usize; d];
    'rows: for i in 0..sample.rows() {
        for ((c, &x), pts) in cell.iter_mut().zip(sample.row(i)).zip(axes) {
            let g = pts.partition_point(|&p| p < x);
            if g == pts.len() {
                continue 'rows;
            }
            *c = g;
        }
        hist[cell.as_slice()] += 1.0;
    }
    crate::tensor::cumulate_all_axes(&mut hist);
    Ok(hist / sample.rows() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{regular_grid, CopulaEstimate};

    fn comonotone2() -> RankMatrix {
        RankMatrix::from_rows(&[vec![1, 1], vec![2, 2]]).unwrap()
    }

    fn sup(a: &ArrayD<f64>, b: &ArrayD<f64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Two-sided KS statistic of `xs` against Uniform(0, 1).
    fn ks_uniform(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
            .fold(0.0, f64::max)
    }

    #[test]
    fn ecdf_helper_counts() {
        let s = Sample::from_rows(&[vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let e = empirical_cdf_on_grid(&s, &[vec![0.1, 0.5, 1.0], vec![0.5, 1.0]]).unwrap();
        assert_eq!(e[[0, 0]], 0.0);
        assert_eq!(e[[0, 1]], 0.5);
        assert_eq!(e[[1, 0]], 0.5);
        assert_eq!(e[[2, 1]], 1.0);
        assert!(empirical_cdf_on_grid(&s, &[vec![1.0, 0.5], vec![0.5]]).is_err());
    }

    #[test]
    fn single_observation_gives_independent_uniforms() {
        let r = RankMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let axis = regular_grid(11);
        for scheme in [Scheme::DirectBeta, Scheme::OrderStatistic] {
            let s = BetaSampler::new(r.clone(), scheme, 5).draw(100_000).unwrap();
            let e = empirical_cdf_on_grid(&s, &[axis.clone(), axis.clone()]).unwrap();
            for (i, &x) in axis.iter().enumerate() {
                for (j, &y) in axis.iter().enumerate() {
                    assert!((e[[i, j]] - x * y).abs() < 0.01);
                }
            }
        }
    }

    #[test]
    fn comonotone_pair_matches_beta_copula_value() {
        let s = BetaSampler::new(comonotone2(), Scheme::DirectBeta, 17)
            .draw(100_000)
            .unwrap();
        let e = empirical_cdf_on_grid(&s, &[vec![0.5], vec![0.5]]).unwrap();
        assert!((e[[0, 0]] - 0.3125).abs() < 0.005, "{}", e[[0, 0]]);
        let o = BetaSampler::new(comonotone2(), Scheme::OrderStatistic, 18)
            .draw(100_000)
            .unwrap();
        let axis = regular_grid(11);
        let ea = empirical_cdf_on_grid(&s, &[axis.clone(), axis.clone()]).unwrap();
        let eb = empirical_cdf_on_grid(&o, &[axis.clone(), axis]).unwrap();
        assert!(sup(&ea, &eb) <= 0.01);
    }

    #[test]
    fn draws_match_fitted_beta_copula_and_have_uniform_margins() {
        let ranks = RankMatrix::from_rows(&[
            vec![3, 1, 4],
            vec![1, 5, 2],
            vec![5, 2, 1],
            vec![2, 4, 5],
            vec![4, 3, 3],
        ])
        .unwrap();
        let axis = regular_grid(11);
        let axes = vec![axis.clone(), axis.clone(), axis];
        let fitted = CopulaEstimate::beta(ranks.clone()).eval_grid(&axes).unwrap();
        // 0.001-level KS critical value for N = 1e5.
        let ks_crit = 1.949 / (100_000f64).sqrt();
        for (scheme, seed) in [(Scheme::DirectBeta, 1), (Scheme::OrderStatistic, 2)] {
            let s = BetaSampler::new(ranks.clone(), scheme, seed).draw(100_000).unwrap();
            assert!(s.values().iter().all(|x| (0.0..=1.0).contains(x)));
            let e = empirical_cdf_on_grid(&s, &axes).unwrap();
            assert!(sup(&e, &fitted) < 0.01, "{scheme:?}");
            for j in 0..3 {
                assert!(ks_uniform(s.column(j)) < ks_crit, "{scheme:?} column {j}");
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let a = BetaSampler::new(comonotone2(), Scheme::OrderStatistic, 3)
            .draw(50)
            .unwrap();
        let b = BetaSampler::new(comonotone2(), Scheme::OrderStatistic, 3)
            .draw(50)
            .unwrap();
        assert_eq!(a.values(), b.values());
        assert!(BetaSampler::new(comonotone2(), Scheme::DirectBeta, 3).draw(0).is_err());
    }

    #[test]
    fn tied_rank_input_is_rejected() {
        assert!(matches!(
            RankMatrix::from_ranks(2, 2, vec![1, 1, 1, 2]),
            Err(CopulaError::TiedRanks { column: 0 })
        ));
    }
}
