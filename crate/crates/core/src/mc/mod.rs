//! Monte Carlo measurement of estimator performance.
//!
//! For a replicate `l`, two independent samples of size `n` are drawn from the model
//! together with a point `V` uniform on the unit square. With `e_k = C_hat^(k)(V) - C(V)`,
//!
//! * `e_1 e_2` is unbiased for the integrated squared bias,
//! * `(e_1 - e_2)^2 / 2` for the integrated variance,
//! * `(e_1^2 + e_2^2) / 2` for the integrated mean squared error,
//!
//! so the decomposition `imse = isb + ivar` holds replicate by replicate.
//!
//! # Random streams
//!
//! Every replicate owns four ChaCha8 streams derived from the master seed: the generator
//! is seeded with `master_seed` and switched to stream `4 l + role`, where role 0 draws
//! evaluation points, roles 1 and 2 draw the two samples and role 3 is reserved. Streams
//! do not depend on `n` or on the estimator, so all estimators see the same data within a
//! replicate (common random numbers), and a sample of size `n + 1` extends the sample of
//! size `n`. Replicates run in parallel and are reduced in index order with pairwise
//! summation, so results do not depend on the thread count.

mod config;
mod lre;
mod measures;
mod study;

pub use config::{parse_estimators, parse_n_values, DegreeRule, EstimatorSpec, ExperimentConfig, DEFAULT_REPLICATIONS};
pub use lre::{run_lre_heatmap, run_lre_heatmap_pair, LreHeatmap};
pub use measures::{run_limse, run_measures, Cell, Measure, MeasureSeries, PerformanceReport};
pub use study::{format_real, run_study, write_lre_csv};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{compute_ranks, RankMatrix, TiePolicy};
use crate::error::Result;
use crate::estimators::CopulaEstimate;
use crate::reference::ReferenceCopula;

/// Role of a substream within a replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Points = 0,
    FirstSample = 1,
    SecondSample = 2,
    Reserved = 3,
}

/// Generator for `role` in replicate `replicate`.
pub fn substream(master_seed: u64, replicate: u64, role: Role) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replicate * 4 + role as u64);
    rng
}

/// Sum with `O(log L)` error growth; the split points depend only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let l = values.len() as f64;
        let mean = pairwise_sum(values) / l;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if values.len() > 1 {
            pairwise_sum(&sq) / (l - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / l).sqrt(),
        }
    }

    /// Whether the mean is below zero by more than `k` standard errors.
    pub fn significantly_negative(&self, k: f64) -> bool {
        self.mean + k * self.stderr < 0.0
    }
}

/// Ranks of a fresh model sample; continuous models produce no ties.
fn draw_ranks(model: &ReferenceCopula, n: usize, rng: &mut ChaCha8Rng) -> Result<RankMatrix> {
    compute_ranks(&model.sample_with(n, rng), TiePolicy::Error)
}

/// An estimator fitted to one replicate's sample.
enum Fitted<'a> {
    Oracle,
    Fixed(CopulaEstimate),
    /// Plug-in degree rule: the degree depends on the evaluation point.
    Jsv(&'a RankMatrix),
}

impl<'a> Fitted<'a> {
    fn new(spec: &EstimatorSpec, ranks: &'a RankMatrix) -> Result<Self> {
        if spec.uses_jsv() {
            return Ok(Self::Jsv(ranks));
        }
        Ok(match spec.kind(ranks.n(), ranks.d(), None) {
            None => Self::Oracle,
            Some(kind) => Self::Fixed(CopulaEstimate::new(kind, ranks.clone())?),
        })
    }

    fn eval(&self, model: &ReferenceCopula, u: &[f64]) -> Result<f64> {
        match self {
            Self::Oracle => model.cdf(u),
            Self::Fixed(est) => est.eval(u),
            Self::Jsv(ranks) => {
                let m = model.jsv_degree(u, ranks.n())?;
                CopulaEstimate::bernstein((*ranks).clone(), &vec![m; ranks.d()])?.eval(u)
            }
        }
    }
}
