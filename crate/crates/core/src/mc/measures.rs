//! Integrated squared bias, variance and mean squared error, and localized IMSE.

use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;

use super::{draw_ranks, pairwise_sum, substream, Estimate, EstimatorSpec, ExperimentConfig, Fitted, Role};
use crate::error::{domain, Result};
use crate::reference::ReferenceCopula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Isb,
    Ivar,
    Imse,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Isb, Measure::Ivar, Measure::Imse];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Isb => "isb",
            Self::Ivar => "ivar",
            Self::Imse => "imse",
        }
    }
}

/// Per-replicate contributions for one estimator at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub n: usize,
    pub estimator: EstimatorSpec,
    pub isb: Vec<f64>,
    pub ivar: Vec<f64>,
    pub imse: Vec<f64>,
}

impl MeasureSeries {
    pub fn values(&self, measure: Measure) -> &[f64] {
        match measure {
            Measure::Isb => &self.isb,
            Measure::Ivar => &self.ivar,
            Measure::Imse => &self.imse,
        }
    }

    pub fn summary(&self, measure: Measure) -> Estimate {
        Estimate::from_values(self.values(measure))
    }

    /// `imse - isb - ivar` per replicate; zero up to rounding.
    pub fn decomposition_gap(&self) -> Estimate {
        let gap: Vec<f64> = (0..self.imse.len())
            .map(|l| self.imse[l] - self.isb[l] - self.ivar[l])
            .collect();
        Estimate::from_values(&gap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    pub model: ReferenceCopula,
    pub replications: usize,
    pub master_seed: u64,
    pub series: Vec<MeasureSeries>,
}

impl PerformanceReport {
    pub fn series(&self, n: usize, estimator: EstimatorSpec) -> Option<&MeasureSeries> {
        self.series.iter().find(|s| s.n == n && s.estimator == estimator)
    }

    pub fn summary(&self, n: usize, estimator: EstimatorSpec, measure: Measure) -> Option<Estimate> {
        self.series(n, estimator).map(|s| s.summary(measure))
    }

    /// Mean and standard error of the replicate-wise difference `a - b`. Replicates share
    /// their random streams, so the difference is paired across estimators and sizes.
    pub fn paired_difference(
        &self,
        a: (usize, EstimatorSpec),
        b: (usize, EstimatorSpec),
        measure: Measure,
    ) -> Option<Estimate> {
        let xa = self.series(a.0, a.1)?.values(measure);
        let xb = self.series(b.0, b.1)?.values(measure);
        let diff: Vec<f64> = xa.iter().zip(xb).map(|(x, y)| x - y).collect();
        Some(Estimate::from_values(&diff))
    }
}

fn jsv_precheck(cfg: &ExperimentConfig, estimators: &[EstimatorSpec]) -> Result<()> {
    if estimators.iter().any(EstimatorSpec::uses_jsv) {
        cfg.model.jsv_degree(&[0.5, 0.5], cfg.n_values[0])?;
    }
    Ok(())
}

/// Estimates isb, ivar and imse for every estimator and sample size in `cfg`.
///
/// Each replicate contributes the average over `cfg.eval_points` uniform points of the
/// per-point contributions; with one point this is the plain two-replicate estimator.
pub fn run_measures(cfg: &ExperimentConfig) -> Result<PerformanceReport> {
    cfg.validate()?;
    jsv_precheck(cfg, &cfg.estimators)?;
    let model = cfg.model;
    let mut series = Vec::new();
    for &n in &cfg.n_values {
        let per_rep: Vec<Vec<[f64; 3]>> = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|l| -> Result<Vec<[f64; 3]>> {
                let mut points = substream(cfg.master_seed, l, Role::Points);
                let vs: Vec<Vec<f64>> = (0..cfg.eval_points)
                    .map(|_| (0..model.dim()).map(|_| points.sample(Open01)).collect())
                    .collect();
                let truth: Vec<f64> = vs.iter().map(|v| model.cdf(v)).collect::<Result<_>>()?;
                let r1 = draw_ranks(&model, n, &mut substream(cfg.master_seed, l, Role::FirstSample))?;
                let r2 = draw_ranks(&model, n, &mut substream(cfg.master_seed, l, Role::SecondSample))?;
                cfg.estimators
                    .iter()
                    .map(|spec| {
                        let (f1, f2) = (Fitted::new(spec, &r1)?, Fitted::new(spec, &r2)?);
                        let mut parts = [Vec::new(), Vec::new(), Vec::new()];
                        for (v, &t) in vs.iter().zip(&truth) {
                            let e1 = f1.eval(&model, v)? - t;
                            let e2 = f2.eval(&model, v)? - t;
                            parts[0].push(e1 * e2);
                            parts[1].push(0.5 * (e1 - e2) * (e1 - e2));
                            parts[2].push(0.5 * (e1 * e1 + e2 * e2));
                        }
                        let k = cfg.eval_points as f64;
                        Ok(parts.map(|p| pairwise_sum(&p) / k))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (k, &spec) in cfg.estimators.iter().enumerate() {
            let pick = |i: usize| per_rep.iter().map(|r| r[k][i]).collect::<Vec<f64>>();
            series.push(MeasureSeries {
                n,
                estimator: spec,
                isb: pick(0),
                ivar: pick(1),
                imse: pick(2),
            });
        }
    }
    Ok(PerformanceReport {
        model,
        replications: cfg.replications,
        master_seed: cfg.master_seed,
        series,
    })
}

/// Axis-aligned box inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Cell {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let ok = lower.len() == upper.len()
            && !lower.is_empty()
            && lower.iter().zip(&upper).all(|(&a, &b)| 0.0 <= a && a < b && b <= 1.0);
        if !ok {
            return Err(domain(format!("invalid cell {lower:?} x {upper:?}")));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    /// Cell `(j, k)` (1-based) of a regular `cells x cells` partition of the unit square.
    pub fn grid_cell(cells: usize, j: usize, k: usize) -> Self {
        let c = cells as f64;
        Self {
            lower: vec![(j - 1) as f64 / c, (k - 1) as f64 / c],
            upper: vec![j as f64 / c, k as f64 / c],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&a, &b)| {
                let t: f64 = rng.sample(Open01);
                (a + (b - a) * t).clamp(a, b)
            })
            .collect()
    }
}

/// Localized IMSE on `cell` for each sample size in `cfg`: the mean over replicates of
/// the squared error at a point drawn uniformly from the cell, one fit per replicate.
pub fn run_limse(cfg: &ExperimentConfig, estimator: EstimatorSpec, cell: &Cell) -> Result<Vec<(usize, Estimate)>> {
    cfg.validate()?;
    jsv_precheck(cfg, &[estimator])?;
    let model = cfg.model;
    if cell.dim() != model.dim() {
        return Err(crate::CopulaError::DimensionMismatch {
            expected: model.dim(),
            found: cell.dim(),
        });
    }
    cfg.n_values
        .iter()
        .map(|&n| {
            let sq: Vec<f64> = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|l| -> Result<f64> {
                    let v = cell.draw(&mut substream(cfg.master_seed, l, Role::Points));
                    let r = draw_ranks(&model, n, &mut substream(cfg.master_seed, l, Role::FirstSample))?;
                    let e = Fitted::new(&estimator, &r)?.eval(&model, &v)? - model.cdf(&v)?;
                    Ok(e * e)
                })
                .collect::<Result<_>>()?;
            Ok((n, Estimate::from_values(&sq)))
        })
        .collect()
}
