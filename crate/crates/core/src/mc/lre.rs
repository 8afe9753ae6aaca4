//! Localized relative efficiency heatmaps.
//!
//! On a regular `K x K` partition of the unit square, the LRE of cell `c` is
//! `100 * LIMSE(numerator; c) / LIMSE(denominator; c)` in percent. Each replicate draws
//! one sample and one evaluation point per cell, shared by both estimators.

use rayon::prelude::*;

use super::measures::Cell;
use super::{draw_ranks, pairwise_sum, substream, Estimate, EstimatorSpec, ExperimentConfig, Fitted, Role};
use crate::error::{CopulaError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LreHeatmap {
    pub n: usize,
    pub cells: usize,
    pub numerator: EstimatorSpec,
    pub denominator: EstimatorSpec,
    replications: usize,
    /// Squared errors, replicate-major: entry `l * K^2 + c`.
    num_sq: Vec<f64>,
    den_sq: Vec<f64>,
}

impl LreHeatmap {
    fn cell_index(&self, j: usize, k: usize) -> usize {
        assert!((1..=self.cells).contains(&j) && (1..=self.cells).contains(&k));
        (j - 1) * self.cells + (k - 1)
    }

    fn column(data: &[f64], c: usize, stride: usize) -> Vec<f64> {
        data.iter().skip(c).step_by(stride).copied().collect()
    }

    fn means(&self, data: &[f64]) -> Vec<f64> {
        let k2 = self.cells * self.cells;
        (0..k2)
            .map(|c| pairwise_sum(&Self::column(data, c, k2)) / self.replications as f64)
            .collect()
    }

    /// LIMSE of the numerator estimator on cell `(j, k)` (1-based).
    pub fn limse_numerator(&self, j: usize, k: usize) -> Estimate {
        let k2 = self.cells * self.cells;
        Estimate::from_values(&Self::column(&self.num_sq, self.cell_index(j, k), k2))
    }

    pub fn limse_denominator(&self, j: usize, k: usize) -> Estimate {
        let k2 = self.cells * self.cells;
        Estimate::from_values(&Self::column(&self.den_sq, self.cell_index(j, k), k2))
    }

    /// LRE in percent, row-major over `(j, k)`.
    pub fn values(&self) -> Vec<f64> {
        self.means(&self.num_sq)
            .iter()
            .zip(self.means(&self.den_sq))
            .map(|(b, e)| 100.0 * b / e)
            .collect()
    }

    pub fn lre(&self, j: usize, k: usize) -> f64 {
        self.values()[self.cell_index(j, k)]
    }

    /// `sum_c w_c LRE_c` with a delta-method standard error.
    pub fn contrast(&self, weights: &[f64]) -> Estimate {
        let k2 = self.cells * self.cells;
        assert_eq!(weights.len(), k2);
        let b = self.means(&self.num_sq);
        let e = self.means(&self.den_sq);
        let mean: f64 = (0..k2).map(|c| weights[c] * 100.0 * b[c] / e[c]).sum();
        let influence: Vec<f64> = (0..self.replications)
            .map(|l| {
                (0..k2)
                    .map(|c| {
                        let (bl, el) = (self.num_sq[l * k2 + c], self.den_sq[l * k2 + c]);
                        weights[c] * 100.0 * (bl - b[c] * el / e[c]) / e[c]
                    })
                    .sum()
            })
            .collect();
        Estimate {
            mean,
            stderr: Estimate::from_values(&influence).stderr,
        }
    }

    /// Whether cell `(j, k)` touches the upper or right border.
    pub fn is_border(&self, j: usize, k: usize) -> bool {
        j == self.cells || k == self.cells
    }

    fn weights(&self, select: impl Fn(usize, usize) -> Option<bool>) -> Vec<f64> {
        let mut w = vec![0.0; self.cells * self.cells];
        let mut pos = 0usize;
        let mut neg = 0usize;
        for j in 1..=self.cells {
            for k in 1..=self.cells {
                match select(j, k) {
                    Some(true) => pos += 1,
                    Some(false) => neg += 1,
                    None => {}
                }
            }
        }
        for j in 1..=self.cells {
            for k in 1..=self.cells {
                w[self.cell_index(j, k)] = match select(j, k) {
                    Some(true) => 1.0 / pos as f64,
                    Some(false) => -1.0 / neg as f64,
                    None => 0.0,
                };
            }
        }
        w
    }

    pub fn overall_mean(&self) -> Estimate {
        self.contrast(&self.weights(|_, _| Some(true)))
    }

    pub fn border_mean(&self) -> Estimate {
        self.contrast(&self.weights(|j, k| self.is_border(j, k).then_some(true)))
    }

    pub fn interior_mean(&self) -> Estimate {
        self.contrast(&self.weights(|j, k| (!self.is_border(j, k)).then_some(true)))
    }

    /// Border mean minus interior mean.
    pub fn border_minus_interior(&self) -> Estimate {
        self.contrast(&self.weights(|j, k| Some(self.is_border(j, k))))
    }
}

/// LRE of the beta copula with respect to the empirical copula.
pub fn run_lre_heatmap(cfg: &ExperimentConfig) -> Result<Vec<LreHeatmap>> {
    run_lre_heatmap_pair(cfg, EstimatorSpec::Beta, EstimatorSpec::Empirical)
}

pub fn run_lre_heatmap_pair(
    cfg: &ExperimentConfig,
    numerator: EstimatorSpec,
    denominator: EstimatorSpec,
) -> Result<Vec<LreHeatmap>> {
    cfg.validate()?;
    let cells = cfg
        .lre_cells
        .ok_or_else(|| CopulaError::Config("LRE heatmap needs a cell count".into()))?;
    let model = cfg.model;
    if model.dim() != 2 {
        return Err(CopulaError::Config("LRE heatmaps are bivariate".into()));
    }
    let grid: Vec<Cell> = (1..=cells)
        .flat_map(|j| (1..=cells).map(move |k| Cell::grid_cell(cells, j, k)))
        .collect();
    cfg.n_values
        .iter()
        .map(|&n| {
            let per_rep: Vec<Vec<(f64, f64)>> = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|l| -> Result<Vec<(f64, f64)>> {
                    let mut points = substream(cfg.master_seed, l, Role::Points);
                    let r = draw_ranks(&model, n, &mut substream(cfg.master_seed, l, Role::FirstSample))?;
                    let (fb, fe) = (Fitted::new(&numerator, &r)?, Fitted::new(&denominator, &r)?);
                    grid.iter()
                        .map(|cell| {
                            let v = cell.draw(&mut points);
                            let truth = model.cdf(&v)?;
                            let b = fb.eval(&model, &v)? - truth;
                            let e = fe.eval(&model, &v)? - truth;
                            Ok((b * b, e * e))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let flat = per_rep.into_iter().flatten();
            let (num_sq, den_sq) = flat.unzip();
            Ok(LreHeatmap {
                n,
                cells,
                numerator,
                denominator,
                replications: cfg.replications,
                num_sq,
                den_sq,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::ReferenceCopula;

    fn cfg(reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            model: ReferenceCopula::independence(),
            estimators: vec![EstimatorSpec::Beta],
            n_values: vec![20],
            replications: reps,
            master_seed: 3,
            lre_cells: Some(4),
            eval_points: 1,
        }
    }

    #[test]
    fn identical_estimators_give_one_hundred_percent() {
        let h = &run_lre_heatmap_pair(&cfg(30), EstimatorSpec::Empirical, EstimatorSpec::Empirical).unwrap()[0];
        assert_eq!(h.values().len(), 16);
        for v in h.values() {
            assert!((v - 100.0).abs() < 1e-12);
        }
        let c = h.border_minus_interior();
        assert!(c.mean.abs() < 1e-12 && c.stderr < 1e-12);
    }

    #[test]
    fn cell_geometry_and_weights() {
        let h = &run_lre_heatmap(&cfg(20)).unwrap()[0];
        let border = (1..=4)
            .flat_map(|j| (1..=4).map(move |k| (j, k)))
            .filter(|&(j, k)| h.is_border(j, k))
            .count();
        assert_eq!(border, 7);
        let direct: f64 = h.values().iter().sum::<f64>() / 16.0;
        assert!((h.overall_mean().mean - direct).abs() < 1e-9);
        let diff = h.border_mean().mean - h.interior_mean().mean;
        assert!((h.border_minus_interior().mean - diff).abs() < 1e-9);
        let l = h.limse_numerator(2, 3).mean / h.limse_denominator(2, 3).mean * 100.0;
        assert!((h.lre(2, 3) - l).abs() < 1e-9);
    }

    #[test]
    fn missing_cell_count_is_a_config_error() {
        let mut c = cfg(5);
        c.lre_cells = None;
        assert!(matches!(run_lre_heatmap(&c), Err(CopulaError::Config(_))));
    }
}
