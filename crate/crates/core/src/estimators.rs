//! Rank-based copula estimators.
//!
//! All four estimators are functions of the rank matrix only:
//!
//! * empirical: `(1/n) sum_i prod_j 1{R_ij / n <= u_j}`
//! * checkerboard: `(1/n) sum_i prod_j min(max(n u_j - R_ij + 1, 0), 1)`
//! * beta: `(1/n) sum_i prod_j F_{n,R_ij}(u_j)` with `F_{n,r}` the Beta(r, n+1-r) CDF
//! * Bernstein: `B_m` applied to the coefficient array `a_s = C_n(s_1/m_1, ..., s_d/m_d)`
//!
//! Checkerboard and beta are genuine copulas. The Bernstein estimator is one exactly
//! when every degree divides `n`, and at degrees `(n, ..., n)` it coincides with the
//! beta estimator.

use ndarray::{Array2, ArrayD};

use crate::bernstein::{bernstein_basis_all, contract_point, eval_bernstein_grid, Coefficient, CoefficientArray};
use crate::data::RankMatrix;
use crate::error::{domain, CopulaError, Result};
use crate::special::{binomial, reg_inc_beta};
use crate::tensor::separable_sum_on_grid;

/// Sample sizes up to which [`beta_cdf`] uses the binomial tail sum directly.
pub const LITERAL_SUM_MAX_N: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EstimatorKind {
    Empirical,
    Checkerboard,
    Beta,
    Bernstein(Vec<usize>),
}

impl EstimatorKind {
    pub fn name(&self) -> String {
        match self {
            Self::Empirical => "empirical".into(),
            Self::Checkerboard => "checkerboard".into(),
            Self::Beta => "beta".into(),
            Self::Bernstein(m) => {
                let degs: Vec<String> = m.iter().map(ToString::to_string).collect();
                format!("bernstein({})", degs.join(","))
            }
        }
    }
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(domain(format!("argument {u} outside [0, 1]")))
    }
}

fn check_point(d: usize, u: &[f64]) -> Result<()> {
    if u.len() != d {
        return Err(CopulaError::DimensionMismatch {
            expected: d,
            found: u.len(),
        });
    }
    u.iter().try_for_each(|&x| check_unit(x))
}

/// Beta(r, n+1-r) distribution function `F_{n,r}(u) = sum_{s=r}^n C(n,s) u^s (1-u)^(n-s)`.
///
/// The tail sum is used up to `n = 30`, the continued-fraction incomplete beta beyond.
pub fn beta_cdf(n: u32, r: u32, u: f64) -> Result<f64> {
    if n == 0 || r == 0 || r > n {
        return Err(domain(format!("beta_cdf requires 1 <= r <= n, got n={n}, r={r}")));
    }
    check_unit(u)?;
    Ok(if n <= LITERAL_SUM_MAX_N {
        beta_cdf_tail_sum(n, r, u)
    } else {
        reg_inc_beta(r as f64, (n + 1 - r) as f64, u)
    })
}

/// Literal binomial tail sum; exposed for cross-checking the incomplete beta route.
pub fn beta_cdf_tail_sum(n: u32, r: u32, u: f64) -> f64 {
    (r..=n)
        .map(|s| binomial(n, s) * u.powi(s as i32) * (1.0 - u).powi((n - s) as i32))
        .sum::<f64>()
        .min(1.0)
}

/// All of `F_{n,0}(u), ..., F_{n,n}(u)` at once (with `F_{n,0} = 1`), as suffix sums of
/// the degree-`n` Bernstein basis. `O(n)` instead of `n` incomplete beta evaluations.
pub fn beta_cdf_all(n: u32, u: f64) -> Vec<f64> {
    let mut out = bernstein_basis_all(n, u);
    for s in (0..n as usize).rev() {
        out[s] += out[s + 1];
    }
    out[0] = 1.0;
    for v in &mut out {
        *v = v.min(1.0);
    }
    out
}

/// Empirical copula at `u`.
pub fn empirical_copula(ranks: &RankMatrix, u: &[f64]) -> Result<f64> {
    check_point(ranks.d(), u)?;
    Ok(empirical_unchecked(ranks, u))
}

fn empirical_unchecked(ranks: &RankMatrix, u: &[f64]) -> f64 {
    let nf = ranks.n() as f64;
    let count = ranks
        .rows_iter()
        .filter(|row| row.iter().zip(u).all(|(&r, &x)| r as f64 / nf <= x))
        .count();
    count as f64 / nf
}

fn checkerboard_factor(n: f64, r: u32, x: f64) -> f64 {
    (n * x - r as f64 + 1.0).clamp(0.0, 1.0)
}

/// Empirical checkerboard copula at `u`.
pub fn checkerboard_copula(ranks: &RankMatrix, u: &[f64]) -> Result<f64> {
    check_point(ranks.d(), u)?;
    Ok(checkerboard_unchecked(ranks, u))
}

fn checkerboard_unchecked(ranks: &RankMatrix, u: &[f64]) -> f64 {
    let nf = ranks.n() as f64;
    let total: f64 = ranks
        .rows_iter()
        .map(|row| {
            row.iter()
                .zip(u)
                .map(|(&r, &x)| checkerboard_factor(nf, r, x))
                .product::<f64>()
        })
        .sum();
    total / nf
}

/// Empirical beta copula at `u`.
pub fn beta_copula(ranks: &RankMatrix, u: &[f64]) -> Result<f64> {
    check_point(ranks.d(), u)?;
    Ok(beta_unchecked(ranks, u))
}

fn beta_unchecked(ranks: &RankMatrix, u: &[f64]) -> f64 {
    let n = ranks.n();
    let tables: Vec<Vec<f64>> = u.iter().map(|&x| beta_cdf_all(n as u32, x)).collect();
    let total: f64 = ranks
        .rows_iter()
        .map(|row| row.iter().zip(&tables).map(|(&r, t)| t[r as usize]).product::<f64>())
        .sum();
    total / n as f64
}

/// Coefficient array `a_s = C_n(s_1/m_1, ..., s_d/m_d)` of the empirical Bernstein copula.
///
/// Observation `i` contributes to every `s` with `s_j >= ceil(R_ij m_j / n)` for all `j`,
/// so the array is a d-dimensional cumulative histogram, computed in `O(n + prod(m_j+1))`.
pub fn bernstein_coefficients<T: Coefficient>(ranks: &RankMatrix, degrees: &[usize]) -> Result<CoefficientArray<T>> {
    let d = ranks.d();
    if degrees.len() != d {
        return Err(CopulaError::DimensionMismatch {
            expected: d,
            found: degrees.len(),
        });
    }
    if degrees.contains(&0) {
        return Err(domain("Bernstein degrees must be positive"));
    }
    let n = ranks.n();
    let extents: Vec<usize> = degrees.iter().map(|m| m + 1).collect();
    let mut strides = vec![1usize; d];
    for j in (0..d - 1).rev() {
        strides[j] = strides[j + 1] * extents[j + 1];
    }
    let len: usize = extents.iter().product();
    let mut counts = vec![0i64; len];
    for row in ranks.rows_iter() {
        let off: usize = row
            .iter()
            .zip(degrees)
            .zip(&strides)
            .map(|((&r, &m), &st)| (r as usize * m).div_ceil(n) * st)
            .sum();
        counts[off] += 1;
    }
    // Prefix sums along each axis.
    for j in 0..d {
        let st = strides[j];
        for off in 0..len {
            if !(off / st).is_multiple_of(extents[j]) {
                counts[off] += counts[off - st];
            }
        }
    }
    let values = counts.into_iter().map(|c| T::from_ratio(c, n as i64)).collect();
    CoefficientArray::new(degrees.to_vec(), values)
}

/// Empirical Bernstein copula `B_m(C_n)` at `u`.
pub fn bernstein_copula(ranks: &RankMatrix, degrees: &[usize], u: &[f64]) -> Result<f64> {
    CopulaEstimate::new(EstimatorKind::Bernstein(degrees.to_vec()), ranks.clone())?.eval(u)
}

/// Whether `B_m(C_n)` is a genuine copula, i.e. every degree divides `n`.
pub fn is_genuine_copula_degrees(n: usize, degrees: &[usize]) -> bool {
    degrees.iter().all(|&m| m != 0 && n.is_multiple_of(m))
}

/// A fitted estimator, evaluable anywhere on the unit cube.
#[derive(Debug, Clone)]
pub struct CopulaEstimate {
    kind: EstimatorKind,
    ranks: RankMatrix,
    coefficients: Option<CoefficientArray<f64>>,
}

impl CopulaEstimate {
    pub fn new(kind: EstimatorKind, ranks: RankMatrix) -> Result<Self> {
        let coefficients = match &kind {
            EstimatorKind::Bernstein(m) => Some(bernstein_coefficients(&ranks, m)?),
            _ => None,
        };
        Ok(Self {
            kind,
            ranks,
            coefficients,
        })
    }

    pub fn empirical(ranks: RankMatrix) -> Self {
        Self::new(EstimatorKind::Empirical, ranks).expect("no precomputation")
    }

    pub fn checkerboard(ranks: RankMatrix) -> Self {
        Self::new(EstimatorKind::Checkerboard, ranks).expect("no precomputation")
    }

    pub fn beta(ranks: RankMatrix) -> Self {
        Self::new(EstimatorKind::Beta, ranks).expect("no precomputation")
    }

    pub fn bernstein(ranks: RankMatrix, degrees: &[usize]) -> Result<Self> {
        Self::new(EstimatorKind::Bernstein(degrees.to_vec()), ranks)
    }

    pub fn kind(&self) -> &EstimatorKind {
        &self.kind
    }

    pub fn ranks(&self) -> &RankMatrix {
        &self.ranks
    }

    pub fn n(&self) -> usize {
        self.ranks.n()
    }

    pub fn d(&self) -> usize {
        self.ranks.d()
    }

    pub fn coefficients(&self) -> Option<&CoefficientArray<f64>> {
        self.coefficients.as_ref()
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        check_point(self.d(), u)?;
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64]) -> f64 {
        match &self.kind {
            EstimatorKind::Empirical => empirical_unchecked(&self.ranks, u),
            EstimatorKind::Checkerboard => checkerboard_unchecked(&self.ranks, u),
            EstimatorKind::Beta => beta_unchecked(&self.ranks, u),
            EstimatorKind::Bernstein(m) => {
                let a = self.coefficients.as_ref().expect("built in new");
                let bases: Vec<Vec<f64>> = m
                    .iter()
                    .zip(u)
                    .map(|(&mj, &x)| bernstein_basis_all(mj as u32, x))
                    .collect();
                contract_point(a, &bases)
            }
        }
    }

    /// Points where the estimator may jump along each axis: multiples of `1/n` for the
    /// empirical copula, none for the continuous estimators.
    pub fn jump_points(&self) -> Vec<f64> {
        match self.kind {
            EstimatorKind::Empirical => {
                let n = self.n();
                (1..=n).map(|k| k as f64 / n as f64).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Evaluates on the tensor grid `axes[0] x ... x axes[d-1]` (row-major result).
    pub fn eval_grid(&self, axes: &[Vec<f64>]) -> Result<ArrayD<f64>> {
        let d = self.d();
        if axes.len() != d {
            return Err(CopulaError::DimensionMismatch {
                expected: d,
                found: axes.len(),
            });
        }
        for x in axes.iter().flatten() {
            check_unit(*x)?;
        }
        let n = self.n();
        let nf = n as f64;
        if let EstimatorKind::Bernstein(_) = self.kind {
            return eval_bernstein_grid(self.coefficients.as_ref().expect("built in new"), axes);
        }
        if self.kind == EstimatorKind::Empirical && axes.iter().all(|a| a.is_sorted()) {
            return Ok(self.empirical_grid_sorted(axes));
        }
        let factors: Vec<Array2<f64>> = axes
            .iter()
            .map(|pts| {
                let mut f = Array2::zeros((pts.len(), n));
                for (g, &x) in pts.iter().enumerate() {
                    match self.kind {
                        EstimatorKind::Empirical => {
                            for r in 1..=n {
                                f[[g, r - 1]] = if r as f64 / nf <= x { 1.0 } else { 0.0 };
                            }
                        }
                        EstimatorKind::Checkerboard => {
                            for r in 1..=n {
                                f[[g, r - 1]] = checkerboard_factor(nf, r as u32, x);
                            }
                        }
                        EstimatorKind::Beta => {
                            let table = beta_cdf_all(n as u32, x);
                            for r in 1..=n {
                                f[[g, r - 1]] = table[r];
                            }
                        }
                        EstimatorKind::Bernstein(_) => unreachable!(),
                    }
                }
                f
            })
            .collect();
        let idx: Vec<Vec<usize>> = self
            .ranks
            .rows_iter()
            .map(|row| row.iter().map(|&r| r as usize - 1).collect())
            .collect();
        Ok(separable_sum_on_grid(&factors, &idx) / nf)
    }

    /// Cumulative-histogram evaluation of the empirical copula on a sorted grid.
    fn empirical_grid_sorted(&self, axes: &[Vec<f64>]) -> ArrayD<f64> {
        let nf = self.n() as f64;
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let mut hist = ArrayD::<f64>::zeros(shape.clone());
        let mut cell = vec![0usize; axes.len()];
        'rows: for row in self.ranks.rows_iter() {
            for ((c, &r), pts) in cell.iter_mut().zip(row).zip(axes) {
                let v = r as f64 / nf;
                let g = pts.partition_point(|&x| x < v);
                if g == pts.len() {
                    continue 'rows;
                }
                *c = g;
            }
            hist[cell.as_slice()] += 1.0;
        }
        crate::tensor::cumulate_all_axes(&mut hist);
        hist / nf
    }
}

/// Regular grid with `k` points `0, 1/(k-1), ..., 1` (`k >= 2`).
pub fn regular_grid(k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
}

/// Grid cells evaluated per batch by [`sup_distance`]; small batches reuse memory.
const SUP_SLAB_CELLS: usize = 1 << 17;

/// Supremum of `|f - g|` over the closed regular grid with `points_per_axis` points per
/// axis, augmented with the jump locations of either estimator.
pub fn sup_distance(f: &CopulaEstimate, g: &CopulaEstimate, points_per_axis: usize) -> Result<f64> {
    if f.d() != g.d() {
        return Err(CopulaError::DimensionMismatch {
            expected: f.d(),
            found: g.d(),
        });
    }
    if points_per_axis < 2 {
        return Err(domain("grid needs at least two points per axis"));
    }
    let mut axis = regular_grid(points_per_axis);
    axis.extend(f.jump_points());
    axis.extend(g.jump_points());
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    // Slabs along the last axis keep the working set small on large grids.
    let d = f.d();
    let rows = (SUP_SLAB_CELLS / axis.len().pow(d as u32 - 1)).max(1);
    let mut sup = 0.0f64;
    for slab in axis.chunks(rows) {
        let mut axes = vec![axis.clone(); d];
        axes[d - 1] = slab.to_vec();
        let a = f.eval_grid(&axes)?.as_standard_layout().into_owned();
        let b = g.eval_grid(&axes)?.as_standard_layout().into_owned();
        let (a, b) = (a.as_slice().expect("standard"), b.as_slice().expect("standard"));
        sup = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(sup, f64::max);
    }
    Ok(sup)
}

/// Right-hand side of the deterministic bound on `sup |C_n - C_n^beta|`:
/// `d (sqrt(log n / n) + 1/sqrt(n) + 1/n)`.
pub fn beta_empirical_distance_bound(n: usize, d: usize) -> f64 {
    let nf = n as f64;
    d as f64 * ((nf.ln() / nf).sqrt() + nf.powf(-0.5) + 1.0 / nf)
}
