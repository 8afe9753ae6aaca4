//! Bernstein polynomials on the unit cube and the coefficient conditions
//! under which they are copulas.
//!
//! A coefficient array `a` indexed by `s in prod_j {0, ..., m_j}` defines
//!
//! ```text
//! B_m(a)(u) = sum_s a_s prod_j p_{m_j, s_j}(u_j),   p_{m,s}(u) = C(m,s) u^s (1-u)^(m-s).
//! ```
//!
//! `B_m(a)` is a copula when
//!
//! * (C.1) `a_s = 0` as soon as some `s_j = 0` (groundedness),
//! * (C.2) `a_{m_1..s_j..m_d} = s_j / m_j` along every edge (uniform margins),
//! * (C.3) the full mixed difference `Delta_1 ... Delta_d a` is nonnegative.
//!
//! The first two are also necessary. The third is not: [`mixed_partial_is_nonnegative_on_grid`]
//! offers a grid heuristic for arrays that fail it, but a passing grid is not a proof.

use std::fmt::Debug;
use std::path::Path;

use ndarray::{Array2, ArrayD, IxDyn};
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive, Zero};

use crate::error::{domain, CopulaError, Result};
use crate::special::{binomial, ln_binomial};
use crate::tensor::contract_all;

/// Degrees above which basis values are computed in log space.
pub const LOG_SPACE_THRESHOLD: u32 = 50;

/// Absolute tolerance used by [`check_copula_conditions`] on floating-point arrays.
pub const CONDITION_TOLERANCE: f64 = 1e-12;

/// Maximum number of witnesses recorded per condition.
pub const MAX_WITNESSES: usize = 100;

/// Scalar type of a coefficient array.
///
/// Implemented for `f64` (conditions checked to [`CONDITION_TOLERANCE`]) and for
/// exact rationals, for which all checks are exact.
pub trait Coefficient: Copy + Debug + PartialOrd + Num {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn tolerance() -> Self;
    fn is_finite_value(&self) -> bool;
    fn as_f64(&self) -> f64;
    fn parse_value(text: &str) -> Option<Self>;
}

impl Coefficient for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn tolerance() -> Self {
        CONDITION_TOLERANCE
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn parse_value(text: &str) -> Option<Self> {
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            return Some(num / den);
        }
        text.trim().parse().ok()
    }
}

impl Coefficient for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn tolerance() -> Self {
        Ratio::zero()
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn parse_value(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let den: i64 = den.trim().parse().ok()?;
            if den == 0 {
                return None;
            }
            return Some(Ratio::new(num.trim().parse().ok()?, den));
        }
        // Decimal literals are exact rationals with a power-of-ten denominator.
        let (sign, digits) = match text.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, text),
        };
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        if frac.len() > 17 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        Some(Ratio::new(sign * int.checked_mul(den)?.checked_add(frac)?, den))
    }
}

/// A real (or rational) array over the index box `prod_j {0, ..., m_j}`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArray<T = f64> {
    degrees: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<T>,
}

fn row_major_strides(extents: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; extents.len()];
    for j in (0..extents.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * extents[j + 1];
    }
    strides
}

/// Iterates all multi-indices of a box with the given extents in row-major order.
fn for_each_index(extents: &[usize], mut f: impl FnMut(&[usize])) {
    if extents.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; extents.len()];
    loop {
        f(&idx);
        let mut axis = extents.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < extents[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

impl<T: Coefficient> CoefficientArray<T> {
    /// Wraps row-major values; axis `j` must have extent `degrees[j] + 1`.
    pub fn new(degrees: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(domain("coefficient array needs at least one axis"));
        }
        if degrees.contains(&0) {
            return Err(domain("Bernstein degrees must be positive"));
        }
        let extents: Vec<usize> = degrees.iter().map(|m| m + 1).collect();
        let len: usize = extents.iter().product();
        if values.len() != len {
            return Err(CopulaError::DimensionMismatch {
                expected: len,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(domain("coefficient array entries must be finite"));
        }
        Ok(Self {
            strides: row_major_strides(&extents),
            degrees,
            values,
        })
    }

    /// Builds the array `a_s = f(s)`.
    pub fn from_fn(degrees: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let extents: Vec<usize> = degrees.iter().map(|m| m + 1).collect();
        let mut values = Vec::with_capacity(extents.iter().product());
        for_each_index(&extents, |s| values.push(f(s)));
        Self::new(degrees, values)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn extents(&self) -> Vec<usize> {
        self.degrees.iter().map(|m| m + 1).collect()
    }

    pub fn get(&self, s: &[usize]) -> T {
        self.values[self.offset(s)]
    }

    fn offset(&self, s: &[usize]) -> usize {
        s.iter().zip(&self.strides).map(|(a, b)| a * b).sum()
    }

    /// Writes one line `s_1,...,s_d,value` per multi-index in row-major order.
    pub fn to_csv_string(&self) -> String
    where
        T: std::fmt::Display,
    {
        let mut out = String::new();
        let mut k = 0;
        for_each_index(&self.extents(), |s| {
            for v in s {
                out.push_str(&v.to_string());
                out.push(',');
            }
            out.push_str(&self.values[k].to_string());
            out.push('\n');
            k += 1;
        });
        out
    }

    /// Parses the CSV layout of [`CoefficientArray::to_csv_string`]. Lines may appear in
    /// any order; degrees are inferred from the largest index on each axis and the
    /// full index box must be present exactly once.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut entries: Vec<(Vec<usize>, T)> = Vec::new();
        let mut dim = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_err = |message: String| CopulaError::Parse {
                line: lineno + 1,
                message,
            };
            if fields.len() < 2 {
                return Err(parse_err("expected s_1,...,s_d,value".into()));
            }
            let d = fields.len() - 1;
            if *dim.get_or_insert(d) != d {
                return Err(parse_err("inconsistent number of indices".into()));
            }
            let idx = fields[..d]
                .iter()
                .map(|f| f.parse::<usize>().map_err(|_| parse_err(format!("bad index {f:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let value = T::parse_value(fields[d]).ok_or_else(|| parse_err(format!("bad value {:?}", fields[d])))?;
            entries.push((idx, value));
        }
        let d = dim.ok_or(CopulaError::Parse {
            line: 0,
            message: "empty coefficient file".into(),
        })?;
        let degrees: Vec<usize> = (0..d)
            .map(|j| entries.iter().map(|(s, _)| s[j]).max().unwrap_or(0))
            .collect();
        if degrees.contains(&0) {
            return Err(domain("Bernstein degrees must be positive"));
        }
        let extents: Vec<usize> = degrees.iter().map(|m| m + 1).collect();
        let strides = row_major_strides(&extents);
        let len: usize = extents.iter().product();
        let mut slots: Vec<Option<T>> = vec![None; len];
        for (s, v) in entries {
            let off: usize = s.iter().zip(&strides).map(|(a, b)| a * b).sum();
            if slots[off].replace(v).is_some() {
                return Err(domain(format!("duplicate multi-index {s:?}")));
            }
        }
        let values = slots
            .into_iter()
            .collect::<Option<Vec<T>>>()
            .ok_or_else(|| domain("coefficient file does not cover the full index box"))?;
        Self::new(degrees, values)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

impl CoefficientArray<Ratio<i64>> {
    pub fn to_f64(&self) -> CoefficientArray<f64> {
        CoefficientArray {
            degrees: self.degrees.clone(),
            strides: self.strides.clone(),
            values: self.values.iter().map(Coefficient::as_f64).collect(),
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

/// `p_{m,s}(u) = C(m,s) u^s (1-u)^(m-s)`.
pub fn bernstein_basis(m: u32, s: u32, u: f64) -> Result<f64> {
    if s > m {
        return Err(domain(format!("basis index {s} exceeds degree {m}")));
    }
    check_unit(u)?;
    Ok(basis_unchecked(m, s, u))
}

fn basis_unchecked(m: u32, s: u32, u: f64) -> f64 {
    if u == 0.0 {
        return if s == 0 { 1.0 } else { 0.0 };
    }
    if u == 1.0 {
        return if s == m { 1.0 } else { 0.0 };
    }
    if m <= LOG_SPACE_THRESHOLD {
        binomial(m, s) * u.powi(s as i32) * (1.0 - u).powi((m - s) as i32)
    } else {
        (ln_binomial(m, s) + s as f64 * u.ln() + (m - s) as f64 * (-u).ln_1p()).exp()
    }
}

/// All basis values `p_{m,0}(u), ..., p_{m,m}(u)`; `u` is assumed to lie in `[0, 1]`.
pub fn bernstein_basis_all(m: u32, u: f64) -> Vec<f64> {
    let len = m as usize + 1;
    let mut out = vec![0.0; len];
    if u == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if u == 1.0 {
        out[len - 1] = 1.0;
        return out;
    }
    if m <= LOG_SPACE_THRESHOLD {
        let v = 1.0 - u;
        let mut coef = 1.0f64;
        for (s, slot) in out.iter_mut().enumerate() {
            *slot = coef * u.powi(s as i32) * v.powi((m as usize - s) as i32);
            coef = coef * (m as usize - s) as f64 / (s + 1) as f64;
        }
    } else {
        // Log space at the mode, then the term ratio outwards; terms decrease
        // monotonically away from the mode, so underflow only hits negligible tails.
        let m_us = m as usize;
        let v = 1.0 - u;
        let mode = (((m as f64 + 1.0) * u).floor() as usize).min(m_us);
        out[mode] = (ln_binomial(m, mode as u32) + mode as f64 * u.ln() + (m_us - mode) as f64 * (-u).ln_1p()).exp();
        let odds = u / v;
        for s in mode..m_us {
            out[s + 1] = out[s] * ((m_us - s) as f64 / (s + 1) as f64) * odds;
        }
        for s in (0..mode).rev() {
            out[s] = out[s + 1] * ((s + 1) as f64 / (m_us - s) as f64) / odds;
        }
    }
    out
}

/// Basis matrix with rows `p_{m,.}(x_g)` for each evaluation point `x_g`.
pub fn basis_matrix(m: u32, points: &[f64]) -> Array2<f64> {
    let mut mat = Array2::zeros((points.len(), m as usize + 1));
    for (g, &x) in points.iter().enumerate() {
        for (s, v) in bernstein_basis_all(m, x).into_iter().enumerate() {
            mat[[g, s]] = v;
        }
    }
    mat
}

fn check_point(a_dim: usize, u: &[f64]) -> Result<()> {
    if u.len() != a_dim {
        return Err(CopulaError::DimensionMismatch {
            expected: a_dim,
            found: u.len(),
        });
    }
    u.iter().try_for_each(|&x| check_unit(x))
}

/// Evaluates `B_m(a)(u)`. Zero basis factors prune whole sub-boxes, so at points with
/// coordinates in `{0, 1}` only the corresponding boundary slice is visited.
pub fn eval_bernstein(a: &CoefficientArray<f64>, u: &[f64]) -> Result<f64> {
    check_point(a.dim(), u)?;
    let bases: Vec<Vec<f64>> = a
        .degrees
        .iter()
        .zip(u)
        .map(|(&m, &x)| bernstein_basis_all(m as u32, x))
        .collect();
    Ok(contract_point(a, &bases))
}

/// `sum_s a_s prod_j bases[j][s_j]` with pruning of zero factors.
pub(crate) fn contract_point(a: &CoefficientArray<f64>, bases: &[Vec<f64>]) -> f64 {
    fn rec(a: &CoefficientArray<f64>, bases: &[Vec<f64>], axis: usize, offset: usize) -> f64 {
        let basis = &bases[axis];
        let stride = a.strides[axis];
        if axis + 1 == bases.len() {
            return basis
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(s, &p)| p * a.values[offset + s * stride])
                .sum();
        }
        let mut total = 0.0;
        for (s, &p) in basis.iter().enumerate() {
            if p != 0.0 {
                total += p * rec(a, bases, axis + 1, offset + s * stride);
            }
        }
        total
    }
    rec(a, bases, 0, 0)
}

/// Evaluates `B_m(a)` on the tensor grid `axes[0] x ... x axes[d-1]`.
pub fn eval_bernstein_grid(a: &CoefficientArray<f64>, axes: &[Vec<f64>]) -> Result<ArrayD<f64>> {
    if axes.len() != a.dim() {
        return Err(CopulaError::DimensionMismatch {
            expected: a.dim(),
            found: axes.len(),
        });
    }
    for x in axes.iter().flatten() {
        check_unit(*x)?;
    }
    let tensor = ArrayD::from_shape_vec(IxDyn(&a.extents()), a.values.clone()).expect("extents match values");
    let mats: Vec<Array2<f64>> = a
        .degrees
        .iter()
        .zip(axes)
        .map(|(&m, pts)| basis_matrix(m as u32, pts))
        .collect();
    Ok(contract_all(tensor, &mats))
}

/// Result of [`difference`]: an array over the box where differenced axes run over
/// `1..=m_j` and the others over `0..=m_j`. Indexed with the original multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceArray<T> {
    lower: Vec<usize>,
    extents: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy> DifferenceArray<T> {
    pub fn get(&self, s: &[usize]) -> Option<T> {
        let mut off = 0;
        for (j, &sj) in s.iter().enumerate() {
            let k = sj.checked_sub(self.lower[j])?;
            if k >= self.extents[j] {
                return None;
            }
            off += k * self.strides[j];
        }
        Some(self.values[off])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Iterates `(multi-index, value)` pairs in row-major order.
    pub fn entries(&self) -> Vec<(Vec<usize>, T)> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut k = 0;
        for_each_index(&self.extents, |idx| {
            let s: Vec<usize> = idx.iter().zip(&self.lower).map(|(a, b)| a + b).collect();
            out.push((s, self.values[k]));
            k += 1;
        });
        out
    }
}

/// Applies `Delta_j` for each `j` in `axes` (0-based, distinct), where
/// `Delta_j a_s = a_s - a_{s - e_j}` for `s_j >= 1`.
pub fn difference<T: Coefficient>(a: &CoefficientArray<T>, axes: &[usize]) -> Result<DifferenceArray<T>> {
    let d = a.dim();
    for (k, &axis) in axes.iter().enumerate() {
        if axis >= d {
            return Err(CopulaError::DimensionMismatch {
                expected: d,
                found: axis + 1,
            });
        }
        if axes[..k].contains(&axis) {
            return Err(domain(format!("axis {axis} repeated")));
        }
    }
    let mut lower = vec![0usize; d];
    let mut extents = a.extents();
    let mut values = a.values.clone();
    for &axis in axes {
        let strides = row_major_strides(&extents);
        let mut next_extents = extents.clone();
        next_extents[axis] -= 1;
        let mut next = Vec::with_capacity(next_extents.iter().product());
        for_each_index(&next_extents, |idx| {
            let hi: usize = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| (i + usize::from(j == axis)) * strides[j])
                .sum();
            next.push(values[hi] - values[hi - strides[axis]]);
        });
        values = next;
        extents = next_extents;
        lower[axis] = 1;
    }
    Ok(DifferenceArray {
        strides: row_major_strides(&extents),
        lower,
        extents,
        values,
    })
}

/// Which coefficient condition a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// (C.1) zero on the lower boundary.
    Grounded,
    /// (C.2) linear along the upper edges.
    UniformMargins,
    /// (C.3) nonnegative full mixed difference.
    NonnegDifferences,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub condition: Condition,
    pub index: Vec<usize>,
    pub value: T,
}

/// Outcome of [`check_copula_conditions`]; witnesses are capped at
/// [`MAX_WITNESSES`] per condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    pub grounded: bool,
    pub uniform_margins: bool,
    pub nonneg_differences: bool,
    pub witnesses: Vec<Witness<T>>,
}

impl<T> ValidityReport<T> {
    /// True when (C.1)-(C.3) all hold, which makes `B_m(a)` a copula.
    pub fn all_hold(&self) -> bool {
        self.grounded && self.uniform_margins && self.nonneg_differences
    }

    pub fn witnesses_for(&self, condition: Condition) -> impl Iterator<Item = &Witness<T>> {
        self.witnesses.iter().filter(move |w| w.condition == condition)
    }
}

fn abs_diff<T: Coefficient>(x: T, y: T) -> T {
    if x >= y {
        x - y
    } else {
        y - x
    }
}

/// Checks conditions (C.1)-(C.3) on `a`.
pub fn check_copula_conditions<T: Coefficient>(a: &CoefficientArray<T>) -> ValidityReport<T> {
    let tol = T::tolerance();
    let d = a.dim();
    let mut witnesses = Vec::new();
    let mut counts = [0usize; 3];
    let mut push = |witnesses: &mut Vec<Witness<T>>, condition: Condition, index: &[usize], value: T| {
        let slot = condition as usize;
        counts[slot] += 1;
        if counts[slot] <= MAX_WITNESSES {
            witnesses.push(Witness {
                condition,
                index: index.to_vec(),
                value,
            });
        }
    };

    let mut k = 0;
    for_each_index(&a.extents(), |s| {
        let v = a.values[k];
        k += 1;
        if s.contains(&0) && abs_diff(v, T::zero()) > tol {
            push(&mut witnesses, Condition::Grounded, s, v);
        }
        // Edge entries: every coordinate except at most one sits at its degree.
        let off_top: Vec<usize> = (0..d).filter(|&j| s[j] != a.degrees[j]).collect();
        let edges: Vec<usize> = match off_top.len() {
            0 => (0..d).collect(),
            1 => off_top,
            _ => Vec::new(),
        };
        if let Some(&j) = edges.first() {
            let target = T::from_ratio(s[j] as i64, a.degrees[j] as i64);
            if abs_diff(v, target) > tol {
                push(&mut witnesses, Condition::UniformMargins, s, v);
            }
        }
    });

    let all_axes: Vec<usize> = (0..d).collect();
    let diff = difference(a, &all_axes).expect("axes are valid");
    for (s, v) in diff.entries() {
        if v < T::zero() - tol {
            push(&mut witnesses, Condition::NonnegDifferences, &s, v);
        }
    }

    ValidityReport {
        grounded: counts[0] == 0,
        uniform_margins: counts[1] == 0,
        nonneg_differences: counts[2] == 0,
        witnesses,
    }
}

/// `d_1 ... d_d B_m(a)(u)` at an interior point, through the mixed-difference expansion
/// `sum_{s >= 1} Delta_1...Delta_d a_s prod_j m_j p_{m_j - 1, s_j - 1}(u_j)`.
pub fn mixed_partial(a: &CoefficientArray<f64>, u: &[f64]) -> Result<f64> {
    if u.len() != a.dim() {
        return Err(CopulaError::DimensionMismatch {
            expected: a.dim(),
            found: u.len(),
        });
    }
    if u.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(domain("mixed partial requires a point in the open unit cube"));
    }
    let all_axes: Vec<usize> = (0..a.dim()).collect();
    let diff = difference(a, &all_axes)?;
    let bases: Vec<Vec<f64>> = a
        .degrees
        .iter()
        .zip(u)
        .map(|(&m, &x)| {
            bernstein_basis_all(m as u32 - 1, x)
                .into_iter()
                .map(|p| p * m as f64)
                .collect()
        })
        .collect();
    let inner = CoefficientArray {
        degrees: a.degrees.iter().map(|m| m - 1).collect(),
        strides: diff.strides.clone(),
        values: diff.values,
    };
    Ok(contract_point(&inner, &bases))
}

/// Heuristic d-increasingness check for arrays failing (C.3): evaluates the mixed
/// partial at the interior points of a regular grid with `points_per_axis` points.
/// A `true` answer is evidence only, not a decision.
pub fn mixed_partial_is_nonnegative_on_grid(a: &CoefficientArray<f64>, points_per_axis: usize) -> bool {
    let pts: Vec<f64> = (1..=points_per_axis)
        .map(|k| k as f64 / (points_per_axis + 1) as f64)
        .collect();
    let extents = vec![points_per_axis; a.dim()];
    let mut ok = true;
    let mut u = vec![0.0; a.dim()];
    for_each_index(&extents, |idx| {
        if ok {
            for (x, &i) in u.iter_mut().zip(idx) {
                *x = pts[i];
            }
            ok = mixed_partial(a, &u).map(|v| v >= -1e-9).unwrap_or(false);
        }
    });
    ok
}

/// Right-hand side of the derivative identity
/// `sum_r a_r p'_{n,r}(t) = sum_{r=1}^n (a_r - a_{r-1}) n p_{n-1,r-1}(t)`.
pub fn derivative_identity_rhs(a: &[f64], t: f64) -> Result<f64> {
    if a.len() < 2 {
        return Err(domain("need at least two coefficients (n >= 1)"));
    }
    check_unit(t)?;
    let n = (a.len() - 1) as u32;
    let basis = bernstein_basis_all(n - 1, t);
    Ok(a.windows(2).zip(basis).map(|(w, p)| (w[1] - w[0]) * n as f64 * p).sum())
}
