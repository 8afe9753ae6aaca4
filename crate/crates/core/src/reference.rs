//! Bivariate parametric copulas used as ground truth in simulations.
//!
//! Each family provides its distribution function, first and second partial
//! derivatives, a seeded sampler, the Bernstein transform `B_m(C)` and the
//! plug-in Bernstein degree `m0(u) = (4 b(u)^2 / V(u))^(2/3) n^(2/3)` with
//!
//! ```text
//! b(u) = 1/2 sum_j u_j (1 - u_j) C''_jj(u),
//! V(u) = sum_j C'_j(u) (1 - C'_j(u)) sqrt(u_j (1 - u_j) / pi).
//! ```

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array2, ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bernstein::{eval_bernstein, eval_bernstein_grid, CoefficientArray};
use crate::data::Sample;
use crate::error::{domain, CopulaError, Result};
use crate::special::{integrate, normal_cdf, normal_pdf, normal_quantile};

/// Absolute tolerance of the quadrature behind the Gaussian copula CDF.
const GAUSS_CDF_TOL: f64 = 1e-13;

/// Lower integration limit standing in for minus infinity (`phi(-39)` underflows).
const NORMAL_LOWER_LIMIT: f64 = -39.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Independence,
    Fgm { theta: f64 },
    Gauss { rho: f64 },
    Gumbel { alpha: f64 },
}

/// First and second partial derivatives `(C'_1, C'_2, C''_11, C''_22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d22: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCopula {
    family: Family,
}

impl fmt::Display for ReferenceCopula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Independence => write!(f, "indep"),
            Family::Fgm { theta } => write!(f, "fgm(theta={theta})"),
            Family::Gauss { rho } => write!(f, "gauss(rho={rho})"),
            Family::Gumbel { alpha } => write!(f, "gumbel(tau={})", 1.0 - 1.0 / alpha),
        }
    }
}

fn check_interior(u: &[f64]) -> Result<(f64, f64)> {
    let (u1, u2) = check_point(u)?;
    if u1 <= 0.0 || u1 >= 1.0 || u2 <= 0.0 || u2 >= 1.0 {
        return Err(domain(format!("point ({u1}, {u2}) is not interior")));
    }
    Ok((u1, u2))
}

fn check_point(u: &[f64]) -> Result<(f64, f64)> {
    if u.len() != 2 {
        return Err(CopulaError::DimensionMismatch {
            expected: 2,
            found: u.len(),
        });
    }
    if !u.iter().all(|x| (0.0..=1.0).contains(x)) {
        return Err(domain(format!("point {u:?} outside the unit square")));
    }
    Ok((u[0], u[1]))
}

impl ReferenceCopula {
    pub fn independence() -> Self {
        Self {
            family: Family::Independence,
        }
    }

    pub fn fgm(theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return Err(domain(format!("FGM parameter {theta} outside [-1, 1]")));
        }
        Ok(Self {
            family: Family::Fgm { theta },
        })
    }

    pub fn gauss(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(domain(format!("Gaussian correlation {rho} outside (-1, 1)")));
        }
        Ok(Self {
            family: Family::Gauss { rho },
        })
    }

    /// Gumbel copula with Kendall's tau `tau`, i.e. `alpha = 1 / (1 - tau)`.
    pub fn gumbel_tau(tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(domain(format!("Gumbel tau {tau} outside [0, 1)")));
        }
        Self::gumbel_alpha(1.0 / (1.0 - tau))
    }

    pub fn gumbel_alpha(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(domain(format!("Gumbel alpha {alpha} must be >= 1")));
        }
        Ok(Self {
            family: Family::Gumbel { alpha },
        })
    }

    /// Builds a model from a family name and its single parameter
    /// (`theta` for fgm, `rho` for gauss, `tau` for gumbel, none for indep).
    pub fn from_spec(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &str| param.ok_or_else(|| CopulaError::Config(format!("model {name} needs --{what}")));
        match name {
            "indep" | "independence" => Ok(Self::independence()),
            "fgm" => Self::fgm(need("theta")?),
            "gauss" | "gaussian" => Self::gauss(need("rho")?),
            "gumbel" => Self::gumbel_tau(need("tau")?),
            other => Err(CopulaError::Config(format!("unknown model '{other}'"))),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        2
    }

    /// File-name friendly label, e.g. `fgm_theta-1`.
    pub fn slug(&self) -> String {
        match self.family {
            Family::Independence => "indep".into(),
            Family::Fgm { theta } => format!("fgm_theta{theta}"),
            Family::Gauss { rho } => format!("gauss_rho{rho}"),
            Family::Gumbel { alpha } => format!("gumbel_tau{}", 1.0 - 1.0 / alpha),
        }
    }

    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        let (u1, u2) = check_point(u)?;
        Ok(self.cdf2(u1, u2))
    }

    pub(crate) fn cdf2(&self, u1: f64, u2: f64) -> f64 {
        if u1 == 0.0 || u2 == 0.0 {
            return 0.0;
        }
        if u1 == 1.0 {
            return u2;
        }
        if u2 == 1.0 {
            return u1;
        }
        match self.family {
            Family::Independence => u1 * u2,
            Family::Fgm { theta } => u1 * u2 * (1.0 + theta * (1.0 - u1) * (1.0 - u2)),
            Family::Gauss { rho } => gauss_cdf(rho, u1, u2),
            Family::Gumbel { alpha } => {
                let a = (-u1.ln()).powf(alpha) + (-u2.ln()).powf(alpha);
                (-a.powf(1.0 / alpha)).exp()
            }
        }
    }

    pub fn partial_derivatives(&self, u: &[f64]) -> Result<Partials> {
        let (u1, u2) = check_interior(u)?;
        let (d1, d11) = self.first_and_second(u1, u2);
        let (d2, d22) = self.first_and_second(u2, u1);
        Ok(Partials { d1, d2, d11, d22 })
    }

    /// `(dC/du1, d2C/du1^2)` at `(u1, u2)`; all families here are exchangeable, so the
    /// derivatives in the second argument are obtained by swapping.
    fn first_and_second(&self, u1: f64, u2: f64) -> (f64, f64) {
        match self.family {
            Family::Independence => (u2, 0.0),
            Family::Fgm { theta } => {
                let w = u2 * (1.0 - u2);
                (u2 + theta * w * (1.0 - 2.0 * u1), -2.0 * theta * w)
            }
            Family::Gauss { rho } => {
                let s = (1.0 - rho * rho).sqrt();
                let a = normal_quantile(u1);
                let b = normal_quantile(u2);
                let z = (b - rho * a) / s;
                (normal_cdf(z), normal_pdf(z) * (-rho / s) / normal_pdf(a))
            }
            Family::Gumbel { alpha } => {
                let x = -u1.ln();
                let y = -u2.ln();
                let a = x.powf(alpha) + y.powf(alpha);
                let c = (-a.powf(1.0 / alpha)).exp();
                let d1 = c * a.powf(1.0 / alpha - 1.0) * x.powf(alpha - 1.0) / u1;
                let d11 = d1
                    * (d1 / c
                        - (1.0 / alpha - 1.0) * alpha * x.powf(alpha - 1.0) / (u1 * a)
                        - (alpha - 1.0) / (u1 * x)
                        - 1.0 / u1);
                (d1, d11)
            }
        }
    }

    /// Conditional distribution `P(U2 <= v | U1 = u1) = dC/du1 (u1, v)`.
    fn conditional(&self, u1: f64, v: f64) -> f64 {
        self.first_and_second(u1, v).0
    }

    /// Draws `n` observations with a generator seeded from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Sample {
        self.sample_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Sample {
        let mut values = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let (a, b) = self.draw(rng);
            values.push(a);
            values.push(b);
        }
        Sample::new(n, 2, values).expect("draws are finite")
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self.family {
            Family::Independence => (rng.random(), rng.random()),
            Family::Gauss { rho } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let x2 = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
                (normal_cdf(z1), normal_cdf(x2))
            }
            Family::Fgm { theta } => {
                let u1: f64 = rng.random();
                let w: f64 = rng.random();
                // Solve v + a v (1 - v) = w, a = theta (1 - 2 u1), on [0, 1].
                let a = theta * (1.0 - 2.0 * u1);
                let disc = ((1.0 + a) * (1.0 + a) - 4.0 * a * w).max(0.0);
                (u1, 2.0 * w / (1.0 + a + disc.sqrt()))
            }
            Family::Gumbel { .. } => {
                let u1: f64 = rng.random();
                let w: f64 = rng.random();
                (u1, self.invert_conditional(u1, w))
            }
        }
    }

    /// Solves `conditional(u1, v) = w` for `v` by bisection; the conditional
    /// distribution is continuous and increasing in `v`.
    fn invert_conditional(&self, u1: f64, w: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.conditional(u1, mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Coefficient array `a_s = C(s_1/m_1, s_2/m_2)`.
    pub fn coefficient_array(&self, degrees: &[usize]) -> Result<CoefficientArray<f64>> {
        if degrees.len() != 2 {
            return Err(CopulaError::DimensionMismatch {
                expected: 2,
                found: degrees.len(),
            });
        }
        if degrees.contains(&0) {
            return Err(domain("Bernstein degrees must be positive"));
        }
        let (m1, m2) = (degrees[0] as f64, degrees[1] as f64);
        CoefficientArray::from_fn(degrees.to_vec(), |s| self.cdf2(s[0] as f64 / m1, s[1] as f64 / m2))
    }

    /// Bernstein transform `B_m(C)(u)`.
    pub fn bernstein_transform(&self, degrees: &[usize], u: &[f64]) -> Result<f64> {
        check_point(u)?;
        eval_bernstein(&self.coefficient_array(degrees)?, u)
    }

    /// `B_m(C)` on a tensor grid.
    pub fn bernstein_transform_grid(&self, degrees: &[usize], axes: &[Vec<f64>]) -> Result<ArrayD<f64>> {
        eval_bernstein_grid(&self.coefficient_array(degrees)?, axes)
    }

    /// `C` on a tensor grid.
    pub fn cdf_grid(&self, axes: &[Vec<f64>]) -> Result<ArrayD<f64>> {
        if axes.len() != 2 {
            return Err(CopulaError::DimensionMismatch {
                expected: 2,
                found: axes.len(),
            });
        }
        for x in axes.iter().flatten() {
            check_point(&[*x, *x])?;
        }
        let mut out = Array2::zeros((axes[0].len(), axes[1].len()));
        for (i, &x) in axes[0].iter().enumerate() {
            for (j, &y) in axes[1].iter().enumerate() {
                out[[i, j]] = self.cdf2(x, y);
            }
        }
        Ok(out
            .into_shape_with_order(IxDyn(&[axes[0].len(), axes[1].len()]))
            .expect("contiguous"))
    }

    /// Unrounded `m0(u)` for sample size `n`.
    pub fn jsv_degree_real(&self, u: &[f64], n: usize) -> Result<f64> {
        let p = self.partial_derivatives(u)?;
        let (u1, u2) = (u[0], u[1]);
        let b = 0.5 * (u1 * (1.0 - u1) * p.d11 + u2 * (1.0 - u2) * p.d22);
        let v =
            p.d1 * (1.0 - p.d1) * (u1 * (1.0 - u1) / PI).sqrt() + p.d2 * (1.0 - p.d2) * (u2 * (1.0 - u2) / PI).sqrt();
        let undefined = |reason: &str| CopulaError::UndefinedBandwidth {
            model: self.to_string(),
            reason: reason.to_string(),
        };
        if b == 0.0 {
            return Err(undefined("the bias term b(u) vanishes"));
        }
        if v.is_nan() || v <= 0.0 {
            return Err(undefined("the variance term V(u) vanishes"));
        }
        Ok((4.0 * b * b / v).powf(2.0 / 3.0) * (n as f64).powf(2.0 / 3.0))
    }

    /// Plug-in Bernstein degree `max(1, floor(m0(u)))`.
    pub fn jsv_degree(&self, u: &[f64], n: usize) -> Result<usize> {
        let m0 = self.jsv_degree_real(u, n)?;
        Ok((m0.floor() as usize).max(1))
    }
}

/// `P(Z1 <= a, Z2 <= b)` for standard normals with correlation `rho`, written as
/// `int_{-inf}^{a} phi(x) Phi((b - rho x) / sqrt(1 - rho^2)) dx`.
fn gauss_cdf(rho: f64, u1: f64, u2: f64) -> f64 {
    if rho == 0.0 {
        return u1 * u2;
    }
    let a = normal_quantile(u1);
    let b = normal_quantile(u2);
    let s = (1.0 - rho * rho).sqrt();
    if a <= NORMAL_LOWER_LIMIT {
        return 0.0;
    }
    let v = integrate(
        |x| normal_pdf(x) * normal_cdf((b - rho * x) / s),
        NORMAL_LOWER_LIMIT,
        a,
        GAUSS_CDF_TOL,
    );
    v.clamp(0.0, u1.min(u2))
}
