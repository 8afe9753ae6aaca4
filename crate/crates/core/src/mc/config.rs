//! Experiment configuration: model, estimators, sample sizes, replications and seed.

use std::fmt;

use crate::error::{CopulaError, Result};
use crate::estimators::EstimatorKind;
use crate::reference::ReferenceCopula;

/// Paper-scale replication count used when none is given.
pub const DEFAULT_REPLICATIONS: usize = 20_000;

/// How the Bernstein degree is chosen for a replicate of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeRule {
    Fixed(usize),
    /// `m = ceil(n / 3)` on every axis.
    CeilNOver3,
    /// Plug-in degree `m0` of the true copula at the replicate's evaluation point.
    Jsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorSpec {
    Empirical,
    Checkerboard,
    Beta,
    Bernstein(DegreeRule),
    /// The true copula itself; its errors are identically zero.
    Oracle,
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empirical => write!(f, "empirical"),
            Self::Checkerboard => write!(f, "checkerboard"),
            Self::Beta => write!(f, "beta"),
            Self::Bernstein(DegreeRule::Fixed(m)) => write!(f, "bernstein:{m}"),
            Self::Bernstein(DegreeRule::CeilNOver3) => write!(f, "bernstein:ceil3"),
            Self::Bernstein(DegreeRule::Jsv) => write!(f, "bernstein:jsv"),
            Self::Oracle => write!(f, "oracle"),
        }
    }
}

impl std::str::FromStr for EstimatorSpec {
    type Err = CopulaError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "empirical" | "emp" => Self::Empirical,
            "checkerboard" | "checker" => Self::Checkerboard,
            "beta" => Self::Beta,
            "oracle" | "true" => Self::Oracle,
            _ => {
                let rule = s
                    .strip_prefix("bernstein:")
                    .ok_or_else(|| CopulaError::Config(format!("unknown estimator '{s}'")))?;
                Self::Bernstein(match rule {
                    "ceil3" | "ceil_n_over_3" => DegreeRule::CeilNOver3,
                    "jsv" => DegreeRule::Jsv,
                    m => DegreeRule::Fixed(
                        m.parse()
                            .ok()
                            .filter(|&m: &usize| m > 0)
                            .ok_or_else(|| CopulaError::Config(format!("invalid Bernstein degree '{m}'")))?,
                    ),
                })
            }
        })
    }
}

impl EstimatorSpec {
    /// Estimator kind for a replicate of size `n` in dimension `d`; `jsv_degree` is the
    /// plug-in degree, consulted only by the `Jsv` rule. `None` for the oracle.
    pub fn kind(&self, n: usize, d: usize, jsv_degree: Option<usize>) -> Option<EstimatorKind> {
        match *self {
            Self::Empirical => Some(EstimatorKind::Empirical),
            Self::Checkerboard => Some(EstimatorKind::Checkerboard),
            Self::Beta => Some(EstimatorKind::Beta),
            Self::Oracle => None,
            Self::Bernstein(rule) => {
                let m = match rule {
                    DegreeRule::Fixed(m) => m,
                    DegreeRule::CeilNOver3 => n.div_ceil(3),
                    DegreeRule::Jsv => jsv_degree.expect("jsv degree supplied by caller"),
                };
                Some(EstimatorKind::Bernstein(vec![m; d]))
            }
        }
    }

    pub fn uses_jsv(&self) -> bool {
        matches!(self, Self::Bernstein(DegreeRule::Jsv))
    }
}

/// Parses `"a:b:step"` (inclusive range) or a comma-separated list.
pub fn parse_n_values(text: &str) -> Result<Vec<usize>> {
    let bad = || CopulaError::Config(format!("invalid sample sizes '{text}'"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [from, to, step] => {
            let (from, to, step) = (parse(from)?, parse(to)?, parse(step)?);
            if step == 0 || from > to {
                return Err(bad());
            }
            (from..=to).step_by(step).collect()
        }
        [single] => single.split(',').map(parse).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}

pub fn parse_estimators(text: &str) -> Result<Vec<EstimatorSpec>> {
    text.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ReferenceCopula,
    pub estimators: Vec<EstimatorSpec>,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub lre_cells: Option<usize>,
    /// Evaluation points `V` per replicate in [`run_measures`](super::run_measures);
    /// the contributions are averaged, which keeps them unbiased and lowers their variance.
    pub eval_points: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(CopulaError::Config("at least two replications are required".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(CopulaError::Config("sample sizes must be positive and nonempty".into()));
        }
        if self.estimators.is_empty() {
            return Err(CopulaError::Config("estimator list is empty".into()));
        }
        if self.eval_points == 0 {
            return Err(CopulaError::Config(
                "at least one evaluation point per replicate is required".into(),
            ));
        }
        if self.lre_cells == Some(0) {
            return Err(CopulaError::Config("LRE cell count must be positive".into()));
        }
        Ok(())
    }

    /// Reads a flat `key = value` file. Keys: `model`, `theta`, `rho`, `tau`,
    /// `estimators`, `n`, `reps`, `seed`, `cells`, `points`. `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CopulaError::Parse {
                line: i + 1,
                message: format!("expected key = value, got '{line}'"),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|v| v.parse().map_err(|_| CopulaError::Config(format!("invalid {k} '{v}'"))))
                .transpose()
        };
        let model_name = get("model").ok_or_else(|| CopulaError::Config("missing model".into()))?;
        let param = num("theta")?.or(num("rho")?).or(num("tau")?);
        let cfg = Self {
            model: ReferenceCopula::from_spec(model_name, param)?,
            estimators: parse_estimators(get("estimators").unwrap_or("empirical,checkerboard,beta"))?,
            n_values: parse_n_values(get("n").ok_or_else(|| CopulaError::Config("missing n".into()))?)?,
            replications: match get("reps") {
                Some(v) => v
                    .parse()
                    .map_err(|_| CopulaError::Config(format!("invalid reps '{v}'")))?,
                None => DEFAULT_REPLICATIONS,
            },
            master_seed: match get("seed") {
                Some(v) => v
                    .parse()
                    .map_err(|_| CopulaError::Config(format!("invalid seed '{v}'")))?,
                None => 0,
            },
            lre_cells: get("cells")
                .map(|v| {
                    v.parse()
                        .map_err(|_| CopulaError::Config(format!("invalid cells '{v}'")))
                })
                .transpose()?,
            eval_points: match get("points") {
                Some(v) => v
                    .parse()
                    .map_err(|_| CopulaError::Config(format!("invalid points '{v}'")))?,
                None => 1,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_value_syntax() {
        assert_eq!(parse_n_values("20:100:10").unwrap().len(), 9);
        assert_eq!(parse_n_values("20,50,100").unwrap(), vec![20, 50, 100]);
        assert_eq!(parse_n_values("7").unwrap(), vec![7]);
        assert!(parse_n_values("10:5:1").is_err());
        assert!(parse_n_values("0").is_err());
        assert!(parse_n_values("a").is_err());
    }

    #[test]
    fn estimator_syntax_round_trips() {
        for s in [
            "empirical",
            "checkerboard",
            "beta",
            "bernstein:7",
            "bernstein:ceil3",
            "bernstein:jsv",
            "oracle",
        ] {
            let e: EstimatorSpec = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert!("bernstein:0".parse::<EstimatorSpec>().is_err());
        assert!("kernel".parse::<EstimatorSpec>().is_err());
        let e: EstimatorSpec = "bernstein:ceil3".parse().unwrap();
        assert_eq!(e.kind(61, 2, None), Some(EstimatorKind::Bernstein(vec![21, 21])));
    }

    #[test]
    fn key_value_file() {
        let cfg = ExperimentConfig::from_key_values(
            "# study\nmodel = fgm\ntheta = -1\nestimators = empirical,beta\nn = 20:40:10\nreps = 50\nseed = 9\ncells = 10\n",
        )
        .unwrap();
        assert_eq!(cfg.n_values, vec![20, 30, 40]);
        assert_eq!(cfg.replications, 50);
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.lre_cells, Some(10));
        assert_eq!(cfg.eval_points, 1);
        assert!(ExperimentConfig::from_key_values("model = fgm\nn = 10\n").is_err());
        assert!(ExperimentConfig::from_key_values("model = indep\nn = 10\nreps = 1\n").is_err());
        assert!(ExperimentConfig::from_key_values("garbage\n").is_err());
    }
}
