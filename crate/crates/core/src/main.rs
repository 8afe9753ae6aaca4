//! Command-line front end: estimation on grids, coefficient validation, sampling
//! from the empirical beta copula and Monte Carlo studies.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use copula_core::bernstein::{check_copula_conditions, Coefficient, CoefficientArray, ValidityReport};
use copula_core::data::{compute_ranks, read_sample_csv, RankMatrix, TiePolicy};
use copula_core::estimators::{regular_grid, CopulaEstimate, EstimatorKind};
use copula_core::mc::{
    format_real, parse_estimators, parse_n_values, run_lre_heatmap, run_study, write_lre_csv, ExperimentConfig,
    DEFAULT_REPLICATIONS,
};
use copula_core::reference::ReferenceCopula;
use copula_core::sampler::{BetaSampler, Scheme};
use copula_core::{CopulaError, Result};

#[derive(Parser)]
#[command(name = "copula", version, about = "Nonparametric copula estimation and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an estimator on a regular grid.
    Estimate(EstimateArgs),
    /// Check a Bernstein coefficient array against the copula conditions.
    Validate(ValidateArgs),
    /// Draw from the empirical beta copula of a sample.
    Sample(SampleArgs),
    /// Run a Monte Carlo study and write CSV results.
    Simulate(SimulateArgs),
    /// Compute a localized relative efficiency heatmap.
    Lre(LreArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Sample CSV, one observation per row.
    #[arg(long)]
    input: PathBuf,
    /// Skip the first line of the input.
    #[arg(long)]
    header: bool,
    /// Tie handling when ranking.
    #[arg(long, value_enum, default_value_t = Ties::Error)]
    ties: Ties,
    /// Seed for random tie-breaking.
    #[arg(long, default_value_t = 0)]
    tie_seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ties {
    Error,
    Random,
}

impl InputArgs {
    fn ranks(&self) -> Result<RankMatrix> {
        let sample = read_sample_csv(&self.input, self.header)?;
        let policy = match self.ties {
            Ties::Error => TiePolicy::Error,
            Ties::Random => TiePolicy::Random { seed: self.tie_seed },
        };
        compute_ranks(&sample, policy)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Empirical,
    Checkerboard,
    Beta,
    Bernstein,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    estimator: Kind,
    /// Comma-separated Bernstein degrees, one per dimension (or one for all).
    #[arg(long)]
    degrees: Option<String>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Coefficient CSV with rows `s_1,...,s_d,value`.
    #[arg(long)]
    input: PathBuf,
    /// Parse values as exact rationals (`a/b`, integers or decimals).
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Direct,
    Orderstat,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Direct)]
    scheme: SchemeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ModelArgs {
    /// indep, fgm, gauss or gumbel.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
}

impl ModelArgs {
    fn build(&self) -> Result<Option<ReferenceCopula>> {
        let Some(name) = &self.model else {
            return Ok(None);
        };
        let param = match name.as_str() {
            "fgm" => self.theta,
            "gauss" | "gaussian" => self.rho,
            "gumbel" => self.tau,
            _ => None,
        };
        ReferenceCopula::from_spec(name, param).map(Some)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat `key = value` file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated list, e.g. `empirical,checkerboard,beta,bernstein:ceil3`.
    #[arg(long)]
    estimators: Option<String>,
    /// Sample sizes as `from:to:step` or a comma-separated list.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write an LRE heatmap with this many cells per axis.
    #[arg(long)]
    cells: Option<usize>,
    /// Evaluation points per replicate.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LreArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    cells: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Estimate(a) => estimate(a).map(|_| ExitCode::SUCCESS),
        Command::Validate(a) => validate(a),
        Command::Sample(a) => sample(a).map(|_| ExitCode::SUCCESS),
        Command::Simulate(a) => simulate(a).map(|_| ExitCode::SUCCESS),
        Command::Lre(a) => lre(a).map(|_| ExitCode::SUCCESS),
    }
}

fn parse_degrees(text: &str, d: usize) -> Result<Vec<usize>> {
    let degrees = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| CopulaError::Config(format!("invalid degrees '{text}'")))?;
    match degrees.len() {
        1 => Ok(vec![degrees[0]; d]),
        k if k == d => Ok(degrees),
        k => Err(CopulaError::DimensionMismatch { expected: d, found: k }),
    }
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let ranks = a.input.ranks()?;
    let d = ranks.d();
    let kind = match a.estimator {
        Kind::Empirical => EstimatorKind::Empirical,
        Kind::Checkerboard => EstimatorKind::Checkerboard,
        Kind::Beta => EstimatorKind::Beta,
        Kind::Bernstein => {
            let text = a
                .degrees
                .as_deref()
                .ok_or_else(|| CopulaError::Config("bernstein needs --degrees".into()))?;
            EstimatorKind::Bernstein(parse_degrees(text, d)?)
        }
    };
    if a.grid < 2 {
        return Err(CopulaError::Config("--grid must be at least 2".into()));
    }
    let est = CopulaEstimate::new(kind, ranks)?;
    let axis = regular_grid(a.grid);
    let values = est.eval_grid(&vec![axis.clone(); d])?;
    let mut out = BufWriter::new(fs::File::create(&a.out)?);
    let header: Vec<String> = (1..=d).map(|j| format!("u_{j}")).collect();
    writeln!(out, "{},value", header.join(","))?;
    let mut idx = vec![0usize; d];
    for v in values.iter() {
        for &i in &idx {
            write!(out, "{},", format_real(axis[i]))?;
        }
        writeln!(out, "{}", format_real(*v))?;
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < a.grid {
                break;
            }
            idx[j] = 0;
        }
    }
    out.flush()?;
    Ok(())
}

fn print_report<T>(report: &ValidityReport<T>, show: impl Fn(&T) -> String) {
    println!("grounded (C.1): {}", report.grounded);
    println!("uniform_margins (C.2): {}", report.uniform_margins);
    println!("nonneg_differences (C.3): {}", report.nonneg_differences);
    for w in &report.witnesses {
        let idx: Vec<String> = w.index.iter().map(ToString::to_string).collect();
        println!("witness {:?} ({}) = {}", w.condition, idx.join(","), show(&w.value));
    }
    println!("copula: {}", report.all_hold());
}

fn validate(a: ValidateArgs) -> Result<ExitCode> {
    let ok = if a.exact {
        let arr = CoefficientArray::<Ratio<i64>>::read_csv(&a.input)?;
        let report = check_copula_conditions(&arr);
        print_report(&report, |v| v.to_string());
        report.all_hold()
    } else {
        let arr = CoefficientArray::<f64>::read_csv(&a.input)?;
        let report = check_copula_conditions(&arr);
        print_report(&report, |v| format_real(v.as_f64()));
        report.all_hold()
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sample(a: SampleArgs) -> Result<()> {
    let scheme = match a.scheme {
        SchemeArg::Direct => Scheme::DirectBeta,
        SchemeArg::Orderstat => Scheme::OrderStatistic,
    };
    let draws = BetaSampler::new(a.input.ranks()?, scheme, a.seed).draw(a.count)?;
    let mut out = BufWriter::new(fs::File::create(&a.out)?);
    for i in 0..draws.rows() {
        let row: Vec<String> = draws.row(i).iter().map(|&x| format_real(x)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => Some(ExperimentConfig::from_key_values(&fs::read_to_string(path)?)?),
        None => None,
    };
    let model = a.model.build()?;
    let cfg = match cfg.take() {
        Some(mut c) => {
            if let Some(m) = model {
                c.model = m;
            }
            if let Some(e) = &a.estimators {
                c.estimators = parse_estimators(e)?;
            }
            if let Some(n) = &a.n {
                c.n_values = parse_n_values(n)?;
            }
            if let Some(r) = a.reps {
                c.replications = r;
            }
            if let Some(s) = a.seed {
                c.master_seed = s;
            }
            if a.cells.is_some() {
                c.lre_cells = a.cells;
            }
            if let Some(p) = a.points {
                c.eval_points = p;
            }
            c
        }
        None => ExperimentConfig {
            model: model.ok_or_else(|| CopulaError::Config("missing --model".into()))?,
            estimators: parse_estimators(a.estimators.as_deref().unwrap_or("empirical,checkerboard,beta"))?,
            n_values: parse_n_values(
                a.n.as_deref()
                    .ok_or_else(|| CopulaError::Config("missing --n".into()))?,
            )?,
            replications: a.reps.unwrap_or(DEFAULT_REPLICATIONS),
            master_seed: a.seed.unwrap_or(0),
            lre_cells: a.cells,
            eval_points: a.points.unwrap_or(1),
        },
    };
    let written = run_study(&cfg, &a.out)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn lre(a: LreArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        model: a
            .model
            .build()?
            .ok_or_else(|| CopulaError::Config("missing --model".into()))?,
        estimators: vec![copula_core::mc::EstimatorSpec::Beta],
        n_values: vec![a.n],
        replications: a.reps,
        master_seed: a.seed,
        lre_cells: Some(a.cells),
        eval_points: 1,
    };
    let heatmap = run_lre_heatmap(&cfg)?.remove(0);
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_lre_csv(&heatmap, Path::new(&a.out))?;
    let o = heatmap.overall_mean();
    println!("mean LRE {} % (se {})", format_real(o.mean), format_real(o.stderr));
    Ok(())
}
