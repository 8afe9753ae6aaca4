//! Persisting study results as CSV files plus a manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::lre::{run_lre_heatmap, LreHeatmap};
use super::measures::{run_measures, Measure};
use super::ExperimentConfig;
use crate::error::Result;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `cell_j,cell_k,lre_percent` rows for one heatmap.
pub fn write_lre_csv(heatmap: &LreHeatmap, path: &Path) -> Result<()> {
    let mut out = String::from("cell_j,cell_k,lre_percent\n");
    let values = heatmap.values();
    for j in 1..=heatmap.cells {
        for k in 1..=heatmap.cells {
            let v = values[(j - 1) * heatmap.cells + (k - 1)];
            out.push_str(&format!("{j},{k},{}\n", format_real(v)));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Runs the measures (and the LRE heatmap when `lre_cells` is set) and writes
/// `<model>_<measure>.csv`, `<model>_lre_n<n>.csv` and `manifest.txt` into `out_dir`.
/// Returns the written paths. Output is byte-identical for identical configurations.
pub fn run_study(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let report = run_measures(cfg)?;
    fs::create_dir_all(out_dir)?;
    let slug = cfg.model.slug();
    let mut written = Vec::new();
    for measure in Measure::ALL {
        let path = out_dir.join(format!("{slug}_{}.csv", measure.name()));
        let mut out = String::from("n,estimator,value,stderr\n");
        for &n in &cfg.n_values {
            for &spec in &cfg.estimators {
                let est = report.summary(n, spec, measure).expect("every pair was run");
                out.push_str(&format!(
                    "{n},{spec},{},{}\n",
                    format_real(est.mean),
                    format_real(est.stderr)
                ));
            }
        }
        fs::write(&path, out)?;
        written.push(path);
    }
    if cfg.lre_cells.is_some() {
        for heatmap in run_lre_heatmap(cfg)? {
            let path = out_dir.join(format!("{slug}_lre_n{}.csv", heatmap.n));
            write_lre_csv(&heatmap, &path)?;
            written.push(path);
        }
    }
    let manifest = out_dir.join("manifest.txt");
    let mut f = fs::File::create(&manifest)?;
    let n_list: Vec<String> = cfg.n_values.iter().map(ToString::to_string).collect();
    let est_list: Vec<String> = cfg.estimators.iter().map(ToString::to_string).collect();
    writeln!(f, "version = {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(f, "model = {}", cfg.model)?;
    writeln!(f, "estimators = {}", est_list.join(","))?;
    writeln!(f, "n = {}", n_list.join(","))?;
    writeln!(f, "replications = {}", cfg.replications)?;
    writeln!(f, "master_seed = {}", cfg.master_seed)?;
    writeln!(f, "eval_points = {}", cfg.eval_points)?;
    if let Some(c) = cfg.lre_cells {
        writeln!(f, "lre_cells = {c}")?;
        writeln!(f, "lre_pair = beta/empirical")?;
    }
    writeln!(
        f,
        "rng = ChaCha8, seed_from_u64(master_seed), stream 4*replicate + role"
    )?;
    writeln!(f, "roles = 0 points, 1 first sample, 2 second sample, 3 reserved")?;
    writeln!(f, "pairing = common random numbers across estimators and sample sizes")?;
    written.push(manifest);
    Ok(written)
}
