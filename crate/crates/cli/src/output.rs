use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ltsim::adaptive::SplitOptimum;
use ltsim::cost::CostReport;
use ltsim::run::{GaussianRow, Outcome};

/// Decimal with 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> io::Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path)?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> io::Result<PathBuf> {
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(path.to_path_buf())
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

pub fn write_cost(dir: &Path, report: &CostReport) -> io::Result<PathBuf> {
    let path = dir.join("cost.csv");
    let mut w = writer(&path)?;
    w.serialize(report)?;
    finish(w, &path)
}

pub fn write_result(dir: &Path, epsilon: f64, outcome: &Outcome) -> io::Result<PathBuf> {
    let path = dir.join("result.csv");
    let mut w = writer(&path)?;
    w.write_record([
        "epsilon",
        "error",
        "n_exp",
        "n_oracle_measured",
        "n_t_measured",
        "violations",
    ])?;
    w.write_record([
        float(epsilon),
        float(outcome.error),
        outcome.ledger.exponentials().to_string(),
        outcome.ledger.oracle_queries().to_string(),
        outcome.ledger.transform_calls().to_string(),
        outcome.violations.len().to_string(),
    ])?;
    finish(w, &path)
}

/// Wall time lives apart from the result so that file stays reproducible.
pub fn write_timing(dir: &Path, seconds: f64) -> io::Result<PathBuf> {
    let path = dir.join("timing.csv");
    let mut w = writer(&path)?;
    w.write_record(["wall_seconds"])?;
    w.write_record([float(seconds)])?;
    finish(w, &path)
}

pub fn write_sweep(dir: &Path, rows: &[GaussianRow]) -> io::Result<PathBuf> {
    let path = dir.join("gaussian_sweep.csv");
    let mut w = writer(&path)?;
    w.write_record(["a", "N_exp_adaptive", "N_exp_constant"])?;
    for r in rows {
        w.write_record([float(r.a), r.n_exp_adaptive.to_string(), r.n_exp_constant.to_string()])?;
    }
    finish(w, &path)
}

pub fn write_split(dir: &Path, optimum: &SplitOptimum) -> io::Result<PathBuf> {
    let path = dir.join("optimize_k.csv");
    let mut w = writer(&path)?;
    w.write_record(["kind", "t_prime", "n_exp"])?;
    let cost = |c: Option<u64>| c.map_or_else(String::new, |c| c.to_string());
    for &(t, c) in &optimum.curve {
        w.write_record(["grid".to_string(), float(t), cost(c)])?;
    }
    w.write_record(["optimum".to_string(), float(optimum.split), optimum.cost.to_string()])?;
    finish(w, &path)
}
