//! Best, median and worst empirical attainment surfaces of one method.

use std::fs::File;
use std::path::{Path, PathBuf};

use mubqp_core::attainment_surface;

use crate::error::{BenchError, IoContext, Result};
use crate::experiment::RunReport;

/// Attainment levels `1`, `ceil(r / 2)` and `r` for `r` runs, with their
/// file-name suffixes.
pub fn eaf_levels(runs: usize) -> [(&'static str, usize); 3] {
    [("best", 1), ("median", runs.div_ceil(2)), ("worst", runs)]
}

/// Writes `<prefix>_best.csv`, `<prefix>_median.csv` and `<prefix>_worst.csv`
/// into `dir` and returns their paths. Failed runs are left out.
pub fn export_eaf(reports: &[RunReport], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let fronts: Vec<Vec<Vec<f64>>> = reports
        .iter()
        .filter(|r| r.record.succeeded())
        .map(|r| r.record.front.iter().map(|p| p.costs.clone()).collect())
        .collect();
    if fronts.is_empty() {
        return Err(BenchError::NoReports);
    }
    if let Some(p) = fronts.iter().flatten().find(|p| p.len() != 2) {
        return Err(BenchError::Config(format!(
            "attainment surfaces need 2 objectives, reports have {}",
            p.len()
        )));
    }
    std::fs::create_dir_all(dir).at(dir)?;
    let mut paths = Vec::with_capacity(3);
    for (suffix, level) in eaf_levels(fronts.len()) {
        let surface = attainment_surface(&fronts, level)?;
        let path = dir.join(format!("{prefix}_{suffix}.csv"));
        let mut w = csv::Writer::from_writer(File::create(&path).at(&path)?);
        let csv_err = |e: csv::Error| BenchError::Io {
            path: path.clone(),
            source: e.into(),
        };
        w.write_record(["c1", "c2"]).map_err(csv_err)?;
        for [x, y] in surface {
            w.write_record([x.to_string(), y.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().at(&path)?;
        paths.push(path);
    }
    Ok(paths)
}
