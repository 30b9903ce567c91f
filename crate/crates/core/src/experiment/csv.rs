use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::metrics::{default_cdf_grid, empirical_cdf};
use super::runner::SweepTable;
use crate::communication::SampleKind;
use crate::error::{Error, Result};

pub const PAIRING_FILE: &str = "pairing.csv";
pub const THROUGHPUT_CDF_FILE: &str = "throughput_cdf.csv";
pub const ENERGY_FILE: &str = "energy.csv";
pub const EE_FILE: &str = "ee.csv";
pub const MEANS_FILE: &str = "means.csv";

/// `kind` label of the no-D2D reference rates in the CDF file.
pub const BASELINE_KIND: &str = "baseline";

pub fn pairing_csv(table: &SweepTable) -> String {
    let mut s = String::from("axis_value,paired_fraction\n");
    for r in &table.rows {
        let _ = writeln!(s, "{},{}", r.axis_value, r.metrics.paired_fraction.mean);
    }
    s
}

/// CDF of the rates pooled over all drops, one block per kind present.
pub fn throughput_cdf_csv(table: &SweepTable) -> Result<String> {
    let grid = default_cdf_grid();
    let mut s = String::from("axis_value,kind,rate_bps,cdf\n");
    for r in &table.rows {
        let mut blocks: Vec<(&str, &[f64])> = SampleKind::ALL
            .iter()
            .map(|k| (k.as_str(), r.metrics.rates(*k)))
            .collect();
        blocks.push((BASELINE_KIND, &r.metrics.baseline_samples));
        for (kind, rates) in blocks {
            if rates.is_empty() {
                continue;
            }
            for (x, f) in grid.iter().zip(empirical_cdf(rates, &grid)?) {
                let _ = writeln!(s, "{},{},{},{}", r.axis_value, kind, x, f);
            }
        }
    }
    Ok(s)
}

pub fn energy_csv(table: &SweepTable) -> String {
    let mut s = String::from("axis_value,e1_j,e2_j,total_j,baseline_j\n");
    for r in &table.rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.axis_value, m.e1.mean, m.e2.mean, m.total_energy.mean, m.baseline_energy.mean
        );
    }
    s
}

pub fn ee_csv(table: &SweepTable) -> String {
    let mut s = String::from("axis_value,ee_bps_per_j_per_hz,baseline_ee\n");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{}",
            r.axis_value, r.metrics.ee.mean, r.metrics.baseline_ee.mean
        );
    }
    s
}

/// Drop-averaged mean rates; `NaN` where a kind never occurred.
pub fn means_csv(table: &SweepTable) -> String {
    let mut s = String::from("axis_value,mean_d2d_bps,mean_regular_bps,mean_global_bps\n");
    for r in &table.rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.axis_value, m.mean_d2d_rate.mean, m.mean_regular_rate.mean, m.mean_global_rate.mean
        );
    }
    s
}

/// Writes all tables into `out_dir`, creating it if needed, and returns
/// the written paths.
pub fn emit_csv(table: &SweepTable, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = [
        (PAIRING_FILE, pairing_csv(table)),
        (THROUGHPUT_CDF_FILE, throughput_cdf_csv(table)?),
        (ENERGY_FILE, energy_csv(table)),
        (EE_FILE, ee_csv(table)),
        (MEANS_FILE, means_csv(table)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
