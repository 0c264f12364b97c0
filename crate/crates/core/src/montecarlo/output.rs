//! CSV persistence of experiment results.
//!
//! Schemas (recorded in each run manifest):
//! - `txopsim.deployments/1`: one row per retained deployment with columns
//!   `index,seed,num_aps,num_stas,ncmap_mbps,ctdma_mbps,ctdma_sr_mbps,
//!   gain_ctdma_pct,gain_ctdma_sr_pct,txop_ctdma_us,txop_ctdma_sr_us,
//!   ctdma_sr_slots`. Modes that were not run leave their cells empty.
//! - `txopsim.percentiles/1`: `percentile` (0..=100) followed by one column per
//!   metric; values interpolated as described on [`EmpiricalCdf`].
//! - `txopsim.discards/1`: `index,seed,reason`.

use std::fs::File;
use std::path::Path;

use super::{EmpiricalCdf, ExperimentResults};
use crate::error::{Error, Result};

pub const DEPLOYMENTS_SCHEMA: &str = "txopsim.deployments/1";
pub const PERCENTILES_SCHEMA: &str = "txopsim.percentiles/1";
pub const DISCARDS_SCHEMA: &str = "txopsim.discards/1";

fn create(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_deployments_csv(results: &ExperimentResults, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for r in &results.records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_discards_csv(results: &ExperimentResults, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["index", "seed", "reason"])?;
    for d in &results.discarded {
        w.serialize(d)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Percentile table with one column per named distribution.
pub fn write_percentile_columns(columns: &[(&str, &EmpiricalCdf)], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let mut header = vec!["percentile".to_owned()];
    header.extend(columns.iter().map(|(name, _)| (*name).to_owned()));
    w.write_record(&header)?;
    for p in 0..=100u32 {
        let mut row = vec![p.to_string()];
        row.extend(
            columns
                .iter()
                .map(|(_, c)| c.percentile(f64::from(p)).to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Percentile table of every metric the experiment computed.
pub fn write_percentiles_csv(results: &ExperimentResults, path: &Path) -> Result<()> {
    let cdfs: Vec<(&str, EmpiricalCdf)> = results
        .available_metrics()
        .into_iter()
        .filter_map(|m| results.cdf(m).map(|c| (m.column(), c)))
        .collect();
    let columns: Vec<(&str, &EmpiricalCdf)> = cdfs.iter().map(|(n, c)| (*n, c)).collect();
    write_percentile_columns(&columns, path)
}
