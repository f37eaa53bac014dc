//! Experiment execution: single runs and parameter scans.
//!
//! Scan points are independent pure computations fanned out to worker
//! threads; each point is reduced in a fixed order internally and rows are
//! ordered by scan index afterwards, so results do not depend on the worker
//! count.

use crate::config::{ConfigError, RunConfig, ScanConfig};
use crate::csv::ScanRow;
use qplate_core::observables::{am_budget, closed_prediction, AmBudget, DeltaPrediction};
use qplate_core::qplate::propagate_with;
use qplate_core::{spin_degree, VectorField};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] qplate_core::Error),
    #[error("scan point {parameter} = {value}: {source}")]
    ScanPoint {
        parameter: &'static str,
        value: f64,
        #[source]
        source: Box<RunError>,
    },
}

/// Everything a single propagation produces.
pub struct SingleOutcome {
    pub field_in: VectorField,
    pub field_out: VectorField,
    pub budget: AmBudget,
    pub closed: DeltaPrediction,
    pub sigma: f64,
    pub warnings: Vec<String>,
}

/// Validate the configuration and run one propagation.
pub fn run_single(cfg: &RunConfig) -> Result<SingleOutcome, RunError> {
    cfg.validate()?;
    let field_in = cfg.input_field()?;
    let medium = cfg.medium()?;
    let plate = cfg.plate();
    let field_out = propagate_with(
        &field_in,
        &plate,
        &medium,
        cfg.kernel_mode(),
        &cfg.propagation_options(),
    )?;
    let budget = am_budget(&field_in, &field_out)?;
    let sigma = spin_degree(cfg.beam_spec()?.pol);
    let closed = closed_prediction(sigma, &plate, &medium);
    Ok(SingleOutcome {
        field_in,
        field_out,
        budget,
        closed,
        sigma,
        warnings: cfg.warnings(),
    })
}

fn row_from_outcome(value: f64, outcome: &SingleOutcome) -> ScanRow {
    let b = &outcome.budget;
    ScanRow {
        value,
        w_lz_in: b.input.w_lz,
        w_sz_in: b.input.w_sz,
        w_lz_out: b.output.w_lz,
        w_sz_out: b.output.w_sz,
        delta_w_lz: b.delta_w_lz,
        delta_w_sz: b.delta_w_sz,
        delta_w_jz: b.delta_w_jz,
        closed_d_w_lz: outcome.closed.d_w_lz,
        closed_d_w_sz: outcome.closed.d_w_sz,
        energy_ratio: b.output.energy / b.input.energy,
    }
}

/// Run the configured scan; one row per point, ordered by scan index.
/// A failing point aborts the scan with the point identified.
pub fn run_scan(cfg: &RunConfig) -> Result<Vec<ScanRow>, RunError> {
    let scan: ScanConfig = cfg.scan.clone().unwrap_or_default();
    if scan.steps < 2 {
        return Err(ConfigError::Validation {
            failures: vec![format!("scan-steps: {} < 2", scan.steps)],
        }
        .into());
    }
    let values = scan.values();
    let mut rows: Vec<(usize, ScanRow)> = values
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| {
            let point = cfg.with_scan_value(scan.parameter, value);
            let outcome = run_single(&point).map_err(|e| RunError::ScanPoint {
                parameter: scan.parameter.name(),
                value,
                source: Box::new(e),
            })?;
            Ok((idx, row_from_outcome(value, &outcome)))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    rows.sort_by_key(|(idx, _)| *idx);
    Ok(rows.into_iter().map(|(_, row)| row).collect())
}
