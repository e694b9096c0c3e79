//! Scenario files, time scans and their CSV/JSON outputs.

pub mod config;
pub mod output;
pub mod scan;

pub use config::{InitialState, ScanSettings, ScenarioConfig, Tolerances};
pub use output::{csv_string, emit_csv, emit_report, report_json, ScenarioReport, SpectralCondition, CSV_HEADER};
pub use scan::{scan_grid, verify_relations, RelationsReport, TimeSample, TimeSeries};

use crate::chain::{build_couplings, build_hamiltonian, reflection_permutation};
use crate::error::Result;
use crate::spectral::diagonalize;
use crate::spectrum::{detect_commensurability, parity_pattern_check, pst_spectral_condition, SpectrumModel};
use crate::transfer::{certify_pst, scan_transfer_time};

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub series: TimeSeries,
    pub report: ScenarioReport,
}

/// Runs the time scan of a scenario and every check that applies to it.
pub fn run_scenario(cfg: &ScenarioConfig, threads: usize) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let h = build_hamiltonian(&build_couplings(&cfg.chain)?);
    let decomp = diagonalize(&h)?;
    let s = reflection_permutation(cfg.chain.n_sites())?;
    let psi0 = cfg.initial_packet()?;
    let grid = cfg.grid()?;
    let series = scan_grid(&decomp, &psi0, &s, &grid, threads)?;

    let spectral = pst_spectral_condition(&decomp, &s, cfg.tol.spectrum)?;
    let tau = cfg.tau().or(spectral.tau);
    let cert_time = match tau {
        Some(t) => t,
        None => {
            let t_max = *grid.last().expect("grid has points");
            scan_transfer_time(&decomp, &psi0, &s, t_max, grid.len() - 1)?.0
        }
    };
    let certificate = certify_pst(&decomp, &s, cert_time, cfg.tol.certify)?;
    let relations = match tau {
        Some(t) => match verify_relations(&series, t, cfg.tol.relations) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("symmetry relations skipped: {e}");
                None
            }
        },
        None => None,
    };
    let parity_check = match SpectrumModel::for_chain(&cfg.chain) {
        Ok(model) => Some(parity_pattern_check(&decomp, &model, cfg.tol.spectrum)?),
        Err(_) => None,
    };
    let report = ScenarioReport {
        certified: certificate.certified,
        scenario: Some(cfg.clone()),
        tau,
        certificate: Some(certificate),
        commensurability: Some(detect_commensurability(decomp.eigenvalues(), cfg.tol.spectrum)?),
        spectral_condition: Some(SpectralCondition {
            holds: spectral.holds,
            tau: spectral.tau,
        }),
        parity_check,
        relations,
    };
    Ok(ScenarioOutcome { series, report })
}
