use serde::{Deserialize, Serialize};

use crate::chain::SymmetryPermutation;
use crate::entanglement::mirror_mode_concurrence;
use crate::error::{Error, Result};
use crate::packet::WavePacket;
use crate::spectral::{evolve, SpectralDecomposition};
use crate::transfer::fidelity_of;

/// Slack for the row-wise `overlap_bound ≤ mmc ≤ 1` and `F ≤ 1` checks.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub t: f64,
    pub fidelity: f64,
    pub mmc: f64,
    pub overlap_bound: f64,
}

/// Samples on a uniform, strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    rows: Vec<TimeSample>,
}

impl TimeSeries {
    pub fn new(rows: Vec<TimeSample>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Validation("time series must be strictly increasing in t".into()));
        }
        Ok(TimeSeries { rows })
    }

    pub fn rows(&self) -> &[TimeSample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_mmc(&self) -> Option<TimeSample> {
        self.rows.iter().copied().max_by(|a, b| a.mmc.total_cmp(&b.mmc))
    }
}

fn sample(decomp: &SpectralDecomposition, psi0: &WavePacket, s: &SymmetryPermutation, t: f64) -> Result<TimeSample> {
    let psi = evolve(decomp, psi0, t)?;
    let rec = mirror_mode_concurrence(&psi, s)?;
    Ok(TimeSample {
        t,
        fidelity: fidelity_of(psi0, &psi, s)?,
        mmc: rec.mmc,
        overlap_bound: rec.overlap_bound,
    })
}

/// Evaluates every grid point, split over `threads` workers. The result does
/// not depend on the thread count.
pub fn scan_grid(
    decomp: &SpectralDecomposition,
    psi0: &WavePacket,
    s: &SymmetryPermutation,
    grid: &[f64],
    threads: usize,
) -> Result<TimeSeries> {
    let threads = threads.max(1).min(grid.len().max(1));
    let rows = if threads == 1 {
        grid.iter().map(|&t| sample(decomp, psi0, s, t)).collect::<Result<Vec<_>>>()?
    } else {
        let chunk = grid.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = grid
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || part.iter().map(|&t| sample(decomp, psi0, s, t)).collect::<Result<Vec<_>>>())
                })
                .collect();
            let mut rows = Vec::with_capacity(grid.len());
            for h in handles {
                rows.extend(h.join().expect("scan worker panicked")?);
            }
            Ok::<_, Error>(rows)
        })?
    };
    TimeSeries::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationsReport {
    pub tau: f64,
    pub tolerance: f64,
    /// `max_t |C(τ/2 − t) − C(τ/2 + t)|`.
    pub half_tau_symmetry: f64,
    /// `max_t |C(τ − t) − C(τ + t)|`.
    pub tau_symmetry: f64,
    pub bound_violations: usize,
    pub fidelity_at_tau: f64,
    pub mmc_at_zero: f64,
    pub mmc_at_half_tau: f64,
    pub mmc_at_tau: f64,
    pub max_mmc: f64,
    pub t_at_max_mmc: f64,
    /// Both symmetry deviations within tolerance and no bound violations.
    pub symmetric: bool,
    /// `F(τ) = 1` and `C(τ/2) = 1` within tolerance.
    pub complementarity: bool,
}

fn grid_index(series: &TimeSeries, t: f64, dt: f64) -> Option<usize> {
    let rows = series.rows();
    let guess = ((t - rows[0].t) / dt).round();
    if guess < 0.0 {
        return None;
    }
    let idx = guess as usize;
    (idx < rows.len() && (rows[idx].t - t).abs() <= 1e-6 * dt).then_some(idx)
}

/// Checks the mirror-symmetry relations of the concurrence about `τ/2` and
/// `τ`, the row-wise bounds, and the complementarity checkpoints.
pub fn verify_relations(series: &TimeSeries, tau: f64, tol: f64) -> Result<RelationsReport> {
    let rows = series.rows();
    if rows.len() < 3 {
        return Err(Error::Validation("need at least three samples".into()));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Validation(format!("τ must be positive, got {tau}")));
    }
    let dt = (rows[rows.len() - 1].t - rows[0].t) / (rows.len() - 1) as f64;
    let off_grid = |what: &str| {
        Error::Validation(format!(
            "{what} is not a grid point; use a grid from 0 to 2τ with a step count divisible by 4 (reproduction mode)"
        ))
    };
    let zero = grid_index(series, 0.0, dt).ok_or_else(|| off_grid("t = 0"))?;
    let half = grid_index(series, 0.5 * tau, dt).ok_or_else(|| off_grid("τ/2"))?;
    let full = grid_index(series, tau, dt).ok_or_else(|| off_grid("τ"))?;
    grid_index(series, 2.0 * tau, dt).ok_or_else(|| off_grid("2τ"))?;

    let mirror_dev = |centre: usize| {
        let reach = centre.min(rows.len() - 1 - centre);
        (1..=reach)
            .map(|d| (rows[centre - d].mmc - rows[centre + d].mmc).abs())
            .fold(0.0, f64::max)
    };
    let half_tau_symmetry = mirror_dev(half);
    let tau_symmetry = mirror_dev(full);
    let bound_violations = rows
        .iter()
        .filter(|r| {
            r.overlap_bound > r.mmc + BOUND_SLACK
                || r.mmc > 1.0 + BOUND_SLACK
                || r.fidelity > 1.0 + BOUND_SLACK
                || r.fidelity < 0.0
        })
        .count();
    let peak = series.max_mmc().expect("non-empty");
    let fidelity_at_tau = rows[full].fidelity;
    let mmc_at_half_tau = rows[half].mmc;
    Ok(RelationsReport {
        tau,
        tolerance: tol,
        half_tau_symmetry,
        tau_symmetry,
        bound_violations,
        fidelity_at_tau,
        mmc_at_zero: rows[zero].mmc,
        mmc_at_half_tau,
        mmc_at_tau: rows[full].mmc,
        max_mmc: peak.mmc,
        t_at_max_mmc: peak.t,
        symmetric: half_tau_symmetry <= tol && tau_symmetry <= tol && bound_violations == 0,
        complementarity: (fidelity_at_tau - 1.0).abs() <= tol && (mmc_at_half_tau - 1.0).abs() <= tol,
    })
}
