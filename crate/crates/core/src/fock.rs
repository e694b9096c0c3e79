//! Number-conserving fermionic sectors.
//!
//! A basis state is an occupation bitmask, bit `j` for site `j`. The state
//! `|m⟩` is `a†_{j₁} a†_{j₂} … |0⟩` with `j₁ < j₂ < …`, so `a_l` picks up
//! `(−1)` per occupied mode below `l`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::chain::{Hamiltonian, SymmetryPermutation};
use crate::error::{Error, Result};
use crate::linalg::{householder_eigen, RealMatrix, SymmetricEigen};
use crate::packet::{WavePacket, NORM_TOLERANCE};

/// Largest number of modes a sector may be built on.
pub const MAX_MODES: usize = 14;

/// All occupation bitmasks with `particle_number` bits set, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n_modes: usize,
    particle_number: usize,
    states: Vec<u32>,
}

impl FockBasis {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn particle_number(&self) -> usize {
        self.particle_number
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.states.binary_search(&mask).ok()
    }
}

pub fn enumerate_sector(n_modes: usize, particle_number: usize) -> Result<FockBasis> {
    if n_modes > MAX_MODES {
        return Err(Error::Capacity(format!(
            "Fock sectors are limited to {MAX_MODES} modes, got {n_modes}"
        )));
    }
    if particle_number > n_modes {
        return Err(Error::Validation(format!(
            "{particle_number} particles do not fit on {n_modes} modes"
        )));
    }
    let states = (0u32..1 << n_modes)
        .filter(|m| m.count_ones() as usize == particle_number)
        .collect();
    Ok(FockBasis {
        n_modes,
        particle_number,
        states,
    })
}

/// `a†_j a_l |mask⟩ = sign |result⟩`, or `None` when it vanishes.
pub fn apply_hop(mask: u32, j: usize, l: usize) -> Option<(u32, f64)> {
    let (bj, bl) = (1u32 << j, 1u32 << l);
    if j == l {
        return (mask & bl != 0).then_some((mask, 1.0));
    }
    if mask & bl == 0 || mask & bj != 0 {
        return None;
    }
    let (lo, hi) = if j < l { (j, l) } else { (l, j) };
    let between = mask & (((1u32 << hi) - 1) & !((1u32 << (lo + 1)) - 1));
    let sign = if between.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((mask & !bl | bj, sign))
}

/// Normalised amplitudes over one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Validation(format!(
                "Fock state is not normalized (Σ|c|² = {norm})"
            )));
        }
        Ok(FockState { basis, amplitudes })
    }

    /// Single basis state `|mask⟩`.
    pub fn basis_state(basis: Arc<FockBasis>, mask: u32) -> Result<Self> {
        let idx = basis.index_of(mask).ok_or_else(|| {
            Error::Validation(format!("bitmask {mask:#b} is not in the sector"))
        })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(FockState {
            basis,
            amplitudes: amps,
        })
    }

    /// Superposition `Σ c_k |mask_k⟩`, rescaled to unit norm.
    pub fn from_masks(basis: Arc<FockBasis>, terms: &[(u32, Complex64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        for &(mask, c) in terms {
            let idx = basis.index_of(mask).ok_or_else(|| {
                Error::Validation(format!("bitmask {mask:#b} is not in the sector"))
            })?;
            amps[idx] += c;
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Validation("Fock superposition vanishes".into()));
        }
        amps.iter_mut().for_each(|c| *c /= norm);
        Self::new(basis, amps)
    }

    /// Embeds `Σ ψ_j a†_j |0⟩` into the one-particle sector.
    pub fn from_single_particle(psi: &WavePacket) -> Result<Self> {
        let basis = Arc::new(enumerate_sector(psi.len(), 1)?);
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (j, &c) in psi.amplitudes().iter().enumerate() {
            amps[basis.index_of(1 << j).expect("one-particle mask")] = c;
        }
        Self::new(basis, amps)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<FockBasis> {
        Arc::clone(&self.basis)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨ψ| a†_j a_l |ψ⟩`.
    pub fn correlator(&self, j: usize, l: usize) -> Result<Complex64> {
        let n = self.basis.n_modes;
        for site in [j, l] {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n_sites: n });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &mask) in self.basis.states.iter().enumerate() {
            if let Some((target, sign)) = apply_hop(mask, j, l) {
                let t = self.basis.index_of(target).expect("hop stays in sector");
                acc += self.amplitudes[t].conj() * self.amplitudes[k] * sign;
            }
        }
        Ok(acc)
    }
}

/// `⟨m'|H|m⟩` with `H = Σ_{i≠j} J_ij a†_i a_j` restricted to the sector.
pub fn sector_hamiltonian(h: &Hamiltonian, basis: &FockBasis) -> Result<RealMatrix> {
    if h.n_sites() != basis.n_modes {
        return Err(Error::DimensionMismatch {
            expected: basis.n_modes,
            found: h.n_sites(),
        });
    }
    let dim = basis.len();
    let bonds = h.bonds();
    let mut out = vec![0.0; dim * dim];
    for (col, &mask) in basis.states.iter().enumerate() {
        for &(i, j, w) in &bonds {
            for (to, from) in [(i, j), (j, i)] {
                if let Some((target, sign)) = apply_hop(mask, to, from) {
                    let row = basis.index_of(target).expect("hop stays in sector");
                    out[row * dim + col] += w * sign;
                }
            }
        }
    }
    RealMatrix::from_row_major(dim, dim, out)
}

/// Signed permutation of the sector induced by `a†_j → φ a†_{s(j)}`.
pub fn sector_symmetry(basis: &FockBasis, s: &SymmetryPermutation) -> Result<Vec<(usize, Complex64)>> {
    if s.n_sites() != basis.n_modes {
        return Err(Error::DimensionMismatch {
            expected: basis.n_modes,
            found: s.n_sites(),
        });
    }
    let phase = s.parity_phase().powu(basis.particle_number as u32);
    let img = s.image();
    Ok(basis
        .states
        .iter()
        .map(|&mask| {
            let mapped: Vec<usize> = (0..basis.n_modes)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| img[j])
                .collect();
            let mut inversions = 0;
            for a in 0..mapped.len() {
                for b in a + 1..mapped.len() {
                    if mapped[a] > mapped[b] {
                        inversions += 1;
                    }
                }
            }
            let target: u32 = mapped.iter().map(|&j| 1u32 << j).sum();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (basis.index_of(target).expect("permutation keeps particle number"), phase * sign)
        })
        .collect())
}

/// Applies the sector symmetry to a state.
pub fn apply_sector_symmetry(state: &FockState, s: &SymmetryPermutation) -> Result<FockState> {
    let map = sector_symmetry(&state.basis, s)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
    for (k, &(target, factor)) in map.iter().enumerate() {
        out[target] = factor * state.amplitudes[k];
    }
    Ok(FockState {
        basis: state.shared_basis(),
        amplitudes: out,
    })
}

/// Diagonalised sector Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    basis: Arc<FockBasis>,
    eigen: SymmetricEigen,
}

impl SectorPropagator {
    pub fn new(h: &Hamiltonian, basis: Arc<FockBasis>) -> Result<Self> {
        let hs = sector_hamiltonian(h, &basis)?;
        let eigen = householder_eigen(&hs)?;
        Ok(SectorPropagator { basis, eigen })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn evolve(&self, state: &FockState, t: f64) -> Result<FockState> {
        if *state.basis != *self.basis {
            return Err(Error::Validation("state lives in a different sector".into()));
        }
        let w = &self.eigen.vectors;
        let dim = self.basis.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..dim {
            let c = state.amplitudes[k];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (n, slot) in w.row(k).iter().zip(coeffs.iter_mut()) {
                *slot += c * n;
            }
        }
        for (slot, &e) in coeffs.iter_mut().zip(&self.eigen.values) {
            *slot *= Complex64::from_polar(1.0, -e * t);
        }
        let out: Vec<Complex64> = (0..dim)
            .map(|k| w.row(k).iter().zip(&coeffs).map(|(a, c)| c * a).sum())
            .collect();
        let state = FockState {
            basis: Arc::clone(&self.basis),
            amplitudes: out,
        };
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::Numerical {
                message: "sector evolution lost normalisation".into(),
                worst_residual: drift,
            });
        }
        Ok(state)
    }
}

/// One-shot sector evolution. Prefer [`SectorPropagator`] for many times.
pub fn evolve_fock(h: &Hamiltonian, state: &FockState, t: f64) -> Result<FockState> {
    SectorPropagator::new(h, state.shared_basis())?.evolve(state, t)
}
