//! Two-mode reduced density matrices, pairwise concurrence and the mirror
//! mode concurrence of a state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::SymmetryPermutation;
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::packet::WavePacket;

/// Gap below which `mmc` and `|⟨ψ|S|ψ⟩|` count as equal.
pub const TIGHTNESS_TOLERANCE: f64 = 1e-10;

/// Occupation of a fixed-point mode above which the general sum warns.
const FIXED_POINT_OCCUPATION: f64 = 1e-12;

/// Two-mode block in the basis `|11⟩, |10⟩, |01⟩, |00⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeRdm {
    pub sites: (usize, usize),
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub z: Complex64,
}

impl TwoModeRdm {
    pub fn trace(&self) -> f64 {
        self.x_plus + self.x_minus + self.y_plus + self.y_minus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRecord {
    pub mmc: f64,
    pub overlap_bound: f64,
    pub pairwise: Vec<((usize, usize), f64)>,
}

/// Mirror-paired concurrence of a many-particle state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralConcurrence {
    pub total: f64,
    pub pairwise: Vec<((usize, usize), f64)>,
    pub warning: Option<String>,
}

fn check_sites(n: usize, j: usize, l: usize) -> Result<()> {
    for site in [j, l] {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n_sites: n });
        }
    }
    Ok(())
}

fn check_len(psi: &WavePacket, s: &SymmetryPermutation) -> Result<()> {
    if psi.len() != s.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: s.n_sites(),
            found: psi.len(),
        });
    }
    Ok(())
}

/// `⟨a†_j a_l⟩ = conj(ψ_j) ψ_l` for one particle.
pub fn z_correlator(psi: &WavePacket, j: usize, l: usize) -> Result<Complex64> {
    check_sites(psi.len(), j, l)?;
    let a = psi.amplitudes();
    Ok(a[j].conj() * a[l])
}

pub fn two_mode_rdm(state: &FockState, j: usize, l: usize) -> Result<TwoModeRdm> {
    check_sites(state.basis().n_modes(), j, l)?;
    if j == l {
        return Err(Error::Validation("a two-mode block needs two distinct modes".into()));
    }
    let (bj, bl) = (1u32 << j, 1u32 << l);
    let mut occ = [0.0; 4];
    for (&mask, c) in state.basis().states().iter().zip(state.amplitudes()) {
        let slot = match (mask & bj != 0, mask & bl != 0) {
            (true, true) => 0,
            (false, false) => 1,
            (true, false) => 2,
            (false, true) => 3,
        };
        occ[slot] += c.norm_sqr();
    }
    Ok(TwoModeRdm {
        sites: (j, l),
        x_plus: occ[0],
        x_minus: occ[1],
        y_plus: occ[2],
        y_minus: occ[3],
        z: state.correlator(j, l)?,
    })
}

/// Closed form of [`two_mode_rdm`] for a single particle.
pub fn single_particle_rdm(psi: &WavePacket, j: usize, l: usize) -> Result<TwoModeRdm> {
    check_sites(psi.len(), j, l)?;
    if j == l {
        return Err(Error::Validation("a two-mode block needs two distinct modes".into()));
    }
    let a = psi.amplitudes();
    let (pj, pl) = (a[j].norm_sqr(), a[l].norm_sqr());
    Ok(TwoModeRdm {
        sites: (j, l),
        x_plus: 0.0,
        x_minus: (1.0 - pj - pl).max(0.0),
        y_plus: pj,
        y_minus: pl,
        z: a[j].conj() * a[l],
    })
}

/// `C = 2 max(0, |Z| − √(X⁺X⁻))`.
pub fn pairwise_concurrence(rdm: &TwoModeRdm) -> f64 {
    2.0 * (rdm.z.norm() - (rdm.x_plus * rdm.x_minus).max(0.0).sqrt()).max(0.0)
}

/// `|⟨ψ|S|ψ⟩|`.
pub fn mirror_overlap(psi: &WavePacket, s: &SymmetryPermutation) -> Result<f64> {
    check_len(psi, s)?;
    Ok(psi.inner(&s.apply(psi.amplitudes())).norm())
}

/// `Σ_j |ψ_j||ψ_{s(j)}|`, fixed points included, with the paired `C_{j,s(j)}`.
pub fn mirror_mode_concurrence(psi: &WavePacket, s: &SymmetryPermutation) -> Result<EntanglementRecord> {
    check_len(psi, s)?;
    let a = psi.amplitudes();
    let img = s.image();
    let mmc = (0..a.len()).map(|j| a[j].norm() * a[img[j]].norm()).sum();
    let pairwise = s
        .pairs()
        .map(|(j, k)| ((j, k), 2.0 * (a[j].conj() * a[k]).norm()))
        .collect();
    Ok(EntanglementRecord {
        mmc,
        overlap_bound: mirror_overlap(psi, s)?,
        pairwise,
    })
}

/// `(|⟨ψ|S|ψ⟩|, mmc − bound ≤ 1e−10)`.
pub fn overlap_bound_check(psi: &WavePacket, s: &SymmetryPermutation) -> Result<(f64, bool)> {
    let rec = mirror_mode_concurrence(psi, s)?;
    Ok((rec.overlap_bound, rec.mmc - rec.overlap_bound <= TIGHTNESS_TOLERANCE))
}

/// The support and its mirror image do not meet.
pub fn is_mirror_disjoint(psi: &WavePacket, s: &SymmetryPermutation, tol: f64) -> Result<bool> {
    check_len(psi, s)?;
    let a = psi.amplitudes();
    let img = s.image();
    Ok((0..a.len()).all(|j| a[j].norm() <= tol || a[img[j]].norm() <= tol))
}

/// Every `ψ_j ψ_{s(j)}` is real and the nonzero ones share a sign.
pub fn has_uniform_mirror_sign(psi: &WavePacket, s: &SymmetryPermutation, tol: f64) -> Result<bool> {
    check_len(psi, s)?;
    let a = psi.amplitudes();
    let img = s.image();
    let mut sign = 0.0;
    for j in 0..a.len() {
        let p = a[j] * a[img[j]];
        if p.im.abs() > tol {
            return Ok(false);
        }
        if p.re.abs() > tol {
            if sign == 0.0 {
                sign = p.re.signum();
            } else if p.re.signum() != sign {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Σ_pairs 2|⟨a†_n a_m⟩|` on a Fock state. Fixed points of `s` are left out
/// and flagged when occupied.
pub fn total_concurrence_general(state: &FockState, s: &SymmetryPermutation) -> Result<GeneralConcurrence> {
    let n = state.basis().n_modes();
    if s.n_sites() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.n_sites(),
        });
    }
    let mut pairwise = Vec::new();
    for (j, k) in s.pairs() {
        pairwise.push(((j, k), 2.0 * state.correlator(j, k)?.norm()));
    }
    let occupied: Vec<usize> = s
        .fixed_points()
        .filter(|&f| state.correlator(f, f).map(|c| c.re > FIXED_POINT_OCCUPATION).unwrap_or(false))
        .collect();
    let warning = (!occupied.is_empty()).then(|| {
        format!("fixed-point modes {occupied:?} are occupied and excluded from the paired sum")
    });
    Ok(GeneralConcurrence {
        total: pairwise.iter().map(|(_, c)| c).sum(),
        pairwise,
        warning,
    })
}
