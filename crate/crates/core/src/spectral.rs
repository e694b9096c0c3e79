//! Spectral decomposition of the single-particle Hamiltonian and the
//! propagator `U(t) = Σ_n e^{−iε_n t} |φ_n⟩⟨φ_n|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{commutator_defect, reflection_permutation, Hamiltonian, SymmetryPermutation};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, RealMatrix, SIGN_THRESHOLD};
use crate::packet::{WavePacket, NORM_TOLERANCE};

/// Entrywise eigen-residual bound, relative to `max(1, max|ε|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Eigenvalue gaps below this fraction of `max|ε|` count as degenerate when
/// assigning parities.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Default tolerance on `|S v ∓ v|` for parity labels.
pub const PARITY_TOLERANCE: f64 = 1e-8;

/// Eigenvalue of an eigenvector under an involutive site permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Undefined,
}

impl Parity {
    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
            Parity::Undefined => None,
        }
    }
}

/// `H = W diag(ε) Wᵀ` with real orthogonal `W`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: RealMatrix,
    parities: Vec<Parity>,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from precomputed parts. `eigenvectors` holds
    /// one eigenvector per column.
    pub fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: RealMatrix,
        parities: Vec<Parity>,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.rows() != n || eigenvectors.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eigenvectors.cols(),
            });
        }
        if parities.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: parities.len(),
            });
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("eigenvalues must be ascending".into()));
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
            parities,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `W`, column `n` is `|φ_n⟩`.
    pub fn eigenvectors(&self) -> &RealMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        (0..self.n_sites()).map(|j| self.eigenvectors[(j, n)]).collect()
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    /// Re-mixes degenerate eigenspaces into eigenvectors of `s` and stores
    /// the resulting parity labels.
    pub fn with_symmetry(mut self, s: &SymmetryPermutation, tol: f64) -> Result<Self> {
        if s.n_sites() != self.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites(),
                found: s.n_sites(),
            });
        }
        self.parities = adapt_to_symmetry(&self.eigenvalues, &mut self.eigenvectors, s, tol);
        Ok(self)
    }

    /// Expansion coefficients `Wᵀ ψ`.
    fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_sites();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (j, &a) in psi.iter().enumerate() {
            for (ck, &w) in c.iter_mut().zip(self.eigenvectors.row(j)) {
                *ck += a * w;
            }
        }
        c
    }
}

/// Unitary `U(t)` on the single-particle space.
#[derive(Debug, Clone)]
pub struct PropagatorMatrix {
    pub entries: ComplexMatrix,
    pub time: f64,
}

impl PropagatorMatrix {
    /// Largest entry of `|U†U − 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.entries.rows();
        self.entries
            .adjoint()
            .matmul(&self.entries)
            .expect("square")
            .max_abs_diff(&ComplexMatrix::identity(n))
    }
}

/// Eigendecomposition of a real symmetric Hamiltonian.
///
/// Chains use implicit-shift QL on the tridiagonal matrix; dense hopping
/// matrices use cyclic Jacobi sweeps. When the Hamiltonian is mirror
/// symmetric, the parities under the reflection are attached.
pub fn diagonalize(h: &Hamiltonian) -> Result<SpectralDecomposition> {
    let n = h.n_sites();
    let eig = match h {
        Hamiltonian::Tridiagonal(c) => linalg::tridiagonal_eigen(&vec![0.0; n], c.values())?,
        Hamiltonian::DenseHopping(m) => linalg::jacobi_eigen(m)?,
    };
    let worst = eigen_residual(h, &eig.values, &eig.vectors);
    let scale = eig.values.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    if worst > RESIDUAL_TOLERANCE * scale {
        return Err(Error::Numerical {
            message: "eigen-residual above tolerance".into(),
            worst_residual: worst,
        });
    }
    let decomp = SpectralDecomposition {
        parities: vec![Parity::Undefined; n],
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    };
    let reflection = reflection_permutation(n)?;
    let hscale = h.to_dense().max_abs().max(1.0);
    if commutator_defect(h, &reflection)? <= 1e-12 * hscale {
        decomp.with_symmetry(&reflection, PARITY_TOLERANCE)
    } else {
        Ok(decomp)
    }
}

/// Largest entry of `|H W − W diag(ε)|`.
pub fn eigen_residual(h: &Hamiltonian, values: &[f64], vectors: &RealMatrix) -> f64 {
    let n = h.n_sites();
    let mut worst: f64 = 0.0;
    match h {
        Hamiltonian::Tridiagonal(c) => {
            let j = c.values();
            for k in 0..n {
                for i in 0..n {
                    let mut hv = 0.0;
                    if i > 0 {
                        hv += j[i - 1] * vectors[(i - 1, k)];
                    }
                    if i + 1 < n {
                        hv += j[i] * vectors[(i + 1, k)];
                    }
                    worst = worst.max((hv - values[k] * vectors[(i, k)]).abs());
                }
            }
        }
        Hamiltonian::DenseHopping(m) => {
            let hw = m.matmul(vectors).expect("square");
            for i in 0..n {
                for k in 0..n {
                    worst = worst.max((hw[(i, k)] - values[k] * vectors[(i, k)]).abs());
                }
            }
        }
    }
    worst
}

/// `U(t) = W diag(e^{−iε_n t}) Wᵀ`.
pub fn propagator(decomp: &SpectralDecomposition, t: f64) -> PropagatorMatrix {
    let n = decomp.n_sites();
    let w = &decomp.eigenvectors;
    let phases: Vec<Complex64> = decomp
        .eigenvalues
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let mut u = ComplexMatrix::zeros(n, n);
    let mut weighted = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for ((x, &wi), &p) in weighted.iter_mut().zip(w.row(i)).zip(&phases) {
            *x = p * wi;
        }
        for j in i..n {
            let v: Complex64 = weighted.iter().zip(w.row(j)).map(|(a, &b)| a * b).sum();
            u[(i, j)] = v;
            u[(j, i)] = v;
        }
    }
    PropagatorMatrix {
        entries: u,
        time: t,
    }
}

/// `|ψ(t)⟩ = U(t)|ψ(0)⟩`, evaluated through the eigenbasis.
pub fn evolve(decomp: &SpectralDecomposition, psi0: &WavePacket, t: f64) -> Result<WavePacket> {
    let n = decomp.n_sites();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi0.len(),
        });
    }
    if (psi0.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Validation("initial packet is not normalized".into()));
    }
    let mut c = decomp.coefficients(psi0.amplitudes());
    for (ck, &e) in c.iter_mut().zip(&decomp.eigenvalues) {
        *ck *= Complex64::from_polar(1.0, -e * t);
    }
    let out = (0..n)
        .map(|j| {
            decomp
                .eigenvectors
                .row(j)
                .iter()
                .zip(&c)
                .map(|(&w, &ck)| ck * w)
                .sum()
        })
        .collect();
    Ok(WavePacket::from_unchecked(out))
}

/// Parities of the eigenvectors under `s`, after re-mixing degenerate
/// eigenspaces. Labels refer to the bare permutation; `s.parity_phase()` is
/// a global factor and does not enter.
pub fn parity_labels(decomp: &SpectralDecomposition, s: &SymmetryPermutation, tol: f64) -> Vec<Parity> {
    if s.n_sites() != decomp.n_sites() {
        return vec![Parity::Undefined; decomp.n_sites()];
    }
    let mut vectors = decomp.eigenvectors.clone();
    adapt_to_symmetry(&decomp.eigenvalues, &mut vectors, s, tol)
}

fn adapt_to_symmetry(
    values: &[f64],
    vectors: &mut RealMatrix,
    s: &SymmetryPermutation,
    tol: f64,
) -> Vec<Parity> {
    let n = values.len();
    let gap = DEGENERACY_GAP * values.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            remix_cluster(vectors, start..end, s);
        }
        start = end;
    }
    let img = s.image();
    (0..n)
        .map(|k| {
            let v: Vec<f64> = (0..n).map(|j| vectors[(j, k)]).collect();
            let (mut plus, mut minus) = (0.0, 0.0);
            for (j, &x) in v.iter().enumerate() {
                let sx = v[img[j]];
                plus += (sx - x) * (sx - x);
                minus += (sx + x) * (sx + x);
            }
            if plus.sqrt() <= tol {
                Parity::Even
            } else if minus.sqrt() <= tol {
                Parity::Odd
            } else {
                Parity::Undefined
            }
        })
        .collect()
}

/// Replaces the columns in `cols` by an orthonormal basis of the same span
/// made of `±1` eigenvectors of `s`. Leaves them unchanged when the span is
/// not invariant under `s`.
fn remix_cluster(vectors: &mut RealMatrix, cols: std::ops::Range<usize>, s: &SymmetryPermutation) {
    let n = vectors.rows();
    let img = s.image();
    let originals: Vec<Vec<f64>> = cols.clone().map(|k| (0..n).map(|j| vectors[(j, k)]).collect()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for sign in [1.0, -1.0] {
        let mut sector: Vec<Vec<f64>> = Vec::new();
        for v in &originals {
            let mut p: Vec<f64> = (0..n).map(|j| 0.5 * (v[j] + sign * v[img[j]])).collect();
            for q in &sector {
                let d: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in p.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                p.iter_mut().for_each(|x| *x /= norm);
                sector.push(p);
            }
        }
        basis.extend(sector);
    }
    if basis.len() != originals.len() {
        return;
    }
    for (k, mut v) in cols.zip(basis) {
        if v.iter().find(|x| x.abs() > SIGN_THRESHOLD).is_some_and(|x| *x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for (j, x) in v.into_iter().enumerate() {
            vectors[(j, k)] = x;
        }
    }
}
