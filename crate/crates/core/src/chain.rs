//! Chain specifications, engineered couplings, Hamiltonians and involutive
//! site symmetries.
//!
//! Sites are indexed from zero in this API. Configuration files and reports
//! use one-based site labels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Coupling profile of a mirror-symmetric chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingFamily {
    /// `J_j = J₀ √(j (N − j))`.
    Christandl,
    /// Odd bonds shifted by `θ_j k` with `θ_j = 1 − (−1)^j`.
    KFamily { k: u32 },
    /// Odd bonds shifted by `2 l / (2m + 1)`.
    MlFamily { m: u32, l: u32 },
    /// Caller-supplied couplings `J_1 .. J_{N−1}`.
    Custom { values: Vec<f64> },
}

impl CouplingFamily {
    /// Additive shift `ξ_j` for the one-based bond index `j`.
    fn shift(&self, bond: usize) -> f64 {
        let theta = if bond % 2 == 1 { 2.0 } else { 0.0 };
        match *self {
            CouplingFamily::Christandl | CouplingFamily::Custom { .. } => 0.0,
            CouplingFamily::KFamily { k } => theta * f64::from(k),
            CouplingFamily::MlFamily { m, l } => theta * f64::from(l) / f64::from(2 * m + 1),
        }
    }

    /// `(m, l)` parameters of the closed-form spectrum model, if this family
    /// belongs to the generalized engineered class.
    pub fn model_parameters(&self) -> Option<(u32, u32)> {
        match *self {
            CouplingFamily::Christandl => Some((0, 0)),
            CouplingFamily::KFamily { k } => Some((0, k)),
            CouplingFamily::MlFamily { m, l } => Some((m, l)),
            CouplingFamily::Custom { .. } => None,
        }
    }

    /// Whether `l/(2m+1)` is an irreducible fraction (or `l = 0`).
    pub fn is_reduced(&self) -> bool {
        match self.model_parameters() {
            Some((m, l)) => l == 0 || gcd(u64::from(l), u64::from(2 * m + 1)) == 1,
            None => false,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, CouplingFamily::Custom { .. })
    }
}

/// Validated chain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    n_sites: usize,
    j0: f64,
    family: CouplingFamily,
}

impl ChainSpec {
    pub fn new(n_sites: usize, j0: f64, family: CouplingFamily) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::config("chain.n_sites", "a chain needs at least 2 sites"));
        }
        if !(j0.is_finite() && j0 > 0.0) {
            return Err(Error::config("chain.j0", "coupling unit must be finite and positive"));
        }
        if let CouplingFamily::Custom { values } = &family {
            if values.len() != n_sites - 1 {
                return Err(Error::config(
                    "chain.couplings",
                    format!("expected {} couplings, got {}", n_sites - 1, values.len()),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("chain.couplings", "couplings must be finite"));
            }
        }
        if let Some((_, l)) = family.model_parameters() {
            if l > 0 && n_sites % 2 == 1 {
                return Err(Error::config(
                    "chain.n_sites",
                    "shifted coupling families are mirror symmetric only for even N",
                ));
            }
        }
        if family.is_builtin() && !family.is_reduced() {
            log::debug!("l/(2m+1) is not in lowest terms for {family:?}");
        }
        Ok(ChainSpec { n_sites, j0, family })
    }

    pub fn christandl(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 1.0, CouplingFamily::Christandl)
    }

    pub fn uniform(n_sites: usize) -> Result<Self> {
        Self::new(
            n_sites,
            1.0,
            CouplingFamily::Custom {
                values: vec![1.0; n_sites.saturating_sub(1)],
            },
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }

    pub fn family(&self) -> &CouplingFamily {
        &self.family
    }
}

/// Nearest-neighbour couplings `J_1 .. J_{N−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSequence(Vec<f64>);

impl CouplingSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("a chain needs at least one coupling".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("couplings must be finite".into()));
        }
        Ok(CouplingSequence(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.len() + 1
    }

    /// Largest `|J_j − J_{N−j}|`.
    pub fn mirror_defect(&self) -> f64 {
        self.0
            .iter()
            .zip(self.0.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Engineered couplings `J_j = J₀ √((j + ξ_j)(N − j + ξ_j))`.
pub fn build_couplings(spec: &ChainSpec) -> Result<CouplingSequence> {
    let n = spec.n_sites;
    if let CouplingFamily::Custom { values } = &spec.family {
        if values.len() != n - 1 {
            return Err(Error::config(
                "chain.couplings",
                format!("expected {} couplings, got {}", n - 1, values.len()),
            ));
        }
        return CouplingSequence::new(values.clone());
    }
    let values = (1..n)
        .map(|bond| {
            let xi = spec.family.shift(bond);
            let j = bond as f64;
            spec.j0 * ((j + xi) * (n as f64 - j + xi)).sqrt()
        })
        .collect();
    CouplingSequence::new(values)
}

/// Involutive permutation of sites, `S|j⟩ = φ |image[j]⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryPermutation {
    image: Vec<usize>,
    parity_phase: Complex64,
}

impl SymmetryPermutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        Self::with_phase(image, Complex64::new(1.0, 0.0))
    }

    pub fn with_phase(image: Vec<usize>, parity_phase: Complex64) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::Validation("empty permutation".into()));
        }
        if let Some(&bad) = image.iter().find(|&&j| j >= n) {
            return Err(Error::SiteOutOfRange { site: bad, n_sites: n });
        }
        if let Some(j) = (0..n).find(|&j| image[image[j]] != j) {
            return Err(Error::Validation(format!(
                "permutation is not an involution at site {j}"
            )));
        }
        if (parity_phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation("parity phase must have unit modulus".into()));
        }
        Ok(SymmetryPermutation { image, parity_phase })
    }

    pub fn n_sites(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn parity_phase(&self) -> Complex64 {
        self.parity_phase
    }

    /// Mirror pairs `(j, image[j])` with `j < image[j]`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.image
            .iter()
            .enumerate()
            .filter(|(j, &i)| *j < i)
            .map(|(j, &i)| (j, i))
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.image.iter().enumerate().filter(|(j, &i)| *j == i).map(|(j, _)| j)
    }

    /// `(Sψ)_i = φ ψ_{image[i]}`.
    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        self.image.iter().map(|&i| self.parity_phase * amplitudes[i]).collect()
    }

    /// Permutation part as a real matrix with `P[image[j], j] = 1`.
    pub fn matrix(&self) -> RealMatrix {
        let n = self.n_sites();
        let mut p = RealMatrix::zeros(n, n);
        for (j, &i) in self.image.iter().enumerate() {
            p[(i, j)] = 1.0;
        }
        p
    }

    /// The same symmetry after relabelling site `j` as `relabel[j]`.
    pub fn conjugated(&self, relabel: &[usize]) -> Result<Self> {
        let inverse = invert_permutation(relabel, self.n_sites())?;
        let image = (0..self.n_sites())
            .map(|new| relabel[self.image[inverse[new]]])
            .collect();
        Self::with_phase(image, self.parity_phase)
    }

    /// Product symmetry on the `a.n_sites() × b.n_sites()` lattice, site
    /// `(i, j)` stored at `i * b.n_sites() + j`.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let nb = b.n_sites();
        let image = (0..a.n_sites() * nb)
            .map(|site| a.image[site / nb] * nb + b.image[site % nb])
            .collect();
        Self::with_phase(image, a.parity_phase * b.parity_phase)
    }
}

/// Mirror reflection `j ↦ N − 1 − j` (zero-based).
pub fn reflection_permutation(n_sites: usize) -> Result<SymmetryPermutation> {
    if n_sites < 2 {
        return Err(Error::Validation("reflection needs at least 2 sites".into()));
    }
    SymmetryPermutation::new((0..n_sites).rev().collect())
}

/// Single-particle hopping Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonian {
    /// Nearest-neighbour chain with zero on-site energies.
    Tridiagonal(CouplingSequence),
    /// Arbitrary real symmetric hopping amplitudes `J_ij` with zero diagonal.
    DenseHopping(RealMatrix),
}

impl Hamiltonian {
    pub fn dense(matrix: RealMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if matrix.rows() < 2 {
            return Err(Error::Validation("a lattice needs at least 2 sites".into()));
        }
        if matrix.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("hopping amplitudes must be finite".into()));
        }
        if !matrix.is_symmetric(0.0) {
            return Err(Error::Validation("hopping matrix must be symmetric".into()));
        }
        if (0..matrix.rows()).any(|i| matrix[(i, i)] != 0.0) {
            return Err(Error::Validation("hopping matrix must have zero diagonal".into()));
        }
        Ok(Hamiltonian::DenseHopping(matrix))
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Hamiltonian::Tridiagonal(c) => c.n_sites(),
            Hamiltonian::DenseHopping(m) => m.rows(),
        }
    }

    /// Amplitude `⟨i|H|j⟩`.
    pub fn hopping(&self, i: usize, j: usize) -> f64 {
        match self {
            Hamiltonian::Tridiagonal(c) => {
                if i + 1 == j {
                    c.values()[i]
                } else if j + 1 == i {
                    c.values()[j]
                } else {
                    0.0
                }
            }
            Hamiltonian::DenseHopping(m) => m[(i, j)],
        }
    }

    /// Nonzero bonds `(i, j, J_ij)` with `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        match self {
            Hamiltonian::Tridiagonal(c) => {
                c.values().iter().enumerate().map(|(i, &v)| (i, i + 1, v)).collect()
            }
            Hamiltonian::DenseHopping(m) => {
                let n = m.rows();
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| m[(i, j)] != 0.0)
                    .map(|(i, j)| (i, j, m[(i, j)]))
                    .collect()
            }
        }
    }

    pub fn to_dense(&self) -> RealMatrix {
        let n = self.n_sites();
        RealMatrix::from_fn(n, n, |i, j| self.hopping(i, j))
    }

    /// The same lattice with site `j` relabelled as `relabel[j]`.
    pub fn permuted(&self, relabel: &[usize]) -> Result<Self> {
        let n = self.n_sites();
        let inverse = invert_permutation(relabel, n)?;
        let m = RealMatrix::from_fn(n, n, |a, b| self.hopping(inverse[a], inverse[b]));
        Hamiltonian::dense(m)
    }

    /// `H_a ⊗ 1 + 1 ⊗ H_b` on the rectangular lattice, site `(i, j)` stored
    /// at `i * b.n_sites() + j`.
    pub fn product_lattice(a: &Self, b: &Self) -> Result<Self> {
        let (na, nb) = (a.n_sites(), b.n_sites());
        let m = RealMatrix::from_fn(na * nb, na * nb, |s, t| {
            let (ia, ib) = (s / nb, s % nb);
            let (ja, jb) = (t / nb, t % nb);
            let mut v = 0.0;
            if ib == jb {
                v += a.hopping(ia, ja);
            }
            if ia == ja {
                v += b.hopping(ib, jb);
            }
            v
        });
        Hamiltonian::dense(m)
    }
}

/// Tridiagonal chain Hamiltonian with off-diagonal `(j, j+1)` entry `J_j`.
pub fn build_hamiltonian(couplings: &CouplingSequence) -> Hamiltonian {
    Hamiltonian::Tridiagonal(couplings.clone())
}

/// Whether `[S, H] = 0`, i.e. `max |S H − H S| ≤ tol` entrywise.
pub fn check_symmetry(h: &Hamiltonian, s: &SymmetryPermutation, tol: f64) -> Result<bool> {
    Ok(commutator_defect(h, s)? <= tol)
}

/// Largest entry of `|S H − H S|`.
pub fn commutator_defect(h: &Hamiltonian, s: &SymmetryPermutation) -> Result<f64> {
    let n = h.n_sites();
    if s.n_sites() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.n_sites(),
        });
    }
    let img = s.image();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            // (S H)_{ij} = H_{img i, j}, (H S)_{ij} = H_{i, img j}.
            worst = worst.max((h.hopping(img[i], j) - h.hopping(i, img[j])).abs());
        }
    }
    Ok(worst)
}

fn invert_permutation(relabel: &[usize], n: usize) -> Result<Vec<usize>> {
    if relabel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: relabel.len(),
        });
    }
    let mut inverse = vec![usize::MAX; n];
    for (j, &r) in relabel.iter().enumerate() {
        if r >= n {
            return Err(Error::SiteOutOfRange { site: r, n_sites: n });
        }
        if inverse[r] != usize::MAX {
            return Err(Error::Validation("relabelling is not a permutation".into()));
        }
        inverse[r] = j;
    }
    Ok(inverse)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_seq(got: &CouplingSequence, want: &[f64]) {
        assert_eq!(got.values().len(), want.len());
        for (g, w) in got.values().iter().zip(want) {
            assert!((g - w).abs() < 1e-14, "{g} vs {w}");
        }
    }

    #[test]
    fn christandl_four_sites() {
        let c = build_couplings(&ChainSpec::christandl(4).unwrap()).unwrap();
        assert_seq(&c, &[3f64.sqrt(), 2.0, 3f64.sqrt()]);
    }

    #[test]
    fn ml_family_four_sites() {
        let spec = ChainSpec::new(4, 1.0, CouplingFamily::MlFamily { m: 1, l: 2 }).unwrap();
        let c = build_couplings(&spec).unwrap();
        let j1 = 91f64.sqrt() / 3.0;
        assert_seq(&c, &[j1, 2.0, j1]);
    }

    #[test]
    fn k_family_four_sites_uses_theta_two_on_odd_bonds() {
        // (1 + 2·4)(3 + 2·4) = 99
        let spec = ChainSpec::new(4, 1.0, CouplingFamily::KFamily { k: 4 }).unwrap();
        let c = build_couplings(&spec).unwrap();
        assert_seq(&c, &[99f64.sqrt(), 2.0, 99f64.sqrt()]);
    }

    #[test]
    fn j0_scales_couplings() {
        let spec = ChainSpec::new(4, 2.5, CouplingFamily::Christandl).unwrap();
        let c = build_couplings(&spec).unwrap();
        assert_seq(&c, &[2.5 * 3f64.sqrt(), 5.0, 2.5 * 3f64.sqrt()]);
    }

    #[test]
    fn custom_length_checked() {
        let err = ChainSpec::new(4, 1.0, CouplingFamily::Custom { values: vec![1.0, 2.0] });
        assert!(matches!(err, Err(Error::Config { .. })));
        let err = ChainSpec::new(3, 1.0, CouplingFamily::Custom { values: vec![1.0, f64::NAN] });
        assert!(matches!(err, Err(Error::Config { .. })));
    }

    #[test]
    fn spec_invariants_enforced() {
        assert!(ChainSpec::christandl(1).is_err());
        assert!(ChainSpec::new(4, 0.0, CouplingFamily::Christandl).is_err());
        assert!(ChainSpec::new(4, -1.0, CouplingFamily::Christandl).is_err());
    }

    #[test]
    fn shifted_families_need_even_length() {
        assert!(ChainSpec::new(5, 1.0, CouplingFamily::KFamily { k: 1 }).is_err());
        assert!(ChainSpec::new(5, 1.0, CouplingFamily::MlFamily { m: 1, l: 1 }).is_err());
        assert!(ChainSpec::new(5, 1.0, CouplingFamily::KFamily { k: 0 }).is_ok());
        assert!(ChainSpec::new(5, 1.0, CouplingFamily::MlFamily { m: 2, l: 0 }).is_ok());
    }

    #[test]
    fn unreduced_fraction_recorded_not_rejected() {
        let spec = ChainSpec::new(4, 1.0, CouplingFamily::MlFamily { m: 1, l: 3 }).unwrap();
        assert!(!spec.family().is_reduced());
        assert!(CouplingFamily::MlFamily { m: 2, l: 3 }.is_reduced());
    }

    #[test]
    fn hamiltonian_layout() {
        let h = build_hamiltonian(&CouplingSequence::new(vec![1.5]).unwrap());
        let d = h.to_dense();
        assert_eq!(d.as_slice(), &[0.0, 1.5, 1.5, 0.0]);

        let s3 = 3f64.sqrt();
        let h = build_hamiltonian(&CouplingSequence::new(vec![s3, 2.0, s3]).unwrap()).to_dense();
        for i in 0..4 {
            assert_eq!(h[(i, i)], 0.0);
        }
        assert_eq!(h[(0, 1)], s3);
        assert_eq!(h[(2, 1)], 2.0);
        assert_eq!(h[(3, 2)], s3);
        assert_eq!(h[(0, 2)], 0.0);
        assert!(h.is_symmetric(0.0));

        let u = build_hamiltonian(&CouplingSequence::new(vec![1.0; 5]).unwrap()).to_dense();
        assert_eq!(u.rows(), 6);
        assert!((0..5).all(|i| u[(i, i + 1)] == 1.0 && u[(i + 1, i)] == 1.0));
    }

    #[test]
    fn reflection_images() {
        assert_eq!(reflection_permutation(4).unwrap().image(), &[3, 2, 1, 0]);
        assert_eq!(reflection_permutation(2).unwrap().image(), &[1, 0]);
        let r5 = reflection_permutation(5).unwrap();
        assert_eq!(r5.image(), &[4, 3, 2, 1, 0]);
        assert_eq!(r5.fixed_points().collect::<Vec<_>>(), vec![2]);
        assert_eq!(r5.pairs().collect::<Vec<_>>(), vec![(0, 4), (1, 3)]);
        assert!(reflection_permutation(1).is_err());
    }

    #[test]
    fn non_involution_rejected() {
        assert!(SymmetryPermutation::new(vec![1, 2, 0]).is_err());
        assert!(SymmetryPermutation::new(vec![0, 5]).is_err());
    }

    #[test]
    fn symmetry_checks() {
        let r = reflection_permutation(4).unwrap();
        let christandl = build_hamiltonian(&build_couplings(&ChainSpec::christandl(4).unwrap()).unwrap());
        assert!(check_symmetry(&christandl, &r, 1e-12).unwrap());

        let lopsided = build_hamiltonian(&CouplingSequence::new(vec![1.0, 2.0, 3.0]).unwrap());
        assert!(!check_symmetry(&lopsided, &r, 1e-12).unwrap());

        let r3 = reflection_permutation(3).unwrap();
        assert!(check_symmetry(&christandl, &r3, 1e-12).is_err());
    }

    #[test]
    fn dense_hopping_commutes_with_its_involution() {
        // Pairing (0 2)(1 3) with J_ij = J_{s(i), s(j)}.
        let s = SymmetryPermutation::new(vec![2, 3, 0, 1]).unwrap();
        let m = RealMatrix::from_row_major(
            4,
            4,
            vec![
                0.0, 1.0, 0.5, 0.3, //
                1.0, 0.0, 0.3, 0.7, //
                0.5, 0.3, 0.0, 1.0, //
                0.3, 0.7, 1.0, 0.0,
            ],
        )
        .unwrap();
        let h = Hamiltonian::dense(m).unwrap();
        assert!(check_symmetry(&h, &s, 1e-12).unwrap());
        assert!(!check_symmetry(&h, &reflection_permutation(4).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn dense_hopping_validation() {
        let diag = RealMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(Hamiltonian::dense(diag).is_err());
        let asym = RealMatrix::from_row_major(2, 2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(Hamiltonian::dense(asym).is_err());
    }

    #[test]
    fn relabelled_chain_keeps_conjugated_symmetry() {
        let h = build_hamiltonian(&build_couplings(&ChainSpec::christandl(6).unwrap()).unwrap());
        let r = reflection_permutation(6).unwrap();
        let relabel = [3, 0, 5, 1, 4, 2];
        let hp = h.permuted(&relabel).unwrap();
        let rp = r.conjugated(&relabel).unwrap();
        assert!(check_symmetry(&hp, &rp, 1e-12).unwrap());
        assert_ne!(rp.image(), r.image());
    }

    #[test]
    fn product_lattice_commutes_with_product_symmetry() {
        let a = build_hamiltonian(&build_couplings(&ChainSpec::christandl(3).unwrap()).unwrap());
        let b = build_hamiltonian(&build_couplings(&ChainSpec::christandl(4).unwrap()).unwrap());
        let h = Hamiltonian::product_lattice(&a, &b).unwrap();
        let s = SymmetryPermutation::product(
            &reflection_permutation(3).unwrap(),
            &reflection_permutation(4).unwrap(),
        )
        .unwrap();
        assert_eq!(h.n_sites(), 12);
        assert!(check_symmetry(&h, &s, 1e-12).unwrap());
    }

    fn builtin_family() -> impl Strategy<Value = CouplingFamily> {
        prop_oneof![
            Just(CouplingFamily::Christandl),
            (0u32..6).prop_map(|k| CouplingFamily::KFamily { k }),
            (0u32..4, 0u32..8).prop_map(|(m, l)| CouplingFamily::MlFamily { m, l }),
        ]
    }

    proptest! {
        #[test]
        fn builtin_families_are_mirror_symmetric(n in 2usize..=512, family in builtin_family()) {
            let shifted = family.model_parameters().is_some_and(|(_, l)| l > 0);
            let n = if shifted { n + n % 2 } else { n };
            let spec = ChainSpec::new(n, 1.0, family).unwrap();
            let c = build_couplings(&spec).unwrap();
            prop_assert!(c.values().iter().all(|&v| v > 0.0));
            let scale = c.values().iter().fold(1.0f64, |a, &b| a.max(b));
            prop_assert!(c.mirror_defect() <= 4.0 * f64::EPSILON * scale);
            let h = build_hamiltonian(&c);
            prop_assert!(check_symmetry(&h, &reflection_permutation(n).unwrap(), 1e-12 * scale).unwrap());
        }

        #[test]
        fn k_family_matches_ml_with_m_zero(half in 1usize..100, k in 0u32..10) {
            let n = 2 * half;
            let a = build_couplings(&ChainSpec::new(n, 1.0, CouplingFamily::KFamily { k }).unwrap()).unwrap();
            let b = build_couplings(&ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m: 0, l: k }).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn involution_squares_to_identity(n in 2usize..64, seed in any::<u64>()) {
            // Random involution: pair up a shuffled prefix of the sites.
            let mut order: Vec<usize> = (0..n).collect();
            let mut state = seed | 1;
            for i in (1..n).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                order.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let mut image: Vec<usize> = (0..n).collect();
            let pairs = (state as usize) % (n / 2 + 1);
            for p in 0..pairs {
                let (a, b) = (order[2 * p], order[2 * p + 1]);
                image[a] = b;
                image[b] = a;
            }
            let s = SymmetryPermutation::new(image).unwrap();
            let p = s.matrix();
            prop_assert_eq!(p.matmul(&p).unwrap(), RealMatrix::identity(n));
        }
    }
}
