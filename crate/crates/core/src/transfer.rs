//! Transfer fidelity, the characteristic transfer time, and certification of
//! perfect state transfer `U(τ) = φ S`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, CouplingFamily, SymmetryPermutation};
use crate::error::{Error, Result};
use crate::packet::WavePacket;
use crate::spectral::{evolve, propagator, SpectralDecomposition};

/// Default bound on `max |U(τ) − φ S|` for a perfect-transfer certificate.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-9;

/// Outcome of comparing `U(τ)` with the symmetry up to a global phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PstCertificate {
    pub tau: f64,
    /// Unit-modulus `φ` with `U(τ) ≈ φ S`.
    pub global_phase: Complex64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// `F(t) = |⟨Sψ₀|U(t)|ψ₀⟩|`.
pub fn fidelity_at(
    decomp: &SpectralDecomposition,
    psi0: &WavePacket,
    s: &SymmetryPermutation,
    t: f64,
) -> Result<f64> {
    let psi_t = evolve(decomp, psi0, t)?;
    fidelity_of(psi0, &psi_t, s)
}

/// Overlap of an already evolved state with the mirror image of `psi0`.
pub fn fidelity_of(psi0: &WavePacket, psi_t: &WavePacket, s: &SymmetryPermutation) -> Result<f64> {
    if s.n_sites() != psi0.len() || psi_t.len() != psi0.len() {
        return Err(Error::DimensionMismatch {
            expected: psi0.len(),
            found: s.n_sites().min(psi_t.len()),
        });
    }
    let mirrored = WavePacket::from_unchecked(s.apply(psi0.amplitudes()));
    Ok(mirrored.inner(psi_t.amplitudes()).norm())
}

/// `τ = π / E₀` for the engineered families, with `E₀ = 2J₀/(2m+1)`.
pub fn characteristic_time(family: &CouplingFamily, j0: f64) -> Result<f64> {
    match *family {
        CouplingFamily::Christandl | CouplingFamily::KFamily { .. } => Ok(PI / (2.0 * j0)),
        CouplingFamily::MlFamily { m, .. } => Ok(PI * f64::from(2 * m + 1) / (2.0 * j0)),
        CouplingFamily::Custom { .. } => Err(Error::Unsupported(
            "custom chains have no closed-form transfer time; scan for it instead".into(),
        )),
    }
}

impl ChainSpec {
    pub fn characteristic_time(&self) -> Result<f64> {
        characteristic_time(self.family(), self.j0())
    }
}

/// Compares `U(τ)` with `φ S`, taking `φ` from the largest matched entry
/// `U(τ)_{i, s(i)}`.
pub fn certify_pst(
    decomp: &SpectralDecomposition,
    s: &SymmetryPermutation,
    tau: f64,
    tol: f64,
) -> Result<PstCertificate> {
    let n = decomp.n_sites();
    if s.n_sites() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.n_sites(),
        });
    }
    let u = propagator(decomp, tau).entries;
    let img = s.image();
    let unphase = s.parity_phase().conj();
    let matched = (0..n)
        .map(|i| u[(i, img[i])] * unphase)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty");
    let phase = if matched.norm() > 0.0 {
        matched / matched.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let target = phase * s.parity_phase();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if img[j] == i { target } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((u[(i, j)] - want).norm());
        }
    }
    Ok(PstCertificate {
        tau,
        global_phase: phase,
        max_deviation: worst,
        tolerance: tol,
        certified: worst <= tol,
    })
}

/// Time of maximal fidelity on `(0, t_max]`: a uniform grid of `steps`
/// intervals, refined by golden-section search around the best grid point.
pub fn scan_transfer_time(
    decomp: &SpectralDecomposition,
    psi0: &WavePacket,
    s: &SymmetryPermutation,
    t_max: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    if !(t_max.is_finite() && t_max > 0.0) || steps < 2 {
        return Err(Error::Validation("scan needs t_max > 0 and at least 2 steps".into()));
    }
    let dt = t_max / steps as f64;
    let mut best = (dt, f64::NEG_INFINITY);
    for i in 1..=steps {
        let t = dt * i as f64;
        let f = fidelity_at(decomp, psi0, s, t)?;
        if f > best.1 {
            best = (t, f);
        }
    }
    let (mut lo, mut hi) = ((best.0 - dt).max(0.0), (best.0 + dt).min(t_max));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = fidelity_at(decomp, psi0, s, a)?;
    let mut fb = fidelity_at(decomp, psi0, s, b)?;
    for _ in 0..80 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = fidelity_at(decomp, psi0, s, a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = fidelity_at(decomp, psi0, s, b)?;
        }
    }
    let (t, f) = if fa > fb { (a, fa) } else { (b, fb) };
    Ok(if f >= best.1 { (t, f) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_couplings, build_hamiltonian, reflection_permutation};
    use crate::linalg::ComplexMatrix;
    use crate::spectral::diagonalize;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn decomp(spec: &ChainSpec) -> SpectralDecomposition {
        diagonalize(&build_hamiltonian(&build_couplings(spec).unwrap())).unwrap()
    }

    fn family(f: CouplingFamily, n: usize) -> ChainSpec {
        ChainSpec::new(n, 1.0, f).unwrap()
    }

    #[test]
    fn christandl_fidelity_values() {
        let d = decomp(&ChainSpec::christandl(4).unwrap());
        let r = reflection_permutation(4).unwrap();
        let psi = WavePacket::localized(4, 0).unwrap();
        assert!((fidelity_at(&d, &psi, &r, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
        let want = FRAC_PI_4.sin().powi(3);
        assert!((fidelity_at(&d, &psi, &r, FRAC_PI_4).unwrap() - want).abs() < 1e-12);
        assert!(fidelity_at(&d, &psi, &r, 0.0).unwrap() < 1e-15);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let d = decomp(&ChainSpec::christandl(4).unwrap());
        let psi = WavePacket::localized(4, 0).unwrap();
        assert!(fidelity_at(&d, &psi, &reflection_permutation(5).unwrap(), 1.0).is_err());
    }

    #[test]
    fn characteristic_times() {
        let ml = CouplingFamily::MlFamily { m: 1, l: 2 };
        assert!((characteristic_time(&ml, 1.0).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!((characteristic_time(&CouplingFamily::Christandl, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let ml = CouplingFamily::MlFamily { m: 2, l: 1 };
        assert!((characteristic_time(&ml, 1.0).unwrap() - 2.5 * PI).abs() < 1e-15);
        assert!((characteristic_time(&CouplingFamily::KFamily { k: 3 }, 2.0).unwrap() - PI / 4.0).abs() < 1e-15);
        let custom = CouplingFamily::Custom { values: vec![1.0] };
        assert!(matches!(characteristic_time(&custom, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn christandl_certificate_phase_is_i() {
        let d = decomp(&ChainSpec::christandl(4).unwrap());
        let c = certify_pst(&d, &reflection_permutation(4).unwrap(), FRAC_PI_2, CERTIFICATION_TOLERANCE).unwrap();
        assert!(c.certified);
        assert!((c.global_phase - Complex64::i()).norm() < 1e-12);
    }

    #[test]
    fn ml_certificate_phase_is_minus_i() {
        let d = decomp(&family(CouplingFamily::MlFamily { m: 1, l: 2 }, 4));
        let c = certify_pst(&d, &reflection_permutation(4).unwrap(), 1.5 * PI, CERTIFICATION_TOLERANCE).unwrap();
        assert!(c.certified, "{c:?}");
        assert!((c.global_phase + Complex64::i()).norm() < 1e-12);
    }

    #[test]
    fn uniform_chain_not_certified() {
        let d = decomp(&ChainSpec::uniform(4).unwrap());
        let c = certify_pst(&d, &reflection_permutation(4).unwrap(), FRAC_PI_2, CERTIFICATION_TOLERANCE).unwrap();
        assert!(!c.certified);
        assert!(c.max_deviation > 0.1);
    }

    #[test]
    fn periodicity_at_twice_tau() {
        let spec = family(CouplingFamily::MlFamily { m: 2, l: 3 }, 8);
        let d = decomp(&spec);
        let tau = spec.characteristic_time().unwrap();
        let c = certify_pst(&d, &reflection_permutation(8).unwrap(), tau, CERTIFICATION_TOLERANCE).unwrap();
        let u2 = propagator(&d, 2.0 * tau).entries;
        let want = ComplexMatrix::identity(8).scale(c.global_phase * c.global_phase);
        assert!(u2.max_abs_diff(&want) < 1e-9);
    }

    #[test]
    fn scan_finds_uniform_three_site_transfer() {
        // Uniform N = 3 transfers perfectly at π/√2.
        let d = decomp(&ChainSpec::uniform(3).unwrap());
        let r = reflection_permutation(3).unwrap();
        let psi = WavePacket::localized(3, 0).unwrap();
        let (t, f) = scan_transfer_time(&d, &psi, &r, 3.0, 300).unwrap();
        assert!((t - PI / 2f64.sqrt()).abs() < 1e-6, "{t}");
        assert!((f - 1.0).abs() < 1e-10);
    }

    fn certified_model() -> impl Strategy<Value = ChainSpec> {
        prop_oneof![
            (2usize..=64).prop_map(|n| ChainSpec::christandl(n).unwrap()),
            (1usize..=32, 0u32..5).prop_map(|(h, k)| family(CouplingFamily::KFamily { k }, 2 * h)),
            (1usize..=32, prop_oneof![Just((1u32, 1u32)), Just((1, 2)), Just((2, 1)), Just((2, 3))])
                .prop_map(|(h, (m, l))| family(CouplingFamily::MlFamily { m, l }, 2 * h)),
        ]
    }

    proptest! {
        #[test]
        fn perfect_transfer_for_localized_packets(spec in certified_model(), raw in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let n = spec.n_sites();
            let support = (n / 4).max(1);
            let amps: Vec<Complex64> = (0..n)
                .map(|j| if j < support { Complex64::new(raw[2 * j], raw[2 * j + 1]) } else { Complex64::new(0.0, 0.0) })
                .collect();
            prop_assume!(amps.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
            let psi = WavePacket::normalized(amps).unwrap();
            let d = decomp(&spec);
            let r = reflection_permutation(n).unwrap();
            let tau = spec.characteristic_time().unwrap();
            let f = fidelity_at(&d, &psi, &r, tau).unwrap();
            prop_assert!((f - 1.0).abs() <= 1e-9, "F = {}", f);
            let cert = certify_pst(&d, &r, tau, CERTIFICATION_TOLERANCE).unwrap();
            prop_assert!(cert.certified);
            let t = 0.37 * tau;
            let f1 = fidelity_at(&d, &psi, &r, t).unwrap();
            let f2 = fidelity_at(&d, &psi, &r, t + 2.0 * tau).unwrap();
            prop_assert!((f1 - f2).abs() <= 1e-9);
        }

        #[test]
        fn fidelity_bounded(spec in certified_model(), t in 0.0f64..50.0, raw in proptest::collection::vec(-1.0f64..1.0, 128)) {
            let n = spec.n_sites();
            let amps: Vec<Complex64> = (0..n).map(|j| Complex64::new(raw[2 * j], raw[2 * j + 1])).collect();
            prop_assume!(amps.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
            let psi = WavePacket::normalized(amps).unwrap();
            let f = fidelity_at(&decomp(&spec), &psi, &reflection_permutation(n).unwrap(), t).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        }
    }
}
