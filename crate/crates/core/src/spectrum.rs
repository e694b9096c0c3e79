//! Commensurate spectra: the closed-form model spectrum of the engineered
//! families, detection of a common energy quantum in raw eigenvalues, and
//! the spectral condition for perfect transfer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chain::{gcd, ChainSpec, SymmetryPermutation};
use crate::error::{Error, Result};
use crate::spectral::{parity_labels, Parity, SpectralDecomposition, PARITY_TOLERANCE};

/// Largest denominator tried when fitting gap ratios.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Relative floor on the fit residual, in units of the spectral spread.
pub const RELATIVE_FIT_FLOOR: f64 = 1e-9;

/// Rational fits whose denominator exceeds `sqrt(SIGNIFICANCE / δ)` are
/// treated as chance agreement.
const SIGNIFICANCE: f64 = 1e-3;

/// `ε_n = N_n E₀ − (N+1) J₀`, `E₀ = 2J₀/(2m+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    pub m: u32,
    pub l: u32,
    pub n_sites: usize,
    pub j0: f64,
    pub e0: f64,
    pub offset: f64,
    pub integers: Vec<i64>,
}

impl SpectrumModel {
    pub fn new(m: u32, l: u32, n_sites: usize, j0: f64) -> Result<Self> {
        if n_sites < 2 || !n_sites.is_multiple_of(2) {
            return Err(Error::Unsupported(format!(
                "the closed-form spectrum needs an even chain length, got {n_sites}"
            )));
        }
        if !(j0.is_finite() && j0 > 0.0) {
            return Err(Error::Validation(format!("J0 must be positive, got {j0}")));
        }
        let q = 2 * u64::from(m) + 1;
        if l > 0 && gcd(u64::from(l), q) != 1 {
            return Err(Error::Unsupported(format!(
                "l/(2m+1) = {l}/{q} is not in lowest terms"
            )));
        }
        let (q, shift) = (q as i64, i64::from(l));
        let integers = (1..=n_sites as i64)
            .map(|n| if n <= n_sites as i64 / 2 { n * q - shift } else { n * q + shift })
            .collect();
        Ok(SpectrumModel {
            m,
            l,
            n_sites,
            j0,
            e0: 2.0 * j0 / q as f64,
            offset: -((n_sites + 1) as f64) * j0,
            integers,
        })
    }

    pub fn for_chain(spec: &ChainSpec) -> Result<Self> {
        let (m, l) = spec.family().model_parameters().ok_or_else(|| {
            Error::Unsupported("custom chains have no closed-form spectrum".into())
        })?;
        Self::new(m, l, spec.n_sites(), spec.j0())
    }

    /// Ascending model eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.integers.iter().map(|&k| k as f64 * self.e0 + self.offset).collect()
    }

    /// `(−1)^{N_n}`.
    pub fn parities(&self) -> Vec<Parity> {
        self.integers
            .iter()
            .map(|k| if k % 2 == 0 { Parity::Even } else { Parity::Odd })
            .collect()
    }

    pub fn transfer_time(&self) -> f64 {
        PI / self.e0
    }
}

pub fn closed_form_spectrum(m: u32, l: u32, n_sites: usize, j0: f64) -> Result<Vec<f64>> {
    Ok(SpectrumModel::new(m, l, n_sites, j0)?.eigenvalues())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommensurabilityReport {
    pub found: bool,
    /// Fitted `E′`; zero when nothing was found.
    pub quantum: f64,
    pub base: f64,
    /// `ν_n` with `ν₁ = 0`; empty when nothing was found.
    pub integers: Vec<i64>,
    pub max_residual: f64,
    pub tolerance: f64,
}

/// Smallest-denominator continued-fraction convergent of `x` within `err`.
fn rational_fit(x: f64, err: f64, max_q: u64) -> Option<(i64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1u64, 1i64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as u64 * q1 + q0);
        if q2 > max_q {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= err {
            return Some((p2, q2));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Fits `ε_n ≈ ν_n E′ + base` with integer `ν_n` and the largest `E′`.
pub fn detect_commensurability(eigenvalues: &[f64], tol: f64) -> Result<CommensurabilityReport> {
    if eigenvalues.len() < 2 {
        return Err(Error::Validation("commensurability needs at least two eigenvalues".into()));
    }
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::Validation("eigenvalues must be finite".into()));
    }
    let mut ev = eigenvalues.to_vec();
    ev.sort_by(f64::total_cmp);
    let base0 = ev[0];
    let spread = ev[ev.len() - 1] - base0;
    let tol_eff = tol.max(RELATIVE_FIT_FLOOR * spread);
    let not_found = |residual: f64| CommensurabilityReport {
        found: false,
        quantum: 0.0,
        base: base0,
        integers: Vec::new(),
        max_residual: residual,
        tolerance: tol_eff,
    };
    let Some(gap) = ev
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > tol_eff)
        .min_by(f64::total_cmp)
    else {
        return Err(Error::Validation("eigenvalues are not distinct within tolerance".into()));
    };
    let rel = tol_eff / gap;
    let cap = MAX_DENOMINATOR.min((SIGNIFICANCE / rel).sqrt().floor().max(1.0) as u64);

    let mut lcm = 1u64;
    for &e in &ev {
        let ratio = (e - base0) / gap;
        let Some((_, q)) = rational_fit(ratio, rel, cap) else {
            let nearest = (ratio - ratio.round()).abs() * gap;
            return Ok(not_found(nearest));
        };
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > cap {
            return Ok(not_found(gap / cap as f64));
        }
    }

    let step = gap / lcm as f64;
    let mut nu: Vec<i64> = ev.iter().map(|e| ((e - base0) / step).round() as i64).collect();
    let common = nu.iter().fold(0u64, |g, &k| gcd(g, k.unsigned_abs()));
    if common > 1 {
        nu.iter_mut().for_each(|k| *k /= common as i64);
    }

    // Least-squares line through (ν_n, ε_n).
    let n = ev.len() as f64;
    let mean_nu = nu.iter().sum::<i64>() as f64 / n;
    let mean_e = ev.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&k, &e) in nu.iter().zip(&ev) {
        sxy += (k as f64 - mean_nu) * (e - mean_e);
        sxx += (k as f64 - mean_nu).powi(2);
    }
    let quantum = sxy / sxx;
    let base = mean_e - quantum * mean_nu;
    let max_residual = nu
        .iter()
        .zip(&ev)
        .map(|(&k, &e)| (e - (k as f64 * quantum + base)).abs())
        .fold(0.0, f64::max);
    if max_residual > tol_eff || quantum < tol * spread {
        return Ok(not_found(max_residual));
    }
    Ok(CommensurabilityReport {
        found: true,
        quantum,
        base,
        integers: nu,
        max_residual,
        tolerance: tol_eff,
    })
}

/// Measured parities against `(−1)^{N_n}` up to one global sign. A spectrum
/// that does not match the model also yields `false`.
pub fn parity_pattern_check(decomp: &SpectralDecomposition, model: &SpectrumModel, tol: f64) -> Result<bool> {
    if decomp.n_sites() != model.n_sites {
        return Err(Error::DimensionMismatch {
            expected: model.n_sites,
            found: decomp.n_sites(),
        });
    }
    let measured: Vec<f64> = decomp
        .parities()
        .iter()
        .map(|p| p.sign())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Validation("parity labels are undefined".into()))?;
    let scale = decomp.max_abs_eigenvalue().max(1.0);
    let spectrum_matches = decomp
        .eigenvalues()
        .iter()
        .zip(model.eigenvalues())
        .all(|(a, b)| (a - b).abs() <= tol * scale);
    if !spectrum_matches {
        return Ok(false);
    }
    let expected: Vec<f64> = model.parities().iter().map(|p| p.sign().expect("model parity")).collect();
    let relative = measured[0] * expected[0];
    Ok(measured.iter().zip(&expected).all(|(a, b)| a * b == relative))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPstReport {
    pub holds: bool,
    pub tau: Option<f64>,
    pub commensurability: CommensurabilityReport,
}

/// Commensurate spectrum with `e^{−iε_n τ} p_n` constant at `τ = π/E′`.
pub fn pst_spectral_condition(
    decomp: &SpectralDecomposition,
    s: &SymmetryPermutation,
    tol: f64,
) -> Result<SpectralPstReport> {
    let report = detect_commensurability(decomp.eigenvalues(), tol)?;
    let parities = parity_labels(decomp, s, PARITY_TOLERANCE);
    let signs: Option<Vec<f64>> = parities.iter().map(|p| p.sign()).collect();
    let (holds, tau) = match (&signs, report.found) {
        (Some(signs), true) => {
            // e^{−iε_n τ} = e^{−i base τ} (−1)^{ν_n} at τ = π/E′.
            let pattern: Vec<f64> = report
                .integers
                .iter()
                .zip(signs)
                .map(|(k, p)| if k % 2 == 0 { *p } else { -p })
                .collect();
            let holds = pattern.iter().all(|&x| x == pattern[0]);
            (holds, holds.then(|| PI / report.quantum))
        }
        _ => (false, None),
    };
    Ok(SpectralPstReport {
        holds,
        tau,
        commensurability: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_couplings, build_hamiltonian, reflection_permutation, CouplingFamily};
    use crate::spectral::diagonalize;
    use crate::transfer::{certify_pst, CERTIFICATION_TOLERANCE};
    use std::f64::consts::FRAC_PI_2;

    fn decomp(spec: &ChainSpec) -> SpectralDecomposition {
        diagonalize(&build_hamiltonian(&build_couplings(spec).unwrap())).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let third = 1.0 / 3.0;
        assert_close(
            &closed_form_spectrum(1, 2, 4, 1.0).unwrap(),
            &[-13.0 * third, -7.0 * third, 7.0 * third, 13.0 * third],
            1e-14,
        );
        assert_close(&closed_form_spectrum(0, 0, 4, 1.0).unwrap(), &[-3.0, -1.0, 1.0, 3.0], 1e-14);
        assert_close(&closed_form_spectrum(2, 1, 4, 1.0).unwrap(), &[-3.4, -1.4, 1.4, 3.4], 1e-14);
        assert_eq!(SpectrumModel::new(1, 2, 4, 1.0).unwrap().integers, vec![1, 4, 11, 14]);
        assert_eq!(SpectrumModel::new(2, 1, 4, 1.0).unwrap().integers, vec![4, 9, 16, 21]);
    }

    #[test]
    fn closed_form_rejections() {
        assert!(matches!(closed_form_spectrum(1, 3, 4, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(closed_form_spectrum(1, 1, 5, 1.0), Err(Error::Unsupported(_))));
        assert!(closed_form_spectrum(1, 1, 4, 0.0).is_err());
        let custom = ChainSpec::uniform(4).unwrap();
        assert!(SpectrumModel::for_chain(&custom).is_err());
    }

    #[test]
    fn kfamily_matches_shifted_model() {
        // k = 4, N = 4 has couplings (√99, 2, √99) and spectrum ±9, ±11.
        let spec = ChainSpec::new(4, 1.0, CouplingFamily::KFamily { k: 4 }).unwrap();
        let model = SpectrumModel::for_chain(&spec).unwrap();
        assert_close(decomp(&spec).eigenvalues(), &model.eigenvalues(), 1e-12);
        assert_close(&model.eigenvalues(), &[-11.0, -9.0, 9.0, 11.0], 1e-14);
    }

    #[test]
    fn closed_form_matches_eigensolve() {
        for (m, l) in [(0, 0), (1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (3, 5)] {
            for n in [4, 8, 16, 64] {
                let spec = ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m, l }).unwrap();
                let d = decomp(&spec);
                let model = SpectrumModel::for_chain(&spec).unwrap();
                assert_close(d.eigenvalues(), &model.eigenvalues(), 1e-9 * d.max_abs_eigenvalue());
                assert!(parity_pattern_check(&d, &model, 1e-9).unwrap(), "({m},{l}) N={n}");
            }
        }
    }

    #[test]
    fn detection_examples() {
        let r = detect_commensurability(&[-3.0, -1.0, 1.0, 3.0], 1e-9).unwrap();
        assert!(r.found);
        assert!((r.quantum - 2.0).abs() < 1e-12);
        assert_eq!(r.integers, vec![0, 1, 2, 3]);

        let r = detect_commensurability(&[-7.0, -5.0, 5.0, 7.0], 1e-9).unwrap();
        assert!(r.found);
        assert!((r.quantum - 2.0).abs() < 1e-12);
        assert_eq!(r.integers, vec![0, 1, 6, 7]);

        let uniform: Vec<f64> = (1..=4).rev().map(|k| 2.0 * (k as f64 * PI / 5.0).cos()).collect();
        assert!(!detect_commensurability(&uniform, 1e-9).unwrap().found);

        assert!(detect_commensurability(&[1.0], 1e-9).is_err());
        assert!(detect_commensurability(&[1.0, 1.0], 1e-9).is_err());
    }

    #[test]
    fn detection_recovers_model_quantum() {
        for (m, l, n) in [(1, 2, 4), (2, 3, 16), (2, 1, 64), (0, 3, 8)] {
            let model = SpectrumModel::new(m, l, n, 1.0).unwrap();
            let r = detect_commensurability(&model.eigenvalues(), 1e-9).unwrap();
            assert!(r.found);
            let d = (model.e0 / r.quantum).round();
            assert!((model.e0 / r.quantum - d).abs() < 1e-9 && d >= 1.0);
            let first = model.integers[0];
            for (nu, k) in r.integers.iter().zip(&model.integers) {
                assert_eq!(nu * d as i64, k - first);
            }
            assert!((r.base - model.eigenvalues()[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn detection_on_large_eigensolve() {
        let spec = ChainSpec::new(512, 1.0, CouplingFamily::MlFamily { m: 2, l: 3 }).unwrap();
        let d = decomp(&spec);
        let r = detect_commensurability(d.eigenvalues(), 1e-9).unwrap();
        assert!(r.found, "{:?}", r.max_residual);
        assert!((r.quantum - 0.4).abs() < 1e-9);
    }

    #[test]
    fn broken_alternation_fails_parity_check() {
        let d = decomp(&ChainSpec::christandl(4).unwrap());
        let model = SpectrumModel::new(0, 0, 4, 1.0).unwrap();
        assert!(parity_pattern_check(&d, &model, 1e-9).unwrap());
        assert_eq!(d.parities(), &[Parity::Odd, Parity::Even, Parity::Odd, Parity::Even]);
        let swapped = SpectralDecomposition::from_parts(
            d.eigenvalues().to_vec(),
            d.eigenvectors().clone(),
            vec![Parity::Odd, Parity::Even, Parity::Even, Parity::Odd],
        )
        .unwrap();
        assert!(!parity_pattern_check(&swapped, &model, 1e-9).unwrap());
        let unlabelled = SpectralDecomposition::from_parts(
            d.eigenvalues().to_vec(),
            d.eigenvectors().clone(),
            vec![Parity::Undefined; 4],
        )
        .unwrap();
        assert!(parity_pattern_check(&unlabelled, &model, 1e-9).is_err());
        let other = SpectrumModel::new(1, 2, 4, 1.0).unwrap();
        assert!(!parity_pattern_check(&d, &other, 1e-9).unwrap());
    }

    #[test]
    fn spectral_condition_examples() {
        let r = reflection_permutation(4).unwrap();
        let christandl = pst_spectral_condition(&decomp(&ChainSpec::christandl(4).unwrap()), &r, 1e-9).unwrap();
        assert!(christandl.holds);
        assert!((christandl.tau.unwrap() - FRAC_PI_2).abs() < 1e-12);

        let k4 = ChainSpec::new(4, 1.0, CouplingFamily::KFamily { k: 4 }).unwrap();
        let k4 = pst_spectral_condition(&decomp(&k4), &r, 1e-9).unwrap();
        assert!(k4.holds);
        assert!((k4.tau.unwrap() - FRAC_PI_2).abs() < 1e-12);

        let uniform = pst_spectral_condition(&decomp(&ChainSpec::uniform(4).unwrap()), &r, 1e-9).unwrap();
        assert!(!uniform.holds && uniform.tau.is_none());
    }

    #[test]
    fn spectral_condition_agrees_with_certificate() {
        let mut specs = vec![ChainSpec::uniform(3).unwrap(), ChainSpec::uniform(4).unwrap(), ChainSpec::uniform(6).unwrap()];
        for n in [3, 4, 5, 8, 16] {
            specs.push(ChainSpec::christandl(n).unwrap());
        }
        for (m, l) in [(1, 1), (1, 2), (2, 1), (2, 3), (0, 1), (0, 4)] {
            for n in [4, 8, 16] {
                specs.push(ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m, l }).unwrap());
            }
        }
        specs.push(ChainSpec::new(4, 1.0, CouplingFamily::Custom { values: vec![1.0, 2.0, 1.0] }).unwrap());
        for spec in specs {
            let d = decomp(&spec);
            let r = reflection_permutation(spec.n_sites()).unwrap();
            let cond = pst_spectral_condition(&d, &r, 1e-9).unwrap();
            let tau = cond.tau.or_else(|| spec.characteristic_time().ok()).unwrap_or(FRAC_PI_2);
            let cert = certify_pst(&d, &r, tau, CERTIFICATION_TOLERANCE).unwrap();
            assert_eq!(cond.holds, cert.certified, "{spec:?}");
        }
    }
}
