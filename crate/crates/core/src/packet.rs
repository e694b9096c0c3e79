use num_complex::Complex64;

use crate::error::{Error, Result};

/// Allowed deviation of `Σ|c_j|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Normalised single-particle amplitudes `c_j` on the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket(Vec<Complex64>);

impl WavePacket {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Validation("wave packet has no sites".into()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("wave packet amplitudes must be finite".into()));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Validation(format!(
                "wave packet is not normalized (Σ|c|² = {norm})"
            )));
        }
        Ok(WavePacket(amplitudes))
    }

    /// Rescales to unit norm. Rejects the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Validation("cannot normalize a zero or non-finite packet".into()));
        }
        for c in &mut amplitudes {
            *c /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `|site⟩` on a chain of `n_sites`.
    pub fn localized(n_sites: usize, site: usize) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_sites];
        amps[site] = Complex64::new(1.0, 0.0);
        Ok(WavePacket(amps))
    }

    /// Zero-padded `c₁|1⟩ + c₂|2⟩` with `c₁ = 5/6`, `c₂ = √(11/36)`.
    pub fn two_site_real(n_sites: usize) -> Result<Self> {
        Self::padded(
            n_sites,
            &[
                Complex64::new(5.0 / 6.0, 0.0),
                Complex64::new((11.0f64 / 36.0).sqrt(), 0.0),
            ],
        )
    }

    /// Zero-padded `c₁|1⟩ + c₂|2⟩` with `c₁ = (1+i)/2`, `c₂ = 1/5 + i√(23/50)`.
    pub fn two_site_complex(n_sites: usize) -> Result<Self> {
        Self::padded(
            n_sites,
            &[
                Complex64::new(0.5, 0.5),
                Complex64::new(0.2, (23.0f64 / 50.0).sqrt()),
            ],
        )
    }

    fn padded(n_sites: usize, head: &[Complex64]) -> Result<Self> {
        if n_sites < head.len() {
            return Err(Error::Validation(format!(
                "packet needs at least {} sites",
                head.len()
            )));
        }
        let mut amps = head.to_vec();
        amps.resize(n_sites, Complex64::new(0.0, 0.0));
        Self::new(amps)
    }

    pub(crate) fn from_unchecked(amplitudes: Vec<Complex64>) -> Self {
        WavePacket(amplitudes)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.0.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }

    /// Real after dividing out the phase of the largest amplitude, with all
    /// imaginary parts at most `tol`.
    pub fn is_real_up_to_phase(&self, tol: f64) -> bool {
        let Some(largest) = self.0.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
            return true;
        };
        if largest.norm() == 0.0 {
            return true;
        }
        let unphase = largest.conj() / largest.norm();
        self.0.iter().all(|c| (c * unphase).im.abs() <= tol)
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|c| c.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_normalized() {
        for n in 2..8 {
            assert!((WavePacket::two_site_real(n).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
            assert!((WavePacket::two_site_complex(n).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert!(WavePacket::two_site_real(1).is_err());
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(WavePacket::from_real(&[1.0, 1.0]).is_err());
        assert!(WavePacket::from_real(&[]).is_err());
        assert!(WavePacket::normalized(vec![Complex64::new(0.0, 0.0); 3]).is_err());
        let p = WavePacket::normalized(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)])
            .unwrap();
        assert!((p.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn realness_up_to_global_phase() {
        assert!(WavePacket::two_site_real(4).unwrap().is_real_up_to_phase(1e-12));
        assert!(!WavePacket::two_site_complex(4).unwrap().is_real_up_to_phase(1e-12));
        let phase = Complex64::from_polar(1.0, 0.7);
        let rotated: Vec<_> = WavePacket::two_site_real(4)
            .unwrap()
            .amplitudes()
            .iter()
            .map(|c| c * phase)
            .collect();
        assert!(WavePacket::new(rotated).unwrap().is_real_up_to_phase(1e-12));
    }

    #[test]
    fn localized_bounds() {
        assert!(WavePacket::localized(4, 4).is_err());
        let p = WavePacket::localized(4, 3).unwrap();
        assert_eq!(p.amplitudes()[3], Complex64::new(1.0, 0.0));
    }
}
