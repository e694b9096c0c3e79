#![allow(dead_code)]

use mirrorqst::{
    build_couplings, build_hamiltonian, diagonalize, ChainSpec, CouplingFamily, SpectralDecomposition, WavePacket,
};
use num_complex::Complex64;
use rand::Rng;

/// Engineered chains that transfer perfectly at their characteristic time.
pub fn certified_models() -> Vec<ChainSpec> {
    let mut out = Vec::new();
    for n in [3, 4, 5, 8, 16] {
        out.push(ChainSpec::christandl(n).unwrap());
    }
    for k in [1, 4] {
        for n in [4, 8] {
            out.push(ChainSpec::new(n, 1.0, CouplingFamily::KFamily { k }).unwrap());
        }
    }
    for (m, l) in [(1, 1), (1, 2), (2, 1), (2, 3)] {
        for n in [4, 8, 16] {
            out.push(ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m, l }).unwrap());
        }
    }
    out
}

pub fn decompose(spec: &ChainSpec) -> SpectralDecomposition {
    diagonalize(&build_hamiltonian(&build_couplings(spec).unwrap())).unwrap()
}

pub fn grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect()
}

pub fn random_real_packet(rng: &mut impl Rng, n: usize) -> WavePacket {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-2 {
            return WavePacket::normalized(v).unwrap();
        }
    }
}

pub fn random_complex_packet(rng: &mut impl Rng, n: usize) -> WavePacket {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-2 {
            return WavePacket::normalized(v).unwrap();
        }
    }
}
