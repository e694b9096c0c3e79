//! Benchmark fixtures.

use mirrorqst::{
    build_couplings, build_hamiltonian, ChainSpec, CouplingFamily, Hamiltonian, SymmetryPermutation, WavePacket,
};

/// The m = 1, l = 2 chain of `n` sites.
pub fn ml_chain(n: usize) -> Hamiltonian {
    let spec = ChainSpec::new(n, 1.0, CouplingFamily::MlFamily { m: 1, l: 2 }).expect("even n");
    build_hamiltonian(&build_couplings(&spec).expect("valid spec"))
}

pub fn transfer_time() -> f64 {
    ChainSpec::new(4, 1.0, CouplingFamily::MlFamily { m: 1, l: 2 })
        .and_then(|s| s.characteristic_time())
        .expect("closed form")
}

/// Scrambled chain so that the dense eigensolver has work to do.
pub fn dense_chain(n: usize) -> Hamiltonian {
    let relabel: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    ml_chain(n).permuted(&relabel).expect("7 is coprime to n")
}

pub fn packet(n: usize) -> WavePacket {
    WavePacket::two_site_real(n).expect("n >= 2")
}

pub fn reflection(n: usize) -> SymmetryPermutation {
    mirrorqst::reflection_permutation(n).expect("n >= 2")
}
