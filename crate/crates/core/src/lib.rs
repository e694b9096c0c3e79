//! Quantum state transfer in mirror-symmetric tight-binding chains.
//!
//! The crate builds engineered coupling sequences, diagonalises the hopping
//! Hamiltonian, propagates wave packets spectrally, and measures the transfer
//! fidelity together with the mirror mode concurrence of the evolving state.

pub mod chain;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod lab;
pub mod linalg;
pub mod packet;
pub mod spectral;
pub mod spectrum;
pub mod transfer;

pub use chain::{
    build_couplings, build_hamiltonian, check_symmetry, reflection_permutation, ChainSpec,
    CouplingFamily, CouplingSequence, Hamiltonian, SymmetryPermutation,
};
pub use error::{Error, Result};
pub use packet::WavePacket;
pub use spectral::{diagonalize, evolve, parity_labels, propagator, Parity, PropagatorMatrix, SpectralDecomposition};
pub use transfer::{certify_pst, characteristic_time, fidelity_at, scan_transfer_time, PstCertificate};
pub use fock::{enumerate_sector, evolve_fock, sector_hamiltonian, FockBasis, FockState, SectorPropagator};
pub use entanglement::{
    mirror_mode_concurrence, overlap_bound_check, pairwise_concurrence, total_concurrence_general, two_mode_rdm,
    z_correlator, EntanglementRecord, TwoModeRdm,
};
pub use spectrum::{
    closed_form_spectrum, detect_commensurability, parity_pattern_check, pst_spectral_condition,
    CommensurabilityReport, SpectralPstReport, SpectrumModel,
};
