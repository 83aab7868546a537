//! Two-species Bose-Hubbard lattice in the Mott regime, propagated exactly in
//! a truncated Fock basis, as a check of the effective spin-chain bus.

mod basis;
mod config;
mod experiment;
mod hamiltonian;
mod noise;

pub use basis::{basis_dimension, local_states, BosonicBasis, LocalState};
pub use config::{BhmConfig, DEFAULT_DIM_CAP};
pub use experiment::{
    hardcore_reference_fidelity, hardcore_spin_params, ideal_target, initial_qubit_state, run_fidelity_detailed,
    run_fidelity_point, run_noise_sweep, summarize, FidelityRecord, FidelityRun, PointSummary, RunDiagnostics,
    BHM_KRYLOV_TOL, QUBIT_ONE, QUBIT_ZERO,
};
pub use hamiltonian::{enumerate_basis, spin_couplings_from_bhm, BhmCouplings, BhmHamiltonian, BhmStructure, Species};
pub use noise::{
    couplings_from_depth, sample_noise, DepthCalibration, DepthTrajectory, NoiseConfig, NoiseModel,
    DEFAULT_BASE_DEPTH, DEFAULT_CORRELATION_FRACTION, DEFAULT_UPDATE_FRACTION,
};
