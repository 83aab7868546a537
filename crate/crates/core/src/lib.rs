//! Simulation toolkit for a mirror-inverting XY spin chain used as an
//! entangling bus.
//!
//! The crate is organized bottom-up:
//!
//! - [`fermion`]: free-fermion picture of the bus (coupling profiles,
//!   single-particle propagators, mirror inversion, Fock-state phases).
//! - [`qubit`]: dense state-vector simulator and the spin-chain Hamiltonian,
//!   used as the brute-force oracle for everything else.
//! - [`krylov`]: Lanczos propagation for sparse Hermitian operators.
//! - [`circuit`]: the all-pairs controlled-Z circuit followed by a reversal and
//!   its equivalence with the bus dynamics.
//! - [`graph`]: scheduling of bus cycles that build arbitrary graph states,
//!   plus classical and state-vector verification.
//! - [`bhm`]: two-species Bose-Hubbard validation of the spin-chain mapping,
//!   with stochastic lattice-depth noise.
//!
//! Conventions used throughout: sites, qubits and vertices are 0-based in the
//! API (file formats and the CLI are 1-based). Qubit 0 is the most significant
//! bit of a basis index. The bit value 1 denotes an occupied fermionic mode,
//! spin up (sigma^z = +1), and an `a`-species atom.

pub mod bhm;
pub mod circuit;
pub mod error;
pub mod fermion;
pub mod graph;
pub mod krylov;
pub mod qubit;
pub mod rng;

pub use error::{Error, Result};

/// Complex double used for all amplitudes.
pub type C64 = num_complex::Complex64;
