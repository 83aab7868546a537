//! Dense state-vector simulation; the brute-force oracle for the rest of the
//! crate.

mod density;
mod spin;
mod state;

pub use density::{fidelity, fidelity_embedded, partial_trace, DensityMatrix};
pub(crate) use density::reduce_entries;
pub use spin::{
    evolve, evolve_with_method, EvolveMethod, SpinChainParams, SpinHamiltonian, SpinPropagator, DENSE_MAX_SITES,
    EIGEN_MAX_SITES, SPARSE_MAX_SITES,
};
pub use state::{PureState, MAX_QUBITS, NORM_TOLERANCE};
