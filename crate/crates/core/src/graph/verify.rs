use super::Graph;
use crate::qubit::PureState;
use crate::{Error, Result};

/// Stabilizer expectations must exceed `1 - STABILIZER_TOLERANCE`.
pub const STABILIZER_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `<K_a>` with `K_a = X_a prod_{b ~ a} Z_b`, one per vertex.
    pub expectations: Vec<f64>,
    /// Probability that every non-vertex qubit reads 0.
    pub ancilla_vacuum: f64,
    pub cycle_count: usize,
    pub bound: usize,
    pub pass: bool,
}

impl VerificationReport {
    pub fn min_expectation(&self) -> f64 {
        self.expectations.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Attach the cycle count of the schedule that produced the state.
    pub fn with_cycle_count(mut self, cycle_count: usize) -> Self {
        self.cycle_count = cycle_count;
        self.pass = self.stabilizers_pass() && cycle_count <= self.bound;
        self
    }

    pub fn stabilizers_pass(&self) -> bool {
        self.expectations.iter().all(|&e| e > 1.0 - STABILIZER_TOLERANCE)
            && self.ancilla_vacuum > 1.0 - STABILIZER_TOLERANCE
    }
}

/// Check that qubits `0..n` of `state` hold the graph state of `g` and every
/// further qubit is `|0>`. The global phase is irrelevant.
pub fn verify_graph_state(state: &PureState, g: &Graph) -> Result<VerificationReport> {
    let n = g.n_vertices();
    if state.n_qubits() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.n_qubits(),
        });
    }
    let expectations = (0..n)
        .map(|a| -> Result<f64> {
            let x = state.site_mask(&[a])?;
            let z = state.site_mask(&g.neighbors(a))?;
            Ok(state.pauli_expectation(x, z))
        })
        .collect::<Result<Vec<f64>>>()?;
    let extra: Vec<usize> = (n..state.n_qubits()).collect();
    let ancilla_vacuum = state.vacuum_probability(&extra)?;
    let report = VerificationReport {
        expectations,
        ancilla_vacuum,
        cycle_count: 0,
        bound: 2 * n,
        pass: false,
    };
    Ok(report.with_cycle_count(0))
}
