//! The circuit `C(N) R`: controlled-Z between every pair of qubits followed by
//! the reversal of the register, and its equivalence with one inversion period
//! of the resonant bus.
//!
//! At the spin level the XY Hamiltonian differs from the fermionic one by the
//! constant `-N B / 2` (from `Z_n = 2 n_n - 1`), so the bus unitary equals
//! `exp(i N (N - 1) pi / 4) C(N) R` exactly.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::fermion::{fock_evolve, ChainSpec, OccupationState};
use crate::qubit::{PureState, SpinChainParams, SpinHamiltonian, SpinPropagator};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result, C64};

/// Largest register for the dense equivalence checks.
pub const MAX_CHECK_QUBITS: usize = 8;

/// Pass threshold on elementwise deviations.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCircuit {
    n_qubits: usize,
    gates: Vec<(usize, usize)>,
    reversal: bool,
}

/// All-pairs controlled-Z in lexicographic order, then the reversal.
pub fn build_circuit(n_qubits: usize) -> Result<PairCircuit> {
    if n_qubits == 0 {
        return Err(Error::invalid("circuit needs at least one qubit"));
    }
    let gates = (0..n_qubits)
        .flat_map(|a| (a + 1..n_qubits).map(move |b| (a, b)))
        .collect();
    Ok(PairCircuit {
        n_qubits,
        gates,
        reversal: true,
    })
}

impl PairCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[(usize, usize)] {
        &self.gates
    }

    pub fn has_reversal(&self) -> bool {
        self.reversal
    }

    /// Same circuit with the gate list permuted.
    pub fn with_gate_order(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.gates.len()];
        if order.len() != self.gates.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::invalid("gate order is not a permutation"));
        }
        Ok(PairCircuit {
            n_qubits: self.n_qubits,
            gates: order.iter().map(|&i| self.gates[i]).collect(),
            reversal: self.reversal,
        })
    }
}

pub fn apply_circuit(state: &PureState, circuit: &PairCircuit) -> Result<PureState> {
    if state.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits,
            found: state.n_qubits(),
        });
    }
    let mut out = state.clone();
    for &(a, b) in &circuit.gates {
        out.cz(a, b)?;
    }
    if circuit.reversal {
        out.reverse(0..circuit.n_qubits)?;
    }
    Ok(out)
}

/// Spin-level global phase `exp(i N B tau / 2)` of the resonant bus relative
/// to `C(N) R`; equals `exp(i N (N - 1) pi / 4)` for any `J`.
pub fn predicted_global_phase(n_qubits: usize, j_scale: f64) -> C64 {
    let b = crate::fermion::resonant_field(n_qubits.max(1), j_scale);
    let tau = PI / j_scale;
    C64::from_polar(1.0, n_qubits as f64 * b * tau / 2.0)
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits < 2 {
        return Err(Error::invalid(format!("need at least 2 qubits, got {n_qubits}")));
    }
    if n_qubits > MAX_CHECK_QUBITS {
        return Err(Error::DimensionOverflow {
            requested: n_qubits,
            cap: MAX_CHECK_QUBITS,
        });
    }
    Ok(())
}

/// Propagator of the resonant bus over one inversion time.
pub fn bus_propagator(n_sites: usize, j_scale: f64) -> Result<SpinPropagator> {
    let chain = ChainSpec::resonant(n_sites, j_scale)?;
    let tau = chain.inversion_time()?;
    let h = SpinHamiltonian::new(SpinChainParams::from_chain(&chain))?;
    SpinPropagator::new(&h, tau)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub n_qubits: usize,
    pub max_deviation: f64,
    /// Basis column where the deviation is largest.
    pub worst_column: usize,
    pub pass: bool,
}

/// Compare the bus propagator column by column against
/// `predicted_global_phase * C(N) R`.
pub fn equivalence_check(n_qubits: usize) -> Result<EquivalenceReport> {
    check_qubits(n_qubits)?;
    let j_scale = 1.0;
    let prop = bus_propagator(n_qubits, j_scale)?;
    let circuit = build_circuit(n_qubits)?;
    let phase = predicted_global_phase(n_qubits, j_scale);
    let deviations = (0..1usize << n_qubits)
        .into_par_iter()
        .map(|col| -> Result<f64> {
            let basis = PureState::basis(n_qubits, col)?;
            let bus = prop.apply(&basis)?;
            let circ = apply_circuit(&basis, &circuit)?;
            Ok(bus
                .amplitudes()
                .iter()
                .zip(circ.amplitudes())
                .map(|(a, c)| (a - phase * c).norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_column, max_deviation) = worst(&deviations);
    Ok(EquivalenceReport {
        n_qubits,
        max_deviation,
        worst_column,
        pass: max_deviation < EQUIVALENCE_TOLERANCE,
    })
}

fn worst(devs: &[f64]) -> (usize, f64) {
    devs.iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, &v)| if v > bv || v.is_nan() { (i, v) } else { (bi, bv) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub n_qubits: usize,
    pub occupied: Vec<usize>,
    pub deviation: f64,
    pub pass: bool,
}

/// Random normalized state on `occupied` with `|0>` on every other qubit.
pub fn random_state_on<R: Rng + ?Sized>(n_qubits: usize, occupied: &[usize], rng: &mut R) -> Result<PureState> {
    let q = occupied.len();
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << n_qubits];
    for local in 0..1usize << q {
        let idx = occupied
            .iter()
            .enumerate()
            .filter(|(j, _)| (local >> (q - 1 - j)) & 1 == 1)
            .map(|(_, &s)| 1usize << (n_qubits - 1 - s))
            .sum::<usize>();
        amps[idx] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    PureState::normalized(n_qubits, amps)
}

/// Bus evolution of `state` (supported on `occupied`, `|0>` elsewhere) against
/// `C(q)` on the occupied qubits followed by the full reversal.
pub fn reduction_check(state: &PureState, occupied: &[usize]) -> Result<ReductionReport> {
    let n = state.n_qubits();
    check_qubits(n)?;
    if occupied.is_empty() {
        return Err(Error::invalid("occupied set must be nonempty"));
    }
    let mut sorted = occupied.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != occupied.len() || sorted.last().is_some_and(|&s| s >= n) {
        return Err(Error::invalid("occupied sites must be distinct and in range"));
    }
    let free: Vec<usize> = (0..n).filter(|s| !sorted.contains(s)).collect();
    if 1.0 - state.vacuum_probability(&free)? > 1e-12 {
        return Err(Error::invalid("state is not |0> outside the occupied sites"));
    }
    let j_scale = 1.0;
    let bus = bus_propagator(n, j_scale)?.apply(state)?;
    let mut expect = state.clone();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            expect.cz(a, b)?;
        }
    }
    expect.reverse(0..n)?;
    let phase = predicted_global_phase(n, j_scale);
    let deviation = bus
        .amplitudes()
        .iter()
        .zip(expect.amplitudes())
        .map(|(a, e)| (a - phase * e).norm())
        .fold(0.0, f64::max);
    Ok(ReductionReport {
        n_qubits: n,
        occupied: sorted,
        deviation,
        pass: deviation < EQUIVALENCE_TOLERANCE,
    })
}

/// `trials` reduction checks on random nonempty subsets and random states.
/// Trial `k` is seeded from `(seed, n_qubits, k)`, so results do not depend on
/// scheduling.
pub fn random_reduction_trials(n_qubits: usize, trials: usize, seed: u64) -> Result<Vec<ReductionReport>> {
    check_qubits(n_qubits)?;
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(seed, &[n_qubits as u64, k as u64]));
            let occupied: Vec<usize> = loop {
                let pick: Vec<usize> = (0..n_qubits).filter(|_| rng.gen_bool(0.5)).collect();
                if !pick.is_empty() {
                    break pick;
                }
            };
            let state = random_state_on(n_qubits, &occupied, &mut rng)?;
            reduction_check(&state, &occupied)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLawReport {
    pub n_sites: usize,
    pub field: f64,
    pub states_checked: usize,
    pub max_deviation: f64,
    pub worst_state: usize,
    pub pass: bool,
}

/// Evolve every occupation basis state with the exact spin propagator and
/// compare against `fock_evolve` times the spin-level offset `exp(i N B tau / 2)`.
pub fn fock_phase_check(n_sites: usize, j_scale: f64, field: f64) -> Result<PhaseLawReport> {
    check_qubits(n_sites)?;
    let chain = ChainSpec::angular_momentum(n_sites, j_scale, field)?;
    let tau = chain.inversion_time()?;
    let h = SpinHamiltonian::new(SpinChainParams::from_chain(&chain))?;
    let prop = SpinPropagator::new(&h, tau)?;
    let offset = C64::from_polar(1.0, n_sites as f64 * field * tau / 2.0);
    let devs = (0..1usize << n_sites)
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let out = prop.apply(&PureState::basis(n_sites, idx)?)?;
            let (target, phase) = fock_evolve(&OccupationState::from_index(idx, n_sites), &chain)?;
            let t = target.index();
            Ok(out
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let want = if i == t { offset * phase } else { C64::new(0.0, 0.0) };
                    (a - want).norm()
                })
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_state, max_deviation) = worst(&devs);
    Ok(PhaseLawReport {
        n_sites,
        field,
        states_checked: devs.len(),
        max_deviation,
        worst_state,
        pass: max_deviation < EQUIVALENCE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn circuit_sizes() {
        let c = build_circuit(1).unwrap();
        assert!(c.gates().is_empty() && c.has_reversal());
        assert_eq!(build_circuit(2).unwrap().gates(), &[(0, 1)]);
        assert_eq!(build_circuit(5).unwrap().gates().len(), 10);
        assert!(build_circuit(0).is_err());
    }

    #[test]
    fn circuit_examples() {
        let c2 = build_circuit(2).unwrap();
        let out = apply_circuit(&PureState::plus(2).unwrap(), &c2).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in out.amplitudes().iter().zip(want) {
            assert!((a - w).norm() < 1e-15);
        }

        let out = apply_circuit(&PureState::from_bits(&[1, 1, 0]).unwrap(), &build_circuit(3).unwrap()).unwrap();
        assert!((out.amplitudes()[0b011] + 1.0).norm() < 1e-15);

        let out = apply_circuit(&PureState::from_bits(&[1; 4]).unwrap(), &build_circuit(4).unwrap()).unwrap();
        assert!((out.amplitudes()[0b1111] - 1.0).norm() < 1e-15);

        let one = PureState::product(&[[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]]).unwrap();
        assert_eq!(apply_circuit(&one, &build_circuit(1).unwrap()).unwrap(), one);
        assert!(apply_circuit(&one, &c2).is_err());
    }

    #[test]
    fn global_phase_values() {
        assert!((predicted_global_phase(2, 1.0) - C64::i()).norm() < 1e-14);
        assert!((predicted_global_phase(4, 2.3) + 1.0).norm() < 1e-13);
        assert!((predicted_global_phase(5, 0.7) + 1.0).norm() < 1e-13);
    }

    #[test]
    fn two_qubit_bus_closed_form() {
        // 4x4 closed form with J = 1, B = 1/2, lxy = 1/4, lz = 1/4, tau = pi:
        // |00> has energy -1/2, |11> has +1/2, and {|01>,|10>} is
        // (-1/2) sigma_x, so exp(-i pi H) = diag(i, [[0, i], [i, 0]], -i).
        let prop = bus_propagator(2, 1.0).unwrap().to_dense();
        let i = C64::i();
        let z = C64::new(0.0, 0.0);
        let want = [[i, z, z, z], [z, z, i, z], [z, i, z, z], [z, z, z, -i]];
        for r in 0..4 {
            for c in 0..4 {
                assert!((prop[(r, c)] - want[r][c]).norm() < 1e-12, "({r},{c}) {}", prop[(r, c)]);
            }
        }
        let rep = equivalence_check(2).unwrap();
        assert!(rep.pass && rep.max_deviation < 1e-10);
    }

    #[test]
    fn equivalence_small() {
        for n in 2..=5 {
            let rep = equivalence_check(n).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
        assert!(matches!(equivalence_check(9), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn reduction_examples() {
        let mut rng = rng_from_seed(1);
        let s = random_state_on(5, &[0, 2, 4], &mut rng).unwrap();
        assert!(reduction_check(&s, &[0, 2, 4]).unwrap().pass);

        // |++> on sites 2,4 (1-based) lands as CZ|++> on the mirrored sites.
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let s = PureState::product(&[[o, z], [h, h], [o, z], [h, h], [o, z]]).unwrap();
        assert!(reduction_check(&s, &[1, 3]).unwrap().pass);
        let out = bus_propagator(5, 1.0).unwrap().apply(&s).unwrap();
        let mut want = s.clone();
        want.cz(1, 3).unwrap();
        assert!(out.max_deviation_up_to_phase(&want).unwrap() < 1e-9);

        let s = PureState::product(&[[o, z], [h, h], [o, z]]).unwrap();
        let rep = reduction_check(&s, &[1]).unwrap();
        assert!(rep.pass);
        let out = bus_propagator(3, 1.0).unwrap().apply(&s).unwrap();
        assert!((out.amplitudes()[0] - predicted_global_phase(3, 1.0) * h).norm() < 1e-10);
        assert!((out.amplitudes()[0b010] - predicted_global_phase(3, 1.0) * h).norm() < 1e-10);
    }

    #[test]
    fn reduction_rejects_leaky_state() {
        let s = PureState::plus(3).unwrap();
        assert!(reduction_check(&s, &[0]).is_err());
        assert!(reduction_check(&s, &[]).is_err());
    }

    #[test]
    fn phase_law_small() {
        let rep = fock_phase_check(3, 1.0, crate::fermion::resonant_field(3, 1.0)).unwrap();
        assert!(rep.pass, "{rep:?}");
        let rep = fock_phase_check(4, 1.7, 0.3).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn trials_are_reproducible() {
        let a = random_reduction_trials(4, 6, 7).unwrap();
        let b = random_reduction_trials(4, 6, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.pass));
    }
}
