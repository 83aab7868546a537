use std::fmt;

use nalgebra::DMatrix;

use super::schedule::{Occupancy, Schedule};
use super::Graph;
use crate::circuit::bus_propagator;
use crate::qubit::PureState;
use crate::{Error, Result, C64};

/// Register + bus size cap for the Hamiltonian engine.
pub const HAMILTONIAN_ENGINE_MAX_QUBITS: usize = 14;
/// Register + bus size cap for the circuit engine.
pub const CIRCUIT_ENGINE_MAX_QUBITS: usize = 20;

/// How one bus evolution is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// `C(N) R` on the bus qubits.
    Circuit,
    /// Exact resonant XY evolution for one inversion time.
    Hamiltonian,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Circuit => "circuit",
            Engine::Hamiltonian => "hamiltonian",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circuit" => Ok(Engine::Circuit),
            "hamiltonian" => Ok(Engine::Hamiltonian),
            _ => Err(Error::invalid(format!("unknown engine '{s}' (circuit | hamiltonian)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    /// Register qubits `0..n` followed by bus qubits `n..n + bus_sites`.
    pub state: PureState,
    /// Probability of the bus vacuum after every cycle that empties the bus.
    pub bus_vacuum: Vec<f64>,
}

impl SimulationOutcome {
    pub fn min_bus_vacuum(&self) -> f64 {
        self.bus_vacuum.iter().copied().fold(1.0, f64::min)
    }
}

/// Run a schedule on the joint register + bus state vector.
///
/// The register starts in `|0..0>` and every vertex gets a Hadamard; the bus
/// starts empty. Transfers are ideal swaps between a register qubit and a bus
/// site.
pub fn simulate_schedule(g: &Graph, schedule: &Schedule, engine: Engine) -> Result<SimulationOutcome> {
    let n = g.n_vertices();
    if schedule.n_vertices != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: schedule.n_vertices,
        });
    }
    let bus = schedule.bus_sites;
    let total = n + bus;
    let cap = match engine {
        Engine::Circuit => CIRCUIT_ENGINE_MAX_QUBITS,
        Engine::Hamiltonian => HAMILTONIAN_ENGINE_MAX_QUBITS,
    };
    if total > cap {
        return Err(Error::DimensionOverflow {
            requested: total,
            cap,
        });
    }
    let bus_qubits: Vec<usize> = (n..total).collect();
    let bus_unitary: Option<DMatrix<C64>> = match engine {
        Engine::Hamiltonian if bus >= 2 => Some(bus_propagator(bus, 1.0)?.to_dense()),
        _ => None,
    };

    let mut state = PureState::zero(total)?;
    for v in 0..n {
        state.hadamard(v)?;
    }
    let mut occ = Occupancy::new(n, bus);
    let mut bus_vacuum = Vec::new();
    for (ci, cycle) in schedule.cycles.iter().enumerate() {
        for &t in &cycle.placements {
            occ.place(ci, t)?;
            state.swap(t.qubit, n + t.site)?;
        }
        match &bus_unitary {
            Some(u) => state.apply_local(&bus_qubits, u)?,
            None => {
                for (i, &a) in bus_qubits.iter().enumerate() {
                    for &b in &bus_qubits[i + 1..] {
                        state.cz(a, b)?;
                    }
                }
                state.reverse(n..total)?;
            }
        }
        occ.invert();
        for &t in &cycle.withdrawals {
            occ.withdraw(ci, t)?;
            state.swap(n + t.site, t.qubit)?;
        }
        if occ.bus_is_empty() {
            bus_vacuum.push(state.vacuum_probability(&bus_qubits)?);
        }
    }
    if let Some(site) = occ.first_occupied() {
        return Err(Error::InconsistentWithdrawal {
            cycle: schedule.cycles.len().saturating_sub(1),
            site,
            what: "qubit left in the bus at the end of the schedule".into(),
        });
    }
    Ok(SimulationOutcome { state, bus_vacuum })
}
