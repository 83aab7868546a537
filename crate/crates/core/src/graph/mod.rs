//! Graph-state generation with the bus: scheduling, classical edge tracking,
//! state-vector co-simulation of register and bus, and stabilizer checks.

#[allow(clippy::module_inception)]
mod graph;
mod schedule;
mod simulate;
mod verify;

pub use graph::Graph;
pub use schedule::{
    schedule_edgewise, schedule_iterative, track_edges, Cycle, Schedule, ScheduleMode, SchedulerOptions, Transfer,
};
pub use simulate::{
    simulate_schedule, Engine, SimulationOutcome, CIRCUIT_ENGINE_MAX_QUBITS, HAMILTONIAN_ENGINE_MAX_QUBITS,
};
pub use verify::{verify_graph_state, VerificationReport, STABILIZER_TOLERANCE};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn single_edge_both_engines() {
        let g = Graph::complete(2).unwrap();
        let sch = schedule_iterative(&g, &SchedulerOptions::strict()).unwrap();
        for engine in [Engine::Circuit, Engine::Hamiltonian] {
            let out = simulate_schedule(&g, &sch, engine).unwrap();
            let rep = verify_graph_state(&out.state, &g).unwrap();
            assert!(rep.pass, "{engine}: {rep:?}");
        }
    }

    #[test]
    fn k5_in_one_cycle() {
        let g = Graph::complete(5).unwrap();
        let sch = schedule_iterative(&g, &SchedulerOptions::optimized()).unwrap();
        assert_eq!(sch.cycle_count(), 1);
        let out = simulate_schedule(&g, &sch, Engine::Circuit).unwrap();
        assert!(verify_graph_state(&out.state, &g).unwrap().with_cycle_count(1).pass);
    }

    #[test]
    fn engines_agree_on_random_graphs() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let n = 2 + (rand::Rng::gen_range(&mut rng, 0..3));
            let g = Graph::random(n, 0.6, &mut rng).unwrap();
            let sch = schedule_iterative(&g, &SchedulerOptions::strict().with_bus_sites(4)).unwrap();
            let a = simulate_schedule(&g, &sch, Engine::Circuit).unwrap();
            let b = simulate_schedule(&g, &sch, Engine::Hamiltonian).unwrap();
            assert!(a.state.max_deviation_up_to_phase(&b.state).unwrap() < 1e-8);
            assert!(b.min_bus_vacuum() > 1.0 - 1e-9);
            assert!(verify_graph_state(&b.state, &g).unwrap().pass);
        }
    }

    #[test]
    fn hamiltonian_engine_cap() {
        let g = Graph::complete(8).unwrap();
        let sch = schedule_iterative(&g, &SchedulerOptions::optimized()).unwrap();
        assert!(matches!(
            simulate_schedule(&g, &sch, Engine::Hamiltonian),
            Err(crate::Error::DimensionOverflow { .. })
        ));
    }
}
