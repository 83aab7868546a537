use graphbus::graph::{
    schedule_edgewise, schedule_iterative, simulate_schedule, track_edges, verify_graph_state, Engine, Graph,
    SchedulerOptions,
};
use graphbus::rng::{derive_seed, rng_from_seed};
use proptest::prelude::*;

fn random_graph(n: usize, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let p = 0.2 + 0.6 * ((seed % 7) as f64 / 6.0);
    Graph::random(n, p, &mut rng).unwrap()
}

#[test]
fn two_hundred_random_graphs_strict() {
    for k in 0..200u64 {
        let n = 2 + (k as usize % 5);
        let g = random_graph(n, derive_seed(2024, &[k]));
        let s = schedule_iterative(&g, &SchedulerOptions::strict()).unwrap();
        assert!(s.cycle_count() <= 2 * n);
        assert_eq!(&track_edges(&s).unwrap(), g.edges());
        let out = simulate_schedule(&g, &s, Engine::Circuit).unwrap();
        assert!(out.min_bus_vacuum() > 1.0 - 1e-9);
        let r = verify_graph_state(&out.state, &g).unwrap().with_cycle_count(s.cycle_count());
        assert!(r.pass, "graph {k}: {:?}", g.edges());
    }
}

#[test]
fn optimized_and_edgewise_schedules() {
    for k in 0..60u64 {
        let n = 2 + (k as usize % 5);
        let g = random_graph(n, derive_seed(99, &[k]));
        let opt = schedule_iterative(&g, &SchedulerOptions::optimized()).unwrap();
        let strict = schedule_iterative(&g, &SchedulerOptions::strict()).unwrap();
        assert!(opt.cycle_count() <= strict.cycle_count());
        let edge = schedule_edgewise(&g, n.max(2)).unwrap();
        assert_eq!(edge.cycle_count(), g.n_edges());
        for s in [&opt, &edge] {
            assert_eq!(&track_edges(s).unwrap(), g.edges());
            let out = simulate_schedule(&g, s, Engine::Circuit).unwrap();
            assert!(verify_graph_state(&out.state, &g).unwrap().stabilizers_pass());
        }
    }
}

#[test]
fn complete_graph_in_one_cycle() {
    let g = Graph::complete(5).unwrap();
    let s = schedule_iterative(&g, &SchedulerOptions::optimized()).unwrap();
    assert_eq!(s.cycle_count(), 1);
    for engine in [Engine::Circuit, Engine::Hamiltonian] {
        let out = simulate_schedule(&g, &s, engine).unwrap();
        assert!(verify_graph_state(&out.state, &g).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_agree(n in 2usize..=6, seed in any::<u64>(), strict in any::<bool>()) {
        let g = random_graph(n, seed);
        let opts = if strict { SchedulerOptions::strict() } else { SchedulerOptions::optimized() };
        let s = schedule_iterative(&g, &opts).unwrap();
        let a = simulate_schedule(&g, &s, Engine::Circuit).unwrap();
        let b = simulate_schedule(&g, &s, Engine::Hamiltonian).unwrap();
        prop_assert!(a.state.max_deviation_up_to_phase(&b.state).unwrap() < 1e-8);
        prop_assert!(b.min_bus_vacuum() > 1.0 - 1e-9);
    }

    #[test]
    fn placement_does_not_matter(n in 2usize..=6, seed in any::<u64>(), place in any::<u64>(), extra in 0usize..3) {
        let g = random_graph(n, seed);
        let base = SchedulerOptions::strict().with_bus_sites(n.max(2) + extra);
        let s0 = schedule_iterative(&g, &base).unwrap();
        let s1 = schedule_iterative(&g, &base.with_placement_seed(place)).unwrap();
        let a = simulate_schedule(&g, &s0, Engine::Circuit).unwrap();
        let b = simulate_schedule(&g, &s1, Engine::Circuit).unwrap();
        prop_assert_eq!(a.state, b.state);
    }

    #[test]
    fn text_format_round_trips(n in 1usize..=9, seed in any::<u64>()) {
        let g = random_graph(n, seed);
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }
}
