use serde_json::json;

use graphbus::bhm::{
    hardcore_reference_fidelity, run_fidelity_detailed, run_fidelity_point, run_noise_sweep, summarize, BhmConfig,
    NoiseConfig, NoiseModel, DEFAULT_BASE_DEPTH, DEFAULT_DIM_CAP,
};
use graphbus::circuit::{equivalence_check, fock_phase_check, random_reduction_trials, MAX_CHECK_QUBITS};
use graphbus::fermion::{resonant_field, transfer_phase, ChainSpec};
use graphbus::graph::{
    schedule_edgewise, schedule_iterative, simulate_schedule, track_edges, verify_graph_state, Engine, Graph,
    ScheduleMode, SchedulerOptions,
};
use graphbus::rng::{derive_seed, rng_from_seed};

use crate::config::{ConfigFile, FloatList, SeedList};
use crate::error::CliError;
use crate::report::Report;
use crate::{GraphArgs, MirrorArgs, QubitArgs, ReductionArgs, SweepArgs, GLOBAL_KEYS};

pub struct Globals {
    pub seed: u64,
}

const MIRROR_MAX_SITES: usize = 64;
const FOCK_MAX_SITES: usize = 8;
const MAGNITUDE_TOLERANCE: f64 = 1e-9;

fn allow(file: &ConfigFile, keys: &[&str]) -> Result<(), CliError> {
    let all: Vec<&str> = GLOBAL_KEYS.iter().chain(keys).copied().collect();
    file.check_keys(&all)
}

fn in_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if v < lo || v > hi {
        return Err(CliError::Invalid(format!("--{name} must lie in {lo}..={hi}, got {v}")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Invalid(format!("--{name} must be positive, got {v}")));
    }
    Ok(())
}

fn chain_args(a: &MirrorArgs, file: &ConfigFile, max_sites: usize) -> Result<(usize, f64, f64), CliError> {
    allow(file, &["sites", "j", "field"])?;
    let sites = file.resolve(a.sites, "sites", 6)?;
    in_range("sites", sites, 2, max_sites)?;
    let j = file.resolve(a.j, "j", 1.0)?;
    positive("j", j)?;
    let field = file
        .resolve_opt(a.field, "field")?
        .unwrap_or_else(|| resonant_field(sites, j));
    if !field.is_finite() {
        return Err(CliError::Invalid("--field must be finite".into()));
    }
    Ok((sites, j, field))
}

pub fn mirror_check(a: &MirrorArgs, file: &ConfigFile, _g: &Globals) -> Result<Report, CliError> {
    let (sites, j, field) = chain_args(a, file, MIRROR_MAX_SITES)?;
    let chain = ChainSpec::angular_momentum(sites, j, field)?;
    let tau = chain.inversion_time()?;
    let prop = chain.propagator(tau)?;
    let mut r = Report::new("mirror-check", vec!["site", "mirror", "magnitude", "phase"]);
    r.set("sites", sites);
    r.set("j", j);
    r.set("field", field);
    r.set("tau", tau);
    let entries = prop.mirror_report();
    let mut max_phase = 0.0f64;
    for e in &entries {
        r.rows
            .push(vec![json!(e.site + 1), json!(e.mirror + 1), json!(e.magnitude), json!(e.phase)]);
        max_phase = max_phase.max(e.phase.abs());
    }
    r.pass = entries.iter().all(|e| e.magnitude > 1.0 - MAGNITUDE_TOLERANCE);
    r.summary("min_magnitude", entries.iter().map(|e| e.magnitude).fold(f64::INFINITY, f64::min));
    r.summary("max_abs_phase", max_phase);
    r.summary("predicted_phase", transfer_phase(&chain));
    r.summary("unitarity_defect", prop.unitarity_defect());
    r.summary("phase_free", max_phase < 1e-9);
    Ok(r)
}

pub fn circuit_equiv(a: &QubitArgs, file: &ConfigFile, _g: &Globals) -> Result<Report, CliError> {
    allow(file, &["qubits"])?;
    let n = file.resolve(a.qubits, "qubits", 5)?;
    in_range("qubits", n, 2, MAX_CHECK_QUBITS)?;
    let rep = equivalence_check(n)?;
    let mut r = Report::new("circuit-equiv", vec!["qubits", "max_deviation", "worst_column", "pass"]);
    r.set("qubits", n);
    let column = format!("{:0width$b}", rep.worst_column, width = n);
    r.rows
        .push(vec![json!(n), json!(rep.max_deviation), json!(column), json!(rep.pass)]);
    r.pass = rep.pass;
    Ok(r)
}

pub fn reduction(a: &ReductionArgs, file: &ConfigFile, g: &Globals) -> Result<Report, CliError> {
    allow(file, &["qubits", "trials"])?;
    let n = file.resolve(a.qubits, "qubits", 5)?;
    in_range("qubits", n, 2, MAX_CHECK_QUBITS)?;
    let trials = file.resolve(a.trials, "trials", 50)?;
    in_range("trials", trials, 1, 100_000)?;
    let reps = random_reduction_trials(n, trials, g.seed)?;
    let mut r = Report::new("reduction", vec!["trial", "occupied", "deviation", "pass"]);
    r.set("qubits", n);
    r.set("trials", trials);
    r.set("seed", g.seed);
    for (k, rep) in reps.iter().enumerate() {
        let occ: Vec<String> = rep.occupied.iter().map(|q| (q + 1).to_string()).collect();
        r.rows
            .push(vec![json!(k + 1), json!(occ.join(" ")), json!(rep.deviation), json!(rep.pass)]);
    }
    r.pass = reps.iter().all(|x| x.pass);
    r.summary("max_deviation", reps.iter().map(|x| x.deviation).fold(0.0, f64::max));
    r.summary("failures", reps.iter().filter(|x| !x.pass).count());
    Ok(r)
}

pub fn fock_check(a: &MirrorArgs, file: &ConfigFile, _g: &Globals) -> Result<Report, CliError> {
    let (sites, j, field) = chain_args(a, file, FOCK_MAX_SITES)?;
    let rep = fock_phase_check(sites, j, field)?;
    let mut r = Report::new(
        "fock-check",
        vec!["sites", "field", "states_checked", "max_deviation", "worst_state", "pass"],
    );
    r.set("sites", sites);
    r.set("j", j);
    r.set("field", field);
    let worst = format!("{:0width$b}", rep.worst_state, width = sites);
    r.rows.push(vec![
        json!(sites),
        json!(field),
        json!(rep.states_checked),
        json!(rep.max_deviation),
        json!(worst),
        json!(rep.pass),
    ]);
    r.pass = rep.pass;
    Ok(r)
}

pub fn graph_run(a: &GraphArgs, file: &ConfigFile, g: &Globals) -> Result<Report, CliError> {
    allow(
        file,
        &["graph", "random", "edge-prob", "mode", "engine", "bus-sites", "random-placement"],
    )?;
    let graph_path: Option<std::path::PathBuf> = file.resolve_opt(a.graph.clone(), "graph")?;
    let random: Option<usize> = file.resolve_opt(a.random, "random")?;
    let edge_prob = file.resolve(a.edge_prob, "edge-prob", 0.5)?;
    let mode = file.resolve(a.mode, "mode", ScheduleMode::Optimized)?;
    let engine = file.resolve(a.engine, "engine", Engine::Circuit)?;
    let bus_sites: Option<usize> = file.resolve_opt(a.bus_sites, "bus-sites")?;
    let random_placement = file.resolve(a.random_placement.then_some(true), "random-placement", false)?;

    let (graph, source) = match (graph_path, random) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::Invalid(format!("cannot read graph {}: {e}", p.display())))?;
            (Graph::parse(&text)?, p.display().to_string())
        }
        (None, Some(n)) => {
            in_range("random", n, 1, 64)?;
            if !(0.0..=1.0).contains(&edge_prob) {
                return Err(CliError::Invalid(format!("--edge-prob must lie in [0, 1], got {edge_prob}")));
            }
            let mut rng = rng_from_seed(derive_seed(g.seed, &[0]));
            (Graph::random(n, edge_prob, &mut rng)?, format!("random n={n} p={edge_prob}"))
        }
        (Some(_), Some(_)) => return Err(CliError::Invalid("give either --graph or --random".into())),
        (None, None) => return Err(CliError::Invalid("one of --graph or --random is required".into())),
    };
    let n = graph.n_vertices();
    let bus = bus_sites.unwrap_or(n.max(2));
    let schedule = match mode {
        ScheduleMode::Edgewise => schedule_edgewise(&graph, bus)?,
        m => {
            let mut opts = if m == ScheduleMode::Strict {
                SchedulerOptions::strict()
            } else {
                SchedulerOptions::optimized()
            };
            opts = opts.with_bus_sites(bus);
            if random_placement {
                opts = opts.with_placement_seed(derive_seed(g.seed, &[1]));
            }
            schedule_iterative(&graph, &opts)?
        }
    };
    let tracked = track_edges(&schedule)?;
    let outcome = simulate_schedule(&graph, &schedule, engine)?;
    let verification = verify_graph_state(&outcome.state, &graph)?.with_cycle_count(schedule.cycle_count());

    let mut r = Report::new("graph-run", vec!["vertex", "neighbors", "stabilizer"]);
    r.set("graph", &source);
    r.set("mode", mode);
    r.set("engine", engine);
    r.set("bus_sites", bus);
    r.set("random_placement", random_placement);
    r.set("seed", g.seed);
    for (v, e) in verification.expectations.iter().enumerate() {
        let nb: Vec<String> = graph.neighbors(v).iter().map(|u| (u + 1).to_string()).collect();
        r.rows.push(vec![json!(v + 1), json!(nb.join(" ")), json!(e)]);
    }
    r.notes.extend(schedule.to_text().lines().map(str::to_string));
    let edges_match = &tracked == graph.edges();
    r.summary("vertices", n);
    r.summary("edges", graph.n_edges());
    r.summary("cycles", schedule.cycle_count());
    r.summary("bound", schedule.bound());
    r.summary("edges_tracked", edges_match);
    r.summary("min_stabilizer", verification.min_expectation());
    r.summary("ancilla_vacuum", verification.ancilla_vacuum);
    r.summary("min_bus_vacuum", outcome.min_bus_vacuum());
    r.pass = verification.pass && edges_match;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Fidelity,
    Noise,
}

pub fn sweep(a: &SweepArgs, file: &ConfigFile, g: &Globals, kind: SweepKind) -> Result<Report, CliError> {
    allow(
        file,
        &[
            "sites",
            "u-over-t",
            "delta",
            "seeds",
            "n-max",
            "noise-model",
            "correlation-time",
            "update-interval",
            "base-depth",
            "dim-cap",
        ],
    )?;
    let (u_default, d_default, s_default) = match kind {
        SweepKind::Fidelity => (vec![26.0], vec![0.0], vec![g.seed]),
        SweepKind::Noise => (
            (4..=15).map(|k| 2.0 * k as f64).collect(),
            vec![0.0, 1.0, 5.0],
            (1..=10).collect(),
        ),
    };
    let sites = file.resolve(a.sites, "sites", 6)?;
    in_range("sites", sites, 2, 16)?;
    let us = file.resolve(a.u_over_t.clone(), "u-over-t", FloatList(u_default))?.0;
    let deltas_pct = file.resolve(a.delta.clone(), "delta", FloatList(d_default))?.0;
    let seeds = file.resolve(a.seeds.clone(), "seeds", SeedList(s_default))?.0;
    let n_max = file.resolve(a.n_max, "n-max", 2)?;
    in_range("n-max", n_max, 1, 8)?;
    let model = file.resolve(a.noise_model, "noise-model", NoiseModel::OrnsteinUhlenbeck)?;
    let corr: Option<f64> = file.resolve_opt(a.correlation_time, "correlation-time")?;
    let update: Option<f64> = file.resolve_opt(a.update_interval, "update-interval")?;
    let base_depth = file.resolve(a.base_depth, "base-depth", DEFAULT_BASE_DEPTH)?;
    let dim_cap = file.resolve(a.dim_cap, "dim-cap", DEFAULT_DIM_CAP)?;

    if us.is_empty() || deltas_pct.is_empty() || seeds.is_empty() {
        return Err(CliError::Invalid("sweep lists must be nonempty".into()));
    }
    for &u in &us {
        positive("u-over-t", u)?;
    }
    for &d in &deltas_pct {
        if !(0.0..50.0).contains(&d) {
            return Err(CliError::Invalid(format!("--delta is a percentage in [0, 50), got {d}")));
        }
    }
    positive("base-depth", base_depth)?;
    for (name, v) in [("correlation-time", corr), ("update-interval", update)] {
        if let Some(v) = v {
            positive(name, v)?;
        }
    }

    let base = BhmConfig {
        n_sites: sites,
        n_max,
        dim_cap,
        ..BhmConfig::default()
    };
    let noise = NoiseConfig {
        base_depth,
        correlation_time: corr,
        update_interval: update,
        model,
        ..NoiseConfig::noiseless()
    };
    let deltas: Vec<f64> = deltas_pct.iter().map(|d| d / 100.0).collect();
    let records = run_noise_sweep(&base, &noise, &us, &deltas, &seeds)?;

    let command = match kind {
        SweepKind::Fidelity => "fidelity-sweep",
        SweepKind::Noise => "noise-sweep",
    };
    let mut r = Report::new(
        command,
        vec!["u_over_t", "delta_pct", "seed", "fidelity", "tau", "n_max", "basis_dim"],
    );
    let join_f = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    r.set("sites", sites);
    r.set("u_over_t", join_f(&us));
    r.set("delta_pct", join_f(&deltas_pct));
    r.set("seeds", seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    r.set("n_max", n_max);
    r.set("noise_model", model);
    r.set(
        "correlation_time",
        corr.map_or_else(|| "tau/100".to_string(), |v| v.to_string()),
    );
    r.set(
        "update_interval",
        update.map_or_else(|| "tau/1000".to_string(), |v| v.to_string()),
    );
    r.set("base_depth", base_depth);
    r.set("dim_cap", dim_cap);
    for rec in &records {
        r.rows.push(vec![
            json!(rec.u_over_t),
            json!(rec.delta_pct),
            json!(rec.seed),
            json!(rec.fidelity),
            json!(rec.tau),
            json!(rec.n_max),
            json!(rec.basis_dim),
        ]);
    }
    for p in summarize(&records) {
        r.notes.push(format!(
            "point u_over_t={} delta_pct={} samples={} mean={} std={} sem={}",
            p.u_over_t, p.delta_pct, p.samples, p.mean, p.std, p.sem
        ));
    }
    Ok(r)
}

pub fn selftest(file: &ConfigFile, _g: &Globals) -> Result<Report, CliError> {
    allow(file, &[])?;
    let mut r = Report::new("selftest", vec!["check", "detail", "pass"]);
    let mut add = |name: &str, detail: String, pass: bool| {
        r.rows.push(vec![json!(name), json!(detail), json!(pass)]);
    };

    let mut worst = 0.0f64;
    for n in 2..=16 {
        let chain = ChainSpec::resonant(n, 1.0)?;
        let prop = chain.propagator(chain.inversion_time()?)?;
        for e in prop.mirror_report() {
            worst = worst.max((e.magnitude - 1.0).abs()).max(e.phase.abs());
        }
    }
    add("mirror-inversion", format!("N=2..16 max error {worst:e}"), worst < 1e-9);

    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 2..=6 {
        let rep = fock_phase_check(n, 1.0, resonant_field(n, 1.0))?;
        worst = worst.max(rep.max_deviation);
        ok &= rep.pass;
    }
    add("fock-phase-law", format!("N=2..6 max deviation {worst:e}"), ok);

    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 2..=6 {
        let rep = equivalence_check(n)?;
        worst = worst.max(rep.max_deviation);
        ok &= rep.pass;
    }
    add("circuit-equivalence", format!("N=2..6 max deviation {worst:e}"), ok);

    let reps = random_reduction_trials(5, 20, 1)?;
    add(
        "reduction",
        format!("N=5, {} trials", reps.len()),
        reps.iter().all(|x| x.pass),
    );

    let k5 = Graph::complete(5)?;
    let s = schedule_iterative(&k5, &SchedulerOptions::optimized())?;
    let out = simulate_schedule(&k5, &s, Engine::Hamiltonian)?;
    let v = verify_graph_state(&out.state, &k5)?.with_cycle_count(s.cycle_count());
    add("complete-graph", format!("K5 in {} cycle(s)", s.cycle_count()), v.pass && s.cycle_count() == 1);

    let mut ok = true;
    for k in 0..20u64 {
        let mut rng = rng_from_seed(derive_seed(5, &[k]));
        let graph = Graph::random(2 + (k as usize % 5), 0.5, &mut rng)?;
        let s = schedule_iterative(&graph, &SchedulerOptions::strict())?;
        let out = simulate_schedule(&graph, &s, Engine::Circuit)?;
        let v = verify_graph_state(&out.state, &graph)?.with_cycle_count(s.cycle_count());
        ok &= v.pass && &track_edges(&s)? == graph.edges();
    }
    add("random-graphs", "20 graphs, strict schedules".into(), ok);

    let hc = BhmConfig::new(4, 26.0).with_n_max(1);
    let lattice = run_fidelity_point(&hc, &NoiseConfig::noiseless())?.fidelity;
    let spin = hardcore_reference_fidelity(&hc)?;
    add(
        "hardcore-lattice",
        format!("N=4 lattice {lattice:.12} vs spin {spin:.12}"),
        (lattice - spin).abs() < 1e-8,
    );

    let run = run_fidelity_detailed(&BhmConfig::new(3, 20.0), &NoiseConfig::noiseless())?;
    let d = run.diagnostics;
    add(
        "lattice-conservation",
        format!(
            "N=3 norm {:.1e} sectors {:.1e} energy {:.1e}",
            d.norm_error,
            d.sector_drift,
            d.energy_drift.unwrap_or(f64::NAN)
        ),
        d.norm_error < 1e-8 && d.sector_drift < 1e-8 && d.energy_drift.is_some_and(|e| e < 1e-7),
    );

    r.pass = r.rows.iter().all(|row| row[2] == json!(true));
    let passed = r.rows.iter().filter(|row| row[2] == json!(true)).count();
    r.summary("passed", passed);
    r.summary("total", r.rows.len());
    Ok(r)
}
