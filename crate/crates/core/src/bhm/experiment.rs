use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use serde::Serialize;

use super::basis::BosonicBasis;
use super::config::BhmConfig;
use super::hamiltonian::{enumerate_basis, BhmCouplings, BhmStructure};
use super::noise::{couplings_from_depth, sample_noise, DepthCalibration, NoiseConfig};
use crate::krylov::{expm_multiply, KrylovOptions, KrylovStats};
use crate::qubit::{
    evolve, fidelity, fidelity_embedded, partial_trace, reduce_entries, DensityMatrix, PureState, SpinChainParams,
    SpinHamiltonian,
};
use crate::rng::derive_seed;
use crate::{Error, Result, C64};

/// Per-step Krylov tolerance for lattice propagation.
pub const BHM_KRYLOV_TOL: f64 = 1e-9;

/// Local state of a qubit `|0>`: one `b` atom.
pub const QUBIT_ZERO: (u8, u8) = (0, 1);
/// Local state of a qubit `|1>`: one `a` atom.
pub const QUBIT_ONE: (u8, u8) = (1, 0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityRecord {
    pub u_over_t: f64,
    pub delta_pct: f64,
    pub seed: u64,
    pub fidelity: f64,
    pub tau: f64,
    pub n_max: usize,
    pub basis_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunDiagnostics {
    /// `| |psi(tau)| - 1 |`.
    pub norm_error: f64,
    /// Largest change of any `N_a` sector population.
    pub sector_drift: f64,
    /// Relative `<H>` drift; only defined without noise.
    pub energy_drift: Option<f64>,
    pub segments: usize,
    pub krylov: KrylovStats,
}

#[derive(Debug, Clone)]
pub struct FidelityRun {
    pub record: FidelityRecord,
    pub diagnostics: RunDiagnostics,
    /// Reduced state of the two end sites over the truncated local spaces.
    pub end_state: DensityMatrix,
}

/// `|+> (x) |0>^{N-2} (x) |+>` as qubits.
pub fn initial_qubit_state(n_sites: usize) -> Result<PureState> {
    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let plus = [C64::new(FRAC_1_SQRT_2, 0.0); 2];
    let mut factors = vec![zero; n_sites];
    factors[0] = plus;
    factors[n_sites - 1] = plus;
    PureState::product(&factors)
}

/// End-site target of the ideal resonant XY chain: evolve the initial state
/// for one inversion time and take the dominant eigenvector of the reduced
/// state of sites `0` and `N - 1`. Also returns its weight (the purity proxy).
pub fn ideal_target(config: &BhmConfig) -> Result<(PureState, f64)> {
    config.validate()?;
    let chain = config.ideal_chain()?;
    let h = SpinHamiltonian::new(SpinChainParams::from_chain(&chain))?;
    let psi = evolve(&initial_qubit_state(config.n_sites)?, &h, config.tau())?;
    partial_trace(&psi, &[0, config.n_sites - 1])?.principal_state()
}

fn initial_lattice_state(basis: &BosonicBasis) -> Result<Vec<C64>> {
    let n = basis.n_sites();
    let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
    for (first, last) in [(QUBIT_ZERO, QUBIT_ZERO), (QUBIT_ZERO, QUBIT_ONE), (QUBIT_ONE, QUBIT_ZERO), (QUBIT_ONE, QUBIT_ONE)] {
        let mut sites = vec![QUBIT_ZERO; n];
        sites[0] = first;
        sites[n - 1] = last;
        let idx = basis
            .index_of(&sites)
            .ok_or_else(|| Error::invalid("initial product state lies outside the basis"))?;
        v[idx] = C64::new(0.5, 0.0);
    }
    Ok(v)
}

fn end_site_density(basis: &BosonicBasis, psi: &[C64]) -> DensityMatrix {
    let n = basis.n_sites();
    let l = basis.local_dim();
    let entries = psi.iter().enumerate().map(|(i, &a)| {
        let key = basis.key(i);
        let d0 = basis.digit(key, 0);
        let dl = basis.digit(key, n - 1);
        let rest = key - d0 as u64 * basis.place_value(0) - dl as u64 * basis.place_value(n - 1);
        (d0 * l + dl, rest, a)
    });
    reduce_entries(vec![l, l], entries)
}

fn sector_populations(basis: &BosonicBasis, psi: &[C64]) -> Vec<f64> {
    let mut p = vec![0.0; basis.n_atoms() + 1];
    for (i, a) in psi.iter().enumerate() {
        p[basis.species_counts(i).0] += a.norm_sqr();
    }
    p
}

/// Lattice couplings for depths `(s_a, s_b)`; profile and field fixed.
fn noisy_couplings(config: &BhmConfig, s_a: f64, s_b: f64, s0: f64) -> Result<BhmCouplings> {
    let cal = DepthCalibration {
        t0: config.hop_scale,
        u0: config.interaction,
        s0,
    };
    let (ta, ua) = couplings_from_depth(s_a, &cal)?;
    let (tb, ub) = couplings_from_depth(s_b, &cal)?;
    let (_, umean) = couplings_from_depth(0.5 * (s_a + s_b), &cal)?;
    let alpha = config.profile();
    Ok(BhmCouplings {
        t_a: alpha.iter().map(|a| ta * a.sqrt()).collect(),
        t_b: alpha.iter().map(|a| tb * a.sqrt()).collect(),
        u_a: ua,
        u_b: ub,
        u_ab: umean / 2.0,
        field: config.field_value(),
    })
}

/// Full lattice run with diagnostics.
pub fn run_fidelity_detailed(config: &BhmConfig, noise: &NoiseConfig) -> Result<FidelityRun> {
    let basis = enumerate_basis(config)?;
    let structure = BhmStructure::new(basis);
    let (target, _) = ideal_target(config)?;
    run_with_structure(config, noise, &structure, &target)
}

fn run_with_structure(
    config: &BhmConfig,
    noise: &NoiseConfig,
    structure: &BhmStructure,
    target: &PureState,
) -> Result<FidelityRun> {
    let basis = structure.basis();
    let tau = config.tau();
    let opts = KrylovOptions {
        tol: BHM_KRYLOV_TOL,
        ..KrylovOptions::default()
    };
    let psi0 = initial_lattice_state(basis)?;
    let pops0 = sector_populations(basis, &psi0);
    let mut stats = KrylovStats::default();
    let (psi, energy_drift, segments) = if noise.is_noiseless() {
        noise.resolve(tau)?;
        let h = structure.hamiltonian(&BhmCouplings::ideal(config))?;
        let e0 = h.expectation(&psi0);
        let (psi, s) = expm_multiply(&h, &psi0, tau, &opts)?;
        stats.merge(s);
        let e1 = h.expectation(&psi);
        (psi, Some((e1 - e0).abs() / e0.abs().max(1e-300)), 1)
    } else {
        let traj = sample_noise(noise, tau)?;
        let mut psi = psi0.clone();
        for k in 0..traj.segments() {
            let c = noisy_couplings(config, traj.depth_a[k], traj.depth_b[k], noise.base_depth)?;
            let h = structure.hamiltonian(&c)?;
            let (next, s) = expm_multiply(&h, &psi, traj.segment_length(k), &opts)?;
            stats.merge(s);
            psi = next;
        }
        (psi, None, traj.segments())
    };
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let pops1 = sector_populations(basis, &psi);
    let sector_drift = pops0
        .iter()
        .zip(&pops1)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    let rho = end_site_density(basis, &psi);
    let zero = basis.local_index(QUBIT_ZERO).expect("b atom state");
    let one = basis.local_index(QUBIT_ONE).expect("a atom state");
    let f = fidelity_embedded(&rho, target, [zero, one])?;
    if !(-1e-9..=1.0 + 1e-9).contains(&f) {
        return Err(Error::NumericalFailure(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(FidelityRun {
        record: FidelityRecord {
            u_over_t: config.u_over_t(),
            delta_pct: noise.delta * 100.0,
            seed: noise.seed,
            fidelity: f,
            tau,
            n_max: config.n_max,
            basis_dim: basis.dim(),
        },
        diagnostics: RunDiagnostics {
            norm_error: (norm - 1.0).abs(),
            sector_drift,
            energy_drift,
            segments,
            krylov: stats,
        },
        end_state: rho,
    })
}

/// Evolve the lattice for one inversion time and score the end-site state
/// against the ideal spin-chain target.
pub fn run_fidelity_point(config: &BhmConfig, noise: &NoiseConfig) -> Result<FidelityRecord> {
    run_fidelity_detailed(config, noise).map(|r| r.record)
}

/// Spin model seen by a hardcore (`n_max = 1`) lattice: hopping is projected
/// out entirely, leaving the uniform field `B / 2`.
pub fn hardcore_spin_params(config: &BhmConfig) -> Result<SpinChainParams> {
    let n = config.n_sites;
    SpinChainParams::new(vec![0.0; n - 1], vec![config.field_value() / 2.0; n], vec![0.0; n - 1])
}

/// Fidelity obtained by running the hardcore spin model through the qubit
/// simulator instead of the lattice.
pub fn hardcore_reference_fidelity(config: &BhmConfig) -> Result<f64> {
    let h = SpinHamiltonian::new(hardcore_spin_params(config)?)?;
    let psi = evolve(&initial_qubit_state(config.n_sites)?, &h, config.tau())?;
    let rho = partial_trace(&psi, &[0, config.n_sites - 1])?;
    fidelity(&rho, &ideal_target(config)?.0)
}

/// One record per `(u_over_t, delta, seed)`, ordered by those keys ascending.
///
/// `deltas` are fractions. Each realization's noise seed is derived from the
/// listed seed and `u_over_t`, so different noise strengths at the same point
/// share their underlying random sequence.
pub fn run_noise_sweep(
    base: &BhmConfig,
    noise: &NoiseConfig,
    u_over_t: &[f64],
    deltas: &[f64],
    seeds: &[u64],
) -> Result<Vec<FidelityRecord>> {
    base.validate()?;
    if u_over_t.is_empty() || deltas.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("sweep lists must be nonempty"));
    }
    let sorted = |v: &[f64]| -> Result<Vec<f64>> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("sweep values must be finite"));
        }
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    };
    let us = sorted(u_over_t)?;
    let ds = sorted(deltas)?;
    let mut ss = seeds.to_vec();
    ss.sort_unstable();
    ss.dedup();

    let structure = BhmStructure::new(enumerate_basis(base)?);
    let targets = us
        .par_iter()
        .map(|&u| {
            let cfg = BhmConfig {
                interaction: u * base.hop_scale,
                ..base.clone()
            };
            ideal_target(&cfg).map(|(t, _)| (cfg, t))
        })
        .collect::<Result<Vec<_>>>()?;

    // Noiseless points are computed once and shared by all seeds.
    let jobs: Vec<(usize, f64, Option<u64>)> = (0..us.len())
        .flat_map(|ui| {
            let ss = &ss;
            ds.iter().flat_map(move |&d| {
                if d == 0.0 {
                    vec![(ui, d, None)]
                } else {
                    ss.iter().map(|&s| (ui, d, Some(s))).collect()
                }
            })
        })
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(ui, d, seed)| {
            let (cfg, target) = &targets[ui];
            let nc = NoiseConfig {
                delta: d,
                seed: seed.map_or(0, |s| derive_seed(s, &[cfg.u_over_t().to_bits()])),
                ..noise.clone()
            };
            run_with_structure(cfg, &nc, &structure, target).map(|r| r.record)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(us.len() * ds.len() * ss.len());
    for (job, rec) in jobs.iter().zip(results) {
        match job.2 {
            Some(seed) => out.push(FidelityRecord { seed, ..rec }),
            None => out.extend(ss.iter().map(|&seed| FidelityRecord { seed, ..rec.clone() })),
        }
    }
    Ok(out)
}

/// Mean and spread of the records sharing `(u_over_t, delta_pct)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub u_over_t: f64,
    pub delta_pct: f64,
    pub samples: usize,
    pub mean: f64,
    /// Sample standard deviation (zero for a single sample).
    pub std: f64,
    /// Standard error of the mean.
    pub sem: f64,
}

/// Group consecutive records with equal `(u_over_t, delta_pct)`.
pub fn summarize(records: &[FidelityRecord]) -> Vec<PointSummary> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let key = (records[start].u_over_t, records[start].delta_pct);
        let end = records[start..]
            .iter()
            .position(|r| (r.u_over_t, r.delta_pct) != key)
            .map_or(records.len(), |p| start + p);
        let f: Vec<f64> = records[start..end].iter().map(|r| r.fidelity).collect();
        let n = f.len() as f64;
        let mean = f.iter().sum::<f64>() / n;
        let std = if f.len() > 1 {
            (f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(PointSummary {
            u_over_t: key.0,
            delta_pct: key.1,
            samples: f.len(),
            mean,
            std,
            sem: std / n.sqrt(),
        });
        start = end;
    }
    out
}
