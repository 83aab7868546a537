//! Compiling a target graph into bus cycles.
//!
//! One cycle = transfer some register qubits into the bus, let the bus evolve
//! for one inversion time (toggling an edge between every pair of qubits
//! present and mirroring their positions), then withdraw some qubits from
//! their mirrored sites.
//!
//! Iterative protocol, for each vertex `g` in ascending order with forward
//! neighbourhood `F = {v > g : (g, v) not yet built}`:
//!
//! 1. place `g` and `F` in the bus and evolve: edges `g-v` appear for all
//!    `v in F`, and every pair inside `F` is toggled;
//! 2. withdraw `g`, evolve once more: pairs inside `F` are toggled back and the
//!    qubits of `F` return to their original sites, where they are withdrawn.
//!
//! Pairs inside `F` only involve vertices `> g`, which no earlier iteration
//! touched except through such double toggles, so after iteration `g` exactly
//! the edges of `g` are built. Any vertex order works for the same reason.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use rand::seq::SliceRandom;

use super::Graph;
use crate::fermion::mirror_site;
use crate::rng::rng_from_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleMode {
    /// The literal two-cycle-per-vertex protocol.
    Strict,
    /// Strict protocol with the single-cycle shortcuts enabled.
    Optimized,
    /// One two-qubit cycle per edge.
    Edgewise,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMode::Strict => "strict",
            ScheduleMode::Optimized => "optimized",
            ScheduleMode::Edgewise => "edgewise",
        })
    }
}

impl std::str::FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" | "iterative" => Ok(ScheduleMode::Strict),
            "optimized" => Ok(ScheduleMode::Optimized),
            "edgewise" => Ok(ScheduleMode::Edgewise),
            _ => Err(Error::invalid(format!(
                "unknown schedule mode '{s}' (strict | optimized | edgewise)"
            ))),
        }
    }
}

/// A register qubit paired with a bus site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transfer {
    pub qubit: usize,
    pub site: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cycle {
    /// Register -> bus transfers before the evolution.
    pub placements: Vec<Transfer>,
    /// Bus -> register transfers after the evolution.
    pub withdrawals: Vec<Transfer>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub n_vertices: usize,
    pub bus_sites: usize,
    pub mode: ScheduleMode,
    pub cycles: Vec<Cycle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchedulerOptions {
    /// Use a single cycle when the forward neighbourhood has one vertex.
    pub skip_trivial_second_cycle: bool,
    /// Use a single cycle when all pairs among `{g} + F` are unbuilt target
    /// edges.
    pub merge_complete: bool,
    /// Bus length; defaults to `max(2, n)`.
    pub bus_sites: Option<usize>,
    /// Place qubits on random distinct sites instead of `0..m`.
    pub placement_seed: Option<u64>,
}

impl SchedulerOptions {
    pub fn strict() -> Self {
        SchedulerOptions {
            skip_trivial_second_cycle: false,
            merge_complete: false,
            bus_sites: None,
            placement_seed: None,
        }
    }

    pub fn optimized() -> Self {
        SchedulerOptions {
            skip_trivial_second_cycle: true,
            merge_complete: true,
            ..Self::strict()
        }
    }

    pub fn with_bus_sites(mut self, n: usize) -> Self {
        self.bus_sites = Some(n);
        self
    }

    pub fn with_placement_seed(mut self, seed: u64) -> Self {
        self.placement_seed = Some(seed);
        self
    }

    fn mode(&self) -> ScheduleMode {
        if self.skip_trivial_second_cycle || self.merge_complete {
            ScheduleMode::Optimized
        } else {
            ScheduleMode::Strict
        }
    }
}

impl Default for SchedulerOptions {
    fn default() -> Self {
        Self::optimized()
    }
}

impl Schedule {
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Upper bound `2 n` on the number of cycles of the iterative protocol.
    pub fn bound(&self) -> usize {
        2 * self.n_vertices
    }

    /// Largest number of qubits present in the bus during any evolution.
    pub fn max_occupancy(&self) -> usize {
        let mut present = 0usize;
        let mut best = 0;
        for c in &self.cycles {
            present += c.placements.len();
            best = best.max(present);
            present -= c.withdrawals.len().min(present);
        }
        best
    }

    /// Human-readable listing; qubits and sites are 1-based.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "schedule mode={} vertices={} bus_sites={} cycles={} bound={}\n",
            self.mode,
            self.n_vertices,
            self.bus_sites,
            self.cycle_count(),
            self.bound()
        );
        for (i, c) in self.cycles.iter().enumerate() {
            let place: Vec<String> = c
                .placements
                .iter()
                .map(|t| format!("{}->{}", t.qubit + 1, t.site + 1))
                .collect();
            let withdraw: Vec<String> = c
                .withdrawals
                .iter()
                .map(|t| format!("{}->{}", t.site + 1, t.qubit + 1))
                .collect();
            let _ = writeln!(
                s,
                "cycle {}: place [{}] evolve withdraw [{}]",
                i + 1,
                place.join(" "),
                withdraw.join(" ")
            );
        }
        s
    }
}

fn default_bus(n: usize) -> usize {
    n.max(2)
}

/// Compile `g` with the iterative protocol.
pub fn schedule_iterative(g: &Graph, opts: &SchedulerOptions) -> Result<Schedule> {
    let n = g.n_vertices();
    let bus = opts.bus_sites.unwrap_or_else(|| default_bus(n));
    let mut rng = opts.placement_seed.map(rng_from_seed);
    let mut remaining: BTreeSet<(usize, usize)> = g.edges().clone();
    let mut cycles = Vec::new();

    for v in 0..n {
        let forward: Vec<usize> = (v + 1..n).filter(|&u| remaining.contains(&(v, u))).collect();
        if forward.is_empty() {
            continue;
        }
        let group: Vec<usize> = std::iter::once(v).chain(forward.iter().copied()).collect();
        let m = group.len();
        if m > bus {
            return Err(Error::BusCapacity {
                required: m,
                available: bus,
            });
        }
        let mut sites: Vec<usize> = (0..bus).collect();
        match rng.as_mut() {
            Some(r) => {
                sites.shuffle(r);
                sites.truncate(m);
            }
            None => sites.truncate(m),
        }
        let placements: Vec<Transfer> = group
            .iter()
            .zip(&sites)
            .map(|(&qubit, &site)| Transfer { qubit, site })
            .collect();
        let mirrored = |t: &Transfer| Transfer {
            qubit: t.qubit,
            site: mirror_site(t.site, bus),
        };

        let complete = group
            .iter()
            .enumerate()
            .all(|(i, &a)| group[i + 1..].iter().all(|&b| remaining.contains(&(a, b))));
        let single = (opts.merge_complete && complete) || (opts.skip_trivial_second_cycle && forward.len() == 1);

        if single {
            for (i, &a) in group.iter().enumerate() {
                for &b in &group[i + 1..] {
                    remaining.remove(&(a, b));
                }
            }
            cycles.push(Cycle {
                withdrawals: placements.iter().map(mirrored).collect(),
                placements,
            });
        } else {
            for &u in &forward {
                remaining.remove(&(v, u));
            }
            cycles.push(Cycle {
                placements: placements.clone(),
                withdrawals: vec![mirrored(&placements[0])],
            });
            // Two inversions bring the remaining qubits back to their sites.
            cycles.push(Cycle {
                placements: Vec::new(),
                withdrawals: placements[1..].to_vec(),
            });
        }
    }
    debug_assert!(remaining.is_empty());
    Ok(Schedule {
        n_vertices: n,
        bus_sites: bus,
        mode: opts.mode(),
        cycles,
    })
}

/// One two-qubit cycle per edge, using bus sites 0 and 1.
pub fn schedule_edgewise(g: &Graph, bus_sites: usize) -> Result<Schedule> {
    if bus_sites < 2 && g.n_edges() > 0 {
        return Err(Error::BusCapacity {
            required: 2,
            available: bus_sites,
        });
    }
    let cycles = g
        .edges()
        .iter()
        .map(|&(a, b)| Cycle {
            placements: vec![Transfer { qubit: a, site: 0 }, Transfer { qubit: b, site: 1 }],
            withdrawals: vec![
                Transfer {
                    qubit: a,
                    site: mirror_site(0, bus_sites),
                },
                Transfer {
                    qubit: b,
                    site: mirror_site(1, bus_sites),
                },
            ],
        })
        .collect();
    Ok(Schedule {
        n_vertices: g.n_vertices(),
        bus_sites,
        mode: ScheduleMode::Edgewise,
        cycles,
    })
}

/// Tracks where every qubit is while a schedule runs; shared by the classical
/// edge tracker and the state-vector simulation.
#[derive(Debug, Clone)]
pub(crate) struct Occupancy {
    bus_sites: usize,
    site_of: Vec<Option<usize>>,
    occupant: Vec<Option<usize>>,
}

impl Occupancy {
    pub(crate) fn new(n_vertices: usize, bus_sites: usize) -> Self {
        Occupancy {
            bus_sites,
            site_of: vec![None; n_vertices],
            occupant: vec![None; bus_sites],
        }
    }

    pub(crate) fn place(&mut self, cycle: usize, t: Transfer) -> Result<()> {
        if t.qubit >= self.site_of.len() {
            return Err(Error::IndexOutOfRange {
                index: t.qubit,
                len: self.site_of.len(),
            });
        }
        if t.site >= self.bus_sites {
            return Err(Error::BusCapacity {
                required: t.site + 1,
                available: self.bus_sites,
            });
        }
        if let Some(s) = self.site_of[t.qubit] {
            return Err(Error::TransferIntoOccupied {
                cycle,
                what: format!("qubit {} is already in the bus at site {}", t.qubit + 1, s + 1),
            });
        }
        if let Some(q) = self.occupant[t.site] {
            return Err(Error::TransferIntoOccupied {
                cycle,
                what: format!("bus site {} holds qubit {}", t.site + 1, q + 1),
            });
        }
        self.site_of[t.qubit] = Some(t.site);
        self.occupant[t.site] = Some(t.qubit);
        Ok(())
    }

    pub(crate) fn withdraw(&mut self, cycle: usize, t: Transfer) -> Result<()> {
        match self.occupant.get(t.site).copied().flatten() {
            Some(q) if q == t.qubit => {
                self.occupant[t.site] = None;
                self.site_of[q] = None;
                Ok(())
            }
            Some(q) => Err(Error::InconsistentWithdrawal {
                cycle,
                site: t.site,
                what: format!("site holds qubit {}, not {}", q + 1, t.qubit + 1),
            }),
            None => Err(Error::InconsistentWithdrawal {
                cycle,
                site: t.site,
                what: "site is empty".into(),
            }),
        }
    }

    /// Qubits present in the bus, by ascending site.
    pub(crate) fn present(&self) -> Vec<usize> {
        self.occupant.iter().flatten().copied().collect()
    }

    /// Apply the mirror inversion to positions.
    pub(crate) fn invert(&mut self) {
        self.occupant.reverse();
        for (s, q) in self.occupant.iter().enumerate() {
            if let Some(q) = q {
                self.site_of[*q] = Some(s);
            }
        }
    }

    pub(crate) fn bus_is_empty(&self) -> bool {
        self.occupant.iter().all(Option::is_none)
    }

    pub(crate) fn first_occupied(&self) -> Option<usize> {
        self.occupant.iter().position(Option::is_some)
    }
}

/// Classical replay of a schedule: every evolution toggles the edge between
/// each pair of qubits present in the bus. Returns the resulting edge set.
pub fn track_edges(schedule: &Schedule) -> Result<BTreeSet<(usize, usize)>> {
    let mut occ = Occupancy::new(schedule.n_vertices, schedule.bus_sites);
    let mut edges = BTreeSet::new();
    for (ci, cycle) in schedule.cycles.iter().enumerate() {
        for &t in &cycle.placements {
            occ.place(ci, t)?;
        }
        let mut present = occ.present();
        present.sort_unstable();
        for (i, &a) in present.iter().enumerate() {
            for &b in &present[i + 1..] {
                if !edges.remove(&(a, b)) {
                    edges.insert((a, b));
                }
            }
        }
        occ.invert();
        for &t in &cycle.withdrawals {
            occ.withdraw(ci, t)?;
        }
    }
    if let Some(site) = occ.first_occupied() {
        return Err(Error::InconsistentWithdrawal {
            cycle: schedule.cycles.len().saturating_sub(1),
            site,
            what: "qubit left in the bus at the end of the schedule".into(),
        });
    }
    Ok(edges)
}
