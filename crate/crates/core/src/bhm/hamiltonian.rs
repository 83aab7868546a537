use nalgebra::DMatrix;
use rayon::prelude::*;

use super::basis::BosonicBasis;
use super::config::BhmConfig;
use crate::krylov::LinearOperator;
use crate::qubit::SpinChainParams;
use crate::{Error, Result, C64};

/// Instantaneous Bose-Hubbard parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BhmCouplings {
    /// Per-bond hopping of species `a`, length `N - 1`.
    pub t_a: Vec<f64>,
    pub t_b: Vec<f64>,
    pub u_a: f64,
    pub u_b: f64,
    pub u_ab: f64,
    pub field: f64,
}

impl BhmCouplings {
    /// The engineered, noiseless couplings of `config`.
    pub fn ideal(config: &BhmConfig) -> Self {
        let t = config.hoppings();
        BhmCouplings {
            t_a: t.clone(),
            t_b: t,
            u_a: config.interaction,
            u_b: config.interaction,
            u_ab: config.interaction / 2.0,
            field: config.field_value(),
        }
    }

    fn validate(&self, n_bonds: usize) -> Result<()> {
        if self.t_a.len() != n_bonds || self.t_b.len() != n_bonds {
            return Err(Error::DimensionMismatch {
                expected: n_bonds,
                found: if self.t_a.len() != n_bonds { self.t_a.len() } else { self.t_b.len() },
            });
        }
        let scalars = [self.u_a, self.u_b, self.u_ab, self.field];
        if self.t_a.iter().chain(&self.t_b).chain(&scalars).any(|x| !x.is_finite()) {
            return Err(Error::invalid("Bose-Hubbard couplings must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    A,
    B,
}

/// Coupling-independent structure of the lattice Hamiltonian.
///
/// Off-diagonal entries are stored row-wise (CSR) as `(column, bond, species,
/// bosonic factor)`; diagonal contributions as per-state operator sums. A
/// concrete Hamiltonian only rescales these.
#[derive(Debug, Clone)]
pub struct BhmStructure {
    basis: BosonicBasis,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    bonds: Vec<u16>,
    species: Vec<Species>,
    factors: Vec<f64>,
    /// `sum_n n_a (n_a - 1) / 2`.
    pairs_a: Vec<f64>,
    pairs_b: Vec<f64>,
    /// `sum_n n_a n_b`.
    cross: Vec<f64>,
    /// `sum_n (n_a - n_b) / 2`.
    magnetization: Vec<f64>,
}

impl BhmStructure {
    pub fn new(basis: BosonicBasis) -> Self {
        let n = basis.n_sites();
        let n_max = basis.n_max() as u8;
        let local = basis.local_states().to_vec();
        let idx = |s: (u8, u8)| basis.local_index(s).expect("local state within cap") as u64;

        let rows: Vec<Vec<(u32, u16, Species, f64)>> = (0..basis.dim())
            .into_par_iter()
            .map(|row| {
                let key = basis.key(row);
                let mut out = Vec::new();
                for bond in 0..n.saturating_sub(1) {
                    let (l, r) = (bond, bond + 1);
                    let dl = basis.digit(key, l);
                    let dr = basis.digit(key, r);
                    let (sl, sr) = (local[dl], local[dr]);
                    for sp in [Species::A, Species::B] {
                        // Apply a^dag_l a_r and a^dag_r a_l to the row state;
                        // by Hermiticity the results give column entries of this row.
                        for (from, to, s_from, s_to) in [(r, l, sr, sl), (l, r, sl, sr)] {
                            let (nf, nt) = match sp {
                                Species::A => (s_from.0, s_to.0),
                                Species::B => (s_from.1, s_to.1),
                            };
                            if nf == 0 || s_to.0 + s_to.1 >= n_max {
                                continue;
                            }
                            let (new_from, new_to) = match sp {
                                Species::A => ((s_from.0 - 1, s_from.1), (s_to.0 + 1, s_to.1)),
                                Species::B => ((s_from.0, s_from.1 - 1), (s_to.0, s_to.1 + 1)),
                            };
                            let pf = basis.place_value(from);
                            let pt = basis.place_value(to);
                            let new_key = key - idx(s_from) * pf - idx(s_to) * pt
                                + idx(new_from) * pf
                                + idx(new_to) * pt;
                            let col = basis
                                .index_of_key(new_key)
                                .expect("hopping stays in the fixed-number basis");
                            let factor = (nf as f64 * (nt as f64 + 1.0)).sqrt();
                            out.push((col as u32, bond as u16, sp, factor));
                        }
                    }
                }
                out.sort_by_key(|e| e.0);
                out
            })
            .collect();

        let mut row_ptr = Vec::with_capacity(basis.dim() + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut bonds = Vec::with_capacity(nnz);
        let mut species = Vec::with_capacity(nnz);
        let mut factors = Vec::with_capacity(nnz);
        for r in rows {
            for (c, b, s, f) in r {
                cols.push(c);
                bonds.push(b);
                species.push(s);
                factors.push(f);
            }
            row_ptr.push(cols.len());
        }

        let dim = basis.dim();
        let (mut pairs_a, mut pairs_b, mut cross, mut magnetization) =
            (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
        for i in 0..dim {
            for (a, b) in basis.site_states(i) {
                let (a, b) = (a as f64, b as f64);
                pairs_a[i] += a * (a - 1.0) / 2.0;
                pairs_b[i] += b * (b - 1.0) / 2.0;
                cross[i] += a * b;
                magnetization[i] += (a - b) / 2.0;
            }
        }
        BhmStructure {
            basis,
            row_ptr,
            cols,
            bonds,
            species,
            factors,
            pairs_a,
            pairs_b,
            cross,
            magnetization,
        }
    }

    pub fn basis(&self) -> &BosonicBasis {
        &self.basis
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Bind concrete couplings.
    pub fn hamiltonian(&self, c: &BhmCouplings) -> Result<BhmHamiltonian<'_>> {
        c.validate(self.basis.n_sites() - 1)?;
        let diag = (0..self.basis.dim())
            .map(|i| {
                c.u_a * self.pairs_a[i]
                    + c.u_b * self.pairs_b[i]
                    + c.u_ab * self.cross[i]
                    + c.field * self.magnetization[i]
            })
            .collect();
        let values = self
            .bonds
            .iter()
            .zip(&self.species)
            .zip(&self.factors)
            .map(|((&b, &s), &f)| {
                let t = match s {
                    Species::A => c.t_a[b as usize],
                    Species::B => c.t_b[b as usize],
                };
                -t * f
            })
            .collect();
        Ok(BhmHamiltonian {
            structure: self,
            diag,
            values,
        })
    }
}

/// Enumerate the unit-filling basis of `config`.
pub fn enumerate_basis(config: &BhmConfig) -> Result<BosonicBasis> {
    config.validate()?;
    BosonicBasis::new(config.n_sites, config.n_max, config.n_sites, config.dim_cap)
}

/// A Bose-Hubbard Hamiltonian with bound couplings, applied matrix-free.
#[derive(Debug, Clone)]
pub struct BhmHamiltonian<'a> {
    structure: &'a BhmStructure,
    diag: Vec<f64>,
    values: Vec<f64>,
}

impl BhmHamiltonian<'_> {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.diag.len();
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for r in 0..dim {
            m[(r, r)] += self.diag[r];
            for k in self.structure.row_ptr[r]..self.structure.row_ptr[r + 1] {
                m[(r, self.structure.cols[k] as usize)] += self.values[k];
            }
        }
        m
    }

    /// `<psi| H |psi>`.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let mut y = vec![C64::new(0.0, 0.0); psi.len()];
        self.apply(psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl LinearOperator for BhmHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let s = self.structure;
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = x[r] * self.diag[r];
            for k in s.row_ptr[r]..s.row_ptr[r + 1] {
                acc += x[s.cols[k] as usize] * self.values[k];
            }
            *yr = acc;
        }
    }
}

/// Second-order spin couplings of a Bose-Hubbard chain, evaluated per bond:
/// `lzz_n = (ta^2 + tb^2) / (2 Uab) - ta^2 / Ua - tb^2 / Ub`,
/// `lz_n = 4 (ta^2 / Ua - tb^2 / Ub) + B / 2`, `lxy_n = ta tb / Uab`.
///
/// The bond-`n` field correction is attached to its left site; the last site
/// carries `B / 2` only.
pub fn spin_couplings_from_bhm(c: &BhmCouplings) -> Result<SpinChainParams> {
    if !(c.u_a > 0.0 && c.u_b > 0.0 && c.u_ab > 0.0) {
        return Err(Error::invalid("interaction energies must be positive"));
    }
    if c.t_a.len() != c.t_b.len() {
        return Err(Error::DimensionMismatch {
            expected: c.t_a.len(),
            found: c.t_b.len(),
        });
    }
    let mut lzz = Vec::with_capacity(c.t_a.len());
    let mut lxy = Vec::with_capacity(c.t_a.len());
    let mut lz = Vec::with_capacity(c.t_a.len() + 1);
    for (&ta, &tb) in c.t_a.iter().zip(&c.t_b) {
        let (a2, b2) = (ta * ta, tb * tb);
        lzz.push((a2 + b2) / (2.0 * c.u_ab) - a2 / c.u_a - b2 / c.u_b);
        lz.push(4.0 * (a2 / c.u_a - b2 / c.u_b) + c.field / 2.0);
        lxy.push(ta * tb / c.u_ab);
    }
    lz.push(c.field / 2.0);
    SpinChainParams::new(lzz, lz, lxy)
}
