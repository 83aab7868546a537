//! The anisotropic spin chain
//! `H_s = sum_n lzz_n Z_n Z_{n+1} + sum_n lz_n Z_n - sum_n lxy_n (X_n X_{n+1} + Y_n Y_{n+1})`.
//!
//! Here `Z_n` is the spin operator with eigenvalue +1 on bit 1 (spin up, the
//! occupied mode). The exchange term maps `|..01..> <-> |..10..>` with matrix
//! element `-2 lxy_n` and conserves the Hamming weight, so exact propagation
//! can be done block by block.

use nalgebra::{DMatrix, SymmetricEigen};

use super::PureState;
use crate::fermion::ChainSpec;
use crate::krylov::{expm_multiply, KrylovOptions, KrylovStats, LinearOperator};
use crate::{Error, Result, C64};

/// Largest chain accepted by [`SpinHamiltonian::new`] (sparse path).
pub const SPARSE_MAX_SITES: usize = 20;
/// Largest chain for which [`SpinHamiltonian::to_dense`] is allowed.
pub const DENSE_MAX_SITES: usize = 14;
/// Chains up to this size are propagated by exact eigendecomposition.
pub const EIGEN_MAX_SITES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainParams {
    pub lambda_zz: Vec<f64>,
    pub lambda_z: Vec<f64>,
    pub lambda_xy: Vec<f64>,
}

impl SpinChainParams {
    pub fn new(lambda_zz: Vec<f64>, lambda_z: Vec<f64>, lambda_xy: Vec<f64>) -> Result<Self> {
        let n = lambda_z.len();
        if n == 0 {
            return Err(Error::invalid("spin chain needs at least one site"));
        }
        for (name, len) in [("lambda_zz", lambda_zz.len()), ("lambda_xy", lambda_xy.len())] {
            if len != n - 1 {
                return Err(Error::invalid(format!(
                    "{name} has length {len}, expected {}",
                    n - 1
                )));
            }
        }
        if lambda_zz.iter().chain(&lambda_z).chain(&lambda_xy).any(|x| !x.is_finite()) {
            return Err(Error::invalid("spin couplings must be finite"));
        }
        Ok(SpinChainParams {
            lambda_zz,
            lambda_z,
            lambda_xy,
        })
    }

    /// Spin couplings realizing a fermion chain: `lxy_n = j_n / 2`,
    /// `lz_n = u_n / 2` on every site, `lzz = 0`.
    pub fn from_chain(chain: &ChainSpec) -> Self {
        SpinChainParams {
            lambda_zz: vec![0.0; chain.n_sites() - 1],
            lambda_z: chain.onsite().iter().map(|u| u / 2.0).collect(),
            lambda_xy: chain.couplings().iter().map(|j| j / 2.0).collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.lambda_z.len()
    }
}

/// Sparse representation of the spin Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    params: SpinChainParams,
    diag: Vec<f64>,
}

impl SpinHamiltonian {
    pub fn new(params: SpinChainParams) -> Result<Self> {
        let n = params.n_sites();
        if n > SPARSE_MAX_SITES {
            return Err(Error::DimensionOverflow {
                requested: n,
                cap: SPARSE_MAX_SITES,
            });
        }
        let spin = |idx: usize, s: usize| if (idx >> (n - 1 - s)) & 1 == 1 { 1.0 } else { -1.0 };
        let diag = (0..1usize << n)
            .map(|idx| {
                let z: f64 = (0..n).map(|s| params.lambda_z[s] * spin(idx, s)).sum();
                let zz: f64 = (0..n - 1)
                    .map(|s| params.lambda_zz[s] * spin(idx, s) * spin(idx, s + 1))
                    .sum();
                z + zz
            })
            .collect();
        Ok(SpinHamiltonian { params, diag })
    }

    pub fn params(&self) -> &SpinChainParams {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.params.n_sites()
    }

    /// Nonzero off-diagonal entries `(col -> row, value)` reachable from `idx`.
    fn for_each_hop(&self, idx: usize, mut f: impl FnMut(usize, f64)) {
        let n = self.n_sites();
        for (b, &lxy) in self.params.lambda_xy.iter().enumerate() {
            if lxy == 0.0 {
                continue;
            }
            let pair = 0b11usize << (n - 2 - b);
            let bits = idx & pair;
            if bits != 0 && bits != pair {
                f(idx ^ pair, -2.0 * lxy);
            }
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.n_sites();
        if n > DENSE_MAX_SITES {
            return Err(Error::DimensionOverflow {
                requested: n,
                cap: DENSE_MAX_SITES,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for col in 0..dim {
            m[(col, col)] = C64::new(self.diag[col], 0.0);
            self.for_each_hop(col, |row, v| m[(row, col)] += C64::new(v, 0.0));
        }
        Ok(m)
    }

    /// Real symmetric block of the sector with the given Hamming weight,
    /// together with the basis indices it acts on (ascending).
    pub fn sector_block(&self, weight: usize) -> (Vec<usize>, DMatrix<f64>) {
        let n = self.n_sites();
        let indices: Vec<usize> = (0..1usize << n)
            .filter(|i| i.count_ones() as usize == weight)
            .collect();
        let d = indices.len();
        let mut m = DMatrix::zeros(d, d);
        for (c, &idx) in indices.iter().enumerate() {
            m[(c, c)] = self.diag[idx];
            self.for_each_hop(idx, |to, v| {
                let r = indices.binary_search(&to).expect("hop stays in sector");
                m[(r, c)] += v;
            });
        }
        (indices, m)
    }
}

impl LinearOperator for SpinHamiltonian {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = x[i] * self.diag[i];
            self.for_each_hop(i, |j, v| acc += x[j] * v);
            *yi = acc;
        }
    }
}

/// Exact propagator `exp(-i t H)` stored per Hamming-weight sector.
#[derive(Debug, Clone)]
pub struct SpinPropagator {
    n_sites: usize,
    time: f64,
    blocks: Vec<(Vec<usize>, DMatrix<C64>)>,
}

impl SpinPropagator {
    pub fn new(h: &SpinHamiltonian, t: f64) -> Result<Self> {
        let n = h.n_sites();
        if n > EIGEN_MAX_SITES {
            return Err(Error::DimensionOverflow {
                requested: n,
                cap: EIGEN_MAX_SITES,
            });
        }
        let blocks = (0..=n)
            .map(|w| {
                let (indices, block) = h.sector_block(w);
                let d = indices.len();
                let eig = SymmetricEigen::try_new(block, f64::EPSILON, 10_000).ok_or_else(|| {
                    Error::NumericalFailure(format!("eigendecomposition of sector {w} did not converge"))
                })?;
                let v = &eig.eigenvectors;
                let ph: Vec<C64> = eig
                    .eigenvalues
                    .iter()
                    .map(|&e| C64::from_polar(1.0, -e * t))
                    .collect();
                let u = DMatrix::from_fn(d, d, |r, c| (0..d).map(|k| ph[k] * (v[(r, k)] * v[(c, k)])).sum());
                Ok((indices, u))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpinPropagator {
            n_sites: n,
            time: t,
            blocks,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.n_qubits() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: state.n_qubits(),
            });
        }
        let src = state.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); src.len()];
        for (indices, u) in &self.blocks {
            for (r, &ir) in indices.iter().enumerate() {
                out[ir] = indices.iter().enumerate().map(|(c, &ic)| u[(r, c)] * src[ic]).sum();
            }
        }
        Ok(PureState::from_raw(self.n_sites, out))
    }

    /// Full `2^N x 2^N` matrix.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_sites;
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for (indices, u) in &self.blocks {
            for (r, &ir) in indices.iter().enumerate() {
                for (c, &ic) in indices.iter().enumerate() {
                    m[(ir, ic)] = u[(r, c)];
                }
            }
        }
        m
    }
}

/// How [`evolve`] propagated the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvolveMethod {
    Eigen,
    Krylov(KrylovStats),
}

/// `exp(-i t H) |psi>`: sector eigendecomposition up to
/// [`EIGEN_MAX_SITES`] sites, Lanczos stepping beyond.
pub fn evolve(state: &PureState, h: &SpinHamiltonian, t: f64) -> Result<PureState> {
    evolve_with_method(state, h, t).map(|(s, _)| s)
}

pub fn evolve_with_method(state: &PureState, h: &SpinHamiltonian, t: f64) -> Result<(PureState, EvolveMethod)> {
    if state.n_qubits() != h.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: h.n_sites(),
            found: state.n_qubits(),
        });
    }
    if h.n_sites() <= EIGEN_MAX_SITES {
        let s = SpinPropagator::new(h, t)?.apply(state)?;
        Ok((s, EvolveMethod::Eigen))
    } else {
        let (amps, stats) = expm_multiply(h, state.amplitudes(), t, &KrylovOptions::default())?;
        Ok((PureState::from_raw(state.n_qubits(), amps), EvolveMethod::Krylov(stats)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::ChainSpec;

    #[test]
    fn params_from_chain() {
        let p = SpinChainParams::from_chain(&ChainSpec::angular_momentum(2, 2.0, 0.0).unwrap());
        assert_eq!(p.lambda_xy, vec![0.5]);
        assert_eq!(p.lambda_z, vec![0.0, 0.0]);

        let p = SpinChainParams::from_chain(&ChainSpec::angular_momentum(4, 2.0, 0.0).unwrap());
        let h3 = 3f64.sqrt() / 2.0;
        for (a, b) in p.lambda_xy.iter().zip([h3, 1.0, h3]) {
            assert!((a - b).abs() < 1e-15);
        }

        let p = SpinChainParams::from_chain(&ChainSpec::resonant(6, 1.0).unwrap());
        assert_eq!(p.lambda_z, vec![1.25; 6]);
        assert_eq!(p.lambda_zz, vec![0.0; 5]);
    }

    #[test]
    fn two_site_spectrum() {
        let p = SpinChainParams::new(vec![0.0], vec![0.0, 0.0], vec![1.0]).unwrap();
        let h = SpinHamiltonian::new(p).unwrap().to_dense().unwrap();
        let eig = SymmetricEigen::new(h);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn zero_couplings_give_zero_operator() {
        let p = SpinChainParams::new(vec![0.0; 3], vec![0.0; 4], vec![0.0; 3]).unwrap();
        let h = SpinHamiltonian::new(p).unwrap().to_dense().unwrap();
        assert!(h.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn hermitian_and_commutes_with_magnetization() {
        let p = SpinChainParams::new(vec![0.3, -0.2], vec![0.1, 0.5, -0.7], vec![1.0, 0.4]).unwrap();
        let h = SpinHamiltonian::new(p).unwrap().to_dense().unwrap();
        assert!((&h - h.adjoint()).iter().all(|x| x.norm() < 1e-12));

        let h = SpinHamiltonian::new(SpinChainParams::from_chain(&ChainSpec::resonant(3, 1.0).unwrap()))
            .unwrap()
            .to_dense()
            .unwrap();
        let mz = DMatrix::from_fn(8, 8, |r, c| {
            if r == c { C64::new(2.0 * (r.count_ones() as f64) - 3.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        let comm = &h * &mz - &mz * &h;
        assert!(comm.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn size_caps() {
        let n = SPARSE_MAX_SITES + 1;
        let p = SpinChainParams::new(vec![0.0; n - 1], vec![0.0; n], vec![0.0; n - 1]).unwrap();
        assert!(matches!(SpinHamiltonian::new(p), Err(Error::DimensionOverflow { .. })));
        let n = DENSE_MAX_SITES + 1;
        let p = SpinChainParams::new(vec![0.0; n - 1], vec![0.0; n], vec![0.0; n - 1]).unwrap();
        assert!(SpinHamiltonian::new(p).unwrap().to_dense().is_err());
    }

    #[test]
    fn trivial_evolutions() {
        let h = SpinHamiltonian::new(SpinChainParams::from_chain(&ChainSpec::resonant(4, 1.0).unwrap())).unwrap();
        let psi = PureState::plus(4).unwrap();
        let out = evolve(&psi, &h, 0.0).unwrap();
        assert!(out.max_deviation(&psi).unwrap() < 1e-13);

        let zero = SpinHamiltonian::new(SpinChainParams::new(vec![0.0; 3], vec![0.0; 4], vec![0.0; 3]).unwrap()).unwrap();
        let out = evolve(&psi, &zero, 3.7).unwrap();
        assert!(out.max_deviation(&psi).unwrap() < 1e-13);
    }

    #[test]
    fn single_excitation_is_mirrored() {
        let chain = ChainSpec::resonant(4, 1.0).unwrap();
        let tau = chain.inversion_time().unwrap();
        let h = SpinHamiltonian::new(SpinChainParams::from_chain(&chain)).unwrap();
        let out = evolve(&PureState::from_bits(&[1, 0, 0, 0]).unwrap(), &h, tau).unwrap();
        let target = PureState::from_bits(&[0, 0, 0, 1]).unwrap();
        assert!((out.inner(&target).unwrap().norm() - 1.0).abs() < 1e-10);
        // Spin-level offset exp(i N B tau / 2) = exp(i 3 pi) for N = 4.
        assert!((out.amplitudes()[1] + 1.0).norm() < 1e-10);
    }

    #[test]
    fn krylov_path_matches_eigen_path() {
        let chain = ChainSpec::resonant(11, 0.8).unwrap();
        let h = SpinHamiltonian::new(SpinChainParams::from_chain(&chain)).unwrap();
        let mut psi = PureState::zero(11).unwrap();
        psi.hadamard(0).unwrap();
        psi.hadamard(10).unwrap();
        let tau = chain.inversion_time().unwrap();
        let (out, method) = evolve_with_method(&psi, &h, tau).unwrap();
        assert!(matches!(method, EvolveMethod::Krylov(_)));
        // Only the two end qubits are excited: C(2) then reversal.
        let mut want = psi.clone();
        want.cz(0, 10).unwrap();
        want.reverse(0..11).unwrap();
        assert!(out.max_deviation_up_to_phase(&want).unwrap() < 1e-8);
        assert!((out.norm() - 1.0).abs() < 1e-9);
    }
}
