use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Tolerance on the norm of a [`PureState`] built from raw amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest register handled by the dense simulator.
pub const MAX_QUBITS: usize = 24;

/// Dense state vector over `n_qubits` qubits; qubit 0 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::DimensionOverflow {
            requested: n_qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl PureState {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { n_qubits, amps })
    }

    /// Basis state from a bit string, first entry is qubit 0.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b != 0));
        Self::basis(bits.len(), index)
    }

    /// Product state `(a_0|0> + b_0|1>) (x) (a_1|0> + b_1|1>) (x) ...`; each
    /// factor is normalized.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let n = factors.len();
        check_size(n)?;
        let normed: Vec<[C64; 2]> = factors
            .iter()
            .map(|f| {
                let nrm = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
                [f[0] / nrm, f[1] / nrm]
            })
            .collect();
        let amps = (0..1usize << n)
            .map(|idx| {
                normed
                    .iter()
                    .enumerate()
                    .map(|(q, f)| f[(idx >> (n - 1 - q)) & 1])
                    .product()
            })
            .collect();
        Ok(PureState { n_qubits: n, amps })
    }

    /// `|+>` on every qubit.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::product(&vec![[h, h]; n_qubits])
    }

    /// Wrap raw amplitudes; the norm must be 1 within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_size(n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: amps.len(),
            });
        }
        let s = PureState { n_qubits, amps };
        let nrm = s.norm();
        if (nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm {nrm} is not 1")));
        }
        Ok(s)
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        let nrm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > 0.0) {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= nrm);
        Self::from_amplitudes(n_qubits, amps)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        PureState { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.same_size(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `max_i |self_i - other_i|`.
    pub fn max_deviation(&self, other: &PureState) -> Result<f64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max deviation after removing the best-fitting global phase.
    pub fn max_deviation_up_to_phase(&self, other: &PureState) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    fn same_size(&self, other: &PureState) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: site,
                len: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_site(a)?;
        self.check_site(b)?;
        if a == b {
            return Err(Error::invalid(format!("two-qubit gate on identical sites {a}")));
        }
        Ok(())
    }

    #[inline]
    fn mask(&self, site: usize) -> usize {
        1 << (self.n_qubits - 1 - site)
    }

    /// Bit value of `site` in basis index `idx`.
    #[inline]
    pub fn bit(&self, idx: usize, site: usize) -> bool {
        idx & self.mask(site) != 0
    }

    pub fn hadamard(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let m = self.mask(site);
        let h = FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * h;
                self.amps[i | m] = (a - b) * h;
            }
        }
        Ok(())
    }

    pub fn pauli_x(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let m = self.mask(site);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
        Ok(())
    }

    pub fn pauli_z(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let m = self.mask(site);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Controlled-Z between two qubits.
    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        let m = self.mask(a) | self.mask(b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        let (ma, mb) = (self.mask(a), self.mask(b));
        for i in 0..self.amps.len() {
            // Visit each swapped pair once, from the |..1..0..> side.
            if i & ma != 0 && i & mb == 0 {
                let j = (i & !ma) | mb;
                self.amps.swap(i, j);
            }
        }
        Ok(())
    }

    /// Reverse the order of the qubits in `range`, without any phase.
    pub fn reverse(&mut self, range: Range<usize>) -> Result<()> {
        if range.end > self.n_qubits || range.start > range.end {
            return Err(Error::IndexOutOfRange {
                index: range.end,
                len: self.n_qubits,
            });
        }
        let (lo, hi) = (range.start, range.end);
        let len = hi - lo;
        for k in 0..len / 2 {
            self.swap(lo + k, hi - 1 - k)?;
        }
        Ok(())
    }

    /// Apply a `2^k x 2^k` unitary on the listed qubits; the first listed
    /// qubit is the most significant bit of the local index.
    pub fn apply_local(&mut self, sites: &[usize], u: &DMatrix<C64>) -> Result<()> {
        let k = sites.len();
        let d = 1usize << k;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: u.nrows(),
            });
        }
        for (i, &s) in sites.iter().enumerate() {
            self.check_site(s)?;
            if sites[..i].contains(&s) {
                return Err(Error::invalid(format!("repeated site {s}")));
            }
        }
        let masks: Vec<usize> = sites.iter().map(|&s| self.mask(s)).collect();
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..d)
            .map(|l| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        let mut buf = vec![C64::new(0.0, 0.0); d];
        for base in 0..self.amps.len() {
            if base & all != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amps[base | off] = (0..d).map(|c| u[(r, c)] * buf[c]).sum();
            }
        }
        Ok(())
    }

    /// `<X^x_mask Z^z_mask>` for a Pauli string given by bit masks over basis
    /// indices (standard convention `Z|1> = -|1>`).
    pub fn pauli_expectation(&self, x_mask: usize, z_mask: usize) -> f64 {
        // <psi| X^x Z^z |psi> = sum_i conj(psi[i ^ x]) (-1)^{|i & z|} psi[i]
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let sign = if (i & z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                (self.amps[i ^ x_mask].conj() * a).re * sign
            })
            .sum()
    }

    /// Bit mask of a set of qubits.
    pub fn site_mask(&self, sites: &[usize]) -> Result<usize> {
        let mut m = 0;
        for &s in sites {
            self.check_site(s)?;
            m |= self.mask(s);
        }
        Ok(m)
    }

    /// Probability that every qubit in `sites` reads 0.
    pub fn vacuum_probability(&self, sites: &[usize]) -> Result<f64> {
        let m = self.site_mask(sites)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Population of each Hamming-weight sector (total-magnetization sector).
    pub fn weight_populations(&self) -> Vec<f64> {
        let mut pops = vec![0.0; self.n_qubits + 1];
        for (i, a) in self.amps.iter().enumerate() {
            pops[i.count_ones() as usize] += a.norm_sqr();
        }
        pops
    }
}
