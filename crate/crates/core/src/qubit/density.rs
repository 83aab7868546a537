use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::PureState;
use crate::{Error, Result, C64};

/// Reduced density matrix over a list of sites with the given local dimensions.
/// The first site is the most significant digit of the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    local_dims: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(local_dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let d: usize = local_dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        Ok(DensityMatrix { local_dims, matrix })
    }

    pub fn pure(state: &PureState) -> Self {
        let a = state.amplitudes();
        let d = a.len();
        DensityMatrix {
            local_dims: vec![2; state.n_qubits()],
            matrix: DMatrix::from_fn(d, d, |r, c| a[r] * a[c].conj()),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DensityMatrix {
            local_dims: vec![2; n_qubits],
            matrix: DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order, with eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vecs = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        (vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[0]
    }

    /// Eigenvector of the largest eigenvalue as a qubit state (requires all
    /// local dimensions to be 2), together with that eigenvalue.
    pub fn principal_state(&self) -> Result<(PureState, f64)> {
        if self.local_dims.iter().any(|&d| d != 2) {
            return Err(Error::invalid("principal_state needs qubit local dimensions"));
        }
        let (vals, vecs) = self.eigen();
        let last = vals.len() - 1;
        let mut amps: Vec<C64> = vecs.column(last).iter().copied().collect();
        // Fix the gauge: largest component real positive.
        let (_, pivot) = amps
            .iter()
            .enumerate()
            .fold((0.0, 0), |(best, bi), (i, a)| if a.norm() > best + 1e-12 { (a.norm(), i) } else { (best, bi) });
        let g = amps[pivot].conj() / amps[pivot].norm();
        amps.iter_mut().for_each(|a| *a *= g);
        Ok((PureState::normalized(self.local_dims.len(), amps)?, vals[last]))
    }
}

/// Accumulate a reduced density matrix from `(kept_index, rest_key, amplitude)`
/// triples; entries sharing a `rest_key` are traced together.
pub(crate) fn reduce_entries<I>(local_dims: Vec<usize>, entries: I) -> DensityMatrix
where
    I: IntoIterator<Item = (usize, u64, C64)>,
{
    let d: usize = local_dims.iter().product();
    let mut groups: HashMap<u64, Vec<(usize, C64)>> = HashMap::new();
    for (k, rest, a) in entries {
        if a.norm_sqr() > 0.0 {
            groups.entry(rest).or_default().push((k, a));
        }
    }
    // Sum in key order so the result is independent of hash iteration order.
    let mut keys: Vec<u64> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for key in keys {
        let g = &groups[&key];
        for &(r, ar) in g {
            for &(c, ac) in g {
                m[(r, c)] += ar * ac.conj();
            }
        }
    }
    DensityMatrix { local_dims, matrix: m }
}

/// Reduced state of `keep_sites` (in the listed order).
pub fn partial_trace(state: &PureState, keep_sites: &[usize]) -> Result<DensityMatrix> {
    if keep_sites.is_empty() {
        return Err(Error::invalid("keep_sites must be nonempty"));
    }
    let n = state.n_qubits();
    for (i, &s) in keep_sites.iter().enumerate() {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, len: n });
        }
        if keep_sites[..i].contains(&s) {
            return Err(Error::invalid(format!("repeated site {s}")));
        }
    }
    let keep_mask = state.site_mask(keep_sites)?;
    let k = keep_sites.len();
    let entries = state.amplitudes().iter().enumerate().map(|(idx, &a)| {
        let kept = keep_sites
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(state.bit(idx, s)));
        (kept, (idx & !keep_mask) as u64, a)
    });
    let rho = reduce_entries(vec![2; k], entries);
    Ok(rho)
}

/// `<target| rho |target>` for a qubit density matrix.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.local_dims.iter().any(|&d| d != 2) {
        return Err(Error::invalid(
            "density matrix has non-qubit local spaces; use fidelity_embedded",
        ));
    }
    fidelity_embedded(rho, target, [0, 1])
}

/// `<target| rho |target>` where each qubit of `target` is embedded in the
/// corresponding local space of `rho` by `|0> -> levels[0]`, `|1> -> levels[1]`.
/// Amplitude on other local levels counts as infidelity.
pub fn fidelity_embedded(rho: &DensityMatrix, target: &PureState, levels: [usize; 2]) -> Result<f64> {
    let n = target.n_qubits();
    if rho.local_dims.len() != n {
        return Err(Error::DimensionMismatch {
            expected: rho.local_dims.len(),
            found: n,
        });
    }
    if rho.local_dims.iter().any(|&d| levels[0] >= d || levels[1] >= d) || levels[0] == levels[1] {
        return Err(Error::invalid("no embedding of qubit levels into local spaces"));
    }
    let embed = |idx: usize| -> usize {
        rho.local_dims.iter().enumerate().fold(0usize, |acc, (q, &d)| {
            acc * d + levels[(idx >> (n - 1 - q)) & 1]
        })
    };
    let t = target.amplitudes();
    let pos: Vec<usize> = (0..t.len()).map(embed).collect();
    let mut f = C64::new(0.0, 0.0);
    for (i, &pi) in pos.iter().enumerate() {
        for (j, &pj) in pos.iter().enumerate() {
            f += t[i].conj() * rho.matrix[(pi, pj)] * t[j];
        }
    }
    Ok(f.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn product_state_trace() {
        let s = PureState::product(&[[c(1.0), c(1.0)], [c(1.0), c(0.0)]]).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let plus = PureState::plus(1).unwrap();
        assert!((fidelity(&rho, &plus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let s = PureState::from_amplitudes(2, vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!((rho.matrix()[(0, 0)] - 0.5).norm() < 1e-12);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn keep_everything_is_projector() {
        let mut g = PureState::plus(2).unwrap();
        g.cz(0, 1).unwrap();
        let rho = partial_trace(&g, &[0, 1]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.matrix() - DensityMatrix::pure(&g).matrix()).iter().all(|x| x.norm() < 1e-14));
        let (vals, _) = rho.eigen();
        assert!((vals[3] - 1.0).abs() < 1e-12 && vals[0].abs() < 1e-12);
    }

    #[test]
    fn keep_order_matters() {
        let s = PureState::from_bits(&[1, 0]).unwrap();
        let rho = partial_trace(&s, &[1, 0]).unwrap();
        assert!((rho.matrix()[(1, 1)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let mut g = PureState::plus(2).unwrap();
        g.cz(0, 1).unwrap();
        assert!((fidelity(&DensityMatrix::pure(&g), &g).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&DensityMatrix::maximally_mixed(2), &g).unwrap() - 0.25).abs() < 1e-12);
        let zz = DensityMatrix::pure(&PureState::zero(2).unwrap());
        assert!((fidelity(&zz, &g).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn embedded_fidelity_penalizes_leakage() {
        // One site with three levels; qubit |0> -> level 1, |1> -> level 2.
        let m = DMatrix::from_fn(3, 3, |r, c| if r == c && r == 0 { C64::new(0.5, 0.0) } else if r == c { C64::new(0.25, 0.0) } else { C64::new(0.0, 0.0) });
        let rho = DensityMatrix::new(vec![3], m).unwrap();
        let target = PureState::from_bits(&[0]).unwrap();
        assert!((fidelity_embedded(&rho, &target, [1, 2]).unwrap() - 0.25).abs() < 1e-15);
        assert!(fidelity(&rho, &target).is_err());
        assert!(fidelity_embedded(&rho, &target, [1, 3]).is_err());
    }

    #[test]
    fn partial_trace_errors() {
        let s = PureState::zero(3).unwrap();
        assert!(partial_trace(&s, &[]).is_err());
        assert!(matches!(partial_trace(&s, &[3]), Err(Error::IndexOutOfRange { .. })));
        assert!(partial_trace(&s, &[1, 1]).is_err());
    }
}
