//! Lanczos propagation `exp(-i t H) v` for Hermitian operators given only as
//! matrix-vector products.
//!
//! Each step builds an `m`-dimensional Krylov basis (with full
//! reorthogonalization), diagonalizes the small tridiagonal projection once,
//! and then picks the largest step `dt <= remaining` whose a-posteriori error
//! estimate `beta_{m} |e_m^T exp(-i dt T) e_1| |v|` meets the per-step
//! tolerance. Shrinking the step only re-exponentiates the small matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64};

/// A Hermitian linear operator acting on complex vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = H x`. `y` is overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Krylov subspace dimension per step.
    pub max_dim: usize,
    /// Per-step error tolerance (absolute, in vector 2-norm).
    pub tol: f64,
    /// Give up after this many accepted steps.
    pub max_steps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            max_dim: 30,
            tol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub steps: usize,
    pub matvecs: usize,
    /// Sum of the accepted per-step error estimates.
    pub error_estimate: f64,
}

impl KrylovStats {
    pub fn merge(&mut self, other: KrylovStats) {
        self.steps += other.steps;
        self.matvecs += other.matvecs;
        self.error_estimate += other.error_estimate;
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

const EARLY_STOP_STRIDE: usize = 4;

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Option<SymmetricEigen<f64, nalgebra::Dyn>> {
    let m = alpha.len();
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alpha[i];
        if i + 1 < m {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::try_new(tri, f64::EPSILON, 10_000)
}

/// `|e_m^T exp(-i dt T) e_1|`.
fn last_coefficient(eig: &SymmetricEigen<f64, nalgebra::Dyn>, dt: f64) -> f64 {
    let q = &eig.eigenvectors;
    let m = q.nrows();
    (0..m)
        .map(|k| C64::from_polar(q[(0, k)] * q[(m - 1, k)], -eig.eigenvalues[k] * dt))
        .sum::<C64>()
        .norm()
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `beta_m`, coupling the last basis vector to the residual.
    tail: f64,
    matvecs: usize,
}

/// Build the Krylov basis, stopping early once `good_enough(alpha, beta, tail)`
/// holds (checked every few vectors).
fn lanczos<A, F>(op: &A, start: &[C64], start_norm: f64, max_dim: usize, good_enough: F) -> LanczosBasis
where
    A: LinearOperator + ?Sized,
    F: Fn(&[f64], &[f64], f64) -> bool,
{
    let dim = op.dim();
    let m_max = max_dim.min(dim).max(1);
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(m_max);
    vectors.push(start.iter().map(|x| x / start_norm).collect());
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta = Vec::with_capacity(m_max);
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut matvecs = 0;
    // Breakdown threshold relative to the operator scale seen so far.
    let mut scale = 0.0f64;
    let mut tail = 0.0;
    for j in 0..m_max {
        op.apply(&vectors[j], &mut w);
        matvecs += 1;
        let a = dot(&vectors[j], &w).re;
        alpha.push(a);
        scale = scale.max(a.abs());
        // Full reorthogonalization, applied twice for stability.
        for _ in 0..2 {
            for v in &vectors {
                let h = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= h * vi;
                }
            }
        }
        let b = norm(&w);
        scale = scale.max(b);
        if b <= 1e-13 * scale.max(1e-300) {
            tail = 0.0;
            break;
        }
        if j + 1 == m_max || ((j + 1) % EARLY_STOP_STRIDE == 0 && good_enough(&alpha, &beta, b)) {
            tail = b;
            break;
        }
        beta.push(b);
        vectors.push(w.iter().map(|x| x / b).collect());
    }
    LanczosBasis {
        vectors,
        alpha,
        beta,
        tail,
        matvecs,
    }
}

/// Compute `exp(-i t H) v`.
pub fn expm_multiply<A: LinearOperator + ?Sized>(
    op: &A,
    v: &[C64],
    t: f64,
    opts: &KrylovOptions,
) -> Result<(Vec<C64>, KrylovStats)> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    if !t.is_finite() {
        return Err(Error::invalid("propagation time must be finite"));
    }
    let mut stats = KrylovStats::default();
    let mut current = v.to_vec();
    let mut remaining = t;
    let sign = t.signum();
    let mut dt_guess = t.abs();
    while remaining.abs() > 0.0 {
        if stats.steps >= opts.max_steps {
            return Err(Error::PropagationFailure {
                step: stats.steps,
                residual: f64::NAN,
            });
        }
        let beta0 = norm(&current);
        if beta0 == 0.0 {
            break;
        }
        let target = dt_guess.min(remaining.abs());
        let basis = lanczos(op, &current, beta0, opts.max_dim, |alpha, beta, tail| {
            tridiagonal_eigen(alpha, beta)
                .is_some_and(|e| tail * last_coefficient(&e, target) * beta0 <= opts.tol)
        });
        stats.matvecs += basis.matvecs;
        let m = basis.alpha.len();
        let eig = tridiagonal_eigen(&basis.alpha, &basis.beta)
            .ok_or_else(|| Error::NumericalFailure("tridiagonal eigendecomposition failed".into()))?;
        let coeffs = |dt: f64| -> Vec<C64> {
            let q = &eig.eigenvectors;
            let w: Vec<C64> = (0..m)
                .map(|k| C64::from_polar(q[(0, k)], -eig.eigenvalues[k] * dt))
                .collect();
            (0..m)
                .map(|i| (0..m).map(|k| w[k] * q[(i, k)]).sum())
                .collect()
        };

        let mut dt = dt_guess.min(remaining.abs());
        let mut halvings = 0;
        let (y, err) = loop {
            let y = coeffs(sign * dt);
            let err = basis.tail * y[m - 1].norm() * beta0;
            if err <= opts.tol {
                break (y, err);
            }
            halvings += 1;
            if halvings > 60 {
                return Err(Error::PropagationFailure {
                    step: stats.steps,
                    residual: err,
                });
            }
            dt *= 0.5;
        };

        let mut next = vec![C64::new(0.0, 0.0); current.len()];
        for (vec, c) in basis.vectors.iter().zip(&y) {
            let c = c * beta0;
            for (n, x) in next.iter_mut().zip(vec) {
                *n += c * x;
            }
        }
        current = next;
        stats.steps += 1;
        stats.error_estimate += err;
        if dt >= remaining.abs() {
            remaining = 0.0;
        } else {
            remaining -= sign * dt;
        }
        // Grow after an unconstrained step so a conservative start recovers.
        dt_guess = if halvings == 0 { dt * 2.0 } else { dt };
    }
    Ok((current, stats))
}

/// Dense Hermitian matrix as a [`LinearOperator`]; handy for tests and small
/// systems.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<C64>);

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.0.nrows();
        for r in 0..n {
            y[r] = (0..n).map(|c| self.0[(r, c)] * x[c]).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    fn eig_expm(h: &DMatrix<C64>, v: &[C64], t: f64) -> Vec<C64> {
        let eig = SymmetricEigen::new(h.clone());
        let u = &eig.eigenvectors;
        let n = h.nrows();
        let coef: Vec<C64> = (0..n)
            .map(|k| (0..n).map(|i| u[(i, k)].conj() * v[i]).sum::<C64>() * C64::from_polar(1.0, -eig.eigenvalues[k] * t))
            .collect();
        (0..n).map(|i| (0..n).map(|k| u[(i, k)] * coef[k]).sum()).collect()
    }

    #[test]
    fn matches_dense_exponential() {
        let h = random_hermitian(60, 11);
        let mut v = vec![C64::new(0.0, 0.0); 60];
        v[3] = C64::new(1.0, 0.0);
        for &t in &[0.0, 0.1, 2.5, -7.0, 40.0] {
            let (got, stats) = expm_multiply(&DenseOperator(h.clone()), &v, t, &KrylovOptions::default()).unwrap();
            let want = eig_expm(&h, &v, t);
            let dev: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "t={t} dev={dev} stats={stats:?}");
            assert!((norm(&got) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn small_dimension_is_exact() {
        let h = random_hermitian(3, 5);
        let v = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        let (got, _) = expm_multiply(&DenseOperator(h.clone()), &v, 3.3, &KrylovOptions::default()).unwrap();
        let want = eig_expm(&h, &v, 3.3);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_vector() {
        let h = random_hermitian(4, 1);
        let v = vec![C64::new(1.0, 0.0); 3];
        assert!(matches!(
            expm_multiply(&DenseOperator(h), &v, 1.0, &KrylovOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
