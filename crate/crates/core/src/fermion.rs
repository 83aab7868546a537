//! Free-fermion description of the bus.
//!
//! Under the Jordan-Wigner mapping the XY chain becomes the quadratic
//! Hamiltonian `H_f = -sum_n j_n (c+_n c_{n+1} + h.c.) + sum_n u_n c+_n c_n`.
//! Its single-particle block is an `N x N` real tridiagonal matrix, which is
//! all that is needed to describe the many-body dynamics.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64};

/// Relative tolerance used to recognise the angular-momentum coupling profile.
pub const PROFILE_TOLERANCE: f64 = 1e-9;

/// Magnitudes below this are reported with phase 0.
pub const PHASE_CUTOFF: f64 = 1e-12;

/// Hamiltonian parameters of the bus chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    couplings: Vec<f64>,
    onsite: Vec<f64>,
    j_scale: f64,
    field: f64,
}

impl ChainSpec {
    /// Chain with couplings `j_n = (J/2) sqrt(n (N - n))` (1-based `n`) and
    /// uniform on-site energy `B`.
    pub fn angular_momentum(n_sites: usize, j_scale: f64, field: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid(format!(
                "chain needs at least 2 sites, got {n_sites}"
            )));
        }
        if !(j_scale > 0.0) || !j_scale.is_finite() {
            return Err(Error::invalid(format!("j_scale must be positive, got {j_scale}")));
        }
        if !field.is_finite() {
            return Err(Error::invalid("field must be finite"));
        }
        let couplings = (1..n_sites)
            .map(|n| angular_momentum_coupling(n, n_sites, j_scale))
            .collect();
        Ok(ChainSpec {
            n_sites,
            couplings,
            onsite: vec![field; n_sites],
            j_scale,
            field,
        })
    }

    /// Angular-momentum chain at the resonant field `B = S J`.
    pub fn resonant(n_sites: usize, j_scale: f64) -> Result<Self> {
        Self::angular_momentum(n_sites, j_scale, resonant_field(n_sites, j_scale))
    }

    /// Arbitrary chain. `j_scale` and `field` are kept as nominal values; they
    /// only matter for operations that require the angular-momentum profile.
    pub fn new(couplings: Vec<f64>, onsite: Vec<f64>, j_scale: f64, field: f64) -> Result<Self> {
        let n_sites = onsite.len();
        if n_sites < 2 {
            return Err(Error::invalid(format!(
                "chain needs at least 2 sites, got {n_sites}"
            )));
        }
        if couplings.len() != n_sites - 1 {
            return Err(Error::DimensionMismatch {
                expected: n_sites - 1,
                found: couplings.len(),
            });
        }
        if let Some(j) = couplings.iter().find(|j| !(**j > 0.0) || !j.is_finite()) {
            return Err(Error::invalid(format!("couplings must be positive, found {j}")));
        }
        if onsite.iter().any(|u| !u.is_finite()) {
            return Err(Error::invalid("on-site energies must be finite"));
        }
        Ok(ChainSpec {
            n_sites,
            couplings,
            onsite,
            j_scale,
            field,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn j_scale(&self) -> f64 {
        self.j_scale
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    /// Effective spin `S = (N - 1) / 2` of the single-particle sector.
    pub fn effective_spin(&self) -> f64 {
        (self.n_sites as f64 - 1.0) / 2.0
    }

    /// Largest relative deviation of the couplings from the angular-momentum
    /// profile at this chain's `J`.
    pub fn profile_deviation(&self) -> f64 {
        self.couplings
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let ideal = angular_momentum_coupling(i + 1, self.n_sites, self.j_scale);
                ((j - ideal) / ideal).abs()
            })
            .fold(0.0, f64::max)
    }

    fn require_angular_momentum(&self) -> Result<()> {
        let dev = self.profile_deviation();
        if !(dev <= PROFILE_TOLERANCE) {
            return Err(Error::UnsupportedProfile { max_rel_dev: dev });
        }
        Ok(())
    }

    /// Mirror-inversion time `tau = pi / J`.
    pub fn inversion_time(&self) -> Result<f64> {
        self.require_angular_momentum()?;
        Ok(PI / self.j_scale)
    }

    /// Single-particle Hamiltonian: `u_n` on the diagonal, `-j_n` off it.
    pub fn single_particle_hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n_sites;
        let mut h = DMatrix::zeros(n, n);
        for (i, &u) in self.onsite.iter().enumerate() {
            h[(i, i)] = u;
        }
        for (i, &j) in self.couplings.iter().enumerate() {
            h[(i, i + 1)] = -j;
            h[(i + 1, i)] = -j;
        }
        h
    }

    /// `exp(-i t H_1)` via the real symmetric eigendecomposition of `H_1`.
    pub fn propagator(&self, t: f64) -> Result<SingleParticlePropagator> {
        let h = self.single_particle_hamiltonian();
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000).ok_or_else(|| {
            Error::NumericalFailure("single-particle eigendecomposition did not converge".into())
        })?;
        let n = self.n_sites;
        let v = &eig.eigenvectors;
        let phases: Vec<C64> = eig
            .eigenvalues
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| phases[k] * (v[(r, k)] * v[(c, k)]))
                .sum::<C64>()
        });
        Ok(SingleParticlePropagator { matrix, time: t })
    }
}

fn angular_momentum_coupling(n: usize, n_sites: usize, j_scale: f64) -> f64 {
    0.5 * j_scale * ((n * (n_sites - n)) as f64).sqrt()
}

/// Field `B = S J = J (N - 1) / 2` that cancels the single-particle transfer phase.
pub fn resonant_field(n_sites: usize, j_scale: f64) -> f64 {
    j_scale * (n_sites as f64 - 1.0) / 2.0
}

/// Mirror image `N - 1 - i` of a 0-based site.
#[inline]
pub fn mirror_site(site: usize, n_sites: usize) -> usize {
    n_sites - 1 - site
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

#[derive(Debug, Clone)]
pub struct SingleParticlePropagator {
    pub matrix: DMatrix<C64>,
    pub time: f64,
}

/// Transfer amplitude from a site to its mirror image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorEntry {
    pub site: usize,
    pub mirror: usize,
    pub magnitude: f64,
    /// Phase in `(-pi, pi]`; 0 when the magnitude is below [`PHASE_CUTOFF`].
    pub phase: f64,
}

impl SingleParticlePropagator {
    pub fn n_sites(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |U^dagger U - 1|` over all entries.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n_sites();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod[(r, c)] - target).norm());
            }
        }
        worst
    }

    /// `<mirror(n)| U |n>` for every site.
    pub fn mirror_report(&self) -> Vec<MirrorEntry> {
        let n = self.n_sites();
        (0..n)
            .map(|site| {
                let mirror = mirror_site(site, n);
                let amp = self.matrix[(mirror, site)];
                let magnitude = amp.norm();
                let phase = if magnitude < PHASE_CUTOFF {
                    0.0
                } else {
                    wrap_phase(amp.arg())
                };
                MirrorEntry {
                    site,
                    mirror,
                    magnitude,
                    phase,
                }
            })
            .collect()
    }
}

/// Fock state `|q_1 ... q_N>` of the local fermionic modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationState {
    bits: Vec<bool>,
}

impl OccupationState {
    pub fn new(bits: Vec<bool>) -> Self {
        OccupationState { bits }
    }

    /// Decode a basis index with site 0 as the most significant bit.
    pub fn from_index(index: usize, n_sites: usize) -> Self {
        let bits = (0..n_sites)
            .map(|s| (index >> (n_sites - 1 - s)) & 1 == 1)
            .collect();
        OccupationState { bits }
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn n_sites(&self) -> usize {
        self.bits.len()
    }

    /// Fermion number `Q`.
    pub fn particle_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn reversed(&self) -> Self {
        OccupationState {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }
}

/// Number of transpositions `Q (Q - 1) / 2` needed to restore lattice order
/// after the modes are mirror-inverted.
pub fn reorder_count(q: usize) -> usize {
    q * q.saturating_sub(1) / 2
}

/// Per-fermion transfer phase `pi S - B pi / J` of an angular-momentum chain.
pub fn transfer_phase(chain: &ChainSpec) -> f64 {
    PI * chain.effective_spin() - chain.field() * PI / chain.j_scale()
}

/// Evolve a Fock state for one inversion time.
///
/// Returns the bit-reversed occupation and the phase
/// `exp(i Q phi_1) exp(-i pi Q (Q - 1) / 2)`. The phase depends only on `Q`.
pub fn fock_evolve(state: &OccupationState, chain: &ChainSpec) -> Result<(OccupationState, C64)> {
    chain.require_angular_momentum()?;
    if state.n_sites() != chain.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: chain.n_sites(),
            found: state.n_sites(),
        });
    }
    let field_is_uniform = chain
        .onsite()
        .iter()
        .all(|u| (u - chain.field()).abs() <= 1e-12 * chain.field().abs().max(1.0));
    if !field_is_uniform {
        return Err(Error::invalid("fock_evolve needs a uniform on-site field"));
    }
    let q = state.particle_count();
    let phase = (q as f64) * transfer_phase(chain) - PI * reorder_count(q) as f64;
    Ok((state.reversed(), C64::from_polar(1.0, phase)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_expected_profiles() {
        let c = ChainSpec::angular_momentum(2, 2.0, 0.0).unwrap();
        assert_eq!(c.couplings(), &[1.0]);
        assert_eq!(c.onsite(), &[0.0, 0.0]);

        let c = ChainSpec::angular_momentum(4, 2.0, 0.0).unwrap();
        let s3 = 3f64.sqrt();
        for (a, b) in c.couplings().iter().zip([s3, 2.0, s3]) {
            assert!((a - b).abs() < 1e-15);
        }

        let c = ChainSpec::angular_momentum(6, 1.0, 2.5).unwrap();
        let j = c.couplings();
        for n in 0..5 {
            assert_eq!(j[n], j[4 - n]);
        }
        assert_eq!(j[2], 1.5);
        assert!(j.iter().all(|&x| x <= 1.5));
        assert_eq!(c.onsite(), &[2.5; 6]);
        assert_eq!(resonant_field(6, 1.0), c.field());
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(matches!(
            ChainSpec::angular_momentum(1, 1.0, 0.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(ChainSpec::angular_momentum(4, 0.0, 0.0).is_err());
        assert!(ChainSpec::angular_momentum(4, -1.0, 0.0).is_err());
        assert!(ChainSpec::new(vec![1.0], vec![0.0; 3], 1.0, 0.0).is_err());
        assert!(ChainSpec::new(vec![1.0, -1.0], vec![0.0; 3], 1.0, 0.0).is_err());
    }

    #[test]
    fn resonant_field_values() {
        assert_eq!(resonant_field(2, 1.0), 0.5);
        assert_eq!(resonant_field(6, 1.0), 2.5);
        assert_eq!(resonant_field(5, 4.0), 8.0);
    }

    #[test]
    fn inversion_time_requires_profile() {
        let c = ChainSpec::angular_momentum(5, 1.0, 0.0).unwrap();
        assert!((c.inversion_time().unwrap() - PI).abs() < 1e-15);
        let c = ChainSpec::angular_momentum(5, PI, 0.0).unwrap();
        assert!((c.inversion_time().unwrap() - 1.0).abs() < 1e-15);

        let flat = ChainSpec::new(vec![1.0; 4], vec![0.0; 5], 1.0, 0.0).unwrap();
        assert!(matches!(
            flat.inversion_time(),
            Err(Error::UnsupportedProfile { .. })
        ));
    }

    #[test]
    fn zero_time_is_identity() {
        let c = ChainSpec::resonant(5, 1.3).unwrap();
        let u = c.propagator(0.0).unwrap();
        for r in 0..5 {
            for col in 0..5 {
                let expect = if r == col { 1.0 } else { 0.0 };
                assert!((u.matrix[(r, col)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn identity_mirror_report_only_center() {
        let u = SingleParticlePropagator {
            matrix: DMatrix::identity(3, 3),
            time: 0.0,
        };
        let rep = u.mirror_report();
        let mags: Vec<f64> = rep.iter().map(|e| e.magnitude).collect();
        assert_eq!(mags, vec![0.0, 1.0, 0.0]);
        assert!(rep.iter().all(|e| e.phase == 0.0));
    }

    #[test]
    fn two_site_closed_form() {
        // H_1 = B - (J/2) sigma_x, so <2|U(t)|1> = i e^{-iBt} sin(Jt/2).
        for &(j, t) in &[(1.0, 0.3), (2.0, 1.1), (0.7, PI / 0.7)] {
            let b = resonant_field(2, j);
            let c = ChainSpec::angular_momentum(2, j, b).unwrap();
            let u = c.propagator(t).unwrap();
            let expect = C64::i() * C64::from_polar(1.0, -b * t) * (j * t / 2.0).sin();
            assert!((u.matrix[(1, 0)] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn occupation_helpers() {
        let s = OccupationState::from_index(0b110, 3);
        assert_eq!(s.bits(), &[true, true, false]);
        assert_eq!(s.index(), 6);
        assert_eq!(s.reversed().index(), 0b011);
        assert_eq!(s.particle_count(), 2);
        assert_eq!(reorder_count(0), 0);
        assert_eq!(reorder_count(1), 0);
        assert_eq!(reorder_count(3), 3);
    }

    #[test]
    fn fock_evolve_examples() {
        let chain = ChainSpec::resonant(3, 1.0).unwrap();
        let (out, ph) = fock_evolve(&OccupationState::from_index(0, 3), &chain).unwrap();
        assert_eq!(out.index(), 0);
        assert!((ph - 1.0).norm() < 1e-12);

        let (out, ph) = fock_evolve(&OccupationState::from_index(0b110, 3), &chain).unwrap();
        assert_eq!(out.index(), 0b011);
        assert!((ph + 1.0).norm() < 1e-12);

        let (out, ph) = fock_evolve(&OccupationState::from_index(0b111, 3), &chain).unwrap();
        assert_eq!(out.index(), 0b111);
        assert!((ph + 1.0).norm() < 1e-12);
    }

    #[test]
    fn fock_phase_depends_only_on_count() {
        let chain = ChainSpec::angular_momentum(6, 1.0, 0.37).unwrap();
        let mut by_q: Vec<Option<C64>> = vec![None; 7];
        for idx in 0..64 {
            let s = OccupationState::from_index(idx, 6);
            let (_, ph) = fock_evolve(&s, &chain).unwrap();
            let q = s.particle_count();
            match by_q[q] {
                None => by_q[q] = Some(ph),
                Some(p) => assert!((p - ph).norm() < 1e-14),
            }
        }
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(wrap_phase(2.0 * PI).abs() < 1e-15);
    }
}
