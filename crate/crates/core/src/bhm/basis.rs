use crate::{Error, Result};

/// Occupation `(n_a, n_b)` of one site.
pub type LocalState = (u8, u8);

/// Fixed-atom-number Fock basis of the two-species lattice.
///
/// Global states are ordered lexicographically by their sequence of site-local
/// states (site 0 first), local states themselves in lexicographic
/// `(n_a, n_b)` order. A state is stored as a base-`L` integer key whose
/// digits are local-state indices, so key order equals basis order.
#[derive(Debug, Clone)]
pub struct BosonicBasis {
    n_sites: usize,
    n_max: usize,
    n_atoms: usize,
    local: Vec<LocalState>,
    keys: Vec<u64>,
    pow: Vec<u64>,
}

/// Local states with `n_a + n_b <= n_max`, lexicographic.
pub fn local_states(n_max: usize) -> Vec<LocalState> {
    let mut v = Vec::new();
    for a in 0..=n_max {
        for b in 0..=(n_max - a) {
            v.push((a as u8, b as u8));
        }
    }
    v
}

/// Number of states with `n_atoms` atoms on `n_sites` sites, each site
/// holding at most `n_max` (coefficient extraction from `(sum_k (k+1) x^k)^N`).
pub fn basis_dimension(n_sites: usize, n_max: usize, n_atoms: usize) -> u128 {
    let mut poly = vec![0u128; n_atoms + 1];
    poly[0] = 1;
    for _ in 0..n_sites {
        let mut next = vec![0u128; n_atoms + 1];
        for (deg, &c) in poly.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for k in 0..=n_max.min(n_atoms - deg) {
                next[deg + k] += c * (k as u128 + 1);
            }
        }
        poly = next;
    }
    poly[n_atoms]
}

impl BosonicBasis {
    pub fn new(n_sites: usize, n_max: usize, n_atoms: usize, dim_cap: usize) -> Result<Self> {
        if n_sites == 0 || n_max == 0 {
            return Err(Error::invalid("basis needs at least one site and n_max >= 1"));
        }
        let dim = basis_dimension(n_sites, n_max, n_atoms);
        if dim > dim_cap as u128 {
            return Err(Error::DimensionOverflow {
                requested: usize::try_from(dim).unwrap_or(usize::MAX),
                cap: dim_cap,
            });
        }
        let local = local_states(n_max);
        let l = local.len() as u64;
        let mut pow = vec![1u64; n_sites];
        for s in (0..n_sites.saturating_sub(1)).rev() {
            pow[s] = pow[s + 1]
                .checked_mul(l)
                .ok_or_else(|| Error::invalid("lattice too large for 64-bit state keys"))?;
        }
        pow[0].checked_mul(l).ok_or_else(|| Error::invalid("lattice too large for 64-bit state keys"))?;

        let mut keys = Vec::with_capacity(dim as usize);
        let mut stack: Vec<(usize, usize, u64)> = vec![(0, n_atoms, 0)];
        // Depth-first with children pushed in reverse, so keys come out sorted.
        while let Some((site, left, key)) = stack.pop() {
            if site == n_sites {
                if left == 0 {
                    keys.push(key);
                }
                continue;
            }
            let sites_after = n_sites - site - 1;
            for (d, &(a, b)) in local.iter().enumerate().rev() {
                let occ = (a + b) as usize;
                if occ <= left && left - occ <= sites_after * n_max {
                    stack.push((site + 1, left - occ, key + d as u64 * pow[site]));
                }
            }
        }
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        Ok(BosonicBasis {
            n_sites,
            n_max,
            n_atoms,
            local,
            keys,
            pow,
        })
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn local_states(&self) -> &[LocalState] {
        &self.local
    }

    pub fn local_dim(&self) -> usize {
        self.local.len()
    }

    pub fn local_index(&self, state: LocalState) -> Option<usize> {
        self.local.iter().position(|&s| s == state)
    }

    pub fn key(&self, index: usize) -> u64 {
        self.keys[index]
    }

    pub fn index_of_key(&self, key: u64) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    /// Basis index of a list of site-local states.
    pub fn index_of(&self, sites: &[LocalState]) -> Option<usize> {
        if sites.len() != self.n_sites {
            return None;
        }
        let mut key = 0;
        for (s, &st) in sites.iter().enumerate() {
            key += self.local_index(st)? as u64 * self.pow[s];
        }
        self.index_of_key(key)
    }

    /// Local-state index at `site` of a key.
    #[inline]
    pub fn digit(&self, key: u64, site: usize) -> usize {
        ((key / self.pow[site]) % self.local.len() as u64) as usize
    }

    #[inline]
    pub(crate) fn place_value(&self, site: usize) -> u64 {
        self.pow[site]
    }

    pub fn site_states(&self, index: usize) -> Vec<LocalState> {
        let key = self.keys[index];
        (0..self.n_sites).map(|s| self.local[self.digit(key, s)]).collect()
    }

    /// Total `(N_a, N_b)` of a basis state.
    pub fn species_counts(&self, index: usize) -> (usize, usize) {
        let key = self.keys[index];
        (0..self.n_sites).fold((0, 0), |(na, nb), s| {
            let (a, b) = self.local[self.digit(key, s)];
            (na + a as usize, nb + b as usize)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over all local-state tuples.
    fn brute_count(n_sites: usize, n_max: usize, n_atoms: usize) -> usize {
        let local = local_states(n_max);
        let l = local.len();
        (0..l.pow(n_sites as u32))
            .filter(|&code| {
                let mut c = code;
                let mut total = 0;
                for _ in 0..n_sites {
                    let (a, b) = local[c % l];
                    total += (a + b) as usize;
                    c /= l;
                }
                total == n_atoms
            })
            .count()
    }

    #[test]
    fn hand_dimensions() {
        assert_eq!(BosonicBasis::new(2, 2, 2, 100).unwrap().dim(), 10);
        assert_eq!(BosonicBasis::new(1, 1, 1, 100).unwrap().dim(), 2);
        assert_eq!(BosonicBasis::new(6, 1, 6, 100).unwrap().dim(), 64);
    }

    #[test]
    fn dimensions_match_brute_force() {
        for &(n, m) in &[(3, 2), (4, 2), (4, 3), (5, 2), (3, 3)] {
            let b = BosonicBasis::new(n, m, n, usize::MAX).unwrap();
            assert_eq!(b.dim(), brute_count(n, m, n), "N={n} n_max={m}");
            assert_eq!(b.dim() as u128, basis_dimension(n, m, n));
        }
    }

    #[test]
    fn ordering_and_lookup() {
        let b = BosonicBasis::new(3, 2, 3, 1000).unwrap();
        let first = b.site_states(0);
        assert_eq!(first, vec![(0, 0), (0, 1), (0, 2)]);
        for i in 0..b.dim() {
            assert_eq!(b.index_of(&b.site_states(i)), Some(i));
            let (na, nb) = b.species_counts(i);
            assert_eq!(na + nb, 3);
        }
        for w in (0..b.dim()).collect::<Vec<_>>().windows(2) {
            assert!(b.site_states(w[0]) < b.site_states(w[1]));
        }
    }

    #[test]
    fn hardcore_order_matches_qubit_order() {
        // (0,1) = b = |0>, (1,0) = a = |1>, site 0 most significant.
        let b = BosonicBasis::new(3, 1, 3, 100).unwrap();
        for i in 0..8 {
            let expect: Vec<LocalState> = (0..3)
                .map(|s| if (i >> (2 - s)) & 1 == 1 { (1, 0) } else { (0, 1) })
                .collect();
            assert_eq!(b.site_states(i), expect);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            BosonicBasis::new(6, 2, 6, 1000),
            Err(Error::DimensionOverflow { cap: 1000, .. })
        ));
    }
}
