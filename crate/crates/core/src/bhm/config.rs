use std::f64::consts::PI;

use crate::fermion::{resonant_field, ChainSpec};
use crate::{Error, Result};

/// Default cap on the bosonic basis dimension.
pub const DEFAULT_DIM_CAP: usize = 5_000_000;

/// Two-species Bose-Hubbard lattice engineered to realize the bus:
/// `t^a_n = t^b_n = T sqrt(alpha_n)`, `U^a = U^b = 2 U^ab = U`, unit filling.
#[derive(Debug, Clone, PartialEq)]
pub struct BhmConfig {
    pub n_sites: usize,
    /// Hopping scale `T`.
    pub hop_scale: f64,
    /// Interaction `U`.
    pub interaction: f64,
    /// External field `B`; `None` selects the resonant value `S J`.
    pub field: Option<f64>,
    /// Per-site occupancy cap.
    pub n_max: usize,
    pub dim_cap: usize,
}

impl Default for BhmConfig {
    fn default() -> Self {
        BhmConfig {
            n_sites: 6,
            hop_scale: 1.0,
            interaction: 26.0,
            field: None,
            n_max: 2,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl BhmConfig {
    /// `T = 1`, `U = u_over_t`, resonant field, `n_max = 2`.
    pub fn new(n_sites: usize, u_over_t: f64) -> Self {
        BhmConfig {
            n_sites,
            interaction: u_over_t,
            ..Default::default()
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::invalid(format!("need at least 2 sites, got {}", self.n_sites)));
        }
        if !(self.hop_scale > 0.0 && self.hop_scale.is_finite()) {
            return Err(Error::invalid("hop scale T must be positive"));
        }
        if !(self.interaction > 0.0 && self.interaction.is_finite()) {
            return Err(Error::invalid("interaction U must be positive"));
        }
        if self.n_max == 0 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        if self.field.is_some_and(|b| !b.is_finite()) {
            return Err(Error::invalid("field must be finite"));
        }
        Ok(())
    }

    pub fn u_over_t(&self) -> f64 {
        self.interaction / self.hop_scale
    }

    /// Effective `J = 16 T^2 / (U N)`.
    pub fn j_scale(&self) -> f64 {
        16.0 * self.hop_scale.powi(2) / (self.interaction * self.n_sites as f64)
    }

    /// Inversion time `tau = U N pi / (16 T^2)`.
    pub fn tau(&self) -> f64 {
        self.interaction * self.n_sites as f64 * PI / (16.0 * self.hop_scale.powi(2))
    }

    pub fn field_value(&self) -> f64 {
        self.field
            .unwrap_or_else(|| resonant_field(self.n_sites, self.j_scale()))
    }

    /// `alpha_n = 2 sqrt((n/N)(1 - n/N))` for bonds `n = 1..N-1`.
    pub fn profile(&self) -> Vec<f64> {
        let n = self.n_sites as f64;
        (1..self.n_sites)
            .map(|k| {
                let x = k as f64 / n;
                2.0 * (x * (1.0 - x)).sqrt()
            })
            .collect()
    }

    /// Bond hoppings `T sqrt(alpha_n)`, identical for both species.
    pub fn hoppings(&self) -> Vec<f64> {
        self.profile()
            .into_iter()
            .map(|a| self.hop_scale * a.sqrt())
            .collect()
    }

    /// The XY chain this lattice realizes to lowest order in `T / U`.
    pub fn ideal_chain(&self) -> Result<ChainSpec> {
        ChainSpec::angular_momentum(self.n_sites, self.j_scale(), self.field_value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_matches_chain() {
        for &(n, u) in &[(6, 26.0), (4, 8.0), (9, 30.0)] {
            let c = BhmConfig::new(n, u);
            let chain = c.ideal_chain().unwrap();
            let tau = chain.inversion_time().unwrap();
            assert!((tau - c.tau()).abs() <= 1e-12 * tau);
        }
    }

    #[test]
    fn superexchange_reproduces_profile() {
        // j_n = 2 lxy_n = 2 t^2 / U_ab = 4 t^2 / U must equal (J/2) sqrt(n (N - n)).
        let c = BhmConfig::new(6, 26.0);
        let chain = c.ideal_chain().unwrap();
        for (t, j) in c.hoppings().iter().zip(chain.couplings()) {
            let from_bhm = 4.0 * t * t / c.interaction;
            assert!((from_bhm - j).abs() < 1e-14);
        }
        assert!(c.profile().iter().all(|&a| a > 0.0 && a <= 1.0));
    }

    #[test]
    fn validation() {
        assert!(BhmConfig::new(1, 26.0).validate().is_err());
        assert!(BhmConfig::new(6, 0.0).validate().is_err());
        assert!(BhmConfig::new(6, 26.0).with_n_max(0).validate().is_err());
        assert!(BhmConfig::new(6, 26.0).validate().is_ok());
    }
}
