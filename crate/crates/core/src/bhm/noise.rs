use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Baseline lattice depth in recoil energies.
pub const DEFAULT_BASE_DEPTH: f64 = 15.0;
/// Default correlation time as a fraction of the run duration.
pub const DEFAULT_CORRELATION_FRACTION: f64 = 0.01;
/// Default update interval as a fraction of the run duration.
pub const DEFAULT_UPDATE_FRACTION: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    /// Stationary Ornstein-Uhlenbeck jitter around the baseline depth.
    OrnsteinUhlenbeck,
    /// Unbounded random walk started at the baseline depth.
    Increment,
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModel::OrnsteinUhlenbeck => "ou",
            NoiseModel::Increment => "increment",
        })
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ou" => Ok(NoiseModel::OrnsteinUhlenbeck),
            "increment" => Ok(NoiseModel::Increment),
            _ => Err(Error::invalid(format!("unknown noise model '{s}' (ou | increment)"))),
        }
    }
}

/// Independent intensity noise on the two species' lattice depths.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// Fractional standard deviation of the depth.
    pub delta: f64,
    pub base_depth: f64,
    /// `None` selects `duration / 100`.
    pub correlation_time: Option<f64>,
    /// `None` selects `duration / 1000`.
    pub update_interval: Option<f64>,
    pub seed: u64,
    pub model: NoiseModel,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            delta: 0.0,
            base_depth: DEFAULT_BASE_DEPTH,
            correlation_time: None,
            update_interval: None,
            seed: 0,
            model: NoiseModel::OrnsteinUhlenbeck,
        }
    }
}

impl NoiseConfig {
    pub fn new(delta: f64, seed: u64) -> Self {
        NoiseConfig {
            delta,
            seed,
            ..Default::default()
        }
    }

    pub fn noiseless() -> Self {
        NoiseConfig::default()
    }

    pub fn is_noiseless(&self) -> bool {
        self.delta == 0.0
    }

    /// Concrete `(correlation_time, update_interval)` for a run of `duration`.
    pub fn resolve(&self, duration: f64) -> Result<(f64, f64)> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::invalid("noise duration must be positive"));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(Error::invalid(format!("delta must lie in [0, 0.5), got {}", self.delta)));
        }
        if !(self.base_depth > 0.0 && self.base_depth.is_finite()) {
            return Err(Error::invalid("base depth must be positive"));
        }
        let corr = self
            .correlation_time
            .unwrap_or(duration * DEFAULT_CORRELATION_FRACTION);
        let dt = self.update_interval.unwrap_or(duration * DEFAULT_UPDATE_FRACTION);
        if !(corr > 0.0 && dt > 0.0 && corr.is_finite()) {
            return Err(Error::invalid("correlation time and update interval must be positive"));
        }
        if dt > corr {
            return Err(Error::invalid(format!(
                "update interval {dt} exceeds correlation time {corr}"
            )));
        }
        Ok((corr, dt))
    }
}

/// Piecewise-constant depths: segment `k` covers `[k dt, min((k+1) dt, duration))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthTrajectory {
    pub interval: f64,
    pub duration: f64,
    pub depth_a: Vec<f64>,
    pub depth_b: Vec<f64>,
}

impl DepthTrajectory {
    pub fn segments(&self) -> usize {
        self.depth_a.len()
    }

    /// Length of segment `k`.
    pub fn segment_length(&self, k: usize) -> f64 {
        let start = k as f64 * self.interval;
        (self.duration - start).min(self.interval)
    }
}

/// Sample both depth trajectories for a run of `duration`.
///
/// The OU update is the exact discretization
/// `s' = s0 + (s - s0) e^{-dt/tc} + sigma sqrt(1 - e^{-2 dt/tc}) xi`, started
/// from the stationary distribution. The increment model adds
/// `sigma sqrt(dt) xi` per interval. Depths are floored at a small positive
/// value so the coupling map stays defined.
pub fn sample_noise(config: &NoiseConfig, duration: f64) -> Result<DepthTrajectory> {
    let (corr, dt) = config.resolve(duration)?;
    let segments = ((duration / dt) - 1e-9).ceil().max(1.0) as usize;
    let s0 = config.base_depth;
    if config.is_noiseless() {
        return Ok(DepthTrajectory {
            interval: dt,
            duration,
            depth_a: vec![s0; segments],
            depth_b: vec![s0; segments],
        });
    }
    let sigma = config.delta * s0;
    let floor = 1e-3 * s0;
    let mut rng = rng_from_seed(config.seed);
    let decay = (-dt / corr).exp();
    let kick = match config.model {
        NoiseModel::OrnsteinUhlenbeck => sigma * (1.0 - decay * decay).sqrt(),
        NoiseModel::Increment => sigma * dt.sqrt(),
    };
    let path = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let mut s = match config.model {
            NoiseModel::OrnsteinUhlenbeck => s0 + sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::Increment => s0,
        };
        let mut out = Vec::with_capacity(segments);
        for _ in 0..segments {
            out.push(s.max(floor));
            let xi: f64 = rng.sample(StandardNormal);
            s = match config.model {
                NoiseModel::OrnsteinUhlenbeck => s0 + (s - s0) * decay + kick * xi,
                NoiseModel::Increment => s + kick * xi,
            };
        }
        out
    };
    let depth_a = path(&mut rng);
    let depth_b = path(&mut rng);
    Ok(DepthTrajectory {
        interval: dt,
        duration,
        depth_a,
        depth_b,
    })
}

/// Hopping and interaction at baseline depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthCalibration {
    pub t0: f64,
    pub u0: f64,
    pub s0: f64,
}

/// Deep-lattice scaling: `t = T0 (s/s0)^{3/4} exp(-2 (sqrt s - sqrt s0))`,
/// `U = U0 (s/s0)^{3/4}`. Returns `(t, U)`.
pub fn couplings_from_depth(s: f64, cal: &DepthCalibration) -> Result<(f64, f64)> {
    if !(s > 0.0 && s.is_finite()) || !(cal.s0 > 0.0) {
        return Err(Error::invalid(format!("lattice depth must be positive, got {s}")));
    }
    let ratio = (s / cal.s0).powf(0.75);
    let t = cal.t0 * ratio * (-2.0 * (s.sqrt() - cal.s0.sqrt())).exp();
    Ok((t, cal.u0 * ratio))
}
