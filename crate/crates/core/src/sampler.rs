//! Seeded random two-mode Gaussian states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, LocalSymplectic};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on the two-mode squeezing parameter `r`.
    pub max_squeeze: f64,
    /// Upper bound on the thermal occupation of each mode.
    pub max_thermal: f64,
    /// Mix the modes on a random beam splitter and apply random phase
    /// rotations. Without it every sample has `c1 = −c2` in standard form.
    pub mix_passive: bool,
    /// Bound on `|ln s|` of an extra random local squeezing per mode, applied
    /// last. Zero disables it.
    #[serde(default)]
    pub max_local_squeeze: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { seed: 1, count: 10_000, max_squeeze: 1.0, max_thermal: 1.0, mix_passive: true, max_local_squeeze: 0.0 }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        for (name, v) in [
            ("max_squeeze", self.max_squeeze),
            ("max_thermal", self.max_thermal),
            ("max_local_squeeze", self.max_local_squeeze),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// States with `m1 = m2`, `n1 = n2`, `c1 = −c2`: squeezed thermal states
    /// with no mixing and no local squeezing.
    pub fn symmetric_subclass(seed: u64, count: usize) -> Self {
        Self { seed, count, mix_passive: false, max_local_squeeze: 0.0, ..Self::default() }
    }
}

fn uniform(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    if hi > 0.0 {
        rng.random_range(0.0..hi)
    } else {
        0.0
    }
}

/// Sample number `index` of the campaign described by `config`. Each index
/// has its own ChaCha stream, so the result does not depend on evaluation
/// order.
pub fn sample_state<T: Scalar>(config: &SamplerConfig, index: usize) -> Result<CovarianceMatrix<T>> {
    config.validate()?;
    if index >= config.count {
        return Err(Error::InvalidConfig(format!("index {index} out of range for count {}", config.count)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);

    let r = uniform(&mut rng, config.max_squeeze);
    let n_a = uniform(&mut rng, config.max_thermal);
    let n_b = uniform(&mut rng, config.max_thermal);
    let mut state = CovarianceMatrix::squeezed_thermal(T::lit(r), T::lit(n_a), T::lit(n_b));

    if config.mix_passive {
        let theta = uniform(&mut rng, std::f64::consts::FRAC_PI_2);
        let tau = std::f64::consts::TAU;
        let (pa, pb) = (uniform(&mut rng, tau), uniform(&mut rng, tau));
        state = state.beam_splitter(T::lit(theta)).apply_local(&LocalSymplectic::rotation(T::lit(pa), T::lit(pb)));
    }
    if config.max_local_squeeze > 0.0 {
        let bound = config.max_local_squeeze;
        let la = rng.random_range(-bound..=bound);
        let lb = rng.random_range(-bound..=bound);
        let tau = std::f64::consts::TAU;
        let (pa, pb) = (uniform(&mut rng, tau), uniform(&mut rng, tau));
        let t = LocalSymplectic::rotation(T::lit(pa), T::lit(pb))
            .then(&LocalSymplectic::squeeze(T::lit(la.exp()), T::lit(lb.exp())));
        state = state.apply_local(&t);
    }
    Ok(state)
}
