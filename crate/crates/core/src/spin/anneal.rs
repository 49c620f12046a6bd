use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{IsingHamiltonian, SpinConfig};
use crate::{Error, Result};

/// Temperature ladder for [`simulated_anneal`]: `sweeps` full Metropolis
/// sweeps at each temperature, hottest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    sweeps: usize,
    temperatures: Vec<f64>,
    seed: u64,
}

impl AnnealSchedule {
    pub fn new(sweeps: usize, temperatures: Vec<f64>, seed: u64) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be ≥ 1".into()));
        }
        if temperatures.is_empty() {
            return Err(Error::InvalidParameter("empty temperature ladder".into()));
        }
        if temperatures.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter(
                "temperatures must be positive and finite".into(),
            ));
        }
        if temperatures.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "temperature ladder must be strictly descending".into(),
            ));
        }
        Ok(AnnealSchedule {
            sweeps,
            temperatures,
            seed,
        })
    }

    /// Geometric ladder of `steps` temperatures from `t_hot` down to `t_cold`.
    pub fn geometric(t_hot: f64, t_cold: f64, steps: usize, sweeps: usize, seed: u64) -> Result<Self> {
        if steps < 2 {
            return Self::new(sweeps, vec![t_cold], seed);
        }
        let ratio = (t_cold / t_hot).powf(1.0 / (steps - 1) as f64);
        let temps = (0..steps).map(|k| t_hot * ratio.powi(k as i32)).collect();
        Self::new(sweeps, temps, seed)
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Single-spin-flip Metropolis annealing. Returns the lowest-energy
/// configuration visited; deterministic for a given schedule seed.
pub fn simulated_anneal(h: &IsingHamiltonian, s: &AnnealSchedule) -> (SpinConfig, f64) {
    let n = h.n();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (terms, touch) = h.incidence();
    let mut spins: Vec<i8> = (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();

    let term_value = |spins: &[i8], k: usize| -> f64 {
        let (support, w) = &terms[k];
        let p: i8 = support.iter().map(|&i| spins[i]).product();
        *w * p as f64
    };

    let mut current: f64 = h.constant() + (0..terms.len()).map(|k| term_value(&spins, k)).sum::<f64>();
    let mut best = (current, spins.clone());

    for &t in &s.temperatures {
        for _ in 0..s.sweeps {
            for i in 0..n {
                let local: f64 = touch[i].iter().map(|&k| term_value(&spins, k)).sum();
                let delta = -2.0 * local;
                if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
                    spins[i] = -spins[i];
                    current += delta;
                    if current < best.0 {
                        best = (current, spins.clone());
                    }
                }
            }
        }
    }

    let config = SpinConfig::from_spins(&best.1).expect("spins are ±1");
    let energy = h.energy(&config).expect("dimension matches");
    (config, energy)
}
