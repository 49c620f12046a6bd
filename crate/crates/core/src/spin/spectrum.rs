use super::{IsingHamiltonian, SpinConfig, ANCILLA_LIMIT, ENUMERATION_LIMIT};
use crate::{Error, Exec, Result};

/// All `2^n` configurations with their energies, sorted ascending by energy
/// with ties broken by ascending bit pattern.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    energies: Vec<f64>,
    order: Vec<u32>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Energies indexed by configuration bits.
    pub fn energies_by_bits(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[self.order[0] as usize]
    }

    /// `k`-th entry in sorted order.
    pub fn entry(&self, k: usize) -> (SpinConfig, f64) {
        let b = self.order[k] as u64;
        (SpinConfig::from_bits(self.n, b), self.energies[b as usize])
    }

    pub fn entries(&self) -> impl Iterator<Item = (SpinConfig, f64)> + '_ {
        self.order.iter().map(move |&b| {
            (
                SpinConfig::from_bits(self.n, b as u64),
                self.energies[b as usize],
            )
        })
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Energies of all `2^n` configurations, indexed by bits.
pub fn energy_table(h: &IsingHamiltonian) -> Result<Vec<f64>> {
    energy_table_with(h, Exec::default())
}

pub fn energy_table_with(h: &IsingHamiltonian, exec: Exec) -> Result<Vec<f64>> {
    check_enumerable(h.n())?;
    let kernel = h.kernel();
    let mut out = vec![0.0; 1usize << h.n()];
    exec.fill(&mut out, |b| kernel.energy(b as u64));
    Ok(out)
}

pub fn enumerate_spectrum(h: &IsingHamiltonian) -> Result<Spectrum> {
    enumerate_spectrum_with(h, Exec::default())
}

pub fn enumerate_spectrum_with(h: &IsingHamiltonian, exec: Exec) -> Result<Spectrum> {
    let energies = energy_table_with(h, exec)?;
    let mut order: Vec<u32> = (0..energies.len() as u32).collect();
    let cmp = |a: &u32, b: &u32| {
        energies[*a as usize]
            .total_cmp(&energies[*b as usize])
            .then(a.cmp(b))
    };
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            order.par_sort_unstable_by(cmp);
        }
        _ => order.sort_unstable_by(cmp),
    }
    Ok(Spectrum {
        n: h.n(),
        energies,
        order,
    })
}

/// All configurations with energy ≤ min + `tol`, ascending by bits.
pub fn ground_states(h: &IsingHamiltonian, tol: f64) -> Result<Vec<SpinConfig>> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} < 0")));
    }
    let energies = energy_table(h)?;
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= min + tol)
        .map(|(b, _)| SpinConfig::from_bits(h.n(), b as u64))
        .collect())
}

/// `Σ_{i∈subset} σ_i`.
pub fn magnetization(c: &SpinConfig, subset: &[usize]) -> Result<i64> {
    subset.iter().try_fold(0i64, |m, &i| {
        if i >= c.n() {
            Err(Error::IndexOutOfRange { index: i, n: c.n() })
        } else {
            Ok(m + c.spin(i) as i64)
        }
    })
}

/// Minimum over ancilla configurations for one logical configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMin {
    pub logical: SpinConfig,
    pub energy: f64,
    pub ancilla: SpinConfig,
}

/// Per-logical-configuration minima of a joint Hamiltonian.
///
/// `sectors[b]` belongs to the logical configuration whose bit `k` is the
/// value of spin `logical[k]`.
#[derive(Clone, Debug)]
pub struct EffectiveSpectrum {
    pub logical: Vec<usize>,
    pub ancilla: Vec<usize>,
    pub sectors: Vec<SectorMin>,
}

impl EffectiveSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.energy).collect()
    }

    /// The joint configuration realising sector `b`.
    pub fn joint_config(&self, b: usize) -> SpinConfig {
        let n = self.logical.len() + self.ancilla.len();
        let s = &self.sectors[b];
        let mut c = SpinConfig::all_down(n);
        for (k, &i) in self.logical.iter().enumerate() {
            c.set(i, s.logical.is_up(k));
        }
        for (k, &i) in self.ancilla.iter().enumerate() {
            c.set(i, s.ancilla.is_up(k));
        }
        c
    }
}

fn deposit(bits: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0u64, |acc, (k, &p)| acc | (((bits >> k) & 1) << p))
}

pub fn effective_logical_spectrum(
    h: &IsingHamiltonian,
    logical: &[usize],
    ancilla: &[usize],
) -> Result<EffectiveSpectrum> {
    effective_logical_spectrum_with(h, logical, ancilla, Exec::default())
}

pub fn effective_logical_spectrum_with(
    h: &IsingHamiltonian,
    logical: &[usize],
    ancilla: &[usize],
    exec: Exec,
) -> Result<EffectiveSpectrum> {
    let n = h.n();
    let mut seen = vec![false; n];
    for &i in logical.iter().chain(ancilla) {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::Partition(format!("spin {i} listed twice")));
        }
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(Error::Partition(format!("spin {i} in neither set")));
    }
    check_enumerable(n)?;
    if ancilla.len() > ANCILLA_LIMIT {
        return Err(Error::TooLarge {
            n: ancilla.len(),
            limit: ANCILLA_LIMIT,
        });
    }
    let kernel = h.kernel();
    let n_anc = 1u64 << ancilla.len();
    let sectors = exec.map_range(1usize << logical.len(), |lb| {
        let base = deposit(lb as u64, logical);
        let mut best = (f64::INFINITY, 0u64);
        for ab in 0..n_anc {
            let e = kernel.energy(base | deposit(ab, ancilla));
            if e < best.0 {
                best = (e, ab);
            }
        }
        SectorMin {
            logical: SpinConfig::from_bits(logical.len(), lb as u64),
            energy: best.0,
            ancilla: SpinConfig::from_bits(ancilla.len(), best.1),
        }
    });
    Ok(EffectiveSpectrum {
        logical: logical.to_vec(),
        ancilla: ancilla.to_vec(),
        sectors,
    })
}
