//! Classical Ising Hamiltonians with terms of arbitrary order.
//!
//! Spins take values ±1; in a [`SpinConfig`] bit `i` set means spin `i` is +1
//! (↑). Ties are always broken by ascending bit pattern.

mod anneal;
mod format;
mod hamiltonian;
mod spectrum;

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

pub use anneal::{simulated_anneal, AnnealSchedule};
pub use format::{parse_hamiltonian, write_hamiltonian};
pub use hamiltonian::{IsingHamiltonian, Term};
pub use spectrum::{
    effective_logical_spectrum, effective_logical_spectrum_with, energy_table,
    energy_table_with, enumerate_spectrum, enumerate_spectrum_with, ground_states,
    magnetization, EffectiveSpectrum, SectorMin, Spectrum,
};

/// Largest spin count accepted by exhaustive operations.
pub const ENUMERATION_LIMIT: usize = 28;

/// Largest ancilla count accepted by [`effective_logical_spectrum`].
pub const ANCILLA_LIMIT: usize = 24;

/// Assignment of ±1 values to `n` ordered spins, packed as bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    n: usize,
    words: Vec<u64>,
}

impl SpinConfig {
    pub fn all_down(n: usize) -> Self {
        SpinConfig {
            n,
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }

    pub fn all_up(n: usize) -> Self {
        let mut c = Self::all_down(n);
        for i in 0..n {
            c.set(i, true);
        }
        c
    }

    /// Configuration from the low `n` bits of `bits` (`n ≤ 64`).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "from_bits supports at most 64 spins");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        SpinConfig {
            n,
            words: vec![bits & mask],
        }
    }

    /// Configuration from explicit ±1 values.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut c = Self::all_down(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            match s {
                1 => c.set(i, true),
                -1 => {}
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "spin {i} has value {other}, expected ±1"
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Packed bits for `n ≤ 64`.
    pub fn bits(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_up(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Spin value ±1.
    pub fn spin(&self, i: usize) -> i8 {
        if self.is_up(i) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, i: usize, up: bool) {
        assert!(i < self.n, "spin {i} out of range for {} spins", self.n);
        let (w, b) = (i / 64, i % 64);
        if up {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n, "spin {i} out of range for {} spins", self.n);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.spin(i)).collect()
    }

    pub fn count_up(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sub-configuration on `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> SpinConfig {
        let mut out = SpinConfig::all_down(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            out.set(k, self.is_up(i));
        }
        out
    }

    /// Arrow rendering, spin 0 first (`↑` for +1).
    pub fn arrows(&self) -> String {
        (0..self.n)
            .map(|i| if self.is_up(i) { '↑' } else { '↓' })
            .collect()
    }

    /// Parse `↑`/`↓`, `+`/`-` or `1`/`0` characters, spin 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let spins: Vec<i8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '↑' | '+' | '1' | 'u' => Ok(1),
                '↓' | '-' | '0' | 'd' => Ok(-1),
                other => Err(Error::InvalidParameter(format!(
                    "unexpected spin character {other:?}"
                ))),
            })
            .collect::<Result<_>>()?;
        Self::from_spins(&spins)
    }
}

impl Ord for SpinConfig {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for SpinConfig {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig({})", self.arrows())
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.arrows())
    }
}
