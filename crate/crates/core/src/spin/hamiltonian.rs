use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SpinConfig;
use crate::{Error, Result};

/// Sorted, duplicate-free set of spin indices. Ordered by length, then
/// lexicographically, which is the canonical term order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Support(Vec<usize>);

impl Ord for Support {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Support {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One weighted product of distinct spins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub support: Vec<usize>,
    pub weight: f64,
}

/// Sparse sum of weighted spin products plus a constant offset.
///
/// Terms are kept canonical: one entry per support, supports sorted, exact
/// zeros dropped. An empty support folds into the constant.
/// Supports and weights in canonical order.
pub(crate) type TermList = Vec<(Vec<usize>, f64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct IsingHamiltonian {
    n: usize,
    terms: BTreeMap<Support, f64>,
    constant: f64,
}

impl IsingHamiltonian {
    pub fn new(n: usize) -> Self {
        IsingHamiltonian {
            n,
            terms: BTreeMap::new(),
            constant: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn set_constant(&mut self, c: f64) {
        self.constant = c;
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    /// Add `weight · Π σ_i` over `support`, merging with an existing term.
    pub fn add_term(&mut self, support: &[usize], weight: f64) -> Result<()> {
        if !weight.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite weight {weight}"
            )));
        }
        let mut s = support.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateSpin(w[0]));
            }
        }
        if let Some(&i) = s.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        if s.is_empty() {
            self.constant += weight;
            return Ok(());
        }
        let key = Support(s);
        let merged = self.terms.get(&key).copied().unwrap_or(0.0) + weight;
        if merged == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
        Ok(())
    }

    pub fn add_field(&mut self, i: usize, h: f64) -> Result<()> {
        self.add_term(&[i], h)
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, jij: f64) -> Result<()> {
        self.add_term(&[i, j], jij)
    }

    /// Weight of the term on exactly `support` (0 when absent).
    pub fn weight(&self, support: &[usize]) -> f64 {
        let mut s = support.to_vec();
        s.sort_unstable();
        if s.is_empty() {
            return self.constant;
        }
        self.terms.get(&Support(s)).copied().unwrap_or(0.0)
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(s, &w)| Term {
            support: s.0.clone(),
            weight: w,
        })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.constant == 0.0
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(|s| s.0.len()).max().unwrap_or(0)
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.terms.values().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Sum of two Hamiltonians on the same spins.
    pub fn plus(&self, other: &IsingHamiltonian) -> Result<IsingHamiltonian> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = self.clone();
        out.constant += other.constant;
        for (s, &w) in &other.terms {
            out.add_term(&s.0, w)?;
        }
        Ok(out)
    }

    /// Every weight and the constant multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> IsingHamiltonian {
        let mut out = IsingHamiltonian::new(self.n);
        out.constant = self.constant * factor;
        for (s, &w) in &self.terms {
            let v = w * factor;
            if v != 0.0 {
                out.terms.insert(s.clone(), v);
            }
        }
        out
    }

    /// Same terms with every spin index passed through `map`.
    pub fn relabeled(&self, n: usize, map: impl Fn(usize) -> usize) -> Result<IsingHamiltonian> {
        let mut out = IsingHamiltonian::new(n);
        out.constant = self.constant;
        for (s, &w) in &self.terms {
            let support: Vec<usize> = s.0.iter().map(|&i| map(i)).collect();
            out.add_term(&support, w)?;
        }
        Ok(out)
    }

    /// `constant + Σ weight · Π σ_i`.
    pub fn energy(&self, c: &SpinConfig) -> Result<f64> {
        if c.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: c.n(),
            });
        }
        let words = c.words();
        let mut e = self.constant;
        for (s, &w) in &self.terms {
            let downs = s
                .0
                .iter()
                .filter(|&&i| (words[i / 64] >> (i % 64)) & 1 == 0)
                .count();
            e += if downs % 2 == 0 { w } else { -w };
        }
        Ok(e)
    }

    pub(crate) fn kernel(&self) -> Kernel {
        assert!(self.n <= 64, "bit kernel supports at most 64 spins");
        Kernel {
            constant: self.constant,
            masks: self
                .terms
                .iter()
                .map(|(s, &w)| (s.0.iter().fold(0u64, |m, &i| m | (1 << i)), w))
                .collect(),
        }
    }

    /// Per-spin list of term indices (in canonical order) touching that spin.
    pub(crate) fn incidence(&self) -> (TermList, Vec<Vec<usize>>) {
        let terms: TermList =
            self.terms.iter().map(|(s, &w)| (s.0.clone(), w)).collect();
        let mut touch = vec![Vec::new(); self.n];
        for (k, (s, _)) in terms.iter().enumerate() {
            for &i in s {
                touch[i].push(k);
            }
        }
        (terms, touch)
    }
}

/// Bit-mask evaluator for `n ≤ 64`. Sums in the same order as
/// [`IsingHamiltonian::energy`], so results agree bit-for-bit.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    constant: f64,
    masks: Vec<(u64, f64)>,
}

impl Kernel {
    #[inline]
    pub(crate) fn energy(&self, bits: u64) -> f64 {
        let down = !bits;
        let mut e = self.constant;
        for &(m, w) in &self.masks {
            e += if (down & m).count_ones().is_multiple_of(2) { w } else { -w };
        }
        e
    }
}
