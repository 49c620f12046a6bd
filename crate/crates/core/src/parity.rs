//! Parity embedding of all-to-all two-body problems into local four-body
//! constraints.
//!
//! Logical spins are `0..M`. Physical spin `(i, j)`, `i < j`, carries the
//! parity `σ_i σ_j` and sits at index `j(j-1)/2 + i`, so physical row
//! `j - 1` holds the pairs ending in `j` and adding a logical spin appends a
//! row. Plaquette `(i, j)` for `i < j ≤ M - 2` joins `(i,j)`, `(i,j+1)`,
//! `(i+1,j+1)` and `(i+1,j)`; when `i + 1 = j` the last member is a fixed
//! `+1` boundary spin.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gadget::GadgetSpec;
use crate::spin::{energy_table, IsingHamiltonian, SpinConfig};
use crate::{Error, Result};

/// Largest logical size accepted by [`roundtrip_validate`].
pub const ROUNDTRIP_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalProblem {
    #[serde(rename = "M")]
    pub m: usize,
    /// `(i, j, J_ij)` entries; repeated pairs add up.
    pub couplings: Vec<(usize, usize, f64)>,
}

impl LogicalProblem {
    pub fn new(m: usize, couplings: Vec<(usize, usize, f64)>) -> Result<Self> {
        let p = LogicalProblem { m, couplings };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidParameter(format!("M = {} < 3", self.m)));
        }
        for &(i, j, w) in &self.couplings {
            if i == j {
                return Err(Error::DuplicateSpin(i));
            }
            if let Some(k) = [i, j].into_iter().find(|&k| k >= self.m) {
                return Err(Error::IndexOutOfRange { index: k, n: self.m });
            }
            if !w.is_finite() {
                return Err(Error::InvalidParameter(format!("J_{i}{j} = {w}")));
            }
        }
        Ok(())
    }

    /// Dense upper-triangular couplings indexed like the physical spins.
    pub fn pair_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; num_physical(self.m)];
        for &(i, j, v) in &self.couplings {
            w[pair_index(i.min(j), i.max(j))] += v;
        }
        w
    }

    /// `Σ J_ij σ_i σ_j` on the logical spins.
    pub fn hamiltonian(&self) -> Result<IsingHamiltonian> {
        self.validate()?;
        let mut h = IsingHamiltonian::new(self.m);
        for &(i, j, v) in &self.couplings {
            h.add_coupling(i, j, v)?;
        }
        Ok(h)
    }

    pub fn abs_weight_sum(&self) -> f64 {
        self.pair_weights().iter().map(|v| v.abs()).sum()
    }

    /// `1 + Σ |J_ij|`.
    pub fn default_constraint(&self) -> f64 {
        1.0 + self.abs_weight_sum()
    }

    /// Instance `index` of the batch seeded with `seed`: every pair coupled
    /// with `J_ij = k/1024`, `k` uniform in `-1024..=1024`.
    pub fn random_dyadic(m: usize, seed: u64, index: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut couplings = Vec::with_capacity(num_physical(m));
        for j in 1..m {
            for i in 0..j {
                couplings.push((i, j, rng.random_range(-1024i32..=1024) as f64 / 1024.0));
            }
        }
        Self::new(m, couplings)
    }
}

pub fn num_physical(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

pub fn num_plaquettes(m: usize) -> usize {
    m.saturating_sub(1) * m.saturating_sub(2) / 2
}

/// Physical index of pair `(i, j)`, `i < j`.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    /// Index of a physical spin.
    Physical(usize),
    /// Boundary spin `(j, j)`, pinned to `+1`.
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "C")]
    pub c: f64,
    /// Logical pair of each physical spin.
    pub labels: Vec<(usize, usize)>,
    pub plaquettes: Vec<[Member; 4]>,
    /// Logical index `j` of each fixed boundary spin `(j, j)`.
    pub fixed: Vec<usize>,
    pub fields: Vec<f64>,
}

impl EmbeddingMap {
    pub fn num_physical(&self) -> usize {
        self.labels.len()
    }

    /// Grid position `(row, column)` of physical spin `k`: row `j - 1`,
    /// column `i`.
    pub fn position(&self, k: usize) -> (usize, usize) {
        let (i, j) = self.labels[k];
        (j - 1, i)
    }

    pub fn encode(&self, logical: &SpinConfig) -> Result<SpinConfig> {
        if logical.n() != self.m {
            return Err(Error::Dimension {
                expected: self.m,
                got: logical.n(),
            });
        }
        let mut c = SpinConfig::all_down(self.num_physical());
        for (k, &(i, j)) in self.labels.iter().enumerate() {
            c.set(k, logical.is_up(i) == logical.is_up(j));
        }
        Ok(c)
    }

    /// Plaquettes whose spin product is `-1`.
    pub fn violations(&self, physical: &SpinConfig) -> Result<usize> {
        if physical.n() != self.num_physical() {
            return Err(Error::Dimension {
                expected: self.num_physical(),
                got: physical.n(),
            });
        }
        Ok(self
            .plaquettes
            .iter()
            .filter(|plaq| {
                let downs = plaq
                    .iter()
                    .filter(|m| matches!(m, Member::Physical(k) if !physical.is_up(*k)))
                    .count();
                downs % 2 == 1
            })
            .count())
    }

    /// Read out along the pairs `(0, j)` in the gauge `σ_0 = +1`.
    pub fn decode(&self, physical: &SpinConfig) -> Result<DecodedState> {
        let violations = self.violations(physical)?;
        let mut logical = SpinConfig::all_up(self.m);
        for j in 1..self.m {
            logical.set(j, physical.is_up(pair_index(0, j)));
        }
        Ok(DecodedState {
            logical,
            violations,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodedState {
    pub logical: SpinConfig,
    pub violations: usize,
}

/// Embedding map and physical Hamiltonian
/// `Σ J_ij σ_(i,j) - C Σ_plaquettes Π σ`.
pub fn compile(p: &LogicalProblem, c: f64) -> Result<(EmbeddingMap, IsingHamiltonian)> {
    p.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C = {c} must be > 0")));
    }
    let m = p.m;
    let mut labels = Vec::with_capacity(num_physical(m));
    for j in 1..m {
        for i in 0..j {
            labels.push((i, j));
        }
    }
    let mut plaquettes = Vec::with_capacity(num_plaquettes(m));
    for j in 1..m.saturating_sub(1) {
        for i in 0..j {
            let fourth = if i + 1 == j {
                Member::Fixed(j)
            } else {
                Member::Physical(pair_index(i + 1, j))
            };
            plaquettes.push([
                Member::Physical(pair_index(i, j)),
                Member::Physical(pair_index(i, j + 1)),
                Member::Physical(pair_index(i + 1, j + 1)),
                fourth,
            ]);
        }
    }
    let fields = p.pair_weights();
    let mut h = IsingHamiltonian::new(labels.len());
    for (k, &b) in fields.iter().enumerate() {
        h.add_field(k, b)?;
    }
    for plaq in &plaquettes {
        let support: Vec<usize> = plaq
            .iter()
            .filter_map(|m| match m {
                Member::Physical(k) => Some(*k),
                Member::Fixed(_) => None,
            })
            .collect();
        h.add_term(&support, -c)?;
    }
    let map = EmbeddingMap {
        m,
        c,
        labels,
        plaquettes,
        fixed: (1..m.saturating_sub(1)).collect(),
        fields,
    };
    Ok((map, h))
}

pub fn encode(p: &LogicalProblem, logical: &SpinConfig) -> Result<SpinConfig> {
    let (map, _) = compile(p, 1.0)?;
    map.encode(logical)
}

pub fn decode(e: &EmbeddingMap, physical: &SpinConfig) -> Result<DecodedState> {
    e.decode(physical)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTripReport {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub physical_spins: usize,
    pub plaquettes: usize,
    pub valid_sector_size: usize,
    pub embedded_ground_states: usize,
    /// Every embedded ground state satisfies all plaquettes.
    pub ground_states_valid: bool,
    /// Decoded embedded ground set equals the logical ground set (σ_0 = +1 gauge).
    pub ground_sets_match: bool,
    /// Embedded minus logical energy over the valid sector; `None` if empty.
    pub offset: Option<f64>,
    pub expected_offset: f64,
    /// Largest `|offset_k - expected|` over the valid sector.
    pub max_offset_deviation: f64,
    pub witness: Option<String>,
    pub passed: bool,
}

fn gauge_fixed(c: &SpinConfig) -> SpinConfig {
    if c.is_up(0) {
        c.clone()
    } else {
        let mut f = c.clone();
        for i in 0..f.n() {
            f.flip(i);
        }
        f
    }
}

/// Compare the embedded and logical problems by enumerating both.
pub fn roundtrip_validate(p: &LogicalProblem, c: f64) -> Result<RoundTripReport> {
    p.validate()?;
    if p.m > ROUNDTRIP_LIMIT {
        return Err(Error::TooLarge {
            n: p.m,
            limit: ROUNDTRIP_LIMIT,
        });
    }
    let sum = p.abs_weight_sum();
    if !(c > sum) {
        return Err(Error::InvalidParameter(format!(
            "C = {c} must exceed Σ|J_ij| = {sum}"
        )));
    }
    let (map, h) = compile(p, c)?;
    let logical_h = p.hamiltonian()?;
    let logical_e = energy_table(&logical_h)?;
    let phys_e = energy_table(&h)?;
    let k = map.num_physical();
    let scale = c.max(1.0) * crate::ENERGY_TOL;

    let l_min = logical_e.iter().copied().fold(f64::INFINITY, f64::min);
    let logical_ground: BTreeSet<SpinConfig> = logical_e
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= l_min + scale)
        .map(|(b, _)| gauge_fixed(&SpinConfig::from_bits(p.m, b as u64)))
        .collect();

    let p_min = phys_e.iter().copied().fold(f64::INFINITY, f64::min);
    let expected_offset = -c * map.plaquettes.len() as f64;
    let mut witness = None;
    let mut ground_states_valid = true;
    let mut decoded_ground = BTreeSet::new();
    let mut embedded_ground_states = 0;
    let mut valid_sector_size = 0;
    let mut offset = None;
    let mut max_offset_deviation = 0.0f64;
    for (b, &e) in phys_e.iter().enumerate() {
        let phys = SpinConfig::from_bits(k, b as u64);
        let d = map.decode(&phys)?;
        if e <= p_min + scale {
            embedded_ground_states += 1;
            if d.violations > 0 {
                ground_states_valid = false;
                witness.get_or_insert_with(|| format!("violating ground state {phys}"));
            }
            decoded_ground.insert(d.logical.clone());
        }
        if d.violations == 0 {
            valid_sector_size += 1;
            let delta = e - logical_e[d.logical.bits().unwrap_or(0) as usize];
            offset.get_or_insert(delta);
            let dev = (delta - expected_offset).abs();
            if dev > max_offset_deviation {
                max_offset_deviation = dev;
                if dev > scale {
                    witness.get_or_insert_with(|| format!("offset {delta} at {phys}"));
                }
            }
        }
    }
    let ground_sets_match = decoded_ground == logical_ground;
    if !ground_sets_match {
        witness.get_or_insert_with(|| {
            let show = |s: &BTreeSet<SpinConfig>| {
                s.iter().map(|c| c.arrows()).collect::<Vec<_>>().join(",")
            };
            format!(
                "decoded {{{}}} vs logical {{{}}}",
                show(&decoded_ground),
                show(&logical_ground)
            )
        });
    }
    let passed = ground_states_valid
        && ground_sets_match
        && max_offset_deviation <= scale
        && valid_sector_size == 1 << (p.m - 1);
    Ok(RoundTripReport {
        m: p.m,
        c,
        physical_spins: k,
        plaquettes: map.plaquettes.len(),
        valid_sector_size,
        embedded_ground_states,
        ground_states_valid,
        ground_sets_match,
        offset,
        expected_offset,
        max_offset_deviation,
        witness,
        passed,
    })
}

/// One plaquette realised by a four-body gadget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitCell {
    pub plaquette: usize,
    pub row: usize,
    pub members: [Member; 4],
    pub gadget: GadgetSpec,
}

/// Cells and the physical spins shared between neighbouring cells.
///
/// Links are `(a, b, k)` with `a < b` sharing physical spin `k`, ordered by
/// `b` then `a`, so growing `M` only appends cells and links.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Layout {
    pub cells: Vec<UnitCell>,
    pub links: Vec<(usize, usize, usize)>,
}

/// Cell gadget for constraint strength `C`: N = 4, `J_N = -C`,
/// `J_a = 4C`, `q_0 = 2C` (validity margin `C`).
pub fn cell_gadget(c: f64) -> GadgetSpec {
    GadgetSpec::n_local(4, 4.0 * c, 2.0 * c, -c)
}

pub fn unit_cell_layout(e: &EmbeddingMap) -> Layout {
    let gadget = cell_gadget(e.c);
    let cells: Vec<UnitCell> = e
        .plaquettes
        .iter()
        .enumerate()
        .map(|(idx, plaq)| {
            let row = match plaq[0] {
                Member::Physical(k) => e.labels[k].1 - 1,
                Member::Fixed(j) => j - 1,
            };
            UnitCell {
                plaquette: idx,
                row,
                members: *plaq,
                gadget: gadget.clone(),
            }
        })
        .collect();
    let mut links = Vec::new();
    for b in 0..cells.len() {
        for a in 0..b {
            for m in &cells[b].members {
                if let Member::Physical(k) = m {
                    if cells[a].members.contains(m) {
                        links.push((a, b, *k));
                    }
                }
            }
        }
    }
    Layout { cells, links }
}
