//! Ancilla gadgets reproducing permutation-symmetric multi-body terms with
//! two-body couplings only.
//!
//! Spin layout is fixed: logical spins occupy indices `0..N`, ancilla `i`
//! (counted from 1) sits at index `N + i - 1`. For the three-local gadget
//! the single ancilla is index 3.
//!
//! The N-local gadget counts: in the ground state of each logical sector the
//! ancillae `1..=N_up` point down and the rest point up. The alternating part
//! of the ancilla biases then shifts each sector's energy by the target value.

use serde::{Deserialize, Serialize};

use crate::spin::{effective_logical_spectrum, IsingHamiltonian, SpinConfig};
use crate::{Error, Result, ENERGY_TOL};

/// Guard applied to strict inequalities, relative to the compared values.
const STRICT_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    NLocal,
    ThreeLocal,
    Symmetric,
}

/// Gadget parameters, in units of the ancilla coupling scale.
///
/// For [`GadgetKind::ThreeLocal`], `j_a` is the logical-ancilla coupling
/// `2J` and `q_0` is unused. For [`GadgetKind::Symmetric`], `f` holds the
/// `N + 1` target energies indexed by `N_up` and `j_n` is unused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J_N", default)]
    pub j_n: f64,
    #[serde(rename = "J_a")]
    pub j_a: f64,
    #[serde(rename = "q_0", default)]
    pub q_0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
}

impl GadgetSpec {
    pub fn n_local(n: usize, j_a: f64, q_0: f64, j_n: f64) -> Self {
        GadgetSpec {
            kind: GadgetKind::NLocal,
            n,
            j_n,
            j_a,
            q_0,
            f: None,
        }
    }

    /// Single-ancilla gadget with logical coupling `j`.
    pub fn three_local(j: f64, j_n: f64) -> Self {
        GadgetSpec {
            kind: GadgetKind::ThreeLocal,
            n: 3,
            j_n,
            j_a: 2.0 * j,
            q_0: 0.0,
            f: None,
        }
    }

    pub fn symmetric(n: usize, f: Vec<f64>, j_a: f64, q_0: f64) -> Self {
        GadgetSpec {
            kind: GadgetKind::Symmetric,
            n,
            j_n: 0.0,
            j_a,
            q_0,
            f: Some(f),
        }
    }

    pub fn num_spins(&self) -> usize {
        match self.kind {
            GadgetKind::ThreeLocal => 4,
            _ => 2 * self.n,
        }
    }

    pub fn logical_indices(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn ancilla_indices(&self) -> Vec<usize> {
        (self.n..self.num_spins()).collect()
    }

    /// Target energy of a logical sector with `n_up` spins up.
    pub fn target(&self, n_up: usize) -> f64 {
        match self.kind {
            GadgetKind::Symmetric => self.f.as_ref().map_or(0.0, |f| f[n_up]),
            _ => {
                if (self.n - n_up).is_multiple_of(2) {
                    self.j_n
                } else {
                    -self.j_n
                }
            }
        }
    }

    /// Ancilla ground pattern expected for a sector with `n_up` spins up.
    pub fn canonical_ancilla(&self, n_up: usize) -> SpinConfig {
        match self.kind {
            GadgetKind::ThreeLocal => {
                let mut c = SpinConfig::all_down(1);
                c.set(0, n_up < 2);
                c
            }
            _ => {
                let mut c = SpinConfig::all_up(self.n);
                for i in 0..n_up {
                    c.set(i, false);
                }
                c
            }
        }
    }

    /// Alternating/derived bias offsets `q_i - q_0`, i = 1..N.
    pub fn bias_offsets(&self) -> Vec<f64> {
        match self.kind {
            GadgetKind::NLocal => (1..=self.n)
                .map(|i| if (self.n - i) % 2 == 1 { self.j_n } else { -self.j_n })
                .collect(),
            GadgetKind::Symmetric => {
                let f = self.f.as_deref().unwrap_or(&[]);
                f.windows(2).map(|w| -(w[1] - w[0]) / 2.0).collect()
            }
            GadgetKind::ThreeLocal => Vec::new(),
        }
    }

    /// Build the two-body Hamiltonian for this spec.
    pub fn build(&self) -> Result<IsingHamiltonian> {
        match self.kind {
            GadgetKind::NLocal => build_n_local(self),
            GadgetKind::ThreeLocal => build_three_local(self.j_a / 2.0, self.j_n),
            GadgetKind::Symmetric => build_symmetric(
                self.n,
                self.f.as_deref().ok_or_else(|| {
                    Error::InvalidParameter("symmetric gadget needs an f table".into())
                })?,
                self.j_a,
                self.q_0,
            ),
        }
    }
}

fn strictly_less(a: f64, b: f64) -> bool {
    a < b - STRICT_GUARD * a.abs().max(b.abs())
}

fn check_counting_regime(j_a: f64, q_0: f64, shift: f64, shift_name: &str) -> Result<()> {
    if !(j_a > 0.0) {
        return Err(Error::Validity(format!("J_a > 0 (got {j_a})")));
    }
    if !strictly_less(shift, q_0) {
        return Err(Error::Validity(format!(
            "{shift_name} < q_0 ({shift} vs {q_0})"
        )));
    }
    if !strictly_less(q_0, j_a) {
        return Err(Error::Validity(format!("q_0 < J_a ({q_0} vs {j_a})")));
    }
    if !strictly_less(shift, j_a - q_0) {
        return Err(Error::Validity(format!(
            "{shift_name} < J_a - q_0 ({shift} vs {})",
            j_a - q_0
        )));
    }
    Ok(())
}

/// Logical clique at `j_a`, logical fields `q_0 - j_a`, every logical spin
/// coupled to every ancilla at `j_a`, ancilla fields `-j_a(2i - N) + q_i`.
fn counting_gadget(n: usize, j_a: f64, q_0: f64, offsets: &[f64]) -> Result<IsingHamiltonian> {
    let mut h = IsingHamiltonian::new(2 * n);
    for i in 0..n {
        for j in 0..i {
            h.add_coupling(j, i, j_a)?;
        }
    }
    for i in 0..n {
        h.add_field(i, -j_a + q_0)?;
    }
    for i in 0..n {
        for a in 0..n {
            h.add_coupling(i, n + a, j_a)?;
        }
    }
    for (a, d) in offsets.iter().enumerate() {
        let i = (a + 1) as f64;
        let q_i = q_0 + d;
        h.add_field(n + a, -j_a * (2.0 * i - n as f64) + q_i)?;
    }
    Ok(h)
}

/// N-local gadget reproducing `J_N σ_1 … σ_N` up to a constant.
pub fn build_n_local(spec: &GadgetSpec) -> Result<IsingHamiltonian> {
    if spec.kind != GadgetKind::NLocal {
        return Err(Error::InvalidParameter("spec kind is not n-local".into()));
    }
    if spec.n < 2 {
        return Err(Error::InvalidParameter(format!("N = {} < 2", spec.n)));
    }
    check_counting_regime(spec.j_a, spec.q_0, spec.j_n.abs(), "|J_N|")?;
    counting_gadget(spec.n, spec.j_a, spec.q_0, &spec.bias_offsets())
}

/// Single-ancilla 3-local gadget: logical pairs `j`, logical fields `j_n`,
/// logical-ancilla pairs `2j`, ancilla field `2 j_n`.
///
/// The effective spectrum is exactly `-3j + j_n σ_1σ_2σ_3`, which requires
/// `|j_n| < j` (the ancilla must follow the sign of the logical
/// magnetisation in the |m| = 1 sectors).
pub fn build_three_local(j: f64, j_n: f64) -> Result<IsingHamiltonian> {
    if !(j > 0.0) {
        return Err(Error::Validity(format!("J > 0 (got {j})")));
    }
    if !strictly_less(j_n.abs(), 2.0 * j) {
        return Err(Error::Validity(format!(
            "|J_N| < J_a = 2J ({} vs {})",
            j_n.abs(),
            2.0 * j
        )));
    }
    if !strictly_less(j_n.abs(), j) {
        return Err(Error::Validity(format!(
            "|J_N| < J ({} vs {j}); the ancilla would no longer track the logical sign",
            j_n.abs()
        )));
    }
    let mut h = IsingHamiltonian::new(4);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        h.add_coupling(a, b, j)?;
    }
    for i in 0..3 {
        h.add_field(i, j_n)?;
        h.add_coupling(i, 3, 2.0 * j)?;
    }
    h.add_field(3, 2.0 * j_n)?;
    Ok(h)
}

/// Gadget whose effective energy at `N_up = k` is `f[k]` up to a constant.
///
/// Flipping ancilla `k` moves the sector energy by `-2 (q_k - q_0)`, so
/// `q_k = q_0 - (f[k] - f[k-1]) / 2`.
pub fn build_symmetric(n: usize, f: &[f64], j_a: f64, q_0: f64) -> Result<IsingHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} < 2")));
    }
    if f.len() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: f.len(),
        });
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite target energy".into()));
    }
    let spec = GadgetSpec::symmetric(n, f.to_vec(), j_a, q_0);
    let offsets = spec.bias_offsets();
    let max_shift = offsets.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    check_counting_regime(j_a, q_0, max_shift, "max_k |f(k)-f(k-1)|/2")?;
    counting_gadget(n, j_a, q_0, &offsets)
}

/// `min(q_0, J_a - q_0) - |J_N|`; positive iff the ground-state regime holds.
///
/// For the symmetric kind `|J_N|` is replaced by the largest bias offset;
/// for the three-local kind the margin is `J - |J_N|`.
pub fn validity_margin(spec: &GadgetSpec) -> f64 {
    match spec.kind {
        GadgetKind::NLocal => spec.q_0.min(spec.j_a - spec.q_0) - spec.j_n.abs(),
        GadgetKind::Symmetric => {
            let shift = spec.bias_offsets().iter().fold(0.0f64, |m, d| m.max(d.abs()));
            spec.q_0.min(spec.j_a - spec.q_0) - shift
        }
        GadgetKind::ThreeLocal => spec.j_a / 2.0 - spec.j_n.abs(),
    }
}

/// Rough ancilla-excitation estimate `exp(-validity_margin / T)`.
///
/// This is a Boltzmann-factor scale, not a normalised probability.
pub fn thermal_reliability(spec: &GadgetSpec, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be > 0 (got {temperature})"
        )));
    }
    Ok((-validity_margin(spec) / temperature).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorRow {
    pub logical: String,
    pub n_up: usize,
    pub energy: f64,
    pub target: f64,
    pub residual: f64,
    pub ancilla: String,
    pub counting_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GadgetReport {
    pub max_deviation: f64,
    pub counting_correct: bool,
    pub offset: f64,
    pub sectors: Vec<SectorRow>,
}

impl GadgetReport {
    /// Deviation within [`ENERGY_TOL`] (scaled by `scale`) and counting intact.
    pub fn passes(&self, scale: f64) -> bool {
        self.counting_correct && self.max_deviation <= ENERGY_TOL * scale.max(1.0)
    }
}

/// Compare the effective logical spectrum of `h` with the spec's target.
///
/// The offset is `mean(effective) - mean(target)`; the deviation is the
/// largest residual after removing it.
pub fn verify_gadget(h: &IsingHamiltonian, spec: &GadgetSpec) -> Result<GadgetReport> {
    if h.n() != spec.num_spins() {
        return Err(Error::Dimension {
            expected: spec.num_spins(),
            got: h.n(),
        });
    }
    let eff = effective_logical_spectrum(h, &spec.logical_indices(), &spec.ancilla_indices())?;
    let targets: Vec<f64> = eff
        .sectors
        .iter()
        .map(|s| spec.target(s.logical.count_up()))
        .collect();
    let count = eff.sectors.len() as f64;
    let offset = eff.sectors.iter().map(|s| s.energy).sum::<f64>() / count
        - targets.iter().sum::<f64>() / count;

    let mut max_deviation = 0.0f64;
    let mut counting_correct = true;
    let sectors = eff
        .sectors
        .iter()
        .zip(&targets)
        .map(|(s, &t)| {
            let n_up = s.logical.count_up();
            let residual = s.energy - t - offset;
            max_deviation = max_deviation.max(residual.abs());
            let counting_ok = s.ancilla == spec.canonical_ancilla(n_up);
            counting_correct &= counting_ok;
            SectorRow {
                logical: s.logical.arrows(),
                n_up,
                energy: s.energy,
                target: t,
                residual,
                ancilla: s.ancilla.arrows(),
                counting_ok,
            }
        })
        .collect();
    Ok(GadgetReport {
        max_deviation,
        counting_correct,
        offset,
        sectors,
    })
}
