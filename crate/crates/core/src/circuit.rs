//! Classical potential of an rf-SQUID coupler loop shared by several flux
//! qubits, and the effective qubit-qubit couplings it mediates.
//!
//! Units: `4e² = 1`, phases in radians. Index 0 of every phase vector is the
//! coupler; indices `1..=n` are the attached circuits. The potential is
//!
//! `U = -E_c cos φ_0 - Σ E_i cos φ_i + ½ (φ - φˣ)ᵀ L⁻¹ (φ - φˣ)`.

pub use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default two-level displacement about π.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Coupler gradient tolerance for the Born-Oppenheimer minimisation.
const GRADIENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "L_c")]
    pub l_c: f64,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "E_c")]
    pub e_c: f64,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
    #[serde(rename = "phi_cx", default)]
    pub phi_cx: f64,
}

impl CircuitParams {
    /// `n` identical circuits.
    pub fn uniform(n: usize, l: f64, m: f64, e: f64, phi_cx: f64) -> Self {
        CircuitParams {
            l_c: l,
            l: vec![l; n],
            m: vec![m; n],
            e_c: e,
            e: vec![e; n],
            phi_cx,
        }
    }

    /// Preset: `L = 1`, `M = 0.1`, `E = 1`, zero coupler flux.
    pub fn preset(n: usize) -> Self {
        Self::uniform(n, 1.0, 0.1, 1.0, 0.0)
    }

    pub fn n(&self) -> usize {
        self.l.len()
    }

    /// The same circuit with attachment `k` removed.
    pub fn without(&self, k: usize) -> Self {
        let mut p = self.clone();
        p.l.remove(k);
        p.m.remove(k);
        p.e.remove(k);
        p
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n = {n} < 2")));
        }
        for (name, v) in [("M", &self.m), ("E", &self.e)] {
            if v.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {} entries, L has {n}",
                    v.len()
                )));
            }
        }
        let all = [self.l_c, self.e_c, self.phi_cx];
        if all
            .iter()
            .chain(&self.l)
            .chain(&self.m)
            .chain(&self.e)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite circuit parameter".into()));
        }
        if !(self.l_c > 0.0) {
            return Err(Error::InvalidParameter(format!("L_c = {} ≤ 0", self.l_c)));
        }
        for (i, &l) in self.l.iter().enumerate() {
            if !(l > 0.0) {
                return Err(Error::InvalidParameter(format!("L_{} = {l} ≤ 0", i + 1)));
            }
            let m = self.m[i];
            if m.abs() >= (self.l_c * l).sqrt() {
                return Err(Error::Passivity(format!(
                    "|M_{}| = {} ≥ sqrt(L_c L_{}) = {}",
                    i + 1,
                    m.abs(),
                    i + 1,
                    (self.l_c * l).sqrt()
                )));
            }
        }
        let schur = self.schur();
        if !(schur > 0.0) {
            return Err(Error::Passivity(format!(
                "L_c - Σ M_i²/L_i = {schur} ≤ 0, inductance matrix not positive definite"
            )));
        }
        Ok(())
    }

    fn schur(&self) -> f64 {
        self.l_c - self.m.iter().zip(&self.l).map(|(m, l)| m * m / l).sum::<f64>()
    }
}

/// `(n+1)×(n+1)` inductance matrix: `L_c` at the corner, `-M_i` on the
/// first row and column, `L_i` on the diagonal.
pub fn build_inductance_matrix(p: &CircuitParams) -> Result<DMatrix<f64>> {
    p.validate()?;
    let n = p.n();
    let mut l = DMatrix::zeros(n + 1, n + 1);
    l[(0, 0)] = p.l_c;
    for i in 0..n {
        l[(i + 1, i + 1)] = p.l[i];
        l[(0, i + 1)] = -p.m[i];
        l[(i + 1, 0)] = -p.m[i];
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseOrder {
    Exact,
    /// Neumann series about the diagonal, kept through second order in the
    /// off-diagonal entries.
    M2,
}

fn symmetrize(mut a: DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = (a[(i, j)] + a[(j, i)]) / 2.0;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Inverse of an inductance matrix.
///
/// With `D` the diagonal and `m = D - L`, the `M2` form is
/// `D⁻¹ + D⁻¹mD⁻¹ + D⁻¹mD⁻¹mD⁻¹`; for the coupler matrix this is
/// `(0,0) = 1/L_c + Σ M_i²/(L_c² L_i)`, `(0,i) = M_i/(L_c L_i)`,
/// `(i,j) = δ_ij/L_i + M_i M_j/(L_c L_i L_j)`. Symmetric input gives
/// exactly symmetric output.
pub fn truncated_inverse(lmat: &DMatrix<f64>, order: InverseOrder) -> Result<DMatrix<f64>> {
    if !lmat.is_square() {
        return Err(Error::Dimension {
            expected: lmat.nrows(),
            got: lmat.ncols(),
        });
    }
    let symmetric = lmat == &lmat.transpose();
    let inv = match order {
        InverseOrder::Exact => lmat.clone().try_inverse().ok_or(Error::Singular)?,
        InverseOrder::M2 => {
            let n = lmat.nrows();
            let mut d_inv = DMatrix::zeros(n, n);
            for i in 0..n {
                let d = lmat[(i, i)];
                if d == 0.0 {
                    return Err(Error::Singular);
                }
                d_inv[(i, i)] = 1.0 / d;
            }
            let m = DMatrix::from_diagonal(&lmat.diagonal()) - lmat;
            let first = &d_inv * &m * &d_inv;
            let second = &first * &m * &d_inv;
            d_inv + first + second
        }
    };
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(if symmetric { symmetrize(inv) } else { inv })
}

/// Validated circuit with its exact inverse inductance matrix cached.
#[derive(Clone, Debug)]
pub struct Circuit {
    params: CircuitParams,
    inv: DMatrix<f64>,
}

impl Circuit {
    pub fn new(params: CircuitParams) -> Result<Self> {
        let l = build_inductance_matrix(&params)?;
        let inv = truncated_inverse(&l, InverseOrder::Exact)?;
        Ok(Circuit { params, inv })
    }

    pub fn params(&self) -> &CircuitParams {
        &self.params
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        let want = self.params.n() + 1;
        if v.len() != want {
            return Err(Error::Dimension {
                expected: want,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn potential(&self, phi: &[f64], phix: &[f64]) -> Result<f64> {
        self.check_len(phi)?;
        self.check_len(phix)?;
        let p = &self.params;
        let x: Vec<f64> = phi.iter().zip(phix).map(|(a, b)| a - b).collect();
        let mut u = -p.e_c * phi[0].cos();
        for (e, f) in p.e.iter().zip(&phi[1..]) {
            u -= e * f.cos();
        }
        let mut quad = 0.0;
        for i in 0..x.len() {
            let row: f64 = (0..x.len()).map(|j| self.inv[(i, j)] * x[j]).sum();
            quad += x[i] * row;
        }
        Ok(u + 0.5 * quad)
    }

    pub fn gradient(&self, phi: &[f64], phix: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi)?;
        self.check_len(phix)?;
        let p = &self.params;
        let x: Vec<f64> = phi.iter().zip(phix).map(|(a, b)| a - b).collect();
        Ok((0..x.len())
            .map(|i| {
                let e = if i == 0 { p.e_c } else { p.e[i - 1] };
                e * phi[i].sin() + (0..x.len()).map(|j| self.inv[(i, j)] * x[j]).sum::<f64>()
            })
            .collect())
    }

    /// Bias fluxes `(φ_cˣ, π + (M_i/L_i)(φ_c0 - φ_cˣ), …)`.
    pub fn bias_fluxes(&self, phi_c0: f64) -> Vec<f64> {
        bias_fluxes(&self.params, phi_c0)
    }

    /// Coupler phase minimising `U` with every qubit at its bias point.
    pub fn coupler_phase(&self) -> Result<f64> {
        let p = &self.params;
        minimize_coupler(p.e_c, self.inv[(0, 0)], p.phi_cx)
    }

    /// Coupler phase and potential on the Born-Oppenheimer surface for the
    /// given qubit phases.
    pub fn born_oppenheimer(&self, qubits: &[f64], phix: &[f64]) -> Result<(f64, f64)> {
        self.check_len(phix)?;
        if qubits.len() != self.params.n() {
            return Err(Error::Dimension {
                expected: self.params.n(),
                got: qubits.len(),
            });
        }
        let a = self.inv[(0, 0)];
        let b: f64 = qubits
            .iter()
            .enumerate()
            .map(|(i, q)| self.inv[(0, i + 1)] * (q - phix[i + 1]))
            .sum();
        let phi_c = minimize_coupler(self.params.e_c, a, phix[0] - b / a)?;
        let mut phi = Vec::with_capacity(qubits.len() + 1);
        phi.push(phi_c);
        phi.extend_from_slice(qubits);
        Ok((phi_c, self.potential(&phi, phix)?))
    }

    /// Operating point: coupler phase and bias fluxes.
    pub fn operating_point(&self) -> Result<(f64, Vec<f64>)> {
        let phi_c0 = self.coupler_phase()?;
        Ok((phi_c0, self.bias_fluxes(phi_c0)))
    }

    /// Born-Oppenheimer potential with `qubits[k] = π + s_k δ` on `sites`
    /// and `π` elsewhere.
    fn displaced(&self, phix: &[f64], sites: &[usize], signs: &[f64], delta: f64) -> Result<f64> {
        let mut q = vec![std::f64::consts::PI; self.params.n()];
        for (&k, &s) in sites.iter().zip(signs) {
            q[k] += s * delta;
        }
        Ok(self.born_oppenheimer(&q, phix)?.1)
    }

    /// `¼[U(++) - U(+-) - U(-+) + U(--)] / δ²` for every pair.
    pub fn effective_couplings(&self, delta: f64) -> Result<CouplingMatrix> {
        check_delta(delta)?;
        let (_, phix) = self.operating_point()?;
        let n = self.params.n();
        let mut k = CouplingMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut acc = 0.0;
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    acc += si * sj * self.displaced(&phix, &[i, j], &[si, sj], delta)?;
                }
                k.set(i, j, acc / 4.0 / (delta * delta));
            }
        }
        Ok(k)
    }

    /// `(1/8) Σ s_i s_j s_k U` over the eight sign patterns of one triple.
    pub fn three_point(&self, triple: [usize; 3], delta: f64) -> Result<f64> {
        check_delta(delta)?;
        let (_, phix) = self.operating_point()?;
        self.three_point_at(&phix, triple, delta)
    }

    fn three_point_at(&self, phix: &[f64], triple: [usize; 3], delta: f64) -> Result<f64> {
        let mut acc = 0.0;
        for pattern in 0..8u32 {
            let s: Vec<f64> = (0..3)
                .map(|b| if pattern >> b & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            acc += s[0] * s[1] * s[2] * self.displaced(phix, &triple, &s, delta)?;
        }
        Ok(acc / 8.0)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be > 0")));
    }
    Ok(())
}

/// Minimise `-e_c cos φ + ½ a (φ - center)²` over φ.
///
/// Stationary points satisfy `|φ - center| ≤ |e_c|/a`; that window is
/// scanned on a fixed grid and every sign change of the derivative from
/// negative to positive is refined by bisection.
fn minimize_coupler(e_c: f64, a: f64, center: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Passivity(format!("(L⁻¹)_00 = {a} ≤ 0")));
    }
    if e_c == 0.0 {
        return Ok(center);
    }
    let g = |phi: f64| e_c * phi.sin() + a * (phi - center);
    let reach = e_c.abs() / a + 0.5;
    let steps = ((2.0 * reach / 5e-3).ceil() as usize).max(1024);
    let h = 2.0 * reach / steps as f64;
    let grid = |k: usize| center - reach + k as f64 * h;

    let mut minima = Vec::new();
    let mut g_prev = g(grid(0));
    for k in 1..=steps {
        let g_here = g(grid(k));
        if g_prev <= 0.0 && g_here > 0.0 {
            minima.push((grid(k - 1), grid(k)));
        }
        g_prev = g_here;
    }
    match minima.len() {
        0 => Err(Error::InvalidParameter(
            "no coupler minimum found in the search window".into(),
        )),
        1 => {
            let (mut lo, mut hi) = minima[0];
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let phi = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
            if g(phi).abs() > GRADIENT_TOL * (1.0 + e_c.abs() + a * phi.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "coupler minimisation stalled at |∂U/∂φ_c| = {:e}",
                    g(phi).abs()
                )));
            }
            Ok(phi)
        }
        count => Err(Error::Bistable(count)),
    }
}

/// `(φ_cˣ, π + (M_i/L_i)(φ_c0 - φ_cˣ), …)`.
pub fn bias_fluxes(p: &CircuitParams, phi_c0: f64) -> Vec<f64> {
    let shift = phi_c0 - p.phi_cx;
    std::iter::once(p.phi_cx)
        .chain(
            p.m.iter()
                .zip(&p.l)
                .map(|(m, l)| std::f64::consts::PI + (m / l) * shift),
        )
        .collect()
}

pub fn circuit_potential(p: &CircuitParams, phi: &[f64], phix: &[f64]) -> Result<f64> {
    Circuit::new(p.clone())?.potential(phi, phix)
}

pub fn solve_coupler_phase(p: &CircuitParams) -> Result<f64> {
    Circuit::new(p.clone())?.coupler_phase()
}

pub fn extract_effective_couplings(p: &CircuitParams) -> Result<CouplingMatrix> {
    extract_effective_couplings_with(p, DEFAULT_DELTA)
}

pub fn extract_effective_couplings_with(p: &CircuitParams, delta: f64) -> Result<CouplingMatrix> {
    Circuit::new(p.clone())?.effective_couplings(delta)
}

/// Coupler susceptibility `β cos φ_c0 / (1 + β cos φ_c0)` with `β = L_c E_c`.
pub fn susceptibility(p: &CircuitParams, phi_c0: f64) -> f64 {
    let bc = p.l_c * p.e_c * phi_c0.cos();
    bc / (1.0 + bc)
}

/// Second-order couplings `M_i M_j F / (L_c L_i L_j)`.
pub fn theory_couplings(p: &CircuitParams, phi_c0: f64) -> CouplingMatrix {
    let f = susceptibility(p, phi_c0);
    let n = p.n();
    let mut k = CouplingMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            k.set(i, j, p.m[i] * p.m[j] * f / (p.l_c * p.l[i] * p.l[j]));
        }
    }
    k
}

/// Spurious-term scale `(E2, E3)`.
///
/// `E2` is the mean second-order coupling times `δ²`; `E3` is the mean
/// three-point coefficient of the full potential over all triples (zero
/// when `n < 3`). Both are energies of the corresponding spin products.
pub fn truncation_spurious_scale(p: &CircuitParams) -> Result<(f64, f64)> {
    truncation_spurious_scale_with(p, DEFAULT_DELTA)
}

pub fn truncation_spurious_scale_with(p: &CircuitParams, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    let c = Circuit::new(p.clone())?;
    let (phi_c0, phix) = c.operating_point()?;
    let e2 = theory_couplings(p, phi_c0).mean_off_diagonal() * delta * delta;
    let n = p.n();
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                sum += c.three_point_at(&phix, [i, j, k], delta)?;
                count += 1;
            }
        }
    }
    let e3 = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok((e2, e3))
}

/// Symmetric pairwise coupling matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CouplingMatrix {
    pub fn zeros(n: usize) -> Self {
        CouplingMatrix {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Set both `(i, j)` and `(j, i)`; diagonal entries stay zero.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i != j {
            self.values[i * self.n + j] = v;
            self.values[j * self.n + i] = v;
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1)).take(self.n)
    }

    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| self.get(i, j)))
    }

    pub fn mean_off_diagonal(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            0.0
        } else {
            self.off_diagonal().sum::<f64>() / pairs as f64
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Element-wise sum, with `other` placed on `sites` of `self`.
    pub fn plus_embedded(&self, other: &CouplingMatrix, sites: &[usize]) -> Result<CouplingMatrix> {
        if sites.len() != other.n {
            return Err(Error::Dimension {
                expected: other.n,
                got: sites.len(),
            });
        }
        if let Some(&s) = sites.iter().find(|&&s| s >= self.n) {
            return Err(Error::IndexOutOfRange { index: s, n: self.n });
        }
        let mut out = self.clone();
        for a in 0..other.n {
            for b in (a + 1)..other.n {
                let (i, j) = (sites[a], sites[b]);
                out.set(i, j, self.get(i, j) + other.get(a, b));
            }
        }
        Ok(out)
    }
}

/// Two coupler loops: the outer one spans every circuit, the inner one only
/// the circuits listed in `inner_sites`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleLoop {
    pub outer: CircuitParams,
    pub inner: CircuitParams,
    pub inner_sites: Vec<usize>,
}

impl DoubleLoop {
    /// Sum of both loops' effective couplings.
    pub fn couplings(&self, delta: f64) -> Result<CouplingMatrix> {
        let outer = extract_effective_couplings_with(&self.outer, delta)?;
        let inner = extract_effective_couplings_with(&self.inner, delta)?;
        outer.plus_embedded(&inner, &self.inner_sites)
    }

    /// Set the inner coupler flux so that the mean coupling among the
    /// inner sites cancels. The coupling depends on the flux only through
    /// `cos φ_c0`, so the root is bracketed on `[0, π]`.
    pub fn balance_inner_flux(&mut self, delta: f64) -> Result<f64> {
        let outer = extract_effective_couplings_with(&self.outer, delta)?;
        let sites = &self.inner_sites;
        let mut target = 0.0;
        let mut pairs = 0usize;
        for a in 0..sites.len() {
            for b in (a + 1)..sites.len() {
                target += outer.get(sites[a], sites[b]);
                pairs += 1;
            }
        }
        if pairs == 0 {
            return Err(Error::InvalidParameter("inner loop needs two sites".into()));
        }
        target /= pairs as f64;
        let mut probe = self.inner.clone();
        let mut residual = |phi: f64| -> Result<f64> {
            probe.phi_cx = phi;
            Ok(extract_effective_couplings_with(&probe, delta)?.mean_off_diagonal() + target)
        };
        let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
        let (r_lo, r_hi) = (residual(lo)?, residual(hi)?);
        if r_lo.signum() == r_hi.signum() {
            return Err(Error::InvalidParameter(format!(
                "inner loop cannot cancel mean coupling {target:e} (range {r_lo:e}..{r_hi:e})"
            )));
        }
        let rising = r_hi > r_lo;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (residual(mid)? > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.inner.phi_cx = 0.5 * (lo + hi);
        Ok(self.inner.phi_cx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn inductance_matrix_structure() {
        let l = build_inductance_matrix(&CircuitParams::uniform(2, 1.0, 0.1, 1.0, 0.0)).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[1.0, -0.1, -0.1, -0.1, 1.0, 0.0, -0.1, 0.0, 1.0]);
        assert_eq!(l, want);
        let l = build_inductance_matrix(&CircuitParams::uniform(3, 2.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(l, DMatrix::from_diagonal_element(4, 4, 2.0));
        let l = build_inductance_matrix(&CircuitParams::preset(8)).unwrap();
        for i in 1..9 {
            for j in 1..9 {
                if i != j {
                    assert_eq!(l[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn passivity_is_enforced() {
        let mut p = CircuitParams::preset(2);
        p.m[0] = 1.0;
        assert!(matches!(p.validate(), Err(Error::Passivity(_))));
        // Each pair passive, but the whole loop is not.
        let p = CircuitParams::uniform(4, 1.0, 0.6, 1.0, 0.0);
        assert!(matches!(build_inductance_matrix(&p), Err(Error::Passivity(_))));
        let mut p = CircuitParams::preset(2);
        p.l[1] = 0.0;
        assert!(p.validate().is_err());
        assert!(CircuitParams::preset(1).validate().is_err());
    }

    #[test]
    fn exact_inverse_residual() {
        let mut p = CircuitParams::preset(5);
        p.m = vec![0.1, 0.12, 0.08, 0.15, 0.05];
        p.l = vec![1.0, 1.1, 0.9, 1.2, 1.05];
        let l = build_inductance_matrix(&p).unwrap();
        let inv = truncated_inverse(&l, InverseOrder::Exact).unwrap();
        let id = DMatrix::<f64>::identity(6, 6);
        assert!(max_abs_diff(&(&l * &inv), &id) < 1e-12);
        assert_eq!(inv, inv.transpose());
    }

    #[test]
    fn decoupled_inverse_is_reciprocal() {
        let l = build_inductance_matrix(&CircuitParams::uniform(3, 2.0, 0.0, 1.0, 0.0)).unwrap();
        let a = truncated_inverse(&l, InverseOrder::Exact).unwrap();
        let b = truncated_inverse(&l, InverseOrder::M2).unwrap();
        assert_eq!(a, DMatrix::from_diagonal_element(4, 4, 0.5));
        assert_eq!(a, b);
    }

    #[test]
    fn m2_closed_form() {
        let mut p = CircuitParams::preset(3);
        p.l = vec![1.0, 2.0, 0.5];
        p.m = vec![0.1, 0.2, -0.05];
        p.l_c = 1.5;
        let inv = truncated_inverse(&build_inductance_matrix(&p).unwrap(), InverseOrder::M2).unwrap();
        let lc = p.l_c;
        let corner = 1.0 / lc + (0..3).map(|i| p.m[i].powi(2) / (lc * lc * p.l[i])).sum::<f64>();
        assert!((inv[(0, 0)] - corner).abs() < 1e-15);
        for i in 0..3 {
            assert!((inv[(0, i + 1)] - p.m[i] / (lc * p.l[i])).abs() < 1e-15);
            for j in 0..3 {
                let d = if i == j { 1.0 / p.l[i] } else { 0.0 };
                let want = d + p.m[i] * p.m[j] / (lc * p.l[i] * p.l[j]);
                assert!((inv[(i + 1, j + 1)] - want).abs() < 1e-15);
            }
        }
        assert_eq!(inv, inv.transpose());
    }

    #[test]
    fn singular_and_non_square() {
        let z = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(truncated_inverse(&z, InverseOrder::Exact), Err(Error::Singular)));
        assert!(matches!(truncated_inverse(&z, InverseOrder::M2), Err(Error::Singular)));
        assert!(truncated_inverse(&DMatrix::zeros(2, 3), InverseOrder::Exact).is_err());
    }

    #[test]
    fn potential_examples() {
        let mut p = CircuitParams::preset(2);
        p.e_c = 0.0;
        p.e = vec![0.0, 0.0];
        let x = [0.3, -1.0, 2.0];
        assert_eq!(circuit_potential(&p, &x, &x).unwrap(), 0.0);
        let p = CircuitParams::preset(2);
        assert_eq!(circuit_potential(&p, &[0.0; 3], &[0.0; 3]).unwrap(), -3.0);
        assert!(circuit_potential(&p, &[0.0; 2], &[0.0; 3]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut p = CircuitParams::preset(3);
        p.m = vec![0.1, 0.2, 0.15];
        p.e = vec![0.8, 1.2, 1.0];
        let c = Circuit::new(p).unwrap();
        let phi = [0.4, 2.9, 3.3, -0.7];
        let phix = [0.2, 3.0, 3.1, 0.5];
        let g = c.gradient(&phi, &phix).unwrap();
        let h = 1e-5;
        for k in 0..4 {
            let mut up = phi;
            let mut dn = phi;
            up[k] += h;
            dn[k] -= h;
            let fd = (c.potential(&up, &phix).unwrap() - c.potential(&dn, &phix).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-6 * g[k].abs().max(1e-3), "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn bias_flux_examples() {
        let p = CircuitParams::preset(3);
        assert_eq!(bias_fluxes(&p, p.phi_cx), vec![0.0, std::f64::consts::PI, std::f64::consts::PI, std::f64::consts::PI]);
        let p = CircuitParams::uniform(4, 1.0, 0.1, 1.0, 0.3);
        let b = bias_fluxes(&p, 0.5);
        for v in &b[1..] {
            assert!((v - std::f64::consts::PI - 0.02).abs() < 1e-15);
        }
        let mut q = p.clone();
        q.m[0] = 0.2;
        let c = bias_fluxes(&q, 0.5);
        assert!(((c[1] - std::f64::consts::PI) - 2.0 * (b[1] - std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn coupler_phase_examples() {
        assert_eq!(solve_coupler_phase(&CircuitParams::preset(4)).unwrap(), 0.0);
        let mut p = CircuitParams::uniform(3, 1.0, 0.1, 1.0, 0.8);
        p.e_c = 0.0;
        assert_eq!(solve_coupler_phase(&p).unwrap(), 0.8);
        let p = CircuitParams::uniform(3, 1.0, 0.1, 0.9, 1.3);
        let c = Circuit::new(p.clone()).unwrap();
        let phi_c0 = c.coupler_phase().unwrap();
        let mut phi = bias_fluxes(&p, phi_c0);
        phi[0] = phi_c0;
        let g = c.gradient(&phi, &bias_fluxes(&p, phi_c0)).unwrap();
        assert!(g[0].abs() < 1e-10, "{}", g[0]);
    }

    #[test]
    fn bistable_coupler_is_rejected() {
        let p = CircuitParams::uniform(2, 1.0, 0.1, 5.0, std::f64::consts::PI);
        assert!(matches!(solve_coupler_phase(&p), Err(Error::Bistable(n)) if n > 1));
        assert!(extract_effective_couplings(&p).is_err());
    }

    #[test]
    fn coupling_matrix_is_symmetric_with_zero_diagonal() {
        let mut p = CircuitParams::preset(4);
        p.m = vec![0.1, 0.13, 0.07, 0.11];
        let k = extract_effective_couplings(&p).unwrap();
        assert!(k.is_symmetric());
        assert!((0..4).all(|i| k.get(i, i) == 0.0));
    }

    #[test]
    fn decoupled_circuit_has_no_couplings() {
        let p = CircuitParams::uniform(3, 1.0, 0.0, 1.0, 0.4);
        let k = extract_effective_couplings(&p).unwrap();
        assert!(k.off_diagonal().all(|v| v.abs() < 1e-12));
        let mut p = CircuitParams::preset(3);
        p.e_c = 0.0;
        let k = extract_effective_couplings(&p).unwrap();
        assert!(k.off_diagonal().all(|v| v.abs() < 1e-9), "{k:?}");
    }

    #[test]
    fn zero_mutual_gives_zero_scale() {
        let p = CircuitParams::uniform(3, 1.0, 0.0, 1.0, 1.0);
        let (e2, e3) = truncation_spurious_scale(&p).unwrap();
        assert_eq!(e2, 0.0);
        assert!(e3.abs() < 1e-14);
    }

    #[test]
    fn params_json() {
        let p: CircuitParams = serde_json::from_str(
            r#"{"L_c":1,"L":[1,1],"M":[0.1,0.1],"E_c":1,"E":[1,1]}"#,
        )
        .unwrap();
        assert_eq!(p, CircuitParams::preset(2));
    }
}
