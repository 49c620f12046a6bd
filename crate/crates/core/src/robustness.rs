//! Tolerance of the counting gadget to fabrication errors.
//!
//! A [`MismatchSample`] holds unit-normal relative mutual-inductance errors:
//! `2N` on the outer loop (logical spins first, then ancillae) and `N` on the
//! inner loop (ancillae). The error Hamiltonian is first order in these
//! errors and the total Hamiltonian is `gadget + σ · error`.
//!
//! Random streams: sample `k` of a batch with seed `s` is drawn from
//! `ChaCha8Rng::seed_from_u64(s)` with stream `k`, outer values first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::gadget::{GadgetKind, GadgetSpec};
use crate::spin::{energy_table, IsingHamiltonian, ENUMERATION_LIMIT};
use crate::{Error, Exec, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Bisection steps for critical σ on `[0, 1]` (width `2⁻³⁰`).
const SIGMA_STEPS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MismatchSample {
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

impl MismatchSample {
    /// Sample `index` of the batch seeded with `seed`.
    pub fn draw(n: usize, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let outer = (0..2 * n).map(|_| normal()).collect();
        let inner = (0..n).map(|_| normal()).collect();
        MismatchSample {
            outer,
            inner,
            seed,
            index,
        }
    }

    /// Explicit error values (seed and index zero).
    pub fn from_values(outer: Vec<f64>, inner: Vec<f64>) -> Self {
        MismatchSample {
            outer,
            inner,
            seed: 0,
            index: 0,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_values(vec![0.0; 2 * n], vec![0.0; n])
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.outer.len() != 2 * n {
            return Err(Error::Dimension {
                expected: 2 * n,
                got: self.outer.len(),
            });
        }
        if self.inner.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.inner.len(),
            });
        }
        if self.outer.iter().chain(&self.inner).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite mismatch value".into()));
        }
        Ok(())
    }
}

fn counting_spec(spec: &GadgetSpec) -> Result<()> {
    if spec.kind == GadgetKind::ThreeLocal {
        return Err(Error::InvalidParameter(
            "mismatch analysis applies to the double-loop counting gadget".into(),
        ));
    }
    if 2 * spec.n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n: 2 * spec.n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// First-order error Hamiltonian for unit mismatch `m`.
///
/// Every nominal coupling `J_kl` contributes `J_kl (ε_k + ε_l)` with outer
/// errors. Ancilla pairs, nominally cancelled between the two loops, keep
/// the residue `J_a (ε^o_i + ε^o_j - ε^in_i - ε^in_j)`.
pub fn build_error_hamiltonian(spec: &GadgetSpec, m: &MismatchSample) -> Result<IsingHamiltonian> {
    counting_spec(spec)?;
    let n = spec.n;
    m.check(n)?;
    let nominal = spec.build()?;
    let mut err = IsingHamiltonian::new(2 * n);
    for t in nominal.terms().filter(|t| t.support.len() == 2) {
        let (k, l) = (t.support[0], t.support[1]);
        err.add_coupling(k, l, t.weight * (m.outer[k] + m.outer[l]))?;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let w = spec.j_a
                * (m.outer[n + a] + m.outer[n + b] - m.inner[a] - m.inner[b]);
            err.add_coupling(n + a, n + b, w)?;
        }
    }
    Ok(err)
}

/// Configuration bits of the non-spurious state for logical bits `lb`.
fn canonical_bits(n: usize, lb: u64) -> u64 {
    let k = lb.count_ones();
    let full = (1u64 << n) - 1;
    let anc = full & !((1u64 << k) - 1);
    lb | (anc << n)
}

/// Ancilla field deltas that equalise the error's mean energy across the
/// non-spurious states of each `N_up` sector.
///
/// Flipping ancilla `k` moves sector `k` by `-2 δ_k` relative to sector
/// `k - 1`, so `δ_k = (m_k - m_{k-1}) / 2` with `m_k` the sector mean.
pub fn correct_ancilla_fields(spec: &GadgetSpec, err: &IsingHamiltonian) -> Result<Vec<f64>> {
    counting_spec(spec)?;
    let n = spec.n;
    if err.n() != 2 * n {
        return Err(Error::Dimension {
            expected: 2 * n,
            got: err.n(),
        });
    }
    let kernel = err.kernel();
    let mut sums = vec![0.0; n + 1];
    let mut counts = vec![0usize; n + 1];
    for lb in 0..(1u64 << n) {
        let k = lb.count_ones() as usize;
        sums[k] += kernel.energy(canonical_bits(n, lb));
        counts[k] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    Ok(means.windows(2).map(|w| (w[1] - w[0]) / 2.0).collect())
}

/// Outcome of one failure test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureVerdict {
    pub failed: bool,
    /// Lowest spurious energy minus highest non-spurious energy.
    pub margin: f64,
    /// Ancilla fields of the Hamiltonian that was tested.
    pub ancilla_fields: Vec<f64>,
    pub corrected: bool,
}

/// Critical mismatch along one sample direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum CriticalSigma {
    Crossing(f64),
    /// No crossing for `σ ≤ 1`.
    AtLeastOne,
}

impl CriticalSigma {
    /// Crossing point, or `1.0` when none was found.
    pub fn value(self) -> f64 {
        match self {
            CriticalSigma::Crossing(s) => s,
            CriticalSigma::AtLeastOne => 1.0,
        }
    }
}

impl std::fmt::Display for CriticalSigma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriticalSigma::Crossing(s) => write!(f, "{s}"),
            CriticalSigma::AtLeastOne => f.write_str("≥ 1"),
        }
    }
}

/// Energy directions of one sample.
struct Direction {
    raw: Vec<f64>,
    corrected: Vec<f64>,
    deltas: Vec<f64>,
}

/// Precomputed nominal spectrum and non-spurious set for one gadget.
#[derive(Clone, Debug)]
pub struct Analyzer {
    spec: GadgetSpec,
    nominal_fields: Vec<f64>,
    e0: Vec<f64>,
    canonical: Vec<usize>,
    spurious: Vec<bool>,
}

impl Analyzer {
    pub fn new(spec: &GadgetSpec) -> Result<Self> {
        counting_spec(spec)?;
        let h = spec.build()?;
        let n = spec.n;
        let e0 = energy_table(&h)?;
        let canonical: Vec<usize> = (0..(1u64 << n))
            .map(|lb| canonical_bits(n, lb) as usize)
            .collect();
        let mut spurious = vec![true; e0.len()];
        for &b in &canonical {
            spurious[b] = false;
        }
        Ok(Analyzer {
            spec: spec.clone(),
            nominal_fields: (n..2 * n).map(|a| h.weight(&[a])).collect(),
            e0,
            canonical,
            spurious,
        })
    }

    pub fn spec(&self) -> &GadgetSpec {
        &self.spec
    }

    /// Margin of an energy table indexed by configuration bits.
    pub fn margin_of(&self, energies: &[f64]) -> f64 {
        let top = self
            .canonical
            .iter()
            .map(|&b| energies[b])
            .fold(f64::NEG_INFINITY, f64::max);
        let low = energies
            .iter()
            .zip(&self.spurious)
            .filter(|(_, &s)| s)
            .map(|(&e, _)| e)
            .fold(f64::INFINITY, f64::min);
        low - top
    }

    fn margin_along(&self, dir: &[f64], sigma: f64) -> f64 {
        let mut top = f64::NEG_INFINITY;
        for &b in &self.canonical {
            top = top.max(self.e0[b] + sigma * dir[b]);
        }
        let mut low = f64::INFINITY;
        for ((&e, &d), &s) in self.e0.iter().zip(dir).zip(&self.spurious) {
            if s {
                low = low.min(e + sigma * d);
            }
        }
        low - top
    }

    fn direction(&self, m: &MismatchSample) -> Result<Direction> {
        let err = build_error_hamiltonian(&self.spec, m)?;
        let deltas = correct_ancilla_fields(&self.spec, &err)?;
        let raw = energy_table(&err)?;
        let n = self.spec.n;
        let corrected = raw
            .iter()
            .enumerate()
            .map(|(b, &e)| {
                let shift: f64 = deltas
                    .iter()
                    .enumerate()
                    .map(|(a, d)| if (b >> (n + a)) & 1 == 1 { *d } else { -*d })
                    .sum();
                e + shift
            })
            .collect();
        Ok(Direction {
            raw,
            corrected,
            deltas,
        })
    }

    /// Margin at `sigma`, and whether the correction was kept.
    ///
    /// The correction is kept only when it does not lower the margin.
    fn evaluate(&self, dir: &Direction, sigma: f64, correct: bool) -> (f64, bool) {
        let raw = self.margin_along(&dir.raw, sigma);
        if correct {
            let fixed = self.margin_along(&dir.corrected, sigma);
            if fixed >= raw {
                return (fixed, true);
            }
        }
        (raw, false)
    }

    pub fn failure_check(&self, sigma: f64, m: &MismatchSample, correct: bool) -> Result<FailureVerdict> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("σ = {sigma} must be ≥ 0")));
        }
        let dir = self.direction(m)?;
        let (margin, used) = self.evaluate(&dir, sigma, correct);
        let ancilla_fields = self
            .nominal_fields
            .iter()
            .zip(&dir.deltas)
            .map(|(h, d)| if used { h + sigma * d } else { *h })
            .collect();
        Ok(FailureVerdict {
            failed: margin < 0.0,
            margin,
            ancilla_fields,
            corrected: used,
        })
    }

    fn critical_along(&self, dir: &Direction, correct: bool) -> CriticalSigma {
        let fails = |s: f64| self.evaluate(dir, s, correct).0 < 0.0;
        if !fails(1.0) {
            return CriticalSigma::AtLeastOne;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..SIGMA_STEPS {
            let mid = 0.5 * (lo + hi);
            if fails(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        CriticalSigma::Crossing(0.5 * (lo + hi))
    }

    pub fn critical_sigma(&self, m: &MismatchSample, correct: bool) -> Result<CriticalSigma> {
        Ok(self.critical_along(&self.direction(m)?, correct))
    }

    /// Critical σ for samples `0..samples` of the batch seeded with `seed`.
    pub fn critical_sigmas(
        &self,
        samples: usize,
        seed: u64,
        correct: bool,
        exec: Exec,
    ) -> Result<Vec<CriticalSigma>> {
        exec.map_range(samples, |k| {
            let m = MismatchSample::draw(self.spec.n, seed, k as u64);
            self.critical_sigma(&m, correct)
        })
        .into_iter()
        .collect()
    }

    /// Pass counts on `grid` for samples `0..samples`.
    pub fn yield_curve(
        &self,
        grid: &[f64],
        samples: usize,
        seed: u64,
        correct: bool,
        exec: Exec,
    ) -> Result<Vec<YieldPoint>> {
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be ≥ 1".into()));
        }
        if let Some(s) = grid.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!("σ = {s} must be ≥ 0")));
        }
        let per_sample: Vec<Vec<bool>> = exec
            .map_range(samples, |k| {
                let m = MismatchSample::draw(self.spec.n, seed, k as u64);
                let dir = self.direction(&m)?;
                Ok(grid
                    .iter()
                    .map(|&s| self.evaluate(&dir, s, correct).0 >= 0.0)
                    .collect())
            })
            .into_iter()
            .collect::<Result<_>>()?;
        Ok(grid
            .iter()
            .enumerate()
            .map(|(g, &sigma)| {
                let passes = per_sample.iter().filter(|p| p[g]).count();
                YieldPoint::new(sigma, samples, passes)
            })
            .collect())
    }
}

pub fn failure_check(
    spec: &GadgetSpec,
    sigma: f64,
    m: &MismatchSample,
    correct: bool,
) -> Result<FailureVerdict> {
    Analyzer::new(spec)?.failure_check(sigma, m, correct)
}

pub fn critical_sigma(spec: &GadgetSpec, m: &MismatchSample, correct: bool) -> Result<CriticalSigma> {
    Analyzer::new(spec)?.critical_sigma(m, correct)
}

/// One point of a yield curve with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldPoint {
    pub sigma: f64,
    pub samples: usize,
    pub passes: usize,
    #[serde(rename = "yield")]
    pub yield_fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl YieldPoint {
    pub fn new(sigma: f64, samples: usize, passes: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(passes, samples);
        YieldPoint {
            sigma,
            samples,
            passes,
            yield_fraction: passes as f64 / samples as f64,
            ci_low,
            ci_high,
        }
    }

    pub const COLUMNS: [&'static str; 6] = ["sigma", "samples", "passes", "yield", "ci_low", "ci_high"];
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(passes: usize, samples: usize) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let p = passes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Corrected-mode yield with the default executor.
pub fn yield_curve(spec: &GadgetSpec, grid: &[f64], samples: usize, seed: u64) -> Result<Vec<YieldPoint>> {
    Analyzer::new(spec)?.yield_curve(grid, samples, seed, true, Exec::default())
}

/// Which spin triples carry the spurious three-body term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleSet {
    /// Every unordered triple of the `2N` spins.
    #[default]
    All,
    /// Every triple except those made only of ancillae.
    NoAncillaTriples,
    LogicalOnly,
}

impl TripleSet {
    fn admits(self, ancillae: usize) -> bool {
        match self {
            TripleSet::All => true,
            TripleSet::NoAncillaTriples => ancillae < 3,
            TripleSet::LogicalOnly => ancillae == 0,
        }
    }
}

/// Largest `|E3/E2|` (with `E2 = J_a`) before a spurious state drops below
/// the highest non-spurious state. `same_sign` sets `E3` parallel to `E2`.
pub fn three_body_tolerance(spec: &GadgetSpec, same_sign: bool) -> Result<f64> {
    three_body_tolerance_with(spec, same_sign, TripleSet::default())
}

pub fn three_body_tolerance_with(spec: &GadgetSpec, same_sign: bool, triples: TripleSet) -> Result<f64> {
    let analyzer = Analyzer::new(spec)?;
    let n = spec.n;
    let mut t = IsingHamiltonian::new(2 * n);
    for i in 0..2 * n {
        for j in (i + 1)..2 * n {
            for k in (j + 1)..2 * n {
                let anc = [i, j, k].iter().filter(|&&x| x >= n).count();
                if triples.admits(anc) {
                    t.add_term(&[i, j, k], 1.0)?;
                }
            }
        }
    }
    let sign = if same_sign { 1.0 } else { -1.0 };
    let dir: Vec<f64> = energy_table(&t)?
        .into_iter()
        .map(|e| sign * spec.j_a * e)
        .collect();
    let fails = |r: f64| analyzer.margin_along(&dir, r) < 0.0;
    if fails(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !fails(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidParameter(
                "three-body term never closes the margin".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mismatch level below which correction is guaranteed:
/// `min(|J_a - q_0| - |J_N|, q_0 - |J_N|) / (|J_a| (2N(N-1) + 2N(2N-1)))`.
///
/// Negative when the gadget's validity inequalities fail.
pub fn correctability_bound(n: usize, j_a: f64, q_0: f64, j_n: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} < 2")));
    }
    if j_a == 0.0 || !j_a.is_finite() || !q_0.is_finite() || !j_n.is_finite() {
        return Err(Error::InvalidParameter("J_a must be finite and non-zero".into()));
    }
    let nf = n as f64;
    let slack = ((j_a - q_0).abs() - j_n.abs()).min(q_0 - j_n.abs());
    Ok(slack / (j_a.abs() * (2.0 * nf * (nf - 1.0) + 2.0 * nf * (2.0 * nf - 1.0))))
}

/// Margin of the unperturbed gadget: `2 (min(q_0, 2J_a - q_0) - s)` with
/// `s` the largest ancilla bias offset (`|J_N|` for the n-local kind).
pub fn nominal_margin(spec: &GadgetSpec) -> f64 {
    let shift = spec.bias_offsets().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    2.0 * (spec.q_0.min(2.0 * spec.j_a - spec.q_0) - shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> GadgetSpec {
        GadgetSpec::n_local(4, 1.0, 0.5, 0.1)
    }

    #[test]
    fn draws_are_reproducible_and_distinct() {
        let a = MismatchSample::draw(4, 9, 3);
        assert_eq!(a, MismatchSample::draw(4, 9, 3));
        assert_ne!(a.outer, MismatchSample::draw(4, 9, 4).outer);
        assert_ne!(a.outer, MismatchSample::draw(4, 10, 3).outer);
        assert_eq!((a.outer.len(), a.inner.len()), (8, 4));
    }

    #[test]
    fn zero_mismatch_is_empty() {
        let h = build_error_hamiltonian(&four(), &MismatchSample::zero(4)).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn single_outer_logical_error() {
        let mut m = MismatchSample::zero(4);
        m.outer[0] = 0.01;
        let h = build_error_hamiltonian(&four(), &m).unwrap();
        let terms: Vec<_> = h.terms().collect();
        assert_eq!(terms.len(), 7);
        for t in terms {
            assert_eq!(t.support[0], 0);
            assert_eq!(t.weight, 0.01);
        }
    }

    #[test]
    fn single_inner_error() {
        let mut m = MismatchSample::zero(4);
        m.inner[1] = 0.01;
        let h = build_error_hamiltonian(&four(), &m).unwrap();
        let terms: Vec<_> = h.terms().collect();
        assert_eq!(terms.len(), 3);
        for t in terms {
            assert!(t.support.contains(&5) && t.support.iter().all(|&s| s >= 4));
            assert_eq!(t.weight, -0.01);
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let m = MismatchSample::zero(3);
        assert!(build_error_hamiltonian(&four(), &m).is_err());
        assert!(build_error_hamiltonian(&GadgetSpec::three_local(1.0, 0.1), &MismatchSample::zero(3)).is_err());
    }

    #[test]
    fn outer_logical_error_needs_no_correction() {
        let mut m = MismatchSample::zero(4);
        m.outer[2] = 0.3;
        let err = build_error_hamiltonian(&four(), &m).unwrap();
        let d = correct_ancilla_fields(&four(), &err).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-15), "{d:?}");
        let d0 = correct_ancilla_fields(&four(), &IsingHamiltonian::new(8)).unwrap();
        assert_eq!(d0, vec![0.0; 4]);
    }

    #[test]
    fn inner_error_is_corrected() {
        let spec = GadgetSpec::n_local(4, 1.0, 0.5, 0.0);
        let mut m = MismatchSample::zero(4);
        m.inner[0] = 1.0;
        let err = build_error_hamiltonian(&spec, &m).unwrap();
        let d = correct_ancilla_fields(&spec, &err).unwrap();
        assert!(d.iter().any(|v| v.abs() > 1e-3), "{d:?}");
        let raw = failure_check(&spec, 0.1, &m, false).unwrap();
        let fixed = failure_check(&spec, 0.1, &m, true).unwrap();
        assert!(fixed.corrected);
        assert!(fixed.margin > raw.margin, "{} vs {}", fixed.margin, raw.margin);
    }

    #[test]
    fn baseline_margin() {
        let spec = four();
        let v = failure_check(&spec, 0.0, &MismatchSample::draw(4, 1, 0), true).unwrap();
        assert!(!v.failed);
        assert!((v.margin - nominal_margin(&spec)).abs() < 1e-12);
        assert!((v.margin - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_sample_never_crosses() {
        let c = critical_sigma(&four(), &MismatchSample::zero(4), true).unwrap();
        assert_eq!(c, CriticalSigma::AtLeastOne);
        assert_eq!(c.to_string(), "≥ 1");
    }

    #[test]
    fn critical_sigma_brackets_failure() {
        let a = Analyzer::new(&four()).unwrap();
        let m = MismatchSample::draw(4, 5, 17);
        let CriticalSigma::Crossing(s) = a.critical_sigma(&m, false).unwrap() else {
            panic!("expected a crossing")
        };
        assert!(!a.failure_check(s - 1e-6, &m, false).unwrap().failed);
        assert!(a.failure_check(s + 1e-6, &m, false).unwrap().failed);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(correctability_bound(4, 1.0, 0.5, 0.0).unwrap(), 0.00625);
        assert_eq!(correctability_bound(4, 1.0, 0.5, 0.5).unwrap(), 0.0);
        assert!(correctability_bound(1, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(10_000, 10_000);
        assert_eq!(hi, 1.0);
        assert!((lo - 0.999_615_98).abs() < 1e-6, "{lo}");
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831_4).abs() < 1e-6 && (hi - 0.596_168_6).abs() < 1e-6);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn yield_at_zero_is_one() {
        let a = Analyzer::new(&four()).unwrap();
        let y = a.yield_curve(&[0.0], 50, 3, true, Exec::Sequential).unwrap();
        assert_eq!(y[0].passes, 50);
        assert_eq!(y[0].yield_fraction, 1.0);
        assert!(a.yield_curve(&[0.0], 0, 3, true, Exec::Sequential).is_err());
    }
}
