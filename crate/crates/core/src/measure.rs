//! Positive measures on the closed disk: a radial Bergman part plus an
//! optional circle part (arc-restricted Lebesgue measure or a power weight
//! vanishing at ζ = 1), with exact moment access.
//!
//! Lebesgue measure on the circle is normalized to total mass 1, and the
//! radial measure `dA_α = (α + 1)(1 − |z|²)^α dm₂` is normalized so that its
//! zeroth moment is 1.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::special::{ln_gamma, ln_gamma_ratio, CompensatedSum};

/// Default certified tail bound for power-weight Fourier coefficients.
pub const DEFAULT_FOURIER_TOL: f64 = 1e-12;

/// Cap on the number of convolution terms summed for one coefficient table.
pub const MAX_SERIES_TERMS: usize = 1 << 26;

/// `v_n = n! Γ(α + 2) / Γ(α + n + 2)`, the n-th moment `∫ |z|^{2n} dA_α`.
pub fn radial_moment(alpha: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(radial_moment_unchecked(alpha, n))
}

fn radial_moment_unchecked(alpha: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let b = alpha + 1.0;
    (ln_gamma_ratio(1.0, b) - ln_gamma_ratio(n as f64 + 1.0, b)).exp()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > -1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("Bergman exponent must exceed -1, got {alpha}")))
    }
}

/// The radial weight `(α + 1)(1 − |z|²)^α` on the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialRaw", into = "RadialRaw")]
pub struct RadialWeight {
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RadialRaw {
    alpha: f64,
}

impl TryFrom<RadialRaw> for RadialWeight {
    type Error = LabError;
    fn try_from(raw: RadialRaw) -> Result<Self> {
        Self::new(raw.alpha)
    }
}

impl From<RadialWeight> for RadialRaw {
    fn from(w: RadialWeight) -> Self {
        RadialRaw { alpha: w.alpha }
    }
}

impl RadialWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn moment(&self, n: u64) -> f64 {
        radial_moment_unchecked(self.alpha, n)
    }
}

/// A closed arc `{e^{iθ} : start ≤ θ ≤ start + length}`, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    fn is_full(&self) -> bool {
        self.length >= TAU
    }
}

/// Finite union of pairwise disjoint closed arcs, sorted by start angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl TryFrom<Vec<[f64; 2]>> for ArcSet {
    type Error = LabError;
    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        Self::new(&pairs)
    }
}

impl From<ArcSet> for Vec<[f64; 2]> {
    fn from(set: ArcSet) -> Self {
        set.endpoint_pairs().into_iter().map(|(a, b)| [a, b]).collect()
    }
}

impl ArcSet {
    /// Builds an arc set from `(a, b)` angle pairs with `a ∈ [0, 2π)` and
    /// `b ∈ [0, 2π]`; `b < a` denotes an arc through angle 0 and `(0, 2π)`
    /// the whole circle.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut arcs = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if !(a.is_finite() && b.is_finite() && (0.0..TAU).contains(&a) && (0.0..=TAU).contains(&b))
            {
                return Err(LabError::Domain(format!(
                    "arc endpoints must satisfy 0 <= a < 2pi, 0 <= b <= 2pi; got ({a}, {b})"
                )));
            }
            let length = if b > a { b - a } else { b - a + TAU };
            if length <= 0.0 || a == b {
                return Err(LabError::Domain(format!("arc ({a}, {b}) has zero length")));
            }
            arcs.push(Arc { start: a, length });
        }
        Self::from_arcs(arcs)
    }

    /// Builds an arc set from arcs given in normalized units (fractions of the
    /// full turn).
    pub fn from_normalized(arcs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::from_arcs(
            arcs.into_iter()
                .map(|(start, length)| Arc {
                    start: (start * TAU).rem_euclid(TAU),
                    length: length * TAU,
                })
                .collect(),
        )
    }

    fn from_arcs(mut arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(LabError::Domain("arc set must contain at least one arc".into()));
        }
        if arcs.iter().any(|arc| !(arc.length > 0.0) || arc.length > TAU) {
            return Err(LabError::Domain("arc lengths must lie in (0, 2pi]".into()));
        }
        arcs.sort_by(|p, q| p.start.total_cmp(&q.start));
        for pair in arcs.windows(2) {
            if pair[1].start < pair[0].end() {
                return Err(LabError::Domain(format!(
                    "arcs starting at {} and {} overlap",
                    pair[0].start, pair[1].start
                )));
            }
        }
        let (first, last) = (arcs[0], arcs[arcs.len() - 1]);
        if arcs.len() > 1 && last.end() > first.start + TAU {
            return Err(LabError::Domain("last arc wraps onto the first".into()));
        }
        Ok(Self { arcs })
    }

    pub fn full_circle() -> Self {
        Self {
            arcs: vec![Arc { start: 0.0, length: TAU }],
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn endpoint_pairs(&self) -> Vec<(f64, f64)> {
        self.arcs
            .iter()
            .map(|arc| {
                if arc.is_full() {
                    (0.0, TAU)
                } else {
                    let end = arc.end();
                    (arc.start, if end > TAU { end - TAU } else { end })
                }
            })
            .collect()
    }

    /// `m(E)` with `m` the normalized Lebesgue measure.
    pub fn normalized_length(&self) -> f64 {
        self.arcs.iter().map(|arc| arc.length / TAU).collect::<CompensatedSum>().value()
    }

    /// Normalized lengths of the open arcs complementary to the set.
    pub fn gap_lengths(&self) -> Vec<f64> {
        if self.arcs.len() == 1 {
            let gap = 1.0 - self.arcs[0].length / TAU;
            return if gap > 0.0 { vec![gap] } else { Vec::new() };
        }
        let n = self.arcs.len();
        (0..n)
            .filter_map(|i| {
                let next_start = if i + 1 < n {
                    self.arcs[i + 1].start
                } else {
                    self.arcs[0].start + TAU
                };
                let gap = (next_start - self.arcs[i].end()) / TAU;
                (gap > 0.0).then_some(gap)
            })
            .collect()
    }

    /// `(1/2π) Σ_j ∫_{arc_j} e^{−ikθ} dθ`.
    pub fn fourier(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.normalized_length(), 0.0);
        }
        let kf = k as f64;
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for arc in &self.arcs {
            if arc.is_full() {
                continue;
            }
            let mid = arc.start + 0.5 * arc.length;
            let amplitude = (0.5 * kf * arc.length).sin() / (PI * kf);
            let phase = Complex64::from_polar(amplitude, -kf * mid);
            re.add(phase.re);
            im.add(phase.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Closed-form Fourier coefficient of `m|_E`.
pub fn arc_fourier(arcs: &ArcSet, k: i64) -> Complex64 {
    arcs.fourier(k)
}

/// The circle weight `w(ζ) = |1 − ζ|^s`, `s ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerRaw", into = "PowerRaw")]
pub struct PowerWeight {
    s: f64,
}

#[derive(Serialize, Deserialize)]
struct PowerRaw {
    s: f64,
}

impl TryFrom<PowerRaw> for PowerWeight {
    type Error = LabError;
    fn try_from(raw: PowerRaw) -> Result<Self> {
        Self::new(raw.s)
    }
}

impl From<PowerWeight> for PowerRaw {
    fn from(w: PowerWeight) -> Self {
        PowerRaw { s: w.s }
    }
}

/// A Fourier coefficient with its certified truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
    pub converged: bool,
}

impl PowerWeight {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s >= 0.0 {
            Ok(Self { s })
        } else {
            Err(LabError::Domain(format!(
                "power weight exponent must be finite and nonnegative, got {s}"
            )))
        }
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (2.0 * (0.5 * theta).sin().abs()).powf(self.s)
    }

    /// `ŵ(0), …, ŵ(max_k)` from `ŵ(k) = Σ_j a_j a_{j+k}` with
    /// `a_j = (−1)^j binom(s/2, j)`.
    ///
    /// The series is summed in blocks. After `J` terms the remaining tail is
    /// bracketed by comparison with `h_j = Γ(j+u)/Γ(j+v)`, `u = (k−1−3σ)/2`,
    /// `v = u + 2 + 2σ`, `σ = s/2`: the quotient `q_j = a_j a_{j+k} / h_j` is
    /// monotone in `j` (its step ratio minus one has a constant numerator)
    /// and tends to `Γ(−σ)^{−2}`, while `Σ_{j≥J} h_j` telescopes. The midpoint
    /// of the bracket is added and its half-width is the certified bound.
    /// Summation stops once the bound drops below `tol` or after
    /// [`MAX_SERIES_TERMS`] terms.
    pub fn fourier_table(&self, max_k: usize, tol: f64) -> Vec<FourierCoefficient> {
        const CHUNK: usize = 4096;
        let sigma = 0.5 * self.s;
        let width = max_k + 1;
        let finite = sigma.fract() == 0.0;
        let limit = if finite {
            0.0
        } else {
            let c = (PI * sigma).sin().abs() * ln_gamma(1.0 + sigma).exp() / PI;
            c * c
        };

        // buf[i] = a_{base + i}, for i < CHUNK + width
        let mut buf = vec![0.0f64; CHUNK + width];
        let mut next_index = 0usize;
        let mut next_value = 1.0f64;
        let fill = |slot: &mut f64, next_index: &mut usize, next_value: &mut f64| {
            *slot = *next_value;
            let j = *next_index as f64;
            *next_value *= (j - sigma) / (j + 1.0);
            *next_index += 1;
        };
        for slot in buf.iter_mut() {
            fill(slot, &mut next_index, &mut next_value);
        }

        let mut sums = vec![CompensatedSum::default(); width];
        let mut local = vec![0.0f64; width];
        let mut tails = vec![0.0f64; width];
        let mut base = 0usize;
        let (bound, converged) = loop {
            local.iter_mut().for_each(|x| *x = 0.0);
            for j in 0..CHUNK {
                let aj = buf[j];
                if aj == 0.0 {
                    continue;
                }
                for (acc, &ajk) in local.iter_mut().zip(&buf[j..j + width]) {
                    *acc += aj * ajk;
                }
            }
            for (sum, &x) in sums.iter_mut().zip(&local) {
                sum.add(x);
            }
            base += CHUNK;

            buf.copy_within(CHUNK.., 0);
            for slot in &mut buf[width..CHUNK + width] {
                fill(slot, &mut next_index, &mut next_value);
            }

            // buf[0] = a_J with J = base; the tail is Σ_{j ≥ J}.
            let bound = if finite && base as f64 > sigma {
                tails.iter_mut().for_each(|t| *t = 0.0);
                0.0
            } else if (base as f64) > sigma + 1.0 {
                let jf = base as f64;
                let mut worst = 0.0f64;
                for (k, tail) in tails.iter_mut().enumerate() {
                    let u = (k as f64 - 1.0 - 3.0 * sigma) / 2.0;
                    let gap = 2.0 + 2.0 * sigma;
                    let h = (-ln_gamma_ratio(jf + u, gap)).exp();
                    let h_tail = (-ln_gamma_ratio(jf + u, gap - 1.0)).exp() / (gap - 1.0);
                    let q = (buf[0] * buf[k]).abs() / h;
                    let (lo, hi) = (q.min(limit), q.max(limit));
                    *tail = 0.5 * (lo + hi) * h_tail;
                    let rounding = 4.0 * jf * f64::EPSILON * *tail;
                    worst = worst.max(0.5 * (hi - lo) * h_tail + rounding);
                }
                worst
            } else {
                f64::INFINITY
            };
            if bound <= tol {
                break (bound, true);
            }
            if base >= MAX_SERIES_TERMS {
                break (bound, false);
            }
        };

        sums.iter_mut()
            .zip(&tails)
            .map(|(sum, &tail)| {
                sum.add(tail);
                FourierCoefficient {
                    value: sum.value(),
                    tail_bound: bound,
                    terms: base,
                    converged,
                }
            })
            .collect()
    }
}

/// `ŵ(k) = ∫ |1 − ζ|^s ζ̄^k dm` via the binomial convolution series.
pub fn power_weight_fourier(s: f64, k: i64, tol: f64) -> Result<FourierCoefficient> {
    let weight = PowerWeight::new(s)?;
    if !(tol > 0.0) {
        return Err(LabError::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let k = k.unsigned_abs() as usize;
    let table = weight.fourier_table(k, tol);
    Ok(table[k])
}

/// A measure `ν = A_α + c·μ` on the closed disk, where the circle part `μ` is
/// either `m|_E` for an arc set `E` or `|1 − ζ|^s m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRaw", into = "MeasureRaw")]
pub struct MeasureSpec {
    radial: Option<RadialWeight>,
    arcs: Option<ArcSet>,
    power: Option<PowerWeight>,
    circle_scale: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureRaw {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radial: Option<RadialWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arcs: Option<ArcSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power: Option<PowerWeight>,
    #[serde(default = "unit_scale")]
    circle_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl TryFrom<MeasureRaw> for MeasureSpec {
    type Error = LabError;
    fn try_from(raw: MeasureRaw) -> Result<Self> {
        Self::new(raw.radial, raw.arcs, raw.power, raw.circle_scale)
    }
}

impl From<MeasureSpec> for MeasureRaw {
    fn from(spec: MeasureSpec) -> Self {
        MeasureRaw {
            radial: spec.radial,
            arcs: spec.arcs,
            power: spec.power,
            circle_scale: spec.circle_scale,
        }
    }
}

impl MeasureSpec {
    pub fn new(
        radial: Option<RadialWeight>,
        arcs: Option<ArcSet>,
        power: Option<PowerWeight>,
        circle_scale: f64,
    ) -> Result<Self> {
        if radial.is_none() && arcs.is_none() && power.is_none() {
            return Err(LabError::Parameter("measure needs at least one part".into()));
        }
        if arcs.is_some() && power.is_some() {
            return Err(LabError::Parameter(
                "arc-restricted power weights are not supported; give arcs or power, not both".into(),
            ));
        }
        if !(circle_scale.is_finite() && circle_scale > 0.0) {
            return Err(LabError::Domain(format!(
                "circle_scale must be positive, got {circle_scale}"
            )));
        }
        Ok(Self {
            radial,
            arcs,
            power,
            circle_scale,
        })
    }

    /// `A_α` alone.
    pub fn bergman(alpha: f64) -> Result<Self> {
        Self::new(Some(RadialWeight::new(alpha)?), None, None, 1.0)
    }

    /// Normalized Lebesgue measure `m` on the circle.
    pub fn lebesgue() -> Self {
        Self {
            radial: None,
            arcs: Some(ArcSet::full_circle()),
            power: None,
            circle_scale: 1.0,
        }
    }

    /// `A_α + m`.
    pub fn bergman_plus_lebesgue(alpha: f64) -> Result<Self> {
        Self::bergman_plus_arcs(alpha, ArcSet::full_circle())
    }

    /// `A_α + m|_E`.
    pub fn bergman_plus_arcs(alpha: f64, arcs: ArcSet) -> Result<Self> {
        Self::new(Some(RadialWeight::new(alpha)?), Some(arcs), None, 1.0)
    }

    /// `A_α + |1 − ζ|^s m`.
    pub fn bergman_plus_power(alpha: f64, s: f64) -> Result<Self> {
        Self::new(Some(RadialWeight::new(alpha)?), None, Some(PowerWeight::new(s)?), 1.0)
    }

    pub fn with_circle_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(LabError::Domain(format!("circle_scale must be positive, got {scale}")));
        }
        self.circle_scale = scale;
        Ok(self)
    }

    pub fn radial(&self) -> Option<&RadialWeight> {
        self.radial.as_ref()
    }

    pub fn arcs(&self) -> Option<&ArcSet> {
        self.arcs.as_ref()
    }

    pub fn power(&self) -> Option<&PowerWeight> {
        self.power.as_ref()
    }

    pub fn circle_scale(&self) -> f64 {
        self.circle_scale
    }

    pub fn has_circle_part(&self) -> bool {
        self.arcs.is_some() || self.power.is_some()
    }

    /// Fourier coefficients `∫ ζ̄^d dμ` of the scaled circle part for
    /// `0 ≤ d ≤ max_d`.
    pub fn circle_coefficients(&self, max_d: usize, tol: f64) -> Result<CircleCoefficients> {
        let scale = self.circle_scale;
        let (values, tail_bound) = if let Some(arcs) = &self.arcs {
            let values = (0..=max_d)
                .map(|d| arcs.fourier(d as i64) * scale)
                .collect();
            (values, 0.0)
        } else if let Some(power) = &self.power {
            let table = power.fourier_table(max_d, tol);
            let tail = table[0].tail_bound;
            if !table[0].converged {
                return Err(LabError::Truncation {
                    terms: table[0].terms,
                    achieved: tail,
                    tol,
                });
            }
            let values = table
                .iter()
                .map(|c| Complex64::new(c.value * scale, 0.0))
                .collect();
            (values, tail * scale)
        } else {
            (vec![Complex64::new(0.0, 0.0); max_d + 1], 0.0)
        };
        Ok(CircleCoefficients {
            values,
            tail_bound,
            radial: self.radial,
        })
    }

    /// `∫ z^j z̄^k dν`.
    pub fn moment(&self, j: u64, k: u64) -> Result<Complex64> {
        let d = k as i64 - j as i64;
        let coeffs = self.circle_coefficients(d.unsigned_abs() as usize, DEFAULT_FOURIER_TOL)?;
        Ok(coeffs.moment(j, k))
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.moment(0, 0)?.re)
    }
}

/// Circle Fourier coefficients of a measure, bundled with its radial part so
/// moments can be assembled cheaply.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleCoefficients {
    values: Vec<Complex64>,
    tail_bound: f64,
    radial: Option<RadialWeight>,
}

impl CircleCoefficients {
    /// Largest `|d|` available.
    pub fn max_shift(&self) -> usize {
        self.values.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn radial(&self) -> Option<&RadialWeight> {
        self.radial.as_ref()
    }

    /// `∫ ζ̄^d dμ`; negative `d` by conjugate symmetry.
    pub fn circle(&self, d: i64) -> Complex64 {
        let c = self.values[d.unsigned_abs() as usize];
        if d < 0 {
            c.conj()
        } else {
            c
        }
    }

    pub fn radial_moment(&self, n: u64) -> f64 {
        self.radial.map_or(0.0, |w| w.moment(n))
    }

    /// `∫ z^j z̄^k dν = δ_{jk} v_j + ∫ ζ̄^{k−j} dμ`.
    pub fn moment(&self, j: u64, k: u64) -> Complex64 {
        let mut value = self.circle(k as i64 - j as i64);
        if j == k {
            value += self.radial_moment(j);
        }
        value
    }

    /// Gram entry `⟨z^k, z^j⟩ = ∫ z^k z̄^j dν`.
    pub fn gram_entry(&self, j: usize, k: usize) -> Complex64 {
        self.moment(k as u64, j as u64)
    }

    /// True when every off-diagonal circle coefficient vanishes exactly.
    pub fn is_diagonal(&self) -> bool {
        self.values[1..].iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

/// `Σ ℓ_k ln ℓ_k` over normalized complementary arc lengths.
pub fn carleson_sum(gaps: &[f64]) -> Result<f64> {
    if let Some(bad) = gaps.iter().find(|&&g| !(g > 0.0 && g.is_finite())) {
        return Err(LabError::Domain(format!("gap lengths must be positive, got {bad}")));
    }
    let total: f64 = gaps.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(LabError::Domain(format!("gap lengths sum to {total} > 1")));
    }
    Ok(gaps.iter().map(|&g| g * g.ln()).collect::<CompensatedSum>().value())
}

/// Parameters of the fat-Cantor construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatCantorParams {
    /// Normalized length of the base arc.
    pub a: f64,
    /// Gap scale: level-n gaps have normalized length `a·ε·4^{−n}`.
    pub eps: f64,
    pub levels: u32,
}

impl Default for FatCantorParams {
    fn default() -> Self {
        Self {
            a: 0.5,
            eps: 0.5,
            levels: 8,
        }
    }
}

impl FatCantorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(LabError::Domain(format!("base length a must lie in (0,1), got {}", self.a)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(LabError::Domain(format!("gap scale must lie in (0,1), got {}", self.eps)));
        }
        if self.levels == 0 || self.levels > MAX_FAT_CANTOR_LEVELS {
            return Err(LabError::Domain(format!(
                "levels must lie in 1..={MAX_FAT_CANTOR_LEVELS}, got {}",
                self.levels
            )));
        }
        if !(self.measure() > 0.0 && self.measure() < 1.0) {
            return Err(LabError::Domain(format!(
                "fat-Cantor residual measure {} not in (0,1)",
                self.measure()
            )));
        }
        Ok(())
    }

    /// `m(E_L) = a − (aε/2)(1 − 2^{−L})`.
    pub fn measure(&self) -> f64 {
        self.a - 0.5 * self.a * self.eps * (1.0 - 0.5f64.powi(self.levels as i32))
    }

    /// `m(E_∞) = a − aε/2`.
    pub fn limit_measure(&self) -> f64 {
        self.a - 0.5 * self.a * self.eps
    }

    /// Carleson sum of `E_L` (including the complement of the base arc) in
    /// closed form.
    pub fn carleson_partial(&self) -> f64 {
        let (a, eps) = (self.a, self.eps);
        let l = self.levels as i32;
        let half_pow = 0.5f64.powi(l);
        let weighted = 1.0 - (l as f64 + 2.0) * 0.5 * half_pow;
        (1.0 - a) * (1.0 - a).ln()
            + a * eps * (0.5 * (a * eps).ln() * (1.0 - half_pow) - 4f64.ln() * weighted)
    }

    /// `(1 − a) ln(1 − a) + (aε/2) ln(aε) − aε ln 4`: the Carleson sum of the
    /// limiting set, a lower bound for every finite level.
    pub fn carleson_lower_bound(&self) -> f64 {
        let (a, eps) = (self.a, self.eps);
        (1.0 - a) * (1.0 - a).ln() + 0.5 * a * eps * (a * eps).ln() - a * eps * 4f64.ln()
    }
}

pub const MAX_FAT_CANTOR_LEVELS: u32 = 22;

/// A finite-level fat-Cantor set and its measure-theoretic report.
#[derive(Debug, Clone, PartialEq)]
pub struct FatCantor {
    pub params: FatCantorParams,
    pub arcs: ArcSet,
    /// Closed-form `m(E_L)`.
    pub measure: f64,
    /// `Σ` of the constructed arc lengths.
    pub measure_from_arcs: f64,
    /// Normalized complementary arc lengths: the complement of the base arc
    /// followed by the gaps level by level.
    pub gaps: Vec<f64>,
    pub carleson_sum: f64,
    pub carleson_lower_bound: f64,
}

/// Base arc of normalized length `a` centred at `ζ = −1`; at level `n` each of
/// the `2^{n−1}` remaining arcs loses an open middle gap of normalized length
/// `a·ε·4^{−n}`.
pub fn fat_cantor_arcs(a: f64, eps: f64, levels: u32) -> Result<FatCantor> {
    let params = FatCantorParams { a, eps, levels };
    params.validate()?;

    let mut pieces = vec![(0.5 - 0.5 * a, a)];
    let mut gaps = vec![1.0 - a];
    for n in 1..=levels {
        let gap = a * eps * 0.25f64.powi(n as i32);
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for &(start, length) in &pieces {
            let child = 0.5 * (length - gap);
            if !(child > 0.0) {
                return Err(LabError::Domain(format!(
                    "level {n} gap {gap} exceeds the remaining arc length {length}"
                )));
            }
            next.push((start, child));
            next.push((start + child + gap, child));
            gaps.push(gap);
        }
        pieces = next;
    }
    let measure_from_arcs = pieces.iter().map(|p| p.1).collect::<CompensatedSum>().value();
    let arcs = ArcSet::from_normalized(pieces)?;
    let carleson = carleson_sum(&gaps)?;
    Ok(FatCantor {
        params,
        arcs,
        measure: params.measure(),
        measure_from_arcs,
        gaps,
        carleson_sum: carleson,
        carleson_lower_bound: params.carleson_lower_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_moment_examples() {
        assert!((radial_moment(0.0, 3).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(radial_moment(-0.5, 0).unwrap(), 1.0);
        assert!(radial_moment(-1.0, 2).is_err());
        assert!(radial_moment(f64::NAN, 2).is_err());
    }

    #[test]
    fn radial_moment_ratio_recurrence() {
        for &alpha in &[-0.9, -0.5, 0.0, 0.7, 3.0] {
            for n in [0u64, 1, 5, 23, 24, 25, 100, 10_000, 999_999] {
                let ratio = radial_moment(alpha, n + 1).unwrap() / radial_moment(alpha, n).unwrap();
                let expected = (n as f64 + 1.0) / (n as f64 + alpha + 2.0);
                assert!((ratio / expected - 1.0).abs() < 1e-13, "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn radial_moments_at_alpha_zero_are_harmonic() {
        for n in [0u64, 1, 10, 1000, 1_000_000] {
            let v = radial_moment(0.0, n).unwrap();
            assert!((v * (n as f64 + 1.0) - 1.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn arc_fourier_examples() {
        let full = ArcSet::full_circle();
        assert_eq!(arc_fourier(&full, 0), Complex64::new(1.0, 0.0));
        for k in 1..20 {
            assert_eq!(arc_fourier(&full, k), Complex64::new(0.0, 0.0));
        }
        let quarter = ArcSet::new(&[(1.0, 1.0 + PI / 2.0)]).unwrap();
        assert!((arc_fourier(&quarter, 0).re - 0.25).abs() < 1e-15);
        let half = ArcSet::new(&[(0.0, PI)]).unwrap();
        assert!(arc_fourier(&half, 2).norm() < 1e-16);
        // k = 1: (1/2π)∫_0^π e^{−iθ} dθ = −i/π
        let c = arc_fourier(&half, 1);
        assert!((c - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-16);
    }

    #[test]
    fn arc_validation() {
        assert!(ArcSet::new(&[(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(ArcSet::new(&[(1.0, 1.0)]).is_err());
        assert!(ArcSet::new(&[(-0.1, 1.0)]).is_err());
        assert!(ArcSet::new(&[(6.0, 0.5), (0.2, 1.0)]).is_err());
        let wrap = ArcSet::new(&[(6.0, 0.5), (1.0, 2.0)]).unwrap();
        assert!((wrap.normalized_length() - (TAU - 6.0 + 0.5 + 1.0) / TAU).abs() < 1e-15);
        assert!(ArcSet::new(&[]).is_err());
    }

    #[test]
    fn gap_lengths_cover_complement() {
        let set = ArcSet::new(&[(0.0, 1.0), (2.0, 3.0), (4.0, 5.5)]).unwrap();
        let gaps = set.gap_lengths();
        assert_eq!(gaps.len(), 3);
        let total: f64 = gaps.iter().sum::<f64>() + set.normalized_length();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_weight_examples() {
        let c = power_weight_fourier(0.0, 3, 1e-12).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.converged);
        assert_eq!(power_weight_fourier(0.0, 0, 1e-12).unwrap().value, 1.0);
        assert!((power_weight_fourier(2.0, 1, 1e-12).unwrap().value + 1.0).abs() < 1e-15);
        assert!((power_weight_fourier(2.0, 0, 1e-12).unwrap().value - 2.0).abs() < 1e-15);
        assert!(power_weight_fourier(2.0, 2, 1e-12).unwrap().value.abs() < 1e-15);
        let c = power_weight_fourier(1.0, 0, 1e-12).unwrap();
        assert!((c.value - 4.0 / PI).abs() < 2e-12, "{}", c.value - 4.0 / PI);
        assert!(c.tail_bound <= 1e-12);
        assert!(power_weight_fourier(-0.5, 0, 1e-12).is_err());
    }

    #[test]
    fn power_weight_truncation_is_flagged() {
        let c = power_weight_fourier(0.1, 0, 1e-300).unwrap();
        assert!(!c.converged);
        assert!(c.tail_bound > 1e-300);
        assert_eq!(c.terms, MAX_SERIES_TERMS);
    }

    fn closed_form(s: f64, k: i64) -> f64 {
        // (−1)^k Γ(s+1) / (Γ(1+s/2+k) Γ(1+s/2−k)), via reflection for negative arguments
        let half = 0.5 * s;
        let k = k.abs() as f64;
        let mut x = half - k + 1.0;
        let mut lower = 1.0;
        while x <= 0.0 {
            lower *= x;
            x += 1.0;
        }
        let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
        sign * (ln_gamma(s + 1.0) - ln_gamma(1.0 + half + k) - ln_gamma(x)).exp() * lower
    }

    #[test]
    fn power_weight_matches_gamma_closed_form() {
        for &s in &[0.1, 0.47, 0.735, 1.0, 1.5, 3.3] {
            let table = PowerWeight::new(s).unwrap().fourier_table(40, 1e-13);
            assert!(table[0].converged, "s={s}");
            assert!(table[0].terms < 1 << 20, "s={s} terms={}", table[0].terms);
            for (k, c) in table.iter().enumerate() {
                let exact = closed_form(s, k as i64);
                assert!((c.value - exact).abs() < 5e-13, "s={s} k={k} {} vs {exact}", c.value);
            }
        }
    }

    #[test]
    fn moment_examples() {
        let a0 = MeasureSpec::bergman(0.0).unwrap();
        assert!((a0.moment(2, 2).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
        let a0m = MeasureSpec::bergman_plus_lebesgue(0.0).unwrap();
        assert!((a0m.moment(1, 1).unwrap().re - 1.5).abs() < 1e-15);
        let half = ArcSet::new(&[(0.0, PI)]).unwrap();
        let a0e = MeasureSpec::bergman_plus_arcs(0.0, half).unwrap();
        assert!(a0e.moment(0, 2).unwrap().norm() < 1e-16);
        // ∫ z̄ dm|_(0,π) = (1/2π)∫ e^{−iθ} dθ = −i/π
        assert!((a0e.moment(0, 1).unwrap() - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-16);
        assert!((a0e.moment(1, 0).unwrap() - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-16);
    }

    #[test]
    fn measure_validation() {
        assert!(MeasureSpec::new(None, None, None, 1.0).is_err());
        assert!(MeasureSpec::new(
            None,
            Some(ArcSet::full_circle()),
            Some(PowerWeight::new(1.0).unwrap()),
            1.0
        )
        .is_err());
        assert!(MeasureSpec::lebesgue().with_circle_scale(0.0).is_err());
    }

    #[test]
    fn measure_json_schema() {
        let json = r#"{"radial": {"alpha": -0.5}, "arcs": [[0, 3.0], [4.0, 5.0]], "circle_scale": 2.0}"#;
        let spec: MeasureSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.radial().unwrap().alpha(), -0.5);
        assert_eq!(spec.arcs().unwrap().len(), 2);
        assert_eq!(spec.circle_scale(), 2.0);
        let back: MeasureSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);

        let power: MeasureSpec = serde_json::from_str(r#"{"power": {"s": 1.5}}"#).unwrap();
        assert_eq!(power.circle_scale(), 1.0);
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"radial": {"alpha": -1.0}}"#).is_err());
        assert!(serde_json::from_str::<MeasureSpec>(r#"{}"#).is_err());
    }

    #[test]
    fn carleson_examples() {
        assert!((carleson_sum(&[0.5]).unwrap() + std::f64::consts::LN_2 / 2.0).abs() < 1e-15);
        let s = carleson_sum(&[0.25, 1.0 / 16.0, 1.0 / 16.0]).unwrap();
        assert!((s + std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(carleson_sum(&[]).unwrap(), 0.0);
        assert!(carleson_sum(&[0.5, 0.0]).is_err());
        assert!(carleson_sum(&[0.7, 0.7]).is_err());
    }

    #[test]
    fn fat_cantor_examples() {
        let l1 = fat_cantor_arcs(0.5, 0.5, 1).unwrap();
        assert!((l1.measure - 0.4375).abs() < 1e-15);
        assert_eq!(l1.arcs.len(), 2);
        let params = FatCantorParams { a: 0.5, eps: 0.5, levels: 8 };
        assert!((params.limit_measure() - 0.375).abs() < 1e-15);
        let e = fat_cantor_arcs(0.6, 0.8, 10).unwrap();
        let direct: f64 = e.gaps.iter().map(|g| g * g.ln()).sum();
        assert!((e.carleson_sum - e.params.carleson_partial()).abs() < 1e-12);
        assert!((direct - e.params.carleson_partial()).abs() < 1e-12);
        assert!(e.carleson_sum >= e.carleson_lower_bound);
        assert!(fat_cantor_arcs(1.0, 0.5, 3).is_err());
        assert!(fat_cantor_arcs(0.5, 0.5, 0).is_err());
    }

    #[test]
    fn fat_cantor_gaps_agree_with_arc_geometry() {
        let e = fat_cantor_arcs(0.5, 0.5, 4).unwrap();
        let mut from_geometry = e.arcs.gap_lengths();
        let mut recorded = e.gaps.clone();
        from_geometry.sort_by(f64::total_cmp);
        recorded.sort_by(f64::total_cmp);
        assert_eq!(from_geometry.len(), recorded.len());
        for (g, r) in from_geometry.iter().zip(&recorded) {
            assert!((g - r).abs() < 1e-14);
        }
    }
}
