//! Asymptotic norms `lim ‖zⁿf‖²_ν` for polynomial `f`, and coefficient scans
//! deciding membership of `φ_β(z) = (1 − z)^{−β}` in weighted spaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::measure::{MeasureSpec, RadialWeight, DEFAULT_FOURIER_TOL};
use crate::poly_space::PolyVector;
use crate::special::{ln_abs_rising_over_factorial, CompensatedSum};

/// Largest power examined when searching for the radial tail cut-off; powers
/// stay exact as `f64` arguments up to here.
pub const MAX_POWER: u64 = 1 << 53;

/// Default margin below `−1` required of a fitted term exponent.
pub const DEFAULT_MARGIN: f64 = 0.005;

struct PowerNormParts {
    coeff_sq: Vec<f64>,
    radial: Option<RadialWeight>,
    circle_norm: f64,
}

impl PowerNormParts {
    fn new(nu: &MeasureSpec, f: &PolyVector) -> Result<Self> {
        let c = f.coeffs();
        if c.is_empty() {
            return Err(LabError::Parameter("polynomial has no coefficients".into()));
        }
        let coeffs = nu.circle_coefficients(c.len() - 1, DEFAULT_FOURIER_TOL)?;
        let mut circle = CompensatedSum::default();
        for (j, cj) in c.iter().enumerate() {
            for (k, ck) in c.iter().enumerate() {
                // ⟨z^k, z^j⟩ on the circle part is ∫ ζ̄^{j−k} dμ
                circle.add((cj.conj() * ck * coeffs.circle(j as i64 - k as i64)).re);
            }
        }
        Ok(Self {
            coeff_sq: c.iter().map(|z| z.norm_sqr()).collect(),
            radial: nu.radial().copied(),
            circle_norm: circle.value(),
        })
    }

    /// `Σ_k |c_k|² v_{n+k}`.
    fn radial_part(&self, n: u64) -> f64 {
        match self.radial {
            None => 0.0,
            Some(w) => self
                .coeff_sq
                .iter()
                .enumerate()
                .map(|(k, &c)| if c == 0.0 { 0.0 } else { c * w.moment(n + k as u64) })
                .collect::<CompensatedSum>()
                .value(),
        }
    }

    fn norm(&self, n: u64) -> f64 {
        self.radial_part(n) + self.circle_norm
    }
}

/// `‖zⁿ f‖²_ν = Σ_k |c_k|² v_{n+k} + ∫ |f|² dμ`.
pub fn power_norm(nu: &MeasureSpec, f: &PolyVector, n: u64) -> Result<f64> {
    Ok(PowerNormParts::new(nu, f)?.norm(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerNormSample {
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteRecord {
    pub f: PolyVector,
    /// `‖zⁿf‖²` at `n = 0, 1, 2, 4, …` and at `n_max`.
    pub norms: Vec<PowerNormSample>,
    pub n_max: u64,
    /// `‖z^{n_max} f‖²`.
    pub limit_estimate: f64,
    /// `∫ |f|² dμ` over the circle part.
    pub circle_norm: f64,
    /// Radial contribution remaining at `n_max`.
    pub tail_bound: f64,
    pub converged: bool,
    pub classification: String,
}

/// Finds the first `n` with radial tail at most `tol` and records
/// `lim ‖zⁿ f‖²`, which equals the circle-part norm of `f`.
pub fn asymptote_norm(nu: &MeasureSpec, f: &PolyVector, tol: f64) -> Result<AsymptoteRecord> {
    if !(tol > 0.0) {
        return Err(LabError::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let parts = PowerNormParts::new(nu, f)?;
    let mut norms = vec![PowerNormSample { n: 0, value: parts.norm(0) }];
    // leave room for the rounding of circle_norm + tail
    let cutoff = (tol - 4.0 * f64::EPSILON * parts.circle_norm.abs()).max(0.5 * tol);

    let (n_max, converged) = if parts.radial_part(0) <= cutoff {
        (0, true)
    } else {
        let mut hi = 1u64;
        norms.push(PowerNormSample { n: 1, value: parts.norm(1) });
        while parts.radial_part(hi) > cutoff && hi < MAX_POWER {
            hi = (hi * 2).min(MAX_POWER);
            norms.push(PowerNormSample { n: hi, value: parts.norm(hi) });
        }
        if parts.radial_part(hi) > cutoff {
            (hi, false)
        } else {
            let mut lo = hi / 2;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if parts.radial_part(mid) > cutoff {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (hi, true)
        }
    };
    if norms.last().map(|s| s.n) != Some(n_max) {
        norms.push(PowerNormSample { n: n_max, value: parts.norm(n_max) });
        norms.sort_by_key(|s| s.n);
    }
    let tail_bound = parts.radial_part(n_max);
    let classification = if !nu.has_circle_part() {
        "finite certificate consistent with C00: asymptotic norm 0".to_string()
    } else if parts.circle_norm > tol {
        "finite certificate consistent with C10: asymptotic norm equals the circle-part norm".to_string()
    } else {
        "circle-part norm vanishes for this vector".to_string()
    };
    Ok(AsymptoteRecord {
        f: f.clone(),
        norms,
        n_max,
        limit_estimate: parts.norm(n_max),
        circle_norm: parts.circle_norm,
        tail_bound,
        converged,
        classification,
    })
}

/// Coefficient weights of the space a scan is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum SpaceWeight {
    /// `H²`: weights 1.
    Hardy,
    /// `P²(A_α)`: weights `v_n`.
    Bergman { alpha: f64 },
}

impl SpaceWeight {
    fn ln_weight(&self, n: u64) -> f64 {
        match *self {
            SpaceWeight::Hardy => 0.0,
            SpaceWeight::Bergman { alpha } => crate::measure::radial_moment(alpha, n).map_or(f64::NAN, f64::ln),
        }
    }

    /// Predicted exponent `p` in `|φ̂_β(n)|² w_n ~ n^p`.
    pub fn predicted_exponent(&self, beta: f64) -> f64 {
        match *self {
            SpaceWeight::Hardy => 2.0 * beta - 2.0,
            SpaceWeight::Bergman { alpha } => 2.0 * beta - alpha - 3.0,
        }
    }

    /// Analytic membership threshold: `φ_β` belongs iff `β` is below it.
    pub fn threshold(&self) -> f64 {
        match *self {
            SpaceWeight::Hardy => 0.5,
            SpaceWeight::Bergman { alpha } => 1.0 + 0.5 * alpha,
        }
    }

    fn validate(&self) -> Result<()> {
        if let SpaceWeight::Bergman { alpha } = *self {
            RadialWeight::new(alpha)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Convergent,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipScan {
    pub weight: SpaceWeight,
    pub beta: f64,
    pub n_terms: u64,
    /// Partial sums at `n = 10, 100, …` and at `n_terms`.
    pub partial_sums: Vec<(u64, f64)>,
    /// Least-squares slope of `ln t_n` against `ln(n + 1)` over the last decade.
    pub fitted_exponent: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Scans `Σ_{n<N} |φ̂_β(n)|² w_n` with `φ̂_β(n) = Γ(β+n)/(n! Γ(β))`.
pub fn membership_scan(weight: SpaceWeight, beta: f64, n_terms: u64) -> Result<MembershipScan> {
    membership_scan_with_margin(weight, beta, n_terms, DEFAULT_MARGIN)
}

pub fn membership_scan_with_margin(
    weight: SpaceWeight,
    beta: f64,
    n_terms: u64,
    margin: f64,
) -> Result<MembershipScan> {
    weight.validate()?;
    if !beta.is_finite() {
        return Err(LabError::Domain(format!("beta must be finite, got {beta}")));
    }
    if n_terms < 20 {
        return Err(LabError::Parameter(format!("need at least 20 terms, got {n_terms}")));
    }
    let polynomial = beta <= 0.0 && beta.fract() == 0.0;

    let mut sum = CompensatedSum::default();
    let mut partial_sums = Vec::new();
    let mut next_mark = 10u64;
    let fit_start = n_terms / 10;
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in 0..n_terms {
        if let Some(ln_coeff) = ln_abs_rising_over_factorial(beta, n) {
            let ln_term = 2.0 * ln_coeff + weight.ln_weight(n);
            sum.add(ln_term.exp());
            if !polynomial && n >= fit_start {
                let x = (n as f64 + 1.0).ln();
                sx += x;
                sy += ln_term;
                sxx += x * x;
                sxy += x * ln_term;
                count += 1.0;
            }
        }
        if n + 1 == next_mark {
            partial_sums.push((n + 1, sum.value()));
            next_mark *= 10;
        }
    }
    if partial_sums.last().map(|p| p.0) != Some(n_terms) {
        partial_sums.push((n_terms, sum.value()));
    }

    let (fitted_exponent, verdict) = if polynomial {
        (None, Verdict::Convergent)
    } else {
        let slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        let verdict = if slope < -1.0 - margin {
            Verdict::Convergent
        } else {
            Verdict::Divergent
        };
        (Some(slope), verdict)
    };
    Ok(MembershipScan {
        weight,
        beta,
        n_terms,
        partial_sums,
        fitted_exponent,
        predicted_exponent: (!polynomial).then(|| weight.predicted_exponent(beta)),
        margin,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityWitness {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `[1 + α/2 + β/2, 1/2)`.
    pub window: (f64, f64),
    /// `h = φ_γ` scanned in `H²`.
    pub h_scan: MembershipScan,
    /// `h/ψ = φ_{γ−β/2}` scanned in `P²(A_α)`.
    pub quotient_scan: MembershipScan,
    pub valid: bool,
}

/// Exhibits `h = φ_γ ∈ H²` whose quotient `h/ψ = φ_{γ−β/2}` lies outside
/// `P²(A_α)`, for the weight `|φ_β|` with `β < −1 − α`.
pub fn similarity_witness(alpha: f64, beta: f64, gamma: f64, n_terms: u64) -> Result<SimilarityWitness> {
    if !(alpha > -1.0 && alpha <= 0.0) {
        return Err(LabError::Parameter(format!("alpha must lie in (-1, 0], got {alpha}")));
    }
    if !(beta < -1.0 - alpha) {
        return Err(LabError::Parameter(format!(
            "beta must satisfy beta < -1 - alpha = {}, got {beta}; the gamma window is empty",
            -1.0 - alpha
        )));
    }
    let window = (1.0 + 0.5 * alpha + 0.5 * beta, 0.5);
    if !(gamma >= window.0 - 1e-12 && gamma < window.1) {
        return Err(LabError::Parameter(format!(
            "gamma must satisfy {} <= gamma < 1/2, got {gamma}",
            window.0
        )));
    }
    let h_scan = membership_scan(SpaceWeight::Hardy, gamma, n_terms)?;
    let quotient_scan = membership_scan(SpaceWeight::Bergman { alpha }, gamma - 0.5 * beta, n_terms)?;
    let valid = h_scan.verdict == Verdict::Convergent && quotient_scan.verdict == Verdict::Divergent;
    Ok(SimilarityWitness {
        alpha,
        beta,
        gamma,
        window,
        h_scan,
        quotient_scan,
        valid,
    })
}

/// `f ≡ 1`.
pub fn unit_polynomial() -> PolyVector {
    PolyVector::constant(Complex64::new(1.0, 0.0))
}
