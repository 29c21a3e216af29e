//! Finite-matrix contraction analysis: Möbius transforms of operators, defect
//! operators, the characteristic function and its identities, and
//! Schatten-1 sweeps of Möbius defects on truncated spaces.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::{
    default_rank_threshold, hermitian_eigen, lu_solve, singular_values, spectral_norm, CMatrix,
};
use crate::measure::MeasureSpec;
use crate::poly_space::TruncatedSpace;

/// Default admissible excess of `‖T‖` over 1.
pub const DEFAULT_NORM_SLACK: f64 = 1e-10;

/// Negative defect eigenvalues down to this size are treated as roundoff.
pub const EIGEN_CLIP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square matrix of norm at most `1 + norm_slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMatrix {
    t: CMatrix,
    norm_slack: f64,
}

impl ContractionMatrix {
    pub fn new(t: CMatrix) -> Result<Self> {
        Self::with_slack(t, DEFAULT_NORM_SLACK)
    }

    pub fn with_slack(t: CMatrix, norm_slack: f64) -> Result<Self> {
        if t.nrows() != t.ncols() {
            return Err(LabError::Parameter(format!(
                "contraction must be square, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        if t.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LabError::Domain("matrix has non-finite entries".into()));
        }
        let norm = spectral_norm(&t);
        if norm > 1.0 + norm_slack {
            return Err(LabError::Domain(format!(
                "matrix norm {norm} exceeds 1 + {norm_slack}"
            )));
        }
        Ok(Self { t, norm_slack })
    }

    pub fn scalar(t: Complex64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, t))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn norm_slack(&self) -> f64 {
        self.norm_slack
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("point {z} is not in the open unit disk")))
    }
}

/// `b_λ(z) = (z − λ)/(1 − λ̄ z)`.
pub fn mobius_scalar(lambda: Complex64, z: Complex64) -> Complex64 {
    (z - lambda) / (ONE - lambda.conj() * z)
}

/// `b_λ(T) = (I − λ̄T)^{−1}(T − λ)`.
pub fn mobius_of_operator(t: &ContractionMatrix, lambda: Complex64) -> Result<ContractionMatrix> {
    check_disk(lambda)?;
    let n = t.dim();
    let id = CMatrix::identity(n, n);
    let lhs = &id - t.matrix() * lambda.conj();
    let rhs = t.matrix() - &id * lambda;
    let b = lu_solve(&lhs, &rhs)?;
    ContractionMatrix::with_slack(b, t.norm_slack)
}

/// Defect spaces and square roots of `I − T*T` and `I − TT*`.
#[derive(Debug, Clone)]
pub struct DefectData {
    /// Orthonormal columns spanning `D_T`.
    pub d_t_basis: CMatrix,
    pub d_tstar_basis: CMatrix,
    pub d_t_root: CMatrix,
    pub d_tstar_root: CMatrix,
    /// Clipped eigenvalues of `I − T*T`, ascending.
    pub d_t_eigenvalues: Vec<f64>,
    pub d_tstar_eigenvalues: Vec<f64>,
    pub rank_threshold: f64,
}

struct PsdSplit {
    basis: CMatrix,
    root: CMatrix,
    eigenvalues: Vec<f64>,
}

fn clipped_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let (mut values, vectors) = hermitian_eigen(a);
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -EIGEN_CLIP {
                return Err(LabError::Domain(format!(
                    "defect operator has eigenvalue {v}; the matrix is not a contraction"
                )));
            }
            *v = 0.0;
        }
    }
    Ok((values, vectors))
}

/// Keeps the top `rank` eigenpairs (values ascending).
fn psd_split(values: Vec<f64>, vectors: &CMatrix, rank: usize) -> PsdSplit {
    let n = values.len();
    let keep: Vec<usize> = (n - rank..n).collect();
    let basis = CMatrix::from_fn(n, rank, |r, c| vectors[(r, keep[c])]);
    let scaled = CMatrix::from_fn(n, rank, |r, c| vectors[(r, keep[c])] * values[keep[c]].sqrt());
    let root = &scaled * basis.adjoint();
    PsdSplit {
        basis,
        root,
        eigenvalues: values,
    }
}

fn defect_operators(t: &CMatrix) -> (CMatrix, CMatrix) {
    let n = t.nrows();
    let id = CMatrix::identity(n, n);
    (&id - t.adjoint() * t, &id - t * t.adjoint())
}

/// Default threshold `n·ε·max(λ_max, 1)` on the eigenvalues of the larger
/// of the two defect operators.
pub fn default_defect_threshold(t: &ContractionMatrix) -> f64 {
    let (d, dstar) = defect_operators(t.matrix());
    let top = |m: &CMatrix| crate::linalg::hermitian_eigenvalues(m).last().copied().unwrap_or(0.0);
    default_rank_threshold(t.dim(), top(&d).max(top(&dstar)))
}

pub fn defect(t: &ContractionMatrix, rank_threshold: Option<f64>) -> Result<DefectData> {
    let threshold = match rank_threshold {
        Some(eps) if eps > 0.0 => eps,
        Some(eps) => {
            return Err(LabError::Parameter(format!("rank threshold must be positive, got {eps}")))
        }
        None => default_defect_threshold(t),
    };
    let (d, dstar) = defect_operators(t.matrix());
    let (values, vectors) = clipped_eigen(&d)?;
    let (star_values, star_vectors) = clipped_eigen(&dstar)?;
    // Both operators share one spectrum; a single count keeps the two ranks equal
    // when round-off straddles the threshold.
    let rank = values
        .iter()
        .zip(&star_values)
        .filter(|(a, b)| 0.5 * (*a + *b) > threshold)
        .count();
    let dt = psd_split(values, &vectors, rank);
    let dts = psd_split(star_values, &star_vectors, rank);
    Ok(DefectData {
        d_t_basis: dt.basis,
        d_tstar_basis: dts.basis,
        d_t_root: dt.root,
        d_tstar_root: dts.root,
        d_t_eigenvalues: dt.eigenvalues,
        d_tstar_eigenvalues: dts.eigenvalues,
        rank_threshold: threshold,
    })
}

/// `Θ_T(z)` as a matrix from `D_T` coordinates to `D_{T*}` coordinates.
#[derive(Debug, Clone)]
pub struct CharFnSample {
    pub z: Complex64,
    pub theta: CMatrix,
    pub d_t_basis: CMatrix,
    pub d_tstar_basis: CMatrix,
    pub rank_threshold: f64,
}

impl CharFnSample {
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.theta)
    }
}

/// `Θ_T(z) = [−T + z D_{T*}(I − zT*)^{−1} D_T]|_{D_T}`.
pub fn char_fn(t: &ContractionMatrix, z: Complex64, rank_threshold: Option<f64>) -> Result<CharFnSample> {
    let defects = defect(t, rank_threshold)?;
    char_fn_with(t, &defects, z)
}

fn char_fn_with(t: &ContractionMatrix, defects: &DefectData, z: Complex64) -> Result<CharFnSample> {
    check_disk(z)?;
    let n = t.dim();
    let a = t.matrix();
    let u = &defects.d_t_basis;
    let ustar = &defects.d_tstar_basis;
    let mut inner = -(a * u);
    if z != ZERO && u.ncols() > 0 {
        let resolvent = CMatrix::identity(n, n) - a.adjoint() * z;
        let w = lu_solve(&resolvent, &(&defects.d_t_root * u))?;
        inner += &defects.d_tstar_root * w * z;
    }
    Ok(CharFnSample {
        z,
        theta: ustar.adjoint() * inner,
        d_t_basis: u.clone(),
        d_tstar_basis: ustar.clone(),
        rank_threshold: defects.rank_threshold,
    })
}

/// `tr(I − A*A) = Σ_k (1 − ‖A e_k‖²)`, for any matrix of norm at most 1.
pub fn trace_defect(a: &CMatrix) -> f64 {
    let value: f64 = a
        .column_iter()
        .map(|col| 1.0 - col.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    if (-EIGEN_CLIP..0.0).contains(&value) {
        0.0
    } else {
        value
    }
}

/// Cokernel dimension `rows − #{σ > ε}` with the singular values kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CokerReport {
    pub dim: usize,
    pub threshold: f64,
    pub singular_values: Vec<f64>,
    /// Largest singular value at or below the threshold.
    pub below: Option<f64>,
    /// Smallest singular value above the threshold.
    pub above: Option<f64>,
}

pub fn coker_dim(a: &CMatrix, eps: f64) -> Result<CokerReport> {
    if !(eps > 0.0) {
        return Err(LabError::Parameter(format!("coker threshold must be positive, got {eps}")));
    }
    let mut sv = singular_values(a);
    sv.resize(a.nrows().min(a.ncols()), 0.0);
    let rank = sv.iter().filter(|&&s| s > eps).count();
    Ok(CokerReport {
        dim: a.nrows() - rank,
        threshold: eps,
        below: sv.iter().copied().find(|&s| s <= eps),
        above: sv.iter().copied().rfind(|&s| s > eps),
        singular_values: sv,
    })
}

/// Coker dimension at the default threshold `rows·ε·max(σ_max, 1)`.
pub fn coker_dim_default(a: &CMatrix) -> CokerReport {
    let top = singular_values(a).first().copied().unwrap_or(0.0);
    coker_dim(a, default_rank_threshold(a.nrows(), top)).expect("positive default threshold")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let deviation = (lhs - rhs).abs();
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            deviation,
            tol,
            pass: deviation <= tol,
        }
    }

    fn bound(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs: value,
            rhs: limit,
            deviation: (value - limit).max(0.0),
            tol: 0.0,
            pass: value <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub dim: usize,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub z: Complex64,
    pub defect_rank: usize,
    pub rank_threshold: f64,
    pub coker_threshold: f64,
    pub checks: Vec<IdentityCheck>,
    pub notes: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn sv_padded(a: &CMatrix, n: usize) -> Vec<f64> {
    let mut sv = singular_values(a);
    sv.resize(a.nrows().min(a.ncols()), 0.0);
    sv.resize(n, 1.0);
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

fn max_deviation(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rank_above(a: &CMatrix, eps: f64) -> usize {
    singular_values(a).iter().filter(|&&s| s > eps).count()
}

fn min_sv_or_one(a: &CMatrix) -> f64 {
    if a.ncols() == 0 {
        1.0
    } else {
        let mut sv = singular_values(a);
        sv.resize(a.ncols(), 0.0);
        sv.last().copied().unwrap_or(1.0)
    }
}

/// Checks the finite-matrix identities tying `T`, `b_λ(T)` and `Θ_T`:
/// the trace, cokernel and lower-bound identities for `Θ_T(λ)` against
/// `b_λ(T)`, the singular values of `Θ_T(λ)` against `b_λ(T)`, the
/// transformation law `Θ_{b_μ(T)}(z) ≅ Θ_T(b_{−μ}(z))`, the cokernel and
/// trace identities for `T` itself, and contractivity of `Θ_T`.
pub fn charfn_identities_check(
    t: &ContractionMatrix,
    lambda: Complex64,
    mu: Complex64,
    z: Complex64,
    tol: f64,
) -> Result<IdentityReport> {
    check_disk(lambda)?;
    check_disk(mu)?;
    check_disk(z)?;
    let n = t.dim();
    let a = t.matrix();
    let defects = defect(t, None)?;
    let d = defects.d_t_basis.ncols();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    if d == 0 {
        notes.push("T is unitary: defect spaces are trivial and Θ_T is the empty matrix".into());
    }

    let b_lambda = mobius_of_operator(t, lambda)?;
    let theta_lambda = char_fn_with(t, &defects, lambda)?;
    let sv_b = singular_values(b_lambda.matrix());
    let coker_eps = default_rank_threshold(n, sv_b[0]);

    let trace_tol = tol * n as f64;
    let theta_trace = trace_defect(&theta_lambda.theta);
    checks.push(IdentityCheck::new(
        "trace: ||I - Θ_T(λ)*Θ_T(λ)||_S1 = tr(I - b_λ(T)*b_λ(T))",
        theta_trace,
        trace_defect(b_lambda.matrix()),
        trace_tol,
    ));

    let coker_theta = d - rank_above(&theta_lambda.theta, coker_eps).min(d);
    let coker_b = n - rank_above(b_lambda.matrix(), coker_eps);
    checks.push(IdentityCheck::new(
        "cokernel: dim coker Θ_T(λ) = dim coker b_λ(T)",
        coker_theta as f64,
        coker_b as f64,
        0.0,
    ));

    let b_defects = defect(&b_lambda, Some(defects.rank_threshold))?;
    let restricted = b_lambda.matrix() * &b_defects.d_t_basis;
    checks.push(IdentityCheck::new(
        "lower bound: σ_min Θ_T(λ) = σ_min b_λ(T)|D",
        min_sv_or_one(&theta_lambda.theta),
        min_sv_or_one(&restricted),
        tol,
    ));
    checks.push(IdentityCheck::new(
        "lower bound: σ_min Θ_T(λ) = σ_min b_λ(T)",
        min_sv_or_one(&theta_lambda.theta),
        sv_b[n - 1],
        tol,
    ));

    let theta_sv = sv_padded(&theta_lambda.theta, n);
    checks.push(IdentityCheck::new(
        "unitary equivalence: sv Θ_T(λ) ⊕ 1 = sv b_λ(T)",
        max_deviation(&theta_sv, &sv_b),
        0.0,
        tol,
    ));

    let b_mu = mobius_of_operator(t, mu)?;
    let theta_b_mu = char_fn(&b_mu, z, Some(defects.rank_threshold))?;
    let w = mobius_scalar(-mu, z);
    let theta_shifted = char_fn_with(t, &defects, w)?;
    let left = sv_padded(&theta_b_mu.theta, n);
    let right = sv_padded(&theta_shifted.theta, n);
    checks.push(IdentityCheck::new(
        "transformation law: sv Θ_{b_μ(T)}(z) = sv Θ_T(b_{-μ}(z))",
        max_deviation(&left, &right),
        0.0,
        tol,
    ));

    let t_eps = default_rank_threshold(n, spectral_norm(a));
    let image = a * &defects.d_t_basis;
    let dstar = defects.d_tstar_basis.ncols();
    checks.push(IdentityCheck::new(
        "cokernel: dim D_T* ⊖ T D_T = dim H ⊖ TH",
        (dstar - rank_above(&image, t_eps).min(dstar)) as f64,
        (n - rank_above(a, t_eps)) as f64,
        0.0,
    ));

    let (defect_op, _) = defect_operators(a);
    let on_dt = defects.d_t_basis.adjoint() * defect_op * &defects.d_t_basis;
    let restricted_trace: f64 = (0..d).map(|i| on_dt[(i, i)].re).sum();
    checks.push(IdentityCheck::new(
        "trace: ||I - T*T|D_T||_S1 = tr(I - T*T)",
        restricted_trace,
        trace_defect(a),
        trace_tol,
    ));

    if d < n {
        checks.push(IdentityCheck::new(
            "reduction: σ_min T = σ_min T|D_T",
            min_sv_or_one(&(a * &defects.d_t_basis)),
            singular_values(a)[n - 1],
            tol,
        ));
    }

    let theta_z = char_fn_with(t, &defects, z)?;
    for (label, sample) in [("z", &theta_z), ("λ", &theta_lambda)] {
        checks.push(IdentityCheck::bound(
            &format!("contractive: ||Θ_T({label})|| <= 1 + 1e-9"),
            sample.norm(),
            1.0 + 1e-9,
        ));
    }

    Ok(IdentityReport {
        dim: n,
        lambda,
        mu,
        z,
        defect_rank: d,
        rank_threshold: defects.rank_threshold,
        coker_threshold: coker_eps,
        checks,
        notes,
    })
}

/// Complex Gaussian matrix scaled to norm 1 when `on_sphere`, otherwise to a
/// norm drawn from `[0.3, 0.98)`.
pub fn random_contraction(dim: usize, rng: &mut impl Rng, on_sphere: bool) -> Result<ContractionMatrix> {
    if dim == 0 {
        return Err(LabError::Parameter("dimension must be positive".into()));
    }
    let raw = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = spectral_norm(&raw);
    let target = if on_sphere { 1.0 } else { rng.random_range(0.3..0.98) };
    ContractionMatrix::new(raw * Complex64::new(target / norm, 0.0))
}

/// Uniform point in the disk of radius `r`.
pub fn random_disk_point(rng: &mut impl Rng, r: f64) -> Complex64 {
    let radius = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(radius, std::f64::consts::TAU * rng.random::<f64>())
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryCase {
    pub case: usize,
    pub dim: usize,
    pub reports: Vec<IdentityReport>,
    /// Entries of the offending matrix as `[re, im]` rows, kept only on failure.
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub cases: usize,
    pub samples_per_case: usize,
    pub tol: f64,
    pub checks_run: usize,
    pub violations: usize,
    pub failures: Vec<BatteryCase>,
}

fn matrix_dump(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
        .collect()
}

/// `samples` random `(λ, μ, z)` triples of modulus below `0.95`.
pub fn sample_points(rng: &mut impl Rng, samples: usize) -> Vec<[Complex64; 3]> {
    (0..samples)
        .map(|_| {
            [
                random_disk_point(rng, 0.95),
                random_disk_point(rng, 0.95),
                random_disk_point(rng, 0.95),
            ]
        })
        .collect()
}

/// Runs the identity check on `matrices` with points drawn from `seed`.
pub fn identity_battery_on(
    matrices: &[ContractionMatrix],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<BatteryReport> {
    let cases: Vec<Result<BatteryCase>> = matrices
        .par_iter()
        .enumerate()
        .map(|(case, t)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(case as u64 * 2 + 1);
            let reports = sample_points(&mut rng, samples)
                .into_iter()
                .map(|[lambda, mu, z]| charfn_identities_check(t, lambda, mu, z, tol))
                .collect::<Result<Vec<_>>>()?;
            let failed = reports.iter().any(|r| !r.passed());
            Ok(BatteryCase {
                case,
                dim: t.dim(),
                reports,
                matrix: failed.then(|| matrix_dump(t.matrix())),
            })
        })
        .collect();
    let mut checks_run = 0;
    let mut violations = 0;
    let mut failures = Vec::new();
    for case in cases {
        let case = case?;
        for report in &case.reports {
            checks_run += report.checks.len();
            violations += report.failures().count();
        }
        if case.matrix.is_some() {
            failures.push(case);
        }
    }
    Ok(BatteryReport {
        seed,
        cases: matrices.len(),
        samples_per_case: samples,
        tol,
        checks_run,
        violations,
        failures,
    })
}

/// Seeded random contractions with dimensions cycling through `dims`; every
/// fourth case has norm exactly 1 so that `D_T` is a proper subspace.
pub fn random_contractions(cases: usize, dims: std::ops::RangeInclusive<usize>, seed: u64) -> Result<Vec<ContractionMatrix>> {
    let (lo, hi) = (*dims.start(), *dims.end());
    if lo == 0 || hi < lo {
        return Err(LabError::Parameter(format!("invalid dimension range {lo}..={hi}")));
    }
    (0..cases)
        .map(|case| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(case as u64 * 2);
            let dim = lo + case % (hi - lo + 1);
            random_contraction(dim, &mut rng, case % 4 == 3)
        })
        .collect()
}

/// The randomized identity battery over `cases` seeded contractions.
pub fn identity_battery(
    cases: usize,
    dims: std::ops::RangeInclusive<usize>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<BatteryReport> {
    let matrices = random_contractions(cases, dims, seed)?;
    identity_battery_on(&matrices, samples, seed, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub lambda: Complex64,
    pub order: usize,
    pub value: f64,
}

/// `tr(I − B̃_λ)` for each `λ`, with `B̃_λ` the Möbius Gram form in the
/// orthonormal basis of the order-`N` truncation.
pub fn trace_norm_sweep(nu: &MeasureSpec, n: usize, lambdas: &[Complex64]) -> Result<Vec<TraceSample>> {
    let space = TruncatedSpace::new(nu, n)?;
    trace_norm_sweep_on(&space, lambdas)
}

pub fn trace_norm_sweep_on(space: &TruncatedSpace, lambdas: &[Complex64]) -> Result<Vec<TraceSample>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            Ok(TraceSample {
                lambda,
                order: space.order(),
                value: space.trace_deficit(lambda)?,
            })
        })
        .collect()
}
