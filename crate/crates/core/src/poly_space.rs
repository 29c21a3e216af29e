//! Truncations of `P²(ν)`: monomial Gram matrices, orthonormal polynomial
//! bases, the multiplication-by-`z` map, reproducing kernels and Möbius
//! Gram forms.
//!
//! Gram convention: `G_{jk} = ⟨z^k, z^j⟩ = ∫ z^k z̄^j dν`, so that
//! `‖Σ c_k z^k‖² = c* G c`.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{
    default_rank_threshold, hermitian_eigen, hermitian_eigenvalues, orthonormality_residual,
    singular_values, CMatrix,
};
use crate::measure::{CircleCoefficients, MeasureSpec, DEFAULT_FOURIER_TOL};
use crate::quadrature::GaussJacobi;

/// Conditioning gate `1/sqrt(ε_mach)`.
pub const COND_GATE: f64 = 67_108_864.0;

/// Above this condition estimate the orthonormal basis is built by QR of a
/// node-weighted Vandermonde matrix instead of Cholesky of `G`.
pub const DISCRETE_QR_THRESHOLD: f64 = 1e6;

/// Default Gauss–Jacobi order for the radial Möbius integrals.
pub const DEFAULT_QUAD_ORDER: usize = 128;

/// Absolute accuracy demanded of the radial Möbius integrals.
pub const MOBIUS_QUAD_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `0`, then radii `{0.3, 0.6, 0.9, 0.95}` × 16 equispaced angles, then the
/// real points `1 − 2^{−j}`, `j = 1..6`.
pub fn standard_lambda_grid() -> Vec<Complex64> {
    let mut grid = vec![ZERO];
    for &r in &[0.3, 0.6, 0.9, 0.95] {
        for l in 0..16 {
            grid.push(Complex64::from_polar(r, TAU * l as f64 / 16.0));
        }
    }
    for j in 1..=6 {
        grid.push(Complex64::new(1.0 - 0.5f64.powi(j), 0.0));
    }
    grid
}

/// A polynomial in the monomial basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyVector {
    coeffs: Vec<Complex64>,
}

impl PolyVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `(z − λ) f`.
    pub fn times_linear(&self, lambda: Complex64) -> Self {
        let mut out = vec![ZERO; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] -= lambda * c;
            out[k + 1] += c;
        }
        Self::new(out)
    }

    fn as_vector(&self, dim: usize) -> Result<DVector<Complex64>> {
        if self.coeffs.len() > dim && self.coeffs[dim..].iter().any(|c| *c != ZERO) {
            return Err(LabError::Parameter(format!(
                "polynomial of length {} does not fit a space of dimension {dim}",
                self.coeffs.len()
            )));
        }
        Ok(DVector::from_fn(dim, |i, _| self.coeffs.get(i).copied().unwrap_or(ZERO)))
    }

    /// `⟨self, other⟩ = other* G self`.
    pub fn inner(&self, other: &PolyVector, gram: &CMatrix) -> Result<Complex64> {
        let n = gram.nrows();
        let f = self.as_vector(n)?;
        let g = other.as_vector(n)?;
        Ok((g.adjoint() * gram * f)[(0, 0)])
    }

    pub fn norm_sq(&self, gram: &CMatrix) -> Result<f64> {
        Ok(self.inner(self, gram)?.re)
    }
}

/// How the orthonormal basis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrthoMethod {
    /// Diagonal Gram matrix; the basis is `z^k / sqrt(G_kk)`.
    Diagonal,
    Cholesky,
    /// Householder QR of the node-weighted Vandermonde matrix.
    DiscreteQr,
}

/// Gram matrix of `1, z, …, z^{N−1}` together with `G = R*R` and `B = R^{−1}`.
#[derive(Debug, Clone)]
pub struct GramData {
    nu: MeasureSpec,
    order: usize,
    gram: CMatrix,
    factor: CMatrix,
    onb: CMatrix,
    eigenvalues: Vec<f64>,
    method: OrthoMethod,
    onb_residual: f64,
    circle_tail_bound: f64,
}

impl GramData {
    pub fn nu(&self) -> &MeasureSpec {
        &self.nu
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Upper-triangular `R` with positive diagonal and `G = R*R`.
    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    /// `B` with `B*GB = I`; column `k` holds the coefficients of `p_k`.
    pub fn onb_transform(&self) -> &CMatrix {
        &self.onb
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.order - 1]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn cond_estimate(&self) -> f64 {
        cond_from(&self.eigenvalues)
    }

    pub fn method(&self) -> OrthoMethod {
        self.method
    }

    /// `max |(B*GB − I)_{jk}|`.
    pub fn onb_residual(&self) -> f64 {
        self.onb_residual
    }

    /// Bound on the truncation error of each circle Fourier coefficient.
    pub fn circle_tail_bound(&self) -> f64 {
        self.circle_tail_bound
    }

    /// Orthonormal polynomial `p_k`.
    pub fn orthonormal_polynomial(&self, k: usize) -> PolyVector {
        PolyVector::new((0..=k).map(|i| self.onb[(i, k)]).collect())
    }

    /// Restriction to `1, …, z^{n−1}`; the factorization nests.
    pub fn leading(&self, n: usize) -> GramData {
        assert!(n >= 1 && n <= self.order, "leading block order out of range");
        let gram = self.gram.view((0, 0), (n, n)).into_owned();
        let factor = self.factor.view((0, 0), (n, n)).into_owned();
        let onb = self.onb.view((0, 0), (n, n)).into_owned();
        let eigenvalues = if self.method == OrthoMethod::Diagonal {
            sorted_diagonal(&gram)
        } else {
            hermitian_eigenvalues(&gram)
        };
        let onb_residual = residual_for(self.method, &onb, &gram);
        GramData {
            nu: self.nu.clone(),
            order: n,
            gram,
            factor,
            onb,
            eigenvalues,
            method: self.method,
            onb_residual,
            circle_tail_bound: self.circle_tail_bound,
        }
    }
}

fn cond_from(eigenvalues: &[f64]) -> f64 {
    let (lo, hi) = (eigenvalues[0], eigenvalues[eigenvalues.len() - 1]);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn sorted_diagonal(g: &CMatrix) -> Vec<f64> {
    let mut d: Vec<f64> = (0..g.nrows()).map(|i| g[(i, i)].re).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn gram_matrix(coeffs: &CircleCoefficients, order: usize) -> CMatrix {
    CMatrix::from_fn(order, order, |j, k| coeffs.gram_entry(j, k))
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(LabError::Parameter("truncation order must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Largest `m ≤ order` whose leading Gram block passes the gate; the
/// condition number of leading blocks is nondecreasing by eigenvalue
/// interlacing.
fn largest_admissible(gram: &CMatrix, order: usize) -> usize {
    let passes = |m: usize| {
        let block = gram.view((0, 0), (m, m)).into_owned();
        cond_from(&hermitian_eigenvalues(&block)) <= COND_GATE
    };
    let (mut lo, mut hi) = (1usize, order);
    if passes(hi) {
        return hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn residual_for(method: OrthoMethod, onb: &CMatrix, gram: &CMatrix) -> f64 {
    if method == OrthoMethod::Diagonal {
        (0..gram.nrows())
            .map(|j| (onb[(j, j)].norm_sqr() * gram[(j, j)].re - 1.0).abs())
            .fold(0.0, f64::max)
    } else {
        orthonormality_residual(onb, gram)
    }
}

fn factorize(nu: &MeasureSpec, coeffs: &CircleCoefficients, order: usize) -> Result<GramData> {
    check_order(order)?;
    let gram = gram_matrix(coeffs, order);
    let diagonal = coeffs.is_diagonal();
    let eigenvalues = if diagonal {
        sorted_diagonal(&gram)
    } else {
        hermitian_eigenvalues(&gram)
    };
    let cond = cond_from(&eigenvalues);
    if !(cond <= COND_GATE) {
        return Err(LabError::Conditioning {
            order,
            cond,
            gate: COND_GATE,
            admissible: largest_admissible(&gram, order),
        });
    }

    let (method, factor, onb) = if diagonal {
        let r = CMatrix::from_fn(order, order, |j, k| {
            if j == k {
                Complex64::new(gram[(j, j)].re.sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        let b = CMatrix::from_fn(order, order, |j, k| {
            if j == k {
                Complex64::new(1.0 / r[(j, j)].re, 0.0)
            } else {
                ZERO
            }
        });
        (OrthoMethod::Diagonal, r, b)
    } else if cond > DISCRETE_QR_THRESHOLD {
        let r = discrete_qr_factor(nu, order)?;
        let b = upper_inverse(&r)?;
        (OrthoMethod::DiscreteQr, r, b)
    } else {
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| LabError::Solve(format!("Cholesky of the order-{order} Gram failed")))?;
        let r = chol.l().adjoint();
        let b = upper_inverse(&r)?;
        (OrthoMethod::Cholesky, r, b)
    };
    let onb_residual = residual_for(method, &onb, &gram);
    Ok(GramData {
        nu: nu.clone(),
        order,
        gram,
        factor,
        onb,
        eigenvalues,
        method,
        onb_residual,
        circle_tail_bound: coeffs.tail_bound(),
    })
}

fn upper_inverse(r: &CMatrix) -> Result<CMatrix> {
    let n = r.nrows();
    r.solve_upper_triangular(&CMatrix::identity(n, n))
        .ok_or_else(|| LabError::Solve("triangular factor is singular".into()))
}

/// Quadrature nodes and weights reproducing `∫ z^k z̄^j dν` for `j, k < order`:
/// Gauss–Jacobi in `t = |z|²` times a trapezoid in angle for the radial part,
/// composite Gauss–Legendre panels on arcs, and Gauss–Jacobi with the
/// endpoint singularity of `|1 − ζ|^s` factored out for power weights.
fn discrete_nodes(nu: &MeasureSpec, order: usize) -> Result<Vec<(Complex64, f64)>> {
    let mut nodes = Vec::new();
    if let Some(radial) = nu.radial() {
        let alpha = radial.alpha();
        let rule = GaussJacobi::new(order + 1, alpha, 0.0)?;
        let angles = 2 * order + 1;
        for (t, w) in rule.unit_interval() {
            let r = t.sqrt();
            for l in 0..angles {
                let theta = TAU * l as f64 / angles as f64;
                nodes.push((Complex64::from_polar(r, theta), (alpha + 1.0) * w / angles as f64));
            }
        }
    }
    let scale = nu.circle_scale();
    if let Some(arcs) = nu.arcs() {
        let rule = GaussJacobi::legendre(order + 16)?;
        for arc in arcs.arcs() {
            let panels = ((arc.length / (0.25 * PI)).ceil() as usize).max(1);
            let h = arc.length / panels as f64;
            for p in 0..panels {
                let a = arc.start + p as f64 * h;
                for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                    let theta = a + 0.5 * h * (x + 1.0);
                    nodes.push((Complex64::from_polar(1.0, theta), scale * w * 0.5 * h / TAU));
                }
            }
        }
    }
    if let Some(power) = nu.power() {
        let s = power.exponent();
        let rule = GaussJacobi::new(order + 16, s, s)?;
        for (&x, &mu) in rule.nodes().iter().zip(rule.weights()) {
            let theta = PI * (1.0 + x);
            let smooth = (2.0 * (0.5 * PI * (1.0 - x.abs())).sin() / ((1.0 - x) * (1.0 + x))).powf(s);
            nodes.push((Complex64::from_polar(1.0, theta), scale * 0.5 * mu * smooth));
        }
    }
    Ok(nodes)
}

fn discrete_qr_factor(nu: &MeasureSpec, order: usize) -> Result<CMatrix> {
    let nodes = discrete_nodes(nu, order)?;
    let mut v = CMatrix::zeros(nodes.len(), order);
    for (i, &(z, w)) in nodes.iter().enumerate() {
        let sw = w.sqrt();
        let mut pow = Complex64::new(sw, 0.0);
        for k in 0..order {
            v[(i, k)] = pow;
            pow *= z;
        }
    }
    let mut r = v.qr().r();
    for i in 0..order {
        let d = r[(i, i)];
        if d.norm() == 0.0 {
            return Err(LabError::Solve("weighted Vandermonde matrix is rank deficient".into()));
        }
        let phase = (d / d.norm()).conj();
        for k in i..order {
            r[(i, k)] *= phase;
        }
        r[(i, i)] = Complex64::new(r[(i, i)].re, 0.0);
    }
    Ok(r)
}

/// Gram data of `1, …, z^{N−1}` in `P²(ν)`.
pub fn gram(nu: &MeasureSpec, n: usize) -> Result<GramData> {
    check_order(n)?;
    let coeffs = nu.circle_coefficients(n - 1, DEFAULT_FOURIER_TOL)?;
    factorize(nu, &coeffs, n)
}

/// Change of basis `B` to the orthonormal polynomials.
pub fn onb(nu: &MeasureSpec, n: usize) -> Result<CMatrix> {
    Ok(gram(nu, n)?.onb)
}

/// Multiplication by `z` from polynomials of degree `< N` into degree `≤ N`,
/// in the orthonormal bases.
#[derive(Debug, Clone)]
pub struct MultiplicationData {
    /// `(N+1)×N` matrix with entries `⟨z p_k, p_j⟩`.
    pub m_rect: CMatrix,
    /// Top `N×N` block: the compression `T_N`.
    pub t_n: CMatrix,
}

/// `ν`, its order-`N` truncation and the order-`N+1` data needed for the
/// multiplication map and kernel witnesses.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    order: usize,
    coeffs: CircleCoefficients,
    next: GramData,
    current: GramData,
    multiplication: MultiplicationData,
    disk_rules: Option<DiskRules>,
}

#[derive(Debug, Clone)]
struct DiskRules {
    order: usize,
    primary: Vec<(f64, f64)>,
    check: Vec<(f64, f64)>,
}

impl DiskRules {
    fn new(alpha: f64, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(LabError::Parameter("quadrature order must be at least 2".into()));
        }
        let primary = GaussJacobi::new(order, alpha, 0.0)?.unit_interval().collect();
        let check = GaussJacobi::new(order + order / 2, alpha, 0.0)?
            .unit_interval()
            .collect();
        Ok(Self {
            order,
            primary,
            check,
        })
    }
}

/// `⟨b_λ z^k, b_λ z^j⟩` together with the defect form `G − B_λ`.
#[derive(Debug, Clone)]
pub struct MobiusGram {
    pub lambda: Complex64,
    pub gram: CMatrix,
    /// `∫ (1 − |b_λ|²) z^k z̄^j dν`, positive semidefinite.
    pub defect: CMatrix,
    /// Difference between two quadrature orders (0 when exact).
    pub quad_error: f64,
}

#[derive(Debug, Clone)]
pub struct MinModulus {
    pub lambda: Complex64,
    /// `min ‖b_λ f‖/‖f‖` over polynomials of degree `< N`.
    pub value: f64,
    /// Unit-norm minimizer.
    pub minimizer: PolyVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodimWitness {
    pub lambda: Complex64,
    /// `max_j |⟨(z−λ)z^j, g_λ⟩| / (‖(z−λ)z^j‖ ‖g_λ‖)` over `j < N`, with `g_λ`
    /// the order-`N+1` kernel.
    pub kernel_residual: f64,
    /// Cokernel dimension of `M_rect − λJ`.
    pub rect_coker: usize,
    pub rect_sigma_min: f64,
    pub rect_threshold: f64,
}

impl TruncatedSpace {
    pub fn new(nu: &MeasureSpec, n: usize) -> Result<Self> {
        check_order(n)?;
        let coeffs = nu.circle_coefficients(n, DEFAULT_FOURIER_TOL)?;
        let next = factorize(nu, &coeffs, n + 1).map_err(|err| match err {
            LabError::Conditioning {
                cond, gate, admissible, ..
            } => LabError::Conditioning {
                order: n,
                cond,
                gate,
                admissible: admissible.saturating_sub(1),
            },
            other => other,
        })?;
        let current = next.leading(n);
        let multiplication = multiplication_from(&next, n);
        let disk_rules = match nu.radial() {
            Some(radial) => Some(DiskRules::new(radial.alpha(), DEFAULT_QUAD_ORDER)?),
            None => None,
        };
        Ok(Self {
            order: n,
            coeffs,
            next,
            current,
            multiplication,
            disk_rules,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nu(&self) -> &MeasureSpec {
        self.current.nu()
    }

    pub fn gram_data(&self) -> &GramData {
        &self.current
    }

    /// Order `N+1` Gram data.
    pub fn next_gram_data(&self) -> &GramData {
        &self.next
    }

    pub fn multiplication(&self) -> &MultiplicationData {
        &self.multiplication
    }

    pub fn circle_coefficients(&self) -> &CircleCoefficients {
        &self.coeffs
    }

    /// Kernel `g_λ` of order `N` with `⟨f, g_λ⟩ = f(λ)`.
    pub fn reproducing_kernel(&self, lambda: Complex64) -> Result<PolyVector> {
        kernel_from(&self.current, lambda)
    }

    pub fn mobius_gram(&self, lambda: Complex64) -> Result<MobiusGram> {
        self.mobius_gram_with_order(lambda, DEFAULT_QUAD_ORDER)
    }

    pub fn mobius_gram_with_order(&self, lambda: Complex64, quad_order: usize) -> Result<MobiusGram> {
        check_disk_point(lambda)?;
        let n = self.order;
        let g = self.current.gram();
        let Some(radial) = self.coeffs.radial().copied() else {
            return Ok(MobiusGram {
                lambda,
                gram: g.clone(),
                defect: CMatrix::zeros(n, n),
                quad_error: 0.0,
            });
        };
        if lambda == ZERO {
            let v: Vec<f64> = (0..=n as u64).map(|k| radial.moment(k)).collect();
            let gram = CMatrix::from_fn(n, n, |j, k| self.coeffs.gram_entry(j + 1, k + 1));
            let defect = CMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    Complex64::new(v[k] - v[k + 1], 0.0)
                } else {
                    ZERO
                }
            });
            return Ok(MobiusGram {
                lambda,
                gram,
                defect,
                quad_error: 0.0,
            });
        }

        let built;
        let rules = match &self.disk_rules {
            Some(rules) if rules.order == quad_order => rules,
            _ => {
                built = DiskRules::new(radial.alpha(), quad_order)?;
                &built
            }
        };
        let rho = lambda.norm_sqr();
        let alpha = radial.alpha();
        let integrals = |rule: &[(f64, f64)]| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for &(t, w) in rule {
                let mut term = w * (alpha + 1.0) * (1.0 - t) / (1.0 - rho * t);
                for value in out.iter_mut() {
                    *value += term;
                    term *= t;
                }
            }
            out
        };
        let primary = integrals(&rules.primary);
        let check = integrals(&rules.check);
        let quad_error = primary
            .iter()
            .zip(&check)
            .map(|(p, c)| (p - c).abs())
            .fold(0.0, f64::max);
        if quad_error > MOBIUS_QUAD_TOL {
            return Err(LabError::Quadrature {
                achieved: quad_error,
                tol: MOBIUS_QUAD_TOL,
            });
        }

        let mut lambda_pow = vec![ONE; n];
        for d in 1..n {
            lambda_pow[d] = lambda_pow[d - 1] * lambda;
        }
        let scale = 1.0 - rho;
        let defect = CMatrix::from_fn(n, n, |j, k| {
            let c = if k >= j {
                lambda_pow[k - j]
            } else {
                lambda_pow[j - k].conj()
            };
            c * (scale * primary[j.max(k)])
        });
        let gram = g - &defect;
        Ok(MobiusGram {
            lambda,
            gram,
            defect,
            quad_error,
        })
    }

    /// `sqrt` of the smallest eigenvalue of `B* B_λ B`.
    pub fn min_modulus(&self, lambda: Complex64) -> Result<MinModulus> {
        let mobius = self.mobius_gram(lambda)?;
        let b = self.current.onb_transform();
        let form = b.adjoint() * &mobius.gram * b;
        let (values, vectors) = hermitian_eigen(&form);
        let mut y = vectors.column(0).into_owned();
        let pivot = y
            .iter()
            .copied()
            .max_by(|p, q| p.norm().total_cmp(&q.norm()))
            .unwrap_or(ONE);
        if pivot.norm() > 0.0 {
            y *= (pivot / pivot.norm()).conj();
        }
        let x = b * y;
        Ok(MinModulus {
            lambda,
            value: values[0].max(0.0).sqrt(),
            minimizer: PolyVector::new(x.iter().copied().collect()),
        })
    }

    /// `N − Re tr(B* B_λ B)`, evaluated as `Re tr(B* (G − B_λ) B)`.
    pub fn trace_deficit(&self, lambda: Complex64) -> Result<f64> {
        let mobius = self.mobius_gram(lambda)?;
        let b = self.current.onb_transform();
        let form = b.adjoint() * &mobius.defect * b;
        Ok((0..self.order).map(|i| form[(i, i)].re).sum())
    }

    pub fn codim_witness(&self, lambda: Complex64) -> Result<CodimWitness> {
        check_disk_point(lambda)?;
        let n = self.order;
        let g_next = self.next.gram();
        let kernel = kernel_from(&self.next, lambda)?;
        let g = DVector::from_column_slice(kernel.coeffs());
        let h = g_next * &g;
        let g_norm = (g.adjoint() * &h)[(0, 0)].re.sqrt();
        let mut residual = 0.0f64;
        for j in 0..n {
            // u = (z − λ) z^j
            let inner = -lambda * h[j].conj() + h[j + 1].conj();
            let u_norm_sq = (g_next[(j, j)] + g_next[(j + 1, j + 1)]
                - lambda.conj() * g_next[(j + 1, j)]
                - lambda * g_next[(j, j + 1)])
                .re;
            let denom = u_norm_sq.max(0.0).sqrt() * g_norm;
            residual = residual.max(inner.norm() / denom);
        }

        let mut shifted = self.multiplication.m_rect.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda;
        }
        let sv = singular_values(&shifted);
        let threshold = default_rank_threshold(n + 1, sv[0]);
        let rank = sv.iter().filter(|&&s| s > threshold).count();
        Ok(CodimWitness {
            lambda,
            kernel_residual: residual,
            rect_coker: n + 1 - rank,
            rect_sigma_min: sv[n - 1],
            rect_threshold: threshold,
        })
    }
}

fn check_disk_point(lambda: Complex64) -> Result<()> {
    if lambda.re.is_finite() && lambda.im.is_finite() && lambda.norm() < 1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("point {lambda} is not in the open unit disk")))
    }
}

fn multiplication_from(next: &GramData, n: usize) -> MultiplicationData {
    if next.method() == OrthoMethod::Diagonal {
        let (r, b) = (next.factor(), next.onb_transform());
        let mut m_rect = CMatrix::zeros(n + 1, n);
        for k in 0..n {
            m_rect[(k + 1, k)] = r[(k + 1, k + 1)] * b[(k, k)];
        }
        let t_n = m_rect.view((0, 0), (n, n)).into_owned();
        return MultiplicationData { m_rect, t_n };
    }
    let b = next.onb_transform().view((0, 0), (n, n)).into_owned();
    let mut shifted = CMatrix::zeros(n + 1, n);
    for i in 0..n {
        for k in 0..n {
            shifted[(i + 1, k)] = b[(i, k)];
        }
    }
    let m_rect = next.factor() * shifted;
    let t_n = m_rect.view((0, 0), (n, n)).into_owned();
    MultiplicationData { m_rect, t_n }
}

fn kernel_from(data: &GramData, lambda: Complex64) -> Result<PolyVector> {
    check_disk_point(lambda)?;
    let n = data.order();
    let mut e = DVector::from_element(n, ONE);
    for k in 1..n {
        e[k] = e[k - 1] * lambda.conj();
    }
    let b = data.onb_transform();
    let g = b * (b.adjoint() * e);
    Ok(PolyVector::new(g.iter().copied().collect()))
}

/// Exact multiplication map and compression of `S_ν`.
pub fn multiplication(nu: &MeasureSpec, n: usize) -> Result<MultiplicationData> {
    Ok(TruncatedSpace::new(nu, n)?.multiplication)
}

/// Kernel `g_λ` of the order-`N` truncation.
pub fn reproducing_kernel(nu: &MeasureSpec, n: usize, lambda: Complex64) -> Result<PolyVector> {
    kernel_from(&gram(nu, n)?, lambda)
}

pub fn mobius_gram(nu: &MeasureSpec, n: usize, lambda: Complex64, quad_order: usize) -> Result<MobiusGram> {
    TruncatedSpace::new(nu, n)?.mobius_gram_with_order(lambda, quad_order)
}

pub fn min_modulus(nu: &MeasureSpec, n: usize, lambda: Complex64) -> Result<MinModulus> {
    TruncatedSpace::new(nu, n)?.min_modulus(lambda)
}
