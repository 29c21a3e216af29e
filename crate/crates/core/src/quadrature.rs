//! Gauss–Jacobi rules via the Golub–Welsch eigenvalue method.

use nalgebra::DMatrix;

use crate::error::{LabError, Result};
use crate::special::ln_gamma;

/// Nodes and weights integrating `(1 − x)^a (1 + x)^b p(x)` over `[−1, 1]`
/// exactly for polynomials `p` of degree below `2 · len`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
}

impl GaussJacobi {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Parameter("Gauss-Jacobi rule needs at least one node".into()));
        }
        if !(a > -1.0 && b > -1.0 && a.is_finite() && b.is_finite()) {
            return Err(LabError::Domain(format!(
                "Gauss-Jacobi exponents must exceed -1, got a={a}, b={b}"
            )));
        }

        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        let ab = a + b;
        for i in 0..n {
            let k = i as f64;
            let diag = if i == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            };
            jacobi[(i, i)] = diag;
            if i + 1 < n {
                let m = k + 1.0;
                let s = 2.0 * m + ab;
                let off_sq = if i == 0 {
                    // (m + a + b) / (s − 1) cancels to 1 at m = 1.
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                let off = off_sq.sqrt();
                jacobi[(i, i + 1)] = off;
                jacobi[(i + 1, i)] = off;
            }
        }

        let ln_mass = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(ab + 2.0);
        let mass = ln_mass.exp();

        let eigen = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eigen.eigenvectors[(0, i)];
                (eigen.eigenvalues[i], mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights, a, b })
    }

    /// Gauss–Legendre rule with `n` nodes.
    pub fn legendre(n: usize) -> Result<Self> {
        Self::new(n, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights on `[0, 1]` for the weight `(1 − t)^a t^b`.
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = 0.5f64.powf(self.a + self.b + 1.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (0.5 * (1.0 + x), w * scale))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
