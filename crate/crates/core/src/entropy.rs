//! Ground-state entanglement entropy of coupled harmonic oscillators.
//! Entropies are in nats.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Two oscillators with `H = ½[p₁² + p₂² + k₀(x₁² + x₂²) + k₁(x₁ − x₂)²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorPair {
    pub k0: f64,
    pub k1: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nu: f64,
    pub xi: f64,
}

impl OscillatorPair {
    pub fn new(k0: f64, k1: f64) -> Result<Self> {
        if !(k0 > 0.0) || !k0.is_finite() {
            return Err(Error::InvalidParameter(format!("k0 = {k0} must be positive")));
        }
        if !(k1 >= 0.0) || !k1.is_finite() {
            return Err(Error::InvalidParameter(format!("k1 = {k1} must be non-negative")));
        }
        let omega_plus = k0.sqrt();
        let omega_minus = (k0 + 2.0 * k1).sqrt();
        let sum = omega_plus + omega_minus;
        let beta = (omega_plus - omega_minus).powi(2) / (4.0 * sum);
        let gamma = beta + 2.0 * omega_plus * omega_minus / sum;
        let nu = (omega_plus * omega_minus).sqrt();
        let xi = beta / (gamma + nu);
        Ok(OscillatorPair { k0, k1, omega_plus, omega_minus, beta, gamma, nu, xi })
    }

    pub fn entropy(&self) -> f64 {
        entropy_from_xi(self.xi).expect("0 ≤ ξ < 1 by construction")
    }
}

pub fn pair_xi(k0: f64, k1: f64) -> Result<f64> {
    Ok(OscillatorPair::new(k0, k1)?.xi)
}

/// `S = −ln(1−ξ) − ξ/(1−ξ) ln ξ`, with `S(0) = 0`.
pub fn entropy_from_xi(xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::InvalidParameter(format!("ξ = {xi} outside [0,1)")));
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    Ok(-(1.0 - xi).ln() - xi / (1.0 - xi) * xi.ln())
}

/// An open chain of `n` oscillators with
/// `H = ½[Σp² + k₀Σx² + k₁Σ(x_{i+1} − x_i)²]` and a contiguous block of
/// zero-based sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    pub n: usize,
    pub k0: f64,
    pub k1: f64,
    pub block: Vec<usize>,
}

impl ChainSpec {
    pub fn new(n: usize, k0: f64, k1: f64, block: Vec<usize>) -> Result<Self> {
        if block.is_empty() || block.len() >= n {
            return Err(Error::InvalidParameter(format!(
                "block size {} must be in [1, {})",
                block.len(),
                n
            )));
        }
        if block.windows(2).any(|w| w[1] != w[0] + 1) || *block.last().expect("nonempty") >= n {
            return Err(Error::InvalidParameter(format!(
                "block {block:?} is not a contiguous range inside 0..{n}"
            )));
        }
        Ok(ChainSpec { n, k0, k1, block })
    }

    /// The first `size` sites.
    pub fn leading(n: usize, k0: f64, k1: f64, size: usize) -> Result<Self> {
        ChainSpec::new(n, k0, k1, (0..size).collect())
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.block.contains(i)).collect()
    }

    pub fn coupling_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut k = DMatrix::<f64>::identity(n, n) * self.k0;
        for i in 0..n.saturating_sub(1) {
            k[(i, i)] += self.k1;
            k[(i + 1, i + 1)] += self.k1;
            k[(i, i + 1)] -= self.k1;
            k[(i + 1, i)] -= self.k1;
        }
        k
    }
}

fn matrix_power(eig: &SymmetricEigen<f64, nalgebra::Dyn>, power: f64) -> DMatrix<f64> {
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.powf(power)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Symplectic eigenvalues of the reduced ground state on `sites`.
pub fn symplectic_eigenvalues(spec: &ChainSpec, sites: &[usize]) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(spec.coupling_matrix());
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coupling matrix is not positive definite (min eigenvalue {min})"
        )));
    }
    let x = matrix_power(&eig, -0.5) * 0.5;
    let p = matrix_power(&eig, 0.5) * 0.5;
    let xa = SymmetricEigen::new(submatrix(&x, sites));
    let xa_half = matrix_power(&xa, 0.5);
    let m = &xa_half * submatrix(&p, sites) * &xa_half;
    let m = (&m + m.transpose()) * 0.5;
    let mut nus: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.25).sqrt())
        .collect();
    nus.sort_by(f64::total_cmp);
    Ok(nus)
}

fn mode_entropy(nu: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = nu - 0.5;
    let lo_term = if lo > 1e-15 { lo * lo.ln() } else { 0.0 };
    hi * hi.ln() - lo_term
}

pub fn chain_block_entropy(spec: &ChainSpec) -> Result<f64> {
    if !(spec.k0 > 0.0) || !(spec.k1 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "couplings (k0, k1) = ({}, {}) give a singular chain",
            spec.k0, spec.k1
        )));
    }
    Ok(symplectic_eigenvalues(spec, &spec.block)?
        .into_iter()
        .map(mode_entropy)
        .sum())
}

/// `ln[(M+N)! / (M! N!)]`.
pub fn max_entropy_bound(m: u64, n: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let (m, n) = (m as f64, n as f64);
    Ok(libm::lgamma(m + n + 1.0) - libm::lgamma(m + 1.0) - libm::lgamma(n + 1.0))
}
