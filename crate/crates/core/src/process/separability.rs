//! Search for a causally separable decomposition `W = W₁ + W₂` with
//! `W₁ ⪰ 0` ordered `A ≺ B` and `W₂ ⪰ 0` ordered `B ≺ A`.
//!
//! The pair `(W₁, W₂)` must lie in two convex sets: the PSD pair cone and
//! the affine set of ordered pairs summing to `W`. Both projections are
//! exact; the search alternates them by Douglas–Rachford splitting (default)
//! or Dykstra's method. Failure to reach the tolerance is not a proof of
//! nonseparability.

use serde::Serialize;

use super::{ProcessMatrix, A1, A2, B1, B2};
use crate::error::Result;
use crate::linalg::{project_psd, reduce, Operator};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Residuals are evaluated every this many cycles.
const CHECK_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Separability {
    Separable {
        #[serde(serialize_with = "ser_entries")]
        a_before_b: Operator,
        #[serde(serialize_with = "ser_entries")]
        b_before_a: Operator,
        residual: f64,
        iterations: usize,
    },
    NoFeasiblePoint {
        residual: f64,
        iterations: usize,
    },
}

fn ser_entries<S: serde::Serializer>(op: &Operator, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&super::operator_entries(op), s)
}

impl Separability {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separability::Separable { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            Separability::Separable { residual, .. } | Separability::NoFeasiblePoint { residual, .. } => *residual,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Separability::Separable { iterations, .. } | Separability::NoFeasiblePoint { iterations, .. } => *iterations,
        }
    }
}

fn r(x: &Operator, s: &[usize]) -> Operator {
    reduce(x, s).expect("four subsystems")
}

/// Orthogonal projector onto processes in which `B` cannot signal to `A`.
pub fn project_a_before_b(x: &Operator) -> Operator {
    &(&r(x, &[B2]) - &r(x, &[B1, B2])) + &r(x, &[A2, B1, B2])
}

/// Orthogonal projector onto processes in which `A` cannot signal to `B`.
pub fn project_b_before_a(x: &Operator) -> Operator {
    &(&r(x, &[A2]) - &r(x, &[A1, A2])) + &r(x, &[A1, A2, B2])
}

fn psd_violation(x: &Operator) -> Result<f64> {
    Ok(x.frobenius_distance(&project_psd(x)?))
}

/// Largest distance of the pair to the PSD cone or to the ordered subspaces.
fn residual(w1: &Operator, w2: &Operator) -> Result<f64> {
    let ps = psd_violation(w1)?.max(psd_violation(w2)?);
    let sub = w1
        .frobenius_distance(&project_a_before_b(w1))
        .max(w2.frobenius_distance(&project_b_before_a(w2)));
    Ok(ps.max(sub))
}

/// Nearest pair to `(y1, y2)` with `W₁` ordered `A ≺ B`, `W₂` ordered
/// `B ≺ A` and `W₁ + W₂ = W`. With commuting projectors `P₁`, `P₂` the
/// multiplier solves `(P₁+P₂)Λ = W − P₁y₁ − P₂y₂`, and
/// `(P₁+P₂)⁺ = P₁ + P₂ − 3/2·P₁P₂`.
fn project_affine(target: &Operator, y1: &Operator, y2: &Operator) -> (Operator, Operator) {
    let p1y = project_a_before_b(y1);
    let p2y = project_b_before_a(y2);
    let rhs = &(target - &p1y) - &p2y;
    let r1 = project_a_before_b(&rhs);
    let r2 = project_b_before_a(&rhs);
    let r12 = project_a_before_b(&r2);
    let lambda = &(&r1 + &r2) - &r12.scaled(1.5);
    (&p1y + &project_a_before_b(&lambda), &p2y + &project_b_before_a(&lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Douglas–Rachford splitting between the PSD pair cone and the affine set.
    #[default]
    DouglasRachford,
    /// Dykstra's cyclic projections with increments on the cone.
    Dykstra,
}

pub fn causal_separability(w: &ProcessMatrix, tol: f64, max_iter: usize) -> Result<Separability> {
    causal_separability_with(w, tol, max_iter, Method::default())
}

/// Runs `method` from `(W/2, W/2)` until the residual of the affine iterate
/// drops below `tol` or `max_iter` cycles have run.
pub fn causal_separability_with(
    w: &ProcessMatrix,
    tol: f64,
    max_iter: usize,
    method: Method,
) -> Result<Separability> {
    let target = w.operator();
    let (mut x1, mut x2) = project_affine(target, &target.scaled(0.5), &target.scaled(0.5));
    // Governing sequence for Douglas–Rachford, cone increments for Dykstra.
    let (mut g1, mut g2) = match method {
        Method::DouglasRachford => (x1.clone(), x2.clone()),
        Method::Dykstra => (Operator::zeros(target.dims()), Operator::zeros(target.dims())),
    };
    let mut res = residual(&x1, &x2)?;
    let mut iter = 0;
    while iter < max_iter && res >= tol {
        iter += 1;
        match method {
            Method::DouglasRachford => {
                let y1 = project_psd(&g1)?;
                let y2 = project_psd(&g2)?;
                let (a1, a2) = project_affine(target, &(&y1.scaled(2.0) - &g1), &(&y2.scaled(2.0) - &g2));
                g1 = &(&g1 + &a1) - &y1;
                g2 = &(&g2 + &a2) - &y2;
                (x1, x2) = project_affine(target, &y1, &y2);
            }
            Method::Dykstra => {
                let z1 = &x1 + &g1;
                let z2 = &x2 + &g2;
                let y1 = project_psd(&z1)?;
                let y2 = project_psd(&z2)?;
                g1 = &z1 - &y1;
                g2 = &z2 - &y2;
                (x1, x2) = project_affine(target, &y1, &y2);
            }
        }
        if iter % CHECK_EVERY == 0 || iter == max_iter {
            res = residual(&x1, &x2)?;
        }
    }
    Ok(if res < tol {
        Separability::Separable { a_before_b: x1, b_before_a: x2, residual: res, iterations: iter }
    } else {
        Separability::NoFeasiblePoint { residual: res, iterations: iter }
    })
}
