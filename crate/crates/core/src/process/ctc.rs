//! Deutsch's self-consistency condition for a qubit-register closed
//! timelike curve interacting with a chronology-respecting register.
//!
//! The unitary acts on `CTC ⊗ TR` with the CTC as the first factor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, Operator, ALGEBRAIC_TOL};

pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    #[serde(serialize_with = "ser_rho")]
    pub rho: Operator,
    pub residual: f64,
    pub iterations: usize,
}

fn ser_rho<S: serde::Serializer>(op: &Operator, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&super::operator_entries(op), s)
}

fn check_unitary(u: &Operator) -> Result<()> {
    let prod = &u.adjoint() * u;
    let dev = prod.max_abs_diff(&Operator::identity(u.dims()));
    if dev > ALGEBRAIC_TOL {
        return Err(Error::InvalidParameter(format!("U is not unitary (deviation {dev:.3e})")));
    }
    Ok(())
}

/// `Φ(ρ) = tr_TR[U† (ρ ⊗ ρ_in) U]`.
pub fn ctc_map(u: &Operator, rho: &Operator, rho_in: &Operator) -> Result<Operator> {
    let joint = kron(rho, rho_in).with_dims(u.dims().to_vec())?;
    let evolved = &(&u.adjoint() * &joint) * u;
    partial_trace(&evolved, &[0])
}

/// Iterates `ρ ← ½ρ + ½Φ(ρ)` from the maximally mixed state until
/// `‖ρ − Φ(ρ)‖_F < tol`. The limit from this seed is the returned fixed point.
pub fn deutsch_fixed_point(u: &Operator, rho_in: &Operator, tol: f64, max_iter: usize) -> Result<FixedPoint> {
    super::cj::validate_density(rho_in)?;
    let d_tr = rho_in.side();
    if !u.side().is_multiple_of(d_tr) {
        return Err(Error::DimensionMismatch(format!(
            "U side {} is not a multiple of the input dimension {d_tr}",
            u.side()
        )));
    }
    let d_ctc = u.side() / d_tr;
    let u = u.clone().with_dims(vec![d_ctc, d_tr])?;
    check_unitary(&u)?;
    let rho_in = Operator::single(rho_in.matrix().clone())?;
    let mut rho = Operator::identity(&[d_ctc]).scaled(1.0 / d_ctc as f64);
    let mut residual = f64::INFINITY;
    for iterations in 0..=max_iter {
        let image = ctc_map(&u, &rho, &rho_in)?;
        residual = rho.frobenius_distance(&image);
        if residual < tol {
            return Ok(FixedPoint { rho, residual, iterations });
        }
        rho = (&rho + &image).scaled(0.5);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// `(X ⊗ 1)·CNOT` with the CTC as control: the time-travel paradox circuit.
pub fn grandfather_unitary() -> Operator {
    use crate::linalg::Pauli;
    let x = Operator::pauli(Pauli::X);
    let i = Operator::identity(&[2]);
    let p0 = (&i + &Operator::pauli(Pauli::Z)).scaled(0.5);
    let p1 = (&i - &Operator::pauli(Pauli::Z)).scaled(0.5);
    let cnot = &kron(&p0, &i) + &kron(&p1, &x);
    &kron(&x, &i) * &cnot
}

pub fn swap_unitary() -> Operator {
    let mut m = crate::linalg::CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = crate::linalg::cr(1.0);
    }
    Operator::new(m, vec![2, 2]).expect("4x4")
}
