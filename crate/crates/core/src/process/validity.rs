//! Validity checks for process matrices.
//!
//! Every CPTP map has a CJ operator `M = M⁰ + H` with `M⁰ = 1⊗1/d_out` and
//! `tr_out H = 0`. The Born rule returns 1 on all CPTP pairs iff
//! `tr[W(M⁰⊗M⁰)] = 1` and `W` is orthogonal to `H_A⊗M⁰`, `M⁰⊗H_B` and
//! `H_A⊗H_B` for every such direction.

use rand::Rng;
use serde::Serialize;

use super::cj::random_channel;
use super::SystemDims;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, hs_expand, kron, pauli_label, Operator, Pauli, ALGEBRAIC_TOL};

/// Coefficients below this magnitude are ignored by the term taxonomy.
pub const TERM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermClass {
    Identity,
    Allowed,
    Forbidden,
}

/// One Pauli term of a qubit process matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    /// Pauli string, factors ordered `A₁ A₂ B₁ B₂`.
    pub pauli: String,
    /// Non-identity subsystems, e.g. `A1B1B2`.
    pub support: String,
    pub coefficient: f64,
    pub class: TermClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub checks: Vec<Check>,
    /// Present only when all four systems are qubits.
    pub terms: Option<Vec<Term>>,
}

impl ValidityReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether the affine conditions hold, ignoring positivity.
    pub fn linear_conditions_hold(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name != "positive")
            .all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (residual {:.3e})", c.name, c.residual))
            .collect();
        if failed.is_empty() {
            "all checks passed".into()
        } else {
            format!("failed: {}", failed.join(", "))
        }
    }
}

/// `M⁰ = 1⊗1/d_out` on `in ⊗ out`.
pub fn depolarizing_cj(d_in: usize, d_out: usize) -> Operator {
    Operator::identity(&[d_in, d_out]).scaled(1.0 / d_out as f64)
}

/// Basis of Hermitian operators `X` on `in ⊗ out` with `tr_out X = 0`.
pub fn traceless_output_directions(d_in: usize, d_out: usize) -> Vec<Operator> {
    let bin = hermitian_basis(d_in);
    let bout = hermitian_basis(d_out);
    let mut out = Vec::new();
    for s in &bin {
        for t in bout.iter().skip(1) {
            let a = Operator::single(s.clone()).expect("square");
            let b = Operator::single(t.clone()).expect("square");
            out.push(kron(&a, &b));
        }
    }
    out
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, v| m.max(v.abs()))
}

fn check(name: &'static str, residual: f64) -> Check {
    Check { name, residual, passed: residual <= ALGEBRAIC_TOL }
}

/// Runs every check and, for qubits, classifies the Pauli terms of `W`.
pub fn validate_process(w: &Operator, dims: SystemDims) -> Result<ValidityReport> {
    let dv = dims.as_vec();
    if w.side() != dims.side() {
        return Err(Error::DimensionMismatch(format!(
            "operator side {} vs dims {:?}",
            w.side(),
            dv
        )));
    }
    let w = w.clone().with_dims(dv.clone())?;
    if !w.is_hermitian(ALGEBRAIC_TOL) {
        return Err(Error::NotHermitian(w.hermitian_deviation()));
    }
    let pair = |a: &Operator, b: &Operator| w.trace_product(&kron(a, b)).re;

    let min_eig = w.min_eigenvalue()?;
    let target = (dims.d_a2 * dims.d_b2) as f64;
    let m0a = depolarizing_cj(dims.d_a1, dims.d_a2);
    let m0b = depolarizing_cj(dims.d_b1, dims.d_b2);
    let ha = traceless_output_directions(dims.d_a1, dims.d_a2);
    let hb = traceless_output_directions(dims.d_b1, dims.d_b2);

    let checks = vec![
        check("positive", (-min_eig).max(0.0)),
        check("trace", (w.trace().re - target).abs()),
        check("normalization", (pair(&m0a, &m0b) - 1.0).abs()),
        check("alice_directions", max_abs(ha.iter().map(|h| pair(h, &m0b)))),
        check("bob_directions", max_abs(hb.iter().map(|h| pair(&m0a, h)))),
        check(
            "joint_directions",
            max_abs(ha.iter().flat_map(|x| hb.iter().map(move |y| (x, y))).map(|(x, y)| pair(x, y))),
        ),
    ];
    let terms = if dims.all_qubits() { Some(classify_terms(&w)?) } else { None };
    Ok(ValidityReport {
        valid: checks.iter().all(|c| c.passed),
        checks,
        terms,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PartType {
    Identity,
    /// Acts on the input only; averages to zero on every CPTP map.
    InputOnly,
    /// Contains the output factor.
    Output,
}

fn part_type(input: Pauli, output: Pauli) -> PartType {
    match (input, output) {
        (Pauli::I, Pauli::I) => PartType::Identity,
        (_, Pauli::I) => PartType::InputOnly,
        _ => PartType::Output,
    }
}

/// Class of a Pauli string on `A₁ A₂ B₁ B₂`. A term can contribute to some
/// outcome sum unless one of the parties acts on its input only; such a
/// contribution is compatible with normalization only for the identity.
pub fn term_class(ps: &[Pauli; 4]) -> TermClass {
    let a = part_type(ps[0], ps[1]);
    let b = part_type(ps[2], ps[3]);
    if a == PartType::Identity && b == PartType::Identity {
        TermClass::Identity
    } else if a == PartType::InputOnly || b == PartType::InputOnly {
        TermClass::Allowed
    } else {
        TermClass::Forbidden
    }
}

fn support_label(ps: &[Pauli]) -> String {
    const NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];
    ps.iter()
        .zip(NAMES)
        .filter(|(p, _)| **p != Pauli::I)
        .map(|(_, n)| n)
        .collect()
}

fn classify_terms(w: &Operator) -> Result<Vec<Term>> {
    let exp = hs_expand(w)?;
    Ok(exp
        .nonzero(TERM_TOL)
        .into_iter()
        .map(|(ps, coef)| {
            let arr = [ps[0], ps[1], ps[2], ps[3]];
            Term {
                pauli: pauli_label(&ps),
                support: support_label(&ps),
                coefficient: coef.re,
                class: term_class(&arr),
            }
        })
        .collect())
}

/// Largest deviation of `Σ born` from 1 over `samples` random CPTP pairs.
pub fn monte_carlo_normalization(
    w: &Operator,
    dims: SystemDims,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    let w = w.clone().with_dims(dims.as_vec())?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = random_channel(dims.d_a1, dims.d_a2, rng);
        let b = random_channel(dims.d_b1, dims.d_b2, rng);
        let p = super::born_operator(&w, &a, &b)?;
        worst = worst.max((p - 1.0).abs());
    }
    Ok(worst)
}
