//! Quantum CHSH strategies and the Wigner-rotated EPR pair.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cr, kron, CMatrix, CVector, Operator, Pauli, PureState};

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(
        CVector::from_vec(vec![cr(0.0), cr(s), cr(-s), cr(0.0)]),
        vec![2, 2],
    )
    .expect("unit norm")
}

fn check_observable(o: &Operator) -> Result<()> {
    let (vals, _) = o.eigh()?;
    let worst = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if worst > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "observable spectrum exceeds [-1,1] (|λ| = {worst})"
        )));
    }
    Ok(())
}

/// `⟨A0B0⟩ + ⟨A0B1⟩ + ⟨A1B0⟩ − ⟨A1B1⟩` on a bipartite state.
pub fn chsh_expectation(
    state: &PureState,
    a0: &Operator,
    a1: &Operator,
    b0: &Operator,
    b1: &Operator,
) -> Result<f64> {
    if a0.dims() != a1.dims() || b0.dims() != b1.dims() {
        return Err(Error::DimensionMismatch("observable pairs differ in dims".into()));
    }
    for o in [a0, a1, b0, b1] {
        check_observable(o)?;
    }
    let bell = bell_operator(a0, a1, b0, b1);
    if bell.side() != state.amplitudes().len() {
        return Err(Error::DimensionMismatch(format!(
            "Bell operator side {} vs state length {}",
            bell.side(),
            state.amplitudes().len()
        )));
    }
    Ok(state.expectation(&bell)?.re)
}

/// `A0⊗B0 + A0⊗B1 + A1⊗B0 − A1⊗B1`.
pub fn bell_operator(a0: &Operator, a1: &Operator, b0: &Operator, b1: &Operator) -> Operator {
    let t = &(&kron(a0, b0) + &kron(a0, b1)) + &kron(a1, b0);
    &t - &kron(a1, b1)
}

/// Observables reaching the Tsirelson bound on the singlet:
/// `A0 = σz`, `A1 = σx`, `B0 = −(σz+σx)/√2`, `B1 = (σx−σz)/√2`.
pub fn tsirelson_observables() -> [Operator; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Operator::pauli(Pauli::Z);
    let x = Operator::pauli(Pauli::X);
    let b0 = (&z + &x).scaled(-s);
    let b1 = (&x - &z).scaled(s);
    [z, x, b0, b1]
}

pub fn tsirelson_value() -> f64 {
    let [a0, a1, b0, b1] = tsirelson_observables();
    chsh_expectation(&singlet(), &a0, &a1, &b0, &b1).expect("fixed observables are valid")
}

/// Wigner angle `δ = atan(sinh ξ sinh χ / (cosh ξ + cosh χ))`.
pub fn wigner_angle(xi: f64, chi: f64) -> f64 {
    (xi.sinh() * chi.sinh() / (xi.cosh() + chi.cosh())).atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostScenario {
    pub xi: f64,
    pub chi: f64,
    pub delta: f64,
}

impl BoostScenario {
    pub fn new(xi: f64, chi: f64) -> Result<Self> {
        if !xi.is_finite() || !chi.is_finite() {
            return Err(Error::InvalidParameter("rapidities must be finite".into()));
        }
        Ok(BoostScenario { xi, chi, delta: wigner_angle(xi, chi) })
    }
}

/// `R_y(θ) = exp(−iθσ_y/2)`.
pub fn rotation_y(theta: f64) -> Operator {
    let (s, co) = (0.5 * theta).sin_cos();
    Operator::single(CMatrix::from_row_slice(2, 2, &[cr(co), cr(-s), cr(s), cr(co)]))
        .expect("2x2")
}

/// The spin state `[cos δ (|↑↓⟩ − |↓↑⟩) + sin δ (|↑↑⟩ + |↓↓⟩)]/√2`.
pub fn relativistic_epr(delta: f64) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (sd, cd) = delta.sin_cos();
    PureState::normalized(
        CVector::from_vec(vec![cr(s * sd), cr(s * cd), cr(-s * cd), cr(s * sd)]),
        vec![2, 2],
    )
    .expect("nonzero")
}

/// The observables `Q = σz`, `R = σy`, `S = −(σy+σz)/√2`, `T = (σz−σy)/√2`.
pub fn qrst() -> [Operator; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Operator::pauli(Pauli::Z);
    let y = Operator::pauli(Pauli::Y);
    let big_s = (&y + &z).scaled(-s);
    let t = (&z - &y).scaled(s);
    [z, y, big_s, t]
}

fn qrst_value(state: &PureState, first: &dyn Fn(&Operator) -> Operator, second: &dyn Fn(&Operator) -> Operator) -> f64 {
    let [q, r, s, t] = qrst();
    let (q, r) = (first(&q), first(&r));
    let (s, t) = (second(&s), second(&t));
    let ev = |a: &Operator, b: &Operator| state.expectation(&kron(a, b)).expect("2x2 on 2x2").re;
    ev(&q, &s) + ev(&r, &s) + ev(&r, &t) - ev(&q, &t)
}

/// `⟨QS⟩ + ⟨RS⟩ + ⟨RT⟩ − ⟨QT⟩` on the boosted pair; equals `2√2 cos²δ`.
pub fn boosted_chsh(delta: f64) -> f64 {
    qrst_value(&relativistic_epr(delta), &|o| o.clone(), &|o| o.clone())
}

/// Same functional with the first particle's directions rotated about ŷ by
/// `+δ` and the second's by `−δ`; stays at `2√2`.
pub fn compensated_chsh(delta: f64) -> f64 {
    let r1 = rotation_y(delta);
    let r2 = rotation_y(-delta);
    let conj = |r: &Operator, o: &Operator| &(r * o) * &r.adjoint();
    qrst_value(
        &relativistic_epr(delta),
        &|o| conj(&r1, o),
        &|o| conj(&r2, o),
    )
}

/// Real 4×4 Lorentz boost taking the rest frame to four-velocity `(γ, u)`.
fn pure_boost(u: [f64; 3]) -> Matrix4<f64> {
    let gamma = (1.0 + u.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = gamma;
    for i in 0..3 {
        m[(0, i + 1)] = u[i];
        m[(i + 1, 0)] = u[i];
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[(i + 1, j + 1)] = delta + u[i] * u[j] / (1.0 + gamma);
        }
    }
    m
}

/// Wigner rotation angle from explicit Lorentz matrices: a particle of
/// rapidity `ξ` along x̂ seen by an observer boosted with rapidity `χ`
/// along ẑ. Returns the magnitude of the rotation about ŷ in
/// `W = L(Λp)⁻¹ Λ L(p)`.
pub fn wigner_angle_from_matrices(xi: f64, chi: f64) -> f64 {
    let lp = pure_boost([xi.sinh(), 0.0, 0.0]);
    let mut lam = Matrix4::identity();
    lam[(0, 0)] = chi.cosh();
    lam[(3, 3)] = chi.cosh();
    lam[(0, 3)] = -chi.sinh();
    lam[(3, 0)] = -chi.sinh();
    let p = lam * lp.column(0);
    let lq = pure_boost([p[1], p[2], p[3]]);
    let w = lq.try_inverse().expect("boosts are invertible") * lam * lp;
    w[(1, 3)].atan2(w[(1, 1)]).abs()
}

/// `⟨A⊗B⟩` on a two-party state.
pub fn correlator(state: &PureState, a: &Operator, b: &Operator) -> Result<f64> {
    Ok(state.expectation(&kron(a, b))?.re)
}
