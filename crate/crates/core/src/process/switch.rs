//! The quantum switch used to decide whether two unitaries commute or
//! anticommute with one use of each.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CVector, Operator, PureState, ALGEBRAIC_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Commute,
    Anticommute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchOutcome {
    pub relation: Relation,
    /// Probability of the `+` outcome on the control.
    pub p_plus: f64,
}

fn check_unitary(u: &Operator, name: &str) -> Result<()> {
    let dev = (&u.adjoint() * u).max_abs_diff(&Operator::identity(u.dims()));
    if dev > ALGEBRAIC_TOL {
        return Err(Error::InvalidParameter(format!("{name} is not unitary (deviation {dev:.3e})")));
    }
    Ok(())
}

/// Which of `[A, B] = 0` or `{A, B} = 0` holds, within `tol` in Frobenius norm.
pub fn promise_relation(a: &Operator, b: &Operator, tol: f64) -> Result<Relation> {
    let ab = a * b;
    let ba = b * a;
    if (&ab - &ba).frobenius_norm() < tol {
        Ok(Relation::Commute)
    } else if (&ab + &ba).frobenius_norm() < tol {
        Ok(Relation::Anticommute)
    } else {
        Err(Error::PromiseViolated("A and B neither commute nor anticommute".into()))
    }
}

/// Prepares `(AB|ψ⟩|0⟩ + BA|ψ⟩|1⟩)/√2` and measures the control in the
/// `±` basis. The `+` outcome has probability `‖(AB + BA)ψ‖²/4`.
pub fn switch_discriminate(a: &Operator, b: &Operator, psi: &PureState, tol: f64) -> Result<SwitchOutcome> {
    if a.dims() != b.dims() || a.dims() != psi.dims() {
        return Err(Error::DimensionMismatch(format!(
            "A {:?}, B {:?}, ψ {:?}",
            a.dims(),
            b.dims(),
            psi.dims()
        )));
    }
    check_unitary(a, "A")?;
    check_unitary(b, "B")?;
    let promised = promise_relation(a, b, tol)?;
    let v = psi.amplitudes();
    let first_b = b.apply(v);
    let first_a = a.apply(v);
    let branch0 = a.apply(&first_b);
    let branch1 = b.apply(&first_a);
    let plus: CVector = (&branch0 + &branch1) * crate::linalg::cr(0.5);
    let p_plus = plus.norm_squared();
    let relation = if p_plus > 0.5 { Relation::Commute } else { Relation::Anticommute };
    debug_assert_eq!(relation, promised);
    Ok(SwitchOutcome { relation, p_plus })
}
