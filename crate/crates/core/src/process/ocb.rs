//! The two-party causal game: Alice receives `a`, Bob receives `b` and `b'`.
//! For `b' = 0` Alice must output `x = b`; for `b' = 1` Bob must output
//! `y = a`. All inputs are uniform.

use serde::Serialize;

use super::cj::{cj_measure_prepare, CjOperator, Instrument};
use super::{born, ProcessMatrix, SystemDims};
use crate::error::{Error, Result};
use crate::linalg::{kron_all, Operator, Pauli};

/// `W = ¼[1 + (σz^{A₂}σz^{B₁} + σz^{A₁}σx^{B₁}σz^{B₂})/√2]`.
pub fn ocb_process() -> ProcessMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let id = Operator::identity(&[2, 2, 2, 2]);
    let t1 = Operator::pauli_string(&[Pauli::I, Pauli::Z, Pauli::Z, Pauli::I]);
    let t2 = Operator::pauli_string(&[Pauli::Z, Pauli::I, Pauli::X, Pauli::Z]);
    let w = (&id + &(&t1 + &t2).scaled(s)).scaled(0.25);
    ProcessMatrix::new(w, SystemDims::qubits()).expect("the OCB process is valid")
}

fn z_projector(bit: u8) -> Operator {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    (&Operator::identity(&[2]) + &Operator::pauli(Pauli::Z).scaled(sign)).scaled(0.5)
}

/// Alice, input `a`: measure `z` on `A₁` (outcome `x`), prepare the
/// `(−1)ᵃ` eigenstate of `σz` on `A₂`. Element `x` is
/// `¼[1+(−1)ˣσz] ⊗ [1+(−1)ᵃσz]`.
pub fn alice_instrument(a: u8) -> Instrument {
    let elements = (0..2)
        .map(|x| cj_measure_prepare(&z_projector(x), &z_projector(a)).expect("valid"))
        .collect();
    Instrument::new(elements).expect("complete")
}

/// Bob, `b' = 1`: measure `z` on `B₁` (outcome `y`), prepare `1/2` on `B₂`.
/// Element `y` is `¼[1+(−1)ʸσz] ⊗ 1`.
pub fn bob_measure_instrument() -> Instrument {
    let mixed = Operator::identity(&[2]).scaled(0.5);
    let elements = (0..2)
        .map(|y| cj_measure_prepare(&z_projector(y), &mixed).expect("valid"))
        .collect();
    Instrument::new(elements).expect("complete")
}

/// Bob, `b' = 0`: a single-outcome operation `½[1 + (−1)ᵇ σx ⊗ σz]`
/// that encodes `b` into `B₂` conditioned on the `x` basis of `B₁`.
pub fn bob_encode_instrument(b: u8) -> Instrument {
    let sign = if b == 0 { 1.0 } else { -1.0 };
    let xz = kron_all(&[Operator::pauli(Pauli::X), Operator::pauli(Pauli::Z)]);
    let m = (&Operator::identity(&[2, 2]) + &xz.scaled(sign)).scaled(0.5);
    Instrument::new(vec![CjOperator::new(m).expect("PSD")]).expect("complete")
}

/// Bob's instrument for inputs `(b, b')`; outcome index is `y`.
pub fn bob_instrument(b: u8, b_prime: u8) -> Instrument {
    if b_prime == 1 {
        bob_measure_instrument()
    } else {
        bob_encode_instrument(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub a: u8,
    pub b: u8,
    pub b_prime: u8,
    pub x: u8,
    pub y: u8,
    pub p: f64,
}

fn require_qubits(w: &ProcessMatrix) -> Result<()> {
    if !w.dims().all_qubits() {
        return Err(Error::NonQubitDims(w.dims().as_vec()));
    }
    Ok(())
}

/// `p(x, y | a, b, b')` for every input and outcome. For `b' = 0` Bob has a
/// single outcome, reported as `y = 0`.
pub fn outcome_table(w: &ProcessMatrix) -> Result<Vec<OutcomeRow>> {
    require_qubits(w)?;
    let mut rows = Vec::new();
    for a in 0..2u8 {
        let ia = alice_instrument(a);
        for b in 0..2u8 {
            for b_prime in 0..2u8 {
                let ib = bob_instrument(b, b_prime);
                for (x, ma) in ia.elements().iter().enumerate() {
                    for (y, mb) in ib.elements().iter().enumerate() {
                        rows.push(OutcomeRow {
                            a,
                            b,
                            b_prime,
                            x: x as u8,
                            y: y as u8,
                            p: born(w, ma, mb)?,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// `½[p(x=b | b'=0) + p(y=a | b'=1)]` from a full outcome table.
pub fn success_from_table(rows: &[OutcomeRow]) -> f64 {
    let win: f64 = rows
        .iter()
        .filter(|r| if r.b_prime == 0 { r.x == r.b } else { r.y == r.a })
        .map(|r| r.p)
        .sum();
    win / 8.0
}

/// Success probability with the standard instruments.
pub fn ocb_game(w: &ProcessMatrix) -> Result<f64> {
    Ok(success_from_table(&outcome_table(w)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    AliceFirst,
    BobFirst,
}

fn bit(table: usize, index: usize) -> u8 {
    ((table >> index) & 1) as u8
}

fn wins(x: u8, y: u8, a: u8, b: u8, b_prime: u8) -> bool {
    if b_prime == 0 { x == b } else { y == a }
}

/// Best success of deterministic strategies with a one-bit message in a
/// fixed order. A boolean function of `k` bits is encoded as a `2ᵏ`-bit table.
pub fn classical_order_optimum(order: Order) -> f64 {
    let mut best = 0;
    match order {
        // Bob sends m = f(b, b'); Alice answers x = g(a, m); y = h(b, b').
        Order::BobFirst => {
            for f in 0..16 {
                for g in 0..16 {
                    for h in 0..16 {
                        let mut count = 0;
                        for a in 0..2u8 {
                            for b in 0..2u8 {
                                for bp in 0..2u8 {
                                    let bb = (2 * b + bp) as usize;
                                    let m = bit(f, bb);
                                    let x = bit(g, (2 * a + m) as usize);
                                    let y = bit(h, bb);
                                    count += wins(x, y, a, b, bp) as u32;
                                }
                            }
                        }
                        best = best.max(count);
                    }
                }
            }
        }
        // Alice sends m = f(a) and answers x = g(a); Bob answers y = h(b, b', m).
        Order::AliceFirst => {
            for f in 0..4 {
                for g in 0..4 {
                    for h in 0..256 {
                        let mut count = 0;
                        for a in 0..2u8 {
                            for b in 0..2u8 {
                                for bp in 0..2u8 {
                                    let m = bit(f, a as usize);
                                    let x = bit(g, a as usize);
                                    let y = bit(h, (4 * b + 2 * bp + m) as usize);
                                    count += wins(x, y, a, b, bp) as u32;
                                }
                            }
                        }
                        best = best.max(count);
                    }
                }
            }
        }
    }
    best as f64 / 8.0
}

/// Maximum over both orders; exactly `3/4`.
pub fn classical_fixed_order_optimum() -> f64 {
    classical_order_optimum(Order::AliceFirst).max(classical_order_optimum(Order::BobFirst))
}

/// Best success of `z`-diagonal instruments on `W`: each party measures its
/// input in the `z` basis, then outputs a guess and prepares a `z` state as
/// functions of its input and outcome. Alice's 256 strategies are
/// enumerated; Bob's choice is optimized separately for each `(b, b')`.
pub fn diagonal_instrument_optimum(w: &ProcessMatrix) -> Result<f64> {
    require_qubits(w)?;
    let m = w.operator().matrix();
    // P(s, t | f, k): s, t are measured on A₁, B₁; f, k are prepared on A₂, B₂.
    let p = |s: u8, f: u8, t: u8, k: u8| {
        let i = (8 * s + 4 * f + 2 * t + k) as usize;
        m[(i, i)].re
    };
    // A local strategy per input is a map s ↦ (guess, prepared) encoded in 4 bits:
    // bits 0,1 for s = 0 and bits 2,3 for s = 1.
    let act = |code: usize, s: u8| (bit(code, 2 * s as usize), bit(code, 2 * s as usize + 1));
    let mut best: f64 = 0.0;
    for alice in 0..256usize {
        let code_a = |a: u8| (alice >> (4 * a as usize)) & 15;
        let mut total = 0.0;
        for b in 0..2u8 {
            for bp in 0..2u8 {
                let mut best_bob: f64 = 0.0;
                for code_b in 0..16usize {
                    let mut v = 0.0;
                    for a in 0..2u8 {
                        for s in 0..2u8 {
                            let (x, f) = act(code_a(a), s);
                            for t in 0..2u8 {
                                let (y, k) = act(code_b, t);
                                if wins(x, y, a, b, bp) {
                                    v += p(s, f, t, k);
                                }
                            }
                        }
                    }
                    best_bob = best_bob.max(v);
                }
                total += best_bob;
            }
        }
        best = best.max(total / 8.0);
    }
    Ok(best)
}
