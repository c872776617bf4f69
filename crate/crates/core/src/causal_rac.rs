//! The n-round causal game read as a random access code: round
//! probabilities, the efficiency functional and its bounds, and the
//! maximal-correlation conditions.

use nalgebra::Matrix2;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{bsc_capacity, mutual_information};
use crate::info_causality::MonteCarloResult;
use crate::rng::stream_rng;

const LN2: f64 = std::f64::consts::LN_2;

/// Biases of the two signalling directions over `n` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalRacParams {
    pub n: u32,
    pub e1: f64,
    pub e2: f64,
}

fn check_bias(name: &str, e: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::InvalidParameter(format!("{name} = {e} outside [0,1]")));
    }
    Ok(())
}

impl CausalRacParams {
    pub fn new(n: u32, e1: f64, e2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        check_bias("E1", e1)?;
        check_bias("E2", e2)?;
        Ok(CausalRacParams { n, e1, e2 })
    }

    pub fn squared_sum(&self) -> f64 {
        self.e1 * self.e1 + self.e2 * self.e2
    }

    pub fn is_quantum(&self) -> bool {
        self.squared_sum() <= 1.0 + 1e-12
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `½(1 + E1^{n−k} E2^k)`.
pub fn term_probability(n: u32, k: u32, e1: f64, e2: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(0.5 * (1.0 + e1.powi((n - k) as i32) * e2.powi(k as i32)))
}

/// `2⁻ⁿ Σ_k C(n,k) p_{n−k,k}`.
pub fn game_value(params: &CausalRacParams) -> f64 {
    let n = params.n;
    (0..=n)
        .map(|k| binomial(n, k) * term_probability(n, k, params.e1, params.e2).expect("k ≤ n"))
        .sum::<f64>()
        / 2f64.powi(n as i32)
}

/// `½(1 + ((E1+E2)/2)ⁿ)`.
pub fn game_value_closed_form(params: &CausalRacParams) -> f64 {
    0.5 * (1.0 + (0.5 * (params.e1 + params.e2)).powi(params.n as i32))
}

/// `Σ_k C(n,k) [1 − h(p_{n−k,k})]` bits.
pub fn efficiency_i(params: &CausalRacParams) -> f64 {
    let n = params.n;
    (0..=n)
        .map(|k| {
            let bias = params.e1.powi((n - k) as i32) * params.e2.powi(k as i32);
            binomial(n, k) * bsc_capacity(bias)
        })
        .sum()
}

/// `((E1²+E2²)ⁿ/(2 ln 2), (E1²+E2²)ⁿ)`.
pub fn efficiency_bounds(params: &CausalRacParams) -> (f64, f64) {
    let upper = params.squared_sum().powi(params.n as i32);
    (upper / (2.0 * LN2), upper)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub squared_sum: f64,
    pub quantum: bool,
    /// Largest efficiency seen for `n ≤ n_max`.
    pub max_efficiency: f64,
    /// First `n` at which the lower bound exceeds 1, if any.
    pub first_violation: Option<u32>,
}

pub fn quantum_boundary_check(e1: f64, e2: f64, n_max: u32) -> Result<BoundaryReport> {
    let mut max_efficiency: f64 = 0.0;
    let mut first_violation = None;
    for n in 1..=n_max {
        let p = CausalRacParams::new(n, e1, e2)?;
        max_efficiency = max_efficiency.max(efficiency_i(&p));
        if first_violation.is_none() && efficiency_bounds(&p).0 > 1.0 {
            first_violation = Some(n);
        }
    }
    let squared_sum = e1 * e1 + e2 * e2;
    Ok(BoundaryReport {
        squared_sum,
        quantum: squared_sum <= 1.0 + 1e-12,
        max_efficiency,
        first_violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignallingSum {
    pub information_sum: f64,
    pub squared_sum: f64,
    pub satisfied: bool,
}

/// `I(x:b|b'=0) + I(y:a|b'=1) ≤ 1` for single-round biases.
pub fn signalling_sum_check(e1: f64, e2: f64) -> Result<SignallingSum> {
    check_bias("E1", e1)?;
    check_bias("E2", e2)?;
    let information_sum = bsc_capacity(e1) + bsc_capacity(e2);
    Ok(SignallingSum {
        information_sum,
        squared_sum: e1 * e1 + e2 * e2,
        satisfied: information_sum <= 1.0 + 1e-12,
    })
}

/// Maximal correlation of two binary variables with joint `joint[i][j]`:
/// the second singular value of `P(i,j)/√(P(i)P(j))`. A constant marginal
/// gives 0.
pub fn hgr_binary(joint: [[f64; 2]; 2]) -> Result<f64> {
    let total: f64 = joint.iter().flatten().sum();
    if joint.iter().flatten().any(|&v| !v.is_finite() || v < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("not a distribution (sum {total})")));
    }
    let row = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let col = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    if row.iter().chain(&col).any(|&m| m <= 0.0) {
        return Ok(0.0);
    }
    let q = Matrix2::from_fn(|i, j| joint[i][j] / (row[i] * col[j]).sqrt());
    let mut sv: Vec<f64> = q.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv[1].clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HgrReport {
    pub rho1: f64,
    pub rho2: f64,
    pub squared_sum: f64,
    pub plain_sum: f64,
    pub quantum: bool,
    pub causally_separable: bool,
}

/// Both maximal-correlation conditions with `ρ*ᵢ` taken from the uniform
/// agreement tables of bias `Eᵢ`.
pub fn hgr_condition_check(e1: f64, e2: f64) -> Result<HgrReport> {
    check_bias("E1", e1)?;
    check_bias("E2", e2)?;
    let rho1 = hgr_binary(agreement_table(e1))?;
    let rho2 = hgr_binary(agreement_table(e2))?;
    let squared_sum = rho1 * rho1 + rho2 * rho2;
    let plain_sum = rho1 + rho2;
    Ok(HgrReport {
        rho1,
        rho2,
        squared_sum,
        plain_sum,
        quantum: squared_sum <= 1.0 + 1e-12,
        causally_separable: plain_sum <= 1.0 + 1e-12,
    })
}

/// Uniform input bit and a copy that agrees with probability `(1+E)/2`.
pub fn agreement_table(e: f64) -> [[f64; 2]; 2] {
    let same = 0.25 * (1.0 + e);
    let diff = 0.25 * (1.0 - e);
    [[same, diff], [diff, same]]
}

fn flip_probs(e: f64) -> [f64; 2] {
    [0.5 * (1.0 + e), 0.5 * (1.0 - e)]
}

/// `I(u₁⊕u₂ : v₁⊕v₂)` for two independent uniform bits `u₁, u₂`, each
/// copied to `vᵢ` through a channel of bias `eᵢ`, by enumeration.
pub fn xor_pair_information(e_first: f64, e_second: f64) -> f64 {
    let mut joint = vec![vec![0.0; 2]; 2];
    let (f1, f2) = (flip_probs(e_first), flip_probs(e_second));
    for u1 in 0..2 {
        for u2 in 0..2 {
            for (err1, p1) in f1.iter().enumerate() {
                for (err2, p2) in f2.iter().enumerate() {
                    let v1 = u1 ^ err1;
                    let v2 = u2 ^ err2;
                    joint[u1 ^ u2][v1 ^ v2] += 0.25 * p1 * p2;
                }
            }
        }
    }
    mutual_information(&joint)
}

/// `I(u : v)` for a uniform bit sent through a channel of bias `e`.
pub fn single_round_information(e: f64) -> f64 {
    let t = agreement_table(e);
    mutual_information(&[t[0].to_vec(), t[1].to_vec()])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpiReport {
    pub i_x1_b1: f64,
    pub i_xor_00: f64,
    pub i_xor_01: f64,
    pub i_y1_a1: f64,
    pub i_xor_10: f64,
    pub i_xor_11: f64,
    /// First inequality, evaluated at the given first-round biases.
    pub hypo1: bool,
    /// Second inequality, evaluated at the given first-round biases.
    pub hypo2: bool,
    /// `(E1b)² + (E2b)² ≤ 1`.
    pub quantum_second_round: bool,
}

impl DpiReport {
    pub fn information_conditions(&self) -> bool {
        self.hypo1 && self.hypo2
    }
}

pub const DPI_TOL: f64 = 1e-9;

/// Evaluates the six mutual informations of two independent rounds with
/// biases `(E1a, E2a)` then `(E1b, E2b)`.
pub fn two_round_dpi_check(e1a: f64, e2a: f64, e1b: f64, e2b: f64) -> Result<DpiReport> {
    for (name, e) in [("E1a", e1a), ("E2a", e2a), ("E1b", e1b), ("E2b", e2b)] {
        check_bias(name, e)?;
    }
    let i_x1_b1 = single_round_information(e1a);
    let i_xor_00 = xor_pair_information(e1a, e1b);
    let i_xor_01 = xor_pair_information(e1a, e2b);
    let i_y1_a1 = single_round_information(e2a);
    let i_xor_10 = xor_pair_information(e2a, e1b);
    let i_xor_11 = xor_pair_information(e2a, e2b);
    Ok(DpiReport {
        i_x1_b1,
        i_xor_00,
        i_xor_01,
        i_y1_a1,
        i_xor_10,
        i_xor_11,
        hypo1: i_x1_b1 + DPI_TOL >= i_xor_00 + i_xor_01,
        hypo2: i_y1_a1 + DPI_TOL >= i_xor_10 + i_xor_11,
        quantum_second_round: e1b * e1b + e2b * e2b <= 1.0 + DPI_TOL,
    })
}

/// The information conditions required for every first round on `grid`.
pub fn dpi_conditions_for_all_first_rounds(e1b: f64, e2b: f64, grid: &[f64]) -> Result<bool> {
    for &e1a in grid {
        for &e2a in grid {
            if !two_round_dpi_check(e1a, e2a, e1b, e2b)?.information_conditions() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpiGridSummary {
    pub points: usize,
    /// Grid points where the pointwise information conditions and the
    /// second-round quantum flag differ.
    pub pointwise_disagreements: usize,
    /// Second-round points where "conditions hold for every first round"
    /// and the quantum flag differ.
    pub uniform_disagreements: usize,
}

/// `0, step, 2·step, …, 1`.
pub fn unit_grid(step: f64) -> Vec<f64> {
    let count = (1.0 / step).round() as usize;
    (0..=count).map(|i| i as f64 / count as f64).collect()
}

pub fn dpi_grid_agreement(step: f64) -> Result<DpiGridSummary> {
    let grid = unit_grid(step);
    let mut points = 0;
    let mut pointwise_disagreements = 0;
    let mut uniform_disagreements = 0;
    for &e1b in &grid {
        for &e2b in &grid {
            let mut all_hold = true;
            let mut quantum = false;
            for &e1a in &grid {
                for &e2a in &grid {
                    let r = two_round_dpi_check(e1a, e2a, e1b, e2b)?;
                    points += 1;
                    quantum = r.quantum_second_round;
                    if r.information_conditions() != r.quantum_second_round {
                        pointwise_disagreements += 1;
                    }
                    all_hold &= r.information_conditions();
                }
            }
            if all_hold != quantum {
                uniform_disagreements += 1;
            }
        }
    }
    Ok(DpiGridSummary { points, pointwise_disagreements, uniform_disagreements })
}

/// Plays `rounds` instances of the n-run game: each run picks the guessing
/// direction uniformly, its box errs with probability `(1−E)/2`, and the
/// round is won when the number of errors is even.
pub fn simulate_game(params: &CausalRacParams, rounds: u64, seed: u64) -> MonteCarloResult {
    let mut rng = stream_rng(seed, 0);
    let mut successes = 0;
    for _ in 0..rounds {
        let mut parity = 0u8;
        for _ in 0..params.n {
            let e = if rng.gen::<bool>() { params.e2 } else { params.e1 };
            parity ^= u8::from(rng.gen::<f64>() < 0.5 * (1.0 - e));
        }
        successes += u64::from(parity == 0);
    }
    MonteCarloResult { trials: rounds, successes }
}

/// Same game with exactly `k` of the `n` runs in the second direction.
pub fn simulate_term(n: u32, k: u32, e1: f64, e2: f64, rounds: u64, seed: u64) -> Result<MonteCarloResult> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let mut rng = stream_rng(seed, 1);
    let mut successes = 0;
    for _ in 0..rounds {
        let mut parity = 0u8;
        for run in 0..n {
            let e = if run < k { e2 } else { e1 };
            parity ^= u8::from(rng.gen::<f64>() < 0.5 * (1.0 - e));
        }
        successes += u64::from(parity == 0);
    }
    Ok(MonteCarloResult { trials: rounds, successes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub n: u32,
    pub k: u32,
    pub e1: f64,
    pub e2: f64,
    pub p_term: f64,
    pub p_n: f64,
    pub i_n: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn table_rows(params: &CausalRacParams) -> Vec<TableRow> {
    let p_n = game_value(params);
    let i_n = efficiency_i(params);
    let (lower, upper) = efficiency_bounds(params);
    (0..=params.n)
        .map(|k| TableRow {
            n: params.n,
            k,
            e1: params.e1,
            e2: params.e2,
            p_term: term_probability(params.n, k, params.e1, params.e2).expect("k ≤ n"),
            p_n,
            i_n,
            lower,
            upper,
        })
        .collect()
}
