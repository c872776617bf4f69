//! Pyramid random-access-code protocol over noisy PR boxes.
//!
//! Bob's target index uses little-endian bits: `b = b₀ + 2b₁ + …`, and
//! level `l` of the pyramid is queried with `b_l`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::bsc_capacity;
use crate::rng::{mix, stream_rng};

/// A PR box that reproduces `A ⊕ B = x·y` with probability `(1+E)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyPrBox {
    e: f64,
}

impl NoisyPrBox {
    pub fn new(e: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::InvalidParameter(format!("bias {e} outside [-1,1]")));
        }
        Ok(NoisyPrBox { e })
    }

    pub fn bias(&self) -> f64 {
        self.e
    }

    /// One use of the box: Alice's output is uniform, Bob's is correlated.
    pub fn sample(&self, x: u8, y: u8, rng: &mut impl Rng) -> (u8, u8) {
        let a: u8 = rng.gen_range(0..2);
        let err = u8::from(rng.gen::<f64>() < 0.5 * (1.0 - self.e));
        (a, a ^ (x & y) ^ err)
    }
}

/// Runs one round of the pyramid protocol and returns Bob's guess for
/// `alice_bits[b]`. Every cell of the pyramid holds a fresh box whose
/// randomness comes from its own stream of `seed`.
pub fn pyramid_rac(alice_bits: &[u8], b: usize, e: f64, seed: u64) -> Result<u8> {
    let n_bits = alice_bits.len();
    if n_bits < 2 || !n_bits.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "bit string length {n_bits} is not a power of two ≥ 2"
        )));
    }
    if b >= n_bits {
        return Err(Error::InvalidParameter(format!("index {b} out of range for {n_bits} bits")));
    }
    if alice_bits.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
    }
    let pr = NoisyPrBox::new(e)?;
    let mut layer: Vec<u8> = alice_bits.to_vec();
    let mut target = b;
    let mut bob_parity = 0u8;
    let mut cell = 0u64;
    while layer.len() > 1 {
        let bob_bit = (target & 1) as u8;
        let bob_cell = target >> 1;
        let mut next = Vec::with_capacity(layer.len() / 2);
        for (i, pair) in layer.chunks_exact(2).enumerate() {
            let mut rng = stream_rng(seed, cell);
            cell += 1;
            let (a_out, b_out) = pr.sample(pair[0] ^ pair[1], bob_bit, &mut rng);
            next.push(pair[0] ^ a_out);
            if i == bob_cell {
                bob_parity ^= b_out;
            }
        }
        layer = next;
        target = bob_cell;
    }
    // Alice's single classical bit.
    Ok(layer[0] ^ bob_parity)
}

/// Number of boxes consumed by one round on `2ⁿ` bits.
pub fn pyramid_box_count(n: u32) -> usize {
    (1usize << n) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub successes: u64,
}

impl MonteCarloResult {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard deviation of the rate at success probability `p`.
    pub fn sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Plays `trials` rounds with uniform bits and uniform target index.
pub fn pyramid_monte_carlo(n: u32, e: f64, trials: u64, seed: u64) -> Result<MonteCarloResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let n_bits = 1usize << n;
    let mut inputs = stream_rng(seed, u64::MAX);
    let mut successes = 0;
    let mut bits = vec![0u8; n_bits];
    for t in 0..trials {
        for v in bits.iter_mut() {
            *v = inputs.gen_range(0..2);
        }
        let b = inputs.gen_range(0..n_bits);
        let g = pyramid_rac(&bits, b, e, mix(seed, t))?;
        successes += u64::from(g == bits[b]);
    }
    Ok(MonteCarloResult { trials, successes })
}

/// `½(1 + Eⁿ)`: Bob is right when an even number of boxes erred.
pub fn success_probability_exact(e: f64, n: u32) -> f64 {
    0.5 * (1.0 + e.powi(n as i32))
}

/// `2ⁿ (1 − h(½(1+Eⁿ)))` bits.
pub fn information_i(n: u32, e: f64) -> f64 {
    (1u64 << n) as f64 * bsc_capacity(e.powi(n as i32))
}

/// `(2E²)ⁿ / (2 ln 2)`.
pub fn ic_lower_bound(e: f64, n: u32) -> f64 {
    (2.0 * e * e).powi(n as i32) / (2.0 * std::f64::consts::LN_2)
}

/// Smallest `n ≤ n_max` with `information_i(n, E) > 1`.
pub fn ic_violation_scan(e: f64, n_max: u32) -> Option<u32> {
    (1..=n_max).find(|&n| information_i(n, e) > 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u32,
    pub e: f64,
    pub i_exact: f64,
    pub i_lower_bound: f64,
    pub p_k: f64,
}

pub fn scan_rows(e: f64, n_max: u32) -> Vec<ScanRow> {
    (1..=n_max)
        .map(|n| ScanRow {
            n,
            e,
            i_exact: information_i(n, e),
            i_lower_bound: ic_lower_bound(e, n),
            p_k: success_probability_exact(e, n),
        })
        .collect()
}
