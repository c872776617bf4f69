//! Coarse-grained Newton–Wigner versus local ladder operators in 1+1
//! dimensions (units with c = ħ = 1).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Absolute tolerance used for the momentum integrals.
pub const QUAD_TOL: f64 = 1e-10;
/// Gaussian tail cut: `exp(−(mεk)²)` is below `1e-14` outside the range.
const TAIL: f64 = 5.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoarseGrainConfig {
    pub epsilon: f64,
    pub m: f64,
    pub d: f64,
}

impl CoarseGrainConfig {
    pub fn new(epsilon: f64, m: f64, d: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("m", m), ("d", d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(CoarseGrainConfig { epsilon, m, d })
    }
}

/// `G_ε(x) = (2πε²)^{−1/4} exp(−x²/4ε²)`, normalized in `L²`.
pub fn gaussian_profile(x: f64, epsilon: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    (two_pi * epsilon * epsilon).powf(-0.25) * (-x * x / (4.0 * epsilon * epsilon)).exp()
}

/// Momentum-space profile `G_{1/(2mε)}(k)`.
fn momentum_profile(k: f64, epsilon: f64, m: f64) -> f64 {
    gaussian_profile(k, 1.0 / (2.0 * m * epsilon))
}

fn bracket(k: f64, sign: f64) -> f64 {
    let r = (1.0 + k * k).powf(0.25);
    r + sign / r
}

/// `(1+k²)^{1/4} + (1+k²)^{−1/4} − 2 = (r−1)²/r`, free of cancellation.
fn bracket_minus_two(k: f64) -> f64 {
    let rm1 = (0.25 * (k * k).ln_1p()).exp_m1();
    rm1 * rm1 / (1.0 + rm1)
}

fn check(epsilon: f64, m: f64) -> Result<()> {
    if !(epsilon > 0.0) || !(m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} and m = {m} must be positive"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmearedPair {
    pub f_plus: f64,
    pub f_minus: f64,
    /// Largest modulus of the imaginary parts.
    pub imag_residual: f64,
}

/// `f±(x) = (√m/2) ∫ dk/√(2π) e^{imkx} G_{1/(2mε)}(k) [(1+k²)^{1/4} ± (1+k²)^{−1/4}]`.
pub fn f_pm(x: f64, epsilon: f64, m: f64) -> Result<SmearedPair> {
    check(epsilon, m)?;
    let kmax = TAIL / (m * epsilon);
    let pre = 0.5 * m.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
    let part = |sign: f64, trig: fn(f64) -> f64| {
        integrate(
            |k| trig(m * k * x) * momentum_profile(k, epsilon, m) * bracket(k, sign),
            -kmax,
            kmax,
            QUAD_TOL,
        )
        .map(|(v, _)| pre * v)
    };
    let f_plus = part(1.0, f64::cos)?;
    let f_minus = part(-1.0, f64::cos)?;
    let im_plus = part(1.0, f64::sin)?;
    let im_minus = part(-1.0, f64::sin)?;
    Ok(SmearedPair {
        f_plus,
        f_minus,
        imag_residual: im_plus.abs().max(im_minus.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceMetrics {
    pub eps_m: f64,
    pub sup_f_minus: f64,
    pub sup_f_plus: f64,
    pub l2_dist_f_plus: f64,
}

impl ConvergenceMetrics {
    pub fn ratio(&self) -> f64 {
        self.sup_f_minus / self.sup_f_plus
    }
}

/// Convergence metrics at resolution `ε` and mass `m`.
///
/// Both momentum integrands are non-negative, so the suprema of `|f±|` sit
/// at `x = 0`. The `L²` distance between `f₊` and `G_ε` is evaluated in
/// momentum space, where it reads `¼∫dk G(k)² [(1+k²)^{1/4} + (1+k²)^{−1/4} − 2]²`.
pub fn convergence_metrics(epsilon: f64, m: f64) -> Result<ConvergenceMetrics> {
    let at_zero = f_pm(0.0, epsilon, m)?;
    let kmax = TAIL / (m * epsilon);
    // The integrand scales as (εm)⁻⁸; rescale so the tolerance is relative.
    let scale = (epsilon * m).powi(8).max(1.0);
    let (sq, _) = integrate(
        |k| {
            let g = momentum_profile(k, epsilon, m);
            let b = bracket_minus_two(k);
            0.25 * scale * g * g * b * b
        },
        -kmax,
        kmax,
        QUAD_TOL * 1e-4,
    )?;
    let sq = sq / scale;
    Ok(ConvergenceMetrics {
        eps_m: epsilon * m,
        sup_f_minus: at_zero.f_minus.abs(),
        sup_f_plus: at_zero.f_plus.abs(),
        l2_dist_f_plus: sq.max(0.0).sqrt(),
    })
}

/// `∫ G_ε(jd − z) G_ε(kd − z) dz = exp(−d²(j−k)²/8ε²)`.
pub fn cross_commutator_magnitude(config: &CoarseGrainConfig, j: i64, k: i64) -> f64 {
    let s = config.d * (j - k) as f64;
    (-s * s / (8.0 * config.epsilon * config.epsilon)).exp()
}

/// The same overlap integral by quadrature.
pub fn cross_commutator_quadrature(config: &CoarseGrainConfig, j: i64, k: i64) -> Result<f64> {
    let eps = config.epsilon;
    let (a, b) = (config.d * j as f64, config.d * k as f64);
    let lo = a.min(b) - 20.0 * eps;
    let hi = a.max(b) + 20.0 * eps;
    let mid = 0.5 * (a + b);
    let f = |z: f64| gaussian_profile(a - z, eps) * gaussian_profile(b - z, eps);
    // Split at both centres and the midpoint so narrow peaks are resolved.
    let mut cuts = vec![lo, a.min(b), mid, a.max(b), hi];
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1], 1e-14)?.0;
    }
    Ok(total)
}
