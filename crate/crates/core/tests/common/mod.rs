//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use causalkit::boxes::{deterministic_boxes, ConditionalBox};
use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

/// Squared Schmidt coefficients of the two-oscillator ground state
/// `ψ₀ ∝ exp(−½ xᵀ K^{1/2} x)`, obtained by projecting onto Hermite
/// functions of frequency `√(ω₊ω₋)` truncated at `cutoff` levels.
pub fn fock_schmidt_weights(k0: f64, k1: f64, cutoff: usize) -> Vec<f64> {
    let k = DMatrix::from_row_slice(2, 2, &[k0 + k1, -k1, -k1, k0 + k1]);
    let eig = SymmetricEigen::new(k);
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    let omega = (k0 * (k0 + 2.0 * k1)).sqrt().sqrt();

    let half_width = 14.0 / k0.sqrt().sqrt().min(omega.sqrt());
    let points = 701;
    let h = 2.0 * half_width / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| -half_width + i as f64 * h).collect();

    // Hermite functions by the stable three-term recurrence.
    let mut phi = DMatrix::<f64>::zeros(points, cutoff);
    for (i, &x) in xs.iter().enumerate() {
        let s = omega.sqrt() * x;
        let mut prev = 0.0;
        let mut cur = (omega / std::f64::consts::PI).powf(0.25) * (-0.5 * s * s).exp();
        for n in 0..cutoff {
            phi[(i, n)] = cur;
            let next = (2.0 / (n + 1) as f64).sqrt() * s * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    let psi = DMatrix::from_fn(points, points, |i, j| {
        let (x1, x2) = (xs[i], xs[j]);
        let q = root[(0, 0)] * x1 * x1 + 2.0 * root[(0, 1)] * x1 * x2 + root[(1, 1)] * x2 * x2;
        (-0.5 * q).exp()
    });
    let norm2: f64 = psi.iter().map(|v| v * v).sum::<f64>() * h * h;
    let coeffs = phi.transpose() * &psi * &phi * (h * h / norm2.sqrt());
    let mut sv: Vec<f64> = coeffs.singular_values().iter().map(|s| s * s).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

type C2 = Matrix2<Complex64>;

fn pauli_vec(v: [f64; 3]) -> C2 {
    let c = Complex64::new;
    C2::new(
        c(v[2], 0.0),
        c(v[0], -v[1]),
        c(v[0], v[1]),
        c(-v[2], 0.0),
    )
}

/// `√(q⁰ + q·σ)`: the positive SL(2,C) boost taking the rest frame to `q`.
fn spinor_boost(q: [f64; 3]) -> C2 {
    let q0 = (1.0 + q.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let x = C2::identity().scale(q0) + pauli_vec(q);
    (x + C2::identity()).unscale((2.0 * q0 + 2.0).sqrt())
}

/// Wigner rotation angle from spinor boosts: particle rapidity `ξ` along x̂,
/// observer rapidity `χ` along ẑ. Returns the rotation angle magnitude.
pub fn wigner_angle_spinor(xi: f64, chi: f64) -> f64 {
    let lp = spinor_boost([xi.sinh(), 0.0, 0.0]);
    let a = spinor_boost([0.0, 0.0, -chi.sinh()]);
    // Momentum after the observer boost: A X A† with X = p⁰ + p·σ.
    let x = C2::identity().scale(xi.cosh()) + pauli_vec([xi.sinh(), 0.0, 0.0]);
    let y = a * x * a.adjoint();
    let q = [
        0.5 * (y[(0, 1)] + y[(1, 0)]).re,
        0.5 * (y[(1, 0)] - y[(0, 1)]).im,
        0.5 * (y[(0, 0)] - y[(1, 1)]).re,
    ];
    let r = spinor_boost(q).try_inverse().expect("boost") * a * lp;
    let half_cos = (0.5 * r.trace()).re.abs();
    let half_sin = (r - r.adjoint()).norm() / (2.0 * 2f64.sqrt());
    2.0 * half_sin.atan2(half_cos)
}

/// CHSH functional evaluated directly from the table.
pub fn chsh_bruteforce(bx: &ConditionalBox) -> f64 {
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let mut corr = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let sign = if a == b { 1.0 } else { -1.0 };
                    corr += sign * bx.get(a, b, x, y);
                }
            }
            total += if x == 1 && y == 1 { -corr } else { corr };
        }
    }
    total
}

/// Random non-signalling box: random mixture of the 16 deterministic boxes
/// and the 8 PR variants, with sparse weights so both regions are sampled.
pub fn random_ns_box(rng: &mut impl Rng) -> ConditionalBox {
    let mut vertices = deterministic_boxes();
    for fx in 0..2 {
        for fy in 0..2 {
            for neg in [false, true] {
                vertices.push(ConditionalBox::pr_variant((fx, fy), neg));
            }
        }
    }
    let weights: Vec<f64> = vertices
        .iter()
        .map(|_| {
            let u: f64 = rng.gen();
            if rng.gen_bool(0.3) { -u.ln() } else { 0.0 }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return ConditionalBox::uniform();
    }
    ConditionalBox::from_fn(|a, b, x, y| {
        vertices
            .iter()
            .zip(&weights)
            .map(|(v, w)| w / total * v.get(a, b, x, y))
            .sum()
    })
    .expect("convex mixture of valid boxes")
}

/// `Σ_k C(n,k) 2⁻ⁿ ½(1 + E1^{n−k} E2^k)` by direct summation in log space.
pub fn rac_binomial_sum(n: u32, e1: f64, e2: f64) -> f64 {
    let mut total = 0.0;
    let mut log_binom = 0.0f64;
    for k in 0..=n {
        if k > 0 {
            log_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let weight = (log_binom - n as f64 * std::f64::consts::LN_2).exp();
        total += weight * 0.5 * (1.0 + e1.powi((n - k) as i32) * e2.powi(k as i32));
    }
    total
}
