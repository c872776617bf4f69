//! Shannon quantities in bits for small discrete distributions.

/// Binary entropy in bits; `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Shannon entropy in bits of a probability vector (zero entries ignored).
pub fn shannon(ps: &[f64]) -> f64 {
    ps.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Mutual information in bits of a joint table `joint[i][j]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let ncols = joint.first().map_or(0, |r| r.len());
    let cols: Vec<f64> = (0..ncols).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let mut mi = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (rows[i] * cols[j])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// `1 − h((1+E)/2)`: the information carried by a binary symmetric channel of bias `E`.
pub fn bsc_capacity(e: f64) -> f64 {
    let x = e.abs();
    if x >= 1.0 {
        return 1.0;
    }
    let nats = if x < 0.1 {
        // Σ x^{2k} / (2k(2k−1)), summed until negligible.
        let x2 = x * x;
        let mut term = x2;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            sum += term / (2.0 * kf * (2.0 * kf - 1.0));
            term *= x2;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        0.5 * ((1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p())
    };
    nats / std::f64::consts::LN_2
}
