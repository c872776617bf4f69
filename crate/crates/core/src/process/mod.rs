//! Bipartite process matrices on `A₁ ⊗ A₂ ⊗ B₁ ⊗ B₂`.
//!
//! Subsystem indices: `A₁ = 0`, `A₂ = 1`, `B₁ = 2`, `B₂ = 3`.

pub mod cj;
pub mod ctc;
pub mod ocb;
pub mod separability;
pub mod switch;
pub mod validity;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, kron, CMatrix, Operator};

pub use cj::{cj_measure_prepare, CjOperator, Instrument};
pub use validity::{validate_process, ValidityReport};

pub const A1: usize = 0;
pub const A2: usize = 1;
pub const B1: usize = 2;
pub const B2: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDims {
    #[serde(rename = "dA1")]
    pub d_a1: usize,
    #[serde(rename = "dA2")]
    pub d_a2: usize,
    #[serde(rename = "dB1")]
    pub d_b1: usize,
    #[serde(rename = "dB2")]
    pub d_b2: usize,
}

impl SystemDims {
    pub fn new(d_a1: usize, d_a2: usize, d_b1: usize, d_b2: usize) -> Result<Self> {
        if [d_a1, d_a2, d_b1, d_b2].contains(&0) {
            return Err(Error::InvalidParameter("all local dimensions must be ≥ 1".into()));
        }
        Ok(SystemDims { d_a1, d_a2, d_b1, d_b2 })
    }

    pub fn qubits() -> Self {
        SystemDims { d_a1: 2, d_a2: 2, d_b1: 2, d_b2: 2 }
    }

    pub fn as_vec(&self) -> Vec<usize> {
        vec![self.d_a1, self.d_a2, self.d_b1, self.d_b2]
    }

    pub fn side(&self) -> usize {
        self.d_a1 * self.d_a2 * self.d_b1 * self.d_b2
    }

    pub fn all_qubits(&self) -> bool {
        *self == SystemDims::qubits()
    }
}

/// A validated process matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    w: Operator,
    dims: SystemDims,
}

impl ProcessMatrix {
    /// Accepts `w` only if every check of [`validate_process`] passes.
    pub fn new(w: Operator, dims: SystemDims) -> Result<Self> {
        let w = w.with_dims(dims.as_vec())?;
        let report = validate_process(&w, dims)?;
        if !report.valid {
            return Err(Error::InvalidProcess(report.summary()));
        }
        Ok(ProcessMatrix { w, dims })
    }

    pub fn operator(&self) -> &Operator {
        &self.w
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    /// Convex combination `λ self + (1−λ) other`.
    pub fn mix(&self, other: &ProcessMatrix, lambda: f64) -> Result<ProcessMatrix> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("mixing processes with different dims".into()));
        }
        ProcessMatrix::new(
            &self.w.scaled(lambda) + &other.w.scaled(1.0 - lambda),
            self.dims,
        )
    }
}

/// `W = 1/(dA1·dB1)`, the process with no correlations.
pub fn maximally_mixed_process(dims: SystemDims) -> ProcessMatrix {
    let w = Operator::identity(&dims.as_vec()).scaled(1.0 / (dims.d_a1 * dims.d_b1) as f64);
    ProcessMatrix::new(w, dims).expect("maximally mixed process is valid")
}

/// `W = ρ^{A₁} ⊗ C^{A₂B₁} ⊗ 1^{B₂}` with `C` the Choi matrix of a channel
/// from `A₂` to `B₁`; here `B` cannot signal to `A`. `d_b2` sets the
/// dimension of Bob's output.
pub fn ordered_process(rho: &Operator, channel: &Operator, d_b2: usize) -> Result<ProcessMatrix> {
    cj::validate_density(rho)?;
    if channel.dims().len() != 2 {
        return Err(Error::InvalidChannel(format!(
            "channel Choi matrix needs dims [in, out], got {:?}",
            channel.dims()
        )));
    }
    let choi = cj::CjOperator::new(channel.clone())
        .map_err(|e| Error::InvalidChannel(e.to_string()))?;
    if !choi.is_trace_preserving(crate::linalg::ALGEBRAIC_TOL) {
        return Err(Error::InvalidChannel("channel is not trace preserving".into()));
    }
    let rho1 = Operator::single(rho.matrix().clone())?;
    let w = kron(&kron(&rho1, channel), &Operator::identity(&[d_b2]));
    let dims = SystemDims::new(rho.side(), channel.dims()[0], channel.dims()[1], d_b2)?;
    ProcessMatrix::new(w, dims)
}

/// The mirrored ordering: `W = C^{B₂A₁} ⊗ 1^{A₂} ⊗ ρ^{B₁}` with `C` the Choi
/// matrix of a channel from `B₂` to `A₁`; here `A` cannot signal to `B`.
pub fn ordered_process_b_first(rho: &Operator, channel: &Operator, d_a2: usize) -> Result<ProcessMatrix> {
    let forward = ordered_process(rho, channel, d_a2)?;
    // Forward operator lives on (B₁, B₂, A₁, A₂) in the roles of (A₁, A₂, B₁, B₂);
    // relabel factors into the standard order.
    let perm = [2, 3, 0, 1];
    let w = permute(forward.operator(), &perm)?;
    let d = forward.dims();
    ProcessMatrix::new(w, SystemDims::new(d.d_b1, d.d_b2, d.d_a1, d.d_a2)?)
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `a`.
pub fn permute(a: &Operator, perm: &[usize]) -> Result<Operator> {
    let dims = a.dims().to_vec();
    if perm.len() != dims.len() {
        return Err(Error::DimensionMismatch("permutation length".into()));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let side = a.side();
    let map_index = |mut idx: usize| -> usize {
        // digits in the new order, leftmost slowest
        let mut digits = vec![0; dims.len()];
        for k in (0..new_dims.len()).rev() {
            digits[perm[k]] = idx % new_dims[k];
            idx /= new_dims[k];
        }
        digits.iter().zip(&dims).fold(0, |acc, (&d, &n)| acc * n + d)
    };
    let old: Vec<usize> = (0..side).map(map_index).collect();
    let m = CMatrix::from_fn(side, side, |i, j| a.matrix()[(old[i], old[j])]);
    Operator::new(m, new_dims)
}

/// `tr[W (M_A ⊗ M_B)]`.
pub fn born(w: &ProcessMatrix, ma: &CjOperator, mb: &CjOperator) -> Result<f64> {
    born_operator(w.operator(), ma, mb)
}

pub(crate) fn born_operator(w: &Operator, ma: &CjOperator, mb: &CjOperator) -> Result<f64> {
    let d = w.dims();
    if d.len() != 4
        || ma.operator().dims() != &d[0..2]
        || mb.operator().dims() != &d[2..4]
    {
        return Err(Error::DimensionMismatch(format!(
            "W dims {:?} vs operations {:?} and {:?}",
            d,
            ma.operator().dims(),
            mb.operator().dims()
        )));
    }
    let m = kron(ma.operator(), mb.operator());
    Ok(w.trace_product(&m).re)
}

#[derive(Serialize, Deserialize)]
struct ProcessJson {
    dims: SystemDims,
    entries: Vec<Vec<[f64; 2]>>,
}

pub fn operator_entries(op: &Operator) -> Vec<Vec<[f64; 2]>> {
    (0..op.side())
        .map(|i| (0..op.side()).map(|j| {
            let z = op.matrix()[(i, j)];
            [z.re, z.im]
        }).collect())
        .collect()
}

/// Parses the JSON layout without validating the process.
pub fn operator_from_json(text: &str) -> Result<(Operator, SystemDims)> {
    let raw: ProcessJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidProcess(format!("malformed JSON: {e}")))?;
    raw_to_operator(raw)
}

fn raw_to_operator(raw: ProcessJson) -> Result<(Operator, SystemDims)> {
    let dims = SystemDims::new(raw.dims.d_a1, raw.dims.d_a2, raw.dims.d_b1, raw.dims.d_b2)?;
    let n = dims.side();
    if raw.entries.len() != n || raw.entries.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("entries are not {n}x{n}")));
    }
    let m = CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = raw.entries[i][j];
        c(re, im)
    });
    Ok((Operator::new(m, dims.as_vec())?, dims))
}

impl Serialize for ProcessMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProcessJson { dims: self.dims, entries: operator_entries(&self.w) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProcessMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ProcessJson::deserialize(d)?;
        let (op, dims) = raw_to_operator(raw).map_err(D::Error::custom)?;
        ProcessMatrix::new(op, dims).map_err(D::Error::custom)
    }
}
