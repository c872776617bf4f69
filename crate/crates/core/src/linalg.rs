//! Dense complex operators on finite tensor-product spaces.
//!
//! Subsystems are ordered row-major: the leftmost factor carries the
//! slowest-varying index. Subsystem indices are zero-based everywhere.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Identity-level tolerance (Hermiticity, normalization of exact constructions).
pub const STRICT_TOL: f64 = 1e-12;
/// Tolerance for results of composite algebra (products, eigendecompositions).
pub const ALGEBRAIC_TOL: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let z = cr(0.0);
        let o = cr(1.0);
        match self {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }
}

/// A dense square operator together with the local dimensions of its factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let prod: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || prod != mat.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not factor side {}",
                dims,
                mat.nrows()
            )));
        }
        Ok(Operator { mat, dims })
    }

    /// Single-factor operator.
    pub fn single(mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Operator::new(mat, vec![n])
    }

    pub fn from_real_rows(side: usize, rows: &[f64]) -> Result<Self> {
        let data: Vec<Complex64> = rows.iter().map(|&x| cr(x)).collect();
        Operator::single(CMatrix::from_row_slice(side, side, &data))
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        Operator {
            mat: CMatrix::identity(n, n),
            dims: dims.to_vec(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        Operator {
            mat: CMatrix::zeros(n, n),
            dims: dims.to_vec(),
        }
    }

    pub fn pauli(p: Pauli) -> Self {
        Operator {
            mat: p.matrix(),
            dims: vec![2],
        }
    }

    /// Tensor product of single-qubit Paulis, leftmost factor first.
    pub fn pauli_string(ps: &[Pauli]) -> Self {
        ps.iter()
            .map(|&p| Operator::pauli(p))
            .reduce(|a, b| a.kron(&b))
            .unwrap_or_else(|| Operator::identity(&[1]))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Operator::new(self.mat, dims)
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            mat: self.mat.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Full transpose in the computational basis.
    pub fn transpose(&self) -> Self {
        Operator {
            mat: self.mat.transpose(),
            dims: self.dims.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Operator {
            mat: &self.mat * cr(s),
            dims: self.dims.clone(),
        }
    }

    pub fn scaled_c(&self, s: Complex64) -> Self {
        Operator {
            mat: &self.mat * s,
            dims: self.dims.clone(),
        }
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        kron(self, other)
    }

    /// Matrix product; both factors must share the same dims record.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dims(other)?;
        Ok(Operator {
            mat: &self.mat * &other.mat,
            dims: self.dims.clone(),
        })
    }

    fn check_same_dims(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let diff = &self.mat - self.mat.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn hermitian_part(&self) -> Operator {
        Operator {
            mat: (&self.mat + self.mat.adjoint()) * cr(0.5),
            dims: self.dims.clone(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Operator) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Hilbert-Schmidt inner product tr(A† B).
    pub fn hs_inner(&self, other: &Operator) -> Complex64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Complex64 {
        let n = self.side();
        let mut acc = cr(0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * other.mat[(k, i)];
            }
        }
        acc
    }

    /// Eigen-decomposition of a Hermitian operator; eigenvalues ascending,
    /// eigenvectors in the matching columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        let dev = self.hermitian_deviation();
        if dev > ALGEBRAIC_TOL * self.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        let sym = (&self.mat + self.mat.adjoint()) * cr(0.5);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.mat * v
    }

    /// Maximal entrywise deviation from another operator.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator dims={:?}", self.dims)?;
        for i in 0..self.side() {
            for j in 0..self.side() {
                let z = self.mat[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "adding operators with different dims");
        Operator {
            mat: &self.mat + &rhs.mat,
            dims: self.dims.clone(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "subtracting operators with different dims");
        Operator {
            mat: &self.mat - &rhs.mat,
            dims: self.dims.clone(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "multiplying operators with different dims");
        Operator {
            mat: &self.mat * &rhs.mat,
            dims: self.dims.clone(),
        }
    }
}

/// Tensor product; dims are concatenated.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let mat = a.mat.kronecker(&b.mat);
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator { mat, dims }
}

pub fn kron_all(ops: &[Operator]) -> Operator {
    let mut it = ops.iter();
    let first = it.next().expect("kron_all of empty list").clone();
    it.fold(first, |acc, op| kron(&acc, op))
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn compose_index(digs: &[usize], dims: &[usize], subset: &[usize]) -> usize {
    subset.iter().fold(0, |acc, &k| acc * dims[k] + digs[k])
}

fn check_subsystems(indices: &[usize], count: usize) -> Result<()> {
    for &i in indices {
        if i >= count {
            return Err(Error::SubsystemOutOfRange { index: i, count });
        }
    }
    Ok(())
}

/// Trace out every subsystem not listed in `keep`. The result keeps the
/// surviving factors in their original order. An empty `keep` yields the
/// 1x1 scalar trace.
pub fn partial_trace(a: &Operator, keep: &[usize]) -> Result<Operator> {
    let n_sub = a.dims.len();
    check_subsystems(keep, n_sub)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n_sub).filter(|k| !kept.contains(k)).collect();
    let out_dims: Vec<usize> = if kept.is_empty() {
        vec![1]
    } else {
        kept.iter().map(|&k| a.dims[k]).collect()
    };
    let out_side: usize = out_dims.iter().product();
    let mut out = CMatrix::zeros(out_side, out_side);
    let side = a.side();
    let all_digits: Vec<Vec<usize>> = (0..side).map(|i| digits(i, &a.dims)).collect();
    let kept_index: Vec<usize> = all_digits
        .iter()
        .map(|d| compose_index(d, &a.dims, &kept))
        .collect();
    let traced_index: Vec<usize> = all_digits
        .iter()
        .map(|d| compose_index(d, &a.dims, &traced))
        .collect();
    for r in 0..side {
        for col in 0..side {
            if traced_index[r] == traced_index[col] {
                out[(kept_index[r], kept_index[col])] += a.mat[(r, col)];
            }
        }
    }
    Operator::new(out, out_dims)
}

/// Replace the listed factors by the normalized identity:
/// `X ↦ tr_S(X) ⊗ 1_S / d_S`, with the factor order preserved.
pub fn reduce(a: &Operator, subsystems: &[usize]) -> Result<Operator> {
    let n_sub = a.dims.len();
    check_subsystems(subsystems, n_sub)?;
    if subsystems.is_empty() {
        return Ok(a.clone());
    }
    let mut traced: Vec<usize> = subsystems.to_vec();
    traced.sort_unstable();
    traced.dedup();
    let rest: Vec<usize> = (0..n_sub).filter(|k| !traced.contains(k)).collect();
    let d_traced: usize = traced.iter().map(|&k| a.dims[k]).product();
    let side = a.side();
    let all_digits: Vec<Vec<usize>> = (0..side).map(|i| digits(i, &a.dims)).collect();
    let rest_index: Vec<usize> = all_digits
        .iter()
        .map(|d| compose_index(d, &a.dims, &rest))
        .collect();
    let traced_index: Vec<usize> = all_digits
        .iter()
        .map(|d| compose_index(d, &a.dims, &traced))
        .collect();
    let d_rest: usize = rest.iter().map(|&k| a.dims[k]).product();
    let mut small = CMatrix::zeros(d_rest, d_rest);
    for r in 0..side {
        for col in 0..side {
            if traced_index[r] == traced_index[col] {
                small[(rest_index[r], rest_index[col])] += a.mat[(r, col)];
            }
        }
    }
    let norm = cr(1.0 / d_traced as f64);
    let mut out = CMatrix::zeros(side, side);
    for r in 0..side {
        for col in 0..side {
            if traced_index[r] == traced_index[col] {
                out[(r, col)] = small[(rest_index[r], rest_index[col])] * norm;
            }
        }
    }
    Operator::new(out, a.dims.clone())
}

/// Nearest positive-semidefinite operator in Frobenius norm (eigenvalue clipping).
pub fn project_psd(a: &Operator) -> Result<Operator> {
    let (vals, vecs) = a.eigh()?;
    let n = a.side();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        if lam > 0.0 {
            let v = vecs.column(k);
            out += (v * v.adjoint()) * cr(lam);
        }
    }
    Operator::new(out, a.dims.clone())
}

/// Hermitian operator basis `{σ_μ}` of a `d`-level system with `σ_0 = 1`,
/// `tr σ_μ σ_ν = d δ_μν` and traceless `σ_μ` for `μ ≥ 1`. For `d = 2` this
/// is `(1, σx, σy, σz)`.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let scale = cr((d as f64 / 2.0).sqrt());
    let mut basis = vec![CMatrix::identity(d, d)];
    let mut sym = Vec::new();
    let mut anti = Vec::new();
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = cr(1.0);
            s[(k, j)] = cr(1.0);
            sym.push(s * scale);
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, -1.0);
            a[(k, j)] = c(0.0, 1.0);
            anti.push(a * scale);
        }
    }
    // Interleave so d = 2 reproduces the Pauli order X, Y, Z.
    for (s, a) in sym.into_iter().zip(anti) {
        basis.push(s);
        basis.push(a);
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = cr(norm);
        }
        m[(l, l)] = cr(-(l as f64) * norm);
        basis.push(m * scale);
    }
    basis
}

/// Coefficients of an operator on `n` qubits in the Pauli-string basis,
/// `A = Σ w_s σ_s`, indexed base-4 with the leftmost qubit slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliExpansion {
    n_qubits: usize,
    coeffs: Vec<Complex64>,
}

impl PauliExpansion {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn index_of(ps: &[Pauli]) -> usize {
        ps.iter().fold(0, |acc, p| acc * 4 + p.index())
    }

    fn string_of(&self, mut idx: usize) -> Vec<Pauli> {
        let mut out = vec![Pauli::I; self.n_qubits];
        for k in (0..self.n_qubits).rev() {
            out[k] = Pauli::from_index(idx % 4);
            idx /= 4;
        }
        out
    }

    pub fn coefficient(&self, ps: &[Pauli]) -> Complex64 {
        assert_eq!(ps.len(), self.n_qubits);
        self.coeffs[Self::index_of(ps)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<Pauli>, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.string_of(i), w))
    }

    /// Terms whose coefficient modulus exceeds `tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(Vec<Pauli>, Complex64)> {
        self.iter().filter(|(_, w)| w.norm() > tol).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|w| w.im.abs()).fold(0.0, f64::max)
    }

    pub fn reconstruct(&self) -> Operator {
        let dims = vec![2; self.n_qubits];
        let mut acc = Operator::zeros(&dims);
        for (ps, w) in self.iter() {
            if w != cr(0.0) {
                acc = &acc + &Operator::pauli_string(&ps).scaled_c(w);
            }
        }
        acc
    }
}

pub fn pauli_label(ps: &[Pauli]) -> String {
    ps.iter().map(|p| p.label()).collect()
}

/// Expand an operator on qubits in the Pauli-string basis.
pub fn hs_expand(a: &Operator) -> Result<PauliExpansion> {
    if a.dims.iter().any(|&d| d != 2) {
        return Err(Error::NonQubitDims(a.dims.clone()));
    }
    let n = a.dims.len();
    let d = a.side() as f64;
    let count = 4usize.pow(n as u32);
    let mut coeffs = Vec::with_capacity(count);
    let mut exp = PauliExpansion {
        n_qubits: n,
        coeffs: Vec::new(),
    };
    for idx in 0..count {
        let ps = exp.string_of(idx);
        let sigma = Operator::pauli_string(&ps);
        coeffs.push(sigma.trace_product(a) / d);
    }
    exp.coeffs = coeffs;
    Ok(exp)
}

/// Normalized pure state on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if prod != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} for {} amplitudes",
                dims,
                amps.len()
            )));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > STRICT_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2}")));
        }
        Ok(PureState { amps, dims })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        PureState::new(amps * cr(1.0 / norm), dims)
    }

    pub fn basis(index: usize, dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        let mut v = CVector::zeros(n);
        v[index] = cr(1.0);
        PureState {
            amps: v,
            dims: dims.to_vec(),
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> Operator {
        Operator {
            mat: &self.amps * self.amps.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            amps: self.amps.kronecker(&other.amps),
            dims,
        }
    }

    /// ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, a: &Operator) -> Result<Complex64> {
        if a.side() != self.amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator side {} vs state length {}",
                a.side(),
                self.amps.len()
            )));
        }
        Ok(self.amps.dotc(&(&a.mat * &self.amps)))
    }
}
