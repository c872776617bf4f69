//! Choi–Jamiołkowski images of completely positive maps.
//!
//! Two matrices are attached to a map `Φ: L(in) → L(out)`:
//!
//! * the Choi matrix `C = Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, used for channels wired
//!   into a process matrix;
//! * the CJ operator `M = Cᵀ` (full transpose), used for local operations
//!   inside the generalized Born rule `tr[W (M_A ⊗ M_B)]`.
//!
//! With these conventions `tr[(ρ ⊗ C ⊗ 1)(M_A ⊗ M_B)]` reproduces ordinary
//! sequential quantum mechanics.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, partial_trace, CMatrix, Operator, ALGEBRAIC_TOL};

/// A linear map on matrices, given by its action.
pub type MatrixMap<'a> = dyn Fn(&CMatrix) -> CMatrix + 'a;

fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

/// `C = Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` on `in ⊗ out`.
pub fn choi_matrix(map: &MatrixMap<'_>, d_in: usize, d_out: usize) -> Operator {
    let mut out = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let img = map(&unit(d_in, i, j));
            for r in 0..d_out {
                for s in 0..d_out {
                    out[(i * d_out + r, j * d_out + s)] = img[(r, s)];
                }
            }
        }
    }
    Operator::new(out, vec![d_in, d_out]).expect("dims factor the side")
}

/// Choi matrix of `X ↦ Σ K X K†`.
pub fn choi_from_kraus(kraus: &[CMatrix]) -> Result<Operator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
    let (d_out, d_in) = (first.nrows(), first.ncols());
    if kraus.iter().any(|k| k.nrows() != d_out || k.ncols() != d_in) {
        return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
    }
    let map = |x: &CMatrix| -> CMatrix {
        kraus
            .iter()
            .fold(CMatrix::zeros(d_out, d_out), |acc, k| acc + k * x * k.adjoint())
    };
    Ok(choi_matrix(&map, d_in, d_out))
}

/// Choi matrix of the identity channel on `d` levels: `|φ⁺⟩⟨φ⁺|` unnormalized.
pub fn identity_channel_choi(d: usize) -> Operator {
    choi_matrix(&|x: &CMatrix| x.clone(), d, d)
}

/// A positive semidefinite CJ operator on `in ⊗ out`.
#[derive(Debug, Clone, PartialEq)]
pub struct CjOperator {
    op: Operator,
}

impl CjOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if op.dims().len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "CJ operator needs dims [in, out], got {:?}",
                op.dims()
            )));
        }
        if !op.is_hermitian(ALGEBRAIC_TOL) {
            return Err(Error::NotHermitian(op.hermitian_deviation()));
        }
        let min = op.min_eigenvalue()?;
        if min < -ALGEBRAIC_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(CjOperator { op })
    }

    /// CJ operator `Cᵀ` of the map `Φ`.
    pub fn from_map(map: &MatrixMap<'_>, d_in: usize, d_out: usize) -> Result<Self> {
        CjOperator::new(choi_matrix(map, d_in, d_out).transpose())
    }

    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        CjOperator::new(choi_from_kraus(kraus)?.transpose())
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn d_in(&self) -> usize {
        self.op.dims()[0]
    }

    pub fn d_out(&self) -> usize {
        self.op.dims()[1]
    }

    /// `tr_out M`, which equals `1_in` for trace-preserving maps.
    pub fn output_trace(&self) -> Operator {
        partial_trace(&self.op, &[0]).expect("two factors")
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.output_trace()
            .max_abs_diff(&Operator::identity(&[self.d_in()]))
            <= tol
    }
}

fn check_density(rho: &Operator) -> Result<()> {
    if !rho.is_hermitian(ALGEBRAIC_TOL) {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {:.3e})",
            rho.hermitian_deviation()
        )));
    }
    let min = rho.min_eigenvalue()?;
    if min < -ALGEBRAIC_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    let tr = rho.trace();
    if (tr - cr(1.0)).norm() > ALGEBRAIC_TOL {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    Ok(())
}

pub fn validate_density(rho: &Operator) -> Result<()> {
    check_density(rho)
}

/// CJ operator of "measure with `P`, then prepare `ρ`": `P ⊗ ρᵀ`.
pub fn cj_measure_prepare(p: &Operator, rho: &Operator) -> Result<CjOperator> {
    if !p.is_hermitian(ALGEBRAIC_TOL) {
        return Err(Error::InvalidInstrument("POVM element is not Hermitian".into()));
    }
    let (vals, _) = p.eigh()?;
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    if lo < -ALGEBRAIC_TOL || hi > 1.0 + ALGEBRAIC_TOL {
        return Err(Error::InvalidInstrument(format!(
            "POVM element spectrum [{lo:.3e}, {hi:.3e}] leaves [0,1]"
        )));
    }
    check_density(rho)?;
    let single = |o: &Operator| Operator::single(o.matrix().clone()).expect("square");
    CjOperator::new(single(p).kron(&single(&rho.transpose())))
}

/// Outcomes of a quantum instrument; their sum is trace preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    elements: Vec<CjOperator>,
}

impl Instrument {
    pub fn new(elements: Vec<CjOperator>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInstrument("no elements".into()))?;
        let dims = first.operator().dims().to_vec();
        if elements.iter().any(|e| e.operator().dims() != dims.as_slice()) {
            return Err(Error::InvalidInstrument("elements differ in dims".into()));
        }
        let total = elements
            .iter()
            .skip(1)
            .fold(first.operator().clone(), |acc, e| &acc + e.operator());
        let tr_out = partial_trace(&total, &[0])?;
        let dev = tr_out.max_abs_diff(&Operator::identity(&[dims[0]]));
        if dev > ALGEBRAIC_TOL {
            return Err(Error::InvalidInstrument(format!(
                "elements are not trace preserving in total (deviation {dev:.3e})"
            )));
        }
        Ok(Instrument { elements })
    }

    pub fn elements(&self) -> &[CjOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomInstrumentSpec {
    pub d_in: usize,
    pub d_out: usize,
    pub outcomes: usize,
    /// Kraus rank per outcome.
    pub rank: usize,
}

/// Random isometry `V: C^{cols} → C^{rows}` from a QR factorization.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows ≥ cols");
    let g = CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    g.qr().q()
}

/// Random instrument obtained by splitting a Stinespring isometry into
/// `outcomes × rank` Kraus blocks.
pub fn random_instrument(spec: RandomInstrumentSpec, rng: &mut impl Rng) -> Instrument {
    let blocks = spec.outcomes * spec.rank;
    let v = random_isometry(spec.d_out * blocks, spec.d_in, rng);
    let elements = (0..spec.outcomes)
        .map(|o| {
            let kraus: Vec<CMatrix> = (0..spec.rank)
                .map(|r| {
                    let start = (o * spec.rank + r) * spec.d_out;
                    v.rows(start, spec.d_out).into_owned()
                })
                .collect();
            CjOperator::from_kraus(&kraus).expect("Kraus blocks give a CP map")
        })
        .collect();
    Instrument::new(elements).expect("isometry blocks are complete")
}

/// Random CPTP map, as a single-outcome instrument.
pub fn random_channel(d_in: usize, d_out: usize, rng: &mut impl Rng) -> CjOperator {
    let rank = rng.gen_range(1..=d_in * d_out);
    random_instrument(RandomInstrumentSpec { d_in, d_out, outcomes: 1, rank }, rng).elements[0].clone()
}
