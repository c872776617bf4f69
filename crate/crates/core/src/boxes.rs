//! Bipartite binary-input, binary-output conditional distributions.
//!
//! Correlators map outputs `0 ↦ +1`, `1 ↦ −1`.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::simplex;

pub type Table = [[[[f64; 2]; 2]; 2]; 2];

const NORM_TOL: f64 = 1e-12;

/// `p(a,b|x,y)` stored as `p[a][b][x][y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalBox {
    p: Table,
}

fn sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ConditionalBox {
    pub fn new(p: Table) -> Result<Self> {
        for x in 0..2 {
            for y in 0..2 {
                let mut total = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let v = p[a][b][x][y];
                        if !v.is_finite() || v < -NORM_TOL {
                            return Err(Error::InvalidBox(format!(
                                "p({a},{b}|{x},{y}) = {v}"
                            )));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidBox(format!(
                        "outputs for inputs ({x},{y}) sum to {total}"
                    )));
                }
            }
        }
        Ok(ConditionalBox { p })
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (a, pa) in p.iter_mut().enumerate() {
            for (b, pb) in pa.iter_mut().enumerate() {
                for (x, px) in pb.iter_mut().enumerate() {
                    for (y, v) in px.iter_mut().enumerate() {
                        *v = f(a, b, x, y);
                    }
                }
            }
        }
        ConditionalBox::new(p)
    }

    pub fn table(&self) -> &Table {
        &self.p
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[a][b][x][y]
    }

    pub fn uniform() -> Self {
        ConditionalBox {
            p: [[[[0.25; 2]; 2]; 2]; 2],
        }
    }

    /// `a ⊕ b = x·y` with uniform marginals.
    pub fn pr_box() -> Self {
        Self::isotropic(1.0).expect("valid bias")
    }

    /// `a ⊕ b = x·y ⊕ r(x,y)` with uniform marginals, where `r` is 1 only at
    /// the input pair `flip` (if any) and then everywhere negated by `negate`.
    pub fn pr_variant(flip: (usize, usize), negate: bool) -> Self {
        let (fx, fy) = flip;
        ConditionalBox::from_fn(|a, b, x, y| {
            let want = usize::from((x, y) != (fx, fy)) ^ usize::from(negate) ^ 1;
            if a ^ b == want {
                0.5
            } else {
                0.0
            }
        })
        .expect("PR variants are normalized")
    }

    /// Noisy PR box: `a ⊕ b = x·y` with probability `(1+E)/2`, uniform marginals.
    pub fn isotropic(e: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::InvalidParameter(format!("bias {e} outside [-1,1]")));
        }
        ConditionalBox::from_fn(|a, b, x, y| {
            if a ^ b == x & y {
                0.25 * (1.0 + e)
            } else {
                0.25 * (1.0 - e)
            }
        })
    }

    /// `a = f[x]`, `b = g[y]`.
    pub fn deterministic(f: [usize; 2], g: [usize; 2]) -> Self {
        ConditionalBox::from_fn(|a, b, x, y| f64::from(u8::from(a == f[x] && b == g[y])))
            .expect("deterministic boxes are normalized")
    }

    /// Entries of the winning-correlation table for the game with marginal
    /// probability `p` of outcome 1 (valid for `0 ≤ p ≤ 1/2`).
    pub fn marginal_game_table(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParameter(format!("marginal {p} outside [0, 1/2]")));
        }
        ConditionalBox::from_fn(|a, b, x, y| match ((x, y), (a, b)) {
            ((1, 1), (0, 0)) => 1.0 - p,
            ((1, 1), (1, 1)) => p,
            ((1, 1), _) => 0.0,
            (_, (0, 0)) => 1.0 - 2.0 * p,
            (_, (1, 1)) => 0.0,
            _ => p,
        })
    }

    /// Convex combination `λ self + (1−λ) other`.
    pub fn mix(&self, other: &ConditionalBox, lambda: f64) -> Result<Self> {
        ConditionalBox::from_fn(|a, b, x, y| {
            lambda * self.get(a, b, x, y) + (1.0 - lambda) * other.get(a, b, x, y)
        })
    }

    /// `⟨xy⟩ = p(same) − p(different)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut c = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                c += sign(a) * sign(b) * self.p[a][b][x][y];
            }
        }
        c
    }

    /// `p(a|x)` computed with Bob's input `y`.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        self.p[a][0][x][y] + self.p[a][1][x][y]
    }

    /// `p(b|y)` computed with Alice's input `x`.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        self.p[0][b][x][y] + self.p[1][b][x][y]
    }
}

#[derive(Serialize, Deserialize)]
struct BoxJson {
    p: Table,
    labels: [String; 4],
}

impl Serialize for ConditionalBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoxJson {
            p: self.p,
            labels: ["a", "b", "x", "y"].map(String::from),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConditionalBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BoxJson::deserialize(d)?;
        if raw.labels != ["a", "b", "x", "y"] {
            return Err(D::Error::custom(format!("unsupported labels {:?}", raw.labels)));
        }
        ConditionalBox::new(raw.p).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignallingReport {
    pub nonsignalling: bool,
    pub worst_violation: f64,
    /// Worst deviation from input-independent, party-symmetric marginals.
    pub symmetric_marginal_violation: f64,
}

/// Checks that Alice's marginal does not depend on `y` and Bob's does not
/// depend on `x`. The symmetric-marginal deviation is reported separately
/// and does not affect the verdict.
pub fn is_nonsignalling(bx: &ConditionalBox, tol: f64) -> SignallingReport {
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for x in 0..2 {
            worst = worst.max((bx.marginal_a(a, x, 0) - bx.marginal_a(a, x, 1)).abs());
        }
    }
    for b in 0..2 {
        for y in 0..2 {
            worst = worst.max((bx.marginal_b(b, 0, y) - bx.marginal_b(b, 1, y)).abs());
        }
    }
    let reference = bx.marginal_a(1, 0, 0);
    let mut sym: f64 = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            sym = sym.max((bx.marginal_a(1, x, y) - reference).abs());
            sym = sym.max((bx.marginal_b(1, x, y) - reference).abs());
        }
    }
    SignallingReport {
        nonsignalling: worst <= tol,
        worst_violation: worst,
        symmetric_marginal_violation: sym,
    }
}

/// `K = ⟨00⟩ + ⟨01⟩ + ⟨10⟩ − ⟨11⟩`.
pub fn chsh_value(bx: &ConditionalBox) -> f64 {
    chsh_relabeled(bx, ChshFacet { minus_at: (1, 1), negated: false })
}

/// One of the eight relabelings of the CHSH functional: the minus sign sits
/// on the correlator `minus_at` and the whole expression is optionally negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChshFacet {
    pub minus_at: (usize, usize),
    pub negated: bool,
}

impl ChshFacet {
    pub fn all() -> Vec<ChshFacet> {
        let mut out = Vec::with_capacity(8);
        for x in 0..2 {
            for y in 0..2 {
                for negated in [false, true] {
                    out.push(ChshFacet { minus_at: (x, y), negated });
                }
            }
        }
        out
    }
}

pub fn chsh_relabeled(bx: &ConditionalBox, facet: ChshFacet) -> f64 {
    let mut k = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let s = if (x, y) == facet.minus_at { -1.0 } else { 1.0 };
            k += s * bx.correlator(x, y);
        }
    }
    if facet.negated {
        -k
    } else {
        k
    }
}

/// The most violated relabeled CHSH functional and its value.
pub fn worst_facet(bx: &ConditionalBox) -> (ChshFacet, f64) {
    ChshFacet::all()
        .into_iter()
        .map(|f| (f, chsh_relabeled(bx, f)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("eight facets")
}

/// True iff every relabeled CHSH functional is at most `2 + tol`.
pub fn facet_test(bx: &ConditionalBox, tol: f64) -> bool {
    worst_facet(bx).1 <= 2.0 + tol
}

/// All 16 local deterministic boxes, indexed by `(f0, f1, g0, g1)` in binary.
pub fn deterministic_boxes() -> Vec<ConditionalBox> {
    let mut out = Vec::with_capacity(16);
    for code in 0..16usize {
        let f = [(code >> 3) & 1, (code >> 2) & 1];
        let g = [(code >> 1) & 1, code & 1];
        out.push(ConditionalBox::deterministic(f, g));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    Inside { weights: Vec<f64> },
    Outside { facet: ChshFacet, value: f64 },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

pub const LP_TOL: f64 = 1e-9;

/// Decides whether a non-signalling box is a convex mixture of the 16
/// deterministic boxes by solving a feasibility LP.
pub fn local_membership(bx: &ConditionalBox) -> Result<Membership> {
    let report = is_nonsignalling(bx, LP_TOL);
    if !report.nonsignalling {
        return Err(Error::Signalling(report.worst_violation));
    }
    let verts = deterministic_boxes();
    let mut a = Vec::with_capacity(16);
    let mut rhs = Vec::with_capacity(16);
    for ai in 0..2 {
        for bi in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    a.push(verts.iter().map(|v| v.get(ai, bi, x, y)).collect());
                    rhs.push(bx.get(ai, bi, x, y));
                }
            }
        }
    }
    match simplex::find_feasible(&a, &rhs, LP_TOL)? {
        Some(weights) => Ok(Membership::Inside { weights }),
        None => {
            let (facet, value) = worst_facet(bx);
            Ok(Membership::Outside { facet, value })
        }
    }
}

/// Rebuilds a box from weights over [`deterministic_boxes`].
pub fn reconstruct(weights: &[f64]) -> Table {
    let verts = deterministic_boxes();
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (w, v) in weights.iter().zip(&verts) {
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        p[a][b][x][y] += w * v.get(a, b, x, y);
                    }
                }
            }
        }
    }
    p
}

/// Success probability of the `p = 1/2` marginal game under uniform inputs,
/// scored against its winning table: different outputs on inputs
/// `00, 01, 10`, equal outputs on `11`. Equals `1/2 − K/8`.
pub fn marginal_game_win(bx: &ConditionalBox) -> f64 {
    let mut win = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let wanted = usize::from((x, y) != (1, 1));
                    if a ^ b == wanted {
                        win += 0.25 * bx.get(a, b, x, y);
                    }
                }
            }
        }
    }
    win
}

/// Random non-signalling box: a sparse exponential-weight mixture of the
/// 16 deterministic boxes and the 8 PR variants.
pub fn random_nonsignalling(rng: &mut impl Rng) -> ConditionalBox {
    let mut vertices = deterministic_boxes();
    for fx in 0..2 {
        for fy in 0..2 {
            for negate in [false, true] {
                vertices.push(ConditionalBox::pr_variant((fx, fy), negate));
            }
        }
    }
    let weights: Vec<f64> = vertices
        .iter()
        .map(|_| {
            let u: f64 = rng.gen();
            if rng.gen_bool(0.3) { -(1.0 - u).ln() } else { 0.0 }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return ConditionalBox::uniform();
    }
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (w, v) in weights.iter().zip(&vertices) {
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        p[a][b][x][y] += w / total * v.get(a, b, x, y);
                    }
                }
            }
        }
    }
    ConditionalBox::new(p).expect("convex mixture of valid boxes")
}
