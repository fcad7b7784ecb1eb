// SPDX-License-Identifier: MIT OR Apache-2.0

//! Recursive cell problems of the layered cell and their perturbation functions.
//!
//! Every field equation handled here has the one-dimensional form
//!
//! ```text
//! Σ_b [ d/dx (A_ab w_b' + B_ab w_b) + E_ab w_b' + H_ab w_b ] = 0
//! ```
//!
//! with `A` diagonal and piecewise constant, and `B`, `E`, `H` piecewise
//! constant polynomials in the Laplace variable `s`. The micro field is
//! expanded as `w = Σ_l ε^l W_l(ξ) U` where `W_l` is a matrix of
//! piecewise polynomials in `ξ` that are also polynomials in the symbols
//! `κ = ∂/∂x` and `s`. Collecting powers of `ε` yields, for each `l ≥ 1`,
//! a cell problem `(a W_l' + b_l)' = r_l − ⟨r_l⟩` solved exactly by
//! [`solve_cell_problem`], and the averages `F_l = ⟨R_l⟩` that form the
//! macroscopic equation `Σ_{l≥2} ε^{l−2} F_l(κ, s) U = 0`.
//!
//! The mechanical-thermal block carries fields `(u₂, υ)`; the shear block
//! carries `u₁` alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::LayeredCell;
use crate::piecewise::{PiecewisePoly, Poly};
use crate::C64;

/// Polarization block of waves travelling along `e₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    /// Transverse displacement `u₁`, decoupled from temperature.
    Shear,
    /// Longitudinal displacement `u₂` coupled with the temperature `υ`.
    Coupled,
}

impl Block {
    /// Number of unknown fields.
    pub fn size(self) -> usize {
        match self {
            Block::Shear => 1,
            Block::Coupled => 2,
        }
    }

    /// Short lowercase tag used in files and tables.
    pub fn tag(self) -> &'static str {
        match self {
            Block::Shear => "shear",
            Block::Coupled => "coupled",
        }
    }

    /// Parses a tag produced by [`Block::tag`].
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "shear" => Ok(Block::Shear),
            "coupled" | "compressional-thermal" => Ok(Block::Coupled),
            other => Err(Error::Config(format!(
                "unknown block `{other}` (expected shear or coupled)"
            ))),
        }
    }
}

/// Canonical cell problem `(a f′ + b)′ = r` on the two-layer unit cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellProblem1D {
    /// Diffusion coefficient of layer 1.
    pub a1: f64,
    /// Diffusion coefficient of layer 2.
    pub a2: f64,
    /// Flux source `b`.
    pub flux_source: PiecewisePoly,
    /// Volume source `r`; it must have zero cell mean.
    pub volume_source: PiecewisePoly,
}

impl CellProblem1D {
    /// Flux `a f′ + b` of a candidate solution.
    pub fn flux(&self, f: &PiecewisePoly) -> PiecewisePoly {
        let (s1, s2) = f.partition();
        let a = PiecewisePoly::constant(s1, s2, self.a1, self.a2);
        &(&a * &f.derivative()) + &self.flux_source
    }
}

/// Solves a [`CellProblem1D`] exactly.
///
/// The result is the unique periodic, continuous, zero-mean piecewise
/// polynomial whose flux `a f′ + b` is continuous at both interfaces. Its
/// degree is at most the source degree plus two.
pub fn solve_cell_problem(problem: &CellProblem1D) -> Result<PiecewisePoly> {
    let (a1, a2) = (problem.a1, problem.a2);
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::DegenerateCoefficient(a1, a2));
    }
    let r = &problem.volume_source;
    let b = &problem.flux_source;
    let (s1, s2) = r.partition();
    if b.partition() != (s1, s2) {
        return Err(Error::PartitionMismatch);
    }
    let scale = 1.0 + r.max_coeff() + b.max_coeff();
    let mean = r.cell_mean();
    if mean.abs() > 1e-10 * scale {
        return Err(Error::SolvabilityViolated(mean));
    }
    let a = [a1, a2];
    // q_j = Q_j + g_j with g_j(0) = 0, then f_j = F_j + Q_j t / a_j + h_j.
    let g: Vec<Poly> = (0..2).map(|j| r.layer(j).antiderivative()).collect();
    let hp: Vec<Poly> = (0..2)
        .map(|j| (&g[j] - b.layer(j)).scale(1.0 / a[j]).antiderivative())
        .collect();
    let gap = g[0].eval(0.5 * s1) - g[1].eval(-0.5 * s2);
    let rr = hp[1].eval(-0.5 * s2) - hp[0].eval(0.5 * s1) + hp[0].eval(-0.5 * s1) - hp[1].eval(0.5 * s2);
    let q1 = (rr - gap * s2 / a2) / (s1 / a1 + s2 / a2);
    let q2 = q1 + gap;
    let periodic = q2 + g[1].eval(0.5 * s2) - q1 - g[0].eval(-0.5 * s1);
    if periodic.abs() > 1e-10 * scale {
        return Err(Error::SolvabilityViolated(periodic));
    }
    let q = [q1, q2];
    let delta = -q2 * s2 / (2.0 * a2) + hp[1].eval(-0.5 * s2) - q1 * s1 / (2.0 * a1) - hp[0].eval(0.5 * s1);
    let m = [hp[0].integral_centered(s1) / s1, hp[1].integral_centered(s2) / s2];
    // s1 (F2 + Δ + m1) + s2 (F2 + m2) = 0
    let f2 = -(s1 * (delta + m[0]) + s2 * m[1]) / (s1 + s2);
    let f1 = f2 + delta;
    let consts = [f1, f2];
    let layers: Vec<Poly> = (0..2)
        .map(|j| {
            let lin = Poly::from_coeffs(&[consts[j], q[j] / a[j]]);
            &lin + &hp[j]
        })
        .collect();
    Ok(PiecewisePoly::new(s1, s2, layers[0].clone(), layers[1].clone()))
}

/// Exponents `(κ power, s power)` of a monomial `κ^a s^b`.
pub type Monomial = (u32, u32);

/// A polynomial in the symbols `κ` and `s` whose coefficients are
/// piecewise polynomials in `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPoly {
    s1: f64,
    s2: f64,
    terms: BTreeMap<Monomial, PiecewisePoly>,
}

impl SymbolPoly {
    /// The zero symbol on the partition.
    pub fn zero(s1: f64, s2: f64) -> Self {
        SymbolPoly {
            s1,
            s2,
            terms: BTreeMap::new(),
        }
    }

    /// A single monomial term.
    pub fn monomial(m: Monomial, p: PiecewisePoly) -> Self {
        let (s1, s2) = p.partition();
        let mut out = Self::zero(s1, s2);
        out.insert(m, p);
        out
    }

    /// Piecewise-constant coefficient `c1, c2` times `s^spow`.
    pub fn constant(s1: f64, s2: f64, spow: u32, c1: f64, c2: f64) -> Self {
        Self::monomial((0, spow), PiecewisePoly::constant(s1, s2, c1, c2))
    }

    fn insert(&mut self, m: Monomial, p: PiecewisePoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(q) => {
                let sum = &*q + &p;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *q = sum;
                }
            }
            None => {
                self.terms.insert(m, p);
            }
        }
    }

    /// Coefficient of a monomial, if present.
    pub fn get(&self, m: Monomial) -> Option<&PiecewisePoly> {
        self.terms.get(&m)
    }

    /// All nonzero terms in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PiecewisePoly)> {
        self.terms.iter()
    }

    /// True when no term is present.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of two symbols.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.insert(*m, p.clone());
        }
        out
    }

    /// Product, convolving monomials and multiplying coefficients.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.s1, self.s2);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                out.insert((ma.0 + mb.0, ma.1 + mb.1), pa * pb);
            }
        }
        out
    }

    /// Multiplication by a real scalar.
    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.s1, self.s2);
        for (m, p) in &self.terms {
            out.insert(*m, p.scale(c));
        }
        out
    }

    /// Multiplication by the symbol `κ`.
    pub fn times_kappa(&self) -> Self {
        SymbolPoly {
            s1: self.s1,
            s2: self.s2,
            terms: self.terms.iter().map(|(m, p)| ((m.0 + 1, m.1), p.clone())).collect(),
        }
    }

    /// Derivative with respect to the fast variable `ξ`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.s1, self.s2);
        for (m, p) in &self.terms {
            out.insert(*m, p.derivative());
        }
        out
    }

    /// Cell mean of every coefficient.
    pub fn mean(&self) -> BTreeMap<Monomial, f64> {
        self.terms
            .iter()
            .map(|(m, p)| (*m, p.cell_mean()))
            .filter(|(_, v)| *v != 0.0)
            .collect()
    }

    /// Value at `ξ` for complex symbols.
    pub fn eval(&self, xi: f64, kappa: C64, s: C64) -> C64 {
        self.terms
            .iter()
            .map(|(m, p)| p.eval(xi) * kappa.powu(m.0) * s.powu(m.1))
            .sum()
    }
}

/// Square matrix of symbols.
pub type SymMat = Vec<Vec<SymbolPoly>>;

fn mat_zero(n: usize, s1: f64, s2: f64) -> SymMat {
    vec![vec![SymbolPoly::zero(s1, s2); n]; n]
}

fn mat_identity(n: usize, s1: f64, s2: f64) -> SymMat {
    let mut m = mat_zero(n, s1, s2);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = SymbolPoly::constant(s1, s2, 0, 1.0, 1.0);
    }
    m
}

fn mat_mul(a: &SymMat, b: &SymMat) -> SymMat {
    let n = a.len();
    let (s1, s2) = (a[0][0].s1, a[0][0].s2);
    let mut out = mat_zero(n, s1, s2);
    for i in 0..n {
        for j in 0..n {
            let mut acc = SymbolPoly::zero(s1, s2);
            for k in 0..n {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    acc = acc.add(&a[i][k].mul(&b[k][j]));
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_add(a: &SymMat, b: &SymMat) -> SymMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn mat_map(a: &SymMat, f: impl Fn(&SymbolPoly) -> SymbolPoly) -> SymMat {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// Macroscopic coefficient matrix: entry `[r][c]` maps monomials to averages.
pub type MacroMatrix = Vec<Vec<BTreeMap<Monomial, f64>>>;

/// Coefficient data of the one-dimensional operator of one block.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    /// Which block the data describe.
    pub block: Block,
    /// Diagonal diffusion coefficients per field and layer.
    pub a: Vec<[f64; 2]>,
    /// Flux coupling `B`.
    pub b: SymMat,
    /// First-derivative coupling `E`.
    pub e: SymMat,
    /// Zeroth-order terms `H`.
    pub h: SymMat,
}

impl BlockOperator {
    /// Builds the operator data of a block from the cell constants.
    pub fn new(cell: &LayeredCell, block: Block) -> Self {
        let (s1, s2) = cell.fractions();
        let (p1, p2) = (&cell.phase1, &cell.phase2);
        let n = block.size();
        let mut b = mat_zero(n, s1, s2);
        let mut e = mat_zero(n, s1, s2);
        let mut h = mat_zero(n, s1, s2);
        let rho = SymbolPoly::constant(s1, s2, 2, -p1.rho, -p2.rho);
        match block {
            Block::Shear => {
                h[0][0] = rho;
                BlockOperator {
                    block,
                    a: vec![[p1.c1212, p2.c1212]],
                    b,
                    e,
                    h,
                }
            }
            Block::Coupled => {
                h[0][0] = rho;
                b[0][1] = SymbolPoly::constant(s1, s2, 0, -p1.alpha22, -p2.alpha22).add(&SymbolPoly::constant(
                    s1,
                    s2,
                    1,
                    -cell.alpha1_22(0),
                    -cell.alpha1_22(1),
                ));
                e[1][0] = SymbolPoly::constant(s1, s2, 1, -p1.alpha22, -p2.alpha22);
                h[1][1] = SymbolPoly::constant(s1, s2, 1, -p1.p, -p2.p).add(&SymbolPoly::constant(
                    s1,
                    s2,
                    2,
                    -cell.p0(0),
                    -cell.p0(1),
                ));
                BlockOperator {
                    block,
                    a: vec![[p1.c2222, p2.c2222], [p1.k22, p2.k22]],
                    b,
                    e,
                    h,
                }
            }
        }
    }

    fn a_matrix(&self, s1: f64, s2: f64) -> SymMat {
        let n = self.a.len();
        let mut m = mat_zero(n, s1, s2);
        for (i, a) in self.a.iter().enumerate() {
            m[i][i] = SymbolPoly::constant(s1, s2, 0, a[0], a[1]);
        }
        m
    }
}

/// Solution of the cell-problem hierarchy of one block through order 3.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    /// Block the hierarchy belongs to.
    pub block: Block,
    /// Normalized layer thicknesses `(s̄₁, s̄₂)`.
    pub partition: (f64, f64),
    /// `w[l]` for `l = 0..=3`, with `w[0]` the identity.
    pub w: Vec<SymMat>,
    /// `f[l]` for `l = 0..=4`; `f[0]` and `f[1]` are zero.
    pub f: Vec<MacroMatrix>,
    /// The cell problem solved for each `(order, row, col, monomial)`.
    pub problems: BTreeMap<(usize, usize, usize, Monomial), CellProblem1D>,
}

/// Highest order of perturbation functions computed by [`solve_hierarchy`].
pub const MAX_ORDER: usize = 3;

/// Solves the recursive cell problems of a block through order
/// [`MAX_ORDER`] and the averaged coefficients through order
/// `MAX_ORDER + 1`.
pub fn solve_hierarchy(cell: &LayeredCell, block: Block) -> Result<Hierarchy> {
    let op = BlockOperator::new(cell, block);
    let (s1, s2) = cell.fractions();
    let n = block.size();
    let a = op.a_matrix(s1, s2);
    let mut w: Vec<SymMat> = vec![mat_identity(n, s1, s2)];
    let mut f: Vec<MacroMatrix> = Vec::new();
    let mut problems = BTreeMap::new();
    let zero = mat_zero(n, s1, s2);
    for l in 1..=MAX_ORDER + 1 {
        let w1 = &w[l - 1];
        let w2 = if l >= 2 { &w[l - 2] } else { &zero };
        // R_l = κ(A W'_{l−1} + κ A W_{l−2} + B W_{l−2}) + E(W'_{l−1} + κ W_{l−2}) + H W_{l−2}
        let dw1 = mat_map(w1, SymbolPoly::derivative);
        let kw2 = mat_map(w2, SymbolPoly::times_kappa);
        let flux_prev = mat_add(&mat_add(&mat_mul(&a, &dw1), &mat_mul(&a, &kw2)), &mat_mul(&op.b, w2));
        let r = mat_add(
            &mat_add(
                &mat_map(&flux_prev, SymbolPoly::times_kappa),
                &mat_mul(&op.e, &mat_add(&dw1, &kw2)),
            ),
            &mat_mul(&op.h, w2),
        );
        let means: MacroMatrix = r.iter().map(|row| row.iter().map(SymbolPoly::mean).collect()).collect();
        f.push(means.clone());
        if l > MAX_ORDER {
            break;
        }
        // b_l = κ A W_{l−1} + B W_{l−1}
        let flux_src = mat_add(&mat_map(&mat_mul(&a, w1), SymbolPoly::times_kappa), &mat_mul(&op.b, w1));
        let mut wl = mat_zero(n, s1, s2);
        for row in 0..n {
            for col in 0..n {
                let mut keys: Vec<Monomial> = flux_src[row][col].terms().map(|(m, _)| *m).collect();
                keys.extend(r[row][col].terms().map(|(m, _)| *m));
                keys.sort_unstable();
                keys.dedup();
                let mut sol = SymbolPoly::zero(s1, s2);
                for m in keys {
                    let zero_pp = PiecewisePoly::zero(s1, s2);
                    let bm = flux_src[row][col].get(m).unwrap_or(&zero_pp).clone();
                    let rm = r[row][col].get(m).unwrap_or(&zero_pp);
                    let avg = means[row][col].get(&m).copied().unwrap_or(0.0);
                    let shifted = &PiecewisePoly::constant(s1, s2, avg, avg) - rm;
                    let problem = CellProblem1D {
                        a1: op.a[row][0],
                        a2: op.a[row][1],
                        flux_source: bm,
                        volume_source: shifted,
                    };
                    let fm = solve_cell_problem(&problem)?;
                    problems.insert((l, row, col, m), problem);
                    sol = sol.add(&SymbolPoly::monomial(m, fm));
                }
                wl[row][col] = sol;
            }
        }
        w.push(wl);
    }
    f.insert(0, vec![vec![BTreeMap::new(); n]; n]);
    Ok(Hierarchy {
        block,
        partition: (s1, s2),
        w,
        f,
        problems,
    })
}

impl Hierarchy {
    /// Averaged coefficient `F_l[row][col]` of monomial `κ^a s^b`.
    pub fn coefficient(&self, l: usize, row: usize, col: usize, m: Monomial) -> f64 {
        self.f[l][row][col].get(&m).copied().unwrap_or(0.0)
    }

    /// Perturbation function `W_l[row][col]` of monomial `κ^a s^b` (zero if absent).
    pub fn function(&self, l: usize, row: usize, col: usize, m: Monomial) -> PiecewisePoly {
        let p = &self.w[l][row][col];
        p.get(m).cloned().unwrap_or_else(|| PiecewisePoly::zero(p.s1, p.s2))
    }
}

/// Location of a named perturbation function inside a hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionKey {
    /// Block.
    pub block: Block,
    /// Order `l`.
    pub order: usize,
    /// Row (equation) index.
    pub row: usize,
    /// Column (macro field) index.
    pub col: usize,
    /// Monomial.
    pub monomial: Monomial,
}

const fn key(block: Block, order: usize, row: usize, col: usize, k: u32, s: u32) -> FunctionKey {
    FunctionKey {
        block,
        order,
        row,
        col,
        monomial: (k, s),
    }
}

/// Conventional names of the perturbation functions for propagation along `e₂`.
///
/// In the coupled block index 0 is `u₂` and index 1 is `υ`; columns refer to
/// the macroscopic displacement `U₂` and temperature `Υ`.
pub const NAMED_FUNCTIONS: &[(&str, FunctionKey)] = &[
    ("N1_222", key(Block::Coupled, 1, 0, 0, 1, 0)),
    ("Ntilde1_2", key(Block::Coupled, 1, 0, 1, 0, 0)),
    ("Ntilde11_2", key(Block::Coupled, 1, 0, 1, 0, 1)),
    ("M1_2", key(Block::Coupled, 1, 1, 1, 1, 0)),
    ("N1_112", key(Block::Shear, 1, 0, 0, 1, 0)),
    ("N2_2222", key(Block::Coupled, 2, 0, 0, 2, 0)),
    ("N22_22", key(Block::Coupled, 2, 0, 0, 0, 2)),
    ("Ntilde2_22", key(Block::Coupled, 2, 0, 1, 1, 0)),
    ("Ntilde21_22", key(Block::Coupled, 2, 0, 1, 1, 1)),
    ("M2_22", key(Block::Coupled, 2, 1, 1, 2, 0)),
    ("Mtilde21_22", key(Block::Coupled, 2, 1, 0, 1, 1)),
    ("M21", key(Block::Coupled, 2, 1, 1, 0, 1)),
    ("M22_fn", key(Block::Coupled, 2, 1, 1, 0, 2)),
    ("N2_1122", key(Block::Shear, 2, 0, 0, 2, 0)),
    ("N22_11", key(Block::Shear, 2, 0, 0, 0, 2)),
    ("N3_22222", key(Block::Coupled, 3, 0, 0, 3, 0)),
    ("N31_222", key(Block::Coupled, 3, 0, 0, 1, 1)),
    ("N32_222", key(Block::Coupled, 3, 0, 0, 1, 2)),
    ("Ntilde3_222", key(Block::Coupled, 3, 0, 1, 2, 0)),
    ("Ntilde31_222", key(Block::Coupled, 3, 0, 1, 2, 1)),
    ("Ntt31_2", key(Block::Coupled, 3, 0, 1, 0, 1)),
    ("Ntt32_2", key(Block::Coupled, 3, 0, 1, 0, 2)),
    ("Ntt33_2", key(Block::Coupled, 3, 0, 1, 0, 3)),
    ("M3_222", key(Block::Coupled, 3, 1, 1, 3, 0)),
    ("M31_22", key(Block::Coupled, 3, 1, 1, 1, 1)),
    ("M32_22", key(Block::Coupled, 3, 1, 1, 1, 2)),
    ("Mtilde31_222", key(Block::Coupled, 3, 1, 0, 2, 1)),
    ("Mtilde32_2", key(Block::Coupled, 3, 1, 0, 0, 2)),
    ("Mtilde33_2", key(Block::Coupled, 3, 1, 0, 0, 3)),
    ("N3_11222", key(Block::Shear, 3, 0, 0, 3, 0)),
    ("N32_112", key(Block::Shear, 3, 0, 0, 1, 2)),
];

/// All perturbation functions of a cell through order 3.
#[derive(Clone, Debug)]
pub struct PerturbationSet {
    /// Shear-block hierarchy.
    pub shear: Hierarchy,
    /// Mechanical-thermal hierarchy.
    pub coupled: Hierarchy,
    /// `N⁽¹⁾₂₁₁`: response of `u₂` to the transverse strain `U₁,₁`.
    pub n1_211: PiecewisePoly,
}

/// Solves every cell problem of the cell through order 3.
pub fn solve_all(cell: &LayeredCell) -> Result<PerturbationSet> {
    let (shear, coupled) = rayon::join(
        || solve_hierarchy(cell, Block::Shear),
        || solve_hierarchy(cell, Block::Coupled),
    );
    let (s1, s2) = cell.fractions();
    let n1_211 = solve_cell_problem(&CellProblem1D {
        a1: cell.phase1.c2222,
        a2: cell.phase2.c2222,
        flux_source: PiecewisePoly::constant(s1, s2, cell.phase1.c1122, cell.phase2.c1122),
        volume_source: PiecewisePoly::zero(s1, s2),
    })?;
    Ok(PerturbationSet {
        shear: shear?,
        coupled: coupled?,
        n1_211,
    })
}

/// Order-1 functions: `N1_211`, `N1_222`, `N1_112`, `Ntilde1_2`, `Ntilde11_2`, `M1_2`.
pub fn solve_order1(cell: &LayeredCell) -> Result<Vec<(&'static str, PiecewisePoly)>> {
    let set = solve_all(cell)?;
    Ok(set.order(1))
}

impl PerturbationSet {
    /// Hierarchy of a block.
    pub fn hierarchy(&self, block: Block) -> &Hierarchy {
        match block {
            Block::Shear => &self.shear,
            Block::Coupled => &self.coupled,
        }
    }

    /// Every available function name.
    pub fn names() -> Vec<String> {
        let mut v: Vec<String> = NAMED_FUNCTIONS.iter().map(|(n, _)| n.to_string()).collect();
        v.insert(0, "N1_211".to_string());
        v
    }

    /// The named perturbation function.
    pub fn get(&self, name: &str) -> Result<PiecewisePoly> {
        if name == "N1_211" {
            return Ok(self.n1_211.clone());
        }
        NAMED_FUNCTIONS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, k)| self.by_key(k))
            .ok_or_else(|| Error::UnknownFunction {
                name: name.to_string(),
                valid: Self::names(),
            })
    }

    /// Function stored at a key.
    pub fn by_key(&self, k: &FunctionKey) -> PiecewisePoly {
        self.hierarchy(k.block).function(k.order, k.row, k.col, k.monomial)
    }

    /// Named functions of one order.
    pub fn order(&self, order: usize) -> Vec<(&'static str, PiecewisePoly)> {
        let mut out = Vec::new();
        if order == 1 {
            out.push(("N1_211", self.n1_211.clone()));
        }
        for (n, k) in NAMED_FUNCTIONS {
            if k.order == order {
                out.push((*n, self.by_key(k)));
            }
        }
        out
    }

    /// Every nonzero function of both hierarchies with its key, named or not.
    pub fn all_functions(&self) -> Vec<(FunctionKey, PiecewisePoly)> {
        let mut out = Vec::new();
        for h in [&self.shear, &self.coupled] {
            for (order, wl) in h.w.iter().enumerate().skip(1) {
                for (row, r) in wl.iter().enumerate() {
                    for (col, sp) in r.iter().enumerate() {
                        for (m, p) in sp.terms() {
                            out.push((
                                FunctionKey {
                                    block: h.block,
                                    order,
                                    row,
                                    col,
                                    monomial: *m,
                                },
                                p.clone(),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Macroscopic plane-wave state used for down-scaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroState {
    /// Block of the wave.
    pub block: Block,
    /// Macroscopic amplitudes (`U` for shear, `(U₂, Υ)` for the coupled block).
    pub amplitudes: [C64; 2],
    /// Angular frequency.
    pub omega: f64,
    /// Complex wavenumber `k₂` (dimensional).
    pub k: C64,
}

/// One micro-field sample at fast coordinate `xi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicroSample {
    /// Fast coordinate in `[0, 1]`.
    pub xi: f64,
    /// Micro displacement.
    pub u: C64,
    /// Micro temperature (zero for the shear block).
    pub theta: C64,
}

/// Down-scales a macroscopic plane wave to micro fields over one cell,
/// truncating the expansion after the `ε²` terms.
pub fn reconstruct_microfields(
    set: &PerturbationSet,
    state: &MacroState,
    epsilon: f64,
    samples: usize,
) -> Vec<MicroSample> {
    let h = set.hierarchy(state.block);
    let n = state.block.size();
    let kappa = crate::I * state.k;
    let s = crate::laplace(state.omega);
    let (s1, s2) = h.partition;
    let grid = PiecewisePoly::zero(s1, s2).samples(samples.max(2));
    grid.into_iter()
        .map(|(xi, _)| {
            let mut field = [C64::new(0.0, 0.0); 2];
            for (row, out) in field.iter_mut().enumerate().take(n) {
                let mut acc = state.amplitudes[row];
                let mut e = 1.0;
                for l in 1..=2 {
                    e *= epsilon;
                    for col in 0..n {
                        acc += e * h.w[l][row][col].eval(xi, kappa, s) * state.amplitudes[col];
                    }
                }
                *out = acc;
            }
            MicroSample {
                xi,
                u: field[0],
                theta: field[1],
            }
        })
        .collect()
}

/// Exact cell averages `(⟨u⟩, ⟨υ⟩)` of the down-scaled micro fields.
pub fn microfield_average(set: &PerturbationSet, state: &MacroState, epsilon: f64) -> [C64; 2] {
    let h = set.hierarchy(state.block);
    let n = state.block.size();
    let kappa = crate::I * state.k;
    let s = crate::laplace(state.omega);
    let mut out = [C64::new(0.0, 0.0); 2];
    for (row, o) in out.iter_mut().enumerate().take(n) {
        let mut acc = state.amplitudes[row];
        let mut e = 1.0;
        for l in 1..=2 {
            e *= epsilon;
            for col in 0..n {
                for (m, p) in h.w[l][row][col].terms() {
                    acc += e * p.cell_mean() * kappa.powu(m.0) * s.powu(m.1) * state.amplitudes[col];
                }
            }
        }
        *o = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{from_ratios, DimensionlessGroups};

    fn problem(a1: f64, a2: f64, b: PiecewisePoly, r: PiecewisePoly) -> CellProblem1D {
        CellProblem1D {
            a1,
            a2,
            flux_source: b,
            volume_source: r,
        }
    }

    #[test]
    fn zero_sources_give_zero() {
        let z = PiecewisePoly::zero(0.5, 0.5);
        let f = solve_cell_problem(&problem(2.0, 2.0, z.clone(), z)).unwrap();
        assert!(f.max_coeff() < 1e-15);
    }

    #[test]
    fn thermal_first_order_slopes() {
        // (K (M' + 1))' = 0 with K2/K1 = 3, η = 1.
        let b = PiecewisePoly::constant(0.5, 0.5, 1.0, 3.0);
        let f = solve_cell_problem(&problem(1.0, 3.0, b, PiecewisePoly::zero(0.5, 0.5))).unwrap();
        assert!((f.layer(0).coeff(1) - 0.5).abs() < 1e-14);
        assert!((f.layer(1).coeff(1) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_coefficient_is_rejected() {
        let z = PiecewisePoly::zero(0.5, 0.5);
        assert_eq!(
            solve_cell_problem(&problem(0.0, 1.0, z.clone(), z)),
            Err(Error::DegenerateCoefficient(0.0, 1.0))
        );
    }

    #[test]
    fn nonzero_mean_source_is_rejected() {
        let z = PiecewisePoly::zero(0.5, 0.5);
        let r = PiecewisePoly::constant(0.5, 0.5, 1.0, 1.0);
        assert!(matches!(
            solve_cell_problem(&problem(1.0, 1.0, z, r)),
            Err(Error::SolvabilityViolated(_))
        ));
    }

    #[test]
    fn solution_satisfies_equation_and_conditions() {
        let (s1, s2) = (0.3, 0.7);
        let r = PiecewisePoly::new(
            s1,
            s2,
            Poly::from_coeffs(&[1.0, 2.0, -1.0]),
            Poly::from_coeffs(&[0.0, -1.0, 0.5]),
        );
        let avg = r.cell_mean();
        let r = &r - &PiecewisePoly::constant(s1, s2, avg, avg);
        let b = PiecewisePoly::new(s1, s2, Poly::from_coeffs(&[0.2, 1.0]), Poly::constant(-0.4));
        let p = problem(1.5, 0.25, b, r.clone());
        let f = solve_cell_problem(&p).unwrap();
        let flux = p.flux(&f);
        let lhs = flux.derivative();
        for j in 0..2 {
            let d = lhs.layer(j) - r.layer(j);
            assert!(d.coeffs().iter().all(|c| c.abs() < 1e-13));
        }
        let (j1, j2) = f.interface_jump(1.0, 1.0);
        assert!(j1.abs() < 1e-14 && j2.abs() < 1e-14);
        let (q1, q2) = flux.interface_jump(1.0, 1.0);
        assert!(q1.abs() < 1e-13 && q2.abs() < 1e-13);
        assert!(f.cell_mean().abs() < 1e-15);
        assert!(f.degree() <= 4);
    }

    #[test]
    fn homogeneous_cell_functions_vanish() {
        let cell = from_ratios(&DimensionlessGroups::homogeneous()).unwrap();
        let set = solve_all(&cell).unwrap();
        for (k, f) in set.all_functions() {
            assert!(f.max_coeff() < 1e-14, "{k:?}");
        }
    }

    #[test]
    fn unknown_function_lists_valid_names() {
        let cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        let set = solve_all(&cell).unwrap();
        match set.get("nope") {
            Err(Error::UnknownFunction { valid, .. }) => assert!(valid.contains(&"M2_22".into())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symbol_product_convolves_monomials() {
        let a = SymbolPoly::constant(0.5, 0.5, 1, 2.0, 2.0).times_kappa();
        let b = SymbolPoly::constant(0.5, 0.5, 2, 3.0, 3.0);
        let c = a.mul(&b);
        assert_eq!(c.get((1, 3)).unwrap().cell_mean(), 6.0);
    }

    #[test]
    fn upscaling_recovers_macro_amplitudes() {
        let cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        let set = solve_all(&cell).unwrap();
        let state = MacroState {
            block: Block::Coupled,
            amplitudes: [C64::new(1.0, 0.5), C64::new(-0.3, 0.2)],
            omega: 0.7,
            k: C64::new(0.6, 0.1),
        };
        let avg = microfield_average(&set, &state, 1.0);
        assert!((avg[0] - state.amplitudes[0]).norm() < 1e-12);
        assert!((avg[1] - state.amplitudes[1]).norm() < 1e-12);
        let s = reconstruct_microfields(&set, &state, 1.0, 11);
        assert_eq!(s.len(), 11);
    }
}
