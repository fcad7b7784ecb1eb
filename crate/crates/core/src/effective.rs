// SPDX-License-Identifier: MIT OR Apache-2.0

//! Averaged coefficients of the macroscopic field equations for propagation
//! along `e₂`.
//!
//! Each coefficient is the exact cell mean of an integrand built from the
//! perturbation functions, read off the averaged operator `F_l(κ, s)` of the
//! cell-problem hierarchy as the factor of one monomial `κ^a s^b`. Signs
//! follow the convention that inertial, heat-capacity and coupling terms
//! enter the macroscopic equations with a minus sign, so that for a
//! homogeneous cell `n22 = ρ`, `ntilde2 = α₂₂`, `m21 = p`, `m22 = p·τ₀`.

use crate::cell_problems::{Block, MacroMatrix, Monomial, PerturbationSet};
use crate::error::Result;
use crate::material::LayeredCell;

/// Definition of one named coefficient: `sign · F_l[row][col]` at `κ^a s^b`.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientDef {
    /// Coefficient name.
    pub name: &'static str,
    /// Block.
    pub block: Block,
    /// Order `l` of the averaged operator.
    pub order: usize,
    /// Equation index.
    pub row: usize,
    /// Macro field index.
    pub col: usize,
    /// Monomial.
    pub monomial: Monomial,
    /// Sign applied to the raw average.
    pub sign: f64,
}

const fn def(
    name: &'static str,
    block: Block,
    order: usize,
    row: usize,
    col: usize,
    k: u32,
    s: u32,
    sign: f64,
) -> CoefficientDef {
    CoefficientDef {
        name,
        block,
        order,
        row,
        col,
        monomial: (k, s),
        sign,
    }
}

use Block::{Coupled as Cp, Shear as Sh};

/// Every named coefficient.
pub const COEFFICIENTS: &[CoefficientDef] = &[
    def("n2", Cp, 2, 0, 0, 2, 0, 1.0),
    def("n22", Cp, 2, 0, 0, 0, 2, -1.0),
    def("ntilde2", Cp, 2, 0, 1, 1, 0, -1.0),
    def("ntilde21", Cp, 2, 0, 1, 1, 1, -1.0),
    def("m2", Cp, 2, 1, 1, 2, 0, 1.0),
    def("mtilde21", Cp, 2, 1, 0, 1, 1, -1.0),
    def("m21", Cp, 2, 1, 1, 0, 1, -1.0),
    def("m22", Cp, 2, 1, 1, 0, 2, -1.0),
    def("n3", Cp, 3, 0, 0, 3, 0, 1.0),
    def("n32", Cp, 3, 0, 0, 1, 2, 1.0),
    def("ntilde3", Cp, 3, 0, 1, 2, 0, 1.0),
    def("ntilde31", Cp, 3, 0, 1, 2, 1, 1.0),
    def("ntt32", Cp, 3, 0, 1, 0, 2, 1.0),
    def("ntt33", Cp, 3, 0, 1, 0, 3, 1.0),
    def("m3", Cp, 3, 1, 1, 3, 0, 1.0),
    def("m31", Cp, 3, 1, 1, 1, 1, 1.0),
    def("m32", Cp, 3, 1, 1, 1, 2, 1.0),
    def("mtilde31", Cp, 3, 1, 0, 2, 1, 1.0),
    def("mtilde33", Cp, 3, 1, 0, 0, 3, 1.0),
    def("n4", Cp, 4, 0, 0, 4, 0, 1.0),
    def("n41", Cp, 4, 0, 0, 2, 1, -1.0),
    def("n42", Cp, 4, 0, 0, 2, 2, 1.0),
    def("n44", Cp, 4, 0, 0, 0, 4, -1.0),
    def("ntilde4", Cp, 4, 0, 1, 3, 0, 1.0),
    def("ntilde41_k3", Cp, 4, 0, 1, 3, 1, 1.0),
    def("ntilde41_vec", Cp, 4, 0, 1, 1, 1, -1.0),
    def("ntt42", Cp, 4, 0, 1, 1, 2, 1.0),
    def("ntt43", Cp, 4, 0, 1, 1, 3, 1.0),
    def("m4", Cp, 4, 1, 1, 4, 0, 1.0),
    def("m41", Cp, 4, 1, 1, 2, 1, 1.0),
    def("m42", Cp, 4, 1, 1, 2, 2, 1.0),
    def("mtt42", Cp, 4, 1, 1, 0, 2, -1.0),
    def("m43", Cp, 4, 1, 1, 0, 3, -1.0),
    def("m44", Cp, 4, 1, 1, 0, 4, -1.0),
    def("mtilde41", Cp, 4, 1, 0, 3, 1, 1.0),
    def("mtilde42", Cp, 4, 1, 0, 1, 2, -1.0),
    def("mtilde43", Cp, 4, 1, 0, 1, 3, 1.0),
    def("shear.n2", Sh, 2, 0, 0, 2, 0, 1.0),
    def("shear.n22", Sh, 2, 0, 0, 0, 2, -1.0),
    def("shear.n3", Sh, 3, 0, 0, 3, 0, 1.0),
    def("shear.n32", Sh, 3, 0, 0, 1, 2, 1.0),
    def("shear.n4", Sh, 4, 0, 0, 4, 0, 1.0),
    def("shear.n42", Sh, 4, 0, 0, 2, 2, 1.0),
    def("shear.n44", Sh, 4, 0, 0, 0, 4, -1.0),
];

/// Averaged coefficients of both blocks.
#[derive(Clone, Debug)]
pub struct EffectiveTensors {
    /// Period `ε` of the cell.
    pub epsilon: f64,
    /// Averaged operators `F_l` of the shear block, `l = 0..=4`.
    pub shear: Vec<MacroMatrix>,
    /// Averaged operators `F_l` of the coupled block, `l = 0..=4`.
    pub coupled: Vec<MacroMatrix>,
}

/// Overall first-order (Cauchy) thermoelastic constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyConstants {
    /// Longitudinal modulus `C₂₂₂₂`.
    pub c_eff: f64,
    /// Shear modulus `C₁₂₁₂`.
    pub c_shear: f64,
    /// Density.
    pub rho_eff: f64,
    /// Coupling `α₂₂`.
    pub alpha_eff: f64,
    /// Relaxed coupling `α⁽¹⁾₂₂`.
    pub alpha1_eff: f64,
    /// Conductivity `K₂₂`.
    pub k_eff: f64,
    /// Heat-capacity group `p`.
    pub p_eff: f64,
    /// Relaxed heat-capacity group `p⁽⁰⁾`.
    pub p0_eff: f64,
}

/// Averages every coefficient from a solved perturbation set.
pub fn compute_effective(cell: &LayeredCell, set: &PerturbationSet) -> EffectiveTensors {
    EffectiveTensors {
        epsilon: cell.epsilon,
        shear: set.shear.f.clone(),
        coupled: set.coupled.f.clone(),
    }
}

/// Solves the cell problems and averages the coefficients in one call.
pub fn effective_from_cell(cell: &LayeredCell) -> Result<EffectiveTensors> {
    let set = crate::cell_problems::solve_all(cell)?;
    Ok(compute_effective(cell, &set))
}

impl EffectiveTensors {
    /// Averaged operators of one block.
    pub fn operator(&self, block: Block) -> &[MacroMatrix] {
        match block {
            Block::Shear => &self.shear,
            Block::Coupled => &self.coupled,
        }
    }

    /// Raw average `F_l[row][col]` at a monomial.
    pub fn raw(&self, block: Block, l: usize, row: usize, col: usize, m: Monomial) -> f64 {
        self.operator(block)
            .get(l)
            .and_then(|f| f[row][col].get(&m))
            .copied()
            .unwrap_or(0.0)
    }

    /// Value of a named coefficient.
    pub fn get(&self, name: &str) -> Option<f64> {
        COEFFICIENTS.iter().find(|d| d.name == name).map(|d| self.value(d))
    }

    fn value(&self, d: &CoefficientDef) -> f64 {
        let v = d.sign * self.raw(d.block, d.order, d.row, d.col, d.monomial);
        // Avoid printing negative zeros.
        if v == 0.0 {
            0.0
        } else {
            v
        }
    }

    /// All named coefficients in table order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        COEFFICIENTS.iter().map(|d| (d.name, self.value(d))).collect()
    }

    /// `n2` of the coupled block.
    pub fn n2(&self) -> f64 {
        self.get("n2").unwrap_or(0.0)
    }

    /// `n22` of the coupled block.
    pub fn n22(&self) -> f64 {
        self.get("n22").unwrap_or(0.0)
    }

    /// `m2` of the coupled block.
    pub fn m2(&self) -> f64 {
        self.get("m2").unwrap_or(0.0)
    }

    /// Shear-block `n2`.
    pub fn shear_n2(&self) -> f64 {
        self.get("shear.n2").unwrap_or(0.0)
    }

    /// Shear-block `n22`.
    pub fn shear_n22(&self) -> f64 {
        self.get("shear.n22").unwrap_or(0.0)
    }

    /// Whether any averaged coefficient of order `ε¹` or `ε²` exceeds `tol`
    /// relative to the order-zero coefficients.
    pub fn has_higher_order(&self, block: Block, tol: f64) -> bool {
        let f = self.operator(block);
        let scale = f[2]
            .iter()
            .flatten()
            .flat_map(|m| m.values())
            .fold(0.0_f64, |a, v| a.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        f[3..]
            .iter()
            .flatten()
            .flatten()
            .flat_map(|m| m.values())
            .any(|v| v.abs() > tol * scale)
    }
}

/// Reads the overall Cauchy constants from the order-2 coefficients.
pub fn first_order_constitutive(t: &EffectiveTensors) -> CauchyConstants {
    let g = |n: &str| t.get(n).unwrap_or(0.0);
    CauchyConstants {
        c_eff: g("n2"),
        c_shear: g("shear.n2"),
        rho_eff: g("n22"),
        alpha_eff: g("ntilde2"),
        alpha1_eff: g("ntilde21"),
        k_eff: g("m2"),
        p_eff: g("m21"),
        p0_eff: g("m22"),
    }
}
