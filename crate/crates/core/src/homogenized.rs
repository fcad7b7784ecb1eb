// SPDX-License-Identifier: MIT OR Apache-2.0

//! Macroscopic matrix polynomials and their complex wavenumber roots.
//!
//! For a homogeneous plane wave `exp(ι(χ x₂ − ωt))` the averaged operator
//! `Σ_l ε^{l−2} F_l(κ, s)` becomes the matrix polynomial
//! `Σ_n χⁿ Γ⁽ⁿ⁾(ω)` with `Γ⁽ⁿ⁾ = Σ_j εʲ Γ⁽ⁿ,ʲ⁾` and
//! `Γ⁽ⁿ,ʲ⁾ = ιⁿ · [κⁿ part of F_{j+2}](s = ιω)`.
//!
//! The zeroth-order spectrum keeps `j = 0`; the second-order spectrum keeps
//! `j ≤ 2`. Roots are computed twice, as eigenvalues of a block companion
//! linearization and as roots of the Faddeev-LeVerrier characteristic
//! polynomial of that linearization, then polished by Newton steps on the
//! scalar determinant `det Σ χⁿ Γ⁽ⁿ⁾`.

use crate::cell_problems::Block;
use crate::effective::{CauchyConstants, EffectiveTensors};
use crate::error::{Error, Result};
use crate::linalg::{
    companion, eigenvalues, faddeev_leverrier, newton_polish, poly_add, poly_mul, poly_roots, relative_hausdorff,
    relative_residual, solve, sort_lex, CMatrix,
};
use crate::{laplace, C64, I};

/// Roots with `|Im k̄| ≥` this bound are tagged as non-physical.
pub const SPURIOUS_IM_BOUND: f64 = 50.0;

/// Relative size below which a matrix coefficient is treated as zero.
pub const NEGLIGIBLE: f64 = 1e-13;

/// Matrices `Γ⁽ⁿ,ʲ⁾(ω)` for `n ≤ 4`, `j ≤ 2`, of one block.
#[derive(Clone, Debug)]
pub struct GammaStack {
    /// Block of the matrices.
    pub block: Block,
    /// Angular frequency.
    pub omega: f64,
    /// Period `ε`.
    pub epsilon: f64,
    /// `g[n][j] = Γ⁽ⁿ,ʲ⁾`.
    pub g: Vec<Vec<CMatrix>>,
}

/// Assembles every `Γ⁽ⁿ,ʲ⁾` of a block at angular frequency `omega`.
pub fn assemble_gamma(t: &EffectiveTensors, block: Block, omega: f64) -> GammaStack {
    let size = block.size();
    let s = laplace(omega);
    let f = t.operator(block);
    let mut g = vec![vec![CMatrix::zeros(size, size); 3]; 5];
    for j in 0..3 {
        let fl = &f[j + 2];
        for r in 0..size {
            for c in 0..size {
                for (&(kp, sp), &v) in &fl[r][c] {
                    let n = kp as usize;
                    g[n][j][(r, c)] += I.powu(kp) * s.powu(sp) * v;
                }
            }
        }
    }
    GammaStack {
        block,
        omega,
        epsilon: t.epsilon,
        g,
    }
}

impl GammaStack {
    /// `Γ⁽ⁿ,ʲ⁾`.
    pub fn get(&self, n: usize, j: usize) -> &CMatrix {
        &self.g[n][j]
    }

    /// Truncated `Γ⁽ⁿ⁾ = Σ_{j ≤ order} εʲ Γ⁽ⁿ,ʲ⁾`.
    pub fn truncated(&self, n: usize, order: usize) -> CMatrix {
        let mut out = self.g[n][0].clone();
        let mut e = 1.0;
        for j in 1..=order.min(2) {
            e *= self.epsilon;
            out += &self.g[n][j] * C64::new(e, 0.0);
        }
        out
    }

    /// Largest entry of every `ε¹` and `ε²` matrix.
    pub fn higher_order_size(&self) -> f64 {
        self.g
            .iter()
            .flat_map(|row| row[1..].iter())
            .flat_map(|m| m.iter())
            .fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Largest entry of every `ε⁰` matrix.
    pub fn leading_order_size(&self) -> f64 {
        self.g
            .iter()
            .map(|row| &row[0])
            .flat_map(|m| m.iter())
            .fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// One complex wavenumber root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    /// Dimensionless wavenumber `k̄₂ = k₂ ε`.
    pub k: C64,
    /// Relative residual of the scalar dispersion relation.
    pub residual: f64,
    /// False for far-field roots with `|Im k̄₂| ≥ 50`.
    pub physical: bool,
}

/// Roots of the macroscopic dispersion relation at one frequency.
#[derive(Clone, Debug)]
pub struct RootSet {
    /// Roots sorted lexicographically by `(Re, Im)`.
    pub roots: Vec<Root>,
    /// Relative Hausdorff distance between companion eigenvalues and
    /// characteristic-polynomial roots, both Newton-polished.
    pub crosscheck: f64,
    /// Degree of the matrix polynomial actually solved.
    pub degree: usize,
    /// True when the leading coefficient of the requested order vanished
    /// and a lower degree was solved.
    pub degree_reduced: bool,
}

/// Scalar polynomial `det Σ χⁿ Pₙ` of a 1×1 or 2×2 matrix polynomial.
pub fn det_polynomial(coeffs: &[CMatrix]) -> Vec<C64> {
    let size = coeffs[0].nrows();
    let entry = |r: usize, c: usize| -> Vec<C64> { coeffs.iter().map(|m| m[(r, c)]).collect() };
    match size {
        1 => entry(0, 0),
        2 => {
            let a = poly_mul(&entry(0, 0), &entry(1, 1));
            let b = poly_mul(&entry(0, 1), &entry(1, 0));
            poly_add(&a, &b.iter().map(|z| -z).collect::<Vec<_>>())
        }
        _ => unimplemented!("determinant polynomial of blocks larger than 2×2"),
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Block companion matrix of `Σ_{n≤d} σ^{d−n} Pₙ φⁿ`, whose eigenvalues are
/// `φ = σχ` for the roots `χ` of `Σ Pₙ χⁿ`.
pub fn block_companion(coeffs: &[CMatrix], sigma: f64) -> Result<CMatrix> {
    let d = coeffs.len() - 1;
    let m = coeffs[0].nrows();
    let lead = &coeffs[d];
    let mut out = CMatrix::zeros(d * m, d * m);
    for blk in 0..d {
        // First block row entry multiplying φ^{d−1−blk}: −P_d⁻¹ P_{d−1−blk} σ^{blk+1}.
        let rhs = &coeffs[d - 1 - blk] * C64::new(sigma.powi(blk as i32 + 1), 0.0);
        let x = solve(lead, &rhs).ok_or(Error::SingularLeadingBlock(0.0))?;
        for r in 0..m {
            for c in 0..m {
                out[(r, blk * m + c)] = -x[(r, c)];
            }
        }
    }
    for blk in 1..d {
        for i in 0..m {
            out[(blk * m + i, (blk - 1) * m + i)] = C64::new(1.0, 0.0);
        }
    }
    Ok(out)
}

/// Eigenvalues of `m` as roots of Faddeev-LeVerrier characteristic
/// polynomials.
///
/// Trace recursions resolve the large-modulus roots of `m` accurately and
/// lose the small ones when the spectrum is widely spread. The large roots
/// are taken from the polynomial of `m` and the small ones from the
/// reciprocal roots of the polynomial of `m⁻¹`, split at the geometric mean
/// modulus. A singular `m` uses the forward polynomial only.
pub fn characteristic_roots(m: &CMatrix) -> Result<Vec<C64>> {
    let forward = poly_roots(&faddeev_leverrier(m))?;
    let n = forward.len();
    let Some(inv) = m.clone().try_inverse() else {
        return Ok(forward);
    };
    let backward: Vec<C64> = poly_roots(&faddeev_leverrier(&inv))?
        .into_iter()
        .map(|z| z.inv())
        .collect();
    let mean = (forward.iter().map(|z| z.norm().ln()).sum::<f64>() / n as f64).exp();
    if !mean.is_finite() || backward.iter().any(|z| !z.is_finite()) {
        return Ok(forward);
    }
    let mut big: Vec<C64> = forward.into_iter().filter(|z| z.norm() >= mean).collect();
    let mut small = backward;
    small.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    small.truncate(n - big.len());
    big.extend(small);
    Ok(big)
}

/// Scalar polynomial without its negligible leading coefficients; `None`
/// when every coefficient vanishes.
fn trimmed(c: &[C64]) -> Option<Vec<C64>> {
    let scale = c.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return None;
    }
    let top = c.iter().rposition(|z| z.norm() > NEGLIGIBLE * scale)?;
    Some(c[..=top].to_vec())
}

/// Roots of a general matrix polynomial `Σ χⁿ Pₙ` (blocks of size ≤ 2).
///
/// Leading coefficients that are negligible relative to the largest one are
/// dropped before linearizing. A singular leading block falls back to the
/// scalar determinant polynomial with its negligible top coefficients
/// removed. `sigma` scales the companion eigenvalue as
/// `φ = σχ`; `epsilon` converts `χ` to `k̄ = χε`.
pub fn matrix_polynomial_roots(coeffs: &[CMatrix], sigma: f64, epsilon: f64) -> Result<RootSet> {
    let scale = coeffs.iter().map(max_abs).fold(0.0, f64::max);
    let mut d = coeffs.len() - 1;
    while d > 0 && max_abs(&coeffs[d]) <= NEGLIGIBLE * scale {
        d -= 1;
    }
    let degree_reduced = d + 1 < coeffs.len();
    let used = &coeffs[..=d];
    let detp = det_polynomial(used);
    if d == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            crosscheck: 0.0,
            degree: 0,
            degree_reduced,
        });
    }
    let lead_det = used[d].clone().determinant().norm();
    let lead_scale = max_abs(&used[d]).powi(used[d].nrows() as i32);
    let (eig, fl) = if lead_det > 1e-12 * lead_scale {
        let comp = block_companion(used, sigma)?;
        let eig: Vec<C64> = eigenvalues(&comp)?.into_iter().map(|z| z / sigma).collect();
        let fl: Vec<C64> = characteristic_roots(&comp)?.into_iter().map(|z| z / sigma).collect();
        (eig, fl)
    } else {
        let scalar = trimmed(&detp).ok_or(Error::SingularLeadingBlock(lead_det))?;
        if scalar.len() == 1 {
            (Vec::new(), Vec::new())
        } else {
            let scaled: Vec<C64> = scalar
                .iter()
                .enumerate()
                .map(|(n, c)| c * sigma.powi((scalar.len() - 1 - n) as i32))
                .collect();
            let eig: Vec<C64> = eigenvalues(&companion(&scaled))?
                .into_iter()
                .map(|z| z / sigma)
                .collect();
            let fl: Vec<C64> = poly_roots(&scaled)?.into_iter().map(|z| z / sigma).collect();
            (eig, fl)
        }
    };
    let mut chis: Vec<C64> = eig.iter().map(|&z| newton_polish(&detp, z)).collect();
    let fl: Vec<C64> = fl.iter().map(|&z| newton_polish(&detp, z)).collect();
    let crosscheck = relative_hausdorff(&chis, &fl);
    sort_lex(&mut chis);
    let roots = chis
        .into_iter()
        .map(|chi| {
            let k = chi * epsilon;
            Root {
                k,
                residual: relative_residual(&detp, chi),
                physical: k.im.abs() < SPURIOUS_IM_BOUND,
            }
        })
        .collect();
    Ok(RootSet {
        roots,
        crosscheck,
        degree: d,
        degree_reduced,
    })
}

/// Zeroth-order roots: `(Γ⁽⁰,⁰⁾ + χΓ⁽¹,⁰⁾ + χ²Γ⁽²,⁰⁾) P̂ = 0`.
pub fn zeroth_order_roots(stack: &GammaStack) -> Result<RootSet> {
    let coeffs: Vec<CMatrix> = (0..3).map(|n| stack.g[n][0].clone()).collect();
    let lead = coeffs[2].clone().determinant().norm();
    if lead <= 1e-300 {
        return Err(Error::SingularLeadingBlock(lead));
    }
    matrix_polynomial_roots(&coeffs, 1.0, stack.epsilon)
}

/// Second-order roots of `Σ_{n≤4} χⁿ Γ⁽ⁿ⁾` with `Γ⁽ⁿ⁾` truncated at `ε²`,
/// linearized with eigenvalue `φ = ε²χ`.
///
/// When every `ε¹`, `ε²` coefficient is negligible the zeroth-order roots
/// are returned. Vanishing leading coefficients lower the solved degree.
pub fn second_order_roots(stack: &GammaStack) -> Result<RootSet> {
    if stack.higher_order_size() <= 1e-14 * stack.leading_order_size().max(f64::MIN_POSITIVE) {
        return zeroth_order_roots(stack);
    }
    let coeffs: Vec<CMatrix> = (0..5).map(|n| stack.truncated(n, 2)).collect();
    let sigma = stack.epsilon * stack.epsilon;
    matrix_polynomial_roots(&coeffs, sigma, stack.epsilon)
}

/// Zeroth-order matrices of a homogeneous first-order thermoelastic medium
/// with the given overall constants.
pub fn cauchy_gamma(c: &CauchyConstants, block: Block, omega: f64) -> [CMatrix; 3] {
    let s = laplace(omega);
    let z = C64::new(0.0, 0.0);
    match block {
        Block::Shear => [
            CMatrix::from_element(1, 1, -c.rho_eff * s * s),
            CMatrix::from_element(1, 1, z),
            CMatrix::from_element(1, 1, C64::new(-c.c_shear, 0.0)),
        ],
        Block::Coupled => {
            let g0 = CMatrix::from_row_slice(2, 2, &[-c.rho_eff * s * s, z, z, -(c.p_eff * s + c.p0_eff * s * s)]);
            let g1 = CMatrix::from_row_slice(
                2,
                2,
                &[z, -I * (c.alpha_eff + s * c.alpha1_eff), -I * s * c.alpha_eff, z],
            );
            let g2 = CMatrix::from_row_slice(2, 2, &[C64::new(-c.c_eff, 0.0), z, z, C64::new(-c.k_eff, 0.0)]);
            [g0, g1, g2]
        }
    }
}

/// Roots of the first-order (Cauchy) continuum with the given constants.
pub fn cauchy_roots(c: &CauchyConstants, block: Block, omega: f64, epsilon: f64) -> Result<RootSet> {
    matrix_polynomial_roots(&cauchy_gamma(c, block, omega), 1.0, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::{effective_from_cell, first_order_constitutive};
    use crate::material::{from_ratios, DimensionlessGroups};

    fn tensors(g: &DimensionlessGroups) -> EffectiveTensors {
        effective_from_cell(&from_ratios(g).unwrap()).unwrap()
    }

    #[test]
    fn gamma_at_zero_frequency() {
        let t = tensors(&DimensionlessGroups::compressional_thermal());
        let st = assemble_gamma(&t, Block::Coupled, 0.0);
        assert!(max_abs(st.get(0, 0)) == 0.0);
        let g20 = st.get(2, 0);
        assert!((g20[(0, 0)].re + t.n2()).abs() < 1e-15);
        assert!((g20[(1, 1)].re + t.m2()).abs() < 1e-15);
        assert_eq!(g20[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn decoupled_gamma_is_diagonal() {
        let g = DimensionlessGroups {
            alpha1_theta0_over_c1: 0.0,
            alpha2_theta0_over_c2: 0.0,
            ..DimensionlessGroups::compressional_thermal()
        };
        let t = tensors(&g);
        let st = assemble_gamma(&t, Block::Coupled, 0.8);
        for row in &st.g {
            for m in row {
                assert!(m[(0, 1)].norm() < 1e-14 && m[(1, 0)].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn homogeneous_shear_gamma() {
        let t = tensors(&DimensionlessGroups::homogeneous());
        let st = assemble_gamma(&t, Block::Shear, 0.3);
        assert!((st.get(2, 0)[(0, 0)] + 0.5).norm() < 1e-15);
        assert!((st.get(0, 0)[(0, 0)] - C64::new(0.09, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn homogeneous_shear_is_nondispersive() {
        let t = tensors(&DimensionlessGroups::homogeneous());
        let w = 0.1;
        let r = zeroth_order_roots(&assemble_gamma(&t, Block::Shear, w)).unwrap();
        let c = 0.5f64.sqrt();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[1].k - C64::new(w / c, 0.0)).norm() < 1e-14);
        assert!((r.roots[0].k + C64::new(w / c, 0.0)).norm() < 1e-14);
        let r2 = second_order_roots(&assemble_gamma(&t, Block::Shear, w)).unwrap();
        assert_eq!(r2.roots, r.roots);
    }

    #[test]
    fn layered_shear_effective_slope() {
        let t = tensors(&DimensionlessGroups::shear_contrast());
        let w = 0.01;
        let r = zeroth_order_roots(&assemble_gamma(&t, Block::Shear, w)).unwrap();
        let c1 = 0.4f64.sqrt();
        let speed = w / r.roots[1].k.re;
        assert!((speed / c1 - ((4.0 / 3.0) / 1.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn companion_and_characteristic_roots_agree() {
        let t = tensors(&DimensionlessGroups::compressional_thermal());
        for w in [0.1, 0.7, 2.0] {
            let st = assemble_gamma(&t, Block::Coupled, w);
            let r0 = zeroth_order_roots(&st).unwrap();
            assert_eq!(r0.roots.len(), 4);
            assert!(r0.crosscheck < 1e-8, "{}", r0.crosscheck);
            assert!(r0.roots.iter().all(|r| r.residual < 1e-12));
            let r2 = second_order_roots(&st).unwrap();
            assert!(r2.crosscheck < 1e-8, "{}", r2.crosscheck);
            assert!(r2.roots.iter().all(|r| r.residual < 1e-10));
        }
    }

    #[test]
    fn static_second_order_roots_vanish() {
        let t = tensors(&DimensionlessGroups::compressional_thermal());
        for block in [Block::Shear, Block::Coupled] {
            let r = second_order_roots(&assemble_gamma(&t, block, 0.0)).unwrap();
            assert!(!r.roots.is_empty());
            assert!(r.roots.iter().all(|x| x.k.norm() < 1e-6), "{:?}", r.roots);
        }
    }

    #[test]
    fn singular_leading_block_uses_determinant() {
        // diag(1 + χ², 2 + χ) has a singular χ² block; det = (1 + χ²)(2 + χ).
        let m = |a: f64, b: f64| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(a, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(b, 0.0),
                ],
            )
        };
        let r = matrix_polynomial_roots(&[m(1.0, 2.0), m(0.0, 1.0), m(1.0, 0.0)], 1.0, 1.0).unwrap();
        let want = [C64::new(-2.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0)];
        assert_eq!(r.roots.len(), 3);
        for w in want {
            assert!(r.roots.iter().any(|x| (x.k - w).norm() < 1e-14), "{w} missing");
        }
        assert!(r.crosscheck < 1e-12);
    }

    #[test]
    fn zeroth_order_equals_cauchy_continuum() {
        let g = DimensionlessGroups::compressional_thermal();
        let t = tensors(&g);
        let c = first_order_constitutive(&t);
        for w in [0.05, 0.5, 1.5] {
            for b in [Block::Shear, Block::Coupled] {
                let a = zeroth_order_roots(&assemble_gamma(&t, b, w)).unwrap();
                let z = cauchy_roots(&c, b, w, 1.0).unwrap();
                for (x, y) in a.roots.iter().zip(&z.roots) {
                    assert!((x.k - y.k).norm() < 1e-10 * (1.0 + x.k.norm()));
                }
            }
        }
    }

    #[test]
    fn decoupled_roots_come_in_opposite_pairs() {
        let g = DimensionlessGroups {
            alpha1_theta0_over_c1: 0.0,
            alpha2_theta0_over_c2: 0.0,
            ..DimensionlessGroups::compressional_thermal()
        };
        let t = tensors(&g);
        let r = zeroth_order_roots(&assemble_gamma(&t, Block::Coupled, 0.6)).unwrap();
        for x in &r.roots {
            let d = r.roots.iter().map(|y| (x.k + y.k).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9);
        }
    }
}
