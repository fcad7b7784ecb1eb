// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact Floquet-Bloch spectrum of the layered cell by transfer matrices.
//!
//! In each homogeneous layer the physical fields obey a first-order system
//! `y′ = G y` along `x₂`:
//!
//! * shear block, `y = (u₁, σ₁₂)`:
//!   `u₁′ = σ₁₂/C₁₂₁₂`, `σ₁₂′ = ρs²u₁`;
//! * coupled block, `y = (u₂, υ, σ₂₂, q₂)` with
//!   `σ₂₂ = C₂₂₂₂u₂′ − βυ`, `β = α₂₂ + sα⁽¹⁾₂₂`, `q₂ = −K̄₂₂υ′`, `K̄ = θ₀K`:
//!   `u₂′ = (σ₂₂ + βυ)/C₂₂₂₂`, `υ′ = −q₂/K̄₂₂`, `σ₂₂′ = ρs²u₂`,
//!   `q₂′ = −θ₀(sα₂₂u₂′ + (ps + p⁽⁰⁾s²)υ)`.
//!
//! Perfect bonding makes `y` continuous, so the cell transfer matrix is
//! `T = exp(G₂s₂) exp(G₁s₁)`. Bloch waves `y(x + ε) = φ y(x)` give the
//! eigenvalue problem `(T − φI) y = 0` with `φ = exp(ιk₂ε)`.

use crate::cell_problems::Block;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::homogenized::{Root, SPURIOUS_IM_BOUND};
use crate::linalg::{eigenvalues, faddeev_leverrier, poly_roots, relative_hausdorff, sort_lex, CMatrix};
use crate::material::{LayeredCell, PhaseProperties, Theory};
use crate::{laplace, C64, I};

/// First-order state matrix `G` of one layer.
pub fn layer_matrix(phase: &PhaseProperties, theory: Theory, theta0: f64, omega: f64, block: Block) -> CMatrix {
    let s = laplace(omega);
    let r = |x: f64| C64::new(x, 0.0);
    match block {
        Block::Shear => CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0 / phase.c1212), phase.rho * s * s, r(0.0)]),
        Block::Coupled => {
            let (alpha1, p0) = match theory {
                Theory::GreenLindsay => (phase.alpha1_22(), phase.p0()),
                Theory::Classical => (0.0, 0.0),
            };
            let c = phase.c2222;
            let beta = phase.alpha22 + s * alpha1;
            let kbar = theta0 * phase.k22;
            let heat = phase.p * s + p0 * s * s;
            let z = r(0.0);
            CMatrix::from_row_slice(
                4,
                4,
                &[
                    z,
                    beta / c,
                    r(1.0 / c),
                    z,
                    z,
                    z,
                    z,
                    r(-1.0 / kbar),
                    phase.rho * s * s,
                    z,
                    z,
                    z,
                    z,
                    -theta0 * (s * phase.alpha22 * beta / c + heat),
                    -theta0 * s * phase.alpha22 / c,
                    z,
                ],
            )
        }
    }
}

/// Transfer matrices of both blocks across one cell.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    /// Angular frequency.
    pub omega: f64,
    /// Shear block, 2×2.
    pub shear: CMatrix,
    /// Coupled block, 4×4.
    pub coupled: CMatrix,
}

impl TransferMatrix {
    /// Matrix of one block.
    pub fn block(&self, block: Block) -> &CMatrix {
        match block {
            Block::Shear => &self.shear,
            Block::Coupled => &self.coupled,
        }
    }
}

/// Transfer matrix of a single block, `exp(G₂s₂)·exp(G₁s₁)`.
pub fn block_transfer(cell: &LayeredCell, omega: f64, block: Block) -> Result<CMatrix> {
    let g1 = layer_matrix(&cell.phase1, cell.theory, cell.theta0, omega, block);
    let g2 = layer_matrix(&cell.phase2, cell.theory, cell.theta0, omega, block);
    let e1 = expm(&(g1 * C64::new(cell.s1, 0.0)))?;
    let e2 = expm(&(g2 * C64::new(cell.s2, 0.0)))?;
    Ok(e2 * e1)
}

/// Transfer matrices of both blocks.
pub fn transfer_matrix(cell: &LayeredCell, omega: f64) -> Result<TransferMatrix> {
    Ok(TransferMatrix {
        omega,
        shear: block_transfer(cell, omega, Block::Shear)?,
        coupled: block_transfer(cell, omega, Block::Coupled)?,
    })
}

/// Largest relative defect `‖exp(Gh/2)² − exp(Gh)‖ / ‖exp(Gh)‖` over the
/// two layers of a block.
pub fn semigroup_defect(cell: &LayeredCell, omega: f64, block: Block) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (phase, h) in [(&cell.phase1, cell.s1), (&cell.phase2, cell.s2)] {
        let g = layer_matrix(phase, cell.theory, cell.theta0, omega, block);
        let full = expm(&(&g * C64::new(h, 0.0)))?;
        let half = expm(&(&g * C64::new(0.5 * h, 0.0)))?;
        worst = worst.max((&half * &half - &full).norm() / full.norm());
    }
    Ok(worst)
}

/// Folds `Re k̄` into the first Brillouin zone `(−π, π]`.
pub fn fold(k: C64) -> C64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut re = k.re - two_pi * (k.re / two_pi).round();
    if re <= -std::f64::consts::PI {
        re += two_pi;
    }
    if re > std::f64::consts::PI {
        re -= two_pi;
    }
    C64::new(re, k.im)
}

/// Floquet-Bloch roots of one block.
#[derive(Clone, Debug)]
pub struct BlochRoots {
    /// Floquet multipliers `φ`.
    pub multipliers: Vec<C64>,
    /// Roots `k̄₂ = −ι Log φ`, folded into the first zone and sorted.
    pub roots: Vec<Root>,
    /// `|det T − 1|`.
    pub det_defect: f64,
    /// Largest `min_φ′ |φφ′ − 1|` over all multipliers.
    pub reciprocity_defect: f64,
    /// Relative Hausdorff distance between QR eigenvalues and the roots
    /// of the trace-recursion characteristic polynomial.
    pub crosscheck: f64,
}

/// Largest accepted `|det T − 1|`.
pub const MAX_DET_DEFECT: f64 = 1e-6;

/// Eigenvalues of a transfer matrix and the corresponding wavenumbers.
///
/// Fails with [`Error::IllConditionedTransfer`] when `|det T − 1|` exceeds
/// [`MAX_DET_DEFECT`].
pub fn bloch_roots(t: &CMatrix) -> Result<BlochRoots> {
    let det_defect = (t.clone().determinant() - C64::new(1.0, 0.0)).norm();
    if !(det_defect <= MAX_DET_DEFECT) {
        return Err(Error::IllConditionedTransfer {
            det_defect,
            norm: t.norm(),
        });
    }
    let phis = eigenvalues(t)?;
    let charp = faddeev_leverrier(t);
    let other = poly_roots(&charp)?;
    let crosscheck = relative_hausdorff(&phis, &other);
    let reciprocity_defect = phis
        .iter()
        .map(|a| {
            phis.iter()
                .map(|b| (a * b - C64::new(1.0, 0.0)).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let mut ks: Vec<C64> = phis.iter().map(|&phi| fold(-I * phi.ln())).collect();
    sort_lex(&mut ks);
    let roots = ks
        .into_iter()
        .map(|k| {
            let phi = (I * k).exp();
            let det = (t - CMatrix::identity(t.nrows(), t.ncols()) * phi).determinant();
            let scale = t.norm().powi(t.nrows() as i32).max(1.0);
            Root {
                k,
                residual: det.norm() / scale,
                physical: k.im.abs() < SPURIOUS_IM_BOUND,
            }
        })
        .collect();
    Ok(BlochRoots {
        multipliers: phis,
        roots,
        det_defect,
        reciprocity_defect,
        crosscheck,
    })
}

/// Roots of one block at angular frequency `omega`.
pub fn bloch_spectrum(cell: &LayeredCell, omega: f64, block: Block) -> Result<BlochRoots> {
    bloch_roots(&block_transfer(cell, omega, block)?)
}

/// Residual of the closed-form bi-layer shear relation
/// `cos k̄ = cos ω̄₁ cos ω̄₂ − ½(z₁/z₂ + z₂/z₁) sin ω̄₁ sin ω̄₂`
/// with `ω̄ⱼ = ω sⱼ √(ρⱼ/Cⱼ)`, `zⱼ = √(ρⱼCⱼ)`.
pub fn rytov_residual(cell: &LayeredCell, omega: f64, k: C64) -> f64 {
    let (a, b) = (&cell.phase1, &cell.phase2);
    let w1 = omega * cell.s1 * (a.rho / a.c1212).sqrt();
    let w2 = omega * cell.s2 * (b.rho / b.c1212).sqrt();
    let z1 = (a.rho * a.c1212).sqrt();
    let z2 = (b.rho * b.c1212).sqrt();
    let rhs = w1.cos() * w2.cos() - 0.5 * (z1 / z2 + z2 / z1) * w1.sin() * w2.sin();
    (k.cos() - C64::new(rhs, 0.0)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{from_ratios, DimensionlessGroups};

    fn cell_of(g: DimensionlessGroups) -> LayeredCell {
        from_ratios(&g).unwrap()
    }

    #[test]
    fn decoupled_layer_matrix_is_block_diagonal() {
        let cell = cell_of(DimensionlessGroups {
            alpha1_theta0_over_c1: 0.0,
            alpha2_theta0_over_c2: 0.0,
            ..DimensionlessGroups::compressional_thermal()
        });
        let g = layer_matrix(&cell.phase1, cell.theory, 1.0, 0.9, Block::Coupled);
        for (i, j) in [(0, 1), (0, 3), (2, 1), (2, 3), (1, 0), (1, 2), (3, 0), (3, 2)] {
            assert_eq!(g[(i, j)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn static_shear_is_nilpotent() {
        let cell = cell_of(DimensionlessGroups::shear_contrast());
        let g = layer_matrix(&cell.phase1, cell.theory, 1.0, 0.0, Block::Shear);
        assert_eq!(&g * &g, CMatrix::zeros(2, 2));
        let t = block_transfer(&cell, 0.0, Block::Shear).unwrap();
        let want = cell.s1 / cell.phase1.c1212 + cell.s2 / cell.phase2.c1212;
        assert!((t[(0, 1)].re - want).abs() < 1e-15);
        assert_eq!(t[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(t[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn shear_layer_eigenvalues() {
        let cell = cell_of(DimensionlessGroups::shear_contrast());
        let w = 1.3;
        let g = layer_matrix(&cell.phase2, cell.theory, 1.0, w, Block::Shear);
        let mut e = eigenvalues(&g).unwrap();
        sort_lex(&mut e);
        let want = w * (cell.phase2.rho / cell.phase2.c1212).sqrt();
        assert!((e[1] - C64::new(0.0, want)).norm() < 1e-14);
        assert!((e[0] + C64::new(0.0, want)).norm() < 1e-14);
    }

    #[test]
    fn homogeneous_cell_transfer_is_single_exponential() {
        let cell = cell_of(DimensionlessGroups::compressional_thermal().clone());
        let h = LayeredCell {
            phase2: cell.phase1.clone(),
            ..cell
        };
        let t = block_transfer(&h, 0.7, Block::Coupled).unwrap();
        let g = layer_matrix(&h.phase1, h.theory, 1.0, 0.7, Block::Coupled);
        let e = expm(&(g * C64::new(1.0, 0.0))).unwrap();
        assert!((t - &e).norm() < 1e-13 * e.norm());
    }

    #[test]
    fn unimodular_and_reciprocal() {
        let cell = cell_of(DimensionlessGroups::compressional_thermal());
        for w in [0.1, 1.0, 3.0] {
            for b in [Block::Shear, Block::Coupled] {
                let r = bloch_spectrum(&cell, w, b).unwrap();
                assert!(r.det_defect < 1e-10);
                assert!(r.reciprocity_defect < 1e-8);
                assert!(r.crosscheck < 1e-8);
            }
        }
    }

    #[test]
    fn zero_frequency_root_is_zero() {
        let cell = cell_of(DimensionlessGroups::shear_contrast());
        let r = bloch_spectrum(&cell, 0.0, Block::Shear).unwrap();
        assert!(r.roots.iter().all(|x| x.k.norm() < 1e-7));
    }

    #[test]
    fn non_unimodular_transfer_is_rejected() {
        let t = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1e20, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(bloch_roots(&t), Err(Error::IllConditionedTransfer { .. })));
    }

    #[test]
    fn fold_is_periodic() {
        let k = C64::new(1.3, 0.4);
        let two_pi = 2.0 * std::f64::consts::PI;
        for m in [-3.0, -1.0, 1.0, 5.0] {
            let d = fold(k) - fold(k + m * two_pi);
            assert!(d.norm() < 8.0 * f64::EPSILON * (1.0 + m.abs()) * two_pi);
        }
        assert!(fold(C64::new(-3.0, 0.0)).re == -3.0);
        assert_eq!(fold(C64::new(std::f64::consts::PI, 0.0)).re, std::f64::consts::PI);
    }

    #[test]
    fn rytov_holds_in_pass_and_stop_bands() {
        let cell = cell_of(DimensionlessGroups::shear_contrast());
        for w in [0.5, 2.0, 3.5, 5.0] {
            let r = bloch_spectrum(&cell, w, Block::Shear).unwrap();
            for x in &r.roots {
                assert!(rytov_residual(&cell, w, x.k) < 1e-10);
            }
        }
    }
}
