// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact piecewise-polynomial algebra on the two-layer periodic unit cell.
//!
//! The unit cell is the interval `ξ₂ ∈ [0, 1)` split into layer 1 of
//! normalized thickness `s̄₁` followed by layer 2 of thickness `s̄₂ = 1 − s̄₁`.
//! Each layer carries one polynomial written in a local coordinate centered
//! at the middle of the layer, `t ∈ [−s̄ⱼ/2, s̄ⱼ/2]`. Means, derivatives and
//! products are computed in closed form; there is no sampling grid.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Dense real polynomial; coefficient `i` multiplies `tⁱ`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    /// Constant polynomial.
    pub fn constant(c: f64) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// Builds a polynomial from coefficients in increasing degree.
    pub fn from_coeffs(c: &[f64]) -> Self {
        Poly(c.to_vec()).trimmed()
    }

    /// Coefficients in increasing degree (no trailing zeros).
    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// Coefficient of `tⁱ` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    /// Polynomial degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    fn trimmed(mut self) -> Self {
        while matches!(self.0.last(), Some(&c) if c == 0.0) {
            self.0.pop();
        }
        self
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Multiplies every coefficient by `a`.
    pub fn scale(&self, a: f64) -> Self {
        Poly(self.0.iter().map(|c| c * a).collect()).trimmed()
    }

    /// First derivative.
    pub fn derivative(&self) -> Self {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()).trimmed()
    }

    /// Antiderivative vanishing at `t = 0`.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![0.0; self.0.len() + 1];
        for (i, &c) in self.0.iter().enumerate() {
            out[i + 1] = c / (i + 1) as f64;
        }
        Poly(out).trimmed()
    }

    /// Exact integral over the centered interval `[−h/2, h/2]`.
    pub fn integral_centered(&self, h: f64) -> f64 {
        let half = 0.5 * h;
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(i, &c)| 2.0 * c * half.powi(i as i32 + 1) / (i + 1) as f64)
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect()).trimmed()
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect()).trimmed()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }
}

/// A function on the periodic two-layer cell given by one polynomial per layer
/// in the layer's centered local coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    s1: f64,
    s2: f64,
    layers: [Poly; 2],
}

impl PiecewisePoly {
    /// Builds a piecewise polynomial on the partition `(s̄₁, s̄₂)`.
    pub fn new(s1: f64, s2: f64, layer1: Poly, layer2: Poly) -> Self {
        PiecewisePoly {
            s1,
            s2,
            layers: [layer1, layer2],
        }
    }

    /// The zero function on the partition.
    pub fn zero(s1: f64, s2: f64) -> Self {
        Self::new(s1, s2, Poly::zero(), Poly::zero())
    }

    /// A piecewise-constant function.
    pub fn constant(s1: f64, s2: f64, c1: f64, c2: f64) -> Self {
        Self::new(s1, s2, Poly::constant(c1), Poly::constant(c2))
    }

    /// The centered local coordinate `t` on both layers.
    pub fn local_coordinate(s1: f64, s2: f64) -> Self {
        let t = Poly::from_coeffs(&[0.0, 1.0]);
        Self::new(s1, s2, t.clone(), t)
    }

    /// Normalized layer thicknesses `(s̄₁, s̄₂)`.
    pub fn partition(&self) -> (f64, f64) {
        (self.s1, self.s2)
    }

    /// Polynomial on layer `j ∈ {0, 1}`.
    pub fn layer(&self, j: usize) -> &Poly {
        &self.layers[j]
    }

    /// Maximum polynomial degree over both layers.
    pub fn degree(&self) -> usize {
        self.layers[0].degree().max(self.layers[1].degree())
    }

    /// True when both layer polynomials are identically zero.
    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(Poly::is_zero)
    }

    /// Largest coefficient magnitude, a cheap scale for tolerances.
    pub fn max_coeff(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|p| p.0.iter())
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    fn same_partition(&self, other: &Self) -> bool {
        self.s1 == other.s1 && self.s2 == other.s2
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_partition(other) {
            Ok(())
        } else {
            Err(Error::PartitionMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert!(
            self.same_partition(other),
            "piecewise polynomials on different partitions"
        );
        PiecewisePoly {
            s1: self.s1,
            s2: self.s2,
            layers: [
                f(&self.layers[0], &other.layers[0]),
                f(&self.layers[1], &other.layers[1]),
            ],
        }
    }

    fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        PiecewisePoly {
            s1: self.s1,
            s2: self.s2,
            layers: [f(&self.layers[0]), f(&self.layers[1])],
        }
    }

    /// Checked sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    /// Checked product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    /// Multiplies by a scalar.
    pub fn scale(&self, a: f64) -> Self {
        self.map(|p| p.scale(a))
    }

    /// Derivative with respect to the fast variable, layer by layer.
    pub fn derivative(&self) -> Self {
        self.map(Poly::derivative)
    }

    /// Exact cell mean `⟨f⟩ = ∫₀¹ f dξ₂` (the normalized cell has unit length).
    pub fn cell_mean(&self) -> f64 {
        (self.layers[0].integral_centered(self.s1) + self.layers[1].integral_centered(self.s2)) / (self.s1 + self.s2)
    }

    /// Values at the two ends of layer `j`: `(left edge, right edge)`.
    pub fn edge_values(&self, j: usize) -> (f64, f64) {
        let h = if j == 0 { self.s1 } else { self.s2 };
        (self.layers[j].eval(-0.5 * h), self.layers[j].eval(0.5 * h))
    }

    /// Weighted jumps `left − right` at the internal interface (layer 1 | layer 2)
    /// and at the periodic boundary (layer 2 | layer 1 of the next cell).
    pub fn interface_jump(&self, weight1: f64, weight2: f64) -> (f64, f64) {
        let (l1, r1) = self.edge_values(0);
        let (l2, r2) = self.edge_values(1);
        (weight1 * r1 - weight2 * l2, weight2 * r2 - weight1 * l1)
    }

    /// Maps a global coordinate (wrapped into `[0, 1)`) to `(layer, t)`.
    pub fn locate(&self, xi: f64) -> (usize, f64) {
        let period = self.s1 + self.s2;
        let x = xi.rem_euclid(period);
        if x <= self.s1 {
            (0, x - 0.5 * self.s1)
        } else {
            (1, x - self.s1 - 0.5 * self.s2)
        }
    }

    /// Evaluates at the global coordinate `ξ₂` (periodically extended).
    pub fn eval(&self, xi: f64) -> f64 {
        let (j, t) = self.locate(xi);
        self.layers[j].eval(t)
    }

    /// Evaluates on layer `j` at local coordinate `t`.
    pub fn eval_local(&self, j: usize, t: f64) -> f64 {
        self.layers[j].eval(t)
    }

    /// Samples `n ≥ 2` equally spaced points over the closed cell `[0, 1]`.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let period = self.s1 + self.s2;
        (0..n)
            .map(|i| {
                let xi = period * i as f64 / (n - 1) as f64;
                let (j, t) = if i == n - 1 {
                    (1, 0.5 * self.s2)
                } else {
                    self.locate(xi)
                };
                (xi, self.layers[j].eval(t))
            })
            .collect()
    }
}

impl Add for &PiecewisePoly {
    type Output = PiecewisePoly;
    fn add(self, rhs: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &PiecewisePoly {
    type Output = PiecewisePoly;
    fn sub(self, rhs: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &PiecewisePoly {
    type Output = PiecewisePoly;
    fn mul(self, rhs: &PiecewisePoly) -> PiecewisePoly {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Neg for &PiecewisePoly {
    type Output = PiecewisePoly;
    fn neg(self) -> PiecewisePoly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(c1: &[f64], c2: &[f64]) -> PiecewisePoly {
        PiecewisePoly::new(0.5, 0.5, Poly::from_coeffs(c1), Poly::from_coeffs(c2))
    }

    #[test]
    fn add_zero_and_multiply_one_are_identities() {
        let p = pp(&[1.0, 2.0, 3.0], &[-1.0, 0.5]);
        let zero = PiecewisePoly::zero(0.5, 0.5);
        let one = PiecewisePoly::constant(0.5, 0.5, 1.0, 1.0);
        assert_eq!(&p + &zero, p);
        assert_eq!(&p * &one, p);
    }

    #[test]
    fn squaring_the_local_coordinate() {
        let t = PiecewisePoly::local_coordinate(0.3, 0.7);
        let sq = &t * &t;
        assert_eq!(sq.layer(0).coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(sq.layer(1).coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn derivative_of_constant_and_square() {
        let c = PiecewisePoly::constant(0.5, 0.5, 3.0, -2.0);
        assert!(c.derivative().is_zero());
        let t = PiecewisePoly::local_coordinate(0.5, 0.5);
        let d = (&t * &t).derivative();
        assert_eq!(d.layer(0).coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn cell_mean_of_constant_and_odd_functions() {
        let c = PiecewisePoly::constant(0.25, 0.75, 2.0, 2.0);
        assert!((c.cell_mean() - 2.0).abs() < 1e-15);
        let t = PiecewisePoly::local_coordinate(0.5, 0.5);
        assert_eq!(t.cell_mean(), 0.0);
        // ∫ t² over [−h/2, h/2] = h³/12.
        let sq = &t * &t;
        assert!((sq.cell_mean() - 2.0 * 0.125 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn step_function_jumps() {
        let step = PiecewisePoly::constant(0.5, 0.5, 1.0, 0.0);
        assert_eq!(step.interface_jump(1.0, 1.0), (1.0, -1.0));
        let tent = pp(&[0.0, 1.0], &[0.0, -1.0]);
        assert_eq!(tent.interface_jump(1.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn partition_mismatch_is_reported() {
        let a = PiecewisePoly::zero(0.5, 0.5);
        let b = PiecewisePoly::zero(0.4, 0.6);
        assert_eq!(a.try_add(&b), Err(Error::PartitionMismatch));
        assert!(a.try_mul(&a).is_ok());
    }

    #[test]
    fn global_evaluation_wraps_periodically() {
        let p = pp(&[1.0, 1.0], &[5.0]);
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(1.25), 1.0);
        assert_eq!(p.eval(0.75), 5.0);
        let s = p.samples(3);
        assert_eq!(s[0], (0.0, 0.75));
        assert_eq!(s[2], (1.0, 5.0));
    }
}
