// SPDX-License-Identifier: MIT OR Apache-2.0

//! Bi-phase layered material description, validation and nondimensionalization.
//!
//! The cell is periodic along `x₂` with layer 1 of thickness `s₁` followed by
//! layer 2 of thickness `s₂`; `ε = s₁ + s₂` and `η = s₁/s₂`. Both phases are
//! orthotropic with axis `e₁`. Thermal quantities follow the Green-Lindsay
//! model with relaxation times `τ₀` (heat-capacity term) and `τ₁`
//! (thermal-stress term).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `(E, ν)` of an isotropic phase are mapped to the in-plane pair `(Ẽ, ν̃)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneMode {
    /// `Ẽ = E/(1−ν²)`, `ν̃ = ν/(1−ν)`.
    #[default]
    Strain,
    /// `Ẽ = E`, `ν̃ = ν`.
    Stress,
}

impl PlaneMode {
    /// Maps `(E, ν)` to `(Ẽ, ν̃)`.
    pub fn effective(self, e: f64, nu: f64) -> (f64, f64) {
        match self {
            PlaneMode::Strain => (e / (1.0 - nu * nu), nu / (1.0 - nu)),
            PlaneMode::Stress => (e, nu),
        }
    }
}

/// Thermoelastic theory used when building field equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theory {
    /// Two relaxation times enter through `α⁽¹⁾ = α·τ₁` and `p⁽⁰⁾ = p·τ₀`.
    #[default]
    GreenLindsay,
    /// Classical coupled thermoelasticity: `α⁽¹⁾` and `p⁽⁰⁾` are forced to zero.
    Classical,
}

/// Constants of one homogeneous orthotropic layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseProperties {
    /// Elastic modulus `C₁₁₁₁` [Pa].
    pub c1111: f64,
    /// Elastic modulus `C₂₂₂₂` [Pa].
    pub c2222: f64,
    /// Elastic modulus `C₁₁₂₂` [Pa].
    pub c1122: f64,
    /// Elastic modulus `C₁₂₁₂` [Pa].
    pub c1212: f64,
    /// Stress-temperature coupling `α₁₁` [Pa/K].
    pub alpha11: f64,
    /// Stress-temperature coupling `α₂₂` [Pa/K].
    pub alpha22: f64,
    /// Relaxation time `τ₀` [s].
    pub tau0: f64,
    /// Relaxation time `τ₁` [s].
    pub tau1: f64,
    /// Mass density [kg/m³].
    pub rho: f64,
    /// Conductivity over reference temperature `K₁₁ = K̄₁₁/θ₀` [W/(m·K²)].
    pub k11: f64,
    /// Conductivity over reference temperature `K₂₂ = K̄₂₂/θ₀` [W/(m·K²)].
    pub k22: f64,
    /// Specific-heat group `ρ C_E/θ₀` [J/(m³·K²)].
    pub p: f64,
}

impl PhaseProperties {
    /// Isotropic in-plane moduli from `(Ẽ, ν̃)`:
    /// `C₁₁₁₁ = C₂₂₂₂ = Ẽ/(1−ν̃²)`, `C₁₁₂₂ = Ẽν̃/(1−ν̃²)`, `C₁₂₁₂ = Ẽ/(2(1+ν̃))`.
    pub fn isotropic_moduli(e_tilde: f64, nu_tilde: f64) -> [f64; 4] {
        let d = 1.0 - nu_tilde * nu_tilde;
        [
            e_tilde / d,
            e_tilde / d,
            e_tilde * nu_tilde / d,
            e_tilde / (2.0 * (1.0 + nu_tilde)),
        ]
    }

    /// Derived `α⁽¹⁾₁₁ = α₁₁·τ₁`.
    pub fn alpha1_11(&self) -> f64 {
        self.alpha11 * self.tau1
    }

    /// Derived `α⁽¹⁾₂₂ = α₂₂·τ₁`.
    pub fn alpha1_22(&self) -> f64 {
        self.alpha22 * self.tau1
    }

    /// Derived `p⁽⁰⁾ = p·τ₀`.
    pub fn p0(&self) -> f64 {
        self.p * self.tau0
    }

    /// Invariant violations of this phase, each naming the field and bound.
    pub fn violations(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{label}.{name} must be > 0 (got {v})"));
            }
        };
        positive("c1111", self.c1111);
        positive("c2222", self.c2222);
        positive("c1212", self.c1212);
        positive("rho", self.rho);
        positive("p", self.p);
        positive("k22", self.k22);
        if !(self.c1111 * self.c2222 - self.c1122 * self.c1122 > 0.0) {
            out.push(format!(
                "{label}.c1122 must satisfy c1111*c2222 - c1122^2 > 0 (got {})",
                self.c1111 * self.c2222 - self.c1122 * self.c1122
            ));
        }
        for (name, v) in [("tau0", self.tau0), ("tau1", self.tau1)] {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(format!("{label}.{name} must be >= 0 (got {v})"));
            }
        }
        for (name, v) in [("alpha11", self.alpha11), ("alpha22", self.alpha22), ("k11", self.k11)] {
            if !v.is_finite() {
                out.push(format!("{label}.{name} must be finite (got {v})"));
            }
        }
        out
    }
}

/// A periodic cell made of two perfectly bonded layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredCell {
    /// Layer 1 constants.
    pub phase1: PhaseProperties,
    /// Layer 2 constants.
    pub phase2: PhaseProperties,
    /// Thickness of layer 1 [m].
    pub s1: f64,
    /// Thickness of layer 2 [m].
    pub s2: f64,
    /// Period `ε = s₁ + s₂` [m].
    pub epsilon: f64,
    /// Thickness ratio `η = s₁/s₂`.
    pub eta: f64,
    /// Reference temperature [K].
    pub theta0: f64,
    /// Thermoelastic theory used by the field equations.
    #[serde(default)]
    pub theory: Theory,
}

impl LayeredCell {
    /// Builds and validates a cell from two phases and layer thicknesses.
    pub fn new(phase1: PhaseProperties, phase2: PhaseProperties, s1: f64, s2: f64, theta0: f64) -> Result<Self> {
        let cell = LayeredCell {
            phase1,
            phase2,
            s1,
            s2,
            epsilon: s1 + s2,
            eta: s1 / s2,
            theta0,
            theory: Theory::GreenLindsay,
        };
        let v = validate(&cell);
        if v.is_empty() {
            Ok(cell)
        } else {
            Err(Error::InvalidCell(v))
        }
    }

    /// The same cell with `α⁽¹⁾` and `p⁽⁰⁾` explicitly zeroed.
    pub fn classical(&self) -> Self {
        LayeredCell {
            theory: Theory::Classical,
            ..self.clone()
        }
    }

    /// Phase `j ∈ {0, 1}`.
    pub fn phase(&self, j: usize) -> &PhaseProperties {
        if j == 0 {
            &self.phase1
        } else {
            &self.phase2
        }
    }

    /// Normalized thicknesses `(s̄₁, s̄₂) = (s₁/ε, s₂/ε)`.
    pub fn fractions(&self) -> (f64, f64) {
        (self.s1 / self.epsilon, self.s2 / self.epsilon)
    }

    /// `α⁽¹⁾₂₂` of phase `j` under the selected theory.
    pub fn alpha1_22(&self, j: usize) -> f64 {
        match self.theory {
            Theory::GreenLindsay => self.phase(j).alpha1_22(),
            Theory::Classical => 0.0,
        }
    }

    /// `p⁽⁰⁾` of phase `j` under the selected theory.
    pub fn p0(&self, j: usize) -> f64 {
        match self.theory {
            Theory::GreenLindsay => self.phase(j).p0(),
            Theory::Classical => 0.0,
        }
    }

    /// True when the two phases carry identical constants.
    pub fn is_homogeneous(&self) -> bool {
        self.phase1 == self.phase2
    }

    /// Reference frequency scale `√(C¹₂₂₂₂/ρ¹)/ε`, so that `ω̄ = ω / scale`.
    pub fn frequency_scale(&self) -> f64 {
        (self.phase1.c2222 / self.phase1.rho).sqrt() / self.epsilon
    }

    /// Dimensional angular frequency for a dimensionless `ω̄`.
    pub fn omega_from_bar(&self, omega_bar: f64) -> f64 {
        omega_bar * self.frequency_scale()
    }

    /// Dimensionless `ω̄ = ωε√(ρ¹/C¹₂₂₂₂)`.
    pub fn omega_bar(&self, omega: f64) -> f64 {
        omega / self.frequency_scale()
    }

    /// The same cell in units where `C¹₂₂₂₂ = ρ¹ = ε = θ₀ = 1`.
    ///
    /// Length is measured in `ε`, time in `ε√(ρ¹/C¹₂₂₂₂)`, mass in `ρ¹ε³`
    /// and temperature in `θ₀`, so `ω̄` and `k̄ = kε` are unchanged.
    pub fn nondimensional(&self) -> LayeredCell {
        let l = self.epsilon;
        let c = self.phase1.c2222;
        let rho = self.phase1.rho;
        let theta = self.theta0;
        let time = l * (rho / c).sqrt();
        let conduction = rho * l.powi(4) / time.powi(3) / (theta * theta);
        let scale = |p: &PhaseProperties| PhaseProperties {
            c1111: p.c1111 / c,
            c2222: p.c2222 / c,
            c1122: p.c1122 / c,
            c1212: p.c1212 / c,
            alpha11: p.alpha11 * theta / c,
            alpha22: p.alpha22 * theta / c,
            tau0: p.tau0 / time,
            tau1: p.tau1 / time,
            rho: p.rho / rho,
            k11: p.k11 / conduction,
            k22: p.k22 / conduction,
            p: p.p * theta * theta / c,
        };
        LayeredCell {
            phase1: scale(&self.phase1),
            phase2: scale(&self.phase2),
            s1: self.s1 / l,
            s2: self.s2 / l,
            epsilon: 1.0,
            eta: self.eta,
            theta0: 1.0,
            theory: self.theory,
        }
    }
}

/// Lists every violated invariant of the cell; empty when valid.
pub fn validate(cell: &LayeredCell) -> Vec<String> {
    let mut out = cell.phase1.violations("phase1");
    out.extend(cell.phase2.violations("phase2"));
    for (name, v) in [("s1", cell.s1), ("s2", cell.s2), ("theta0", cell.theta0)] {
        if !(v > 0.0 && v.is_finite()) {
            out.push(format!("cell.{name} must be > 0 (got {v})"));
        }
    }
    if cell.epsilon != cell.s1 + cell.s2 {
        out.push(format!(
            "cell.epsilon must equal s1 + s2 = {} (got {})",
            cell.s1 + cell.s2,
            cell.epsilon
        ));
    }
    if cell.s2 > 0.0 {
        let eta = cell.s1 / cell.s2;
        if !((cell.eta - eta).abs() <= 1e-14 * eta.abs()) {
            out.push(format!("cell.eta must equal s1/s2 = {eta} to 1e-14 (got {})", cell.eta));
        }
    }
    out
}

/// The dimensionless groups that fully determine a cell under the
/// normalization `C¹₂₂₂₂ = ρ¹ = ε = θ₀ = 1`.
///
/// The two groups `kbar1` and `p1` fix the absolute thermal scales of
/// phase 1, which the ratio groups alone leave undetermined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessGroups {
    /// `p²/p¹`.
    pub p_ratio: f64,
    /// `C²₂₂₂₂/C¹₂₂₂₂`.
    pub c2222_ratio: f64,
    /// `ρ²/ρ¹`.
    pub rho_ratio: f64,
    /// `K̄²₂₂/K̄¹₂₂`.
    pub kbar_ratio: f64,
    /// `α¹₂₂θ₀/C¹₂₂₂₂`.
    pub alpha1_theta0_over_c1: f64,
    /// `α²₂₂θ₀/C²₂₂₂₂`.
    pub alpha2_theta0_over_c2: f64,
    /// `τ¹₀√(C¹₂₂₂₂/ρ¹)/ε`.
    pub tau0_1: f64,
    /// `τ¹₁√(C¹₂₂₂₂/ρ¹)/ε`.
    pub tau1_1: f64,
    /// `τ²₀/τ¹₀` (must be 1 when `τ¹₀ = 0`).
    pub tau0_ratio: f64,
    /// `τ²₁/τ¹₁` (must be 1 when `τ¹₁ = 0`).
    pub tau1_ratio: f64,
    /// In-plane Poisson ratio `ν̃` of phase 1.
    pub nu1: f64,
    /// In-plane Poisson ratio `ν̃` of phase 2.
    pub nu2: f64,
    /// Thickness ratio `η = s₁/s₂`.
    pub eta: f64,
    /// `K̄¹₂₂θ₀/(ε C¹₂₂₂₂ √(C¹₂₂₂₂/ρ¹))`.
    pub kbar1: f64,
    /// `p¹θ₀²/C¹₂₂₂₂`.
    pub p1: f64,
}

impl DimensionlessGroups {
    /// Every ratio equal to one: a homogeneous cell.
    pub fn homogeneous() -> Self {
        DimensionlessGroups {
            p_ratio: 1.0,
            c2222_ratio: 1.0,
            rho_ratio: 1.0,
            kbar_ratio: 1.0,
            alpha1_theta0_over_c1: 0.0,
            alpha2_theta0_over_c2: 0.0,
            tau0_1: 0.0,
            tau1_1: 0.0,
            tau0_ratio: 1.0,
            tau1_ratio: 1.0,
            nu1: 0.0,
            nu2: 0.0,
            eta: 1.0,
            kbar1: 1.0,
            p1: 1.0,
        }
    }

    /// Compressional-thermal example set: `p²/p¹ = 3`, `C²/C¹ = 2`, `ρ²/ρ¹ = 3`,
    /// `K̄²/K̄¹ = 3`, `ν̃ = 0.2`, coupling groups `1/100` and `1/10`,
    /// `τ¹₀ = 1`, `τ¹₁ = 3`, relaxation-time ratios 2, `η = 1`.
    pub fn compressional_thermal() -> Self {
        DimensionlessGroups {
            p_ratio: 3.0,
            c2222_ratio: 2.0,
            rho_ratio: 3.0,
            kbar_ratio: 3.0,
            alpha1_theta0_over_c1: 0.01,
            alpha2_theta0_over_c2: 0.1,
            tau0_1: 1.0,
            tau1_1: 3.0,
            tau0_ratio: 2.0,
            tau1_ratio: 2.0,
            nu1: 0.2,
            nu2: 0.2,
            eta: 1.0,
            kbar1: 1.0,
            p1: 1.0,
        }
    }

    /// The compressional-thermal set with `η = 10` and `K̄¹` scaled by `η`.
    pub fn thick_layer() -> Self {
        DimensionlessGroups {
            eta: 10.0,
            kbar1: 10.0,
            p1: 1.0,
            ..Self::compressional_thermal()
        }
    }

    /// Shear example set: `C²₁₂₁₂/C¹₁₂₁₂ = 2`, `ρ²/ρ¹ = 2`, `η = 1`, `ν̃ = 0.2`.
    pub fn shear_contrast() -> Self {
        DimensionlessGroups {
            rho_ratio: 2.0,
            ..Self::compressional_thermal()
        }
    }

    /// Relaxation-time study: the compressional-thermal set with equal
    /// relaxation times in both phases, `τ¹₀ = τ¹₁ = tau`.
    pub fn equal_relaxation(tau: f64) -> Self {
        DimensionlessGroups {
            tau0_1: tau,
            tau1_1: tau,
            tau0_ratio: 1.0,
            tau1_ratio: 1.0,
            ..Self::compressional_thermal()
        }
    }

    /// Perturbation-function plot set: `ν̃ = 0.3`, `η = 1`, `K̄²/K̄¹ = 3`, `C²/C¹ = 2`.
    pub fn poisson_three_tenths() -> Self {
        DimensionlessGroups {
            nu1: 0.3,
            nu2: 0.3,
            ..Self::compressional_thermal()
        }
    }

    fn as_array(&self) -> [(&'static str, f64); 15] {
        [
            ("p_ratio", self.p_ratio),
            ("c2222_ratio", self.c2222_ratio),
            ("rho_ratio", self.rho_ratio),
            ("kbar_ratio", self.kbar_ratio),
            ("alpha1_theta0_over_c1", self.alpha1_theta0_over_c1),
            ("alpha2_theta0_over_c2", self.alpha2_theta0_over_c2),
            ("tau0_1", self.tau0_1),
            ("tau1_1", self.tau1_1),
            ("tau0_ratio", self.tau0_ratio),
            ("tau1_ratio", self.tau1_ratio),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("eta", self.eta),
            ("kbar1", self.kbar1),
            ("p1", self.p1),
        ]
    }

    /// Named values in a fixed order, for reports and comparisons.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        self.as_array().to_vec()
    }
}

/// Builds the dimensional cell for a set of groups under the normalization
/// `C¹₂₂₂₂ = ρ¹ = ε = θ₀ = 1`. Isotropic in-plane moduli come from `ν̃`,
/// `α₁₁` defaults to `α₂₂` and `K₁₁` to `K₂₂`.
pub fn from_ratios(g: &DimensionlessGroups) -> Result<LayeredCell> {
    for (name, v) in g.as_array() {
        if !v.is_finite() {
            return Err(Error::InconsistentRatios(format!("{name} is not finite")));
        }
    }
    for (name, nu) in [("nu1", g.nu1), ("nu2", g.nu2)] {
        if !(nu > -1.0 && nu < 0.5) {
            return Err(Error::InconsistentRatios(format!(
                "{name} must lie in (-1, 0.5) (got {nu})"
            )));
        }
    }
    for (name, base, ratio) in [("tau0", g.tau0_1, g.tau0_ratio), ("tau1", g.tau1_1, g.tau1_ratio)] {
        if base == 0.0 && ratio != 1.0 {
            return Err(Error::InconsistentRatios(format!(
                "{name}_ratio = {ratio} requested with zero base relaxation time; use 1"
            )));
        }
    }
    if !(g.eta > 0.0) {
        return Err(Error::InconsistentRatios(format!("eta must be > 0 (got {})", g.eta)));
    }
    let phase =
        |c2222: f64, nu: f64, alpha_over_c: f64, rho: f64, k: f64, p: f64, tau0: f64, tau1: f64| -> PhaseProperties {
            let e_tilde = c2222 * (1.0 - nu * nu);
            let [c1111, _, c1122, c1212] = PhaseProperties::isotropic_moduli(e_tilde, nu);
            let alpha = alpha_over_c * c2222;
            PhaseProperties {
                c1111,
                c2222,
                c1122,
                c1212,
                alpha11: alpha,
                alpha22: alpha,
                tau0,
                tau1,
                rho,
                k11: k,
                k22: k,
                p,
            }
        };
    let p1 = phase(
        1.0,
        g.nu1,
        g.alpha1_theta0_over_c1,
        1.0,
        g.kbar1,
        g.p1,
        g.tau0_1,
        g.tau1_1,
    );
    let p2 = phase(
        g.c2222_ratio,
        g.nu2,
        g.alpha2_theta0_over_c2,
        g.rho_ratio,
        g.kbar1 * g.kbar_ratio,
        g.p1 * g.p_ratio,
        g.tau0_1 * g.tau0_ratio,
        g.tau1_1 * g.tau1_ratio,
    );
    for (i, ph) in [&p1, &p2].into_iter().enumerate() {
        if !(ph.c1111 * ph.c2222 - ph.c1122 * ph.c1122 > 0.0 && ph.c1212 > 0.0 && ph.c2222 > 0.0) {
            return Err(Error::NonPositiveDefinite {
                phase: i + 1,
                detail: format!(
                    "c1111={}, c2222={}, c1122={}, c1212={}",
                    ph.c1111, ph.c2222, ph.c1122, ph.c1212
                ),
            });
        }
    }
    let s1 = g.eta / (1.0 + g.eta);
    let s2 = 1.0 / (1.0 + g.eta);
    let mut cell = LayeredCell {
        phase1: p1,
        phase2: p2,
        s1,
        s2,
        epsilon: s1 + s2,
        eta: g.eta,
        theta0: 1.0,
        theory: Theory::GreenLindsay,
    };
    // Keep η bit-exact with the requested group even when s1/s2 rounds.
    if (cell.eta - s1 / s2).abs() > 1e-14 * cell.eta {
        cell.eta = s1 / s2;
    }
    let v = validate(&cell);
    if v.is_empty() {
        Ok(cell)
    } else {
        Err(Error::InvalidCell(v))
    }
}

/// Reads the dimensionless groups back from a dimensional cell.
pub fn extract_ratios(cell: &LayeredCell) -> DimensionlessGroups {
    let (a, b) = (&cell.phase1, &cell.phase2);
    let vel = (a.c2222 / a.rho).sqrt();
    let ratio = |num: f64, den: f64| if den == 0.0 { 1.0 } else { num / den };
    DimensionlessGroups {
        p_ratio: b.p / a.p,
        c2222_ratio: b.c2222 / a.c2222,
        rho_ratio: b.rho / a.rho,
        kbar_ratio: b.k22 / a.k22,
        alpha1_theta0_over_c1: a.alpha22 * cell.theta0 / a.c2222,
        alpha2_theta0_over_c2: b.alpha22 * cell.theta0 / b.c2222,
        tau0_1: a.tau0 * vel / cell.epsilon,
        tau1_1: a.tau1 * vel / cell.epsilon,
        tau0_ratio: ratio(b.tau0, a.tau0),
        tau1_ratio: ratio(b.tau1, a.tau1),
        nu1: a.c1122 / a.c2222,
        nu2: b.c1122 / b.c2222,
        eta: cell.eta,
        kbar1: a.k22 * cell.theta0 * cell.theta0 / (cell.epsilon * a.c2222 * vel),
        p1: a.p * cell.theta0 * cell.theta0 / a.c2222,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_groups_give_identical_phases() {
        let cell = from_ratios(&DimensionlessGroups::homogeneous()).unwrap();
        assert_eq!(cell.phase1, cell.phase2);
        assert!(cell.is_homogeneous());
    }

    #[test]
    fn compressional_thermal_set_doubles_c2222() {
        let cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        assert_eq!(cell.phase2.c2222, 2.0 * cell.phase1.c2222);
        assert_eq!((cell.s1, cell.s2, cell.epsilon), (0.5, 0.5, 1.0));
        assert!(validate(&cell).is_empty());
    }

    #[test]
    fn isotropic_moduli_relations() {
        let [c1111, c2222, c1122, c1212] = PhaseProperties::isotropic_moduli(2.0, 0.25);
        assert_eq!(c1111, c2222);
        assert!((c1122 - 0.25 * c2222).abs() < 1e-15);
        assert!((c1212 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn plane_strain_mapping() {
        let (e, nu) = PlaneMode::Strain.effective(1.0, 0.25);
        assert!((e - 1.0 / 0.9375).abs() < 1e-15);
        assert!((nu - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(PlaneMode::Stress.effective(1.0, 0.25), (1.0, 0.25));
    }

    #[test]
    fn validation_names_offending_fields() {
        let mut cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        cell.phase1.c1212 = -1.0;
        let v = validate(&cell);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("c1212"));
        let mut cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        cell.s1 = 0.0;
        assert!(validate(&cell).iter().any(|m| m.contains("s1")));
    }

    #[test]
    fn zero_relaxation_times_give_classical_derived_fields() {
        let cell = from_ratios(&DimensionlessGroups::equal_relaxation(0.0)).unwrap();
        for j in 0..2 {
            assert_eq!(cell.phase(j).alpha1_22(), 0.0);
            assert_eq!(cell.phase(j).p0(), 0.0);
        }
    }

    #[test]
    fn ratio_with_zero_base_time_is_rejected() {
        let g = DimensionlessGroups {
            tau0_1: 0.0,
            tau0_ratio: 2.0,
            ..DimensionlessGroups::compressional_thermal()
        };
        assert!(matches!(from_ratios(&g), Err(Error::InconsistentRatios(_))));
    }

    #[test]
    fn poisson_ratio_out_of_range_is_rejected() {
        let g = DimensionlessGroups {
            nu2: 0.5,
            ..DimensionlessGroups::compressional_thermal()
        };
        assert!(from_ratios(&g).is_err());
    }

    #[test]
    fn classical_switch_zeroes_derived_terms_only() {
        let cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        let c = cell.classical();
        assert_eq!(c.alpha1_22(1), 0.0);
        assert_eq!(c.p0(0), 0.0);
        assert_eq!(c.phase2.tau1, cell.phase2.tau1);
        assert!(cell.alpha1_22(1) > 0.0);
    }

    fn close(a: &DimensionlessGroups, b: &DimensionlessGroups, tol: f64) -> bool {
        a.entries()
            .iter()
            .zip(b.entries())
            .all(|((_, x), (_, y))| (x - y).abs() <= tol * (1.0 + x.abs()))
    }

    #[test]
    fn normalized_cell_is_its_own_nondimensional_form() {
        let cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        assert_eq!(cell.nondimensional(), cell);
    }

    #[test]
    fn nondimensional_form_keeps_every_group() {
        let mut phase1 = from_ratios(&DimensionlessGroups::compressional_thermal())
            .unwrap()
            .phase1;
        phase1.c1111 = 7.1e10;
        phase1.c2222 = 8.0e10;
        phase1.c1122 = 2.0e10;
        phase1.c1212 = 2.5e10;
        phase1.alpha22 = 5.0e6;
        phase1.rho = 2700.0;
        phase1.k22 = 0.8;
        phase1.p = 8.0e3;
        phase1.tau0 = 1e-9;
        phase1.tau1 = 3e-9;
        let mut phase2 = phase1.clone();
        phase2.c2222 = 3.0e9;
        phase2.c1111 = 3.5e9;
        phase2.c1122 = 1.2e9;
        phase2.c1212 = 1.1e9;
        phase2.rho = 1200.0;
        phase2.k22 = 1e-3;
        phase2.tau1 = 6e-9;
        let cell = LayeredCell::new(phase1, phase2, 2e-4, 6e-4, 293.0).unwrap();
        let nd = cell.nondimensional();
        assert!(close(&extract_ratios(&cell), &extract_ratios(&nd), 1e-13));
        assert_eq!(
            (nd.epsilon, nd.theta0, nd.phase1.c2222, nd.phase1.rho),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert!((nd.omega_bar(1.0) - 1.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn groups_round_trip(
                p_ratio in 0.1f64..10.0,
                c2222_ratio in 0.1f64..10.0,
                rho_ratio in 0.1f64..10.0,
                kbar_ratio in 0.1f64..10.0,
                a1 in 0.0f64..0.2,
                a2 in 0.0f64..0.2,
                tau0_1 in 0.01f64..10.0,
                tau1_1 in 0.01f64..10.0,
                tau0_ratio in 0.1f64..10.0,
                tau1_ratio in 0.1f64..10.0,
                nu1 in 0.0f64..0.45,
                nu2 in 0.0f64..0.45,
                eta in 0.1f64..10.0,
                kbar1 in 0.1f64..10.0,
                p1 in 0.1f64..10.0,
            ) {
                let g = DimensionlessGroups {
                    p_ratio, c2222_ratio, rho_ratio, kbar_ratio,
                    alpha1_theta0_over_c1: a1, alpha2_theta0_over_c2: a2,
                    tau0_1, tau1_1, tau0_ratio, tau1_ratio, nu1, nu2, eta, kbar1, p1,
                };
                let back = extract_ratios(&from_ratios(&g).unwrap());
                prop_assert!(close(&g, &back, 1e-13), "{:?} vs {:?}", g, back);
            }
        }
    }
}
