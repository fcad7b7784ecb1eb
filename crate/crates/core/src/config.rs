// SPDX-License-Identifier: MIT OR Apache-2.0

//! TOML run configuration.
//!
//! ```toml
//! [cell]
//! theory = "green-lindsay"      # or "classical"
//! plane_mode = "strain"         # used with young/poisson phase input
//!
//! [ratios]                      # dimensionless groups, or [phase1] + [phase2]
//! p_ratio = 3.0
//! # ...
//!
//! [run]
//! methods = ["fb", "hom0", "hom2"]
//! block = "coupled"
//! omega = "0:3:200"
//! zones = 0
//!
//! [output]
//! dir = "out"
//! formats = ["csv", "svg"]
//! ```
//!
//! Dimensional input replaces `[ratios]` by `[phase1]`, `[phase2]` and the
//! layer thicknesses `s1`, `s2` and reference temperature `theta0` in
//! `[cell]`. Unknown keys are errors.

use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::cell_problems::Block;
use crate::error::{Error, Result};
use crate::material::{from_ratios, DimensionlessGroups, LayeredCell, PhaseProperties, PlaneMode, Theory};
use crate::toolkit::Method;

/// Frequency range `a:b:n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaRange {
    /// First dimensionless frequency.
    pub start: f64,
    /// Last dimensionless frequency.
    pub end: f64,
    /// Number of samples.
    pub samples: usize,
}

impl OmegaRange {
    /// `(start, end, samples)`.
    pub fn triple(&self) -> (f64, f64, usize) {
        (self.start, self.end, self.samples)
    }
}

impl FromStr for OmegaRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("omega range `{s}` is not of the form a:b:n"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let range = OmegaRange {
            start: a.trim().parse().map_err(|_| bad())?,
            end: b.trim().parse().map_err(|_| bad())?,
            samples: n.trim().parse().map_err(|_| bad())?,
        };
        range.check()?;
        Ok(range)
    }
}

impl OmegaRange {
    fn check(&self) -> Result<()> {
        if !(self.start >= 0.0 && self.start < self.end && self.end.is_finite()) {
            return Err(Error::Config(format!(
                "omega range needs 0 <= start < end (got {}:{})",
                self.start, self.end
            )));
        }
        if self.samples < 2 {
            return Err(Error::Config(format!(
                "omega range needs at least 2 samples (got {})",
                self.samples
            )));
        }
        Ok(())
    }
}

/// Output file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    /// Comma-separated values.
    Csv,
    /// Two-panel line plot.
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected csv or svg)"
            ))),
        }
    }
}

/// Parses a method tag.
pub fn parse_method(s: &str) -> Result<Method> {
    Method::parse(s.trim()).ok_or_else(|| Error::Config(format!("unknown method `{s}` (expected fb, hom0 or hom2)")))
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Layered cell.
    pub cell: LayeredCell,
    /// Methods in the order given.
    pub methods: Vec<Method>,
    /// Block.
    pub block: Block,
    /// Frequency range.
    pub omega: OmegaRange,
    /// Number of translated Brillouin zones on each side.
    pub zones: u32,
    /// Output directory.
    pub dir: PathBuf,
    /// Output formats.
    pub formats: Vec<Format>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CellSection {
    #[serde(default)]
    theory: Theory,
    #[serde(default)]
    plane_mode: PlaneMode,
    s1: Option<f64>,
    s2: Option<f64>,
    theta0: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseSection {
    c1111: Option<f64>,
    c2222: Option<f64>,
    c1122: Option<f64>,
    c1212: Option<f64>,
    young: Option<f64>,
    poisson: Option<f64>,
    alpha11: Option<f64>,
    alpha22: f64,
    #[serde(default)]
    tau0: f64,
    #[serde(default)]
    tau1: f64,
    rho: f64,
    k11: Option<f64>,
    k22: f64,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    methods: Vec<String>,
    block: String,
    omega: String,
    #[serde(default)]
    zones: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default = "default_dir")]
    dir: PathBuf,
    #[serde(default = "default_formats")]
    formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".into()]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    cell: CellSection,
    ratios: Option<DimensionlessGroups>,
    phase1: Option<PhaseSection>,
    phase2: Option<PhaseSection>,
    run: Option<RunSection>,
    #[serde(default)]
    output: OutputSection,
}

impl PhaseSection {
    fn build(self, label: &str, mode: PlaneMode) -> Result<PhaseProperties> {
        let explicit = [self.c1111, self.c2222, self.c1122, self.c1212];
        let [c1111, c2222, c1122, c1212] = match (explicit, self.young, self.poisson) {
            ([Some(a), Some(b), Some(c), Some(d)], None, None) => [a, b, c, d],
            ([None, None, None, None], Some(e), Some(nu)) => {
                let (e_tilde, nu_tilde) = mode.effective(e, nu);
                PhaseProperties::isotropic_moduli(e_tilde, nu_tilde)
            }
            _ => {
                return Err(Error::Config(format!(
                    "[{label}] needs either all of c1111, c2222, c1122, c1212 or both young and poisson"
                )))
            }
        };
        Ok(PhaseProperties {
            c1111,
            c2222,
            c1122,
            c1212,
            alpha11: self.alpha11.unwrap_or(self.alpha22),
            alpha22: self.alpha22,
            tau0: self.tau0,
            tau1: self.tau1,
            rho: self.rho,
            k11: self.k11.unwrap_or(self.k22),
            k22: self.k22,
            p: self.p,
        })
    }
}

/// Builds the cell described by the material sections of a TOML document.
pub fn cell_from_toml(text: &str) -> Result<LayeredCell> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    build_cell(raw.cell, raw.ratios, raw.phase1, raw.phase2)
}

/// Material sections plus output settings, for commands that do not sweep.
#[derive(Clone, Debug)]
pub struct MaterialConfig {
    /// Layered cell.
    pub cell: LayeredCell,
    /// Output directory.
    pub dir: PathBuf,
    /// Output formats.
    pub formats: Vec<Format>,
}

impl MaterialConfig {
    /// Parses the material and `[output]` sections; `[run]` is ignored.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(MaterialConfig {
            cell: build_cell(raw.cell, raw.ratios, raw.phase1, raw.phase2)?,
            dir: raw.output.dir,
            formats: parse_formats(&raw.output.formats)?,
        })
    }
}

fn parse_formats(names: &[String]) -> Result<Vec<Format>> {
    names.iter().map(|f| f.parse()).collect()
}

fn build_cell(
    cell: CellSection,
    ratios: Option<DimensionlessGroups>,
    phase1: Option<PhaseSection>,
    phase2: Option<PhaseSection>,
) -> Result<LayeredCell> {
    let mut out = match (ratios, phase1, phase2) {
        (Some(g), None, None) => {
            if cell.s1.is_some() || cell.s2.is_some() || cell.theta0.is_some() {
                return Err(Error::Config(
                    "[cell] s1, s2 and theta0 are fixed by the normalization of [ratios]".into(),
                ));
            }
            from_ratios(&g)?
        }
        (None, Some(a), Some(b)) => {
            let (Some(s1), Some(s2)) = (cell.s1, cell.s2) else {
                return Err(Error::Config(
                    "[cell] s1 and s2 are required with [phase1]/[phase2]".into(),
                ));
            };
            LayeredCell::new(
                a.build("phase1", cell.plane_mode)?,
                b.build("phase2", cell.plane_mode)?,
                s1,
                s2,
                cell.theta0.unwrap_or(1.0),
            )?
        }
        _ => {
            return Err(Error::Config(
                "give exactly one of [ratios] or both [phase1] and [phase2]".into(),
            ))
        }
    };
    out.theory = cell.theory;
    Ok(out)
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let run = raw.run.ok_or_else(|| Error::Config("missing [run] section".into()))?;
        let cell = build_cell(raw.cell, raw.ratios, raw.phase1, raw.phase2)?;
        let methods = run
            .methods
            .iter()
            .map(|m| parse_method(m))
            .collect::<Result<Vec<_>>>()?;
        if methods.is_empty() {
            return Err(Error::Config("[run] methods must not be empty".into()));
        }
        let formats = parse_formats(&raw.output.formats)?;
        Ok(RunConfig {
            cell,
            methods,
            block: Block::parse(&run.block)?,
            omega: run.omega.parse()?,
            zones: run.zones,
            dir: raw.output.dir,
            formats,
        })
    }

    /// Reads and validates a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPRESSIONAL: &str = r#"
[ratios]
p_ratio = 3.0
c2222_ratio = 2.0
rho_ratio = 3.0
kbar_ratio = 3.0
alpha1_theta0_over_c1 = 0.01
alpha2_theta0_over_c2 = 0.1
tau0_1 = 1.0
tau1_1 = 3.0
tau0_ratio = 2.0
tau1_ratio = 2.0
nu1 = 0.2
nu2 = 0.2
eta = 1.0
kbar1 = 1.0
p1 = 1.0

[run]
methods = ["fb", "hom0", "hom2"]
block = "coupled"
omega = "0:3:200"
"#;

    #[test]
    fn ratio_config_matches_preset() {
        let c = RunConfig::from_toml(COMPRESSIONAL).unwrap();
        assert_eq!(
            c.cell,
            from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap()
        );
        assert_eq!(c.methods, vec![Method::Fb, Method::Hom0, Method::Hom2]);
        assert_eq!(
            c.omega,
            OmegaRange {
                start: 0.0,
                end: 3.0,
                samples: 200
            }
        );
        assert_eq!(c.formats, vec![Format::Csv]);
        assert_eq!(c.zones, 0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = COMPRESSIONAL.replace("p1 = 1.0", "p1 = 1.0\nbogus = 2.0");
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn empty_methods_and_bad_formats_are_rejected() {
        let text = COMPRESSIONAL.replace(r#"["fb", "hom0", "hom2"]"#, "[]");
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
        let text = format!("{COMPRESSIONAL}\n[output]\nformats = [\"png\"]\n");
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn omega_range_parsing() {
        assert!("0:1:2".parse::<OmegaRange>().is_ok());
        for bad in ["1:0:5", "0:1:1", "0:1", "a:b:c", "-1:1:3"] {
            assert!(bad.parse::<OmegaRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn classical_theory_switch() {
        let text = format!("[cell]\ntheory = \"classical\"\n{COMPRESSIONAL}");
        let c = RunConfig::from_toml(&text).unwrap();
        assert_eq!(c.cell.theory, Theory::Classical);
    }

    #[test]
    fn dimensional_phases() {
        let text = r#"
[cell]
s1 = 0.5
s2 = 0.5
plane_mode = "stress"

[phase1]
young = 2.0
poisson = 0.25
alpha22 = 0.1
rho = 1.0
k22 = 1.0
p = 1.0

[phase2]
c1111 = 3.0
c2222 = 3.0
c1122 = 1.0
c1212 = 1.0
alpha22 = 0.2
rho = 2.0
k22 = 2.0
p = 1.0
"#;
        let cell = cell_from_toml(text).unwrap();
        let [c1111, ..] = PhaseProperties::isotropic_moduli(2.0, 0.25);
        assert_eq!(cell.phase1.c1111, c1111);
        assert_eq!(cell.phase1.alpha11, 0.1);
        assert_eq!(cell.phase2.k11, 2.0);
        assert_eq!(cell.eta, 1.0);
    }

    #[test]
    fn mixed_material_input_is_rejected() {
        let text = format!(
            "{COMPRESSIONAL}\n[phase1]\nalpha22 = 0.1\nrho = 1.0\nk22 = 1.0\np = 1.0\nyoung = 1.0\npoisson = 0.2\n"
        );
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn material_config_reads_output_without_run() {
        let text = COMPRESSIONAL.split("[run]").next().unwrap().to_string();
        let m = MaterialConfig::from_toml(&text).unwrap();
        assert_eq!(m.dir, PathBuf::from("out"));
        assert_eq!(m.formats, vec![Format::Csv]);
        let text = format!("{text}\n[output]\ndir = \"x\"\nformats = [\"svg\"]\n");
        let m = MaterialConfig::from_toml(&text).unwrap();
        assert_eq!(m.dir, PathBuf::from("x"));
        assert_eq!(m.formats, vec![Format::Svg]);
    }
}
