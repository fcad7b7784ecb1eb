// SPDX-License-Identifier: MIT OR Apache-2.0

//! Frequency sweeps, branch tracking and method comparison.
//!
//! A sweep evaluates one method on a uniform `ω̄` grid in parallel, then
//! links the roots of consecutive samples into branches by a minimal-cost
//! assignment on complex distance. Steps whose assigned distance exceeds
//! the continuation threshold are refined by repeated step halving.

use pathfinding::prelude::{kuhn_munkres_min, Matrix};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::cell_problems::Block;
use crate::effective::EffectiveTensors;
use crate::error::{Error, Result};
use crate::floquet_bloch::bloch_spectrum;
use crate::homogenized::{assemble_gamma, second_order_roots, zeroth_order_roots, Root};
use crate::material::LayeredCell;
use crate::C64;

pub use crate::floquet_bloch::fold;

/// Relative jump `|Δk̄| / (1 + |k̄|)` above which a step is refined.
pub const JUMP_THRESHOLD: f64 = 0.1;

/// Largest number of step halvings applied to one grid interval.
pub const MAX_HALVINGS: u32 = 8;

/// Spectrum method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Zeroth-order homogenization.
    Hom0,
    /// Second-order homogenization.
    Hom2,
    /// Floquet-Bloch transfer matrix.
    Fb,
}

impl Method {
    /// Every method in output order.
    pub const ALL: [Method; 3] = [Method::Fb, Method::Hom0, Method::Hom2];

    /// Short lowercase tag.
    pub fn tag(self) -> &'static str {
        match self {
            Method::Hom0 => "hom0",
            Method::Hom2 => "hom2",
            Method::Fb => "fb",
        }
    }

    /// Parses a tag produced by [`Method::tag`].
    pub fn parse(s: &str) -> Option<Self> {
        Method::ALL.into_iter().find(|m| m.tag() == s)
    }

    /// True for spectra that are periodic in `Re k̄`.
    pub fn is_periodic(self) -> bool {
        self == Method::Fb
    }
}

/// Cell data shared by every frequency of a sweep.
#[derive(Clone, Debug)]
pub struct SpectrumModel {
    /// Layered cell.
    pub cell: LayeredCell,
    /// Effective tensors of the cell.
    pub tensors: EffectiveTensors,
}

impl SpectrumModel {
    /// Solves every cell problem of `cell` after converting it to its
    /// nondimensional form.
    pub fn new(cell: LayeredCell) -> Result<Self> {
        let cell = cell.nondimensional();
        let tensors = crate::effective::effective_from_cell(&cell)?;
        Ok(SpectrumModel { cell, tensors })
    }

    /// Roots of one method at one dimensionless frequency.
    ///
    /// Floquet-Bloch roots lie in the first Brillouin zone and are repeated
    /// with shifts `2πm`, `1 ≤ |m| ≤ zones`.
    pub fn solve_at(&self, method: Method, block: Block, omega_bar: f64, zones: u32) -> Result<Vec<Root>> {
        let omega = self.cell.omega_from_bar(omega_bar);
        let roots = match method {
            Method::Hom0 => zeroth_order_roots(&assemble_gamma(&self.tensors, block, omega)).map(|r| r.roots),
            Method::Hom2 => second_order_roots(&assemble_gamma(&self.tensors, block, omega)).map(|r| r.roots),
            Method::Fb => bloch_spectrum(&self.cell, omega, block).map(|r| translate(&r.roots, zones)),
        };
        roots.map_err(|e| Error::AtFrequency {
            omega_bar,
            source: Box::new(e),
        })
    }
}

/// Copies of `roots` shifted by `2πm` for `1 ≤ |m| ≤ zones`, appended in
/// order of `m = −zones, …, zones`.
pub fn translate(roots: &[Root], zones: u32) -> Vec<Root> {
    let z = zones as i64;
    (-z..=z)
        .flat_map(|m| {
            roots.iter().map(move |r| Root {
                k: r.k + C64::new(2.0 * PI * m as f64, 0.0),
                ..*r
            })
        })
        .collect()
}

/// Roots at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSample {
    /// Dimensionless frequency.
    pub omega_bar: f64,
    /// Roots at that frequency.
    pub roots: Vec<Root>,
}

/// One sample of a tracked branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPoint {
    /// Dimensionless frequency.
    pub omega_bar: f64,
    /// Root on this branch.
    pub root: Root,
    /// False when the link from the previous sample still exceeded the
    /// continuation threshold after every allowed halving.
    pub continuous: bool,
}

/// A continuous curve `ω̄ ↦ k̄₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Samples in increasing `ω̄`.
    pub points: Vec<BranchPoint>,
}

impl Branch {
    /// Root at exactly `omega_bar`, if sampled.
    pub fn at(&self, omega_bar: f64) -> Option<&Root> {
        self.points.iter().find(|p| p.omega_bar == omega_bar).map(|p| &p.root)
    }
}

/// Branches of one method and block over a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCurveSet {
    /// Method.
    pub method: Method,
    /// Block.
    pub block: Block,
    /// Frequency grid.
    pub omegas: Vec<f64>,
    /// Raw roots per grid frequency.
    pub samples: Vec<SpectrumSample>,
    /// Tracked branches.
    pub branches: Vec<Branch>,
}

/// Uniform grid of `n ≥ 2` points from `a` to `b` with exact endpoints.
pub fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Distance between roots; periodic in `Re k̄` when requested.
fn distance(a: C64, b: C64, periodic: bool) -> f64 {
    if periodic {
        (fold(a - b)).norm()
    } else {
        (a - b).norm()
    }
}

/// Minimal-cost assignment of `prev` roots to `next` roots.
///
/// Returns `link[i] = Some(j)` when `prev[i]` continues as `next[j]`.
pub fn assign(prev: &[C64], next: &[C64], periodic: bool) -> Vec<Option<usize>> {
    if prev.is_empty() || next.is_empty() {
        return vec![None; prev.len()];
    }
    let transpose = prev.len() > next.len();
    let (rows, cols) = if transpose { (next, prev) } else { (prev, next) };
    let d: Vec<f64> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| distance(r, c, periodic)))
        .collect();
    let dmax = d.iter().cloned().fold(0.0, f64::max);
    let unit = if dmax > 0.0 { dmax / (1u64 << 40) as f64 } else { 1.0 };
    let w: Vec<i64> = d.iter().map(|x| (x / unit).round() as i64).collect();
    let m = Matrix::from_vec(rows.len(), cols.len(), w).expect("rectangular cost matrix");
    let (_, pairs) = kuhn_munkres_min(&m);
    let mut link = vec![None; prev.len()];
    for (r, &c) in pairs.iter().enumerate() {
        if transpose {
            link[c] = Some(r);
        } else {
            link[r] = Some(c);
        }
    }
    link
}

fn is_jump(a: C64, b: C64, periodic: bool) -> bool {
    distance(a, b, periodic) > JUMP_THRESHOLD * (1.0 + a.norm().min(b.norm()))
}

impl SpectrumModel {
    /// Follows `prev` (roots at `w0`) to the roots at `w1`, halving the step
    /// while any link jumps. Returns the link and whether it is continuous.
    fn link(
        &self,
        method: Method,
        block: Block,
        zones: u32,
        (w0, prev): (f64, &[C64]),
        (w1, next): (f64, &[C64]),
        depth: u32,
    ) -> Result<(Vec<Option<usize>>, bool)> {
        let periodic = method.is_periodic() && zones == 0;
        let direct = assign(prev, next, periodic);
        let jumps = direct
            .iter()
            .enumerate()
            .any(|(i, j)| j.is_some_and(|j| is_jump(prev[i], next[j], periodic)));
        if !jumps {
            return Ok((direct, true));
        }
        if depth >= MAX_HALVINGS {
            return Ok((direct, false));
        }
        let wm = 0.5 * (w0 + w1);
        let mid: Vec<C64> = self.solve_at(method, block, wm, zones)?.iter().map(|r| r.k).collect();
        if mid.len() != prev.len() || mid.len() != next.len() {
            return Ok((direct, false));
        }
        let (first, c1) = self.link(method, block, zones, (w0, prev), (wm, &mid), depth + 1)?;
        let (second, c2) = self.link(method, block, zones, (wm, &mid), (w1, next), depth + 1)?;
        let chained = first.iter().map(|j| j.and_then(|j| second[j])).collect();
        Ok((chained, c1 && c2))
    }

    /// Sweeps `n ≥ 2` frequencies from `a` to `b` and tracks branches.
    pub fn sweep(
        &self,
        method: Method,
        block: Block,
        (a, b, n): (f64, f64, usize),
        zones: u32,
    ) -> Result<DispersionCurveSet> {
        if n < 2 || !(a < b) {
            return Err(Error::Config(format!("invalid omega range {a}:{b}:{n}")));
        }
        let omegas = grid(a, b, n);
        let samples: Vec<SpectrumSample> = omegas
            .par_iter()
            .map(|&w| {
                self.solve_at(method, block, w, zones)
                    .map(|roots| SpectrumSample { omega_bar: w, roots })
            })
            .collect::<Result<_>>()?;
        let branches = self.track(method, block, zones, &samples)?;
        Ok(DispersionCurveSet {
            method,
            block,
            omegas,
            samples,
            branches,
        })
    }

    /// Links sampled roots into branches.
    pub fn track(&self, method: Method, block: Block, zones: u32, samples: &[SpectrumSample]) -> Result<Vec<Branch>> {
        let mut branches: Vec<Branch> = Vec::new();
        // Index of the branch owning each root of the previous sample.
        let mut owner: Vec<usize> = Vec::new();
        let mut prev: Option<&SpectrumSample> = None;
        for s in samples {
            let mut next_owner = vec![usize::MAX; s.roots.len()];
            let mut flags = vec![true; s.roots.len()];
            if let Some(p) = prev {
                let pk: Vec<C64> = p.roots.iter().map(|r| r.k).collect();
                let nk: Vec<C64> = s.roots.iter().map(|r| r.k).collect();
                let (link, continuous) = self.link(method, block, zones, (p.omega_bar, &pk), (s.omega_bar, &nk), 0)?;
                for (i, j) in link.iter().enumerate() {
                    if let Some(j) = *j {
                        if next_owner[j] == usize::MAX {
                            next_owner[j] = owner[i];
                            flags[j] = continuous;
                        }
                    }
                }
            }
            for (j, root) in s.roots.iter().enumerate() {
                if next_owner[j] == usize::MAX {
                    next_owner[j] = branches.len();
                    branches.push(Branch { points: Vec::new() });
                }
                branches[next_owner[j]].points.push(BranchPoint {
                    omega_bar: s.omega_bar,
                    root: *root,
                    continuous: flags[j],
                });
            }
            owner = next_owner;
            prev = Some(s);
        }
        Ok(branches)
    }
}

/// Error of one reference branch against the test spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchError {
    /// Index of the reference branch.
    pub branch: usize,
    /// Number of compared samples.
    pub samples: usize,
    /// Largest relative error.
    pub max: f64,
    /// Mean relative error.
    pub mean: f64,
}

/// Result of comparing two spectra over a frequency window.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    /// Reference method.
    pub reference: Method,
    /// Tested method.
    pub test: Method,
    /// Per-branch errors of compared reference branches.
    pub branches: Vec<BranchError>,
    /// Largest error over every branch.
    pub max: f64,
    /// Mean error over every compared sample.
    pub mean: f64,
    /// Physical first-zone branch counts `(reference, test)` when they differ.
    pub branch_count_mismatch: Option<(usize, usize)>,
}

/// Relative distance `|a − b| / |b|`, absolute when `|b|` vanishes.
pub fn relative_error(a: C64, b: C64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 1e-12 {
        d / b.norm()
    } else {
        d
    }
}

fn in_first_zone(r: &Root) -> bool {
    r.physical && r.k.re.abs() <= PI
}

fn counted_branches(set: &DispersionCurveSet, window: (f64, f64)) -> usize {
    set.branches
        .iter()
        .filter(|b| {
            b.points
                .iter()
                .any(|p| p.omega_bar >= window.0 && p.omega_bar <= window.1 && in_first_zone(&p.root))
        })
        .count()
}

/// Compares `test` against `reference` on the shared grid frequencies in
/// `window`. Every physical first-zone reference root is matched to the
/// nearest physical test root at the same frequency.
pub fn compare(reference: &DispersionCurveSet, test: &DispersionCurveSet, window: (f64, f64)) -> CompareReport {
    let mut branches = Vec::new();
    let (mut total, mut count, mut worst) = (0.0, 0usize, 0.0f64);
    for (bi, b) in reference.branches.iter().enumerate() {
        let mut errs = Vec::new();
        for p in &b.points {
            if p.omega_bar < window.0 || p.omega_bar > window.1 || !in_first_zone(&p.root) {
                continue;
            }
            let Some(sample) = test.samples.iter().find(|s| s.omega_bar == p.omega_bar) else {
                continue;
            };
            let best = sample
                .roots
                .iter()
                .filter(|r| r.physical)
                .map(|r| relative_error(r.k, p.root.k))
                .fold(f64::INFINITY, f64::min);
            if best.is_finite() {
                errs.push(best);
            }
        }
        if errs.is_empty() {
            continue;
        }
        let max = errs.iter().cloned().fold(0.0, f64::max);
        let sum: f64 = errs.iter().sum();
        worst = worst.max(max);
        total += sum;
        count += errs.len();
        branches.push(BranchError {
            branch: bi,
            samples: errs.len(),
            max,
            mean: sum / errs.len() as f64,
        });
    }
    let nr = counted_branches(reference, window);
    let nt = counted_branches(test, window);
    CompareReport {
        reference: reference.method,
        test: test.method,
        branches,
        max: worst,
        mean: if count > 0 { total / count as f64 } else { 0.0 },
        branch_count_mismatch: (nr != nt).then_some((nr, nt)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{from_ratios, DimensionlessGroups};
    use proptest::prelude::*;

    fn model(g: DimensionlessGroups) -> SpectrumModel {
        SpectrumModel::new(from_ratios(&g).unwrap()).unwrap()
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.tag()), Some(m));
        }
        assert_eq!(Method::parse("hom1"), None);
    }

    #[test]
    fn grid_has_exact_endpoints() {
        let g = grid(0.1, 0.7, 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.7);
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn homogeneous_shear_is_one_straight_pair() {
        let m = model(DimensionlessGroups::homogeneous());
        let set = m.sweep(Method::Hom0, Block::Shear, (0.0, 1.0, 21), 0).unwrap();
        assert_eq!(set.branches.len(), 2);
        let c = 0.5f64.sqrt();
        for b in &set.branches {
            assert!(b.points.iter().all(|p| p.continuous));
            for p in &b.points {
                assert!((p.root.k.re.abs() - p.omega_bar / c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn floquet_bloch_branch_counts() {
        let m = model(DimensionlessGroups::compressional_thermal());
        let shear = m.sweep(Method::Fb, Block::Shear, (0.01, 2.0, 40), 0).unwrap();
        assert_eq!(shear.branches.len(), 2);
        let coupled = m.sweep(Method::Fb, Block::Coupled, (0.01, 2.0, 40), 0).unwrap();
        assert_eq!(coupled.branches.len(), 4);
    }

    #[test]
    fn coarse_sweep_is_subset_of_fine_sweep() {
        let m = model(DimensionlessGroups::compressional_thermal());
        for method in Method::ALL {
            let coarse = m.sweep(method, Block::Coupled, (0.05, 1.5, 2), 0).unwrap();
            let fine = m.sweep(method, Block::Coupled, (0.05, 1.5, 200), 0).unwrap();
            for s in &coarse.samples {
                let f = fine.samples.iter().find(|x| x.omega_bar == s.omega_bar).unwrap();
                for (a, b) in s.roots.iter().zip(&f.roots) {
                    assert!((a.k - b.k).norm() <= 1e-12 * (1.0 + a.k.norm()));
                }
            }
        }
    }

    #[test]
    fn self_comparison_is_exact() {
        let m = model(DimensionlessGroups::shear_contrast());
        let set = m.sweep(Method::Fb, Block::Shear, (0.0, 1.0, 11), 0).unwrap();
        let r = compare(&set, &set, (0.0, 1.0));
        assert_eq!(r.max, 0.0);
        assert_eq!(r.branch_count_mismatch, None);
    }

    #[test]
    fn hom2_equals_hom0_for_homogeneous_cell() {
        let m = model(DimensionlessGroups::homogeneous());
        for block in [Block::Shear, Block::Coupled] {
            let a = m.sweep(Method::Hom0, block, (0.0, 1.0, 11), 0).unwrap();
            let b = m.sweep(Method::Hom2, block, (0.0, 1.0, 11), 0).unwrap();
            assert!(compare(&a, &b, (0.0, 1.0)).max < 1e-10);
        }
    }

    #[test]
    fn hom0_tracks_fb_at_long_wavelength() {
        let m = model(DimensionlessGroups::shear_contrast());
        let fb = m.sweep(Method::Fb, Block::Shear, (0.0, 0.3, 31), 0).unwrap();
        let h0 = m.sweep(Method::Hom0, Block::Shear, (0.0, 0.3, 31), 0).unwrap();
        assert!(compare(&fb, &h0, (0.0, 0.3)).max < 0.02);
    }

    #[test]
    fn dimensional_cell_has_the_same_spectra() {
        let mut cell = from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap();
        let (l, c, rho, theta): (f64, f64, f64, f64) = (2e-3, 5e10, 2500.0, 300.0);
        let time = l * (rho / c).sqrt();
        for p in [&mut cell.phase1, &mut cell.phase2] {
            for m in [&mut p.c1111, &mut p.c2222, &mut p.c1122, &mut p.c1212] {
                *m *= c;
            }
            p.alpha11 *= c / theta;
            p.alpha22 *= c / theta;
            p.tau0 *= time;
            p.tau1 *= time;
            p.rho *= rho;
            p.k11 *= rho * l.powi(4) / time.powi(3) / (theta * theta);
            p.k22 *= rho * l.powi(4) / time.powi(3) / (theta * theta);
            p.p *= c / (theta * theta);
        }
        cell.s1 *= l;
        cell.s2 *= l;
        cell.epsilon *= l;
        cell.theta0 = theta;
        let unit = SpectrumModel::new(from_ratios(&DimensionlessGroups::compressional_thermal()).unwrap()).unwrap();
        let scaled = SpectrumModel::new(cell).unwrap();
        for method in Method::ALL {
            for block in [Block::Shear, Block::Coupled] {
                let w = 0.9;
                let a = scaled.solve_at(method, block, w, 0).unwrap();
                let b = unit.solve_at(method, block, w, 0).unwrap();
                assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    assert!((x.k - y.k).norm() < 1e-9, "{} vs {}", x.k, y.k);
                }
            }
        }
    }

    #[test]
    fn translated_zones() {
        let r = Root {
            k: C64::new(0.5, 0.1),
            residual: 0.0,
            physical: true,
        };
        let t = translate(&[r], 2);
        assert_eq!(t.len(), 5);
        assert_eq!(t[2], r);
        assert!((t[0].k.re - (0.5 - 4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn solver_errors_carry_frequency() {
        let m = model(DimensionlessGroups::compressional_thermal());
        let e = m.sweep(Method::Fb, Block::Shear, (0.0, 1e300, 3), 0).unwrap_err();
        assert!(matches!(e, Error::AtFrequency { .. }));
    }

    proptest! {
        #[test]
        fn assignment_recovers_permutation(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..7),
            shift in 0usize..7,
        ) {
            let prev: Vec<C64> = pts.iter().enumerate().map(|(i, &(x, y))| C64::new(x + 20.0 * i as f64, y)).collect();
            let n = prev.len();
            let next: Vec<C64> = (0..n).map(|j| prev[(j + shift) % n] + C64::new(1e-3, 0.0)).collect();
            let link = assign(&prev, &next, false);
            for (i, j) in link.iter().enumerate() {
                prop_assert_eq!((j.unwrap() + shift) % n, i);
            }
        }

        #[test]
        fn fold_lands_in_first_zone(re in -1e3f64..1e3, im in -10.0f64..10.0) {
            let f = fold(C64::new(re, im));
            prop_assert!(f.re > -PI && f.re <= PI);
            prop_assert_eq!(f.im, im);
            prop_assert!(((f.re - re) / (2.0 * PI)).fract().abs() < 1e-9
                || (1.0 - ((f.re - re) / (2.0 * PI)).fract().abs()) < 1e-9);
        }
    }
}
