// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small dense complex linear algebra: Hessenberg QR eigenvalues,
//! Faddeev-LeVerrier characteristic polynomials and polynomial roots.
//!
//! Polynomials are stored as ascending coefficient vectors
//! `c[0] + c[1] λ + … + c[n] λⁿ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Complex dense matrix.
pub type CMatrix = DMatrix<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Householder reduction to upper Hessenberg form (similarity transform).
pub fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I − 2vvᴴ) H (I − 2vvᴴ) on the trailing rows and columns.
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * dot;
            }
        }
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= 2.0 * dot * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Diagonal similarity `D⁻¹ M D` with power-of-two entries that roughly
/// equalizes the norms of matching rows and columns.
pub fn balance(m: &CMatrix) -> CMatrix {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut b = m.clone();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| b[(j, i)].norm()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)].norm()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / RADIX {
                f *= RADIX;
                cc *= RADIX;
                rr /= RADIX;
            }
            while cc >= rr * RADIX {
                f /= RADIX;
                cc /= RADIX;
                rr *= RADIX;
            }
            if cc + rr < 0.95 * total {
                converged = false;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    b
}

/// Complex Givens rotation `[[c, s], [−s̄, c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let rho = (ax * ax + y.norm_sqr()).sqrt();
    if rho == 0.0 {
        (1.0, ZERO)
    } else if ax == 0.0 {
        (0.0, ONE)
    } else {
        (ax / rho, (x / ax) * y.conj() / rho)
    }
}

/// Eigenvalues of a square complex matrix by balancing, Hessenberg
/// reduction and single-shift QR iteration with Wilkinson shifts and
/// deflation.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(&balance(m));
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n;
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        // Locate the start of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let tiny = if diag == 0.0 {
                f64::MIN_POSITIVE
            } else {
                f64::EPSILON * diag
            };
            if sub <= tiny {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence(total));
        }
        let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            d + 0.75 * c.norm() * C64::new(1.0, 1.0)
        } else {
            let half = 0.5 * (a - d);
            let disc = (half * half + b * c).sqrt();
            let m1 = 0.5 * (a + d) + disc;
            let m2 = 0.5 * (a + d) - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = cs * x + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + cs * y;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((cs, sn));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (cs, sn) = rots[idx];
            for i in l..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * cs + y * sn.conj();
                h[(i, k + 1)] = -x * sn + y * cs;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    out.reverse();
    Ok(out)
}

/// Monic characteristic polynomial `det(λI − M)` by the Faddeev-LeVerrier
/// trace recursion, ascending coefficients. For even sizes this equals
/// `det(M − λI)`.
pub fn faddeev_leverrier(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut mk = CMatrix::zeros(n, n);
    let id = CMatrix::identity(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * c[n - k + 1];
        let amk = m * &mk;
        c[n - k] = -amk.trace() / k as f64;
    }
    c
}

/// Horner evaluation of an ascending-coefficient polynomial.
pub fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

/// Value and first derivative.
pub fn poly_eval_d(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Product of two polynomials.
pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of two polynomials.
pub fn poly_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(ZERO) + b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

/// Relative residual `|p(z)| / Σ|cₖ||z|ᵏ`.
pub fn relative_residual(c: &[C64], z: C64) -> f64 {
    let den: f64 = c
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm() * z.norm().powi(k as i32))
        .sum();
    if den == 0.0 {
        0.0
    } else {
        poly_eval(c, z).norm() / den
    }
}

/// Companion matrix of a polynomial with nonzero leading coefficient.
pub fn companion(c: &[C64]) -> CMatrix {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -c[n - 1 - j] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    m
}

/// All roots of a polynomial by the Aberth-Ehrlich simultaneous iteration.
pub fn poly_roots(c: &[C64]) -> Result<Vec<C64>> {
    let mut c = c.to_vec();
    while c.len() > 1 && c[c.len() - 1] == ZERO {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n].norm();
    // Cauchy bound for the initial circle radius.
    let radius = 1.0 + c[..n].iter().map(|a| a.norm() / lead).fold(0.0, f64::max);
    let lower = {
        let c0 = c[0].norm();
        if c0 == 0.0 {
            0.0
        } else {
            c0 / (c0 + c[1..].iter().map(|a| a.norm()).fold(0.0, f64::max))
        }
    };
    let r0 = (lower * radius).sqrt().max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            C64::from_polar(r0, t)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = poly_eval_d(&c, z[k]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let step = ratio / (ONE - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // Accept if every residual is already negligible.
    if z.iter().all(|&r| relative_residual(&c, r) < 1e-10) {
        Ok(z)
    } else {
        Err(Error::NoConvergence(2000))
    }
}

/// Newton refinement of a root, keeping the better of the original and the polished value.
pub fn newton_polish(c: &[C64], z0: C64) -> C64 {
    let mut z = z0;
    let mut best = (relative_residual(c, z), z);
    for _ in 0..8 {
        let (p, dp) = poly_eval_d(c, z);
        if dp == ZERO || p == ZERO {
            break;
        }
        z -= p / dp;
        let r = relative_residual(c, z);
        if r < best.0 {
            best = (r, z);
        }
    }
    best.1
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one_way = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Hausdorff distance scaled by the magnitude of each point (relative).
pub fn relative_hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one_way = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm() / (1.0 + p.norm()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Sorts complex numbers lexicographically by `(re, im)`.
pub fn sort_lex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Solves the small complex linear system `a x = b`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().solve(b)
}

/// Matrix 1-norm (maximum absolute column sum).
pub fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
