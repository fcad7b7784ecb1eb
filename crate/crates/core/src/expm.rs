// SPDX-License-Identifier: MIT OR Apache-2.0

//! Matrix exponential by scaling and squaring with the diagonal [13/13]
//! Padé approximant.

use crate::error::{Error, Result};
use crate::linalg::{norm1, CMatrix};
use crate::C64;

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound below which the unscaled [13/13] approximant is accurate
/// to double precision.
const THETA_13: f64 = 5.371920351148152;

/// Largest number of squarings accepted before reporting divergence.
pub const MAX_SQUARINGS: u32 = 60;

/// Computes `exp(A)`.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::ExponentialDivergence(u32::MAX));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i64
    } else {
        0
    };
    if s > MAX_SQUARINGS as i64 {
        return Err(Error::ExponentialDivergence(s as u32));
    }
    let scaled = a * C64::new(0.5f64.powi(s as i32), 0.0);
    let id = CMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let r = |x: f64| C64::new(x, 0.0);
    let inner_u = &a6 * (&a6 * r(B[13]) + &a4 * r(B[11]) + &a2 * r(B[9]))
        + &a6 * r(B[7])
        + &a4 * r(B[5])
        + &a2 * r(B[3])
        + &id * r(B[1]);
    let u = &scaled * inner_u;
    let v = &a6 * (&a6 * r(B[12]) + &a4 * r(B[10]) + &a2 * r(B[8]))
        + &a6 * r(B[6])
        + &a4 * r(B[4])
        + &a2 * r(B[2])
        + &id * r(B[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut x = q.lu().solve(&p).ok_or(Error::ExponentialDivergence(s as u32))?;
    for _ in 0..s {
        x = &x * &x;
    }
    Ok(x)
}
