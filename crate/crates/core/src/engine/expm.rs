//! Dense matrix exponential by scaling and squaring with a [13/13] Padé
//! approximant (Higham 2005). Used for Liouvillian propagators, which are not
//! normal and so cannot go through the Hermitian eigendecomposition route.

use super::operators::{CMatrix, C64};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

#[inline]
fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn scaled_identity(n: usize, c: f64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, C64::new(c, 0.0))
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil().max(0.0) as i32 } else { 0 };
    let a = a * C64::new(0.5f64.powi(squarings), 0.0);

    let b = &PADE_13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]));
    let u = &a * (u_inner + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + scaled_identity(n, b[1]));
    let v_inner = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]));
    let v = v_inner + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + scaled_identity(n, b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is singular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}
