//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham's 2005 selection).

use nalgebra::DMatrix;

use crate::error::{ModalError, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
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

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` for a real square matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(ModalError::DimensionMismatch(format!("A is {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::non_finite("matrix exponential argument"));
    }
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let norm = one_norm(a);

    for (theta, coeffs) in [(THETA_3, &B3[..]), (THETA_5, &B5[..]), (THETA_7, &B7[..]), (THETA_9, &B9[..])] {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs, &eye);
            return solve_pade(&u, &v);
        }
    }

    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a / 2f64.powi(squarings);
    let (u, v) = pade13(&scaled, &eye);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::Numerical("matrix exponential overflowed".into()));
    }
    Ok(r)
}

fn pade_low(a: &DMatrix<f64>, b: &[f64], eye: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let a2 = a * a;
    let mut power = eye.clone();
    let mut u_inner = eye * b[1];
    let mut v = eye * b[0];
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        u_inner += &power * b[2 * k + 1];
        v += &power * b[2 * k];
    }
    (a * u_inner, v)
}

fn pade13(a: &DMatrix<f64>, eye: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + eye * b[1];
    let u = a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + eye * b[0];
    (u, v)
}

fn solve_pade(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let q = v - u;
    let p = v + u;
    q.lu().solve(&p).ok_or_else(|| ModalError::Numerical("singular Padé denominator".into()))
}
