//! Bivariate specialization for the directed triangle: `G_{m,n}(x, y)` with
//! `u_1 = v_2 = 1 - zeta`, `u_2 = v_1 = 1 - zeta^{-1}`, `zeta = e^{2 pi i / 3}`.
//!
//! `G_{m,n}(x, y) = K((N-m-n, m, n), (N-x-y, x, y), N, C_3)`; the sum here is written out
//! independently of [`super::krawtchouk_series`] so the two can be cross-checked.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{c, pochhammer_int};
use crate::error::{Error, Result};
use crate::extension::{big_to_f64, factorial, multinomial, MultiIndex};
use crate::linalg::root_of_unity;

fn zeta() -> Complex64 {
    root_of_unity(3, 1)
}

fn trinomial(copies: usize, a: usize, b: usize) -> f64 {
    big_to_f64(&multinomial(copies, &MultiIndex::new(vec![copies - a - b, a, b])).expect("weights agree"))
}

/// Four-fold hypergeometric sum defining `G_{m,n}(x, y)`.
pub fn bivariate_g(m: usize, n: usize, x: usize, y: usize, copies: usize) -> Result<Complex64> {
    if m + n > copies || x + y > copies {
        return Err(Error::OutOfRange(format!(
            "G_{{{m},{n}}}({x},{y}) needs m+n <= N and x+y <= N with N = {copies}"
        )));
    }
    let z = zeta();
    let u1 = c(1.0) - z;
    let u2 = c(1.0) - z.conj();
    let (v1, v2) = (u2, u1);
    let (m_i, n_i, x_i, y_i, big_n) = (m as i64, n as i64, x as i64, y as i64, copies as i64);

    let mut total = c(0.0);
    for i in 0..=m.min(x) {
        for j in 0..=(m - i).min(y) {
            for k in 0..=n.min(x - i) {
                for l in 0..=(n - k).min(y - j) {
                    let s = i + j + k + l;
                    let num = pochhammer_int(-m_i, i + j)
                        * pochhammer_int(-n_i, k + l)
                        * pochhammer_int(-x_i, i + k)
                        * pochhammer_int(-y_i, j + l);
                    let den = pochhammer_int(-big_n, s)
                        * BigInt::from(factorial(i) * factorial(j) * factorial(k) * factorial(l));
                    let ratio = BigRational::new(num, den).to_f64().expect("finite rational");
                    total += u1.powu(i as u32) * v1.powu(j as u32) * u2.powu(k as u32) * v2.powu(l as u32) * ratio;
                }
            }
        }
    }
    Ok(total)
}

/// Orthonormal version `sqrt(3^N multinomial(N; N-m-n, m, n)) G_{m,n}`.
pub fn bivariate_g_tilde(m: usize, n: usize, x: usize, y: usize, copies: usize) -> Result<Complex64> {
    let g = bivariate_g(m, n, x, y, copies)?;
    Ok(g * (3f64.powi(copies as i32) * trinomial(copies, m, n)).sqrt())
}

/// Trinomial weight `multinomial(N; N-x-y, x, y) p^x q^y (1-p-q)^{N-x-y}`.
pub fn bivariate_weight(x: usize, y: usize, copies: usize, p: f64, q: f64) -> f64 {
    trinomial(copies, x, y) * p.powi(x as i32) * q.powi(y as i32) * (1.0 - p - q).powi((copies - x - y) as i32)
}

/// Eigenvalue of `C_{1,0}` on the idempotent labelled `(x, y)`.
pub fn lambda_one(x: usize, y: usize, copies: usize) -> Complex64 {
    let z = zeta();
    c(copies as f64) + Complex64::new(0.0, 3f64.sqrt()) * (z * y as f64 - z.conj() * x as f64)
}

/// Eigenvalue of `C_{0,1}` on the idempotent labelled `(x, y)`.
pub fn lambda_two(x: usize, y: usize, copies: usize) -> Complex64 {
    let z = zeta();
    c(copies as f64) + Complex64::new(0.0, 3f64.sqrt()) * (z * x as f64 - z.conj() * y as f64)
}

fn grid(copies: usize) -> Vec<(usize, usize)> {
    (0..=copies)
        .flat_map(|a| (0..=copies - a).map(move |b| (a, b)))
        .collect()
}

/// Largest deviation of `sum_{x,y} w_{x,y} G_{m1,n1} conj(G_{m2,n2})` from
/// `delta / multinomial(N; N-m1-n1, m1, n1)` with `p = q = 1/3`.
pub fn bivariate_orthogonality_residual(copies: usize) -> f64 {
    let points = grid(copies);
    let table: Vec<Vec<Complex64>> = points
        .iter()
        .map(|&(m, n)| points.iter().map(|&(x, y)| bivariate_g(m, n, x, y, copies).unwrap()).collect())
        .collect();
    let weights: Vec<f64> = points
        .iter()
        .map(|&(x, y)| bivariate_weight(x, y, copies, 1.0 / 3.0, 1.0 / 3.0))
        .collect();
    let mut residual: f64 = 0.0;
    for (a, &(m, n)) in points.iter().enumerate() {
        for b in 0..points.len() {
            let sum: Complex64 = (0..points.len()).map(|p| table[a][p] * table[b][p].conj() * weights[p]).sum();
            let expected = if a == b { 1.0 / trinomial(copies, m, n) } else { 0.0 };
            residual = residual.max((sum - c(expected)).norm());
        }
    }
    residual
}

/// Largest deviation from the six-term recurrence
///
/// ```text
/// (w1 l1 + w2 l2) G~_{m,n} = w1 sqrt((N-m-n)(m+1)) G~_{m+1,n} + w1 sqrt(m(n+1)) G~_{m-1,n+1}
///   + w2 sqrt((N-m-n)(n+1)) G~_{m,n+1} + w2 sqrt(n(m+1)) G~_{m+1,n-1}
///   + w1 sqrt((N+1-m-n) n) G~_{m,n-1} + w2 sqrt((N+1-m-n) m) G~_{m-1,n}
/// ```
///
/// over every `(m, n)` and `(x, y)`.
pub fn bivariate_recurrence_residual(copies: usize, w1: Complex64, w2: Complex64) -> f64 {
    let big_n = copies as i64;
    let gt = |m: i64, n: i64, x: usize, y: usize| -> Complex64 {
        if m < 0 || n < 0 || m + n > big_n {
            return c(0.0);
        }
        bivariate_g_tilde(m as usize, n as usize, x, y, copies).unwrap()
    };
    let mut residual: f64 = 0.0;
    for (m, n) in grid(copies) {
        let (mi, ni) = (m as i64, n as i64);
        let free = (big_n - mi - ni) as f64;
        let (mf, nf) = (m as f64, n as f64);
        for (x, y) in grid(copies) {
            let lhs = (w1 * lambda_one(x, y, copies) + w2 * lambda_two(x, y, copies)) * gt(mi, ni, x, y);
            let rhs = w1 * (free * (mf + 1.0)).sqrt() * gt(mi + 1, ni, x, y)
                + w1 * (mf * (nf + 1.0)).sqrt() * gt(mi - 1, ni + 1, x, y)
                + w2 * (free * (nf + 1.0)).sqrt() * gt(mi, ni + 1, x, y)
                + w2 * (nf * (mf + 1.0)).sqrt() * gt(mi + 1, ni - 1, x, y)
                + w1 * ((free + 1.0) * nf).sqrt() * gt(mi, ni - 1, x, y)
                + w2 * ((free + 1.0) * mf).sqrt() * gt(mi - 1, ni, x, y);
            residual = residual.max((lhs - rhs).norm());
        }
    }
    residual
}
