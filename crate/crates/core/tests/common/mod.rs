#![allow(dead_code)]

use num_complex::Complex64;
use simplexwalk_core::linalg::CMatrix;

const S2: f64 = std::f64::consts::SQRT_2;
const S3: f64 = 1.732_050_807_568_877_2;

/// `B_M` of the directed triangle with three copies, as published: each entry is a
/// coefficient times `w_1` or `w_2` (weight index 0 marks a zero entry). Rows follow
/// `(m, n) = (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), (3,0), (2,1), (1,2), (0,3)`.
pub const TRIANGLE_N3: [[(f64, usize); 10]; 10] = [
    [(0.0, 0), (S3, 1), (S3, 2), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0)],
    [(S3, 2), (0.0, 0), (1.0, 1), (2.0, 1), (S2, 2), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0)],
    [(S3, 1), (1.0, 2), (0.0, 0), (0.0, 0), (S2, 1), (2.0, 2), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0)],
    [(0.0, 0), (2.0, 2), (0.0, 0), (0.0, 0), (S2, 1), (0.0, 0), (S3, 1), (1.0, 2), (0.0, 0), (0.0, 0)],
    [(0.0, 0), (S2, 1), (S2, 2), (S2, 2), (0.0, 0), (S2, 1), (0.0, 0), (S2, 1), (S2, 2), (0.0, 0)],
    [(0.0, 0), (0.0, 0), (2.0, 1), (0.0, 0), (S2, 2), (0.0, 0), (0.0, 0), (0.0, 0), (1.0, 1), (S3, 2)],
    [(0.0, 0), (0.0, 0), (0.0, 0), (S3, 2), (0.0, 0), (0.0, 0), (0.0, 0), (S3, 1), (0.0, 0), (0.0, 0)],
    [(0.0, 0), (0.0, 0), (0.0, 0), (1.0, 1), (S2, 2), (0.0, 0), (S3, 2), (0.0, 0), (2.0, 1), (0.0, 0)],
    [(0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (S2, 1), (1.0, 2), (0.0, 0), (2.0, 2), (0.0, 0), (S3, 1)],
    [(0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (0.0, 0), (S3, 1), (0.0, 0), (0.0, 0), (S3, 2), (0.0, 0)],
];

/// The published matrix evaluated at `(w_1, w_2)`.
pub fn triangle_n3(w1: Complex64, w2: Complex64) -> CMatrix {
    CMatrix::from_fn(10, 10, |r, c| {
        let (coef, w) = TRIANGLE_N3[r][c];
        match w {
            1 => w1 * coef,
            2 => w2 * coef,
            _ => Complex64::new(0.0, 0.0),
        }
    })
}
