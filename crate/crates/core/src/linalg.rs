//! Small dense complex linear-algebra helpers shared by the walk engine and the oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type IntMatrix = DMatrix<i64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(2*pi*i*k/n)`, computed so that `root_of_unity(n, n - k)` is bit-for-bit the
/// conjugate of `root_of_unity(n, k)` and `root_of_unity(n, 0)` is exactly one.
pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    assert!(n > 0, "root of unity of order zero");
    let n_i = n as i64;
    let r = k.rem_euclid(n_i);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r > n_i {
        return root_of_unity(n, n_i - r).conj();
    }
    if 2 * r == n_i {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == n_i {
        return I;
    }
    let theta = 2.0 * std::f64::consts::PI * r as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

pub fn to_complex(m: &IntMatrix) -> CMatrix {
    m.map(|v| Complex64::new(v as f64, 0.0))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// Evolves `state` under `exp(-i t H)` for Hermitian `h` through its spectral decomposition.
pub fn evolve_hermitian(h: &CMatrix, t: f64, state: &CVector, tol: f64) -> Result<CVector> {
    let residual = hermitian_residual(h);
    if residual > tol {
        return Err(Error::NotHermitian(residual));
    }
    if h.nrows() != state.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator of order {} applied to vector of length {}",
            h.nrows(),
            state.len()
        )));
    }
    let eig = SymmetricEigen::new(h.clone());
    let coeffs = eig.eigenvectors.adjoint() * state;
    let phased = CVector::from_iterator(
        coeffs.len(),
        coeffs
            .iter()
            .zip(eig.eigenvalues.iter())
            .map(|(c, &lambda)| c * (-I * t * lambda).exp()),
    );
    Ok(&eig.eigenvectors * phased)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    let residual = hermitian_residual(h);
    if residual > tol {
        return Err(Error::NotHermitian(residual));
    }
    let mut values: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Kronecker product of complex column vectors, first factor most significant.
pub fn kron_vectors(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}
