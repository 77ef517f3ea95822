//! Multivariate Krawtchouk polynomials of Griffiths type with complex coefficients.
//!
//! `K(n, n~, N, U)` is defined through the generating function
//!
//! ```text
//! prod_i (1 + sum_{j>=1} u_{i,j} z_j)^{n~_i} = sum_n multinomial(N; n) K(n, n~) z^n
//! ```
//!
//! and is evaluated two independent ways: by expanding that product as a sparse
//! polynomial ([`krawtchouk_genfun`]) and by the Aomoto-Gelfand hypergeometric sum over
//! `d x d` matrices ([`krawtchouk_series`]). The cosine matrix of `Sym(X, N)` is
//! `c_{alpha,beta} = K(beta, alpha, N, C)` for the base cosine matrix `C`.

mod bivariate;

pub use bivariate::{
    bivariate_g, bivariate_g_tilde, bivariate_orthogonality_residual, bivariate_recurrence_residual,
    bivariate_weight, lambda_one, lambda_two,
};

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{check_weight, enumerate_indices, factorial, multinomial, big_to_f64, MultiIndex};
use crate::linalg::{max_abs_diff, CMatrix};
use crate::scheme::AssociationScheme;

/// Tolerance on the unitarity relation of [`GriffithsParams`].
pub const PARAMS_TOL: f64 = 1e-8;

/// `(nu, P, P~, U)` with `P = diag(p)`, `P~ = diag(p~)`, `p_0 = p~_0 = 1/nu`, unit first
/// row and column of `U`, and `nu P U P~ U^dagger = I`.
#[derive(Clone, Debug)]
pub struct GriffithsParams {
    nu: f64,
    p: Vec<f64>,
    p_tilde: Vec<f64>,
    u: CMatrix,
}

impl GriffithsParams {
    pub fn new(nu: f64, p: Vec<f64>, p_tilde: Vec<f64>, u: CMatrix) -> Result<Self> {
        let size = p.len();
        if nu == 0.0 {
            return Err(Error::InvalidParameter("nu must be nonzero".into()));
        }
        if p_tilde.len() != size || u.shape() != (size, size) || size == 0 {
            return Err(Error::DimensionMismatch("p, p~ and U must agree in size".into()));
        }
        let params = Self { nu, p, p_tilde, u };
        let residual = params.invariant_residual();
        if residual > PARAMS_TOL {
            return Err(Error::ParamsInvariant(residual));
        }
        Ok(params)
    }

    /// `d`.
    pub fn dimension(&self) -> usize {
        self.p.len() - 1
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn p_tilde(&self) -> &[f64] {
        &self.p_tilde
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    /// Largest violation among `p_0 = p~_0 = 1/nu`, the unit border of `U`, and
    /// `nu P U P~ U^dagger = I`.
    pub fn invariant_residual(&self) -> f64 {
        let size = self.p.len();
        let pm = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(size, self.p.iter().map(|&v| c(v))));
        let ptm = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(size, self.p_tilde.iter().map(|&v| c(v))));
        let product = pm * &self.u * ptm * self.u.adjoint() * c(self.nu);
        let mut residual = max_abs_diff(&product, &CMatrix::identity(size, size));
        residual = residual
            .max((self.p[0] - 1.0 / self.nu).abs())
            .max((self.p_tilde[0] - 1.0 / self.nu).abs());
        for i in 0..size {
            residual = residual
                .max((self.u[(0, i)] - c(1.0)).norm())
                .max((self.u[(i, 0)] - c(1.0)).norm());
        }
        residual
    }
}

/// Parameters attached to a scheme: `nu = |X|`, `p = m/|X|`, `p~ = k/|X|`, `U = C`.
pub fn params_from_scheme(s: &AssociationScheme) -> Result<GriffithsParams> {
    let size = s.size() as f64;
    GriffithsParams::new(
        size,
        s.multiplicities().iter().map(|&m| m as f64 / size).collect(),
        s.valencies().iter().map(|&k| k as f64 / size).collect(),
        s.cosine().clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrawtchoukValue {
    pub n: MultiIndex,
    pub n_tilde: MultiIndex,
    pub value: Complex64,
}

/// Rising factorial `x (x+1) .. (x+r-1)`, one when `r = 0`.
pub fn pochhammer(x: Complex64, r: usize) -> Complex64 {
    (0..r).fold(c(1.0), |acc, k| acc * (x + k as f64))
}

/// Exact rising factorial of an integer.
pub fn pochhammer_int(x: i64, r: usize) -> BigInt {
    (0..r as i64).fold(BigInt::one(), |acc, k| acc * BigInt::from(x + k))
}

/// Aomoto-Gelfand sum for `K(n, n~, N, U)` with `omega_{i,j} = 1 - u_{i,j}`.
///
/// Matrices `A = (a_{ij})_{1<=i,j<=d}` are enumerated with row sums bounded by `n~_i` and
/// column sums bounded by `n_j`; every other matrix carries a vanishing Pochhammer factor.
/// Each term's rational part is computed exactly before conversion to floating point.
pub fn krawtchouk_series(n: &MultiIndex, n_tilde: &MultiIndex, copies: usize, u: &CMatrix) -> Result<Complex64> {
    let d = check_pair(n, n_tilde, copies, u)?;
    let omega = CMatrix::from_fn(d, d, |i, j| c(1.0) - u[(i + 1, j + 1)]);
    let col_cap: Vec<usize> = n.entries()[1..].to_vec();
    let row_cap: Vec<usize> = n_tilde.entries()[1..].to_vec();

    let mut state = SeriesState {
        d,
        copies,
        omega: &omega,
        n: &col_cap,
        n_tilde: &row_cap,
        cells: vec![0; d * d],
        row_sum: vec![0; d],
        col_sum: vec![0; d],
        total: c(0.0),
        factorials: (0..=copies).map(factorial).collect(),
    };
    state.visit(0);
    Ok(state.total)
}

struct SeriesState<'a> {
    d: usize,
    copies: usize,
    omega: &'a CMatrix,
    n: &'a [usize],
    n_tilde: &'a [usize],
    cells: Vec<usize>,
    row_sum: Vec<usize>,
    col_sum: Vec<usize>,
    total: Complex64,
    factorials: Vec<BigUint>,
}

impl SeriesState<'_> {
    fn visit(&mut self, cell: usize) {
        if cell == self.d * self.d {
            self.total += self.term();
            return;
        }
        let (i, j) = (cell / self.d, cell % self.d);
        let room = (self.n_tilde[i] - self.row_sum[i]).min(self.n[j] - self.col_sum[j]);
        for a in 0..=room {
            self.cells[cell] = a;
            self.row_sum[i] += a;
            self.col_sum[j] += a;
            self.visit(cell + 1);
            self.row_sum[i] -= a;
            self.col_sum[j] -= a;
        }
        self.cells[cell] = 0;
    }

    fn term(&self) -> Complex64 {
        let f = &self.factorials;
        let s: usize = self.cells.iter().sum();
        // prod_j (-n_j)_{c_j} prod_i (-n~_i)_{r_i} / ((-N)_s prod a_ij!)
        //   = (-1)^s prod_j n_j!/(n_j-c_j)! prod_i n~_i!/(n~_i-r_i)! (N-s)! / (N! prod a_ij!)
        let mut num = f[self.copies - s].clone();
        for j in 0..self.d {
            num *= &f[self.n[j]];
        }
        for i in 0..self.d {
            num *= &f[self.n_tilde[i]];
        }
        let mut den = f[self.copies].clone();
        for j in 0..self.d {
            den *= &f[self.n[j] - self.col_sum[j]];
        }
        for i in 0..self.d {
            den *= &f[self.n_tilde[i] - self.row_sum[i]];
        }
        for &a in &self.cells {
            den *= &f[a];
        }
        let ratio = BigRational::new(BigInt::from(num), BigInt::from(den))
            .to_f64()
            .expect("finite rational");
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        let powers = self
            .cells
            .iter()
            .enumerate()
            .fold(c(1.0), |acc, (cell, &a)| acc * self.omega[(cell / self.d, cell % self.d)].powu(a as u32));
        powers * (sign * ratio)
    }
}

/// Expands `prod_i (1 + sum_j u_{i,j} z_j)^{n~_i}` and reads off `K(n, n~)` for every `n`.
pub fn krawtchouk_genfun(n_tilde: &MultiIndex, copies: usize, u: &CMatrix) -> Result<BTreeMap<MultiIndex, Complex64>> {
    let classes = u.nrows();
    if u.ncols() != classes || n_tilde.len() != classes {
        return Err(Error::DimensionMismatch(format!(
            "index {n_tilde} does not fit a {}x{} matrix",
            u.nrows(),
            u.ncols()
        )));
    }
    check_weight(n_tilde, copies)?;
    let d = classes - 1;

    // Monomials keyed by (z_1..z_d) exponents.
    let mut poly: HashMap<Vec<usize>, Complex64> = HashMap::from([(vec![0; d], c(1.0))]);
    for (i, &power) in n_tilde.entries().iter().enumerate() {
        for _ in 0..power {
            let mut next: HashMap<Vec<usize>, Complex64> = HashMap::with_capacity(poly.len() * (d + 1));
            for (mono, coeff) in &poly {
                *next.entry(mono.clone()).or_insert(c(0.0)) += coeff;
                for j in 1..=d {
                    let mut m = mono.clone();
                    m[j - 1] += 1;
                    *next.entry(m).or_insert(c(0.0)) += coeff * u[(i, j)];
                }
            }
            poly = next;
        }
    }

    let mut out = BTreeMap::new();
    for n in enumerate_indices(copies, d) {
        let coeff = poly.get(&n.entries()[1..]).copied().unwrap_or(c(0.0));
        out.insert(n.clone(), coeff / big_to_f64(&multinomial(copies, &n)?));
    }
    Ok(out)
}

/// Residual of both orthogonality relations
///
/// ```text
/// N! sum_n conj(K(n,a)) K(n,b) p~^n / n! = delta_{a,b} a! / (N! nu^N p^a)
/// N! sum_a conj(K(n,a)) K(k,a) p^a / a!  = delta_{n,k} n! / (N! nu^N p~^n)
/// ```
///
/// maximised over all index pairs.
pub fn orthogonality_residual(gp: &GriffithsParams, copies: usize) -> f64 {
    let d = gp.dimension();
    let indices = enumerate_indices(copies, d);
    // table[a][n] = K(n, a)
    let table: Vec<Vec<Complex64>> = indices
        .iter()
        .map(|a| {
            let row = krawtchouk_genfun(a, copies, gp.u()).expect("indices have weight N");
            indices.iter().map(|n| row[n]).collect()
        })
        .collect();
    let multi: Vec<f64> = indices.iter().map(|n| big_to_f64(&multinomial(copies, n).unwrap())).collect();
    let power = |weights: &[f64], idx: &MultiIndex| -> f64 {
        weights.iter().zip(idx.entries()).map(|(w, &e)| w.powi(e as i32)).product()
    };
    let nu_n = gp.nu().powi(copies as i32);

    let mut residual: f64 = 0.0;
    for (a, ia) in indices.iter().enumerate() {
        for (b, _) in indices.iter().enumerate() {
            let lhs: Complex64 = indices
                .iter()
                .enumerate()
                .map(|(n, in_)| table[a][n].conj() * table[b][n] * multi[n] * power(gp.p_tilde(), in_))
                .sum();
            let rhs = if a == b { 1.0 / (multi[a] * nu_n * power(gp.p(), ia)) } else { 0.0 };
            residual = residual.max((lhs - c(rhs)).norm());

            let lhs: Complex64 = indices
                .iter()
                .enumerate()
                .map(|(t, it)| table[t][a].conj() * table[t][b] * multi[t] * power(gp.p(), it))
                .sum();
            let rhs = if a == b { 1.0 / (multi[a] * nu_n * power(gp.p_tilde(), ia)) } else { 0.0 };
            residual = residual.max((lhs - c(rhs)).norm());
        }
    }
    residual
}

fn check_pair(n: &MultiIndex, n_tilde: &MultiIndex, copies: usize, u: &CMatrix) -> Result<usize> {
    let classes = u.nrows();
    if u.ncols() != classes || n.len() != classes || n_tilde.len() != classes {
        return Err(Error::DimensionMismatch(format!(
            "indices {n}, {n_tilde} do not fit a {}x{} matrix",
            u.nrows(),
            u.ncols()
        )));
    }
    check_weight(n, copies)?;
    check_weight(n_tilde, copies)?;
    Ok(classes - 1)
}

pub(crate) fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}
