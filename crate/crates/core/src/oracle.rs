//! Brute-force checks on the materialized `|X|^N`-point graph.
//!
//! Nothing here is used by the closed-form path; it exists so every closed form can be
//! compared against dense linear algebra at small sizes.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{big_to_f64, to_digits, ExtensionScheme, MultiIndex};
use crate::linalg::{evolve_hermitian, kron_vectors, max_abs_diff, CMatrix, CVector, I};
use crate::walk::{amplitudes, WalkSpec, HERMITIAN_TOL};

/// Largest `|X|^N` for dense evolution.
pub const EVOLUTION_GUARD: usize = 4096;

/// Largest `|X|^N` for full comparison sweeps.
pub const COMPARISON_GUARD: usize = 1024;

/// `sum_i w_i A_{(N-1)e_0 + e_i}` as a dense matrix.
pub fn dense_hamiltonian(spec: &WalkSpec, guard: usize) -> Result<CMatrix> {
    let ext = spec.extension();
    let order = ext.guarded_order(guard)?;
    let n = spec.copies();
    let classes = spec.base().classes();
    let mut out = CMatrix::zeros(order, order);
    if n == 0 {
        return Ok(out);
    }
    for (i, w) in spec.weights().iter().enumerate() {
        let mut beta = vec![0; classes];
        beta[0] = n - 1;
        beta[i + 1] = 1;
        let a = ext.materialize_class(&MultiIndex::new(beta), guard)?;
        out.zip_apply(&a, |m, v| *m += w * v as f64);
    }
    Ok(out)
}

/// `exp(-itM) e_start` from the closed-form base idempotents: the sum over all
/// arrangements `(j_1..j_N)` of `exp(-it sum_q mu_{j_q}) (E_{j_1} x .. x E_{j_N}) e_start`.
pub fn dense_evolution(spec: &WalkSpec, t: f64, start: usize, guard: usize) -> Result<CVector> {
    let ext = spec.extension();
    let order = ext.guarded_order(guard)?;
    check_vertex(start, order)?;
    let base = spec.base();
    let size = base.size();
    let classes = base.classes();
    let n = spec.copies();
    let mu = spec.base_eigenvalues();
    let digits = to_digits(start, size, n);
    let idempotents: Vec<CMatrix> = (0..classes).map(|j| base.idempotent(j)).collect();
    // columns[q][j] = E_j e_{x_q}
    let columns: Vec<Vec<CVector>> = digits
        .iter()
        .map(|&x| idempotents.iter().map(|e| e.column(x).into_owned()).collect())
        .collect();

    let mut out = CVector::zeros(order);
    let arrangements = classes.pow(n as u32);
    for a in 0..arrangements {
        let js = to_digits(a, classes, n);
        let lambda: Complex64 = js.iter().map(|&j| mu[j]).sum();
        let factors: Vec<CVector> = js.iter().zip(&columns).map(|(&j, cols)| cols[j].clone()).collect();
        out += kron_vectors(&factors) * (-I * t * lambda).exp();
    }
    Ok(out)
}

/// `exp(-itM) e_start` by dense Hermitian eigendecomposition of [`dense_hamiltonian`].
pub fn dense_evolution_spectral(spec: &WalkSpec, t: f64, start: usize, guard: usize) -> Result<CVector> {
    let m = dense_hamiltonian(spec, guard)?;
    check_vertex(start, m.nrows())?;
    let mut e = CVector::zeros(m.nrows());
    e[start] = Complex64::new(1.0, 0.0);
    evolve_hermitian(&m, t, &e, HERMITIAN_TOL)
}

fn check_vertex(v: usize, order: usize) -> Result<()> {
    if v >= order {
        return Err(Error::OutOfRange(format!("vertex {v} of a graph with {order} vertices")));
    }
    Ok(())
}

/// Class `beta` with `(x, y)` in `R_beta`: `beta_j` counts the coordinates where the
/// base relation between `x_q` and `y_q` is `j`. The vertices reached by `A_beta e_x`
/// are the `y` with `(y, x)` in `R_beta`.
pub fn class_of_pair(ext: &ExtensionScheme, x: usize, y: usize) -> MultiIndex {
    let base = ext.base();
    let size = base.size();
    let n = ext.copies();
    let mut beta = vec![0; base.classes()];
    for (xq, yq) in to_digits(x, size, n).into_iter().zip(to_digits(y, size, n)) {
        beta[base.relation_of(xq, yq)] += 1;
    }
    MultiIndex::new(beta)
}

/// Per-time residuals of [`compare_amplitudes`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeComparison {
    pub t: f64,
    /// Spread of the dense amplitudes within each class.
    pub constancy: f64,
    /// Largest `|dense - f_beta|`.
    pub closed_form: f64,
    /// Largest difference between the two dense evolution paths.
    pub paths: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub times: Vec<TimeComparison>,
    pub max_constancy: f64,
    pub max_closed_form: f64,
    pub max_paths: f64,
}

/// Compares dense evolution from vertex 0 with the closed-form coefficients at each time;
/// vertex `y` carries `f_beta` for the class `beta` of `(y, 0)`.
pub fn compare_amplitudes(spec: &WalkSpec, times: &[f64], guard: usize) -> Result<ComparisonReport> {
    let ext = spec.extension();
    let order = ext.guarded_order(guard)?;
    let classes: Vec<usize> = (0..order)
        .map(|y| ext.position(&class_of_pair(ext, y, 0)).expect("class of a pair is an index"))
        .collect();

    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let dense = dense_evolution(spec, t, 0, guard)?;
        let spectral = dense_evolution_spectral(spec, t, 0, guard)?;
        let profile = amplitudes(spec, t);
        let paths = dense
            .iter()
            .zip(spectral.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);

        let mut first: Vec<Option<Complex64>> = vec![None; ext.index_set().len()];
        let mut constancy: f64 = 0.0;
        let mut closed_form: f64 = 0.0;
        for (y, &cls) in classes.iter().enumerate() {
            let v = dense[y];
            match first[cls] {
                Some(f) => constancy = constancy.max((v - f).norm()),
                None => first[cls] = Some(v),
            }
            closed_form = closed_form.max((v - profile.sites[cls].coefficient).norm());
        }
        rows.push(TimeComparison {
            t,
            constancy,
            closed_form,
            paths,
        });
    }
    Ok(ComparisonReport {
        max_constancy: rows.iter().map(|r| r.constancy).fold(0.0, f64::max),
        max_closed_form: rows.iter().map(|r| r.closed_form).fold(0.0, f64::max),
        max_paths: rows.iter().map(|r| r.paths).fold(0.0, f64::max),
        times: rows,
    })
}

/// Orthonormal site vectors `Y_beta = A_beta e_0 / sqrt(k_beta)` as columns, index-set order.
pub fn site_basis(ext: &ExtensionScheme, guard: usize) -> Result<CMatrix> {
    let order = ext.guarded_order(guard)?;
    let mut y = CMatrix::zeros(order, ext.index_set().len());
    for v in 0..order {
        let cls = ext.position(&class_of_pair(ext, v, 0)).expect("class of a pair is an index");
        y[(v, cls)] = Complex64::new(1.0, 0.0);
    }
    for (col, beta) in ext.index_set().iter().enumerate() {
        let k = big_to_f64(&ext.class_valency(beta)?);
        y.column_mut(col).scale_mut(1.0 / k.sqrt());
    }
    Ok(y)
}

/// Dense `M` compressed to the site module, in the same orientation as
/// [`crate::walk::ProjectedMatrix`] (entry `(beta, gamma)` is `<Y_gamma| M |Y_beta>`).
pub fn dense_projected_matrix(spec: &WalkSpec, guard: usize) -> Result<CMatrix> {
    let m = dense_hamiltonian(spec, guard)?;
    let y = site_basis(spec.extension(), guard)?;
    Ok((y.adjoint() * m * y).transpose())
}

/// Cosines of the extension from dense matrices: `tr(A_beta E_alpha) / (m_alpha k_beta)`,
/// with `E_alpha` summed over the arrangements of `alpha`. Rows `alpha`, columns `beta`.
pub fn dense_extension_cosine(ext: &ExtensionScheme, guard: usize) -> Result<CMatrix> {
    let order = ext.guarded_order(guard)?;
    let base = ext.base();
    let size = base.size();
    let classes = base.classes();
    let n = ext.copies();
    let idempotents: Vec<CMatrix> = (0..classes).map(|j| base.idempotent(j)).collect();
    let index = ext.index_set();

    let mut e_alpha: Vec<CMatrix> = vec![CMatrix::zeros(order, order); index.len()];
    for a in 0..classes.pow(n as u32) {
        let js = to_digits(a, classes, n);
        let mut counts = vec![0; classes];
        for &j in &js {
            counts[j] += 1;
        }
        let pos = ext.position(&MultiIndex::new(counts)).expect("arrangement content is an index");
        let mut e = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for &j in &js {
            e = e.kronecker(&idempotents[j]);
        }
        e_alpha[pos] += e;
    }
    debug_assert_eq!(size.pow(n as u32), order);

    let mut out = CMatrix::zeros(index.len(), index.len());
    for (col, beta) in index.iter().enumerate() {
        let a = ext.materialize_class(beta, guard)?;
        let k = big_to_f64(&ext.class_valency(beta)?);
        for (row, e) in e_alpha.iter().enumerate() {
            let trace: Complex64 = (0..order)
                .flat_map(|x| (0..order).map(move |y| (x, y)))
                .filter(|&(x, y)| a[(x, y)] != 0)
                .map(|(x, y)| e[(y, x)] * a[(x, y)] as f64)
                .sum();
            let rank = e.trace();
            out[(row, col)] = trace / (rank * k);
        }
    }
    Ok(out)
}

/// Largest entrywise gap between [`dense_extension_cosine`] and the Krawtchouk cosines.
pub fn extension_cosine_residual(ext: &ExtensionScheme, guard: usize) -> Result<f64> {
    Ok(max_abs_diff(&dense_extension_cosine(ext, guard)?, &ext.cosine_matrix()))
}
