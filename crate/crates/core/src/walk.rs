//! Continuous-time walks generated by `M = sum_i w_i A_{(N-1)e_0 + e_i}` on `Sym(X, N)`.
//!
//! `M` is the Kronecker sum of `N` copies of `R = sum_i w_i A_i`, so its spectrum and the
//! amplitudes of `exp(-itM)` factor through the base scheme. With `mu_l = sum_i w_i P_{l,i}`
//! the eigenvalue on `E_alpha` is `sum_j alpha_j mu_j`, and starting from a point the walk
//! stays in the span of the sites `Y_beta = A_beta |x_0> / sqrt(k_beta)`:
//!
//! ```text
//! f_beta(t) = exp(-itN mu_0) / |X|^N * prod_k p_k^{beta_k}
//! p_k       = 1 + sum_{l>=1} conj(c_{l,k}) m_l z_l,     z_l = exp(it (mu_0 - mu_l))
//! ```

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{big_to_f64, ExtensionScheme, MultiIndex};
use crate::linalg::{evolve_hermitian, hermitian_residual, root_of_unity, CMatrix, CVector, I};
use crate::scheme::AssociationScheme;

/// Tolerance for the weight Hermiticity condition `w_{i'} = conj(w_i)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative tolerance `|p_k| / |X|` below which a factor counts as vanishing.
pub const VANISH_TOL: f64 = 1e-9;

/// Tolerance on `sum_beta k_beta |f_beta|^2 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A walk: base scheme, number of copies, and one weight per non-identity class.
#[derive(Clone, Debug)]
pub struct WalkSpec {
    extension: ExtensionScheme,
    weights: Vec<Complex64>,
    hermitian_residual: f64,
}

impl WalkSpec {
    /// Accepts any weights of the right length; check [`WalkSpec::is_hermitian`] before
    /// relying on unitarity.
    pub fn new(base: AssociationScheme, copies: usize, weights: Vec<Complex64>) -> Result<Self> {
        let d = base.class_number();
        if weights.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} weights supplied for a scheme with {d} classes",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        let tm = base.transpose_map();
        let hermitian_residual = (1..=d)
            .map(|i| (weights[tm[i] - 1] - weights[i - 1].conj()).norm())
            .fold(0.0, f64::max);
        Ok(Self {
            extension: ExtensionScheme::new(base, copies),
            weights,
            hermitian_residual,
        })
    }

    /// Like [`WalkSpec::new`] but rejects non-Hermitian weights.
    pub fn hermitian(base: AssociationScheme, copies: usize, weights: Vec<Complex64>) -> Result<Self> {
        let spec = Self::new(base, copies, weights)?;
        if !spec.is_hermitian() {
            return Err(Error::NotHermitian(spec.hermitian_residual));
        }
        Ok(spec)
    }

    /// Directed `n`-gon with the weights `w_j = 1/(zeta^{-j} - 1)`.
    pub fn canonical_ngon(n: usize, copies: usize) -> Result<Self> {
        let base = crate::scheme::directed_ngon(n)?;
        Self::new(base, copies, canonical_ngon_weights(n))
    }

    pub fn base(&self) -> &AssociationScheme {
        self.extension.base()
    }

    pub fn extension(&self) -> &ExtensionScheme {
        &self.extension
    }

    pub fn copies(&self) -> usize {
        self.extension.copies()
    }

    /// `w_1..w_d`.
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.hermitian_residual
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual <= HERMITIAN_TOL
    }

    /// Eigenvalues `mu_0..mu_d` of the single-copy operator `R = sum_i w_i A_i`.
    pub fn base_eigenvalues(&self) -> Vec<Complex64> {
        let p = self.base().first_eigenmatrix();
        (0..p.nrows())
            .map(|l| self.weights.iter().enumerate().map(|(i, w)| w * p[(l, i + 1)]).sum())
            .collect()
    }
}

/// `w_j = 1/(zeta^{-j} - 1)` for `j = 1..n-1`; exactly Hermitian.
pub fn canonical_ngon_weights(n: usize) -> Vec<Complex64> {
    (1..n)
        .map(|j| Complex64::new(1.0, 0.0) / (root_of_unity(n, -(j as i64)) - 1.0))
        .collect()
}

/// `lambda_alpha = sum_j alpha_j mu_j`.
pub fn eigenvalue_lambda(spec: &WalkSpec, alpha: &MultiIndex) -> Result<Complex64> {
    spec.extension.check_index(alpha)?;
    Ok(spec
        .base_eigenvalues()
        .iter()
        .zip(alpha.entries())
        .map(|(mu, &a)| mu * a as f64)
        .sum())
}

/// `z_1..z_d` at time `t`.
pub fn z_factors(spec: &WalkSpec, t: f64) -> Vec<Complex64> {
    let mu = spec.base_eigenvalues();
    mu[1..].iter().map(|m| (I * t * (mu[0] - m)).exp()).collect()
}

/// `p_0..p_d` at time `t`.
pub fn p_values(spec: &WalkSpec, t: f64) -> Vec<Complex64> {
    p_from_z(spec.base(), &z_factors(spec, t))
}

fn p_from_z(base: &AssociationScheme, z: &[Complex64]) -> Vec<Complex64> {
    let c = base.cosine();
    let m = base.multiplicities();
    (0..c.ncols())
        .map(|k| {
            z.iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (l, zl)| {
                    acc + c[(l + 1, k)].conj() * m[l + 1] as f64 * zl
                })
        })
        .collect()
}

/// Indices `k` with `|p_k| / |X| <= tol`.
pub fn vanishing_factors(spec: &WalkSpec, t: f64, tol: f64) -> Vec<usize> {
    let scale = spec.base().size() as f64;
    p_values(spec, t)
        .iter()
        .enumerate()
        .filter(|(_, p)| p.norm() / scale <= tol)
        .map(|(k, _)| k)
        .collect()
}

/// One site of an [`AmplitudeProfile`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteAmplitude {
    pub beta: MultiIndex,
    /// `f_beta(t)`, the common amplitude on every vertex of class `beta`.
    pub coefficient: Complex64,
    /// `f_beta(t) sqrt(k_beta)`, the amplitude on `|Y_beta>`.
    pub site_amplitude: Complex64,
    /// `k_beta |f_beta(t)|^2`.
    pub probability: f64,
}

/// The state `exp(-itM)|x_0>` resolved over the sites, in index-set order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeProfile {
    pub time: f64,
    pub hermitian: bool,
    pub sites: Vec<SiteAmplitude>,
}

impl AmplitudeProfile {
    pub fn total_probability(&self) -> f64 {
        self.sites.iter().map(|s| s.probability).sum()
    }

    pub fn normalization_residual(&self) -> f64 {
        (self.total_probability() - 1.0).abs()
    }

    pub fn site(&self, beta: &MultiIndex) -> Option<&SiteAmplitude> {
        self.sites.iter().find(|s| &s.beta == beta)
    }

    pub fn coefficient(&self, beta: &MultiIndex) -> Option<Complex64> {
        self.site(beta).map(|s| s.coefficient)
    }

    pub fn probability(&self, beta: &MultiIndex) -> Option<f64> {
        self.site(beta).map(|s| s.probability)
    }

    /// `(f_beta sqrt(k_beta))_beta` as a vector in index-set order.
    pub fn site_vector(&self) -> CVector {
        CVector::from_iterator(self.sites.len(), self.sites.iter().map(|s| s.site_amplitude))
    }
}

/// Closed-form amplitudes at time `t`.
pub fn amplitudes(spec: &WalkSpec, t: f64) -> AmplitudeProfile {
    let size = spec.base().size() as f64;
    let n_copies = spec.copies() as f64;
    let mu0 = spec.base_eigenvalues()[0];
    let global = (-I * t * n_copies * mu0).exp();
    let scaled: Vec<Complex64> = p_values(spec, t).iter().map(|p| p / size).collect();

    let sites = spec
        .extension
        .index_set()
        .iter()
        .map(|beta| {
            let coefficient = beta
                .entries()
                .iter()
                .zip(&scaled)
                .fold(global, |acc, (&b, p)| acc * p.powu(b as u32));
            let valency = big_to_f64(&spec.extension.class_valency(beta).expect("member of the index set"));
            SiteAmplitude {
                beta: beta.clone(),
                coefficient,
                site_amplitude: coefficient * valency.sqrt(),
                probability: valency * coefficient.norm_sqr(),
            }
        })
        .collect();

    AmplitudeProfile {
        time: t,
        hermitian: spec.is_hermitian(),
        sites,
    }
}

/// [`amplitudes`] over many times, evaluated in parallel; output order follows `times`.
pub fn sweep(spec: &WalkSpec, times: &[f64]) -> Vec<AmplitudeProfile> {
    times.par_iter().map(|&t| amplitudes(spec, t)).collect()
}

/// `steps + 1` equally spaced points covering `[t_min, t_max]`.
pub fn time_grid(t_min: f64, t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![t_min];
    }
    let h = (t_max - t_min) / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { t_max } else { t_min + h * i as f64 })
        .collect()
}

/// Result of [`solve_weights`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSolution {
    pub weights: Vec<Complex64>,
    pub hermiticity_residual: f64,
    pub round_trip_residual: f64,
}

/// Weights with `z_l(t) = exp(i target_args_l)`: solves `P~ w = target_args / t` where
/// `P~_{l,i} = P_{0,i} - P_{l,i}`. The arguments are used as given, so adding `2 pi`
/// to a target changes the solution while leaving the phases at `t` unchanged.
pub fn solve_weights(s: &AssociationScheme, t: f64, target_args: &[f64]) -> Result<WeightSolution> {
    let d = s.class_number();
    if target_args.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} target phases for a scheme with {d} classes",
            target_args.len()
        )));
    }
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("solve time must be finite and nonzero, got {t}")));
    }
    let p = s.first_eigenmatrix();
    let p_tilde = CMatrix::from_fn(d, d, |l, i| p[(0, i + 1)] - p[(l + 1, i + 1)]);
    let rhs = DVector::from_iterator(d, target_args.iter().map(|a| Complex64::new(a / t, 0.0)));
    let solution = p_tilde.lu().solve(&rhs).ok_or(Error::Singular)?;
    if solution.iter().any(|w| !w.is_finite()) {
        return Err(Error::Singular);
    }
    let weights: Vec<Complex64> = solution.iter().copied().collect();

    let spec = WalkSpec::new(s.clone(), 1, weights.clone())?;
    let round_trip_residual = z_factors(&spec, t)
        .iter()
        .zip(target_args)
        .map(|(z, a)| (z - Complex64::from_polar(1.0, *a)).norm())
        .fold(0.0, f64::max);
    if round_trip_residual > 1e-9 {
        return Err(Error::RoundTrip(round_trip_residual));
    }
    Ok(WeightSolution {
        weights,
        hermiticity_residual: spec.hermiticity_residual(),
        round_trip_residual,
    })
}

/// [`solve_weights`] for target phases given as unit complex numbers, using principal
/// arguments in `(-pi, pi]`.
pub fn solve_weights_for_phases(s: &AssociationScheme, t: f64, targets: &[Complex64]) -> Result<WeightSolution> {
    let args: Vec<f64> = targets.iter().map(|z| principal_arg(*z)).collect();
    solve_weights(s, t, &args)
}

fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// `B_M` over the sites, rows and columns in index-set order.
///
/// Entry `(beta, gamma)` is the coefficient of `|Y_gamma>` in `M |Y_beta>`, so the matrix
/// acting on coefficient vectors is the transpose; [`evolve_projected`] accounts for this.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedMatrix {
    pub order: Vec<MultiIndex>,
    pub entries: CMatrix,
}

impl ProjectedMatrix {
    pub fn dimension(&self) -> usize {
        self.order.len()
    }

    pub fn position(&self, beta: &MultiIndex) -> Option<usize> {
        self.order.iter().position(|b| b == beta)
    }

    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.entries)
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        crate::linalg::hermitian_eigenvalues(&self.entries, 1e-10)
    }
}

/// Diagonal `sum_i w_i sum_j beta_j p_{ij}^j`; off-diagonal entry at
/// `gamma = beta - e_s + e_t` equal to `sqrt(beta_s (beta_t + 1)) sqrt(k_t / k_s) sum_i w_i p_{is}^t`.
pub fn projected_matrix(spec: &WalkSpec) -> ProjectedMatrix {
    let ext = &spec.extension;
    let base = spec.base();
    let pn = base.intersection();
    let k = base.valencies();
    let w = &spec.weights;
    let classes = base.classes();
    let order = ext.index_set().to_vec();
    let dim = order.len();
    let mut entries = CMatrix::zeros(dim, dim);

    // sum_i w_i p_{is}^t
    let hop = |s: usize, t: usize| -> Complex64 {
        w.iter()
            .enumerate()
            .map(|(i, wi)| wi * pn.get(i + 1, s, t) as f64)
            .sum()
    };

    for (row, beta) in order.iter().enumerate() {
        let b = beta.entries();
        entries[(row, row)] = (0..classes).map(|j| hop(j, j) * b[j] as f64).sum();
        for s in 0..classes {
            for t in 0..classes {
                if s == t {
                    continue;
                }
                let Some(gamma) = beta.moved(s, t) else { continue };
                let col = ext.position(&gamma).expect("moves stay in the index set");
                let scale = (b[s] as f64 * (b[t] + 1) as f64).sqrt() * (k[t] as f64 / k[s] as f64).sqrt();
                entries[(row, col)] = hop(s, t) * scale;
            }
        }
    }
    ProjectedMatrix { order, entries }
}

/// `exp(-itM)` applied to `|Y_start>` inside the site module, by spectral decomposition.
/// The result lists amplitudes on `|Y_beta>` in `pm.order`.
pub fn evolve_projected(pm: &ProjectedMatrix, t: f64, start: &MultiIndex) -> Result<CVector> {
    let pos = pm
        .position(start)
        .ok_or_else(|| Error::OutOfRange(format!("{start} is not a site of this matrix")))?;
    let mut state = CVector::zeros(pm.dimension());
    state[pos] = Complex64::new(1.0, 0.0);
    evolve_hermitian(&pm.entries.transpose(), t, &state, HERMITIAN_TOL)
}
