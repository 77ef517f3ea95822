//! Self-check suites run by `simplexwalk verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use simplexwalk_core::extension::{enumerate_indices, ExtensionScheme};
use simplexwalk_core::krawtchouk::{
    bivariate_orthogonality_residual, bivariate_recurrence_residual, krawtchouk_genfun, krawtchouk_series,
    orthogonality_residual, params_from_scheme,
};
use simplexwalk_core::linalg::max_abs_diff;
use simplexwalk_core::oracle::{compare_amplitudes, dense_projected_matrix, extension_cosine_residual};
use simplexwalk_core::scheme::{directed_ngon, ordered_word_scheme, trivial_scheme_2, AssociationScheme};
use simplexwalk_core::walk::{amplitudes, evolve_projected, projected_matrix, WalkSpec};
use simplexwalk_core::Result as CoreResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Axioms,
    Krawtchouk,
    Amplitudes,
    Bmatrix,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Collector {
    suite: &'static str,
    checks: Vec<CheckResult>,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, tolerance: f64, residual: CoreResult<f64>) {
        let (residual, error) = match residual {
            Ok(r) => (r, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        self.checks.push(CheckResult {
            suite: self.suite,
            name: name.into(),
            residual,
            tolerance,
            passed: error.is_none() && residual <= tolerance,
            error,
        });
    }
}

fn base_schemes() -> Vec<AssociationScheme> {
    let mut out = vec![trivial_scheme_2()];
    out.extend((1..=7).map(|n| directed_ngon(n).expect("n >= 1")));
    out.extend((1..=4).map(|d| ordered_word_scheme(d).expect("d >= 1")));
    out
}

fn axioms() -> Vec<CheckResult> {
    let mut c = Collector::new("axioms");
    for s in base_schemes() {
        let report = s.validate();
        for check in &report.checks {
            let residual = if check.passed { check.residual } else { f64::INFINITY };
            c.record(format!("{} {}", s.name(), check.name), 1e-10, Ok(residual));
        }
    }
    c.checks
}

fn krawtchouk() -> Vec<CheckResult> {
    let mut c = Collector::new("krawtchouk");
    for s in [trivial_scheme_2(), directed_ngon(3).unwrap(), ordered_word_scheme(2).unwrap()] {
        let d = s.class_number();
        for copies in 0..=4 {
            let gap = (|| {
                let mut worst: f64 = 0.0;
                for tilde in enumerate_indices(copies, d) {
                    for (n, v) in krawtchouk_genfun(&tilde, copies, s.cosine())? {
                        worst = worst.max((krawtchouk_series(&n, &tilde, copies, s.cosine())? - v).norm());
                    }
                }
                Ok(worst)
            })();
            c.record(format!("{} N={copies} series vs generating function", s.name()), 1e-10, gap);
            let ortho = params_from_scheme(&s).map(|gp| orthogonality_residual(&gp, copies));
            c.record(format!("{} N={copies} orthogonality", s.name()), 1e-10, ortho);
        }
    }
    let w = WalkSpec::canonical_ngon(3, 1).unwrap().weights().to_vec();
    for copies in 0..=4 {
        c.record(
            format!("bivariate N={copies} orthogonality"),
            1e-10,
            Ok(bivariate_orthogonality_residual(copies)),
        );
        c.record(
            format!("bivariate N={copies} recurrence"),
            1e-9,
            Ok(bivariate_recurrence_residual(copies, w[0], w[1])),
        );
    }
    for copies in 1..=3 {
        let ext = ExtensionScheme::new(directed_ngon(3).unwrap(), copies);
        c.record(
            format!("ngon3 N={copies} extension cosine vs dense"),
            1e-9,
            extension_cosine_residual(&ext, guard_for_checks()),
        );
    }
    c.checks
}

fn guard_for_checks() -> usize {
    crate::guard_from_env(simplexwalk_core::oracle::EVOLUTION_GUARD)
}

fn sample_times(count: usize) -> Vec<f64> {
    // deterministic, irregular spacing
    (0..count).map(|i| (i as f64 * 0.618_033_988_749_895 * 7.0) % (2.0 * PI)).collect()
}

fn oracle_specs() -> Vec<WalkSpec> {
    let mut specs: Vec<WalkSpec> = (1..=4).map(|n| WalkSpec::canonical_ngon(3, n).unwrap()).collect();
    specs.extend((1..=6).map(|n| WalkSpec::new(trivial_scheme_2(), n, vec![Complex64::new(1.0, 0.0)]).unwrap()));
    let ow = ordered_word_scheme(3).unwrap();
    let w = vec![Complex64::new(0.4, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(2.0, 0.0)];
    specs.extend((1..=2).map(|n| WalkSpec::new(ow.clone(), n, w.clone()).unwrap()));
    specs
}

fn amplitude_checks() -> Vec<CheckResult> {
    let mut c = Collector::new("amplitudes");
    let guard = crate::guard_from_env(simplexwalk_core::oracle::COMPARISON_GUARD);
    let times = sample_times(20);
    for spec in oracle_specs() {
        let label = format!("{} N={}", spec.base().name(), spec.copies());
        match compare_amplitudes(&spec, &times, guard) {
            Ok(r) => {
                c.record(format!("{label} closed form vs dense"), 1e-9, Ok(r.max_closed_form));
                c.record(format!("{label} class constancy"), 1e-10, Ok(r.max_constancy));
                c.record(format!("{label} dense paths"), 1e-10, Ok(r.max_paths));
            }
            Err(e) => c.record(format!("{label} closed form vs dense"), 1e-9, Err(e)),
        }
        let norm = times
            .iter()
            .map(|&t| amplitudes(&spec, t).normalization_residual())
            .fold(0.0, f64::max);
        c.record(format!("{label} normalization"), 1e-10, Ok(norm));
    }
    c.checks
}

fn bmatrix_checks() -> Vec<CheckResult> {
    let mut c = Collector::new("bmatrix");
    let guard = guard_for_checks();
    for spec in oracle_specs() {
        let label = format!("{} N={}", spec.base().name(), spec.copies());
        let pm = projected_matrix(&spec);
        c.record(format!("{label} Hermitian"), 1e-12, Ok(pm.hermitian_residual()));
        c.record(
            format!("{label} vs dense compression"),
            1e-12,
            dense_projected_matrix(&spec, guard).map(|d| max_abs_diff(&d, &pm.entries)),
        );
        let start = spec.extension().extreme(0);
        let gap = (|| {
            let mut worst: f64 = 0.0;
            for t in sample_times(5) {
                let state = evolve_projected(&pm, t, &start)?;
                worst = worst.max((state - amplitudes(&spec, t).site_vector()).camax());
            }
            Ok(worst)
        })();
        c.record(format!("{label} evolution vs closed form"), 1e-9, gap);
    }
    c.checks
}

pub fn verify(suite: Suite) -> VerifyReport {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Axioms {
        checks.extend(axioms());
    }
    if all || suite == Suite::Krawtchouk {
        checks.extend(krawtchouk());
    }
    if all || suite == Suite::Amplitudes {
        checks.extend(amplitude_checks());
    }
    if all || suite == Suite::Bmatrix {
        checks.extend(bmatrix_checks());
    }
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
