mod common;

use num_complex::Complex64;
use simplexwalk_core::linalg::max_abs_diff;
use simplexwalk_core::scheme::directed_ngon;
use simplexwalk_core::walk::{projected_matrix, WalkSpec};
use simplexwalk_core::MultiIndex;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn triangle_three_copies_matches_published_matrix() {
    let base = directed_ngon(3).unwrap();
    for (w1, w2) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)), (c(0.3, -1.2), c(2.5, 0.7))] {
        let spec = WalkSpec::new(base.clone(), 3, vec![w1, w2]).unwrap();
        let pm = projected_matrix(&spec);
        assert!(max_abs_diff(&pm.entries, &common::triangle_n3(w1, w2)) < 1e-12);
    }
}

#[test]
fn triangle_order_is_graded_lex() {
    let spec = WalkSpec::canonical_ngon(3, 3).unwrap();
    let order: Vec<String> = projected_matrix(&spec).order.iter().map(MultiIndex::label).collect();
    assert_eq!(
        order,
        ["3-0-0", "2-1-0", "2-0-1", "1-2-0", "1-1-1", "1-0-2", "0-3-0", "0-2-1", "0-1-2", "0-0-3"]
    );
}

#[test]
fn published_matrix_is_hermitian_for_canonical_weights() {
    let spec = WalkSpec::canonical_ngon(3, 3).unwrap();
    let (w1, w2) = (spec.weights()[0], spec.weights()[1]);
    let m = common::triangle_n3(w1, w2);
    assert!(max_abs_diff(&m, &m.adjoint()) < 1e-15);
}
