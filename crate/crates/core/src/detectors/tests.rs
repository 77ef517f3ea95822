use std::collections::BTreeSet;

use super::*;
use crate::walk::{p_values, projected_matrix, evolve_projected, time_grid};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn hypercube(copies: usize) -> WalkSpec {
    WalkSpec::new(trivial_scheme_2(), copies, vec![c(1.0)]).unwrap()
}

#[test]
fn start_is_pst_with_zero_phase() {
    let spec = WalkSpec::canonical_ngon(4, 3).unwrap();
    let e = classify(&amplitudes(&spec, 0.0), PST_TOL).unwrap();
    assert_eq!(e.kind, EventKind::Pst);
    assert_eq!(e.support, vec![spec.extension().extreme(0)]);
    assert_eq!(e.phase, 0.0);
    assert!((e.fidelity - 1.0).abs() < 1e-12);
}

#[test]
fn ngon_transfer_classifies_as_pst() {
    let spec = WalkSpec::canonical_ngon(3, 2).unwrap();
    let e = classify(&amplitudes(&spec, 2.0 * PI / 3.0), PST_TOL).unwrap();
    assert_eq!(e.kind, EventKind::Pst);
    assert_eq!(e.support, vec![spec.extension().extreme(2)]);
    let site = amplitudes(&spec, 2.0 * PI / 3.0).site(&e.support[0]).unwrap().site_amplitude;
    assert!((Complex64::from_polar(1.0, e.phase) - site).norm() < 1e-12);
}

#[test]
fn half_transfer_time_on_the_hypercube() {
    // One copy: an equal superposition of the two vertices.
    let e = classify(&amplitudes(&hypercube(1), PI / 4.0), FR_TOL).unwrap();
    assert_eq!(e.kind, EventKind::Gme);
    assert_eq!(e.support.len(), 2);
    // More copies: binomial spread over every site, nothing concentrated.
    for copies in 2..=5 {
        let profile = amplitudes(&hypercube(copies), PI / 4.0);
        assert!(profile.sites.iter().all(|s| s.probability > 1e-3));
        assert_eq!(classify(&profile, FR_TOL).unwrap().kind, EventKind::None);
    }
}

#[test]
fn classify_rejects_unnormalized_profiles() {
    let mut profile = amplitudes(&hypercube(2), 0.4);
    profile.sites[0].probability += 0.1;
    assert!(matches!(classify(&profile, PST_TOL), Err(Error::NotNormalized(_))));
}

#[test]
fn scan_finds_triangle_transfers() {
    let spec = WalkSpec::canonical_ngon(3, 2).unwrap();
    let grid = time_grid(0.0, 2.0 * PI, 200);
    let events = scan(&spec, &grid, PST_TOL).unwrap();
    let pst: Vec<&TransferEvent> = events.iter().filter(|e| e.kind == EventKind::Pst).collect();
    let times: Vec<f64> = pst.iter().map(|e| e.time).collect();
    assert_eq!(pst.len(), 4, "{times:?}");
    for (e, k) in pst.iter().zip(0..) {
        assert!((e.time - 2.0 * PI * k as f64 / 3.0).abs() < 1e-6, "{times:?}");
        assert!(e.fidelity > 1.0 - 1e-9);
    }
}

#[test]
fn scan_finds_hypercube_transfer() {
    let spec = hypercube(3);
    let events = scan(&spec, &time_grid(0.0, PI, 100), PST_TOL).unwrap();
    let pst: Vec<&TransferEvent> = events.iter().filter(|e| e.kind == EventKind::Pst).collect();
    assert_eq!(pst.len(), 3);
    assert!((pst[1].time - PI / 2.0).abs() < 1e-6);
    assert_eq!(pst[1].support, vec![MultiIndex::new(vec![0, 3])]);
    // back home at pi
    assert_eq!(pst[2].support, vec![MultiIndex::new(vec![3, 0])]);
}

#[test]
fn scan_with_zero_weights_reports_only_the_start() {
    let spec = WalkSpec::new(crate::scheme::directed_ngon(4).unwrap(), 2, vec![c(0.0); 3]).unwrap();
    let events = scan(&spec, &time_grid(0.0, 3.0, 60), PST_TOL).unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].time, 0.0);
    assert_eq!(events[0].kind, EventKind::Pst);
}

#[test]
fn scan_rejects_unsorted_grid() {
    assert!(scan(&hypercube(1), &[0.0, 1.0, 0.5], PST_TOL).is_err());
    assert!(scan(&hypercube(1), &[], PST_TOL).unwrap().is_empty());
}

#[test]
fn zero_transfer_candidates_with_frozen_walk() {
    let spec = WalkSpec::new(trivial_scheme_2(), 2, vec![c(0.0)]).unwrap();
    let zt = zero_transfer_candidates(&spec, &time_grid(0.0, 1.0, 10), 1e-8);
    let sites: Vec<&MultiIndex> = zt.iter().map(|e| &e.support[0]).collect();
    assert_eq!(sites, vec![&MultiIndex::new(vec![1, 1]), &MultiIndex::new(vec![0, 2])]);
    assert!(zero_transfer_candidates(&hypercube(2), &time_grid(0.0, PI, 50), 1e-8).is_empty());
}

#[test]
fn ngon_scenarios() {
    let s = ngon_mpst_scenario(3, 3).unwrap();
    let times: Vec<f64> = s.expected_events.iter().map(|e| e.time).collect();
    assert_eq!(times.len(), 3);
    assert!((times[2] - 2.0 * PI).abs() < 1e-15);
    assert_eq!(s.expected_events[2].support, vec![MultiIndex::new(vec![3, 0, 0])]);
    assert!(s.leakage() < 1e-12);

    let s = ngon_mpst_scenario(2, 1).unwrap();
    assert_eq!(s.spec.weights(), &[c(-0.5)]);
    let e = classify(&amplitudes(&s.spec, PI), PST_TOL).unwrap();
    assert_eq!(e.support, vec![MultiIndex::new(vec![0, 1])]);

    for n in 2..=6 {
        for copies in 1..=3 {
            let s = ngon_mpst_scenario(n, copies).unwrap();
            let mut arrivals = BTreeSet::new();
            for ev in &s.expected_events {
                let got = classify(&amplitudes(&s.spec, ev.time), PST_TOL).unwrap();
                assert_eq!(got.kind, EventKind::Pst);
                assert_eq!(got.support, ev.support);
                arrivals.insert(got.support[0].clone());
            }
            assert_eq!(arrivals.len(), n);
        }
    }
    assert!(ngon_mpst_scenario(1, 1).is_err());
    assert!(ngon_mpst_scenario(3, 0).is_err());
}

#[test]
fn hypercube_scenarios() {
    for copies in 1..=6 {
        let s = hypercube_pst_scenario(copies).unwrap();
        let e = classify(&amplitudes(&s.spec, PI / 2.0), PST_TOL).unwrap();
        assert_eq!(e.support, s.expected_events[0].support);
        assert!(e.fidelity >= 1.0 - 1e-9);

        // every site hops to its mirror image
        let pm = projected_matrix(&s.spec);
        for beta in &pm.order {
            let b = beta.entries();
            let mirror = MultiIndex::new(vec![b[1], b[0]]);
            let state = evolve_projected(&pm, PI / 2.0, beta).unwrap();
            let pos = pm.position(&mirror).unwrap();
            assert!((state[pos].norm() - 1.0).abs() < 1e-9);
        }
    }
    let pm = projected_matrix(&hypercube_pst_scenario(3).unwrap().spec);
    let state = evolve_projected(&pm, PI / 2.0, &MultiIndex::new(vec![2, 1])).unwrap();
    assert!((state[pm.position(&MultiIndex::new(vec![1, 2])).unwrap()].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn ordered_word_revival_scenarios() {
    for k in 1..=3 {
        let s = ow_fr_scenario(3, 5, k).unwrap();
        assert!(s.spec.is_hermitian());
        assert!(s.leakage() < 1e-8, "k={k}: {}", s.leakage());
        let vanish = crate::walk::vanishing_factors(&s.spec, OW_EVENT_TIME, VANISH_TOL);
        assert_eq!(vanish, (k..=3).collect::<Vec<_>>());
        let e = classify(&amplitudes(&s.spec, OW_EVENT_TIME), FR_TOL).unwrap();
        assert_eq!(e.kind, s.expected_events[0].kind);
        assert!(e.support.iter().all(|b| s.expected_events[0].support.contains(b)));
    }
    // both z_1 = z_2 = 1 and z_3 = -1: only p_1 survives
    let s = ow_fr_scenario(3, 5, 0).unwrap();
    let e = classify(&amplitudes(&s.spec, OW_EVENT_TIME), PST_TOL).unwrap();
    assert_eq!(e.kind, EventKind::Pst);
    assert_eq!(e.support, vec![MultiIndex::new(vec![0, 5, 0, 0])]);
    assert!(ow_fr_scenario(3, 5, 4).is_err());
}

#[test]
fn ordered_word_factor_formula() {
    // p_k = 1 + sum_{l <= d-k} 2^{l-1} z_l - 2^{d-k} z_{d-k+1} for k >= 1
    let d = 4;
    let spec = WalkSpec::new(ordered_word_scheme(d).unwrap(), 1, vec![c(0.3), c(-0.8), c(1.1), c(0.45)]).unwrap();
    let t = 0.9;
    let z = crate::walk::z_factors(&spec, t);
    let p = p_values(&spec, t);
    for k in 1..=d {
        let mut expected = c(1.0);
        for l in 1..=d - k {
            expected += z[l - 1] * 2f64.powi(l as i32 - 1);
        }
        expected -= z[d - k] * 2f64.powi((d - k) as i32);
        assert!((p[k] - expected).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn cascade_on_ordered_words() {
    for d in 1..=4 {
        for k in 1..=d {
            let s = ow_fr_scenario(d, 2, k).unwrap();
            for t in time_grid(0.0, PI, 400).into_iter().chain([OW_EVENT_TIME]) {
                assert!(cascade_holds(&s.spec, t, VANISH_TOL), "d={d} k={k} t={t}");
            }
        }
    }
}

#[test]
fn generic_ordered_word_walk_has_no_vanishing_factor() {
    let spec = WalkSpec::new(ordered_word_scheme(3).unwrap(), 3, vec![c(0.31), c(-0.77), c(1.13)]).unwrap();
    for t in time_grid(0.05, 3.0, 60) {
        assert!(crate::walk::vanishing_factors(&spec, t, VANISH_TOL).is_empty());
    }
}

#[test]
fn two_point_walk_never_has_a_third_destination() {
    for copies in 1..=4 {
        let spec = hypercube(copies);
        let events = scan(&spec, &time_grid(0.0, PI, 2000), PST_TOL).unwrap();
        let destinations: BTreeSet<MultiIndex> = events
            .iter()
            .filter(|e| e.kind == EventKind::Pst)
            .map(|e| e.support[0].clone())
            .collect();
        let allowed = BTreeSet::from([MultiIndex::new(vec![copies, 0]), MultiIndex::new(vec![0, copies])]);
        assert!(destinations.is_subset(&allowed));
        assert_eq!(destinations.len(), 2);
    }
}
