use std::collections::BTreeMap;

use mscasimir::cartan::{catalog, find_spec, CartanLabel, ChiPoint, PairKind};
use mscasimir::coords;
use mscasimir::csmodels;
use mscasimir::liealg::Signature;
use mscasimir::radial::{radial_casimir, Bimodule, RootSpaces};
use mscasimir::scalar::{c, q, C64};
use mscasimir::{verify, Error};
use nalgebra::DMatrix;

#[test]
fn signatures_below_three_are_rejected() {
    assert!(matches!(Signature::new(1, 1), Err(Error::InvalidSignature(_))));
    assert!(Signature::new(3, 0).is_ok());
}

#[test]
fn catalog_needs_q_at_most_one() {
    let err = catalog(Signature::new(4, 2).unwrap(), PairKind::FourPoint).unwrap_err();
    assert!(matches!(err, Error::NotCataloged(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn lorentzian_catalog_has_eight_entries() {
    for (p, q) in [(2, 1), (3, 1), (5, 1)] {
        let specs = catalog(Signature::new(p, q).unwrap(), PairKind::FourPoint).unwrap();
        assert_eq!(specs.len(), 8);
        let labels: Vec<String> = specs.iter().map(|s| s.label.to_string()).collect();
        for l in ["empty", "0", "1", "1'", "2", "01", "02", "12"] {
            assert!(labels.iter().any(|x| x == l), "missing {l}");
        }
    }
}

#[test]
fn root_spaces_follow_decompositions() {
    let spec = find_spec(Signature::new(5, 0).unwrap(), PairKind::FourPoint, CartanLabel::Euclid).unwrap();
    let rs = RootSpaces::<C64>::build(&spec, 11).unwrap();
    let total: usize = rs.roots.iter().map(|r| r.h.len()).sum();
    // 4 short roots of multiplicity 3 and 4 long roots of multiplicity 1
    assert_eq!(total, 4 * 3 + 4);
}

#[test]
fn custom_bimodule_reproduces_scalar() {
    let spec = find_spec(Signature::new(3, 1).unwrap(), PairKind::FourPoint, CartanLabel::Zero).unwrap();
    let rs = RootSpaces::<C64>::build(&spec, 0).unwrap();
    let (a, b) = (0.7, -0.2);
    let scalar = Bimodule::scalar(&rs.alg, c(a, 0.0), c(b, 0.0));
    let n = spec.sig.n();
    let eta = spec.sig.eta();
    let s = (eta[0] * eta[n - 1]) as f64;
    let key = format!("F_0_{}", n - 1);
    let left = BTreeMap::from([(key.clone(), DMatrix::from_element(1, 1, c(a * s, 0.0)))]);
    let right = BTreeMap::from([(key, DMatrix::from_element(1, 1, c(b * s, 0.0)))]);
    let custom = Bimodule::custom(&rs.alg, 1, &left, &right).unwrap();
    let pt = ChiPoint::new(c(0.6, 0.1), c(1.4, -0.2));
    let x = radial_casimir(&rs, &scalar).unwrap().evaluate(&spec, &pt).unwrap();
    let y = radial_casimir(&rs, &custom).unwrap().evaluate(&spec, &pt).unwrap();
    assert!(x.max_diff(&y) < 1e-12);
}

#[test]
fn custom_bimodule_rejects_unknown_generators() {
    let spec = find_spec(Signature::new(3, 0).unwrap(), PairKind::FourPoint, CartanLabel::Euclid).unwrap();
    let rs = RootSpaces::<C64>::build(&spec, 0).unwrap();
    let left = BTreeMap::from([("F_9_9".to_string(), DMatrix::from_element(1, 1, c(1.0, 0.0)))]);
    assert!(Bimodule::<C64>::custom(&rs.alg, 1, &left, &BTreeMap::new()).is_err());
}

#[test]
fn trivial_bimodule_gives_ho_laplacian() {
    for d in [3, 4, 5] {
        let spec = find_spec(Signature::new(d, 0).unwrap(), PairKind::FourPoint, CartanLabel::Euclid).unwrap();
        let w = csmodels::trivial_match(&spec, &csmodels::fourpoint_k(d), 0).unwrap();
        assert!(w.residual < 1e-9, "d={d}: {}", w.residual);
    }
}

#[test]
fn spinor_tables_are_exact() {
    let r = csmodels::spinor_match(&q(3, 2), &q(-1, 3), 0).unwrap();
    assert!(r.all_match(), "{:?}", r.cases.iter().filter(|c| !c.matches).collect::<Vec<_>>());
}

#[test]
fn defect_root_types() {
    let r = csmodels::defect_match(6, 3, 0).unwrap();
    assert_eq!(r.cases.len(), 3);
    assert!(r.passed(1e-9));
    assert!(r.cases.iter().all(|c| c.root_type == "B3" && c.short_multiplicity == Some(2)));
}

#[test]
fn causal_points_land_in_their_faces() {
    for (face, pt) in verify::causal_points() {
        let r = coords::classify_causal(&pt).unwrap();
        assert_eq!(r.region, face);
        assert_eq!(r.representative, pt);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let pt = ChiPoint::real(&[0.7, 1.9]);
    let ratio = coords::jacobian_det_fd(&pt, 1e-5).unwrap() / coords::jacobian_det(&pt);
    assert!((ratio - c(1.0, 0.0)).norm() < 1e-6);
}

#[test]
fn suites_are_deterministic() {
    let a = serde_json::to_string(&verify::run("coords", 5).unwrap().to_json()).unwrap();
    let b = serde_json::to_string(&verify::run("coords", 5).unwrap().to_json()).unwrap();
    assert_eq!(a, b);
    assert!(verify::run("nonsense", 0).is_err());
}
