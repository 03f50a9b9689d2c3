use proptest::prelude::*;

use mscasimir::cartan::{catalog, ChiPoint, PairKind};
use mscasimir::coords::{self, Gen};
use mscasimir::csmodels::{self, GaugeData};
use mscasimir::json;
use mscasimir::liealg::{Algebra, Element, Signature};
use mscasimir::scalar::{c, q, C64, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_DIM: usize = 28;

fn signature() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((3, 0)), Just((4, 0)), Just((2, 1)), Just((3, 1)), Just((4, 2))]
}

fn element(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, dim)
}

fn to_q(v: &[i64]) -> Element<Q> {
    Element::from_vec(v.iter().map(|x| q(*x, 1)).collect())
}

fn gen() -> impl Strategy<Value = Gen> {
    prop_oneof![Just(Gen::S0), Just(Gen::S1), Just(Gen::S2)]
}

fn rel(a: (C64, C64), b: (C64, C64)) -> f64 {
    let s = 1.0f64.max(a.0.norm()).max(a.1.norm());
    (a.0 - b.0).norm().max((a.1 - b.1).norm()) / s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_and_invariance_exact((p, qq) in signature(), a in element(MAX_DIM), b in element(MAX_DIM), e in element(MAX_DIM)) {
        let alg = Algebra::new(Signature::new(p, qq).unwrap());
        let n = alg.dim();
        let (x, y, z) = (to_q(&a[..n]), to_q(&b[..n]), to_q(&e[..n]));
        prop_assert_eq!(alg.jacobi_residual(&x, &y, &z), 0.0);
        // B([x, y], z) = B(x, [y, z])
        prop_assert_eq!(alg.form_b(&alg.bracket(&x, &y), &z), alg.form_b(&x, &alg.bracket(&y, &z)));
    }

    #[test]
    fn sigma_is_an_involutive_automorphism((p, qq) in signature(), a in element(MAX_DIM), b in element(MAX_DIM)) {
        let alg = Algebra::new(Signature::new(p, qq).unwrap());
        let n = alg.dim();
        let (x, y) = (to_q(&a[..n]), to_q(&b[..n]));
        let s = alg.sigma_fourpoint();
        prop_assert_eq!(s.apply(&s.apply(&x)), x.clone());
        prop_assert_eq!(s.apply(&alg.bracket(&x, &y)), alg.bracket(&s.apply(&x), &s.apply(&y)));
        prop_assert_eq!(alg.form_b(&s.apply(&x), &s.apply(&y)), alg.form_b(&x, &y));
    }

    #[test]
    fn f_is_invariant_under_words(
        a in 0.2f64..2.0, ai in -1.0f64..1.0, b in 0.2f64..2.0, bi in -1.0f64..1.0,
        word in prop::collection::vec(gen(), 1..10),
    ) {
        prop_assume!((a - b).abs() > 0.05);
        let pt = ChiPoint::new(c(a, ai), c(b, bi));
        let f0 = coords::f_map(&pt).unwrap();
        let f1 = coords::f_map(&coords::apply_word(&word, &pt)).unwrap();
        prop_assert!(rel(f0, f1) <= 1e-11, "{:?} vs {:?}", f0, f1);
    }

    #[test]
    fn preimages_map_back(a in 0.2f64..2.0, b in 0.2f64..2.0, seed in any::<u64>()) {
        prop_assume!((a - b).abs() > 0.05);
        let (u, v) = coords::f_map(&ChiPoint::real(&[a, b])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pre = coords::random_preimage(u, v, &mut rng);
        prop_assert!(rel((u, v), coords::f_map(&pre).unwrap()) <= 1e-9);
    }

    #[test]
    fn causal_region_is_orbit_invariant(idx in 0usize..7, word in prop::collection::vec(gen(), 0..8)) {
        let (face, pt) = mscasimir::verify::causal_points()[idx].clone();
        let moved = coords::apply_word(&word, &pt);
        prop_assert_eq!(coords::classify_causal(&moved).unwrap().region, face);
    }

    #[test]
    fn gauge_compose_adds_logs(d in 3usize..7, al in -1.0f64..1.0, be in -1.0f64..1.0, x in 0.3f64..1.0, y in 1.2f64..2.5) {
        let k = csmodels::scalar_k(d);
        let m = csmodels::scalar_m(d, al, be);
        let g1 = GaugeData::difference(&m, &k).unwrap();
        let g2 = GaugeData::half_density(&k);
        let pt = ChiPoint::real(&[y, x]);
        let lhs = g1.compose(&g2).log_value(&pt);
        let rhs = g1.log_value(&pt) + g2.log_value(&pt);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        let none = g1.compose(&g1.scaled(-1.0));
        prop_assert!(none.exponents.is_empty());
    }

    #[test]
    fn epsilon_is_a_character(idx in 0usize..8, a in -3i64..=3, b in -3i64..=3, c2 in -3i64..=3, d2 in -3i64..=3) {
        let spec = &catalog(Signature::new(3, 1).unwrap(), PairKind::FourPoint).unwrap()[idx];
        let g = &spec.epsilon.generators;
        let comb = |x: i64, y: i64| -> Vec<Q> { (0..2).map(|k| &g[0][k] * q(x, 1) + &g[1][k] * q(y, 1)).collect() };
        let (u, v) = (comb(a, b), comb(c2, d2));
        let w: Vec<Q> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
        let (eu, ev, ew) = (spec.epsilon.value(&u).unwrap(), spec.epsilon.value(&v).unwrap(), spec.epsilon.value(&w).unwrap());
        prop_assert!((eu * ev - ew).norm() <= 1e-12);
    }

    #[test]
    fn json_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = json::fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back, x);
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        prop_assert_eq!(mantissa.len(), 17);
    }
}
