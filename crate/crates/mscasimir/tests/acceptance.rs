//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` print FAIL with the recorded reason and do not fail the test.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use mscasimir::cartan::{catalog, find_spec, parametrize, CartanLabel, ChiPoint, EpsilonTable, PairKind};
use mscasimir::coords::{self, Face, Gen};
use mscasimir::csmodels;
use mscasimir::liealg::{Algebra, Signature};
use mscasimir::radial::{self, Representation, RootSpaces};
use mscasimir::rootspace::{root_decomposition, DecompositionOptions};
use mscasimir::scalar::{c, q, C64, Q};
use mscasimir::verify;

const EXPECTED_FAILURES: &[(u32, &str)] = &[
    (2, "the short roots of a_p have multiplicity p-q; the stated p-q-1 is not attained"),
    (3, "the stated epsilon for C_2 violates eps(alpha) = eps(t alpha); the trivial table with phi = Ad(t) is used"),
];

struct Line {
    id: u32,
    ok: bool,
    detail: String,
}

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).unwrap()
}

fn criterion_1() -> Line {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 3..=6 {
        let t0 = Instant::now();
        let spec = find_spec(sig(d, 0), PairKind::FourPoint, CartanLabel::Euclid).unwrap();
        let (_, dec) = spec.decompose(0).unwrap();
        let info = dec.classify();
        let secs = t0.elapsed().as_secs_f64();
        let zdim = (d - 2) * (d - 3) / 2 + 2;
        let good = info.is_type("C2")
            && info.short_multiplicity == Some(d - 2)
            && info.long_multiplicity == 1
            && dec.zero_dim() == zdim
            && secs < 1.0;
        ok &= good;
        notes.push(format!("d={d} {} ({:?},{}) g0={} {:.3}s", info.name, info.short_multiplicity, info.long_multiplicity, dec.zero_dim(), secs));
    }
    Line { id: 1, ok, detail: notes.join("; ") }
}

fn criterion_2() -> Line {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, qq) in [(3, 1), (4, 1), (4, 2), (5, 1)] {
        let alg = Algebra::new(sig(p, qq));
        let basis: Vec<_> = alg.a_p_basis::<f64>().iter().map(|e| e.to_c64()).collect();
        let dec = root_decomposition(&alg, &basis, &alg.theta(), DecompositionOptions::default()).unwrap();
        let info = dec.classify();
        let ty = format!("B{}", qq + 1);
        ok &= info.is_type(&ty) && info.short_multiplicity == Some(p - qq - 1) && info.long_multiplicity == 1;
        if qq == 2 {
            ok &= catalog(sig(p, qq), PairKind::FourPoint).is_err();
        }
        notes.push(format!("({p},{qq}) {} short {:?} (stated {})", info.name, info.short_multiplicity, p - qq - 1));
    }
    Line { id: 2, ok, detail: notes.join("; ") }
}

fn stated_exponents(label: CartanLabel) -> Option<Vec<u8>> {
    match label {
        CartanLabel::Two => Some(vec![2, 0]),
        CartanLabel::ZeroTwo => Some(vec![1, 3]),
        CartanLabel::OneTwo => Some(vec![0, 0]),
        _ => None,
    }
}

fn criterion_3() -> Line {
    let mut ok = true;
    let mut worst_operative = 0.0f64;
    let mut notes = Vec::new();
    for (p, qq) in [(2, 1), (3, 1), (4, 1)] {
        let specs = catalog(sig(p, qq), PairKind::FourPoint).unwrap();
        ok &= specs.len() == 8;
        let mut first = None;
        for spec in &specs {
            let chk = radial::epsilon_check(spec, &spec.epsilon, 0).unwrap();
            worst_operative = worst_operative.max(chk.max_residual());
            ok &= chk.max_residual() <= 1e-9;
            let table = match stated_exponents(spec.label) {
                Some(e) => EpsilonTable { generators: spec.epsilon.generators.clone(), exponents: e },
                None => EpsilonTable::trivial(spec.epsilon.generators.clone()),
            };
            let stated = radial::epsilon_check(spec, &table, 0).unwrap().max_residual();
            if stated > 1e-9 {
                ok = false;
                if qq == 1 && p == 3 {
                    notes.push(format!("stated eps for C_{} has residual {:.2e}", spec.label, stated));
                }
            }
            let info = spec.decompose(0).unwrap().1.classify();
            ok &= info.is_type("C2") && info.short_multiplicity == Some(p + qq - 2) && info.long_multiplicity == 1;
            let f = first.get_or_insert_with(|| info.clone());
            ok &= *f == info;
        }
    }
    notes.insert(0, format!("operative Ad(t) residual {worst_operative:.2e}"));
    Line { id: 3, ok, detail: notes.join("; ") }
}

fn criterion_4() -> Line {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (p, qq) in [(3, 0), (3, 1)] {
        for spec in catalog(sig(p, qq), PairKind::FourPoint).unwrap() {
            let rs = RootSpaces::<C64>::build(&spec, 0).unwrap();
            for pt in radial::random_regular_points(&spec, 20, 0) {
                worst = worst.max(radial::oracle_check(&spec, &rs, &pt, Representation::Defining).unwrap().max_residual());
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Line { id: 4, ok: worst <= 1e-8 && secs < 30.0, detail: format!("max residual {worst:.2e}, {secs:.2}s") }
}

fn criterion_5() -> Line {
    let mut worst = 0.0f64;
    for d in [3, 4] {
        let mut specs = vec![find_spec(sig(d, 0), PairKind::FourPoint, CartanLabel::Euclid).unwrap()];
        specs.extend(catalog(sig(d - 1, 1), PairKind::FourPoint).unwrap());
        for spec in &specs {
            for (a, b) in [(1.0, 2.0), (0.5, -0.3)] {
                let r = csmodels::scalar_match(spec, a, b, 0).unwrap();
                worst = worst.max(r.main.residual);
            }
        }
    }
    Line { id: 5, ok: worst <= 1e-9, detail: format!("max grid residual {worst:.2e}") }
}

fn criterion_6() -> Line {
    let mut ok = true;
    let mut n = 0;
    for (a, b) in [(1, 0), (2, 3), (-1, 1)] {
        let r = csmodels::spinor_match(&q(a, 1), &q(b, 1), 0).unwrap();
        n += r.cases.len();
        ok &= r.all_match();
    }
    Line { id: 6, ok, detail: format!("{n} exact matrix comparisons") }
}

fn criterion_7() -> Line {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    // (d, p) -> expected (type, short multiplicity)
    let table = [(4, 1, "D3", None), (5, 1, "B3", Some(1)), (6, 3, "B3", Some(2)), (5, 3, "B2", Some(3))];
    for (d, p, ty, short) in table {
        let r = csmodels::defect_match(d, p, 0).unwrap();
        for cs in &r.cases {
            let info_ok = cs.type_ok && cs.short_multiplicity == short && cs.long_multiplicity == 1;
            let name_ok = match ty {
                "D3" => cs.root_type == "A3" || cs.root_type == "D3",
                "B2" => cs.root_type == "B2" || cs.root_type == "C2",
                t => cs.root_type == t,
            };
            ok &= info_ok && name_ok;
            worst = worst.max(cs.operator.residual);
        }
        notes.push(format!("({d},{p}) {}x{}", r.cases.first().map(|c| c.root_type.clone()).unwrap_or_default(), r.cases.len()));
    }
    ok &= worst <= 1e-9;
    Line { id: 7, ok, detail: format!("{}; HO residual {worst:.2e}", notes.join(" ")) }
}

fn criterion_8() -> Line {
    let mut ok = true;
    let mut vals = Vec::new();
    for d in 3..=8usize {
        let want = Q::new(((d * d - 2 * d + 2) as i64).into(), 4.into());
        let got = csmodels::fourpoint_rho_norm_exact(d, 0).unwrap();
        ok &= got.re == want && got.im == q(0, 1);
        vals.push(got.re.to_string());
    }
    Line { id: 8, ok, detail: vals.join(", ") }
}

/// (u, v) from η-pairings of (ι(0), ∞, gι(0), g∞), written out directly.
fn pairing_cross_ratios(s: Signature, g: &nalgebra::DMatrix<C64>) -> (C64, C64) {
    let n = s.n();
    let eta = s.eta();
    let mut o = vec![c(0.0, 0.0); n];
    let mut inf = o.clone();
    o[0] = c(1.0, 0.0);
    o[n - 1] = c(1.0, 0.0);
    inf[0] = c(1.0, 0.0);
    inf[n - 1] = c(-1.0, 0.0);
    let act = |v: &[C64]| -> Vec<C64> { (0..n).map(|i| (0..n).map(|j| g[(i, j)] * v[j]).sum()).collect() };
    let pts = [o.clone(), inf.clone(), act(&o), act(&inf)];
    let e = |i: usize, j: usize| -> C64 { (0..n).map(|k| pts[i][k] * pts[j][k] * eta[k] as f64).sum() };
    let den = e(0, 2) * e(1, 3);
    (e(0, 1) * e(2, 3) / den, e(0, 3) * e(1, 2) / den)
}

fn rel(a: (C64, C64), b: (C64, C64)) -> f64 {
    let s = 1.0f64.max(a.0.norm()).max(a.1.norm());
    (a.0 - b.0).norm().max((a.1 - b.1).norm()) / s
}

fn criterion_9() -> Line {
    let mut inv = 0.0f64;
    let words: [&[Gen]; 4] = [&[Gen::S0], &[Gen::S1], &[Gen::S2], &[Gen::S2, Gen::S1, Gen::S0, Gen::S1, Gen::S2, Gen::S0]];
    for pt in [ChiPoint::new(c(0.7, 0.2), c(1.9, -0.4)), ChiPoint::new(c(1.3, 0.5), c(0.4, 1.1))] {
        for w in words {
            inv = inv.max(rel(coords::f_map(&pt).unwrap(), coords::f_map(&coords::apply_word(w, &pt)).unwrap()));
        }
    }
    let mut dual = 0.0f64;
    for (p, qq) in [(3, 0), (3, 1)] {
        let s = sig(p, qq);
        for spec in catalog(s, PairKind::FourPoint).unwrap() {
            for pt in radial::random_regular_points(&spec, 3, 0) {
                let g = parametrize(&spec, &pt).unwrap();
                let a = coords::cross_ratios_from_corners(&g).unwrap();
                dual = dual.max(rel(a, pairing_cross_ratios(s, &g))).max(rel(a, coords::f_map(&pt).unwrap()));
            }
        }
    }
    let causal = [
        (ChiPoint::new(c(0.0, 0.7), c(0.0, 2.1)), Face::Empty, "E_tu"),
        (ChiPoint::new(c(0.0, 0.9), c(1.3, PI)), Face::Zero, "U"),
        (ChiPoint::new(c(-0.8, 1.1), c(0.8, 1.1)), Face::One, "E_stu"),
        (ChiPoint::new(c(1.2, 0.0), c(0.0, 1.7)), Face::Two, "T"),
        (ChiPoint::new(c(0.5, PI), c(1.4, PI)), Face::ZeroOne, "E_su"),
        (ChiPoint::new(c(0.6, 0.0), c(1.1, PI)), Face::ZeroTwo, "S"),
        (ChiPoint::new(c(0.4, 0.0), c(1.5, 0.0)), Face::OneTwo, "E_st"),
    ];
    let mut table_ok = 0;
    for (pt, face, name) in &causal {
        let r = coords::classify_causal(pt).unwrap();
        if r.region == *face && r.causal == *name {
            table_ok += 1;
        }
    }
    Line {
        id: 9,
        ok: inv <= 1e-12 && dual <= 1e-12 && table_ok == causal.len(),
        detail: format!("invariance {inv:.2e}, dual path {dual:.2e}, causal {table_ok}/{}", causal.len()),
    }
}

fn criterion_10() -> Line {
    let t0 = Instant::now();
    let reports = verify::run_all(0);
    let secs = t0.elapsed().as_secs_f64();
    let failing: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.clone()).collect();
    let cases: usize = reports.iter().map(|r| r.cases).sum();
    Line {
        id: 10,
        ok: failing.is_empty() && secs < 120.0,
        detail: format!("{} suites, {cases} cases, {secs:.2}s, failing: {:?}", reports.len(), failing),
    }
}

#[test]
fn acceptance() {
    let lines = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    // Written to the raw stdout handle so the lines show up without --nocapture.
    let mut out = std::io::stdout().lock();
    let mut unexpected = Vec::new();
    for l in &lines {
        let expected = EXPECTED_FAILURES.iter().find(|(id, _)| *id == l.id);
        match (l.ok, expected) {
            (true, None) => writeln!(out, "PASS criterion {}: {}", l.id, l.detail).unwrap(),
            (true, Some(_)) => writeln!(out, "PASS criterion {} (listed as expected failure): {}", l.id, l.detail).unwrap(),
            (false, Some((_, why))) => writeln!(out, "FAIL criterion {} (expected: {why}): {}", l.id, l.detail).unwrap(),
            (false, None) => {
                writeln!(out, "FAIL criterion {}: {}", l.id, l.detail).unwrap();
                unexpected.push(l.id);
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
