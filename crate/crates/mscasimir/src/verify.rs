//! Verification suites. Each one returns a list of named residuals with their tolerances.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cartan::{catalog, find_spec, parametrize, CartanLabel, ChiPoint, EpsilonTable, PairKind};
use crate::coords::{self, Face, Gen};
use crate::csmodels;
use crate::error::{Error, Result};
use crate::liealg::{Algebra, Element, Signature};
use crate::radial::{self, Representation, RootSpaces};
use crate::rootspace::{root_decomposition, DecompositionOptions};
use crate::scalar::{c, q, Field, C64, Q};

pub const SUITES: [&str; 8] = ["algebra", "rootspaces", "cartan", "oracle", "scalar", "spinor", "defect", "coords"];

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub name: String,
    pub residual: f64,
    pub location: Value,
}

/// A known deviation from a stated value; reported, but not counted as a failure.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectedFailure {
    pub name: String,
    pub residual: f64,
    pub location: Value,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub expected_failures: Vec<ExpectedFailure>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), cases: 0, failures: vec![], expected_failures: vec![] }
    }

    /// Records one case; NaN residuals fail.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64, location: Value) -> bool {
        self.cases += 1;
        let ok = residual <= tol;
        if !ok {
            self.failures.push(Failure { name: name.into(), residual, location });
        }
        ok
    }

    pub fn flag(&mut self, name: impl Into<String>, ok: bool, location: Value) -> bool {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0, location)
    }

    fn expect_fail(&mut self, name: impl Into<String>, residual: f64, location: Value, reason: &str) {
        self.cases += 1;
        self.expected_failures.push(ExpectedFailure { name: name.into(), residual, location, reason: reason.into() });
    }

    fn error(&mut self, name: impl Into<String>, e: &Error, location: Value) {
        self.cases += 1;
        self.failures.push(Failure { name: name.into(), residual: f64::INFINITY, location: json!({"at": location, "error": e.to_string()}) });
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let fails: Vec<Value> = self
            .failures
            .iter()
            .map(|f| json!({"name": f.name, "residual": crate::json::f(f.residual), "location": f.location}))
            .collect();
        let expected: Vec<Value> = self
            .expected_failures
            .iter()
            .map(|f| json!({"name": f.name, "residual": crate::json::f(f.residual), "location": f.location, "reason": f.reason}))
            .collect();
        json!({"suite": self.suite, "cases": self.cases, "failures": fails, "expected_failures": expected})
    }
}

pub fn run(suite: &str, seed: u64) -> Result<SuiteReport> {
    match suite {
        "algebra" => Ok(algebra(seed)),
        "rootspaces" => Ok(rootspaces(seed)),
        "cartan" => Ok(cartan(seed)),
        "oracle" => Ok(oracle(seed)),
        "scalar" => Ok(scalar(seed)),
        "spinor" => Ok(spinor(seed)),
        "defect" => Ok(defect(seed)),
        "coords" => Ok(coords_suite(seed)),
        other => Err(Error::Validation(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
}

fn sig(p: usize, q: usize) -> Signature {
    Signature::new_unchecked(p, q)
}

fn sig_json(s: Signature) -> Value {
    json!({"p": s.p, "q": s.q})
}

fn pt_json(pt: &ChiPoint) -> Value {
    Value::Array(pt.chi.iter().map(|z| crate::json::c64(*z)).collect())
}

fn random_element(rng: &mut ChaCha8Rng, dim: usize) -> Element<Q> {
    Element::from_vec((0..dim).map(|_| q(rng.gen_range(-5..=5), 1)).collect())
}

/// Jacobi identity, ad-invariance of B and the σ automorphism laws, all in exact arithmetic.
pub fn algebra(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("algebra");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, qq) in [(3, 0), (2, 1), (4, 0), (3, 1), (5, 0), (4, 1), (5, 1), (4, 2)] {
        let s = sig(p, qq);
        let alg = Algebra::new(s);
        let sigma = alg.sigma_fourpoint();
        let dim = alg.dim();
        let (mut jac, mut inv, mut aut, mut invol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let (x, y, z) = (random_element(&mut rng, dim), random_element(&mut rng, dim), random_element(&mut rng, dim));
            jac = jac.max(alg.jacobi_residual(&x, &y, &z));
            let lhs = alg.form_b(&alg.bracket(&x, &y), &z) + alg.form_b(&y, &alg.bracket(&x, &z));
            inv = inv.max(lhs.mag());
            let d = sigma.apply(&alg.bracket(&x, &y)).sub(&alg.bracket(&sigma.apply(&x), &sigma.apply(&y)));
            aut = aut.max(d.max_abs());
            invol = invol.max(sigma.apply(&sigma.apply(&x)).sub(&x).max_abs());
        }
        let loc = sig_json(s);
        rep.check("jacobi", jac, 0.0, loc.clone());
        rep.check("b_ad_invariance", inv, 0.0, loc.clone());
        rep.check("sigma_automorphism", aut, 0.0, loc.clone());
        rep.check("sigma_involution", invol, 0.0, loc.clone());
        rep.check("dimension", (dim as f64 - (s.n() * (s.n() - 1) / 2) as f64).abs(), 0.0, loc);
    }
    rep
}

/// Euclidean four-point root data and the maximal split abelian a_p.
pub fn rootspaces(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("rootspaces");
    for d in 3..=6 {
        let s = sig(d, 0);
        let loc = json!({"signature": sig_json(s)});
        match find_spec(s, PairKind::FourPoint, CartanLabel::Euclid).and_then(|sp| sp.decompose(seed)) {
            Ok((alg, dec)) => {
                let info = dec.classify();
                rep.flag("type_C2", info.is_type("C2"), json!({"signature": sig_json(s), "found": info.name}));
                rep.flag("short_multiplicity", info.short_multiplicity == Some(d - 2), json!({"signature": sig_json(s), "found": info.short_multiplicity}));
                rep.flag("long_multiplicity", info.long_multiplicity == 1, json!({"signature": sig_json(s), "found": info.long_multiplicity}));
                let zdim = (d - 2) * (d - 3) / 2 + 2;
                rep.flag("zero_dimension", dec.zero_dim() == zdim, json!({"signature": sig_json(s), "found": dec.zero_dim(), "expected": zdim}));
                rep.check("eigenvectors", eigen_residual(&alg, &dec), 1e-9, loc.clone());
                rep.check("bsigma_orthonormal", orthonormal_residual(&alg, &find_spec(s, PairKind::FourPoint, CartanLabel::Euclid).unwrap().sigma(&alg), &dec), 1e-9, loc);
            }
            Err(e) => rep.error("decompose", &e, loc),
        }
    }
    for (p, qq) in [(3, 1), (4, 1), (5, 1), (4, 2)] {
        let s = sig(p, qq);
        let alg = Algebra::new(s);
        let loc = json!({"signature": sig_json(s)});
        let opts = DecompositionOptions { seed, ..Default::default() };
        let basis: Vec<Element<C64>> = alg.a_p_basis::<f64>().iter().map(|e| e.to_c64()).collect();
        match root_decomposition(&alg, &basis, &alg.theta(), opts) {
            Ok(dec) => {
                let info = dec.classify();
                let ty = format!("B{}", qq + 1);
                rep.flag("a_p_type", info.is_type(&ty), json!({"signature": sig_json(s), "found": info.name, "expected": ty}));
                rep.flag("a_p_long_multiplicity", info.long_multiplicity == 1, json!({"signature": sig_json(s), "found": info.long_multiplicity}));
                rep.flag("a_p_short_multiplicity_p_minus_q", info.short_multiplicity == Some(p - qq), json!({"signature": sig_json(s), "found": info.short_multiplicity}));
                rep.check("a_p_eigenvectors", eigen_residual(&alg, &dec), 1e-9, loc.clone());
                let stated = p - qq - 1;
                if info.short_multiplicity != Some(stated) {
                    rep.expect_fail(
                        "a_p_short_multiplicity_stated",
                        (info.short_multiplicity.unwrap_or(0) as f64 - stated as f64).abs(),
                        json!({"signature": sig_json(s), "found": info.short_multiplicity, "stated": stated}),
                        "the short roots ±ε_a of so(p+1,q+1) have multiplicity p−q, not p−q−1",
                    );
                }
                if qq > 1 {
                    let rejected = matches!(catalog(s, PairKind::FourPoint), Err(Error::NotCataloged(_)));
                    rep.flag("a_p_outside_catalog_flagged", rejected, loc);
                }
            }
            Err(e) => rep.error("a_p_decompose", &e, loc),
        }
    }
    rep
}

fn eigen_residual(alg: &Algebra, dec: &crate::rootspace::RootDecomposition) -> f64 {
    let mut worst = 0.0f64;
    for r in &dec.roots {
        for e in &r.basis {
            for (j, z) in dec.cprime.iter().enumerate() {
                worst = worst.max(alg.bracket(z, e).sub(&e.scale(&r.functional[j])).max_abs());
            }
        }
    }
    worst
}

fn orthonormal_residual(alg: &Algebra, sigma: &crate::liealg::Involution, dec: &crate::rootspace::RootDecomposition) -> f64 {
    let mut worst = 0.0f64;
    for r in &dec.roots {
        for (i, a) in r.basis.iter().enumerate() {
            for (j, b) in r.basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((alg.form_bsigma(sigma, a, b) - c(want, 0.0)).norm());
            }
        }
    }
    worst
}

fn stated_epsilon(label: CartanLabel) -> Option<Vec<u8>> {
    match label {
        CartanLabel::Two => Some(vec![2, 0]),
        CartanLabel::ZeroTwo => Some(vec![1, 3]),
        CartanLabel::OneTwo => Some(vec![0, 0]),
        _ => None,
    }
}

/// The Lorentzian catalog: Ad(t) = εφ, ε tables, and the shared C₂ root data.
pub fn cartan(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("cartan");
    for (p, qq) in [(2, 1), (3, 1), (4, 1)] {
        let s = sig(p, qq);
        let specs = match catalog(s, PairKind::FourPoint) {
            Ok(v) => v,
            Err(e) => {
                rep.error("catalog", &e, sig_json(s));
                continue;
            }
        };
        rep.check("catalog_size", (specs.len() as f64 - 8.0).abs(), 0.0, sig_json(s));
        let mut infos = Vec::new();
        for spec in &specs {
            let loc = json!({"signature": sig_json(s), "label": spec.label.to_string()});
            match radial::epsilon_check(spec, &spec.epsilon, seed) {
                Ok(chk) => {
                    rep.check("adt_decomposition_operative", chk.max_residual(), 1e-9, loc.clone());
                }
                Err(e) => rep.error("adt_decomposition_operative", &e, loc.clone()),
            }
            if let Some(want) = stated_epsilon(spec.label) {
                let table = EpsilonTable { generators: spec.epsilon.generators.clone(), exponents: want.clone() };
                rep.flag("epsilon_stated_recorded", spec.epsilon_stated.as_ref().map(|t| t.exponents == want).unwrap_or(false), loc.clone());
                match radial::epsilon_check(spec, &table, seed) {
                    Ok(chk) if chk.max_residual() <= 1e-9 => {
                        rep.check("adt_decomposition_stated", chk.max_residual(), 1e-9, loc.clone());
                    }
                    Ok(chk) => rep.expect_fail(
                        "adt_decomposition_stated",
                        chk.max_residual(),
                        json!({"signature": sig_json(s), "label": spec.label.to_string(), "t_law": crate::json::f(chk.t_law)}),
                        "the stated ε violates ε_α = ε_{tα}; the trivial table ε = 1 with φ = Ad(t) is used instead",
                    ),
                    Err(e) => rep.error("adt_decomposition_stated", &e, loc.clone()),
                }
            }
            match spec.decompose(seed) {
                Ok((_, dec)) => infos.push((spec.label, dec.classify())),
                Err(e) => rep.error("decompose", &e, loc.clone()),
            }
        }
        for (label, info) in &infos {
            let ok = info.is_type("C2") && info.short_multiplicity == Some(s.d() - 2) && info.long_multiplicity == 1;
            let same = infos.first().map(|(_, f)| f == info).unwrap_or(true);
            rep.flag("c2_root_data", ok && same, json!({"signature": sig_json(s), "label": label.to_string(), "found": info.name}));
        }
    }
    for (d, pd) in [(4, 1), (5, 1), (6, 3), (5, 3)] {
        let s = sig(d, 0);
        for spec in catalog(s, PairKind::Defect { p_defect: pd }).unwrap_or_default() {
            let loc = json!({"signature": sig_json(s), "defect": pd, "label": spec.label.to_string()});
            match radial::epsilon_check(&spec, &spec.epsilon, seed) {
                Ok(chk) => {
                    rep.check("adt_decomposition_defect", chk.max_residual(), 1e-9, loc);
                }
                Err(e) => rep.error("adt_decomposition_defect", &e, loc),
            }
        }
    }
    rep
}

/// Both sides of the Casimir decomposition in the defining representation, and the A_α laws.
pub fn oracle(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("oracle");
    for (p, qq) in [(3, 0), (3, 1)] {
        let s = sig(p, qq);
        for spec in catalog(s, PairKind::FourPoint).unwrap_or_default() {
            let loc = json!({"signature": sig_json(s), "label": spec.label.to_string()});
            let rs = match RootSpaces::<C64>::build(&spec, seed) {
                Ok(r) => r,
                Err(e) => {
                    rep.error("root_spaces", &e, loc);
                    continue;
                }
            };
            let (mut tilde, mut pi, mut comm) = (Worst::default(), Worst::default(), Worst::default());
            for pt in radial::random_regular_points(&spec, 20, seed) {
                match radial::oracle_check(&spec, &rs, &pt, Representation::Defining) {
                    Ok(r) => {
                        tilde.update(r.residual_tilde, &pt);
                        pi.update(r.residual_pi, &pt);
                        comm.update(r.commutator, &pt);
                    }
                    Err(e) => rep.error("oracle_point", &e, json!({"spec": loc, "point": pt_json(&pt)})),
                }
            }
            for (name, w) in [("pi_tilde_form", &tilde), ("pi_form", &pi), ("commutator", &comm)] {
                rep.check(name, w.residual, 1e-8, json!({"spec": loc, "point": w.location}));
            }
            rep.check("pi_equals_pi_tilde", (tilde.residual - pi.residual).abs().max(0.0), 1e-8, loc.clone());
            match radial::a_basis_independence(&spec, seed) {
                Ok(r) => {
                    rep.check("a_basis_independence", r, 1e-9, loc.clone());
                }
                Err(e) => rep.error("a_basis_independence", &e, loc.clone()),
            }
            let sy = radial::a_symmetries(&rs);
            rep.check("a_negation", sy.negation, 1e-9, loc.clone());
            rep.check("a_swap_sigma", sy.swap_sigma, 1e-9, loc.clone());
            rep.check("a_phi_twist", sy.phi_twist, 1e-9, loc);
        }
    }
    rep
}

#[derive(Default)]
struct Worst {
    residual: f64,
    location: Value,
}

impl Worst {
    fn update(&mut self, r: f64, pt: &ChiPoint) {
        if r >= self.residual || self.location.is_null() {
            self.residual = r.max(self.residual);
            self.location = pt_json(pt);
        }
    }
}

/// Scalar four-point matching, the Hamiltonian form and ‖ρ(k)‖².
pub fn scalar(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("scalar");
    let mut specs = Vec::new();
    for d in [3, 4] {
        if let Ok(sp) = find_spec(sig(d, 0), PairKind::FourPoint, CartanLabel::Euclid) {
            specs.push(sp);
        }
        specs.extend(catalog(sig(d - 1, 1), PairKind::FourPoint).unwrap_or_default());
    }
    for spec in &specs {
        for (a, b) in [(1.0, 2.0), (0.5, -0.3)] {
            let loc = json!({"signature": sig_json(spec.sig), "label": spec.label.to_string(), "alpha": a, "beta": b});
            match csmodels::scalar_match(spec, a, b, seed) {
                Ok(r) => {
                    rep.check("scalar_main", r.main.residual, 1e-9, json!({"case": loc, "point": r.main.location}));
                    rep.check("scalar_potential_form", r.potential_form.residual, 1e-9, json!({"case": loc, "point": r.potential_form.location}));
                    rep.check("scalar_k_conjugation", r.k_conjugation.residual, 1e-9, json!({"case": loc, "point": r.k_conjugation.location}));
                    rep.check("scalar_gauge_closed_form", r.closed_form_spread, 1e-12, loc.clone());
                    rep.check("scalar_m_weyl_invariant", r.weyl_residual_m, 1e-12, loc.clone());
                    let shift = r.rho_m_norm - r.rho_k_norm - r.shift;
                    rep.check("scalar_rho_shift", shift.abs(), 1e-12, loc);
                }
                Err(e) => rep.error("scalar_match", &e, loc),
            }
        }
    }
    for d in 3..=6 {
        match csmodels::hamiltonian_check(d, seed) {
            Ok(w) => {
                rep.check("hamiltonian_form", w.residual, 1e-9, json!({"d": d, "point": w.location}));
            }
            Err(e) => rep.error("hamiltonian_form", &e, json!({"d": d})),
        }
    }
    for d in 3..=8usize {
        let want = Q::new(((d * d - 2 * d + 2) as i64).into(), 4.into());
        match csmodels::fourpoint_rho_norm_exact(d, seed) {
            Ok(v) => {
                let ok = v.re == want && v.im == q(0, 1);
                rep.flag("rho_norm_exact", ok, json!({"d": d, "found": v.re.to_string(), "expected": want.to_string()}));
            }
            Err(e) => rep.error("rho_norm_exact", &e, json!({"d": d})),
        }
    }
    rep
}

pub fn spinor(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("spinor");
    for (a, b) in [(1, 0), (2, 3), (-1, 1)] {
        let loc = json!({"alpha": a, "beta": b});
        match csmodels::spinor_match(&q(a, 1), &q(b, 1), seed) {
            Ok(r) => {
                for m in &r.cases {
                    rep.flag(format!("spinor_{}", m.name), m.matches, json!({"case": loc, "mismatch": m.mismatch}));
                }
                rep.flag("spinor_negative_roots", r.negatives_equal, loc.clone());
                rep.check("spinor_potential_decomposition", r.decomposition_residual, 1e-9, loc);
            }
            Err(e) => rep.error("spinor_match", &e, loc),
        }
    }
    rep
}

pub fn defect(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("defect");
    for (d, p) in [(4, 1), (5, 1), (6, 3), (5, 3)] {
        match csmodels::defect_match(d, p, seed) {
            Ok(r) => {
                for cs in &r.cases {
                    let loc = json!({"d": d, "p": p, "label": cs.label, "type": cs.root_type, "short": cs.short_multiplicity, "long": cs.long_multiplicity});
                    rep.flag("defect_root_data", cs.type_ok, loc.clone());
                    rep.check("defect_ho_laplacian", cs.operator.residual, 1e-9, json!({"case": loc, "point": cs.operator.location}));
                }
            }
            Err(e) => rep.error("defect_match", &e, json!({"d": d, "p": p})),
        }
    }
    rep
}

fn rel(a: (C64, C64), b: (C64, C64)) -> f64 {
    let s = 1.0f64.max(a.0.norm()).max(a.1.norm());
    (a.0 - b.0).norm().max((a.1 - b.1).norm()) / s
}

/// One hand-placed point per face of the fundamental domain, with its causal region.
pub fn causal_points() -> Vec<(Face, ChiPoint)> {
    vec![
        (Face::Empty, ChiPoint::new(c(0.0, 0.7), c(0.0, 2.1))),
        (Face::Zero, ChiPoint::new(c(0.0, 0.9), c(1.3, PI))),
        (Face::One, ChiPoint::new(c(-0.8, 1.1), c(0.8, 1.1))),
        (Face::Two, ChiPoint::new(c(1.2, 0.0), c(0.0, 1.7))),
        (Face::ZeroOne, ChiPoint::new(c(0.5, PI), c(1.4, PI))),
        (Face::ZeroTwo, ChiPoint::new(c(0.6, 0.0), c(1.1, PI))),
        (Face::OneTwo, ChiPoint::new(c(0.4, 0.0), c(1.5, 0.0))),
    ]
}

/// Coordinates: W̃-invariance of f, two routes to (u, v), the causal table and the Jacobian.
pub fn coords_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("coords");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = [ChiPoint::new(c(0.7, 0.2), c(1.9, -0.4)), ChiPoint::new(c(1.3, 0.5), c(0.4, 1.1)), ChiPoint::new(c(0.9, 0.0), c(2.2, 0.0))];
    for pt in &base {
        let f0 = coords::f_map(pt);
        for g in [Gen::S0, Gen::S1, Gen::S2] {
            let r = match (&f0, coords::f_map(&coords::apply_gen(g, pt))) {
                (Ok(a), Ok(b)) => rel(*a, b),
                _ => f64::INFINITY,
            };
            rep.check(format!("f_invariant_{g}"), r, 1e-12, pt_json(pt));
        }
    }
    for k in 0..20 {
        let pt = ChiPoint::new(c(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0)));
        let len = rng.gen_range(3..12);
        let word: Vec<Gen> = (0..len).map(|_| [Gen::S0, Gen::S1, Gen::S2][rng.gen_range(0..3)]).collect();
        let r = match (coords::f_map(&pt), coords::f_map(&coords::apply_word(&word, &pt))) {
            (Ok(a), Ok(b)) => rel(a, b),
            _ => f64::INFINITY,
        };
        let w: Vec<String> = word.iter().map(|g| g.to_string()).collect();
        rep.check("f_invariant_word", r, 1e-12, json!({"index": k, "point": pt_json(&pt), "word": w}));
    }
    // (u, v) from corner entries, from η-pairings of the configuration, and from f(χ).
    for (p, qq) in [(3, 0), (4, 0), (2, 1), (3, 1)] {
        let s = sig(p, qq);
        for spec in catalog(s, PairKind::FourPoint).unwrap_or_default() {
            for pt in radial::random_regular_points(&spec, 5, seed) {
                let loc = json!({"signature": sig_json(s), "label": spec.label.to_string(), "point": pt_json(&pt)});
                let res = parametrize(&spec, &pt).and_then(|g| {
                    let a = coords::cross_ratios_from_corners(&g)?;
                    let b = coords::cross_ratios(s, &coords::configuration(s, &g), 1e-12)?;
                    let f = coords::f_map(&pt)?;
                    Ok((rel(a, b), rel(a, f)))
                });
                match res {
                    Ok((dual, fm)) => {
                        rep.check("cross_ratio_dual_path", dual, 1e-12, loc.clone());
                        rep.check("cross_ratio_f_map", fm, 1e-12, loc);
                    }
                    Err(e) => rep.error("cross_ratio", &e, loc),
                }
            }
        }
    }
    for (face, pt) in causal_points() {
        let loc = json!({"face": face.to_string(), "point": pt_json(&pt)});
        match coords::classify_causal(&pt) {
            Ok(r) => {
                rep.flag("causal_region", r.region == face && r.causal == face.causal(), json!({"case": loc, "found": r.region.to_string()}));
                let im = r.u.im.abs().max(r.v.im.abs());
                rep.check("causal_real_cross_ratios", im, 1e-12, loc.clone());
            }
            Err(e) => rep.error("causal_region", &e, loc.clone()),
        }
        let word = [Gen::S1, Gen::S0, Gen::S2, Gen::S1];
        let moved = coords::apply_word(&word, &pt);
        match coords::classify_causal(&moved) {
            Ok(r) => {
                rep.flag("causal_region_translate", r.region == face, json!({"case": loc, "found": r.region.to_string()}));
            }
            Err(e) => rep.error("causal_region_translate", &e, loc),
        }
    }
    let mut ratios = Vec::new();
    for _ in 0..50 {
        let pt = ChiPoint::real(&[rng.gen_range(0.2..2.5), rng.gen_range(0.2..2.5)]);
        if (pt.chi[0] - pt.chi[1]).norm() < 0.05 {
            continue;
        }
        if let Ok(fd) = coords::jacobian_det_fd(&pt, 1e-5) {
            ratios.push((fd / coords::jacobian_det(&pt), pt));
        }
    }
    let spread = ratios.iter().map(|(r, _)| (r - c(1.0, 0.0)).norm()).fold(0.0, f64::max);
    rep.check("jacobian_factorization", spread, 1e-6, json!({"points": ratios.len()}));
    rep
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| run(s, seed).expect("known suite")).collect()
}
