//! Conformal compactification, cross-ratios, the maps f and g, and the affine C̃₂ action on (χ₁, χ₂).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::cartan::ChiPoint;
use crate::error::{Error, Result};
use crate::liealg::Signature;
use crate::scalar::{c, Field, C64};

/// Points closer than this to a wall count as lying on it.
pub const WALL_EXACT: f64 = 1e-13;
/// Points within this distance of a wall (but not on it) are reported as boundary.
pub const WALL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Face {
    Empty,
    Zero,
    One,
    Two,
    ZeroOne,
    ZeroTwo,
    OneTwo,
}

impl Face {
    pub const ALL: [Face; 7] =
        [Face::Empty, Face::Zero, Face::One, Face::Two, Face::ZeroOne, Face::ZeroTwo, Face::OneTwo];

    pub fn from_walls(w0: bool, w1: bool, w2: bool) -> Option<Face> {
        Some(match (w0, w1, w2) {
            (false, false, false) => Face::Empty,
            (true, false, false) => Face::Zero,
            (false, true, false) => Face::One,
            (false, false, true) => Face::Two,
            (true, true, false) => Face::ZeroOne,
            (true, false, true) => Face::ZeroTwo,
            (false, true, true) => Face::OneTwo,
            (true, true, true) => return None,
        })
    }

    pub fn causal(&self) -> &'static str {
        match self {
            Face::Empty => "E_tu",
            Face::Zero => "U",
            Face::One => "E_stu",
            Face::Two => "T",
            Face::ZeroOne => "E_su",
            Face::ZeroTwo => "S",
            Face::OneTwo => "E_st",
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Face::Empty => "{}",
            Face::Zero => "{0}",
            Face::One => "{1}",
            Face::Two => "{2}",
            Face::ZeroOne => "{0,1}",
            Face::ZeroTwo => "{0,2}",
            Face::OneTwo => "{1,2}",
        })
    }
}

/// A point of the compactification, stored unnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint<S: Field> {
    pub v: Vec<S>,
}

fn eta_full(sig: Signature) -> Vec<i64> {
    sig.eta()
}

pub fn eta_proj<S: Field>(sig: Signature, v: &[S], w: &[S]) -> S {
    eta_full(sig)
        .iter()
        .zip(v.iter().zip(w))
        .fold(S::zero(), |acc, (e, (a, b))| acc + S::from_i64(*e) * a.clone() * b.clone())
}

/// η restricted to ℝ^{p,q} (the middle block).
pub fn eta_flat<S: Field>(sig: Signature, x: &[S], y: &[S]) -> S {
    let e = eta_full(sig);
    x.iter().zip(y).enumerate().fold(S::zero(), |acc, (i, (a, b))| acc + S::from_i64(e[i + 1]) * a.clone() * b.clone())
}

/// ι(x) = (1 − η(x,x) : 2x : 1 + η(x,x)).
pub fn iota<S: Field>(sig: Signature, x: &[S]) -> Result<ProjectivePoint<S>> {
    if x.len() != sig.d() {
        return Err(Error::Dimension(format!("expected {} coordinates", sig.d())));
    }
    let n2 = eta_flat(sig, x, x);
    let mut v = Vec::with_capacity(sig.n());
    v.push(S::one() - n2.clone());
    v.extend(x.iter().map(|a| S::from_i64(2) * a.clone()));
    v.push(S::one() + n2);
    Ok(ProjectivePoint { v })
}

/// Inverse chart v ↦ v/(v₀ + v_{d+1}).
pub fn chart<S: Field>(p: &ProjectivePoint<S>) -> Result<Vec<S>> {
    let n = p.v.len();
    let den = p.v[0].clone() + p.v[n - 1].clone();
    if den.negligible(1e-300) {
        return Err(Error::Validation("point at infinity has no chart coordinates".into()));
    }
    Ok(p.v[1..n - 1].iter().map(|a| a.clone() / den.clone()).collect())
}

/// ∞ = (1 : 0 : −1).
pub fn infinity<S: Field>(sig: Signature) -> ProjectivePoint<S> {
    let n = sig.n();
    let mut v = vec![S::zero(); n];
    v[0] = S::one();
    v[n - 1] = -S::one();
    ProjectivePoint { v }
}

/// (u, v) = (η₁₂η₃₄/(η₁₃η₂₄), η₁₄η₂₃/(η₁₃η₂₄)).
pub fn cross_ratios<S: Field>(sig: Signature, pts: &[ProjectivePoint<S>; 4], tol: f64) -> Result<(S, S)> {
    let e = |i: usize, j: usize| eta_proj(sig, &pts[i].v, &pts[j].v);
    let scale: f64 = pts.iter().map(|p| p.v.iter().map(|x| x.mag()).fold(0.0, f64::max)).product::<f64>().sqrt();
    for i in 0..4 {
        for j in i + 1..4 {
            if e(i, j).negligible(tol * scale.max(1e-300)) {
                return Err(Error::Validation(format!("points {} and {} are not in general position", i + 1, j + 1)));
            }
        }
    }
    let den = e(0, 2) * e(1, 3);
    Ok((e(0, 1) * e(2, 3) / den.clone(), e(0, 3) * e(1, 2) / den))
}

/// The four points (ι(0), ∞, gι(0), g∞).
pub fn configuration(sig: Signature, g: &DMatrix<C64>) -> [ProjectivePoint<C64>; 4] {
    let n = sig.n();
    let o = iota::<C64>(sig, &vec![c(0.0, 0.0); sig.d()]).expect("dimension");
    let inf = infinity::<C64>(sig);
    let act = |p: &ProjectivePoint<C64>| ProjectivePoint { v: (0..n).map(|i| (0..n).map(|j| g[(i, j)] * p.v[j]).sum()).collect() };
    let (go, ginf) = (act(&o), act(&inf));
    [o, inf, go, ginf]
}

/// (u, v) from the corner entries A, C, G, I of g.
pub fn cross_ratios_from_corners(g: &DMatrix<C64>) -> Result<(C64, C64)> {
    let n = g.nrows();
    let (a, cc, gg, i) = (g[(0, 0)], g[(0, n - 1)], g[(n - 1, 0)], g[(n - 1, n - 1)]);
    let den = (a - i) * (a - i) - (cc - gg) * (cc - gg);
    let num = (a + i) * (a + i) - (cc + gg) * (cc + gg);
    let scale = (a.norm() + i.norm() + cc.norm() + gg.norm()).powi(2).max(1.0);
    if den.norm() < 1e-12 * scale || num.norm() < 1e-12 * scale {
        return Err(Error::Validation("matrix outside the dense subset with finite nonzero cross-ratios".into()));
    }
    Ok((c(4.0, 0.0) / den, num / den))
}

pub fn f_map(pt: &ChiPoint) -> Result<(C64, C64)> {
    let (g1, g2) = g_map(pt)?;
    Ok((c(1.0, 0.0) / g2, g1 / g2))
}

pub fn g_map(pt: &ChiPoint) -> Result<(C64, C64)> {
    check_domain(pt)?;
    let (a, b) = (pt.chi[0] / 2.0, pt.chi[1] / 2.0);
    let (sa, sb, ca, cb) = (a.sinh(), b.sinh(), a.cosh(), b.cosh());
    Ok((sa * sa * sb * sb, ca * ca * cb * cb))
}

fn check_domain(pt: &ChiPoint) -> Result<()> {
    if pt.chi.len() != 2 {
        return Err(Error::Dimension("χ-points have two coordinates".into()));
    }
    if !pt.in_domain() {
        return Err(Error::Validation("point outside D".into()));
    }
    Ok(())
}

/// det g' in factorized form.
pub fn jacobian_det(pt: &ChiPoint) -> C64 {
    let (x1, x2) = (pt.chi[0], pt.chi[1]);
    x1.sinh() * x2.sinh() * ((x2 - x1) / 2.0).sinh() * ((x2 + x1) / 2.0).sinh() * 0.25
}

/// det g' by central differences (g is holomorphic, so a real step suffices).
pub fn jacobian_det_fd(pt: &ChiPoint, h: f64) -> Result<C64> {
    let eval = |d1: f64, d2: f64| g_map(&ChiPoint::new(pt.chi[0] + d1, pt.chi[1] + d2));
    let (p1, m1) = (eval(h, 0.0)?, eval(-h, 0.0)?);
    let (p2, m2) = (eval(0.0, h)?, eval(0.0, -h)?);
    let d = |p: C64, m: C64| (p - m) / (2.0 * h);
    let (j11, j21) = (d(p1.0, m1.0), d(p1.1, m1.1));
    let (j12, j22) = (d(p2.0, m2.0), d(p2.1, m2.1));
    Ok(j11 * j22 - j12 * j21)
}

pub fn jacobian_nonzero(pt: &ChiPoint) -> Result<bool> {
    check_domain(pt)?;
    Ok(jacobian_det(pt).norm() > 0.0)
}

/// z = sech²(χ₁/2), z̄ = sech²(χ₂/2).
pub fn z_zbar(pt: &ChiPoint) -> (C64, C64) {
    let s = |x: C64| {
        let ch = (x / 2.0).cosh();
        c(1.0, 0.0) / (ch * ch)
    };
    (s(pt.chi[0]), s(pt.chi[1]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gen {
    S0,
    S1,
    S2,
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::S0 => "s0",
            Gen::S1 => "s1",
            Gen::S2 => "s2",
        })
    }
}

pub fn apply_gen(g: Gen, pt: &ChiPoint) -> ChiPoint {
    let (a, b) = (pt.chi[0], pt.chi[1]);
    match g {
        Gen::S0 => ChiPoint::new(a, c(0.0, 2.0 * PI) - b),
        Gen::S1 => ChiPoint::new(b, a),
        Gen::S2 => ChiPoint::new(-a, b),
    }
}

/// Applies the generators in order, first element first.
pub fn apply_word(word: &[Gen], pt: &ChiPoint) -> ChiPoint {
    word.iter().fold(pt.clone(), |p, g| apply_gen(*g, &p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    /// Face of the fundamental domain, `None` when the point is near a wall.
    pub face: Option<Face>,
    pub boundary: bool,
    pub representative: ChiPoint,
    pub word: Vec<Gen>,
}

pub fn weyl_reduce(pt: &ChiPoint) -> Result<Reduction> {
    check_domain(pt)?;
    let mut p = pt.clone();
    let mut word = Vec::new();
    let push = |g: Gen, p: &mut ChiPoint, word: &mut Vec<Gen>| {
        *p = apply_gen(g, p);
        word.push(g);
    };
    // Imaginary parts into the alcove 0 ≤ Im χ₁ ≤ Im χ₂ ≤ π.
    for _ in 0..10_000 {
        let (a, b) = (p.chi[0].im, p.chi[1].im);
        if a < -WALL_EXACT {
            push(Gen::S2, &mut p, &mut word);
        } else if a > b + WALL_EXACT {
            push(Gen::S1, &mut p, &mut word);
        } else if b > PI + WALL_EXACT {
            push(Gen::S0, &mut p, &mut word);
        } else {
            break;
        }
    }
    let (a, b) = (p.chi[0].im, p.chi[1].im);
    let dists = [(b - PI).abs(), (a - b).abs(), a.abs()];
    let on: Vec<bool> = dists.iter().map(|d| *d <= WALL_EXACT).collect();
    let near = dists.iter().any(|d| *d > WALL_EXACT && *d <= WALL_TOL);
    let face = Face::from_walls(on[0], on[1], on[2]);
    if near || face.is_none() {
        return Ok(Reduction { face: None, boundary: true, representative: p, word });
    }
    let face = face.unwrap();
    // Real parts into the chamber of the stabilizing parabolic subgroup.
    let negate_first: &[Gen] = match face {
        Face::Two | Face::ZeroTwo | Face::OneTwo => &[Gen::S2],
        Face::ZeroOne => &[Gen::S1, Gen::S0, Gen::S1],
        _ => &[],
    };
    for _ in 0..16 {
        let (x, y) = (p.chi[0].re, p.chi[1].re);
        let step: &[Gen] = match face {
            Face::Empty => &[],
            Face::Zero if y < 0.0 => &[Gen::S0],
            Face::One if x > y => &[Gen::S1],
            Face::ZeroTwo if y < 0.0 => &[Gen::S0],
            Face::Two | Face::ZeroTwo if x < 0.0 => negate_first,
            Face::ZeroOne | Face::OneTwo if x < 0.0 => negate_first,
            Face::ZeroOne | Face::OneTwo if x > y => &[Gen::S1],
            _ => &[],
        };
        if step.is_empty() {
            break;
        }
        for g in step {
            push(*g, &mut p, &mut word);
        }
    }
    let (x, y) = (p.chi[0].re, p.chi[1].re);
    let real_walls: Vec<f64> = match face {
        Face::Empty => vec![],
        Face::Zero => vec![y],
        Face::One => vec![y - x],
        Face::Two => vec![x],
        Face::ZeroTwo => vec![x, y],
        Face::ZeroOne | Face::OneTwo => vec![x, y - x],
    };
    let boundary = real_walls.iter().any(|w| *w <= WALL_TOL);
    Ok(Reduction { face: if boundary { None } else { Some(face) }, boundary, representative: p, word })
}

fn y_conditions(face: Face, pt: &ChiPoint, tol: f64, strict: bool) -> bool {
    let (a, b) = (pt.chi[0], pt.chi[1]);
    let zero = |x: f64| x.abs() <= tol;
    let pos = |x: f64| if strict { x > tol } else { x >= -tol };
    let below_pi = |x: f64| if strict { x < PI - tol } else { x <= PI + tol };
    match face {
        Face::Empty => zero(a.re) && zero(b.re) && pos(a.im) && pos(b.im - a.im) && below_pi(b.im),
        Face::Zero => zero(a.re) && pos(b.re) && pos(a.im) && below_pi(a.im) && zero(b.im - PI),
        Face::One => zero(a.re + b.re) && pos(b.re) && zero(a.im - b.im) && pos(a.im) && below_pi(a.im),
        Face::Two => pos(a.re) && zero(a.im) && zero(b.re) && pos(b.im) && below_pi(b.im),
        Face::ZeroOne => pos(a.re) && pos(b.re - a.re) && zero(a.im - PI) && zero(b.im - PI),
        Face::ZeroTwo => pos(a.re) && pos(b.re) && zero(a.im) && zero(b.im - PI),
        Face::OneTwo => pos(a.re) && pos(b.re - a.re) && zero(a.im) && zero(b.im),
    }
}

pub fn in_y(face: Face, pt: &ChiPoint, tol: f64) -> bool {
    pt.chi.len() == 2 && y_conditions(face, pt, tol, true)
}

pub fn in_closure_y(face: Face, pt: &ChiPoint, tol: f64) -> bool {
    pt.chi.len() == 2 && y_conditions(face, pt, tol, false)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausalReport {
    pub region: Face,
    pub causal: &'static str,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub u: C64,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub v: C64,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub z: C64,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub zbar: C64,
    /// Representative in Y (equal to the input when it already lies there).
    pub representative: ChiPoint,
}

/// Causal region of a real 4-point configuration; the point must lie on a W̃-translate of Y.
pub fn classify_causal(pt: &ChiPoint) -> Result<CausalReport> {
    check_domain(pt)?;
    let tol = 1e-12;
    let direct = Face::ALL.into_iter().find(|f| in_y(*f, pt, tol));
    let (face, rep) = match direct {
        Some(f) => (f, pt.clone()),
        None => {
            let red = weyl_reduce(pt)?;
            let f = red
                .face
                .filter(|f| in_y(*f, &red.representative, tol))
                .ok_or_else(|| Error::Validation("point is not on the real locus".into()))?;
            (f, red.representative)
        }
    };
    let (u, v) = f_map(&rep)?;
    let (z, zbar) = z_zbar(&rep);
    Ok(CausalReport { region: face, causal: face.causal(), u, v, z, zbar, representative: rep })
}

/// A random preimage of (u, v) under f: random root order, signs and iπℤ shifts.
pub fn random_preimage<R: Rng>(u: C64, v: C64, rng: &mut R) -> ChiPoint {
    let s = c(1.0, 0.0) + u - v;
    let disc = (s * s - u * 4.0).sqrt();
    let (mut z1, mut z2) = ((s + disc) / 2.0, (s - disc) / 2.0);
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut z1, &mut z2);
    }
    let mut lift = |z: C64| {
        let w = c(1.0, 0.0) / z.sqrt();
        let w = if rng.gen_bool(0.5) { -w } else { w };
        let h = w.acosh();
        let h = if rng.gen_bool(0.5) { -h } else { h };
        let k = rng.gen_range(-2i32..=2) as f64;
        (h + c(0.0, PI * k)) * 2.0
    };
    let (a, b) = (lift(z1), lift(z2));
    ChiPoint::new(a, b)
}

/// Characterization of f(Y): the discriminant 1 + u² + v² − 2u − 2v − 2uv.
pub fn discriminant(u: C64, v: C64) -> C64 {
    c(1.0, 0.0) + u * u + v * v - u * 2.0 - v * 2.0 - u * v * 2.0
}

/// Is the reduced representative of `a` the same as that of `b`?
pub fn same_orbit(a: &ChiPoint, b: &ChiPoint, tol: f64) -> Result<bool> {
    let (ra, rb) = (weyl_reduce(a)?, weyl_reduce(b)?);
    if ra.boundary || rb.boundary {
        return Ok(false);
    }
    Ok(ra.face == rb.face
        && ra.representative.chi.iter().zip(&rb.representative.chi).all(|(x, y)| (x - y).norm() <= tol))
}
