//! Target-side operators (Heckman–Opdam Laplacians, gauges, ρ-norms) and the scalar, spinor and
//! defect matchings against the radial Casimir.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartan::{find_spec, catalog, CartanLabel, CartanSubsetSpec, ChiPoint, PairKind};
use crate::error::{Error, Result};
use crate::liealg::Signature;
use crate::radial::{
    plain_power, qscale, radial_casimir, zero_coeff_at, coth_at, sech_sq_half_at, spec_power, Bimodule, FirstOrderTerm,
    PointOperator, PowerFn, RadialOperator, RootSpaces, ZeroKind, ZeroOrderTerm, k_l_matrices,
};
use crate::scalar::{c, q, Field, C64, CQ, Q};

/// Positive roots (label coordinates) with a multiplicity value each.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityVector {
    pub system: String,
    #[serde(serialize_with = "ser_values")]
    pub values: Vec<(Vec<Q>, C64)>,
}

fn ser_values<S: serde::Serializer>(v: &[(Vec<Q>, C64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (r, k) in v {
        let root: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        seq.serialize_element(&serde_json::json!({"root": root, "value": [k.re, k.im]}))?;
    }
    seq.end()
}

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x, 1)).collect()
}

fn is_positive(r: &[Q]) -> bool {
    r.iter().find(|x| !x.is_zero()).map(|x| x.is_positive()).unwrap_or(false)
}

fn dot(a: &[Q], m: &DMatrix<C64>, b: &[Q]) -> C64 {
    let mut s = C64::zero();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            s += m[(i, j)] * (x.to_c64().re * y.to_c64().re);
        }
    }
    s
}

impl MultiplicityVector {
    pub fn get(&self, root: &[Q]) -> Option<C64> {
        let neg: Vec<Q> = root.iter().map(|x| -x).collect();
        self.values.iter().find(|(r, _)| r.as_slice() == root || *r == neg).map(|(_, k)| *k)
    }

    pub fn rank(&self) -> usize {
        self.values.first().map(|(r, _)| r.len()).unwrap_or(0)
    }

    /// Largest |k_{s_α β} − k_β| over pairs of roots; infinite when a reflection leaves the list.
    pub fn weyl_residual(&self, metric: &DMatrix<C64>) -> f64 {
        let mut worst = 0.0f64;
        for (a, _) in &self.values {
            let aa = dot(a, metric, a);
            for (b, kb) in &self.values {
                let ab = dot(b, metric, a);
                let f = ab * 2.0 / aa;
                let Some(fq) = crate::scalar::rationalize(f.re, 8, 1e-9) else { return f64::INFINITY };
                let img: Vec<Q> = b.iter().zip(a).map(|(x, y)| x - &fq * y).collect();
                match self.get(&img) {
                    Some(k) => worst = worst.max((k - kb).norm()),
                    None => return f64::INFINITY,
                }
            }
        }
        worst
    }
}

/// k for the four-point pair: ½ on ±2ε_i, (d−2)/2 on ±ε₁±ε₂.
pub fn fourpoint_k(d: usize) -> MultiplicityVector {
    let s = c((d as f64 - 2.0) / 2.0, 0.0);
    MultiplicityVector {
        system: "C2".into(),
        values: vec![
            (qv(&[2, 0]), c(0.5, 0.0)),
            (qv(&[0, 2]), c(0.5, 0.0)),
            (qv(&[1, 1]), s),
            (qv(&[1, -1]), s),
        ],
    }
}

/// k_{2γ} = n_γ/2 read off a root decomposition (R = 2Σ).
pub fn k_from_roots<S: crate::radial::RadialField>(rs: &RootSpaces<S>) -> MultiplicityVector {
    let mut values: Vec<(Vec<Q>, C64)> = rs
        .roots
        .iter()
        .filter(|r| is_positive(&r.coords))
        .map(|r| (qscale(&r.coords, 2), c(r.basis.len() as f64 / 2.0, 0.0)))
        .collect();
    values.sort_by(|a, b| b.0.cmp(&a.0));
    MultiplicityVector { system: "2Σ".into(), values }
}

fn bc2(short: C64, long: C64, double: C64, system: &str) -> MultiplicityVector {
    MultiplicityVector {
        system: system.into(),
        values: vec![
            (qv(&[1, 0]), short),
            (qv(&[0, 1]), short),
            (qv(&[2, 0]), double),
            (qv(&[0, 2]), double),
            (qv(&[1, 1]), long),
            (qv(&[1, -1]), long),
        ],
    }
}

/// k on BC₂: 0 on ±ε_i, ½ on ±2ε_i, (d−2)/2 on ±ε₁±ε₂.
pub fn scalar_k(d: usize) -> MultiplicityVector {
    bc2(C64::zero(), c((d as f64 - 2.0) / 2.0, 0.0), c(0.5, 0.0), "BC2")
}

/// m on BC₂: α on ±ε_i, (1−α+β)/2 on ±2ε_i, (d−2)/2 on ±ε₁±ε₂.
pub fn scalar_m(d: usize, alpha: f64, beta: f64) -> MultiplicityVector {
    bc2(c(alpha, 0.0), c((d as f64 - 2.0) / 2.0, 0.0), c((1.0 - alpha + beta) / 2.0, 0.0), "BC2")
}

/// l: −αβ on ±ε_i, −((α−β)/2)² on ±2ε_i, 0 on ±ε₁±ε₂.
pub fn scalar_l(alpha: f64, beta: f64) -> MultiplicityVector {
    let h = (alpha - beta) / 2.0;
    bc2(c(-alpha * beta, 0.0), C64::zero(), c(-h * h, 0.0), "BC2")
}

/// ρ(k) = ½ Σ_{α>0} k_α α.
pub fn rho(k: &MultiplicityVector) -> Vec<C64> {
    let r = k.rank();
    let mut v = vec![C64::zero(); r];
    for (a, kv) in &k.values {
        for i in 0..r {
            v[i] += kv * (a[i].to_c64().re / 2.0);
        }
    }
    v
}

pub fn rho_norm(k: &MultiplicityVector, metric: &DMatrix<C64>) -> C64 {
    let v = DVector::from_vec(rho(k));
    (v.transpose() * metric * &v)[(0, 0)]
}

/// Exact ‖ρ(k)‖² for rational k and metric.
pub fn rho_norm_exact(k: &[(Vec<Q>, Q)], metric: &DMatrix<CQ>) -> CQ {
    let r = metric.nrows();
    let half = q(1, 2);
    let mut v = vec![Q::zero(); r];
    for (a, kv) in k {
        for i in 0..r {
            v[i] += kv * &a[i] * &half;
        }
    }
    let mut s = CQ::zero();
    for i in 0..r {
        for j in 0..r {
            s = s + metric[(i, j)].clone() * CQ::new(&v[i] * &v[j], Q::zero());
        }
    }
    s
}

/// L(k) = Σ G*_{kl}∂_k∂_l + Σ_{α>0} k_α coth(α/2) ∂_α with ∂_α = Σ_k (G*α)_k ∂_k,
/// stored with one first-order term per sign of λ = α/2.
pub fn ho_laplacian(k: &MultiplicityVector, metric: &DMatrix<C64>) -> RadialOperator<C64> {
    let r = metric.nrows();
    let mut first_order = Vec::new();
    for (a, kv) in &k.values {
        if kv.norm() == 0.0 {
            continue;
        }
        for s in [1i64, -1] {
            let lam: Vec<Q> = a.iter().map(|x| x * q(s, 2)).collect();
            let dir: Vec<C64> = (0..r).map(|i| (0..r).map(|j| metric[(i, j)] * lam[j].to_c64().re).sum()).collect();
            first_order.push(FirstOrderTerm { root: lam, coefficient: *kv, direction: dir });
        }
    }
    RadialOperator {
        second_order: metric.clone(),
        first_order,
        zero_order: vec![],
        constant: DMatrix::zeros(1, 1),
        invariant_basis: DMatrix::identity(1, 1),
    }
}

/// Adds Σ_{α>0} l_α B*(α,α)/(e^{α/2}−e^{−α/2})².
pub fn with_potential(mut op: RadialOperator<C64>, l: &MultiplicityVector, metric: &DMatrix<C64>) -> RadialOperator<C64> {
    for (a, lv) in &l.values {
        if lv.norm() == 0.0 {
            continue;
        }
        let w = lv * dot(a, metric, a) / 4.0;
        op.zero_order.push(ZeroOrderTerm { root: a.clone(), kind: ZeroKind::InvSinhSqHalf, matrix: DMatrix::from_element(1, 1, w) });
    }
    op
}

pub fn with_constant(mut op: RadialOperator<C64>, v: C64) -> RadialOperator<C64> {
    op.constant += DMatrix::identity(op.constant.nrows(), op.constant.ncols()) * v;
    op
}

/// δ = Π_{γ>0} (e^{γ/2} − e^{−γ/2})^{e_γ}.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeData {
    #[serde(serialize_with = "ser_values")]
    pub exponents: Vec<(Vec<Q>, C64)>,
}

impl GaugeData {
    /// Exponents (m − k)_γ.
    pub fn difference(m: &MultiplicityVector, k: &MultiplicityVector) -> Result<Self> {
        let mut exponents = Vec::new();
        for (a, mv) in &m.values {
            let kv = k.get(a).ok_or_else(|| Error::Validation(format!("k has no value on {a:?}")))?;
            exponents.push((a.clone(), mv - kv));
        }
        for (a, kv) in &k.values {
            if m.get(a).is_none() {
                exponents.push((a.clone(), -kv));
            }
        }
        Ok(GaugeData { exponents })
    }

    /// δ(k)^{1/2}: exponents k_γ.
    pub fn half_density(k: &MultiplicityVector) -> Self {
        GaugeData { exponents: k.values.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        GaugeData { exponents: self.exponents.iter().map(|(a, e)| (a.clone(), e * s)).collect() }
    }

    /// Exponents of the product δ·δ'; roots whose exponents cancel are dropped.
    pub fn compose(&self, o: &Self) -> Self {
        let mut out: Vec<(Vec<Q>, C64)> = self.exponents.clone();
        for (a, e) in &o.exponents {
            match out.iter_mut().find(|(b, _)| b == a) {
                Some(x) => x.1 += e,
                None => out.push((a.clone(), *e)),
            }
        }
        out.retain(|(_, e)| *e != C64::zero());
        GaugeData { exponents: out }
    }

    /// ∇ log δ and the Hessian of log δ.
    pub fn log_derivatives(&self, pow: &PowerFn, r: usize) -> Result<(DVector<C64>, DMatrix<C64>)> {
        let mut g = DVector::<C64>::zeros(r);
        let mut h = DMatrix::<C64>::zeros(r, r);
        for (a, e) in &self.exponents {
            if e.norm() == 0.0 {
                continue;
            }
            let half: Vec<Q> = a.iter().map(|x| x * q(1, 2)).collect();
            let ct = coth_at(pow, &half)?;
            let cs = zero_coeff_at(pow, a, ZeroKind::InvSinhSqHalf)?;
            for k in 0..r {
                let ak = a[k].to_c64().re / 2.0;
                g[k] += e * ak * ct;
                for l in 0..r {
                    h[(k, l)] -= e * ak * (a[l].to_c64().re / 2.0) * cs;
                }
            }
        }
        Ok((g, h))
    }

    /// log δ at a point, for real χ with all e^{γ/2} − e^{−γ/2} > 0.
    pub fn log_value(&self, pt: &ChiPoint) -> C64 {
        self.exponents
            .iter()
            .map(|(a, e)| {
                let s: C64 = a.iter().zip(&pt.chi).map(|(x, z)| z * x.to_c64().re).sum();
                e * (c(2.0, 0.0) * (s / 2.0).sinh()).ln()
            })
            .sum()
    }

    /// δ ∘ A ∘ δ⁻¹ at a point where A is given by its frozen coefficients.
    pub fn conjugate(&self, a: &PointOperator, pow: &PowerFn) -> Result<PointOperator> {
        let r = a.second.nrows();
        let (g, h) = self.log_derivatives(pow, r)?;
        let qg = &a.second * &g;
        let first = &a.first - &qg * c(2.0, 0.0);
        let s = (g.transpose() * &qg)[(0, 0)] - (&a.second.component_mul(&h)).sum() - (a.first.transpose() * &g)[(0, 0)];
        let zero = &a.zero + DMatrix::<C64>::identity(a.zero.nrows(), a.zero.ncols()) * s;
        Ok(PointOperator { second: a.second.clone(), first, zero })
    }
}

/// Product form of the scalar gauge: Π_i cosh^{(β−α)/2}(χ_i/2) sinh^{(α+β)/2}(χ_i/2), as a logarithm.
pub fn scalar_gauge_closed_form(alpha: f64, beta: f64, pt: &ChiPoint) -> C64 {
    pt.chi
        .iter()
        .map(|z| (z / 2.0).cosh().ln() * ((beta - alpha) / 2.0) + (z / 2.0).sinh().ln() * ((alpha + beta) / 2.0))
        .sum()
}

/// Largest relative deviation between two operators on exponential probes e^{a·χ}.
pub fn probe_residual(x: &PointOperator, y: &PointOperator, probes: &[Vec<C64>]) -> f64 {
    probes
        .iter()
        .map(|a| {
            let mx = x.on_exponential(a);
            let my = y.on_exponential(a);
            let scale = mx.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            (&mx - &my).iter().fold(0.0f64, |m, z| m.max(z.norm())) / scale
        })
        .fold(0.0, f64::max)
}

/// Seeded exponential probe directions a ∈ [−2, 2]^r.
pub fn probes(r: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..r).map(|_| c(rng.gen_range(-2.0..2.0), 0.0)).collect()).collect()
}

/// The 10×10 grid χ₁ ∈ [0.3, 2], χ₂ offset by half a step so that χ₁ ≠ χ₂.
pub fn scalar_grid() -> Vec<ChiPoint> {
    let n = 10;
    let step = 1.7 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(ChiPoint::real(&[0.3 + step * i as f64, 0.3 + step * (j as f64 + 0.5)]));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Worst {
    pub residual: f64,
    pub location: Vec<f64>,
}

impl Worst {
    fn new() -> Self {
        Worst { residual: 0.0, location: vec![] }
    }
    fn update(&mut self, r: f64, pt: &ChiPoint) {
        if r > self.residual || self.location.is_empty() {
            self.residual = r.max(self.residual);
            self.location = pt.chi.iter().map(|z| z.re).collect();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarReport {
    pub spec: String,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub m_vector: MultiplicityVector,
    pub l_vector: MultiplicityVector,
    pub delta_exponents: GaugeData,
    pub rho_k_norm: f64,
    pub rho_m_norm: f64,
    /// ((d+β−1)² + (d+1)²)/4, the quoted closed form, kept for comparison.
    pub rho_m_norm_reference: f64,
    pub shift: f64,
    /// R vs L(k) + Σ l-terms.
    pub potential_form: Worst,
    /// L(k) + Σ l-terms vs δ(L(m) + ‖ρ(m)‖² − ‖ρ(k)‖²)δ⁻¹.
    pub k_conjugation: Worst,
    /// R vs δ(L(m) + β(β+d)/2)δ⁻¹.
    pub main: Worst,
    /// Spread of log(δ) − log(closed form) over the grid, after fixing the constant at (1,2).
    pub closed_form_spread: f64,
    pub weyl_residual_m: f64,
}

impl ScalarReport {
    pub fn max_residual(&self) -> f64 {
        self.main.residual.max(self.potential_form.residual).max(self.k_conjugation.residual)
    }
}

/// Scalar four-point matching on the 10×10 grid with 20 exponential probes.
pub fn scalar_match(spec: &CartanSubsetSpec, alpha: f64, beta: f64, seed: u64) -> Result<ScalarReport> {
    if spec.kind != PairKind::FourPoint {
        return Err(Error::Validation("scalar matching needs a four-point Cartan subset".into()));
    }
    let d = spec.sig.d();
    let rs = RootSpaces::<C64>::build(spec, seed)?;
    let w = Bimodule::<C64>::scalar(&rs.alg, c(alpha, 0.0), c(beta, 0.0));
    let radial = radial_casimir(&rs, &w)?;
    let metric = rs.metric();
    let k = scalar_k(d);
    let m = scalar_m(d, alpha, beta);
    let l = scalar_l(alpha, beta);
    let delta = GaugeData::difference(&m, &k)?;
    let rk = rho_norm(&k, &metric).re;
    let rm = rho_norm(&m, &metric).re;
    let shift = beta * (beta + d as f64) / 2.0;
    let potential_op = with_potential(ho_laplacian(&k, &metric), &l, &metric);
    let lm_shift = with_constant(ho_laplacian(&m, &metric), c(shift, 0.0));
    let lm_rho = with_constant(ho_laplacian(&m, &metric), c(rm - rk, 0.0));
    let pr = probes(2, 20, seed);
    let (mut potential_form, mut kconj, mut main) = (Worst::new(), Worst::new(), Worst::new());
    let reference = ChiPoint::real(&[1.0, 2.0]);
    let offset = delta.log_value(&reference) - scalar_gauge_closed_form(alpha, beta, &reference);
    let mut spread = 0.0f64;
    for pt in scalar_grid() {
        let plain = plain_power(&pt);
        let rp = radial.evaluate(spec, &pt)?;
        let lp = potential_op.evaluate_plain(&pt)?;
        let t_main = delta.conjugate(&lm_shift.evaluate_plain(&pt)?, &plain)?;
        let t_k = delta.conjugate(&lm_rho.evaluate_plain(&pt)?, &plain)?;
        potential_form.update(probe_residual(&rp, &lp, &pr), &pt);
        kconj.update(probe_residual(&lp, &t_k, &pr), &pt);
        main.update(probe_residual(&rp, &t_main, &pr), &pt);
        let dv = delta.log_value(&pt) - scalar_gauge_closed_form(alpha, beta, &pt) - offset;
        spread = spread.max(dv.norm());
    }
    Ok(ScalarReport {
        spec: spec.label.to_string(),
        d,
        alpha,
        beta,
        weyl_residual_m: m.weyl_residual(&metric),
        m_vector: m,
        l_vector: l,
        delta_exponents: delta,
        rho_k_norm: rk,
        rho_m_norm: rm,
        rho_m_norm_reference: ((d as f64 + beta - 1.0).powi(2) + (d as f64 + 1.0).powi(2)) / 4.0,
        shift,
        potential_form,
        k_conjugation: kconj,
        main,
        closed_form_spread: spread,
    })
}

/// Radial Casimir with trivial W against L(k) built from the root multiplicities.
pub fn trivial_match(spec: &CartanSubsetSpec, k: &MultiplicityVector, seed: u64) -> Result<Worst> {
    let rs = RootSpaces::<C64>::build(spec, seed)?;
    let w = Bimodule::<C64>::trivial(&rs.alg);
    let radial = radial_casimir(&rs, &w)?;
    if !radial.zero_order.is_empty() {
        return Err(Error::Computation("trivial bimodule produced a potential".into()));
    }
    let ho = ho_laplacian(k, &rs.metric());
    let r = spec.rank();
    let pr = probes(r, 20, seed);
    let mut worst = Worst::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let mut n = 0;
    while n < 20 {
        let chi: Vec<f64> = (0..r).map(|_| rng.gen_range(0.2..2.2)).collect();
        let sep = chi.iter().enumerate().all(|(i, a)| chi[i + 1..].iter().all(|b| (a - b).abs() > 0.05));
        if !sep {
            continue;
        }
        let pt = ChiPoint::real(&chi);
        let (Ok(a), Ok(b)) = (radial.evaluate(spec, &pt), ho.evaluate_plain(&pt)) else { continue };
        let res = probe_residual(&a, &b, &pr).max(a.max_diff(&b) / (1.0 + a.first.amax_norm()));
        worst.update(res, &pt);
        n += 1;
    }
    Ok(worst)
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for DVector<C64> {
    fn amax_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Middle line of the partially matched Hamiltonian against 2δ(k)^{1/2}(L(k)+‖ρ(k)‖²)δ(k)^{−1/2}.
pub fn hamiltonian_check(d: usize, seed: u64) -> Result<Worst> {
    let metric = DMatrix::<C64>::identity(2, 2);
    let k = fourpoint_k(d);
    let rk = rho_norm(&k, &metric);
    let lk = with_constant(ho_laplacian(&k, &metric), rk);
    let half = GaugeData::half_density(&k);
    let pr = probes(2, 20, seed);
    let mut worst = Worst::new();
    let dd = d as f64;
    for pt in scalar_grid() {
        let plain = plain_power(&pt);
        let mut conj = half.conjugate(&lk.evaluate_plain(&pt)?, &plain)?;
        conj.second *= c(2.0, 0.0);
        conj.first *= c(2.0, 0.0);
        conj.zero *= c(2.0, 0.0);
        let (x1, x2) = (pt.chi[0], pt.chi[1]);
        let csch2 = |z: C64| c(1.0, 0.0) / (z.sinh() * z.sinh());
        let pot = -csch2((x1 + x2) / 2.0) * ((dd - 2.0) * (dd - 4.0) / 4.0) - csch2((x1 - x2) / 2.0) * ((dd - 2.0) * (dd - 4.0) / 4.0)
            + (csch2(x1) + csch2(x2)) * 0.5;
        let target = PointOperator {
            second: DMatrix::identity(2, 2) * c(2.0, 0.0),
            first: DVector::zeros(2),
            zero: DMatrix::from_element(1, 1, pot),
        };
        worst.update(probe_residual(&conj, &target, &pr), &pt);
    }
    Ok(worst)
}

/// The Euclidean d=3 spec with c spanned by F_{2,0} and F_{3,4}.
/// With F_{0,2} instead the labels ε₁ and ε₂ trade places.
pub fn spinor_spec() -> Result<CartanSubsetSpec> {
    let sig = Signature::new(3, 0)?;
    let mut spec = find_spec(sig, PairKind::FourPoint, CartanLabel::Euclid)?;
    let alg = spec.algebra();
    spec.cprime[0] = alg.f::<Q>(0, 2).neg();
    Ok(spec)
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixCase {
    pub name: String,
    pub matches: bool,
    /// First mismatching entry as (row, col, computed, expected).
    pub mismatch: Option<(usize, usize, String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpinorReport {
    pub alpha: String,
    pub beta: String,
    pub cases: Vec<MatrixCase>,
    /// K/L on −γ coincide with those on γ.
    pub negatives_equal: bool,
    /// Numerical check of the gauged diagonal/off-diagonal potential decomposition.
    pub decomposition_residual: f64,
}

impl SpinorReport {
    pub fn all_match(&self) -> bool {
        self.cases.iter().all(|c| c.matches) && self.negatives_equal
    }
}

fn qmat(rows: Vec<Vec<Q>>) -> DMatrix<CQ> {
    let n = rows.len();
    DMatrix::from_fn(n, rows[0].len(), |i, j| CQ::new(rows[i][j].clone(), Q::zero()))
}

fn diag(v: Vec<Q>) -> DMatrix<CQ> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { CQ::new(v[i].clone(), Q::zero()) } else { CQ::zero() })
}

fn scale(m: DMatrix<CQ>, s: Q) -> DMatrix<CQ> {
    m.map(|x| x * CQ::new(s.clone(), Q::zero()))
}

fn compare(name: &str, got: &DMatrix<CQ>, want: &DMatrix<CQ>) -> MatrixCase {
    for i in 0..want.nrows() {
        for j in 0..want.ncols() {
            if got[(i, j)] != want[(i, j)] {
                let fmt = |z: &CQ| format!("{}{:+}i", z.re, z.im);
                return MatrixCase { name: name.into(), matches: false, mismatch: Some((i, j, fmt(&got[(i, j)]), fmt(&want[(i, j)]))) };
            }
        }
    }
    MatrixCase { name: name.into(), matches: true, mismatch: None }
}

/// The gauge matrix up to its 1/√2 factor; it is √2 times an orthogonal matrix.
pub fn spinor_gauge() -> DMatrix<CQ> {
    let z = |v: i64| q(v, 1);
    qmat(vec![
        vec![z(1), z(0), z(0), z(1)],
        vec![z(0), z(1), z(1), z(0)],
        vec![z(0), z(-1), z(1), z(0)],
        vec![z(-1), z(0), z(0), z(1)],
    ])
}

/// G X G⁻¹ with G = M/√2, i.e. M X Mᵀ / 2.
pub fn gauge_conjugate(x: &DMatrix<CQ>) -> DMatrix<CQ> {
    let m = spinor_gauge();
    let mt = m.transpose();
    let prod = crate::linalg::mat_mul(&crate::linalg::mat_mul(&m, x), &mt);
    scale(prod, q(1, 2))
}

/// Expected matrices, keyed by name, as functions of exact α, β.
pub fn spinor_targets(a: &Q, b: &Q) -> Vec<(String, Vec<Q>, bool, DMatrix<CQ>)> {
    let z = |v: i64| q(v, 1);
    let s = a + b;
    let two = z(2);
    let mut out = Vec::new();
    let k_pm = |sg: i64| {
        scale(
            qmat(vec![
                vec![z(1), z(0), z(0), z(1)],
                vec![z(0), z(1), z(sg), z(0)],
                vec![z(0), z(sg), z(1), z(0)],
                vec![z(1), z(0), z(0), z(1)],
            ]),
            q(-1, 8),
        )
    };
    out.push(("K_{e1+e2}".to_string(), vec![q(1, 2), q(1, 2)], true, k_pm(1)));
    out.push(("K_{e1-e2}".to_string(), vec![q(1, 2), q(-1, 2)], true, k_pm(-1)));
    for (i, sg) in [(0usize, 1i64), (1, -1)] {
        let t = &two * &s;
        let e = |x: Q| x.clone() * x;
        let dg = diag(vec![e(&t + z(sg)), e(t.clone()), e(t.clone()), e(&t - z(sg))]);
        let root = if i == 0 { vec![z(1), z(0)] } else { vec![z(0), z(1)] };
        out.push((format!("K_{{2e{}}}", i + 1), root, true, scale(dg, q(-1, 8))));
    }
    let l_pm = |sg: i64| {
        scale(
            qmat(vec![
                vec![z(0), z(0), z(0), z(1)],
                vec![z(0), z(0), z(sg), z(0)],
                vec![z(0), z(sg), z(0), z(0)],
                vec![z(1), z(0), z(0), z(0)],
            ]),
            q(1, 16),
        )
    };
    out.push(("L_{(e1+e2)/2}".to_string(), vec![q(1, 2), q(1, 2)], false, l_pm(1)));
    out.push(("L_{(e1-e2)/2}".to_string(), vec![q(1, 2), q(-1, 2)], false, l_pm(-1)));
    for (i, sg) in [(0usize, 1i64), (1, -1)] {
        let h = q(sg, 2);
        let a2 = &two * a;
        let b2 = &two * b;
        let dg = diag(vec![
            (&a2 + &h) * (&b2 + &h),
            (&a2 + &h) * (&b2 - &h),
            (&a2 - &h) * (&b2 + &h),
            (&a2 - &h) * (&b2 - &h),
        ]);
        let root = if i == 0 { vec![z(1), z(0)] } else { vec![z(0), z(1)] };
        out.push((format!("L_{{e{}}}", i + 1), root, false, scale(dg, q(1, 8))));
    }
    // Gauged versions.
    out.push(("K~_{e1+e2}".to_string(), vec![q(1, 2), q(1, 2)], true, scale(diag(vec![z(1), z(1), z(0), z(0)]), q(-1, 4))));
    out.push(("K~_{e1-e2}".to_string(), vec![q(1, 2), q(-1, 2)], true, scale(diag(vec![z(1), z(0), z(1), z(0)]), q(-1, 4))));
    for (i, sg) in [(0usize, 1i64), (1, -1)] {
        let s2 = &s * &s;
        let o = -(z(sg) * &s);
        let m = qmat(vec![
            vec![&s2 + q(1, 4), z(0), z(0), o.clone()],
            vec![z(0), s2.clone(), z(0), z(0)],
            vec![z(0), z(0), s2.clone(), z(0)],
            vec![o, z(0), z(0), &s2 + q(1, 4)],
        ]);
        let root = if i == 0 { vec![z(1), z(0)] } else { vec![z(0), z(1)] };
        out.push((format!("K~_{{2e{}}}", i + 1), root, true, scale(m, q(-1, 2))));
    }
    out.push(("L~_{(e1+e2)/2}".to_string(), vec![q(1, 2), q(1, 2)], false, scale(diag(vec![z(1), z(1), z(-1), z(-1)]), q(1, 16))));
    out.push(("L~_{(e1-e2)/2}".to_string(), vec![q(1, 2), q(-1, 2)], false, scale(diag(vec![z(1), z(-1), z(1), z(-1)]), q(1, 16))));
    for (i, sg) in [(0usize, 1i64), (1, -1)] {
        let ab4 = z(4) * a * b;
        let o = -(z(sg) * &s);
        let dlt = z(sg) * (a - b);
        let m = qmat(vec![
            vec![&ab4 + q(1, 4), z(0), z(0), o.clone()],
            vec![z(0), &ab4 - q(1, 4), dlt.clone(), z(0)],
            vec![z(0), dlt, &ab4 - q(1, 4), z(0)],
            vec![o, z(0), z(0), &ab4 + q(1, 4)],
        ]);
        let root = if i == 0 { vec![z(1), z(0)] } else { vec![z(0), z(1)] };
        out.push((format!("L~_{{e{}}}", i + 1), root, false, scale(m, q(1, 8))));
    }
    out
}

/// Exact spinor K/L tables and their gauge transforms at rational (α, β).
pub fn spinor_match(alpha: &Q, beta: &Q, seed: u64) -> Result<SpinorReport> {
    let spec = spinor_spec()?;
    let rs = RootSpaces::<CQ>::build(&spec, seed)?;
    let a = CQ::new(alpha.clone(), Q::zero());
    let b = CQ::new(beta.clone(), Q::zero());
    let w = Bimodule::<CQ>::spinor(&rs.alg, a, b)?;
    let tables = k_l_matrices(&rs, &w)?;
    let mut cases = Vec::new();
    for (name, root, is_k, want) in spinor_targets(alpha, beta) {
        let pm = tables.get(&root).ok_or_else(|| Error::Computation(format!("no root {root:?}")))?;
        let raw = if is_k { &pm.k } else { &pm.l };
        let got = if name.contains('~') { gauge_conjugate(raw) } else { raw.clone() };
        cases.push(compare(&name, &got, &want));
    }
    let negatives_equal = tables.iter().all(|(g, pm)| {
        let neg: Vec<Q> = g.iter().map(|x| -x).collect();
        tables.get(&neg).map(|o| o.k == pm.k && o.l == pm.l).unwrap_or(false)
    });
    let decomposition_residual = spinor_decomposition_residual(&spec, &rs, &w, alpha, beta)?;
    Ok(SpinorReport { alpha: alpha.to_string(), beta: beta.to_string(), cases, negatives_equal, decomposition_residual })
}

/// Gauged zero-order term at sample points against −V^PT(ε₁) − V^PT(ε₂) plus the csch/sech remainder.
fn spinor_decomposition_residual(
    spec: &CartanSubsetSpec,
    rs: &RootSpaces<CQ>,
    w: &Bimodule<CQ>,
    alpha: &Q,
    beta: &Q,
) -> Result<f64> {
    let op = radial_casimir(rs, w)?;
    let (al, be) = (alpha.to_c64(), beta.to_c64());
    let m = spinor_gauge().map(|x| x.to_c64());
    let gauge = |x: &DMatrix<C64>| &m * x * m.transpose() / c(2.0, 0.0);
    let mut worst = 0.0f64;
    for chi in [[0.7, 1.3], [1.1, 0.4], [1.9, 0.8]] {
        let pt = ChiPoint::real(&chi);
        let pow = spec_power(spec, &pt);
        let ev = op.evaluate(spec, &pt)?;
        let z = gauge(&(&ev.zero - op.constant.map(|x| x.to_c64())));
        let cs = |r: &[Q]| zero_coeff_at(&pow, r, ZeroKind::InvSinhSqFull);
        let ch = |r: &[Q]| zero_coeff_at(&pow, r, ZeroKind::InvSinhSqHalf);
        let se = |r: &[Q]| sech_sq_half_at(&pow, r);
        let (e1, e2) = (qv(&[1, 0]), qv(&[0, 1]));
        let (sp, sm) = (vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(-1, 2)]);
        let vpt = |r: &[Q]| -> Result<C64> { Ok((((al + be) * (al + be)) + 0.25) * cs(r)? - al * be * ch(r)?) };
        let base = -vpt(&e1)? - vpt(&e2)?;
        let (c1, c2, s1, s2) = (ch(&e1)?, ch(&e2)?, se(&e1)?, se(&e2)?);
        let (cp, cm, spp, smm) = (ch(&sp)?, ch(&sm)?, se(&sp)?, se(&sm)?);
        let extra = [
            c1 + c2 + spp * 2.0 + smm * 2.0,
            -s1 - s2 + spp * 2.0 - cm * 2.0,
            -s1 - s2 - cp * 2.0 + smm * 2.0,
            c1 + c2 - cp * 2.0 - cm * 2.0,
        ];
        for i in 0..4 {
            worst = worst.max((z[(i, i)] - base - extra[i] / 16.0).norm());
        }
        let off_a = (al + be) / 4.0 * (-s1 + s2);
        let off_b = (al - be) / 4.0 * (c1 - c2);
        worst = worst.max((z[(0, 3)] - off_a).norm()).max((z[(1, 2)] - off_b).norm());
        worst = worst.max((z[(2, 1)] - off_b).norm()).max((z[(3, 0)] - off_a).norm());
        for &(i, j) in &[(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
            worst = worst.max(z[(i, j)].norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectCase {
    pub label: String,
    pub root_type: String,
    pub rank: usize,
    pub short_multiplicity: Option<usize>,
    pub long_multiplicity: usize,
    pub expected_rank: usize,
    pub expected_short: usize,
    pub type_ok: bool,
    pub operator: Worst,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    pub d: usize,
    pub p: usize,
    pub cases: Vec<DefectCase>,
}

impl DefectReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.cases.iter().all(|c| c.type_ok && c.operator.residual <= tol)
    }
}

/// B_N (D_N when d−2 = 2p) with multiplicities (|d−2−2p|, 1), and trivial-W radial part equal to L(k).
pub fn defect_match(d: usize, p: usize, seed: u64) -> Result<DefectReport> {
    let sig = Signature::new(d, 0)?;
    let specs = catalog(sig, PairKind::Defect { p_defect: p })?;
    let short = (d as i64 - 2 - 2 * p as i64).unsigned_abs() as usize;
    let n_exp = (p + 2).min(d - p);
    let mut cases = Vec::new();
    for spec in specs {
        let (_, dec) = spec.decompose(seed)?;
        let info = dec.classify();
        let expected_name = if short == 0 { format!("D{n_exp}") } else { format!("B{n_exp}") };
        let mults_ok = if short == 0 {
            info.short_multiplicity.is_none() && info.long_multiplicity == 1
        } else {
            info.short_multiplicity == Some(short) && info.long_multiplicity == 1
        };
        let type_ok = info.is_type(&expected_name) && info.rank == n_exp && mults_ok;
        let r = spec.rank();
        let unit = |i: usize| (0..r).map(|k| if k == i { q(2, 1) } else { q(0, 1) }).collect::<Vec<Q>>();
        let mut values = Vec::new();
        if short > 0 {
            for i in 0..r {
                values.push((unit(i), c(short as f64 / 2.0, 0.0)));
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                let plus: Vec<Q> = (0..r).map(|k| if k == i || k == j { q(2, 1) } else { q(0, 1) }).collect();
                let minus: Vec<Q> = (0..r).map(|k| if k == i { q(2, 1) } else if k == j { q(-2, 1) } else { q(0, 1) }).collect();
                values.push((plus, c(0.5, 0.0)));
                values.push((minus, c(0.5, 0.0)));
            }
        }
        let k = MultiplicityVector { system: expected_name.clone(), values };
        let operator = trivial_match(&spec, &k, seed)?;
        cases.push(DefectCase {
            label: spec.label.to_string(),
            root_type: info.name.clone(),
            rank: info.rank,
            short_multiplicity: info.short_multiplicity,
            long_multiplicity: info.long_multiplicity,
            expected_rank: n_exp,
            expected_short: short,
            type_ok,
            operator,
        });
    }
    Ok(DefectReport { d, p, cases })
}

/// ‖ρ(k)‖² for the four-point pair computed exactly from the decomposition's multiplicities and metric.
pub fn fourpoint_rho_norm_exact(d: usize, seed: u64) -> Result<CQ> {
    let sig = Signature::new(d, 0)?;
    let spec = find_spec(sig, PairKind::FourPoint, CartanLabel::Euclid)?;
    let rs = RootSpaces::<CQ>::build(&spec, seed)?;
    let k: Vec<(Vec<Q>, Q)> = rs
        .roots
        .iter()
        .filter(|r| is_positive(&r.coords))
        .map(|r| (qscale(&r.coords, 2), q(r.basis.len() as i64, 2)))
        .collect();
    Ok(rho_norm_exact(&k, &rs.metric()))
}
