//! A_α operators, the radial part of Ω_g on a Cartan subset, and the defining-representation oracle.
//!
//! Everything that feeds the K/L tables is generic over the scalar backend, so the same assembly
//! runs in floating point and in exact Gaussian rationals.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cartan::{parametrize, x_power, CartanSubsetSpec, ChiPoint};
use crate::error::{Error, Result};
use crate::json;
use crate::liealg::{Algebra, Element, Involution};
use crate::linalg;
use crate::rootspace::RootDecomposition;
use crate::scalar::{c, rationalize_c, ComplexField, Field, C64, CQ, Q};

trait AmaxC {
    fn amax_c(&self) -> f64;
}

impl AmaxC for DMatrix<C64> {
    fn amax_c(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl AmaxC for DVector<C64> {
    fn amax_c(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Scalar backends the radial assembly runs on.
pub trait RadialField: ComplexField {
    /// Converts a floating value known to be representable.
    fn lift(z: C64) -> Option<Self>;
    fn kernel_basis(m: &DMatrix<Self>) -> Vec<DVector<Self>>;
    fn json(&self) -> Value;
    /// Tolerance for "is zero" checks on assembled quantities.
    const TOL: f64;
}

impl RadialField for C64 {
    const TOL: f64 = 1e-9;
    fn lift(z: C64) -> Option<Self> {
        Some(z)
    }
    fn kernel_basis(m: &DMatrix<C64>) -> Vec<DVector<C64>> {
        linalg::svd_kernel(m, 1e-9)
    }
    fn json(&self) -> Value {
        json::c64(*self)
    }
}

impl RadialField for CQ {
    const TOL: f64 = 0.0;
    fn lift(z: C64) -> Option<Self> {
        rationalize_c(z, 64, 1e-9)
    }
    fn kernel_basis(m: &DMatrix<CQ>) -> Vec<DVector<CQ>> {
        linalg::kernel(m, 0.0)
    }
    fn json(&self) -> Value {
        json::cq(self)
    }
}

fn lift<S: RadialField>(z: C64) -> Result<S> {
    S::lift(z).ok_or_else(|| Error::Computation(format!("{z} is not exactly representable")))
}

fn lift_q<S: Field>(x: &Q) -> S {
    let n = num_traits::ToPrimitive::to_i64(x.numer()).expect("small numerator");
    let d = num_traits::ToPrimitive::to_i64(x.denom()).expect("small denominator");
    S::from_i64(n) / S::from_i64(d)
}

fn lift_elem<S: RadialField>(e: &Element<C64>) -> Result<Element<S>> {
    Ok(Element { coeffs: DVector::from_iterator(e.dim(), e.coeffs.iter().map(|z| lift::<S>(*z)).collect::<Result<Vec<_>>>()?) })
}

fn lift_mat<S: RadialField>(m: &DMatrix<C64>) -> Result<DMatrix<S>> {
    let mut out = linalg::zeros::<S>(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = lift::<S>(m[(i, j)])?;
        }
    }
    Ok(out)
}

/// Canonical (row-reduced) basis of a span, lifted into `S`.
fn canonical_span<S: RadialField>(vecs: &[Element<C64>], dim: usize) -> Result<Vec<Element<S>>> {
    if vecs.is_empty() {
        return Ok(vec![]);
    }
    let m = DMatrix::from_fn(vecs.len(), dim, |i, j| vecs[i].coeffs[j]);
    let (r, piv) = linalg::rref(&m, 1e-9);
    (0..piv.len())
        .map(|i| lift_elem::<S>(&Element { coeffs: r.row(i).transpose() }))
        .collect()
}

/// Σ w · u ⊗ v in g_ℂ ⊗ g_ℂ.
#[derive(Clone, Debug)]
pub struct TensorOperator<S: Field> {
    pub terms: Vec<(S, Element<S>, Element<S>)>,
}

impl<S: Field> TensorOperator<S> {
    /// Coefficient matrix Σ w u vᵀ on the F-basis; a faithful image of the tensor.
    pub fn coefficient_matrix(&self, dim: usize) -> DMatrix<S> {
        let mut m = linalg::zeros::<S>(dim, dim);
        for (w, u, v) in &self.terms {
            for a in 0..dim {
                if u.coeffs[a].is_zero() {
                    continue;
                }
                let ua = w.clone() * u.coeffs[a].clone();
                for b in 0..dim {
                    if !v.coeffs[b].is_zero() {
                        m[(a, b)] = m[(a, b)].clone() + ua.clone() * v.coeffs[b].clone();
                    }
                }
            }
        }
        m
    }

    pub fn swap(&self) -> Self {
        TensorOperator { terms: self.terms.iter().map(|(w, u, v)| (w.clone(), v.clone(), u.clone())).collect() }
    }

    pub fn map(&self, f: impl Fn(&Element<S>) -> Element<S>, g: impl Fn(&Element<S>) -> Element<S>) -> Self {
        TensorOperator { terms: self.terms.iter().map(|(w, u, v)| (w.clone(), f(u), g(v))).collect() }
    }

    /// Image of the product m(Σ w u⊗v) = Σ w u v under a representation.
    pub fn product_image(&self, rep: impl Fn(&Element<S>) -> DMatrix<S>, n: usize) -> DMatrix<S> {
        self.terms.iter().fold(linalg::zeros::<S>(n, n), |acc, (w, u, v)| {
            linalg::mat_add(&acc, &linalg::mat_scale(&linalg::mat_mul(&rep(u), &rep(v)), w))
        })
    }
}

/// One restricted root space with σ-paired data.
#[derive(Clone, Debug)]
pub struct RootSpace<S: Field> {
    pub coords: Vec<Q>,
    pub functional: Vec<S>,
    pub basis: Vec<Element<S>>,
    /// H_i = E_i + σ(E_i).
    pub h: Vec<Element<S>>,
    /// Inverse of the B_σ Gram matrix of `basis`.
    pub bsigma_inv: DMatrix<S>,
    pub eps: S,
    pub negative: usize,
    /// Index of Ad*(t)α.
    pub t_image: usize,
}

/// Root-space data of a Cartan subset lifted into a scalar backend.
#[derive(Clone, Debug)]
pub struct RootSpaces<S: Field> {
    pub alg: Algebra,
    pub sigma: Involution,
    pub cprime: Vec<Element<S>>,
    pub gram_inv: DMatrix<S>,
    pub mprime: Vec<Element<S>>,
    pub mgram_inv: DMatrix<S>,
    /// L_{kj} = ε_k(Z_j).
    pub labels: DMatrix<S>,
    pub ad_t: DMatrix<S>,
    pub roots: Vec<RootSpace<S>>,
}

fn gram_inverse<S: RadialField>(vs: &[Element<S>], form: impl Fn(&Element<S>, &Element<S>) -> S) -> Result<DMatrix<S>> {
    let n = vs.len();
    if n == 0 {
        return Ok(linalg::zeros::<S>(0, 0));
    }
    let g = DMatrix::from_fn(n, n, |i, j| form(&vs[i], &vs[j]));
    linalg::inverse(&g, 1e-12).ok_or_else(|| Error::Computation("degenerate Gram matrix".into()))
}

impl<S: RadialField> RootSpaces<S> {
    pub fn build(spec: &CartanSubsetSpec, seed: u64) -> Result<Self> {
        let (alg, dec) = spec.decompose(seed)?;
        Self::from_decomposition(spec, alg, &dec)
    }

    pub fn from_decomposition(spec: &CartanSubsetSpec, alg: Algebra, dec: &RootDecomposition) -> Result<Self> {
        let sigma = spec.sigma(&alg);
        let dim = alg.dim();
        let r = spec.rank();
        let cprime: Vec<Element<S>> = spec.cprime.iter().map(|z| Element { coeffs: z.coeffs.map(|x| lift_q::<S>(&x)) }).collect();
        let gram_inv = gram_inverse(&cprime, |a, b| alg.form_b(a, b))?;
        let mprime = canonical_span::<S>(&dec.zero_even, dim)?;
        let mgram_inv = gram_inverse(&mprime, |a, b| alg.form_b(a, b))?;
        let labels = lift_mat::<S>(&DMatrix::from_fn(r, r, |k, j| spec.labels[k][j]))?;
        let ad_t_num = spec.ad_t(&alg);
        let ad_t = lift_mat::<S>(&ad_t_num.map(|z| c(snap(z.re), snap(z.im))))?;

        // Ad(t⁻¹) restricted to c', in c'-coordinates.
        let eta = alg.eta_matrix::<f64>();
        let tinv = &eta * spec.t.transpose() * &eta;
        let ad_tinv = crate::cartan::ad_group(&alg, &tinv.map(|x| c(x, 0.0)));
        let span = linalg::from_columns(&dec.cprime.iter().map(|z| z.coeffs.clone()).collect::<Vec<_>>(), dim);
        let img = &ad_tinv * &span;
        let sh = span.adjoint();
        let tmat = (&sh * &span)
            .try_inverse()
            .map(|g| g * &sh * &img)
            .filter(|t| (&span * t - &img).amax_c() < 1e-9)
            .ok_or_else(|| Error::Validation("Ad(t) does not preserve c'".into()))?;

        let mut roots = Vec::with_capacity(dec.roots.len());
        for (i, rd) in dec.roots.iter().enumerate() {
            let coords = rd.coords.clone().ok_or_else(|| Error::Computation("root without label coordinates".into()))?;
            let functional: Vec<S> = rd.functional.iter().map(|z| lift::<S>(*z)).collect::<Result<_>>()?;
            let basis = canonical_span::<S>(&rd.basis, dim)?;
            for e in &basis {
                for (j, z) in cprime.iter().enumerate() {
                    let res = alg.bracket(z, e).sub(&e.scale(&functional[j]));
                    if !res.coeffs.iter().all(|x| x.negligible(1e-8)) {
                        return Err(Error::Computation(format!("lifted root vector for {coords:?} is not an eigenvector")));
                    }
                }
            }
            let h: Vec<Element<S>> = basis.iter().map(|e| e.add(&sigma.apply(e))).collect();
            let bsigma_inv = gram_inverse(&basis, |a, b| alg.form_bsigma(&sigma, a, b))?;
            let eps = lift::<S>(spec.epsilon_of(&coords)?)?;
            let tf: Vec<C64> = (0..r).map(|j| (0..r).map(|k| tmat[(k, j)] * rd.functional[k]).sum()).collect();
            let t_image = dec
                .find(&tf)
                .ok_or_else(|| Error::Computation(format!("Ad*(t) image of {coords:?} is not a root")))?;
            roots.push(RootSpace { coords, functional, basis, h, bsigma_inv, eps, negative: dec.negative_of(i), t_image });
        }
        Ok(RootSpaces { alg, sigma, cprime, gram_inv, mprime, mgram_inv, labels, ad_t, roots })
    }

    pub fn rank(&self) -> usize {
        self.cprime.len()
    }

    pub fn ad_t_apply(&self, x: &Element<S>) -> Element<S> {
        Element { coeffs: linalg::mat_mul(&self.ad_t, &DMatrix::from_column_slice(x.dim(), 1, x.coeffs.as_slice())).column(0).into_owned() }
    }

    /// φ(H_j) for root i: ε_α⁻¹ Ad(t)E_j + ε_α Ad(t)σ(E_j).
    pub fn phi_h(&self, i: usize, j: usize) -> Element<S> {
        let rt = &self.roots[i];
        let e = &rt.basis[j];
        let a = self.ad_t_apply(e).scale(&(S::one() / rt.eps.clone()));
        let b = self.ad_t_apply(&self.sigma.apply(e)).scale(&rt.eps);
        a.add(&b)
    }

    /// φ on a root vector E ∈ g_α.
    pub fn phi_root_vector(&self, i: usize, e: &Element<S>) -> Element<S> {
        self.ad_t_apply(e).scale(&(S::one() / self.roots[i].eps.clone()))
    }

    /// A_α = Σ (S⁻¹)_{jk} H_j ⊗ H_k.
    pub fn a_operator(&self, i: usize) -> TensorOperator<S> {
        let rt = &self.roots[i];
        let n = rt.basis.len();
        let mut terms = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let w = rt.bsigma_inv[(j, k)].clone();
                if !w.is_zero() {
                    terms.push((w, rt.h[j].clone(), rt.h[k].clone()));
                }
            }
        }
        TensorOperator { terms }
    }

    /// (1⊗φ)A_α.
    pub fn phi_a_operator(&self, i: usize) -> TensorOperator<S> {
        let rt = &self.roots[i];
        let n = rt.basis.len();
        let phis: Vec<Element<S>> = (0..n).map(|k| self.phi_h(i, k)).collect();
        let mut terms = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let w = rt.bsigma_inv[(j, k)].clone();
                if !w.is_zero() {
                    terms.push((w, rt.h[j].clone(), phis[k].clone()));
                }
            }
        }
        TensorOperator { terms }
    }

    /// Direction of ∂_{C_α} in χ-coordinates: (ε_k(C_α))_k.
    pub fn direction(&self, functional: &[S]) -> Vec<S> {
        let r = self.rank();
        let f = DMatrix::from_column_slice(r, 1, functional);
        let v = linalg::mat_mul(&self.labels, &linalg::mat_mul(&self.gram_inv, &f));
        v.column(0).iter().cloned().collect()
    }

    /// B*(ε_k, ε_l).
    pub fn metric(&self) -> DMatrix<S> {
        linalg::mat_mul(&linalg::mat_mul(&self.labels, &self.gram_inv), &self.labels.transpose())
    }

    /// C_α ∈ c'_ℂ.
    pub fn dual_element(&self, functional: &[S]) -> Element<S> {
        let r = self.rank();
        let f = DMatrix::from_column_slice(r, 1, functional);
        let cf = linalg::mat_mul(&self.gram_inv, &f);
        (0..r).fold(Element::zero(self.alg.dim()), |acc, j| acc.add(&self.cprime[j].scale(&cf[(j, 0)])))
    }

    pub fn find_coords(&self, coords: &[Q]) -> Option<usize> {
        self.roots.iter().position(|r| r.coords == coords)
    }
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        r
    } else {
        x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BimoduleKind {
    Scalar { alpha: C64, beta: C64 },
    Spinor { alpha: C64, beta: C64 },
    Custom,
}

/// Left and right actions of h on a finite-dimensional space, indexed by F-basis element.
/// `right[a]` is the matrix of w ↦ w·F_a.
#[derive(Clone, Debug)]
pub struct Bimodule<S: Field> {
    pub dim: usize,
    pub left: Vec<DMatrix<S>>,
    pub right: Vec<DMatrix<S>>,
    pub kind: BimoduleKind,
}

/// Spin-½ images of F_12, F_13, F_23.
fn spin_half<S: ComplexField>() -> [DMatrix<S>; 3] {
    let h = S::one() / S::from_i64(2);
    let ih = S::i() * h.clone();
    let z = S::zero;
    [
        DMatrix::from_row_slice(2, 2, &[z(), ih.clone(), ih.clone(), z()]),
        DMatrix::from_row_slice(2, 2, &[z(), h.clone(), -h, z()]),
        DMatrix::from_row_slice(2, 2, &[ih.clone(), z(), z(), -ih]),
    ]
}

impl<S: RadialField> Bimodule<S> {
    fn empty(alg: &Algebra, dim: usize, kind: BimoduleKind) -> Self {
        let z = linalg::zeros::<S>(dim, dim);
        Bimodule { dim, left: vec![z.clone(); alg.dim()], right: vec![z; alg.dim()], kind }
    }

    /// π_L(D_0) = α, π_R(D_0) = β with D_0 = F^{0,d+1}; the rest of h acts trivially.
    pub fn scalar(alg: &Algebra, alpha: S, beta: S) -> Self {
        let n = alg.n;
        let a0 = alg.index_of(0, n - 1);
        let s = S::from_i64(alg.eta[0] * alg.eta[n - 1]);
        let mut w = Self::empty(alg, 1, BimoduleKind::Scalar { alpha: alpha.to_c64(), beta: beta.to_c64() });
        w.left[a0] = DMatrix::from_element(1, 1, alpha * s.clone());
        w.right[a0] = DMatrix::from_element(1, 1, beta * s);
        w
    }

    pub fn trivial(alg: &Algebra) -> Self {
        let mut w = Self::scalar(alg, S::zero(), S::zero());
        w.kind = BimoduleKind::Scalar { alpha: C64::zero(), beta: C64::zero() };
        w
    }

    /// End(V) for V the spin-½ module of so(3) ⊂ so(4,1), vectorized row-major;
    /// F_{0,4} acts as −2α from the left and −2β from the right.
    pub fn spinor(alg: &Algebra, alpha: S, beta: S) -> Result<Self> {
        if alg.sig.p != 3 || alg.sig.q != 0 {
            return Err(Error::Validation("the spinor bimodule is defined for (p,q) = (3,0)".into()));
        }
        let mut w = Self::empty(alg, 4, BimoduleKind::Spinor { alpha: alpha.to_c64(), beta: beta.to_c64() });
        let id2 = linalg::identity::<S>(2);
        for (k, &(a, b)) in [(1usize, 2usize), (1, 3), (2, 3)].iter().enumerate() {
            let m = spin_half::<S>()[k].clone();
            let idx = alg.index_of(a, b);
            w.left[idx] = linalg::kron(&m, &id2);
            w.right[idx] = linalg::kron(&id2, &m.transpose());
        }
        let d0 = alg.index_of(0, 4);
        let two = S::from_i64(-2);
        w.left[d0] = linalg::mat_scale(&linalg::identity::<S>(4), &(two.clone() * alpha));
        w.right[d0] = linalg::mat_scale(&linalg::identity::<S>(4), &(two * beta));
        Ok(w)
    }

    /// Actions from explicit matrices keyed by F-basis labels; unlisted generators act by zero.
    pub fn custom(alg: &Algebra, dim: usize, left: &BTreeMap<String, DMatrix<C64>>, right: &BTreeMap<String, DMatrix<C64>>) -> Result<Self> {
        let mut w = Self::empty(alg, dim, BimoduleKind::Custom);
        for (side, src) in [(0, left), (1, right)] {
            for (label, m) in src {
                let a = alg.parse_label(label).ok_or_else(|| Error::Validation(format!("unknown generator {label}")))?;
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::Dimension(format!("{label}: expected {dim}×{dim}")));
                }
                let lm = lift_mat::<S>(m)?;
                if side == 0 {
                    w.left[a] = lm;
                } else {
                    w.right[a] = lm;
                }
            }
        }
        Ok(w)
    }

    fn action(&self, mats: &[DMatrix<S>], sigma: &Involution, x: &Element<S>) -> Result<DMatrix<S>> {
        let mut out = linalg::zeros::<S>(self.dim, self.dim);
        for (a, v) in x.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if sigma.basis_sign(a) != Some(1) {
                if v.negligible(1e-10) {
                    continue;
                }
                return Err(Error::Validation(format!("element has a component outside h (index {a})")));
            }
            out = linalg::mat_add(&out, &linalg::mat_scale(&mats[a], v));
        }
        Ok(out)
    }

    pub fn left_of(&self, sigma: &Involution, x: &Element<S>) -> Result<DMatrix<S>> {
        self.action(&self.left, sigma, x)
    }

    pub fn right_of(&self, sigma: &Involution, x: &Element<S>) -> Result<DMatrix<S>> {
        self.action(&self.right, sigma, x)
    }

    /// Maximal violation of the bimodule axioms over all pairs of h-generators:
    /// left is a homomorphism, right an anti-homomorphism, and the two commute.
    pub fn axiom_residual(&self, alg: &Algebra, sigma: &Involution) -> f64 {
        let hs: Vec<usize> = (0..alg.dim()).filter(|&a| sigma.basis_sign(a) == Some(1)).collect();
        let mut worst = 0.0f64;
        let comm = |a: &DMatrix<S>, b: &DMatrix<S>| linalg::mat_sub(&linalg::mat_mul(a, b), &linalg::mat_mul(b, a));
        for &a in &hs {
            for &b in &hs {
                let br = alg.bracket(&alg.basis_element::<S>(a), &alg.basis_element::<S>(b));
                let lb = self.left_of(sigma, &br).expect("h is a subalgebra");
                let rb = self.right_of(sigma, &br).expect("h is a subalgebra");
                let l = linalg::mat_sub(&lb, &comm(&self.left[a], &self.left[b]));
                let r = linalg::mat_add(&rb, &comm(&self.right[a], &self.right[b]));
                let lr = comm(&self.left[a], &self.right[b]);
                worst = worst.max(linalg::max_abs(&l)).max(linalg::max_abs(&r)).max(linalg::max_abs(&lr));
            }
        }
        for a in 0..alg.dim() {
            if sigma.basis_sign(a) != Some(1) {
                worst = worst.max(linalg::max_abs(&self.left[a])).max(linalg::max_abs(&self.right[a]));
            }
        }
        worst
    }

    /// π(Σ w u⊗v) = Σ w π_L(u) π_R(v).
    pub fn tensor_image(&self, sigma: &Involution, t: &TensorOperator<S>) -> Result<DMatrix<S>> {
        let mut out = linalg::zeros::<S>(self.dim, self.dim);
        for (w, u, v) in &t.terms {
            let m = linalg::mat_mul(&self.left_of(sigma, u)?, &self.right_of(sigma, v)?);
            out = linalg::mat_add(&out, &linalg::mat_scale(&m, w));
        }
        Ok(out)
    }

    /// π_L(m(A)).
    pub fn left_product(&self, sigma: &Involution, t: &TensorOperator<S>) -> Result<DMatrix<S>> {
        let mut out = linalg::zeros::<S>(self.dim, self.dim);
        for (w, u, v) in &t.terms {
            let m = linalg::mat_mul(&self.left_of(sigma, u)?, &self.left_of(sigma, v)?);
            out = linalg::mat_add(&out, &linalg::mat_scale(&m, w));
        }
        Ok(out)
    }

    /// Action of m(A) from the right: w·(uv) = π_R(v)π_R(u)w.
    pub fn right_product(&self, sigma: &Involution, t: &TensorOperator<S>) -> Result<DMatrix<S>> {
        let mut out = linalg::zeros::<S>(self.dim, self.dim);
        for (w, u, v) in &t.terms {
            let m = linalg::mat_mul(&self.right_of(sigma, v)?, &self.right_of(sigma, u)?);
            out = linalg::mat_add(&out, &linalg::mat_scale(&m, w));
        }
        Ok(out)
    }
}

/// Basis of W^{m'}: the joint kernel of Y ↦ π_L(Ad(t)Y) − π_R(Y) over m'.
pub fn m_prime_invariants<S: RadialField>(rs: &RootSpaces<S>, w: &Bimodule<S>) -> Result<DMatrix<S>> {
    let n = w.dim;
    if rs.mprime.is_empty() {
        return Ok(linalg::identity::<S>(n));
    }
    let mut stacked = linalg::zeros::<S>(n * rs.mprime.len(), n);
    for (k, y) in rs.mprime.iter().enumerate() {
        let m = linalg::mat_sub(&w.left_of(&rs.sigma, &rs.ad_t_apply(y))?, &w.right_of(&rs.sigma, y)?);
        for i in 0..n {
            for j in 0..n {
                stacked[(k * n + i, j)] = m[(i, j)].clone();
            }
        }
    }
    if linalg::max_abs(&stacked) <= S::TOL {
        return Ok(linalg::identity::<S>(n));
    }
    let ker = S::kernel_basis(&stacked);
    if ker.len() == n {
        return Ok(linalg::identity::<S>(n));
    }
    let mut v = linalg::zeros::<S>(n, ker.len());
    for (j, col) in ker.iter().enumerate() {
        for i in 0..n {
            v[(i, j)] = col[i].clone();
        }
    }
    Ok(v)
}

/// X with V X = M V, or an error if M does not preserve the span of V.
fn restrict<S: RadialField>(m: &DMatrix<S>, v: &DMatrix<S>) -> Result<DMatrix<S>> {
    if v.nrows() == v.ncols() && v.iter().enumerate().all(|(k, x)| if k % (v.nrows() + 1) == 0 { x.is_one() } else { x.is_zero() }) {
        return Ok(m.clone());
    }
    let vh = v.transpose().map(|x| x.conj());
    let gram = linalg::mat_mul(&vh, v);
    let gi = linalg::inverse(&gram, 1e-12).ok_or_else(|| Error::Computation("invariant basis degenerate".into()))?;
    let mv = linalg::mat_mul(m, v);
    let x = linalg::mat_mul(&gi, &linalg::mat_mul(&vh, &mv));
    let res = linalg::max_abs(&linalg::mat_sub(&linalg::mat_mul(v, &x), &mv));
    if res > 1e-8 {
        return Err(Error::Computation(format!("operator does not preserve W^m' (residual {res:e})")));
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ZeroKind {
    /// csch²_γ = 1/sinh²_γ.
    InvSinhSqFull,
    /// csch²_{γ/2}.
    InvSinhSqHalf,
}

impl ZeroKind {
    pub fn name(&self) -> &'static str {
        match self {
            ZeroKind::InvSinhSqFull => "inv_sinh_sq_full",
            ZeroKind::InvSinhSqHalf => "inv_sinh_sq_half",
        }
    }
}

/// coefficient · coth_λ · Σ_k direction_k ∂_{χ_k}; coth_λ = (x^{2λ}+1)/(x^{2λ}−1).
#[derive(Clone, Debug)]
pub struct FirstOrderTerm<S: Field> {
    pub root: Vec<Q>,
    pub coefficient: S,
    pub direction: Vec<S>,
}

#[derive(Clone, Debug)]
pub struct ZeroOrderTerm<S: Field> {
    pub root: Vec<Q>,
    pub kind: ZeroKind,
    pub matrix: DMatrix<S>,
}

/// Σ Q_{jk}∂_j∂_k + Σ first-order terms + Σ zero-order terms + constant, acting on W^{m'}-valued functions.
#[derive(Clone, Debug)]
pub struct RadialOperator<S: Field> {
    pub second_order: DMatrix<S>,
    pub first_order: Vec<FirstOrderTerm<S>>,
    pub zero_order: Vec<ZeroOrderTerm<S>>,
    pub constant: DMatrix<S>,
    /// Columns span W^{m'} inside W.
    pub invariant_basis: DMatrix<S>,
}

/// An operator frozen at a point: second: Σ Q ∂², first: Σ b_k ∂_k, zero: matrix.
#[derive(Clone, Debug)]
pub struct PointOperator {
    pub second: DMatrix<C64>,
    pub first: DVector<C64>,
    pub zero: DMatrix<C64>,
}

impl PointOperator {
    /// R(e^{a·χ}v) = e^{a·χ} M(a) v.
    pub fn on_exponential(&self, a: &[C64]) -> DMatrix<C64> {
        let av = DVector::from_column_slice(a);
        let s = (av.transpose() * &self.second * &av)[(0, 0)] + (self.first.transpose() * &av)[(0, 0)];
        &self.zero + DMatrix::<C64>::identity(self.zero.nrows(), self.zero.ncols()) * s
    }

    pub fn max_diff(&self, o: &PointOperator) -> f64 {
        (&self.second - &o.second)
            .amax_c()
            .max((&self.first - &o.first).amax_c())
            .max((&self.zero - &o.zero).amax_c())
    }
}

pub fn qscale(coords: &[Q], k: i64) -> Vec<Q> {
    coords.iter().map(|x| x * Q::from_integer(k.into())).collect()
}

/// x^λ as a function of label coordinates λ.
pub type PowerFn<'a> = dyn Fn(&[Q]) -> Result<C64> + 'a;

/// x^λ = ε_λ exp(λ(X(χ))) on the Cartan subset.
pub fn spec_power<'a>(spec: &'a CartanSubsetSpec, pt: &'a ChiPoint) -> impl Fn(&[Q]) -> Result<C64> + 'a {
    move |l: &[Q]| x_power(spec, pt, l)
}

/// e^λ = exp(Σ λ_k χ_k), the plain exponential in the chart.
pub fn plain_power(pt: &ChiPoint) -> impl Fn(&[Q]) -> Result<C64> + '_ {
    move |l: &[Q]| Ok(l.iter().zip(&pt.chi).map(|(a, z)| z * a.to_c64().re).sum::<C64>().exp())
}

/// coth_λ = (x^{2λ}+1)/(x^{2λ}−1).
pub fn coth_at(pow: &PowerFn, lambda: &[Q]) -> Result<C64> {
    let p = pow(&qscale(lambda, 2))?;
    let den = p - 1.0;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("x^(2λ) = 1 for λ = {lambda:?}")));
    }
    Ok((p + 1.0) / den)
}

/// csch²_γ = 4/(x^{2γ}+x^{−2γ}−2) and csch²_{γ/2} = 4/(x^γ+x^{−γ}−2).
pub fn zero_coeff_at(pow: &PowerFn, root: &[Q], kind: ZeroKind) -> Result<C64> {
    let x = match kind {
        ZeroKind::InvSinhSqFull => pow(&qscale(root, 2))?,
        ZeroKind::InvSinhSqHalf => pow(root)?,
    };
    let den = x + 1.0 / x - 2.0;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("singular coefficient for {root:?}")));
    }
    Ok(c(4.0, 0.0) / den)
}

/// sech²_{γ/2} = 4/(x^γ+x^{−γ}+2).
pub fn sech_sq_half_at(pow: &PowerFn, root: &[Q]) -> Result<C64> {
    let x = pow(root)?;
    Ok(c(4.0, 0.0) / (x + 1.0 / x + 2.0))
}

impl<S: RadialField> RadialOperator<S> {
    pub fn dim(&self) -> usize {
        self.constant.nrows()
    }

    pub fn evaluate(&self, spec: &CartanSubsetSpec, pt: &ChiPoint) -> Result<PointOperator> {
        self.evaluate_with(&spec_power(spec, pt))
    }

    pub fn evaluate_plain(&self, pt: &ChiPoint) -> Result<PointOperator> {
        self.evaluate_with(&plain_power(pt))
    }

    pub fn evaluate_with(&self, pow: &PowerFn) -> Result<PointOperator> {
        let r = self.second_order.nrows();
        let second = self.second_order.map(|x| x.to_c64());
        let mut first = DVector::<C64>::zeros(r);
        for t in &self.first_order {
            let w = coth_at(pow, &t.root)? * t.coefficient.to_c64();
            for k in 0..r {
                first[k] += w * t.direction[k].to_c64();
            }
        }
        let mut zero = self.constant.map(|x| x.to_c64());
        for t in &self.zero_order {
            zero += t.matrix.map(|x| x.to_c64()) * zero_coeff_at(pow, &t.root, t.kind)?;
        }
        Ok(PointOperator { second, first, zero })
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &DMatrix<S>| {
            Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| m[(i, j)].json()).collect())).collect())
        };
        let root = |r: &[Q]| Value::Array(r.iter().map(json::rational).collect());
        json!({
            "second_order": mat(&self.second_order),
            "first_order": self.first_order.iter().map(|t| json!({
                "root": root(&t.root),
                "coefficient": t.coefficient.json(),
                "direction": Value::Array(t.direction.iter().map(|x| x.json()).collect()),
            })).collect::<Vec<_>>(),
            "zero_order": self.zero_order.iter().map(|t| json!({
                "root": root(&t.root),
                "kind": t.kind.name(),
                "matrix": mat(&t.matrix),
            })).collect::<Vec<_>>(),
            "constant": mat(&self.constant),
            "invariant_dim": self.dim(),
        })
    }
}

/// K_{2γ} and L_γ on W^{m'} for every root γ.
#[derive(Clone, Debug)]
pub struct PotentialMatrices<S: Field> {
    pub k: DMatrix<S>,
    pub l: DMatrix<S>,
}

/// K_{2γ} = [π_L m(A_γ) + π_R m(A_{tγ}) + 2π(1⊗φ)A_γ]/4 and L_γ = −π(1⊗φ)A_γ/4, unrestricted.
pub fn potential_matrices_full<S: RadialField>(
    rs: &RootSpaces<S>,
    w: &Bimodule<S>,
) -> Result<BTreeMap<Vec<Q>, PotentialMatrices<S>>> {
    let mut out = BTreeMap::new();
    let four = S::from_i64(4);
    for (i, rt) in rs.roots.iter().enumerate() {
        let a = rs.a_operator(i);
        let at = rs.a_operator(rt.t_image);
        let pa = w.tensor_image(&rs.sigma, &rs.phi_a_operator(i))?;
        let ml = w.left_product(&rs.sigma, &a)?;
        let mr = w.right_product(&rs.sigma, &at)?;
        let k = linalg::mat_add(&linalg::mat_add(&ml, &mr), &linalg::mat_scale(&pa, &S::from_i64(2)));
        let k = linalg::mat_scale(&k, &(S::one() / four.clone()));
        let l = linalg::mat_scale(&pa, &(-S::one() / four.clone()));
        out.insert(rt.coords.clone(), PotentialMatrices { k, l });
    }
    Ok(out)
}

/// K/L matrices restricted to W^{m'}.
pub fn k_l_matrices<S: RadialField>(rs: &RootSpaces<S>, w: &Bimodule<S>) -> Result<BTreeMap<Vec<Q>, PotentialMatrices<S>>> {
    let v = m_prime_invariants(rs, w)?;
    potential_matrices_full(rs, w)?
        .into_iter()
        .map(|(g, pm)| Ok((g, PotentialMatrices { k: restrict(&pm.k, &v)?, l: restrict(&pm.l, &v)? })))
        .collect()
}

fn check_bimodule<S: RadialField>(rs: &RootSpaces<S>, w: &Bimodule<S>) -> Result<()> {
    if w.left.len() != rs.alg.dim() {
        return Err(Error::Dimension("bimodule built for another algebra".into()));
    }
    let res = w.axiom_residual(&rs.alg, &rs.sigma);
    if res > 1e-8 {
        return Err(Error::Validation(format!("bimodule axioms violated (residual {res:e})")));
    }
    Ok(())
}

/// Radial part of Ω_g on the Cartan subset, acting on W^{m'}-valued functions of χ.
pub fn radial_casimir<S: RadialField>(rs: &RootSpaces<S>, w: &Bimodule<S>) -> Result<RadialOperator<S>> {
    check_bimodule(rs, w)?;
    let v = m_prime_invariants(rs, w)?;
    let half = S::one() / S::from_i64(2);
    let mut first_order: Vec<FirstOrderTerm<S>> = rs
        .roots
        .iter()
        .map(|rt| FirstOrderTerm {
            root: rt.coords.clone(),
            coefficient: S::from_i64(rt.basis.len() as i64) * half.clone(),
            direction: rs.direction(&rt.functional),
        })
        .collect();
    first_order.sort_by(|a, b| b.root.cmp(&a.root));
    let omega_m = TensorOperator {
        terms: (0..rs.mprime.len())
            .flat_map(|i| (0..rs.mprime.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| !rs.mgram_inv[(i, j)].is_zero())
            .map(|(i, j)| (rs.mgram_inv[(i, j)].clone(), rs.mprime[i].clone(), rs.mprime[j].clone()))
            .collect(),
    };
    let constant = restrict(&w.left_product(&rs.sigma, &omega_m)?, &v)?;
    let mut zero_order = Vec::new();
    for (g, pm) in potential_matrices_full(rs, w)?.into_iter().rev() {
        for (kind, m) in [(ZeroKind::InvSinhSqFull, pm.k), (ZeroKind::InvSinhSqHalf, pm.l)] {
            let m = restrict(&m, &v)?;
            if !m.iter().all(|x| x.negligible(1e-12)) {
                zero_order.push(ZeroOrderTerm { root: g.clone(), kind, matrix: m });
            }
        }
    }
    Ok(RadialOperator { second_order: rs.metric(), first_order, zero_order, constant, invariant_basis: v })
}

/// Residuals of the Casimir decomposition checked in a matrix representation.
#[derive(Clone, Debug, serde::Serialize)]
pub struct OracleReport {
    pub residual_tilde: f64,
    pub residual_pi: f64,
    pub commutator: f64,
    /// Ω_g is a multiple of the identity in an irreducible representation.
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub omega_scalar: C64,
    pub omega_scalar_residual: f64,
}

impl OracleReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_tilde.max(self.residual_pi).max(self.commutator)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Defining,
    Adjoint,
}

/// Both sides of the Casimir decomposition evaluated at x = parametrize(spec, pt).
pub fn oracle_check(spec: &CartanSubsetSpec, rs: &RootSpaces<C64>, pt: &ChiPoint, rep: Representation) -> Result<OracleReport> {
    let alg = &rs.alg;
    let xdef = parametrize(spec, pt)?;
    let (x, xinv, n) = match rep {
        Representation::Defining => {
            let xi = xdef.clone().try_inverse().ok_or_else(|| Error::Singular("x not invertible".into()))?;
            let n = alg.n;
            (xdef, xi, n)
        }
        Representation::Adjoint => {
            let xi = xdef.clone().try_inverse().ok_or_else(|| Error::Singular("x not invertible".into()))?;
            (crate::cartan::ad_group(alg, &xdef), crate::cartan::ad_group(alg, &xi), alg.dim())
        }
    };
    let m = |e: &Element<C64>| -> DMatrix<C64> {
        match rep {
            Representation::Defining => alg.to_matrix(e),
            Representation::Adjoint => alg.ad_matrix(e),
        }
    };
    let zero = DMatrix::<C64>::zeros(n, n);
    let bd = alg.b_diag();
    let mut omega = zero.clone();
    for a in 0..alg.dim() {
        let fa = m(&alg.basis_element(a));
        omega += &fa * &fa / c(bd[a] as f64, 0.0);
    }
    let omega_scalar = omega.trace() / c(n as f64, 0.0);
    let omega_scalar_residual = (&omega - DMatrix::<C64>::identity(n, n) * omega_scalar).amax_c();

    let quad = |vs: &[Element<C64>], ginv: &DMatrix<C64>| {
        let mut acc = zero.clone();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                if ginv[(i, j)].norm() > 0.0 {
                    acc += m(&vs[i]) * m(&vs[j]) * ginv[(i, j)];
                }
            }
        }
        acc
    };
    let base = quad(&rs.cprime, &rs.gram_inv) + quad(&rs.mprime, &rs.mgram_inv);
    let mut tilde = base.clone();
    let mut pi = base;
    let mut commutator = 0.0f64;
    for (i, rt) in rs.roots.iter().enumerate() {
        let xa = x_power(spec, pt, &rt.coords)?;
        let xai = c(1.0, 0.0) / xa;
        let den = (xa - xai) * (xa - xai);
        if den.norm() < 1e-14 {
            return Err(Error::Singular(format!("x^α = x^-α for {:?}", rt.coords)));
        }
        let coth = (xa + xai) / (xa - xai);
        let nhalf = c(rt.basis.len() as f64 / 2.0, 0.0);
        let ca = m(&rs.dual_element(&rt.functional));
        let cta = m(&rs.dual_element(&rs.roots[rt.t_image].functional));
        tilde += &ca * (nhalf * coth);
        pi += &cta * (nhalf * coth);
        let ma = rs.a_operator(i).product_image(&m, n);
        let mta = rs.a_operator(rt.t_image).product_image(&m, n);
        tilde += (&ma + &x * &mta * &xinv) / den;
        pi += (&mta + &xinv * &ma * &x) / den;
        let nb = rt.basis.len();
        let mut cross_t = zero.clone();
        let mut cross_p = zero.clone();
        for j in 0..nb {
            let hj = m(&rt.h[j]);
            for k in 0..nb {
                let w = rt.bsigma_inv[(j, k)];
                if w.norm() == 0.0 {
                    continue;
                }
                let ph = m(&rs.phi_h(i, k));
                cross_t += &hj * &x * &ph * &xinv * w;
                cross_p += &xinv * &hj * &x * &ph * w;
            }
        }
        tilde -= cross_t * ((xa + xai) / den);
        pi -= cross_p * ((xa + xai) / den);
        // [E, σE] = −B_σ(E,E) C_α
        for e in &rt.basis {
            let lhs = m(&alg.bracket(e, &rs.sigma.apply(e)));
            let rhs = &ca * (-alg.form_bsigma(&rs.sigma, e, e));
            commutator = commutator.max((lhs - rhs).amax_c());
        }
    }
    Ok(OracleReport {
        residual_tilde: (&omega - &tilde).amax_c(),
        residual_pi: (&omega - &pi).amax_c(),
        commutator,
        omega_scalar,
        omega_scalar_residual,
    })
}

/// Random regular points near the real locus of the spec (χ ∈ (0.2, 2.2)² plus small Im parts), seeded.
pub fn random_regular_points(spec: &CartanSubsetSpec, count: usize, seed: u64) -> Vec<ChiPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let chi: Vec<C64> = (0..spec.rank()).map(|_| c(rng.gen_range(0.2..2.2), rng.gen_range(-0.3..0.3))).collect();
        let pt = ChiPoint { chi };
        if crate::cartan::is_regular(spec, &pt) {
            out.push(pt);
        }
    }
    out
}

/// Builds the RootSpaces twice from different seeds and a randomly mixed basis, returning
/// the largest discrepancy between the A_α coefficient matrices (S⁻¹ form and orthonormal form).
pub fn a_basis_independence(spec: &CartanSubsetSpec, seed: u64) -> Result<f64> {
    let rs = RootSpaces::<C64>::build(spec, seed)?;
    let (alg, dec) = spec.decompose(seed.wrapping_add(101))?;
    let dim = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for (i, rt) in rs.roots.iter().enumerate() {
        let a = rs.a_operator(i).coefficient_matrix(dim);
        let other = dec
            .roots
            .iter()
            .find(|r| r.coords.as_deref() == Some(rt.coords.as_slice()))
            .ok_or_else(|| Error::Computation("root missing in second decomposition".into()))?;
        // Random invertible mixing of the second basis, then B_σ-orthonormalization.
        let nb = other.basis.len();
        let mix = DMatrix::<C64>::from_fn(nb, nb, |j, k| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) + if j == k { c(2.0, 0.0) } else { c(0.0, 0.0) });
        let mixed: Vec<DVector<C64>> = (0..nb)
            .map(|k| (0..nb).fold(DVector::zeros(dim), |acc, j| acc + &other.basis[j].coeffs * mix[(j, k)]))
            .collect();
        let on = crate::rootspace::bsigma_orthonormal(&alg, &rs.sigma, &mixed)?;
        let t = TensorOperator {
            terms: on
                .iter()
                .map(|e| {
                    let h = e.add(&rs.sigma.apply(e));
                    (c(1.0, 0.0), h.clone(), h)
                })
                .collect(),
        };
        worst = worst.max((a - t.coefficient_matrix(dim)).amax_c());
    }
    Ok(worst)
}

/// Structural identities of the A_α: A_α = A_{−α}, leg swap with σ⊗σ, and (φ⊗φ)A_α = A_{tα}.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ASymmetryReport {
    pub negation: f64,
    pub swap_sigma: f64,
    pub phi_twist: f64,
}

pub fn a_symmetries(rs: &RootSpaces<C64>) -> ASymmetryReport {
    let dim = rs.alg.dim();
    let mut rep = ASymmetryReport { negation: 0.0, swap_sigma: 0.0, phi_twist: 0.0 };
    for (i, rt) in rs.roots.iter().enumerate() {
        let a = rs.a_operator(i);
        let am = a.coefficient_matrix(dim);
        let an = rs.a_operator(rt.negative).coefficient_matrix(dim);
        rep.negation = rep.negation.max((&am - &an).amax_c());
        let sw = a.swap().map(|u| rs.sigma.apply(u), |v| rs.sigma.apply(v)).coefficient_matrix(dim);
        rep.swap_sigma = rep.swap_sigma.max((&sw - &an).amax_c());
        // φ on h-elements assembled from the root-vector decomposition of H_j.
        let nb = rt.basis.len();
        let phis: Vec<Element<C64>> = (0..nb).map(|k| rs.phi_h(i, k)).collect();
        let mut terms = Vec::new();
        for j in 0..nb {
            for k in 0..nb {
                terms.push((rt.bsigma_inv[(j, k)], phis[j].clone(), phis[k].clone()));
            }
        }
        let tw = TensorOperator { terms }.coefficient_matrix(dim);
        let at = rs.a_operator(rt.t_image).coefficient_matrix(dim);
        rep.phi_twist = rep.phi_twist.max((&tw - &at).amax_c());
    }
    rep
}

/// How well Ad(t) = ε φ holds for a given ε table, with φ read off rootwise.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EpsilonCheck {
    /// ‖φ² − 1‖
    pub involution: f64,
    /// ‖φᵀBφ − B‖
    pub orthogonal: f64,
    /// ‖φσ − σφ‖
    pub sigma_commute: f64,
    /// max |ε_α ε_{−α} − 1|
    pub inverse_law: f64,
    /// max |ε_α − ε_{tα}|
    pub t_law: f64,
}

impl EpsilonCheck {
    pub fn max_residual(&self) -> f64 {
        self.involution.max(self.orthogonal).max(self.sigma_commute).max(self.inverse_law).max(self.t_law)
    }
}

pub fn epsilon_check(spec: &CartanSubsetSpec, eps: &crate::cartan::EpsilonTable, seed: u64) -> Result<EpsilonCheck> {
    let (alg, dec) = spec.decompose(seed)?;
    let phi = spec.phi_with(&alg, &dec, eps)?;
    let n = phi.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let b = DMatrix::<C64>::from_diagonal(&DVector::from_iterator(n, alg.b_diag().iter().map(|&x| c(x as f64, 0.0))));
    let s = spec.sigma(&alg).action_matrix::<C64>();
    let rs = RootSpaces::<C64>::from_decomposition(spec, alg, &dec)?;
    let val = |coords: &[Q]| eps.value(coords).ok_or_else(|| Error::Computation(format!("{coords:?} outside the ε lattice")));
    let (mut inverse_law, mut t_law) = (0.0f64, 0.0f64);
    for rt in &rs.roots {
        let e = val(&rt.coords)?;
        let en = val(&rs.roots[rt.negative].coords)?;
        let et = val(&rs.roots[rt.t_image].coords)?;
        inverse_law = inverse_law.max((e * en - c(1.0, 0.0)).norm());
        t_law = t_law.max((e - et).norm());
    }
    Ok(EpsilonCheck {
        involution: (&phi * &phi - &id).amax_c(),
        orthogonal: (phi.transpose() * &b * &phi - &b).amax_c(),
        sigma_commute: (&phi * &s - &s * &phi).amax_c(),
        inverse_law,
        t_law,
    })
}
