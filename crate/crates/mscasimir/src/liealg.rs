//! The real Lie algebra so(p+1,q+1) in the F_{μν} basis, its trace form and involutions.

use nalgebra::{DMatrix, DVector};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Field, C64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    /// Checked constructor: p ≥ q ≥ 0 and d = p+q > 2.
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < q {
            return Err(Error::InvalidSignature(format!("p={p} < q={q}")));
        }
        if p + q <= 2 {
            return Err(Error::InvalidSignature(format!("d={} must exceed 2", p + q)));
        }
        Ok(Signature { p, q })
    }

    /// Skips the standing assumptions, for exploratory use.
    pub fn new_unchecked(p: usize, q: usize) -> Self {
        Signature { p, q }
    }

    pub fn d(&self) -> usize {
        self.p + self.q
    }

    pub fn n(&self) -> usize {
        self.d() + 2
    }

    /// Diagonal of η: +1 on 0..=p, −1 on p+1..=d+1.
    pub fn eta(&self) -> Vec<i64> {
        (0..self.n()).map(|i| if i <= self.p { 1 } else { -1 }).collect()
    }
}

/// Coefficient vector over the lexicographically ordered F_{μν}, μ < ν.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<S: Field> {
    pub coeffs: DVector<S>,
}

impl<S: Field> Element<S> {
    pub fn zero(dim: usize) -> Self {
        Element { coeffs: DVector::from_element(dim, S::zero()) }
    }

    pub fn from_vec(v: Vec<S>) -> Self {
        Element { coeffs: DVector::from_vec(v) }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        Element { coeffs: DVector::from_fn(self.dim(), |i, _| self.coeffs[i].clone() + o.coeffs[i].clone()) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Element { coeffs: DVector::from_fn(self.dim(), |i, _| self.coeffs[i].clone() - o.coeffs[i].clone()) }
    }

    pub fn scale(&self, s: &S) -> Self {
        Element { coeffs: self.coeffs.map(|x| x * s.clone()) }
    }

    pub fn neg(&self) -> Self {
        Element { coeffs: self.coeffs.map(|x| -x) }
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|x| x.negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|x| x.mag()).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> Element<C64> {
        Element { coeffs: self.coeffs.map(|x| x.to_c64()) }
    }

    /// Linear combination Σ w_i x_i.
    pub fn combo(dim: usize, terms: &[(S, &Element<S>)]) -> Self {
        terms.iter().fold(Element::zero(dim), |acc, (w, x)| acc.add(&x.scale(w)))
    }
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub sig: Signature,
    pub n: usize,
    pub eta: Vec<i64>,
    pub basis: Vec<(usize, usize)>,
    index: Vec<Vec<Option<usize>>>,
    /// `table[a*dim+b]` lists (c, coefficient) with [F_a, F_b] = Σ coefficient·F_c.
    table: Vec<Vec<(usize, i64)>>,
    /// B(F_a, F_a) = tr(F_a²); the form is diagonal in this basis.
    bdiag: Vec<i64>,
}

impl Algebra {
    pub fn new(sig: Signature) -> Self {
        let n = sig.n();
        let eta = sig.eta();
        let mut basis = Vec::new();
        let mut index = vec![vec![None; n]; n];
        for mu in 0..n {
            for nu in mu + 1..n {
                index[mu][nu] = Some(basis.len());
                basis.push((mu, nu));
            }
        }
        let dim = basis.len();
        let mut alg = Algebra { sig, n, eta: eta.clone(), basis, index, table: vec![], bdiag: vec![] };
        let mut table = vec![Vec::new(); dim * dim];
        for a in 0..dim {
            let (mu, nu) = alg.basis[a];
            for b in 0..dim {
                let (rho, sg) = alg.basis[b];
                let mut acc: Vec<(usize, i64)> = Vec::new();
                let mut push = |x: usize, y: usize, w: i64| {
                    if w == 0 || x == y {
                        return;
                    }
                    let (c, s) = alg.signed_index(x, y);
                    if let Some(e) = acc.iter_mut().find(|e| e.0 == c) {
                        e.1 += s * w;
                    } else {
                        acc.push((c, s * w));
                    }
                };
                let et = |i: usize, j: usize| if i == j { eta[i] } else { 0 };
                push(mu, sg, et(nu, rho));
                push(nu, rho, et(mu, sg));
                push(nu, sg, -et(mu, rho));
                push(mu, rho, -et(nu, sg));
                acc.retain(|e| e.1 != 0);
                acc.sort();
                table[a * dim + b] = acc;
            }
        }
        alg.table = table;
        alg.bdiag = alg.basis.iter().map(|&(mu, nu)| -2 * eta[mu] * eta[nu]).collect();
        alg
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Index and sign of F_{xy} in the basis (F_{xy} = −F_{yx}).
    pub fn signed_index(&self, x: usize, y: usize) -> (usize, i64) {
        assert!(x != y, "F_{{μμ}} is zero");
        if x < y {
            (self.index[x][y].unwrap(), 1)
        } else {
            (self.index[y][x].unwrap(), -1)
        }
    }

    pub fn index_of(&self, mu: usize, nu: usize) -> usize {
        self.signed_index(mu, nu).0
    }

    pub fn label(&self, a: usize) -> String {
        let (mu, nu) = self.basis[a];
        format!("F_{mu}_{nu}")
    }

    /// Parses "F_mu_nu".
    pub fn parse_label(&self, s: &str) -> Option<usize> {
        let mut it = s.strip_prefix("F_")?.split('_');
        let mu: usize = it.next()?.parse().ok()?;
        let nu: usize = it.next()?.parse().ok()?;
        if it.next().is_some() || mu >= nu || nu >= self.n {
            return None;
        }
        Some(self.index_of(mu, nu))
    }

    /// F_{μν} for any μ ≠ ν.
    pub fn f<S: Field>(&self, mu: usize, nu: usize) -> Element<S> {
        let (i, s) = self.signed_index(mu, nu);
        let mut e = Element::zero(self.dim());
        e.coeffs[i] = S::from_i64(s);
        e
    }

    /// F^{μν} = η_μ η_ν F_{μν}.
    pub fn f_raised<S: Field>(&self, mu: usize, nu: usize) -> Element<S> {
        self.f::<S>(mu, nu).scale(&S::from_i64(self.eta[mu] * self.eta[nu]))
    }

    pub fn basis_element<S: Field>(&self, a: usize) -> Element<S> {
        let mut e = Element::zero(self.dim());
        e.coeffs[a] = S::one();
        e
    }

    pub fn structure(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a * self.dim() + b]
    }

    pub fn bracket<S: Field>(&self, x: &Element<S>, y: &Element<S>) -> Element<S> {
        let dim = self.dim();
        let mut out = Element::<S>::zero(dim);
        for a in 0..dim {
            if x.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..dim {
                if y.coeffs[b].is_zero() {
                    continue;
                }
                let w = x.coeffs[a].clone() * y.coeffs[b].clone();
                for &(c, s) in self.structure(a, b) {
                    out.coeffs[c] = out.coeffs[c].clone() + w.clone() * S::from_i64(s);
                }
            }
        }
        out
    }

    /// Matrix of ad(x) on the F-basis.
    pub fn ad_matrix<S: Field>(&self, x: &Element<S>) -> DMatrix<S> {
        let dim = self.dim();
        let mut m = linalg::zeros::<S>(dim, dim);
        for a in 0..dim {
            if x.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..dim {
                for &(c, s) in self.structure(a, b) {
                    m[(c, b)] = m[(c, b)].clone() + x.coeffs[a].clone() * S::from_i64(s);
                }
            }
        }
        m
    }

    /// Realization in the defining representation: (μ,ν) entry η_ν, (ν,μ) entry −η_μ.
    pub fn to_matrix<S: Field>(&self, x: &Element<S>) -> DMatrix<S> {
        let mut m = linalg::zeros::<S>(self.n, self.n);
        for (a, &(mu, nu)) in self.basis.iter().enumerate() {
            let c = &x.coeffs[a];
            if c.is_zero() {
                continue;
            }
            m[(mu, nu)] = m[(mu, nu)].clone() + c.clone() * S::from_i64(self.eta[nu]);
            m[(nu, mu)] = m[(nu, mu)].clone() - c.clone() * S::from_i64(self.eta[mu]);
        }
        m
    }

    /// Inverse of `to_matrix` on so(η); off-algebra parts are discarded.
    pub fn from_matrix<S: Field>(&self, m: &DMatrix<S>) -> Element<S> {
        Element {
            coeffs: DVector::from_fn(self.dim(), |a, _| {
                let (mu, nu) = self.basis[a];
                m[(mu, nu)].clone() * S::from_i64(self.eta[nu])
            }),
        }
    }

    /// ‖Mᵀη + ηM‖_max: zero iff M lies in so(η).
    pub fn membership_residual<S: Field>(&self, m: &DMatrix<S>) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = m[(j, i)].clone() * S::from_i64(self.eta[j]) + S::from_i64(self.eta[i]) * m[(i, j)].clone();
                r = r.max(v.mag());
            }
        }
        r
    }

    pub fn eta_matrix<S: Field>(&self) -> DMatrix<S> {
        DMatrix::from_fn(self.n, self.n, |i, j| if i == j { S::from_i64(self.eta[i]) } else { S::zero() })
    }

    pub fn b_diag(&self) -> &[i64] {
        &self.bdiag
    }

    /// B(X,Y) = tr(XY).
    pub fn form_b<S: Field>(&self, x: &Element<S>, y: &Element<S>) -> S {
        (0..self.dim()).fold(S::zero(), |acc, a| {
            acc + x.coeffs[a].clone() * y.coeffs[a].clone() * S::from_i64(self.bdiag[a])
        })
    }

    /// B_θ(X,Y) = −B(X, θY).
    pub fn form_btheta<S: Field>(&self, x: &Element<S>, y: &Element<S>) -> S {
        -self.form_b(x, &self.theta().apply(y))
    }

    /// B_σ(X,Y) = −B(X, σY) for the given σ.
    pub fn form_bsigma<S: Field>(&self, sigma: &Involution, x: &Element<S>, y: &Element<S>) -> S {
        -self.form_b(x, &sigma.apply(y))
    }

    pub fn theta(&self) -> Involution {
        let diag: Vec<i64> = self.eta.clone();
        Involution::from_diagonal(self, InvolutionKind::Theta, &diag)
    }

    /// Conjugation by diag(−1, 1, …, 1, −1).
    pub fn sigma_fourpoint(&self) -> Involution {
        let mut diag = vec![1; self.n];
        diag[0] = -1;
        diag[self.n - 1] = -1;
        Involution::from_diagonal(self, InvolutionKind::SigmaFourPoint, &diag)
    }

    /// Conjugation by diag(1_{d−p}, −1_{p+2}); only meaningful for q = 0.
    pub fn sigma_defect(&self, p_defect: usize) -> Result<Involution> {
        let d = self.sig.d();
        if p_defect >= d {
            return Err(Error::InvalidSignature(format!("defect dimension p={p_defect} must be below d={d}")));
        }
        let diag: Vec<i64> = (0..self.n).map(|i| if i < d - p_defect { 1 } else { -1 }).collect();
        Ok(Involution::from_diagonal(self, InvolutionKind::SigmaDefect { p_defect }, &diag))
    }

    /// Eigenspace of an involution with eigenvalue `sign`, as an exact rational basis.
    pub fn eigenspace_split(&self, inv: &Involution, sign: i64) -> Vec<Element<Q>> {
        let dim = self.dim();
        let s: DMatrix<Q> = inv.action_matrix();
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            s[(i, j)].clone() - if i == j { Q::from_i64(sign) } else { Q::zero() }
        });
        linalg::kernel(&m, 0.0).into_iter().map(|coeffs| Element { coeffs }).collect()
    }

    /// Joint eigenspaces (k^σ, k^{−σ}, p^σ, p^{−σ}) of θ and σ.
    pub fn four_way_split(&self, sigma: &Involution) -> FourWay {
        let theta = self.theta();
        let dim = self.dim();
        let t: DMatrix<Q> = theta.action_matrix();
        let s: DMatrix<Q> = sigma.action_matrix();
        let joint = |ts: i64, ss: i64| -> Vec<Element<Q>> {
            let m = DMatrix::from_fn(2 * dim, dim, |i, j| {
                let (src, sg, ii) = if i < dim { (&t, ts, i) } else { (&s, ss, i - dim) };
                src[(ii, j)].clone() - if ii == j { Q::from_i64(sg) } else { Q::zero() }
            });
            linalg::kernel(&m, 0.0).into_iter().map(|coeffs| Element { coeffs }).collect()
        };
        FourWay { k_sigma: joint(1, 1), k_minus_sigma: joint(1, -1), p_sigma: joint(-1, 1), p_minus_sigma: joint(-1, -1) }
    }

    /// η(v, w).
    pub fn eta_form<S: Field>(&self, v: &[S], w: &[S]) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + v[i].clone() * w[i].clone() * S::from_i64(self.eta[i]))
    }

    /// Basis of {X : Xv ∈ ℝv} for an η-null vector v.
    pub fn stabilizer_subalgebra(&self, v: &[f64]) -> Result<Vec<Element<f64>>> {
        let n = self.n;
        if v.len() != n {
            return Err(Error::Dimension(format!("vector length {} != {n}", v.len())));
        }
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 == 0.0 {
            return Err(Error::Validation("zero vector".into()));
        }
        let ev = self.eta_form(v, v);
        if ev.abs() > 1e-10 * norm2 {
            return Err(Error::Validation(format!("vector is not null: η(v,v) = {ev}")));
        }
        let dim = self.dim();
        // Columns: X-coefficients, then λ; rows: components of Xv − λv.
        let mut m = DMatrix::<f64>::zeros(n.max(dim + 1), dim + 1);
        for a in 0..dim {
            let col = self.to_matrix::<f64>(&self.basis_element(a)) * DVector::from_column_slice(v);
            for i in 0..n {
                m[(i, a)] = col[i];
            }
        }
        for i in 0..n {
            m[(i, dim)] = -v[i];
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let mut out = Vec::new();
        for (k, s) in svd.singular_values.iter().enumerate() {
            if *s <= 1e-9 * smax {
                out.push(Element { coeffs: DVector::from_fn(dim, |a, _| vt[(k, a)]) });
            }
        }
        Ok(out)
    }

    /// D_a = F^{a, d+1−a} for a = 0..=q, spanning the maximal split abelian a_p.
    pub fn d_element<S: Field>(&self, a: usize) -> Element<S> {
        let d = self.sig.d();
        self.f_raised(a, d + 1 - a)
    }

    pub fn a_p_basis<S: Field>(&self) -> Vec<Element<S>> {
        (0..=self.sig.q).map(|a| self.d_element(a)).collect()
    }

    /// Exact Jacobi check on a triple of basis indices.
    pub fn jacobi_residual<S: Field>(&self, x: &Element<S>, y: &Element<S>, z: &Element<S>) -> f64 {
        let t1 = self.bracket(x, &self.bracket(y, z));
        let t2 = self.bracket(y, &self.bracket(z, x));
        let t3 = self.bracket(z, &self.bracket(x, y));
        t1.add(&t2).add(&t3).max_abs()
    }
}

#[derive(Clone, Debug)]
pub struct FourWay {
    pub k_sigma: Vec<Element<Q>>,
    pub k_minus_sigma: Vec<Element<Q>>,
    pub p_sigma: Vec<Element<Q>>,
    pub p_minus_sigma: Vec<Element<Q>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InvolutionKind {
    Theta,
    SigmaFourPoint,
    SigmaDefect { p_defect: usize },
}

/// Conjugation X ↦ D X D⁻¹ by a stored matrix, with its action cached on the F-basis.
#[derive(Clone, Debug)]
pub struct Involution {
    pub kind: InvolutionKind,
    pub matrix: DMatrix<f64>,
    /// Image of each basis element as a sparse integer combination.
    action: Vec<Vec<(usize, i64)>>,
}

impl Involution {
    fn from_diagonal(alg: &Algebra, kind: InvolutionKind, diag: &[i64]) -> Self {
        let m = DMatrix::from_fn(alg.n, alg.n, |i, j| if i == j { diag[i] as f64 } else { 0.0 });
        Self::from_matrix(alg, kind, m)
    }

    /// Any matrix normalizing so(η) with integral action on the basis.
    pub fn from_matrix(alg: &Algebra, kind: InvolutionKind, m: DMatrix<f64>) -> Self {
        let minv = m.clone().try_inverse().expect("conjugating matrix must be invertible");
        let dim = alg.dim();
        let action = (0..dim)
            .map(|a| {
                let fa = alg.to_matrix::<f64>(&alg.basis_element(a));
                let img = alg.from_matrix(&(&m * fa * &minv));
                img.coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() > 1e-12)
                    .map(|(c, v)| {
                        let r = v.round();
                        assert!((v - r).abs() < 1e-9, "non-integral involution action");
                        (c, r as i64)
                    })
                    .collect()
            })
            .collect();
        Involution { kind, matrix: m, action }
    }

    pub fn apply<S: Field>(&self, x: &Element<S>) -> Element<S> {
        let mut out = Element::<S>::zero(x.dim());
        for (a, img) in self.action.iter().enumerate() {
            if x.coeffs[a].is_zero() {
                continue;
            }
            for &(c, s) in img {
                out.coeffs[c] = out.coeffs[c].clone() + x.coeffs[a].clone() * S::from_i64(s);
            }
        }
        out
    }

    pub fn action_matrix<S: Field>(&self) -> DMatrix<S> {
        let dim = self.action.len();
        let mut m = linalg::zeros::<S>(dim, dim);
        for (a, img) in self.action.iter().enumerate() {
            for &(c, s) in img {
                m[(c, a)] = S::from_i64(s);
            }
        }
        m
    }

    /// Sign of the action on F_a when the action is diagonal.
    pub fn basis_sign(&self, a: usize) -> Option<i64> {
        match self.action[a].as_slice() {
            [(c, s)] if *c == a => Some(*s),
            _ => None,
        }
    }
}

/// One-parameter block exponential exp(c·F_{μν}) as an n×n matrix.
pub fn exp_single(alg: &Algebra, mu: usize, nu: usize, c: C64) -> DMatrix<C64> {
    let mut m = linalg::identity::<C64>(alg.n);
    let s = alg.eta[mu] * alg.eta[nu];
    let (cs, sn) = if s == 1 { (c.cos(), c.sin()) } else { (c.cosh(), c.sinh()) };
    m[(mu, mu)] = cs;
    m[(nu, nu)] = cs;
    m[(mu, nu)] = sn * alg.eta[nu] as f64;
    m[(nu, mu)] = -sn * alg.eta[mu] as f64;
    m
}

/// exp of an algebra element: block formulas when the support uses pairwise disjoint indices,
/// otherwise the general Padé exponential.
pub fn exp_element(alg: &Algebra, x: &Element<C64>) -> DMatrix<C64> {
    let support: Vec<usize> = (0..alg.dim()).filter(|&a| x.coeffs[a].norm() > 0.0).collect();
    let mut used = vec![false; alg.n];
    let mut disjoint = true;
    for &a in &support {
        let (mu, nu) = alg.basis[a];
        if used[mu] || used[nu] {
            disjoint = false;
            break;
        }
        used[mu] = true;
        used[nu] = true;
    }
    if disjoint {
        support.iter().fold(linalg::identity::<C64>(alg.n), |acc, &a| {
            let (mu, nu) = alg.basis[a];
            acc * exp_single(alg, mu, nu, x.coeffs[a])
        })
    } else {
        linalg::expm(&alg.to_matrix(x))
    }
}

impl Element<f64> {
    pub fn from_q(e: &Element<Q>) -> Self {
        Element { coeffs: e.coeffs.map(|x| x.to_f64().unwrap_or(f64::NAN)) }
    }
}

impl Element<C64> {
    pub fn from_q(e: &Element<Q>) -> Self {
        Element::<f64>::from_q(e).to_c64()
    }
}

/// Element with given (index pair, coefficient) entries.
pub fn element_from_terms<S: Field>(alg: &Algebra, terms: &[((usize, usize), S)]) -> Element<S> {
    terms.iter().fold(Element::zero(alg.dim()), |acc, ((mu, nu), w)| acc.add(&alg.f::<S>(*mu, *nu).scale(w)))
}
