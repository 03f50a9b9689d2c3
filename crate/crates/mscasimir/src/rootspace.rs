//! Restricted root space decompositions of g_ℂ relative to a commutative c'.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::liealg::{Algebra, Element, Involution};
use crate::linalg;
use crate::scalar::{rationalize, Field, C64, Q};

pub use crate::cartan::is_regular;

pub const CLUSTER_GAP: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct RootDatum {
    /// Values α(Z_j) on the c'-basis.
    pub functional: Vec<C64>,
    pub multiplicity: usize,
    /// B_σ-orthonormal; for the negative of a positive root this is σ applied to the partner basis.
    pub basis: Vec<Element<C64>>,
    pub positive: bool,
    /// Coordinates in a labelled functional basis (ε₁, ε₂, … or e₁, …, e_N), once matched.
    pub coords: Option<Vec<Q>>,
}

#[derive(Clone, Debug)]
pub struct RootDecomposition {
    pub cprime: Vec<Element<C64>>,
    pub roots: Vec<RootDatum>,
    /// σ-odd part of g_0; spans c'_ℂ.
    pub zero_odd: Vec<Element<C64>>,
    /// σ-even part of g_0, i.e. m'_ℂ.
    pub zero_even: Vec<Element<C64>>,
    /// B(Z_j, Z_k).
    pub gram: DMatrix<C64>,
    pub gram_inv: DMatrix<C64>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct DecompositionOptions {
    pub seed: u64,
    pub cluster_gap: f64,
    pub verify_tol: f64,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions { seed: 0, cluster_gap: CLUSTER_GAP, verify_tol: 1e-9 }
    }
}

fn flat_key(f: &[C64]) -> Vec<i64> {
    f.iter().flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64]).collect()
}

/// Positive iff the first component that is not negligible (re before im) is positive.
pub fn is_positive_functional(f: &[C64]) -> bool {
    for z in f {
        for v in [z.re, z.im] {
            if v.abs() > 1e-9 {
                return v > 0.0;
            }
        }
    }
    false
}

/// Canonical basis of the row span via reduced echelon form.
fn canonical_basis(vectors: &[DVector<C64>], tol: f64) -> Vec<DVector<C64>> {
    if vectors.is_empty() {
        return vec![];
    }
    let n = vectors[0].len();
    let rows = DMatrix::from_fn(vectors.len(), n, |i, j| vectors[i][j]);
    let (r, piv) = linalg::rref(&rows, tol);
    (0..piv.len())
        .map(|i| DVector::from_fn(n, |j, _| {
            let v = r[(i, j)];
            C64::new(clean(v.re), clean(v.im))
        }))
        .collect()
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}

/// Simultaneous ad-eigenspace decomposition relative to the span of `cprime`.
pub fn root_decomposition(
    alg: &Algebra,
    cprime: &[Element<C64>],
    sigma: &Involution,
    opts: DecompositionOptions,
) -> Result<RootDecomposition> {
    let dim = alg.dim();
    let r = cprime.len();
    if r == 0 {
        return Err(Error::Validation("empty c' basis".into()));
    }
    for j in 0..r {
        for k in j + 1..r {
            let br = alg.bracket(&cprime[j], &cprime[k]).max_abs();
            if br > 1e-10 {
                return Err(Error::Validation(format!("c' basis not commutative: ‖[Z{j},Z{k}]‖ = {br:e}")));
            }
        }
    }
    let span = linalg::from_columns(&cprime.iter().map(|z| z.coeffs.clone()).collect::<Vec<_>>(), dim);
    let base_rank = linalg::svd_rank(&span, 1e-10);
    if base_rank != r {
        return Err(Error::Validation("c' basis is linearly dependent".into()));
    }
    let theta = alg.theta();
    for z in cprime {
        let tz = theta.apply(z);
        let ext = span.clone().insert_column(r, C64::zero());
        let mut ext = ext;
        ext.set_column(r, &tz.coeffs);
        if linalg::svd_rank(&ext, 1e-10) != r {
            return Err(Error::Validation("span of c' is not θ-stable".into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let weights: Vec<f64> = (0..r).map(|_| 1.0 + rng.gen_range(1..=96) as f64 / 97.0).collect();
    let zstar = cprime
        .iter()
        .zip(&weights)
        .fold(Element::<C64>::zero(dim), |acc, (z, w)| acc.add(&z.scale(&C64::new(*w, 0.0))));
    let ads: Vec<DMatrix<C64>> = cprime.iter().map(|z| alg.ad_matrix(z)).collect();
    let adstar = alg.ad_matrix(&zstar);
    let scale = linalg::max_abs(&adstar).max(1.0);

    // ad(Z*) is normal for θ-stable c', so Re + γ·Im of its spectrum comes from a Hermitian problem.
    let normality = linalg::max_abs(&(&adstar * adstar.adjoint() - adstar.adjoint() * &adstar));
    if normality > 1e-9 * scale * scale {
        return Err(Error::Validation(format!("ad(Z*) is not normal (residual {normality:e})")));
    }
    let gamma = 0.5 + rng.gen::<f64>();
    let herm = (&adstar + adstar.adjoint()) * C64::new(0.5, 0.0)
        + (&adstar - adstar.adjoint()) * C64::new(0.0, -0.5 * gamma);
    let sym = herm.symmetric_eigen();
    let eig: Vec<C64> = (0..dim)
        .map(|k| {
            let v = sym.eigenvectors.column(k);
            (v.adjoint() * &adstar * v)[(0, 0)]
        })
        .collect();

    // Single-linkage clustering with an ambiguity band.
    let gap = opts.cluster_gap * scale;
    let mut parent: Vec<usize> = (0..eig.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..eig.len() {
        for j in i + 1..eig.len() {
            let dd = (eig[i] - eig[j]).norm();
            if dd < gap {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    for i in 0..eig.len() {
        for j in i + 1..eig.len() {
            let dd = (eig[i] - eig[j]).norm();
            if dd >= gap && dd < 10.0 * gap && find(&mut parent, i) != find(&mut parent, j) {
                return Err(Error::Clustering { gap: dd, value: format!("{}", eig[i]) });
            }
        }
    }
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    let mut seen = vec![false; eig.len()];
    for i in 0..eig.len() {
        if seen[i] {
            continue;
        }
        let root = find(&mut parent, i);
        let members: Vec<usize> = (0..eig.len()).filter(|&j| find(&mut parent, j) == root).collect();
        for &m in &members {
            seen[m] = true;
        }
        let mean = members.iter().map(|&m| eig[m]).sum::<C64>() / members.len() as f64;
        clusters.push((mean, members.len()));
    }

    let mut roots = Vec::new();
    let mut zero_space: Vec<DVector<C64>> = Vec::new();
    for (lambda, m) in clusters {
        let shifted = &adstar - DMatrix::<C64>::identity(dim, dim) * lambda;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.unwrap();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
        let small = svd.singular_values[order[m - 1]];
        let next = if m < dim { svd.singular_values[order[m]] } else { f64::INFINITY };
        if small > 1e-6 * scale || next < 1e-6 * scale {
            return Err(Error::Computation(format!(
                "eigenspace at {lambda} not resolved: σ_m = {small:e}, σ_(m+1) = {next:e}"
            )));
        }
        let vecs: Vec<DVector<C64>> = order[..m].iter().map(|&k| DVector::from_fn(dim, |j, _| vt[(k, j)].conj())).collect();
        let vecs = canonical_basis(&vecs, 1e-9);
        let v = linalg::from_columns(&vecs, dim);
        let vh = v.adjoint();
        let pinv = (&vh * &v).try_inverse().ok_or_else(|| Error::Computation("degenerate eigenbasis".into()))? * vh;
        let mut functional = Vec::with_capacity(r);
        for (j, ad) in ads.iter().enumerate() {
            let proj = &pinv * ad * &v;
            let aj = proj.trace() / m as f64;
            let res = (ad * &v - &v * aj).iter().map(|x| x.norm()).fold(0.0, f64::max);
            if res > opts.verify_tol * scale.max(linalg::max_abs(ad)) {
                return Err(Error::Computation(format!("root vector check failed on Z{j}: residual {res:e}")));
            }
            functional.push(C64::new(clean(aj.re), clean(aj.im)));
        }
        if functional.iter().all(|z| z.norm() < 1e-9) {
            zero_space.extend(vecs);
        } else {
            roots.push((functional, vecs));
        }
    }

    // Zero space: σ-odd part is c'_ℂ, σ-even part is m'_ℂ.
    let s: DMatrix<C64> = sigma.action_matrix();
    let z0 = linalg::from_columns(&zero_space, dim);
    let even = linalg::from_columns(&zero_space, dim) + &s * &z0;
    let odd = z0.clone() - &s * &z0;
    let even_b = canonical_basis(&linalg::column_basis(&(even * C64::new(0.5, 0.0)), 1e-9), 1e-9);
    let odd_b = canonical_basis(&linalg::column_basis(&(odd * C64::new(0.5, 0.0)), 1e-9), 1e-9);
    if even_b.len() + odd_b.len() != zero_space.len() {
        return Err(Error::Computation("zero space does not split under σ".into()));
    }
    if odd_b.len() != r {
        return Err(Error::Validation(format!(
            "c' is not maximal: σ-odd zero space has dimension {} > {r}",
            odd_b.len()
        )));
    }

    let gram = DMatrix::from_fn(r, r, |j, k| alg.form_b(&cprime[j], &cprime[k]));
    let gram_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Computation("B degenerate on c'".into()))?;

    // Pair roots ±α, orthonormalize the positive one, push through σ.
    let mut data: Vec<RootDatum> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] || !is_positive_functional(&roots[i].0) {
            continue;
        }
        let f = &roots[i].0;
        let j = (0..roots.len())
            .find(|&j| !used[j] && roots[j].0.iter().zip(f).all(|(a, b)| (a + b).norm() < 1e-7))
            .ok_or_else(|| Error::Computation("root set not closed under negation".into()))?;
        used[i] = true;
        used[j] = true;
        let basis = bsigma_orthonormal(alg, sigma, &roots[i].1)?;
        let neg: Vec<Element<C64>> = basis.iter().map(|e| sigma.apply(e)).collect();
        let m = basis.len();
        if roots[j].1.len() != m {
            return Err(Error::Computation("±α multiplicities differ".into()));
        }
        data.push(RootDatum { functional: f.clone(), multiplicity: m, basis, positive: true, coords: None });
        data.push(RootDatum {
            functional: roots[j].0.clone(),
            multiplicity: m,
            basis: neg,
            positive: false,
            coords: None,
        });
    }
    if used.iter().any(|u| !u) {
        return Err(Error::Computation("unpaired root".into()));
    }
    data.sort_by(|a, b| flat_key(&a.functional).cmp(&flat_key(&b.functional)));

    let total: usize = data.iter().map(|d| d.multiplicity).sum::<usize>() + zero_space.len();
    if total != dim {
        return Err(Error::Computation(format!("dimension bookkeeping: {total} != {dim}")));
    }

    Ok(RootDecomposition {
        cprime: cprime.to_vec(),
        roots: data,
        zero_odd: odd_b.into_iter().map(|coeffs| Element { coeffs }).collect(),
        zero_even: even_b.into_iter().map(|coeffs| Element { coeffs }).collect(),
        gram,
        gram_inv,
        seed: opts.seed,
    })
}

/// Gram–Schmidt for the symmetric bilinear form B_σ; square roots with Re ≥ 0 (ties Im ≥ 0).
pub fn bsigma_orthonormal(alg: &Algebra, sigma: &Involution, vecs: &[DVector<C64>]) -> Result<Vec<Element<C64>>> {
    let bs = |x: &Element<C64>, y: &Element<C64>| alg.form_bsigma(sigma, x, y);
    let mut pool: Vec<Element<C64>> = vecs.iter().map(|v| Element { coeffs: v.clone() }).collect();
    let mut out: Vec<Element<C64>> = Vec::new();
    while !pool.is_empty() {
        for e in pool.iter_mut() {
            for o in &out {
                let w = bs(o, e);
                *e = e.sub(&o.scale(&w));
            }
        }
        let scale = pool.iter().map(|e| e.max_abs()).fold(0.0, f64::max).max(1e-300);
        let pick = pool.iter().position(|e| bs(e, e).norm() > 1e-8 * scale * scale);
        let v = match pick {
            Some(k) => pool.remove(k),
            None => {
                // All isotropic: a sum of two pool vectors is not.
                let mut found = None;
                'outer: for a in 0..pool.len() {
                    for b in a + 1..pool.len() {
                        let s = pool[a].add(&pool[b]);
                        if bs(&s, &s).norm() > 1e-8 * scale * scale {
                            found = Some((a, s));
                            break 'outer;
                        }
                    }
                }
                let (a, s) = found.ok_or_else(|| Error::Computation("B_σ degenerate on a root space".into()))?;
                pool.remove(a);
                s
            }
        };
        let nrm = bs(&v, &v);
        let mut sq = nrm.sqrt();
        if sq.re < 0.0 || (sq.re == 0.0 && sq.im < 0.0) {
            sq = -sq;
        }
        out.push(v.scale(&(C64::one() / sq)));
    }
    Ok(out)
}

impl RootDecomposition {
    pub fn rank(&self) -> usize {
        self.cprime.len()
    }

    pub fn find(&self, functional: &[C64]) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| r.functional.iter().zip(functional).all(|(a, b)| (a - b).norm() < 1e-7))
    }

    pub fn negative_of(&self, i: usize) -> usize {
        let neg: Vec<C64> = self.roots[i].functional.iter().map(|z| -z).collect();
        self.find(&neg).expect("closed under negation")
    }

    /// C_α: the B-dual of a functional on c'_ℂ.
    pub fn dual_element(&self, functional: &[C64]) -> Element<C64> {
        let r = self.rank();
        let a = DVector::from_column_slice(functional);
        let c = &self.gram_inv * a;
        (0..r).fold(Element::zero(self.cprime[0].dim()), |acc, j| acc.add(&self.cprime[j].scale(&c[j])))
    }

    /// B*(α, β) = α(C_β).
    pub fn bstar(&self, a: &[C64], b: &[C64]) -> C64 {
        let av = DVector::from_column_slice(a);
        let bv = DVector::from_column_slice(b);
        (av.transpose() * &self.gram_inv * bv)[(0, 0)]
    }

    /// Express every root in the labelled basis `labels` (each given by its values on c'),
    /// requiring real coordinates with denominators dividing `max_den`.
    pub fn match_labels(&mut self, labels: &[Vec<C64>], max_den: i64) -> Result<()> {
        let r = self.rank();
        if labels.len() != r {
            return Err(Error::Dimension("label count differs from rank".into()));
        }
        // functional = Σ_k a_k ε_k  ⇔  Lᵀ a = functional with L_{kj} = ε_k(Z_j).
        let lt = DMatrix::from_fn(r, r, |j, k| labels[k][j]);
        let inv = lt.try_inverse().ok_or_else(|| Error::Validation("labelled functionals are dependent".into()))?;
        for root in self.roots.iter_mut() {
            let a = &inv * DVector::from_column_slice(&root.functional);
            let mut coords = Vec::with_capacity(r);
            for z in a.iter() {
                if z.im.abs() > 1e-8 {
                    return Err(Error::Validation(format!("root {:?} has non-real label coordinates", root.functional)));
                }
                coords.push(
                    rationalize(z.re, max_den, 1e-8)
                        .ok_or_else(|| Error::Validation(format!("coordinate {} not a small rational", z.re)))?,
                );
            }
            root.coords = Some(coords);
        }
        Ok(())
    }

    /// Index of the root with the given label coordinates.
    pub fn find_coords(&self, coords: &[Q]) -> Option<usize> {
        self.roots.iter().position(|r| r.coords.as_deref() == Some(coords))
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = (usize, &RootDatum)> {
        self.roots.iter().enumerate().filter(|(_, r)| r.positive)
    }

    /// Basis of g_C adapted to the decomposition: zero space first, then root spaces in order.
    pub fn adapted_basis(&self) -> (DMatrix<C64>, Vec<Option<usize>>) {
        let mut cols = Vec::new();
        let mut owner = Vec::new();
        for e in self.zero_odd.iter().chain(&self.zero_even) {
            cols.push(e.coeffs.clone());
            owner.push(None);
        }
        for (i, r) in self.roots.iter().enumerate() {
            for e in &r.basis {
                cols.push(e.coeffs.clone());
                owner.push(Some(i));
            }
        }
        (DMatrix::from_columns(&cols), owner)
    }
}

/// Real basis of g^{−σ} ∩ Ad(t)(g^{−σ}).
pub fn sigma_intersection(alg: &Algebra, sigma: &Involution, t: &DMatrix<f64>) -> Result<Vec<Element<f64>>> {
    let eta: DMatrix<f64> = alg.eta_matrix();
    let orth = (t.transpose() * &eta * t - &eta).abs().max();
    if orth > 1e-9 {
        return Err(Error::Validation(format!("t is not η-orthogonal (residual {orth:e})")));
    }
    let tinv = t.clone().try_inverse().ok_or_else(|| Error::Validation("t not invertible".into()))?;
    let dim = alg.dim();
    let mut ad = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        let img = alg.from_matrix(&(&tinv * alg.to_matrix::<f64>(&alg.basis_element(a)) * t));
        ad.set_column(a, &img.coeffs);
    }
    let s: DMatrix<f64> = sigma.action_matrix();
    let id = DMatrix::<f64>::identity(dim, dim);
    let top = &s + &id;
    let bottom = (&s + &id) * &ad;
    let mut m = DMatrix::<f64>::zeros(2 * dim, dim);
    m.view_mut((0, 0), (dim, dim)).copy_from(&top);
    m.view_mut((dim, 0), (dim, dim)).copy_from(&bottom);
    let svd = m.svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1.0);
    let vecs: Vec<DVector<C64>> = (0..dim)
        .filter(|&k| svd.singular_values[k] <= 1e-9 * smax)
        .map(|k| DVector::from_fn(dim, |j, _| C64::new(vt[(k, j)], 0.0)))
        .collect();
    Ok(canonical_basis(&vecs, 1e-9)
        .into_iter()
        .map(|v| Element { coeffs: v.map(|z| z.re) })
        .collect())
}

/// m' = Z_h(c') as a real kernel computation, independent of the eigen-decomposition.
pub fn centralizer_in_h(alg: &Algebra, sigma: &Involution, cprime: &[Element<C64>]) -> Vec<Element<C64>> {
    let dim = alg.dim();
    let h: Vec<Element<Q>> = alg.eigenspace_split(sigma, 1);
    let hb: Vec<Element<C64>> = h.iter().map(Element::<C64>::from_q).collect();
    let k = hb.len();
    let mut m = DMatrix::<C64>::zeros(dim * cprime.len(), k);
    for (j, z) in cprime.iter().enumerate() {
        for (c, y) in hb.iter().enumerate() {
            let br = alg.bracket(z, y);
            for a in 0..dim {
                m[(j * dim + a, c)] = br.coeffs[a];
            }
        }
    }
    let ker = linalg::svd_kernel(&m, 1e-10);
    let vecs: Vec<DVector<C64>> = ker
        .iter()
        .map(|w| (0..k).fold(DVector::zeros(dim), |acc: DVector<C64>, c| acc + &hb[c].coeffs * w[c]))
        .collect();
    canonical_basis(&vecs, 1e-9).into_iter().map(|coeffs| Element { coeffs }).collect()
}

/// Type and multiplicities of a restricted root system.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RootSystemInfo {
    pub name: String,
    pub rank: usize,
    pub reduced: bool,
    /// Multiplicity of the shortest roots (None if only one length occurs).
    pub short_multiplicity: Option<usize>,
    pub long_multiplicity: usize,
    pub n_roots: usize,
}

impl RootSystemInfo {
    /// Name comparison modulo the low-rank coincidences B₂ = C₂, D₃ = A₃, A₁ = B₁ = C₁.
    pub fn is_type(&self, name: &str) -> bool {
        let canon = |s: &str| -> String {
            match s {
                "B2" | "C2" => "C2".into(),
                "D3" | "A3" => "A3".into(),
                "A1" | "B1" | "C1" => "A1".into(),
                "D2" | "A1+A1" => "A1+A1".into(),
                other => other.into(),
            }
        };
        canon(&self.name) == canon(name)
    }
}

/// Classify a root system from root vectors and a positive-definite Gram form.
pub fn classify_vectors(vectors: &[Vec<f64>], mults: &[usize], inner: &dyn Fn(&[f64], &[f64]) -> f64) -> RootSystemInfo {
    let nroots = vectors.len();
    let dimv = vectors.first().map(|v| v.len()).unwrap_or(0);
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-7);
    let find = |v: &[f64]| vectors.iter().position(|w| same(w, v));
    let reduced = !vectors.iter().any(|v| find(&v.iter().map(|x| 2.0 * x).collect::<Vec<_>>()).is_some());
    // Generic linear form for positivity.
    let w: Vec<f64> = (0..dimv).map(|i| 1.0 + (i as f64 + 1.0).sqrt() * 0.137).collect();
    let pos: Vec<usize> = (0..nroots).filter(|&i| vectors[i].iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() > 0.0).collect();
    let simple: Vec<usize> = pos
        .iter()
        .cloned()
        .filter(|&i| {
            !pos.iter().any(|&j| {
                j != i && {
                    let diff: Vec<f64> = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a - b).collect();
                    find(&diff).map(|k| pos.contains(&k)).unwrap_or(false)
                }
            })
        })
        .collect();
    // For non-reduced systems drop the doubled simple root.
    let simple: Vec<usize> = simple
        .iter()
        .cloned()
        .filter(|&i| {
            let half: Vec<f64> = vectors[i].iter().map(|x| x / 2.0).collect();
            find(&half).is_none()
        })
        .collect();
    let r = simple.len();
    let norms: Vec<f64> = vectors.iter().map(|v| inner(v, v)).collect();
    let cartan = |i: usize, j: usize| -> i64 {
        let (a, b) = (&vectors[simple[i]], &vectors[simple[j]]);
        (2.0 * inner(a, b) / inner(b, b)).round() as i64
    };
    // Connected components of the Dynkin diagram.
    let mut comp = vec![usize::MAX; r];
    let mut ncomp = 0;
    for s in 0..r {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(x) = stack.pop() {
            for y in 0..r {
                if comp[y] == usize::MAX && cartan(x, y) != 0 {
                    comp[y] = ncomp;
                    stack.push(y);
                }
            }
        }
        ncomp += 1;
    }
    let mut names = Vec::new();
    for c in 0..ncomp {
        let nodes: Vec<usize> = (0..r).filter(|&x| comp[x] == c).collect();
        let k = nodes.len();
        let mut maxbond = 0;
        let mut maxdeg = 0;
        for &x in &nodes {
            let mut deg = 0;
            for &y in &nodes {
                if x != y && cartan(x, y) != 0 {
                    deg += 1;
                    maxbond = maxbond.max(cartan(x, y) * cartan(y, x));
                }
            }
            maxdeg = maxdeg.max(deg);
        }
        let lens: Vec<f64> = nodes.iter().map(|&x| norms[simple[x]]).collect();
        let lmax = lens.iter().cloned().fold(0.0, f64::max);
        let n_long = lens.iter().filter(|l| (*l - lmax).abs() < 1e-7 * lmax).count();
        let base = match (k, maxbond, maxdeg) {
            (1, _, _) => "A1".to_string(),
            (_, 1, d) if d <= 2 => format!("A{k}"),
            (_, 1, 3) => {
                // D_k or E_k: D has a branch node with two leaf neighbours.
                format!("{}{k}", if k >= 4 && is_d_type(&nodes, &cartan) { "D" } else { "E" })
            }
            (2, 2, _) => "C2".into(),
            (_, 2, _) if n_long == 1 => format!("C{k}"),
            (_, 2, _) => {
                if k == 4 && n_long == 2 {
                    "F4".into()
                } else {
                    format!("B{k}")
                }
            }
            (2, 3, _) => "G2".into(),
            _ => "unknown".into(),
        };
        let base = if reduced { base } else { base.replacen(|ch: char| ch.is_ascii_alphabetic(), "BC", 1) };
        names.push(base);
    }
    let lmax = norms.iter().cloned().fold(0.0, f64::max);
    let lmin = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let long_m: Vec<usize> = (0..nroots).filter(|&i| (norms[i] - lmax).abs() < 1e-7 * lmax).map(|i| mults[i]).collect();
    let short_m: Vec<usize> = (0..nroots).filter(|&i| (norms[i] - lmin).abs() < 1e-7 * lmax).map(|i| mults[i]).collect();
    let two_lengths = (lmax - lmin).abs() > 1e-7 * lmax;
    RootSystemInfo {
        name: if names.is_empty() { "0".into() } else { names.join("+") },
        rank: r,
        reduced,
        short_multiplicity: if two_lengths { short_m.first().cloned() } else { None },
        long_multiplicity: long_m.first().cloned().unwrap_or(0),
        n_roots: nroots,
    }
}

fn is_d_type(nodes: &[usize], cartan: &dyn Fn(usize, usize) -> i64) -> bool {
    let deg = |x: usize| nodes.iter().filter(|&&y| y != x && cartan(x, y) != 0).count();
    let Some(&branch) = nodes.iter().find(|&&x| deg(x) == 3) else { return false };
    let leaves = nodes.iter().filter(|&&y| y != branch && cartan(branch, y) != 0 && deg(y) == 1).count();
    leaves >= 2
}

impl RootDecomposition {
    /// Real embedding of roots: coordinates in an orthonormal frame for Re B*.
    pub fn real_root_vectors(&self) -> Vec<Vec<f64>> {
        // B* restricted to the real span of the roots is positive definite and real.
        let r = self.rank();
        let g = DMatrix::from_fn(r, r, |j, k| {
            let ej: Vec<C64> = (0..r).map(|i| if i == j { C64::one() } else { C64::zero() }).collect();
            let ek: Vec<C64> = (0..r).map(|i| if i == k { C64::one() } else { C64::zero() }).collect();
            self.bstar(&ej, &ek)
        });
        // Choose a real basis of the root span: the functionals span a real form.
        let roots: Vec<DVector<C64>> = self.roots.iter().map(|x| DVector::from_column_slice(&x.functional)).collect();
        let mut basis: Vec<DVector<C64>> = Vec::new();
        for v in &roots {
            let mut cand = basis.clone();
            cand.push(v.clone());
            if linalg::svd_rank(&DMatrix::from_columns(&cand), 1e-9) == cand.len() {
                basis = cand;
            }
            if basis.len() == r {
                break;
            }
        }
        let bm = DMatrix::from_columns(&basis);
        let bmi = bm.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(r, r));
        let gb = bm.transpose() * &g * &bm;
        let gr = gb.map(|z| z.re);
        let chol = nalgebra::Cholesky::new(gr.clone()).map(|c| c.l().transpose()).unwrap_or(gr);
        roots
            .iter()
            .map(|v| {
                let coef = (&bmi * v).map(|z| z.re);
                (&chol * coef).iter().cloned().collect()
            })
            .collect()
    }

    pub fn classify(&self) -> RootSystemInfo {
        let vecs = self.real_root_vectors();
        let mults: Vec<usize> = self.roots.iter().map(|r| r.multiplicity).collect();
        classify_vectors(&vecs, &mults, &|a, b| a.iter().zip(b).map(|(x, y)| x * y).sum())
    }

    pub fn zero_dim(&self) -> usize {
        self.zero_odd.len() + self.zero_even.len()
    }
}

pub fn functional_q_to_c64(v: &[Q]) -> Vec<C64> {
    v.iter().map(|x| x.to_c64()).collect()
}
