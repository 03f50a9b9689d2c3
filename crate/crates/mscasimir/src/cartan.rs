//! Catalogs of standard Cartan subsets, their (χ₁,χ₂)-parametrizations, ε characters and x^α.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{exp_element, Algebra, Element, Involution, Signature};
use crate::linalg;
use crate::rootspace::{root_decomposition, DecompositionOptions, RootDecomposition};
use crate::scalar::{c, q, Field, C64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    FourPoint,
    Defect { p_defect: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CartanLabel {
    Euclid,
    Empty,
    Zero,
    Two,
    One,
    OnePrime,
    ZeroOne,
    ZeroTwo,
    OneTwo,
    DefectFund,
    DefectC(usize),
    DefectCPrime(usize),
}

impl fmt::Display for CartanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CartanLabel::Euclid => "euclid".to_string(),
            CartanLabel::Empty => "empty".into(),
            CartanLabel::Zero => "0".into(),
            CartanLabel::Two => "2".into(),
            CartanLabel::One => "1".into(),
            CartanLabel::OnePrime => "1'".into(),
            CartanLabel::ZeroOne => "01".into(),
            CartanLabel::ZeroTwo => "02".into(),
            CartanLabel::OneTwo => "12".into(),
            CartanLabel::DefectFund => "fund".into(),
            CartanLabel::DefectC(i) => format!("C_{i}"),
            CartanLabel::DefectCPrime(i) => format!("C'_{i}"),
        };
        f.write_str(&s)
    }
}

impl CartanLabel {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim() {
            "euclid" => CartanLabel::Euclid,
            "empty" | "" | "{}" | "∅" | "none" => CartanLabel::Empty,
            "0" | "{0}" => CartanLabel::Zero,
            "2" | "{2}" => CartanLabel::Two,
            "1" | "{1}" => CartanLabel::One,
            "1'" | "1p" | "{1}'" => CartanLabel::OnePrime,
            "01" | "{0,1}" => CartanLabel::ZeroOne,
            "02" | "{0,2}" => CartanLabel::ZeroTwo,
            "12" | "{1,2}" => CartanLabel::OneTwo,
            "fund" => CartanLabel::DefectFund,
            other => {
                if let Some(i) = other.strip_prefix("C'_") {
                    CartanLabel::DefectCPrime(i.parse().ok()?)
                } else if let Some(i) = other.strip_prefix("C_") {
                    CartanLabel::DefectC(i.parse().ok()?)
                } else {
                    return None;
                }
            }
        })
    }

    /// Face of the fundamental domain whose real locus the parametrization covers.
    pub fn region(&self) -> Option<crate::coords::Face> {
        use crate::coords::Face;
        Some(match self {
            CartanLabel::Euclid => Face::One,
            CartanLabel::Empty => Face::Empty,
            CartanLabel::Zero => Face::Zero,
            CartanLabel::Two => Face::Two,
            CartanLabel::One => Face::One,
            // Relabelled copy of the fundamental Cartan subset for q = 1.
            CartanLabel::OnePrime => Face::Empty,
            CartanLabel::ZeroOne => Face::ZeroOne,
            CartanLabel::ZeroTwo => Face::ZeroTwo,
            CartanLabel::OneTwo => Face::OneTwo,
            _ => return None,
        })
    }
}

/// A character of the root lattice with values in {1, i, −1, −i}, given on lattice generators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonTable {
    /// Generators in label coordinates.
    #[serde(skip)]
    pub generators: Vec<Vec<Q>>,
    /// ε(generator) = i^exponent.
    pub exponents: Vec<u8>,
}

impl EpsilonTable {
    pub fn trivial(generators: Vec<Vec<Q>>) -> Self {
        let k = generators.len();
        EpsilonTable { generators, exponents: vec![0; k] }
    }

    /// Integer coordinates of `coords` in the generator basis, if it lies in the lattice.
    pub fn lattice_coords(&self, coords: &[Q]) -> Option<Vec<i64>> {
        let r = self.generators.len();
        let g = DMatrix::from_fn(r, r, |i, j| self.generators[j][i].clone());
        let b = DMatrix::from_fn(r, 1, |i, _| coords[i].clone());
        let sol = linalg::solve(&g, &b, 0.0)?;
        let mut out = Vec::with_capacity(r);
        for i in 0..r {
            let v = &sol[(i, 0)];
            if !v.is_integer() {
                return None;
            }
            out.push(v.to_integer().to_i64()?);
        }
        Some(out)
    }

    /// Exponent k with ε_α = i^k.
    pub fn exponent(&self, coords: &[Q]) -> Option<u8> {
        let n = self.lattice_coords(coords)?;
        let s: i64 = n.iter().zip(&self.exponents).map(|(a, e)| a * *e as i64).sum();
        Some(s.rem_euclid(4) as u8)
    }

    pub fn value(&self, coords: &[Q]) -> Option<C64> {
        Some(i_power(self.exponent(coords)?))
    }
}

pub fn i_power(k: u8) -> C64 {
    match k % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

#[derive(Clone, Debug)]
pub struct CartanSubsetSpec {
    pub label: CartanLabel,
    pub sig: Signature,
    pub kind: PairKind,
    /// Spanning set of c' (real, integral coefficients).
    pub cprime: Vec<Element<Q>>,
    /// Inhomogeneity t (C' = exp(c')·t).
    pub t: DMatrix<f64>,
    pub t_name: String,
    /// Labelled functionals ε_k, given by their values ε_k(Z_j) on the c'-basis.
    pub labels: Vec<Vec<C64>>,
    /// Offset X₀ ∈ c'_ℂ (c'-coordinates) of the holomorphic parametrization X(χ) = X₀ + Σ χ_k Y_k.
    pub offset: Vec<C64>,
    /// Positive roots in label coordinates, as tabulated.
    pub positive_roots: Vec<Vec<Q>>,
    /// Operative ε character (used for x^α and φ).
    pub epsilon: EpsilonTable,
    /// The ε table as tabulated, when it is recorded separately.
    pub epsilon_stated: Option<EpsilonTable>,
    /// Labelled functionals as tabulated, when they differ from `labels`.
    pub labels_stated: Option<Vec<Vec<C64>>>,
    pub caveat: Option<String>,
}

fn half_lattice() -> Vec<Vec<Q>> {
    vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(-1, 2)]]
}

fn fourpoint_roots() -> Vec<Vec<Q>> {
    vec![
        vec![q(1, 1), q(0, 1)],
        vec![q(0, 1), q(1, 1)],
        vec![q(1, 2), q(1, 2)],
        vec![q(1, 2), q(-1, 2)],
    ]
}

impl CartanSubsetSpec {
    pub fn algebra(&self) -> Algebra {
        Algebra::new(self.sig)
    }

    pub fn sigma(&self, alg: &Algebra) -> Involution {
        match self.kind {
            PairKind::FourPoint => alg.sigma_fourpoint(),
            PairKind::Defect { p_defect } => alg.sigma_defect(p_defect).expect("validated at catalog time"),
        }
    }

    pub fn rank(&self) -> usize {
        self.cprime.len()
    }

    pub fn cprime_c64(&self) -> Vec<Element<C64>> {
        self.cprime.iter().map(Element::<C64>::from_q).collect()
    }

    /// Y_k ∈ c'_ℂ dual to the labels: ε_j(Y_k) = δ_jk (c'-coordinates, one column per k).
    pub fn chi_directions(&self) -> DMatrix<C64> {
        let r = self.rank();
        let l = DMatrix::from_fn(r, r, |k, j| self.labels[k][j]);
        l.try_inverse().expect("labels independent")
    }

    /// c'-coordinates of X(χ).
    pub fn x_coords(&self, pt: &ChiPoint) -> Result<DVector<C64>> {
        let r = self.rank();
        if pt.chi.len() != r {
            return Err(Error::Dimension(format!("point has {} coordinates, rank is {r}", pt.chi.len())));
        }
        let y = self.chi_directions();
        Ok(DVector::from_column_slice(&self.offset) + y * DVector::from_column_slice(&pt.chi))
    }

    pub fn x_element(&self, pt: &ChiPoint) -> Result<Element<C64>> {
        let xc = self.x_coords(pt)?;
        let zs = self.cprime_c64();
        Ok(zs.iter().enumerate().fold(Element::zero(zs[0].dim()), |acc, (j, z)| acc.add(&z.scale(&xc[j]))))
    }

    /// ε_k(X(χ)) for each label k.
    pub fn label_values(&self, pt: &ChiPoint) -> Result<Vec<C64>> {
        let xc = self.x_coords(pt)?;
        Ok(self.labels.iter().map(|l| l.iter().zip(xc.iter()).map(|(a, b)| a * b).sum()).collect())
    }

    /// Functional values on c' of a root with label coordinates `coords`.
    pub fn functional_of(&self, coords: &[Q]) -> Vec<C64> {
        let r = self.rank();
        (0..r)
            .map(|j| coords.iter().zip(&self.labels).map(|(a, l)| l[j] * a.to_c64().re).sum())
            .collect()
    }

    /// All roots (both signs) in label coordinates.
    pub fn all_roots(&self) -> Vec<Vec<Q>> {
        let mut v = self.positive_roots.clone();
        v.extend(self.positive_roots.iter().map(|r| r.iter().map(|x| -x.clone()).collect::<Vec<Q>>()));
        v
    }

    /// Root decomposition of c' with labels matched.
    pub fn decompose(&self, seed: u64) -> Result<(Algebra, RootDecomposition)> {
        self.decompose_with(DecompositionOptions { seed, ..Default::default() })
    }

    pub fn decompose_with(&self, opts: DecompositionOptions) -> Result<(Algebra, RootDecomposition)> {
        let alg = self.algebra();
        let sigma = self.sigma(&alg);
        let mut dec = root_decomposition(&alg, &self.cprime_c64(), &sigma, opts)?;
        dec.match_labels(&self.labels, 4)?;
        Ok((alg, dec))
    }

    /// Ad(t) on g_ℂ as a matrix on the F-basis.
    pub fn ad_t(&self, alg: &Algebra) -> DMatrix<C64> {
        ad_group(alg, &self.t.map(|x| c(x, 0.0)))
    }

    /// φ = ε_α⁻¹ Ad(t) on each g_α and Ad(t) on g_0.
    pub fn phi(&self, alg: &Algebra, dec: &RootDecomposition) -> Result<DMatrix<C64>> {
        self.phi_with(alg, dec, &self.epsilon)
    }

    pub fn phi_with(&self, alg: &Algebra, dec: &RootDecomposition, eps: &EpsilonTable) -> Result<DMatrix<C64>> {
        let (v, owner) = dec.adapted_basis();
        let vinv = v.clone().try_inverse().ok_or_else(|| Error::Computation("adapted basis singular".into()))?;
        let mut diag = DMatrix::<C64>::zeros(v.ncols(), v.ncols());
        for (k, o) in owner.iter().enumerate() {
            diag[(k, k)] = match o {
                None => c(1.0, 0.0),
                Some(i) => {
                    let coords = dec.roots[*i].coords.as_ref().ok_or_else(|| Error::Computation("unmatched root".into()))?;
                    let e = eps.value(coords).ok_or_else(|| Error::Computation("root outside ε lattice".into()))?;
                    c(1.0, 0.0) / e
                }
            };
        }
        Ok(self.ad_t(alg) * v * diag * vinv)
    }

    pub fn epsilon_of(&self, coords: &[Q]) -> Result<C64> {
        self.epsilon
            .value(coords)
            .ok_or_else(|| Error::Validation(format!("{coords:?} not in the root lattice")))
    }
}

/// Ad(g) on the F-basis.
pub fn ad_group(alg: &Algebra, g: &DMatrix<C64>) -> DMatrix<C64> {
    let ginv = g.clone().try_inverse().expect("group element invertible");
    let dim = alg.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..dim {
        let fa: DMatrix<C64> = alg.to_matrix(&alg.basis_element::<C64>(a));
        let img = alg.from_matrix(&(g * fa * &ginv));
        m.set_column(a, &img.coeffs);
    }
    m
}

/// (χ₁, χ₂, …): coordinates of a parametrized point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiPoint {
    #[serde(serialize_with = "crate::json::ser_c64_vec")]
    pub chi: Vec<C64>,
}

impl ChiPoint {
    pub fn new(chi1: C64, chi2: C64) -> Self {
        ChiPoint { chi: vec![chi1, chi2] }
    }

    pub fn real(x: &[f64]) -> Self {
        ChiPoint { chi: x.iter().map(|v| c(*v, 0.0)).collect() }
    }

    /// χ₁, χ₂, (χ₁±χ₂)/2 ∉ iπℤ.
    pub fn in_domain(&self) -> bool {
        if self.chi.len() != 2 {
            return true;
        }
        let bad = |z: C64| z.re.abs() < 1e-12 && ((z.im / PI) - (z.im / PI).round()).abs() < 1e-12;
        let (a, b) = (self.chi[0], self.chi[1]);
        !(bad(a) || bad(b) || bad((a + b) / 2.0) || bad((a - b) / 2.0))
    }
}

fn t_phi_psi(alg: &Algebra, phi: f64, psi: f64) -> DMatrix<f64> {
    let d = alg.sig.d();
    let x = alg.f::<C64>(0, 1).scale(&c(phi, 0.0)).add(&alg.f::<C64>(d, d + 1).scale(&c(psi, 0.0)));
    exp_element(alg, &x).map(|z| snap(z.re))
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-14 {
        r
    } else {
        x
    }
}

fn elem(alg: &Algebra, terms: &[(usize, usize, i64)]) -> Element<Q> {
    terms
        .iter()
        .fold(Element::zero(alg.dim()), |acc, &(m, n, w)| acc.add(&alg.f::<Q>(m, n).scale(&Q::from_i64(w))))
}

fn lab(v: &[(f64, f64)]) -> Vec<C64> {
    v.iter().map(|&(a, b)| c(a, b)).collect()
}

/// The cataloged standard Cartan subsets.
pub fn catalog(sig: Signature, kind: PairKind) -> Result<Vec<CartanSubsetSpec>> {
    match kind {
        PairKind::FourPoint => fourpoint_catalog(sig),
        PairKind::Defect { p_defect } => defect_catalog(sig, p_defect),
    }
}

pub fn find_spec(sig: Signature, kind: PairKind, label: CartanLabel) -> Result<CartanSubsetSpec> {
    catalog(sig, kind)?
        .into_iter()
        .find(|s| s.label == label)
        .ok_or_else(|| Error::NotCataloged(format!("label {label} for {sig:?}")))
}

fn fourpoint_catalog(sig: Signature) -> Result<Vec<CartanSubsetSpec>> {
    let alg = Algebra::new(sig);
    let d = sig.d();
    let (dd, d1) = (d, d + 1);
    let id = DMatrix::<f64>::identity(sig.n(), sig.n());
    let base = |label, cprime, t: DMatrix<f64>, t_name: &str, labels, offset| CartanSubsetSpec {
        label,
        sig,
        kind: PairKind::FourPoint,
        cprime,
        t,
        t_name: t_name.into(),
        labels,
        offset,
        positive_roots: fourpoint_roots(),
        epsilon: EpsilonTable::trivial(half_lattice()),
        epsilon_stated: None,
        labels_stated: None,
        caveat: None,
    };
    match sig.q {
        0 => Ok(vec![base(
            CartanLabel::Euclid,
            vec![elem(&alg, &[(0, 1, 1)]), elem(&alg, &[(dd, d1, 1)])],
            id,
            "1",
            vec![lab(&[(0.0, 1.0), (1.0, 0.0)]), lab(&[(0.0, 1.0), (-1.0, 0.0)])],
            vec![c(-PI, 0.0), c(0.0, 0.0)],
        )]),
        1 => {
            let t0pi = t_phi_psi(&alg, 0.0, PI);
            let thalf = t_phi_psi(&alg, PI / 2.0, PI / 2.0);
            let z_mixed = vec![elem(&alg, &[(0, 1, 1), (dd, d1, 1)]), elem(&alg, &[(0, dd, 1), (1, d1, -1)])];
            let z_split = vec![elem(&alg, &[(0, dd, 1)]), elem(&alg, &[(1, d1, 1)])];
            let split_labels = vec![lab(&[(1.0, 0.0), (1.0, 0.0)]), lab(&[(1.0, 0.0), (-1.0, 0.0)])];
            let mut out = Vec::new();
            out.push(base(
                CartanLabel::Empty,
                vec![elem(&alg, &[(0, 1, 1)]), elem(&alg, &[(dd, d1, 1)])],
                id.clone(),
                "1",
                vec![lab(&[(0.0, 1.0), (0.0, 1.0)]), lab(&[(0.0, 1.0), (0.0, -1.0)])],
                vec![c(-PI, 0.0), c(0.0, 0.0)],
            ));
            out.push(base(
                CartanLabel::Zero,
                z_mixed.clone(),
                id.clone(),
                "1",
                vec![lab(&[(0.0, 2.0), (0.0, 0.0)]), lab(&[(0.0, 0.0), (2.0, 0.0)])],
                vec![c(-PI / 2.0, 0.0), c(0.0, -PI / 2.0)],
            ));
            let mut two = base(
                CartanLabel::Two,
                z_mixed,
                t0pi.clone(),
                "t_{0,pi}",
                vec![lab(&[(0.0, 0.0), (2.0, 0.0)]), lab(&[(0.0, 2.0), (0.0, 0.0)])],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            );
            two.epsilon_stated = Some(EpsilonTable { generators: half_lattice(), exponents: vec![2, 0] });
            out.push(two);
            out.push(base(
                CartanLabel::One,
                vec![elem(&alg, &[(0, 1, 1)]), elem(&alg, &[(2, d1, 1)])],
                id.clone(),
                "1",
                vec![lab(&[(0.0, 1.0), (1.0, 0.0)]), lab(&[(0.0, 1.0), (-1.0, 0.0)])],
                vec![c(-PI, 0.0), c(0.0, 0.0)],
            ));
            let mut onep = base(
                CartanLabel::OnePrime,
                vec![elem(&alg, &[(dd, d1, 1)]), elem(&alg, &[(0, dd - 1, 1)])],
                id.clone(),
                "1",
                vec![lab(&[(0.0, 1.0), (0.0, 1.0)]), lab(&[(0.0, 1.0), (0.0, -1.0)])],
                vec![c(-PI, 0.0), c(0.0, 0.0)],
            );
            onep.labels_stated = Some(vec![lab(&[(0.0, 1.0), (1.0, 0.0)]), lab(&[(0.0, 1.0), (-1.0, 0.0)])]);
            onep.caveat = Some(
                "for q = 1 the generator F_{0,d-1} is compact, so c' is a compact torus conjugate to the \
                 fundamental one; the stated functionals ia±b are not roots and the entry is labelled like C_empty"
                    .into(),
            );
            out.push(onep);
            out.push(base(
                CartanLabel::ZeroOne,
                z_split.clone(),
                id,
                "1",
                split_labels.clone(),
                vec![c(0.0, -PI), c(0.0, 0.0)],
            ));
            let mut zt = base(
                CartanLabel::ZeroTwo,
                z_split.clone(),
                thalf,
                "t_{pi/2,pi/2}",
                split_labels.clone(),
                vec![c(0.0, -PI / 2.0), c(0.0, PI / 2.0)],
            );
            zt.epsilon = EpsilonTable { generators: half_lattice(), exponents: vec![1, 3] };
            zt.epsilon_stated = Some(zt.epsilon.clone());
            out.push(zt);
            let mut ot = base(CartanLabel::OneTwo, z_split, t0pi, "t_{0,pi}", split_labels, vec![c(0.0, 0.0), c(0.0, 0.0)]);
            ot.epsilon = EpsilonTable { generators: half_lattice(), exponents: vec![2, 0] };
            ot.epsilon_stated = Some(EpsilonTable::trivial(half_lattice()));
            out.push(ot);
            Ok(out)
        }
        q => Err(Error::NotCataloged(format!("four-point Cartan subsets are cataloged for q ≤ 1 only (q = {q})"))),
    }
}

fn defect_catalog(sig: Signature, p: usize) -> Result<Vec<CartanSubsetSpec>> {
    if sig.q != 0 {
        return Err(Error::NotCataloged("defect pairs live in so(d+1,1): use q = 0".into()));
    }
    let d = sig.d();
    if p >= d {
        return Err(Error::InvalidSignature(format!("defect dimension p={p} must be below d={d}")));
    }
    let alg = Algebra::new(sig);
    let n = sig.n();
    let short = (d as i64 - 2 - 2 * p as i64).abs();
    let make = |label, gens: Vec<(usize, usize)>, t: DMatrix<f64>, t_name: &str| {
        let r = gens.len();
        let cprime: Vec<Element<Q>> = gens.iter().map(|&(a, b)| elem(&alg, &[(a, b, 1)])).collect();
        // e_j(Z_k) = s_j δ_jk, s_j = i for compact generators and 1 for boosts.
        let labels: Vec<Vec<C64>> = gens
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| {
                let s = if alg.eta[a] * alg.eta[b] == 1 { c(0.0, 1.0) } else { c(1.0, 0.0) };
                (0..r).map(|k| if k == j { s } else { c(0.0, 0.0) }).collect()
            })
            .collect();
        let unit = |i: usize| (0..r).map(|k| if k == i { q(1, 1) } else { q(0, 1) }).collect::<Vec<Q>>();
        let mut pos: Vec<Vec<Q>> = Vec::new();
        if short > 0 {
            for i in 0..r {
                pos.push(unit(i));
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                pos.push((0..r).map(|k| if k == i || k == j { q(1, 1) } else { q(0, 1) }).collect());
                pos.push((0..r).map(|k| if k == i { q(1, 1) } else if k == j { q(-1, 1) } else { q(0, 1) }).collect());
            }
        }
        CartanSubsetSpec {
            label,
            sig,
            kind: PairKind::Defect { p_defect: p },
            cprime,
            t,
            t_name: t_name.into(),
            labels,
            offset: vec![c(0.0, 0.0); r],
            positive_roots: pos,
            epsilon: EpsilonTable::trivial((0..r).map(unit).collect()),
            epsilon_stated: None,
            labels_stated: None,
            caveat: None,
        }
    };
    let id = DMatrix::<f64>::identity(n, n);
    if 2 * p < d - 1 {
        let mut gens: Vec<(usize, usize)> = (0..=p).map(|i| (i + 1, d - i)).collect();
        gens.push((0, d + 1));
        Ok(vec![make(CartanLabel::DefectFund, gens, id, "1")])
    } else {
        let fund: Vec<(usize, usize)> = (0..d - p).map(|i| (i, d - i)).collect();
        let mut c0: Vec<(usize, usize)> = (1..d - p).map(|j| (j, d - j)).collect();
        c0.push((0, d + 1));
        let tp = exp_element(&alg, &alg.f::<C64>(0, d).scale(&c(PI, 0.0))).map(|z| snap(z.re));
        Ok(vec![
            make(CartanLabel::DefectFund, fund, id.clone(), "1"),
            make(CartanLabel::DefectC(0), c0.clone(), id, "1"),
            make(CartanLabel::DefectCPrime(0), c0, tp, "exp(pi F_0_d)"),
        ])
    }
}

/// x = exp(X(χ))·t.
pub fn parametrize(spec: &CartanSubsetSpec, pt: &ChiPoint) -> Result<DMatrix<C64>> {
    let alg = spec.algebra();
    let xc = spec.x_coords(pt)?;
    let zs = spec.cprime_c64();
    // Generators commute, so the exponential factorizes over the c'-basis.
    let mut g = linalg::identity::<C64>(alg.n);
    for (j, z) in zs.iter().enumerate() {
        g *= exp_element(&alg, &z.scale(&xc[j]));
    }
    Ok(g * spec.t.map(|x| c(x, 0.0)))
}

/// As `parametrize`, but requires the point to lie in the closure of the spec's real locus.
pub fn parametrize_checked(spec: &CartanSubsetSpec, pt: &ChiPoint) -> Result<DMatrix<C64>> {
    if let Some(face) = spec.label.region() {
        if !crate::coords::in_closure_y(face, pt, 1e-12) {
            return Err(Error::Validation(format!("point outside the closure of Y_{face}")));
        }
    }
    parametrize(spec, pt)
}

/// x^α = ε_α exp(α(X)).
pub fn x_power(spec: &CartanSubsetSpec, pt: &ChiPoint, coords: &[Q]) -> Result<C64> {
    let eps = spec.epsilon_of(coords)?;
    let vals = spec.label_values(pt)?;
    let arg: C64 = coords.iter().zip(&vals).map(|(a, v)| v * a.to_c64().re).sum();
    Ok(eps * arg.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperbolicCoeffs {
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub coth: C64,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub csch_sq: C64,
    #[serde(serialize_with = "crate::json::ser_c64")]
    pub csch_sq_half: C64,
}

/// Coefficients from x^α: coth_α, csch²_α and the product-rule csch²_{α/2}.
pub fn coeffs_from_power(x: C64) -> Result<HyperbolicCoeffs> {
    let xi = c(1.0, 0.0) / x;
    let den = x - xi;
    if den.norm() < 1e-14 * (x.norm() + xi.norm()) {
        return Err(Error::Singular("x^α = x^{-α}".into()));
    }
    Ok(HyperbolicCoeffs {
        coth: (x + xi) / den,
        csch_sq: c(4.0, 0.0) / (den * den),
        csch_sq_half: (x + xi + 2.0) * 4.0 / (den * den),
    })
}

pub fn hyperbolic_coeffs(spec: &CartanSubsetSpec, pt: &ChiPoint, coords: &[Q]) -> Result<HyperbolicCoeffs> {
    coeffs_from_power(x_power(spec, pt, coords)?)
}

/// x^α ≠ x^{−α} for all roots.
pub fn is_regular(spec: &CartanSubsetSpec, pt: &ChiPoint) -> bool {
    spec.positive_roots.iter().all(|r| match x_power(spec, pt, r) {
        Ok(x) => {
            let xi = c(1.0, 0.0) / x;
            (x - xi).norm() > 1e-10 * (x.norm() + xi.norm())
        }
        Err(_) => false,
    })
}

impl CartanSubsetSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let alg = self.algebra();
        let gens: Vec<serde_json::Value> = self.cprime.iter().map(|z| crate::json::element_q(&alg, z)).collect();
        let eps: Vec<serde_json::Value> = self
            .epsilon
            .generators
            .iter()
            .zip(&self.epsilon.exponents)
            .map(|(g, e)| {
                serde_json::json!({
                    "generator": g.iter().map(crate::json::rational).collect::<Vec<_>>(),
                    "value": crate::json::c64(i_power(*e)),
                })
            })
            .collect();
        let stated = self.epsilon_stated.as_ref().map(|t| {
            t.exponents.iter().map(|e| crate::json::c64(i_power(*e))).collect::<Vec<_>>()
        });
        serde_json::json!({
            "label": self.label.to_string(),
            "signature": {"p": self.sig.p, "q": self.sig.q},
            "kind": match self.kind { PairKind::FourPoint => serde_json::json!("fourpoint"), PairKind::Defect{p_defect} => serde_json::json!({"defect": p_defect}) },
            "cprime_basis": gens,
            "t": crate::json::rmat(&self.t),
            "t_name": self.t_name,
            "labels": self.labels.iter().map(|l| crate::json::c64_vec(l)).collect::<Vec<_>>(),
            "offset": crate::json::c64_vec(&self.offset),
            "epsilon": eps,
            "epsilon_stated": stated,
            "caveat": self.caveat,
        })
    }
}

pub fn is_zero_c(z: C64) -> bool {
    z.is_zero()
}
