//! Small dense linear algebra shared by the exact and floating backends.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::scalar::{Field, C64};

/// Reduced row echelon form with magnitude pivoting. Returns the pivot columns.
pub fn rref<S: Field>(m: &DMatrix<S>, tol: f64) -> (DMatrix<S>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let mut best = None;
        let mut best_mag = 0.0;
        for i in r..rows {
            let v = &a[(i, col)];
            if !v.negligible(tol) {
                let mg = v.mag();
                if best.is_none() || (!S::EXACT && mg > best_mag) {
                    best = Some(i);
                    best_mag = mg;
                    if S::EXACT {
                        break;
                    }
                }
            }
        }
        let Some(p) = best else { continue };
        a.swap_rows(p, r);
        let inv = S::one() / a[(r, col)].clone();
        for j in 0..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[(i, col)].is_zero() {
                let f = a[(i, col)].clone();
                for j in 0..cols {
                    let v = a[(r, j)].clone() * f.clone();
                    a[(i, j)] = a[(i, j)].clone() - v;
                }
            }
        }
        if !S::EXACT {
            for i in 0..rows {
                if i != r {
                    a[(i, col)] = S::zero();
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel via echelon form.
pub fn kernel<S: Field>(m: &DMatrix<S>, tol: f64) -> Vec<DVector<S>> {
    let cols = m.ncols();
    let (a, pivots) = rref(m, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = DVector::from_element(cols, S::zero());
            v[f] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(r, f)].clone();
            }
            v
        })
        .collect()
}

pub fn rank<S: Field>(m: &DMatrix<S>, tol: f64) -> usize {
    rref(m, tol).1.len()
}

/// Gauss–Jordan inverse; `None` when singular.
pub fn inverse<S: Field>(m: &DMatrix<S>, tol: f64) -> Option<DMatrix<S>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut aug = DMatrix::from_element(n, 2 * n, S::zero());
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = S::one();
    }
    let (r, pivots) = rref(&aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.view((0, n), (n, n)).into_owned())
}

/// Solve `m x = b` for square nonsingular `m`.
pub fn solve<S: Field>(m: &DMatrix<S>, b: &DMatrix<S>, tol: f64) -> Option<DMatrix<S>> {
    Some(mat_mul(&inverse(m, tol)?, b))
}

/// Multiplication that does not lean on `Copy` scalars.
pub fn mat_mul<S: Field>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::from_element(a.nrows(), b.ncols(), S::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.ncols() {
                let v = aik.clone() * b[(k, j)].clone();
                out[(i, j)] = out[(i, j)].clone() + v;
            }
        }
    }
    out
}

pub fn mat_add<S: Field>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].clone() + b[(i, j)].clone())
}

pub fn mat_sub<S: Field>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].clone() - b[(i, j)].clone())
}

pub fn mat_scale<S: Field>(a: &DMatrix<S>, s: &S) -> DMatrix<S> {
    a.map(|x| x * s.clone())
}

pub fn identity<S: Field>(n: usize) -> DMatrix<S> {
    DMatrix::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
}

pub fn zeros<S: Field>(r: usize, c: usize) -> DMatrix<S> {
    DMatrix::from_element(r, c, S::zero())
}

pub fn trace<S: Field>(a: &DMatrix<S>) -> S {
    (0..a.nrows()).fold(S::zero(), |acc, i| acc + a[(i, i)].clone())
}

/// Kronecker product.
pub fn kron<S: Field>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)].clone() * b[(i % br, j % bc)].clone()
    })
}

pub fn max_abs<S: Field>(a: &DMatrix<S>) -> f64 {
    a.iter().map(|x| x.mag()).fold(0.0, f64::max)
}

pub fn to_c64<S: Field>(a: &DMatrix<S>) -> DMatrix<C64> {
    a.map(|x| x.to_c64())
}

/// Numerical right kernel from the SVD, threshold relative to the largest singular value.
pub fn svd_kernel(m: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { C64::one() } else { C64::zero() }))
            .collect();
    }
    // Pad to at least n rows so that V is square.
    let mut mm = m.clone();
    if mm.nrows() < n {
        mm = mm.resize_vertically(n, C64::zero());
    }
    let svd = mm.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thresh = rel_tol * smax.max(1.0);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= thresh {
            out.push(DVector::from_fn(n, |j, _| vt[(k, j)].conj()));
        }
    }
    out
}

/// Number of singular values above a relative threshold.
pub fn svd_rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|v| **v > rel_tol * smax.max(1.0)).count()
}

/// Orthonormal basis for the column span (numerical).
pub fn column_basis(m: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    if m.ncols() == 0 {
        return vec![];
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > rel_tol * smax.max(1e-300))
        .map(|(k, _)| u.column(k).into_owned())
        .collect()
}

/// General matrix exponential (scaling and squaring Padé, via nalgebra).
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.clone().exp()
}

pub fn from_columns(cols: &[DVector<C64>], nrows: usize) -> DMatrix<C64> {
    if cols.is_empty() {
        return DMatrix::zeros(nrows, 0);
    }
    DMatrix::from_columns(cols)
}
