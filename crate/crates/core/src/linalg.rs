//! Small dense helpers on top of nalgebra.
//!
//! Real SVDs go through faer: nalgebra's bidiagonal SVD returns inaccurate
//! factors for rank-deficient matrices with repeated zero singular values,
//! which is exactly the shape of stacked POVM coordinate systems.
//!
//! Hermitian operators on C^d are identified with R^(d²) through the
//! orthonormal (Hilbert–Schmidt) coordinates of [`hermitian_coords`]:
//! diagonal entries, then √2·Re and √2·Im of each upper-triangular entry.
//! In these coordinates `tr(AB) = coords(A) · coords(B)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// max |A_ij − conj(A_ji)|
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the Hermitian part of `m` is used.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigvalsh(m)[0]
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_real(a: &RMat, b: &RMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// tr(AB) without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn hermitian_coords(m: &CMat) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    out
}

pub fn from_hermitian_coords(coords: &[f64], d: usize) -> CMat {
    assert_eq!(coords.len(), d * d, "coordinate vector has wrong length");
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c(coords[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c(s * coords[k], s * coords[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Rows are the Hermitian coordinates of each operator.
pub fn coords_matrix(ops: &[&CMat]) -> RMat {
    let d = ops.first().map(|m| m.nrows()).unwrap_or(0);
    let rows: Vec<Vec<f64>> = ops.iter().map(|m| hermitian_coords(m)).collect();
    RMat::from_fn(ops.len(), d * d, |i, j| rows[i][j])
}

struct FullSvd {
    u: RMat,
    /// Descending.
    s: Vec<f64>,
    v: RMat,
}

fn full_svd(m: &RMat) -> FullSvd {
    let fm = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = fm.svd().expect("SVD of a finite matrix converges");
    let (u, v) = (svd.U(), svd.V());
    let k = m.nrows().min(m.ncols());
    let s = svd.S().column_vector();
    FullSvd {
        u: RMat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s: (0..k).map(|i| s[i]).collect(),
        v: RMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    }
}

fn rank_cutoff(s: &[f64]) -> f64 {
    crate::tol::RANK_REL * s.first().copied().unwrap_or(0.0)
}

pub fn singular_values(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    full_svd(m).s
}

/// Number of singular values above `RANK_REL` times the largest.
pub fn numerical_rank(m: &RMat) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > crate::tol::RANK_REL * top).count(),
        _ => 0,
    }
}

/// Moore–Penrose pseudoinverse of a symmetric positive semidefinite matrix,
/// keeping exactly the `rank` largest eigen-directions.
pub fn psd_pinv(g: &RMat, rank: usize) -> RMat {
    let n = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out = RMat::zeros(n, n);
    for &k in order.iter().take(rank) {
        let v = eig.eigenvectors.column(k);
        out += (v * v.transpose()) / eig.eigenvalues[k];
    }
    out
}

/// Minimum-norm least-squares solution of `a x ≈ b` plus the numerical rank of `a`.
pub fn lstsq(a: &RMat, b: &DVector<f64>) -> (DVector<f64>, usize) {
    if a.nrows() == 0 || a.ncols() == 0 {
        return (DVector::zeros(a.ncols()), 0);
    }
    let FullSvd { u, s, v } = full_svd(a);
    let cutoff = rank_cutoff(&s);
    let mut x = DVector::zeros(a.ncols());
    let mut rank = 0;
    for (k, &sk) in s.iter().enumerate() {
        if sk <= cutoff || sk == 0.0 {
            continue;
        }
        rank += 1;
        let coef = u.column(k).dot(b) / sk;
        x += v.column(k) * coef;
    }
    (x, rank)
}

/// Orthonormal basis of the null space of `a` (columns), using the same
/// cutoff as [`lstsq`].
pub fn null_space(a: &RMat) -> RMat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return RMat::identity(n, n);
    }
    let FullSvd { s, v, .. } = full_svd(a);
    let cutoff = rank_cutoff(&s);
    let rank = s.iter().filter(|&&x| x > cutoff && x > 0.0).count();
    v.columns(rank, n - rank).into_owned()
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrt_hpd(m: &CMat) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| c(1.0 / x.sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}
