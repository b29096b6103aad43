//! Independent oracles built from explicit matrices, sharing no code paths
//! with the library beyond the basic matrix types.
#![allow(dead_code)]

use qplexkit::nalgebra::{DMatrix, DVector};
use qplexkit::Complex64;

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn shift(d: usize) -> M {
    // X|j⟩ = |j+1⟩
    M::from_fn(d, d, |i, j| if i == (j + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn clock(d: usize) -> M {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    M::from_fn(d, d, |i, j| if i == j { Complex64::from_polar(1.0, w * i as f64) } else { Complex64::new(0.0, 0.0) })
}

fn power(m: &M, k: usize) -> M {
    let mut out = M::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// X^p Z^q ψ for (p, q) in lexicographic order.
pub fn orbit(psi: &V) -> Vec<V> {
    let d = psi.len();
    let (x, z) = (shift(d), clock(d));
    let mut out = Vec::new();
    for p in 0..d {
        for q in 0..d {
            out.push(power(&x, p) * power(&z, q) * psi);
        }
    }
    out
}

/// Σ_ij A_ij B_ji
pub fn trace_product(a: &M, b: &M) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Σ_{(p,q)≠0} |⟨ψ|X^pZ^q|ψ⟩|⁴ for unit ψ built from x = (Re, Im) / |x|.
pub fn frame_potential_of(x: &[f64]) -> f64 {
    let d = x.len() / 2;
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let psi = V::from_fn(d, |k, _| Complex64::new(x[k] / n, x[d + k] / n));
    orbit(&psi).iter().skip(1).map(|v| psi.dotc(v).norm_sqr().powi(2)).sum()
}

/// SIC probabilities tr(ρ Π_k)/d from the explicit orbit.
pub fn sic_probabilities(rho: &M, fiducial: &V) -> Vec<f64> {
    let d = fiducial.len() as f64;
    orbit(fiducial).iter().map(|v| (v.adjoint() * rho * v)[(0, 0)].re / d).collect()
}
