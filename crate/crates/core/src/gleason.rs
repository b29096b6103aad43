//! Frame functions, regular (trace-form) fits, the qubit hemisphere
//! counterexample and POVM-extended feasibility.
//!
//! A frame function of weight W assigns values to unit vectors so that every
//! orthonormal basis sums to W. In d = 2 such functions need not come from a
//! density operator; once POVM effects must also be assigned additively the
//! loophole closes.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{QplexError, Result};
use crate::exec::Exec;
use crate::linalg::{
    c, coords_matrix, eigh, from_hermitian_coords, hermitian_coords, identity, lstsq, null_space,
    numerical_rank, projector, trace, CMat, CVec, RMat,
};
use crate::operator::{
    random_density_with, random_povm_with, random_pure_with, seeded_rng, DensityMatrix,
    HermitianOperator, Povm, PureState,
};
use crate::reference::{pauli_x, pauli_y, pauli_z, qubit_tetrahedron};
use crate::tol;

/// Anything that assigns a value to a unit vector.
pub trait FrameFunction: Sync {
    fn eval(&self, x: &PureState) -> f64;
}

impl<F: Fn(&PureState) -> f64 + Sync> FrameFunction for F {
    fn eval(&self, x: &PureState) -> f64 {
        self(x)
    }
}

/// f(x) = ⟨x|ρ|x⟩
#[derive(Debug, Clone)]
pub struct BornFrameFunction(pub DensityMatrix);

impl FrameFunction for BornFrameFunction {
    fn eval(&self, x: &PureState) -> f64 {
        x.expectation(self.0.matrix())
    }
}

#[derive(Debug, Clone)]
pub struct BasisSet {
    d: usize,
    bases: Vec<Vec<PureState>>,
}

impl BasisSet {
    pub fn new(d: usize, bases: Vec<Vec<PureState>>) -> Result<Self> {
        for basis in &bases {
            if basis.len() != d {
                return Err(QplexError::DimensionMismatch { expected: d, found: basis.len() });
            }
            for (i, a) in basis.iter().enumerate() {
                if a.dim() != d {
                    return Err(QplexError::DimensionMismatch { expected: d, found: a.dim() });
                }
                for b in &basis[i..] {
                    let g = a.inner(b).norm();
                    let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                    if (g - target).abs() > tol::BASIS_ORTHO {
                        return Err(QplexError::InvalidConfig(format!("basis vectors not orthonormal: |overlap| = {g}")));
                    }
                }
            }
        }
        Ok(Self { d, bases })
    }

    /// `count` Haar-random orthonormal bases; basis k uses RNG stream k.
    pub fn random(d: usize, count: usize, seed: u64, exec: Exec) -> Self {
        let bases = exec.map(count, |k| {
            let mut rng = seeded_rng(seed, k as u64);
            random_basis_with(d, &mut rng)
        });
        Self { d, bases }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[Vec<PureState>] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

/// Gram–Schmidt on d random Gaussian vectors.
pub fn random_basis_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<PureState> {
    let mut out: Vec<CVec> = Vec::with_capacity(d);
    while out.len() < d {
        let mut v = random_pure_with(d, rng).amplitudes().clone();
        for u in &out {
            let p = u.dotc(&v);
            v -= u * p;
        }
        let n = v.norm();
        if n > 1e-6 {
            out.push(v / c(n, 0.0));
        }
    }
    out.into_iter().map(|v| PureState::normalized(v).expect("nonzero")).collect()
}

/// max over bases of |Σ_i f(x_i) − W|
pub fn check_frame_property<F: FrameFunction + ?Sized>(f: &F, bases: &BasisSet, weight: f64, exec: Exec) -> f64 {
    exec.map(bases.len(), |k| {
        let sum: f64 = bases.bases()[k].iter().map(|x| f.eval(x)).sum();
        (sum - weight).abs()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct FrameFunctionSample {
    d: usize,
    entries: Vec<(PureState, f64)>,
    weight: f64,
    /// Start offsets of complete bases recorded in `entries`.
    basis_starts: Vec<usize>,
}

impl FrameFunctionSample {
    /// Values on isolated vectors; no basis sums to check.
    pub fn from_vectors<F: FrameFunction + ?Sized>(f: &F, vectors: Vec<PureState>, weight: f64) -> Result<Self> {
        let d = vectors.first().map_or(0, PureState::dim);
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(QplexError::DimensionMismatch { expected: d, found: v.dim() });
        }
        let entries = vectors.into_iter().map(|x| (x.clone(), f.eval(&x))).collect();
        Ok(Self { d, entries, weight, basis_starts: Vec::new() })
    }

    /// Values on every vector of every basis. Fails if some basis sum misses
    /// `weight` by more than `tol::FRAME_SUM`.
    pub fn from_bases<F: FrameFunction + ?Sized>(f: &F, bases: &BasisSet, weight: f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(bases.len() * bases.dim());
        let mut basis_starts = Vec::with_capacity(bases.len());
        for basis in bases.bases() {
            basis_starts.push(entries.len());
            let mut sum = 0.0;
            for x in basis {
                let v = f.eval(x);
                sum += v;
                entries.push((x.clone(), v));
            }
            if (sum - weight).abs() > tol::FRAME_SUM {
                return Err(QplexError::InvalidConfig(format!("basis values sum to {sum}, expected {weight}")));
            }
        }
        Ok(Self { d: bases.dim(), entries, weight, basis_starts })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[(PureState, f64)] {
        &self.entries
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn basis_count(&self) -> usize {
        self.basis_starts.len()
    }
}

/// Least-squares T minimizing Σ(⟨x|T|x⟩ − f(x))², with the root-mean-square
/// error as residual.
pub fn fit_regular_operator(sample: &FrameFunctionSample) -> Result<(HermitianOperator, f64)> {
    let d = sample.dim();
    let required = d * d;
    let projs: Vec<CMat> = sample.entries().iter().map(|(x, _)| projector(x.amplitudes())).collect();
    let refs: Vec<&CMat> = projs.iter().collect();
    let a = if refs.is_empty() { RMat::zeros(0, required) } else { coords_matrix(&refs) };
    let rank = if refs.is_empty() { 0 } else { numerical_rank(&a) };
    if rank < required {
        return Err(QplexError::InsufficientSpan { rank, required });
    }
    let b = DVector::from_iterator(sample.entries().len(), sample.entries().iter().map(|(_, v)| *v));
    let (t, _) = lstsq(&a, &b);
    let resid = &a * &t - &b;
    let rms = (resid.norm_squared() / b.len() as f64).sqrt();
    let op = HermitianOperator::new(from_hermitian_coords(t.as_slice(), d))?;
    Ok((op, rms))
}

/// Bloch vector of a qubit pure state.
pub fn bloch_vector(x: &PureState) -> [f64; 3] {
    let a = x.amplitudes()[0];
    let b = x.amplitudes()[1];
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The qubit hemisphere assignment: 1 on the open hemisphere around `pole`,
/// 0 on the opposite one.
///
/// Equatorial directions (|b·n| ≤ `tol::EQUATOR`) are split by the sign of
/// b·e₁, then of b·e₂, where e₁ is x̂ made perpendicular to n (ŷ when n ∥ x̂)
/// and e₂ = n × e₁. The rule is odd under b → −b, so antipodal pairs, i.e.
/// orthonormal bases, always sum to exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HemisphereFunction {
    pole: [f64; 3],
    e1: [f64; 3],
    e2: [f64; 3],
}

impl HemisphereFunction {
    pub fn new(pole: [f64; 3]) -> Result<Self> {
        let norm = dot3(&pole, &pole).sqrt();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(QplexError::NotNormalized { norm });
        }
        let mut e1 = [1.0, 0.0, 0.0];
        let along = dot3(&e1, &pole);
        let mut perp = [e1[0] - along * pole[0], e1[1] - along * pole[1], e1[2] - along * pole[2]];
        if dot3(&perp, &perp).sqrt() < 1e-6 {
            e1 = [0.0, 1.0, 0.0];
            let along = dot3(&e1, &pole);
            perp = [e1[0] - along * pole[0], e1[1] - along * pole[1], e1[2] - along * pole[2]];
        }
        let pn = dot3(&perp, &perp).sqrt();
        let e1 = [perp[0] / pn, perp[1] / pn, perp[2] / pn];
        let e2 = [
            pole[1] * e1[2] - pole[2] * e1[1],
            pole[2] * e1[0] - pole[0] * e1[2],
            pole[0] * e1[1] - pole[1] * e1[0],
        ];
        Ok(Self { pole, e1, e2 })
    }

    pub fn pole(&self) -> [f64; 3] {
        self.pole
    }

    /// Value at a Bloch direction.
    pub fn at_direction(&self, b: &[f64; 3]) -> f64 {
        for axis in [&self.pole, &self.e1, &self.e2] {
            let s = dot3(b, axis);
            if s > tol::EQUATOR {
                return 1.0;
            }
            if s < -tol::EQUATOR {
                return 0.0;
            }
        }
        // b ≈ 0 never happens for unit vectors
        0.5
    }
}

impl FrameFunction for HemisphereFunction {
    fn eval(&self, x: &PureState) -> f64 {
        self.at_direction(&bloch_vector(x))
    }
}

/// Additive extension to qubit effects: E = (tr E)/2·I + m·σ/2 gets
/// f(m/|m|)·tr(E). Multiples of the identity get tr(E)/2.
pub fn hemisphere_effect_values(f: &HemisphereFunction, povm: &Povm) -> Result<Vec<f64>> {
    if povm.dim() != 2 {
        return Err(QplexError::DimensionMismatch { expected: 2, found: povm.dim() });
    }
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    Ok(povm
        .matrices()
        .into_iter()
        .map(|e| {
            let t = trace(e).re;
            let m = [trace(&(e * &sx)).re, trace(&(e * &sy)).re, trace(&(e * &sz)).re];
            let n = dot3(&m, &m).sqrt();
            if n < tol::EQUATOR {
                t / 2.0
            } else {
                f.at_direction(&[m[0] / n, m[1] / n, m[2] / n]) * t
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Root-sum-of-squares mismatch of the best unit-trace Hermitian fit.
    pub residual: f64,
    pub min_eigenvalue: f64,
    #[serde(skip)]
    pub operator: CMat,
}

/// Is there a density ρ with tr(ρ E_j) = Q_j for every listed effect?
///
/// Least squares over unit-trace Hermitian T, followed by an eigenvalue check.
/// When the fit is not unique, λ_min is maximized over the whole solution set
/// before deciding.
pub fn povm_gleason_feasibility(assignments: &[(Povm, Vec<f64>)]) -> Result<FeasibilityReport> {
    let d = assignments.first().map_or(0, |(p, _)| p.dim());
    if d == 0 {
        return Err(QplexError::EmptyPovm);
    }
    let mut effects = Vec::new();
    let mut values = Vec::new();
    for (povm, q) in assignments {
        if povm.dim() != d {
            return Err(QplexError::DimensionMismatch { expected: d, found: povm.dim() });
        }
        if q.len() != povm.len() {
            return Err(QplexError::DimensionMismatch { expected: povm.len(), found: q.len() });
        }
        effects.extend(povm.matrices());
        values.extend_from_slice(q);
    }
    let id = identity(d);
    let traceless = null_space(&RMat::from_row_slice(1, d * d, &hermitian_coords(&id)));
    let base = &id / c(d as f64, 0.0);
    let coords = coords_matrix(&effects);
    let a = &coords * &traceless;
    let b = DVector::from_iterator(values.len(), values.iter().zip(&effects).map(|(q, e)| q - trace(e).re / d as f64));
    let (t, _) = lstsq(&a, &b);
    let residual = (&a * &t - &b).norm();

    let to_operator = |x: &DVector<f64>| -> CMat { from_hermitian_coords(x.as_slice(), d) };
    let x0 = DVector::from_vec(hermitian_coords(&base)) + &traceless * &t;
    let mut best = to_operator(&x0);
    let mut best_min = eigh(&best).0[0];
    if best_min < 0.0 {
        let free = &traceless * null_space(&a);
        if free.ncols() > 0 {
            let dirs: Vec<CMat> = (0..free.ncols()).map(|k| to_operator(&free.column(k).into_owned())).collect();
            let (lam, op) = max_min_eigenvalue(&best, &dirs);
            if lam > best_min {
                best_min = lam;
                best = op;
            }
        }
    }
    Ok(FeasibilityReport {
        feasible: residual < tol::FEASIBLE_RESIDUAL && best_min >= -tol::FEASIBLE_EIGEN,
        residual,
        min_eigenvalue: best_min,
        operator: best,
    })
}

/// max over s of λ_min(base + Σ s_i G_i), by a log-det barrier method on
/// `M = base + Σ s_i G_i − tI ≻ 0` maximizing t. Returns the best λ_min found
/// and its operator. Stops early once λ_min ≥ 0. Handles the nonsmooth case of
/// a repeated minimal eigenvalue, where first-order ascent stalls.
///
/// λ_min must be bounded above on the family (true for unit-trace families).
pub fn max_min_eigenvalue(base: &CMat, dirs: &[CMat]) -> (f64, CMat) {
    let d = base.nrows();
    let n = dirs.len();
    let operator_at = |s: &[f64]| -> CMat {
        dirs.iter().zip(s).fold(base.clone(), |acc, (g, w)| acc + g * c(*w, 0.0))
    };
    let shifted = |s: &[f64], t: f64| -> CMat { operator_at(s) - identity(d) * c(t, 0.0) };
    // eigen-based rather than Cholesky: the PD test must be exact in sign
    let inverse_if_pd = |m: &CMat| -> Option<CMat> {
        let (vals, vecs) = eigh(m);
        (vals[0] > 0.0).then(|| {
            let inv = CVec::from_iterator(d, vals.iter().map(|v| c(1.0 / v, 0.0)));
            &vecs * CMat::from_diagonal(&inv) * vecs.adjoint()
        })
    };

    let mut s = vec![0.0; n];
    let mut best_lam = eigh(base).0[0];
    let mut best = base.clone();
    let mut t = best_lam - 1.0;
    let mut mu = 1.0;
    let neg_id = identity(d) * c(-1.0, 0.0);
    while mu > 1e-13 {
        for _ in 0..60 {
            let Some(minv) = inverse_if_pd(&shifted(&s, t)) else { break };
            let gens: Vec<&CMat> = dirs.iter().chain(std::iter::once(&neg_id)).collect();
            let mg: Vec<CMat> = gens.iter().map(|g| &minv * *g).collect();
            let mut grad = DVector::from_iterator(n + 1, mg.iter().map(|x| trace(x).re));
            grad[n] += 1.0 / mu;
            // negated Hessian: tr(M⁻¹G_i M⁻¹G_j)
            let mut h = RMat::zeros(n + 1, n + 1);
            for i in 0..=n {
                for j in i..=n {
                    let v = crate::linalg::trace_product(&mg[i], &mg[j]).re;
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            let step = match h.clone().cholesky() {
                Some(ch) => ch.solve(&grad),
                None => lstsq(&h, &grad).0,
            };
            let decrement = grad.dot(&step);
            if decrement < 1e-12 {
                break;
            }
            let phi = |s: &[f64], t: f64| -> Option<f64> {
                let vals = eigh(&shifted(s, t)).0;
                (vals[0] > 0.0).then(|| t / mu + vals.iter().map(|v| v.ln()).sum::<f64>())
            };
            let current = phi(&s, t).expect("iterate is strictly feasible");
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-12 {
                let ns: Vec<f64> = s.iter().zip(step.iter()).map(|(a, b)| a + alpha * b).collect();
                let nt = t + alpha * step[n];
                if let Some(v) = phi(&ns, nt) {
                    if v >= current + 0.25 * alpha * decrement {
                        s = ns;
                        t = nt;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let op = operator_at(&s);
        let lam = eigh(&op).0[0];
        if lam > best_lam {
            best_lam = lam;
            best = op;
        }
        if best_lam >= 0.0 {
            break;
        }
        mu *= 0.1;
    }
    (best_lam, best)
}

/// Exact outcome probabilities of `povm` for `rho`.
pub fn born_values(rho: &DensityMatrix, povm: &Povm) -> Vec<f64> {
    povm.matrices().into_iter().map(|e| crate::linalg::trace_product(rho.matrix(), e).re).collect()
}

/// Hidden ρ plus `povms` random POVMs with their exact Born values.
pub fn planted_instance(d: usize, povms: usize, seed: u64) -> (DensityMatrix, Vec<(Povm, Vec<f64>)>) {
    let mut rng = seeded_rng(seed, 0);
    let rho = random_density_with(d, &mut rng);
    let assignments = (0..povms)
        .map(|_| {
            let outcomes = rng.random_range(2..=d * d);
            let p = random_povm_with(d, outcomes, &mut rng);
            let q = born_values(&rho, &p);
            (p, q)
        })
        .collect();
    (rho, assignments)
}

#[derive(Debug, Clone, Serialize)]
pub struct HemisphereReport {
    pub pole: [f64; 3],
    pub frame_deviation: f64,
    pub fit_residual: f64,
    pub povm_feasible: bool,
    pub povm_residual: f64,
}

/// The full qubit counterexample for one pole: frame property on `bases`
/// random bases, a regular fit on `fit_samples` random directions, and POVM
/// feasibility of 50 von Neumann bases plus the tetrahedron.
pub fn hemisphere_experiment(
    pole: [f64; 3],
    bases: usize,
    fit_samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<HemisphereReport> {
    let f = HemisphereFunction::new(pole)?;
    let set = BasisSet::random(2, bases, seed, exec);
    let frame_deviation = check_frame_property(&f, &set, 1.0, exec);

    let mut rng = seeded_rng(seed, u64::MAX);
    let dirs: Vec<PureState> = (0..fit_samples).map(|_| random_pure_with(2, &mut rng)).collect();
    let sample = FrameFunctionSample::from_vectors(&f, dirs, 1.0)?;
    let (_, fit_residual) = fit_regular_operator(&sample)?;

    let vn = BasisSet::random(2, 50, seed ^ 0x9e37_79b9_7f4a_7c15, exec);
    let mut assignments: Vec<(Povm, Vec<f64>)> = vn
        .bases()
        .iter()
        .map(|b| {
            let p = Povm::from_basis(b)?;
            let q = b.iter().map(|x| f.eval(x)).collect();
            Ok((p, q))
        })
        .collect::<Result<_>>()?;
    let tetra = qubit_tetrahedron().reference().povm().clone();
    let q = hemisphere_effect_values(&f, &tetra)?;
    assignments.push((tetra, q));
    let feas = povm_gleason_feasibility(&assignments)?;
    Ok(HemisphereReport { pole, frame_deviation, fit_residual, povm_feasible: feas.feasible, povm_residual: feas.residual })
}

/// Uniformly random unit 3-vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    bloch_vector(&random_pure_with(2, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::operator::{random_density, random_pure};

    #[test]
    fn born_is_frame_function() {
        let rho = random_density(3, 2);
        let bases = BasisSet::random(3, 200, 1, Exec::Parallel);
        assert!(check_frame_property(&BornFrameFunction(rho), &bases, 1.0, Exec::Sequential) < 1e-12);
    }

    #[test]
    fn constant_is_frame_function() {
        let bases = BasisSet::random(4, 50, 1, Exec::Sequential);
        assert_eq!(check_frame_property(&|_: &PureState| 0.25, &bases, 1.0, Exec::Sequential), 0.0);
    }

    #[test]
    fn basis_set_validation() {
        let good = BasisSet::new(2, vec![vec![PureState::basis(2, 0), PureState::basis(2, 1)]]);
        assert!(good.is_ok());
        let bad = BasisSet::new(2, vec![vec![PureState::basis(2, 0), PureState::basis(2, 0)]]);
        assert!(bad.is_err());
        let random = BasisSet::random(3, 5, 0, Exec::Sequential);
        assert!(BasisSet::new(3, random.bases().to_vec()).is_ok());
    }

    #[test]
    fn hemisphere_examples() {
        let f = HemisphereFunction::new([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.eval(&PureState::basis(2, 0)), 1.0);
        assert_eq!(f.eval(&PureState::basis(2, 1)), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let minus = PureState::new(vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
        assert_eq!(f.eval(&plus), 1.0);
        assert_eq!(f.eval(&minus), 0.0);
        let i_plus = PureState::new(vec![c(h, 0.0), c(0.0, h)]).unwrap();
        let i_minus = PureState::new(vec![c(h, 0.0), c(0.0, -h)]).unwrap();
        assert_eq!(f.eval(&i_plus) + f.eval(&i_minus), 1.0);
    }

    #[test]
    fn hemisphere_pole_along_x() {
        let f = HemisphereFunction::new([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.at_direction(&[0.0, 1.0, 0.0]) + f.at_direction(&[0.0, -1.0, 0.0]), 1.0);
        assert_eq!(f.at_direction(&[0.0, 0.0, 1.0]) + f.at_direction(&[0.0, 0.0, -1.0]), 1.0);
        assert!(HemisphereFunction::new([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn hemisphere_passes_frame_check() {
        let f = HemisphereFunction::new([0.0, 0.0, 1.0]).unwrap();
        let bases = BasisSet::random(2, 2000, 3, Exec::Parallel);
        assert!(check_frame_property(&f, &bases, 1.0, Exec::Parallel) < 1e-12);
    }

    #[test]
    fn fit_recovers_born() {
        let rho = random_density(3, 8);
        let vecs: Vec<PureState> = (0..40).map(|k| random_pure(3, 100 + k)).collect();
        let sample = FrameFunctionSample::from_vectors(&BornFrameFunction(rho.clone()), vecs, 1.0).unwrap();
        let (t, residual) = fit_regular_operator(&sample).unwrap();
        assert!(residual < 1e-10);
        assert!(max_abs_diff(t.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn fit_constant() {
        let vecs: Vec<PureState> = (0..20).map(|k| random_pure(2, k)).collect();
        let sample = FrameFunctionSample::from_vectors(&|_: &PureState| 0.5, vecs, 1.0).unwrap();
        let (t, residual) = fit_regular_operator(&sample).unwrap();
        assert!(residual < 1e-12);
        assert!(max_abs_diff(t.matrix(), &(identity(2) * c(0.5, 0.0))) < 1e-12);
    }

    #[test]
    fn fit_needs_span() {
        let vecs = vec![PureState::basis(2, 0), PureState::basis(2, 1)];
        let sample = FrameFunctionSample::from_vectors(&|_: &PureState| 0.5, vecs, 1.0).unwrap();
        assert!(matches!(
            fit_regular_operator(&sample),
            Err(QplexError::InsufficientSpan { rank: 2, required: 4 })
        ));
    }

    #[test]
    fn hemisphere_fit_fails() {
        let f = HemisphereFunction::new([0.0, 0.0, 1.0]).unwrap();
        let vecs: Vec<PureState> = (0..500).map(|k| random_pure(2, k)).collect();
        let sample = FrameFunctionSample::from_vectors(&f, vecs, 1.0).unwrap();
        let (_, residual) = fit_regular_operator(&sample).unwrap();
        assert!(residual > 0.1, "{residual}");
    }

    #[test]
    fn from_bases_checks_sums() {
        let bases = BasisSet::random(2, 10, 0, Exec::Sequential);
        assert!(FrameFunctionSample::from_bases(&|_: &PureState| 0.3, &bases, 1.0).is_err());
        let s = FrameFunctionSample::from_bases(&|_: &PureState| 0.5, &bases, 1.0).unwrap();
        assert_eq!(s.basis_count(), 10);
        assert_eq!(s.entries().len(), 20);
    }

    #[test]
    fn planted_is_feasible() {
        let (rho, assignments) = planted_instance(3, 20, 5);
        let r = povm_gleason_feasibility(&assignments).unwrap();
        assert!(r.feasible);
        assert!(max_abs_diff(&r.operator, rho.matrix()) < 1e-8);
    }

    #[test]
    fn trivial_povm_is_feasible() {
        let r = povm_gleason_feasibility(&[(Povm::trivial(2), vec![1.0])]).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn tetrahedron_extension_values() {
        let f = HemisphereFunction::new([0.0, 0.0, 1.0]).unwrap();
        let v = hemisphere_effect_values(&f, qubit_tetrahedron().reference().povm()).unwrap();
        assert_eq!(v.iter().sum::<f64>(), 1.0);
        assert_eq!(v.iter().filter(|&&x| x == 0.5).count(), 2);
    }

    #[test]
    fn hemisphere_with_povms_is_infeasible() {
        let r = hemisphere_experiment([0.0, 0.0, 1.0], 1000, 500, 3, Exec::Parallel).unwrap();
        assert!(r.frame_deviation < 1e-12);
        assert!(r.fit_residual > 0.1);
        assert!(!r.povm_feasible);
    }

    #[test]
    fn underdetermined_pure_state_is_feasible() {
        // Least-squares minimum-norm fit is indefinite here; only the
        // eigenvalue maximization over the solution set finds the planted state.
        let psi = random_pure(3, 75);
        let rho = DensityMatrix::from_pure(&psi);
        let assignments: Vec<(Povm, Vec<f64>)> = (0..2)
            .map(|k| {
                let p = crate::operator::random_povm(3, 3, 1000 + 75 * 7 + k);
                let q = born_values(&rho, &p);
                (p, q)
            })
            .collect();
        let r = povm_gleason_feasibility(&assignments).unwrap();
        assert!(r.feasible, "{}", r.min_eigenvalue);
    }

    #[test]
    fn max_min_eigenvalue_on_segment() {
        // diag(1/2, −1/2) + s·diag(−1, 1) peaks at s = 1/2 with λ_min = 0
        let base = crate::operator::diag(&[0.5, -0.5]);
        let dir = crate::operator::diag(&[-1.0, 1.0]);
        let (lam, op) = max_min_eigenvalue(&base, &[dir]);
        assert!(lam.abs() < 1e-9, "{lam}");
        assert!((op[(0, 0)].re - op[(1, 1)].re).abs() < 1e-6);
    }
}
