//! SIC fiducial search.
//!
//! Minimizes the Weyl–Heisenberg frame potential
//! `F(ψ) = Σ_{(p,q)≠(0,0)} |⟨ψ|X^p Z^q|ψ⟩|⁴` over the unit sphere. Since
//! `Σ_{(p,q)≠(0,0)} |⟨ψ|X^p Z^q|ψ⟩|² = d − 1` for every unit ψ, F is bounded
//! below by `(d−1)/(d+1)` with equality exactly when all overlaps equal
//! `1/(d+1)`, i.e. when the orbit is a SIC.

use serde::{Deserialize, Serialize};

use crate::error::{QplexError, Result};
use crate::exec::Exec;
use crate::linalg::{self, c, lstsq, CMat, CVec, RMat};
use nalgebra::DVector;
use crate::operator::{random_pure_with, seeded_rng, PureState};
use crate::reference::{displace, displace_adjoint, wh_sic_from_fiducial, SicPovm};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquiangularReport {
    pub d: usize,
    pub n: usize,
    /// max over m≠n of ||⟨ψ_m|ψ_n⟩|² − 1/(d+1)|
    pub deviation: f64,
    pub min_overlap: f64,
    pub max_overlap: f64,
}

/// Equiangularity of d² candidate effects, assumed rank one with trace 1/d,
/// using `|⟨ψ_m|ψ_n⟩|² = d²·tr(E_m E_n)`.
pub fn verify_equiangular(effects: &[CMat]) -> EquiangularReport {
    let d = effects.first().map(|m| m.nrows()).unwrap_or(0);
    let target = 1.0 / (d as f64 + 1.0);
    let scale = (d * d) as f64;
    let mut report = EquiangularReport {
        d,
        n: effects.len(),
        deviation: 0.0,
        min_overlap: f64::INFINITY,
        max_overlap: f64::NEG_INFINITY,
    };
    for m in 0..effects.len() {
        for n in (m + 1)..effects.len() {
            let overlap = scale * linalg::trace_product(&effects[m], &effects[n]).re;
            report.deviation = report.deviation.max((overlap - target).abs());
            report.min_overlap = report.min_overlap.min(overlap);
            report.max_overlap = report.max_overlap.max(overlap);
        }
    }
    report
}

/// Value of the frame potential at a SIC fiducial.
pub fn sic_potential(d: usize) -> f64 {
    let d = d as f64;
    (d * d - 1.0) / ((d + 1.0) * (d + 1.0))
}

pub fn frame_potential(fiducial: &PureState) -> f64 {
    let d = fiducial.dim();
    let psi = fiducial.amplitudes();
    let mut total = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p == 0 && q == 0 {
                continue;
            }
            total += psi.dotc(&displace(psi, p, q)).norm_sqr().powi(2);
        }
    }
    total
}

/// Excess potential `F(x/|x|) − (d−1)/(d+1)` and its gradient with respect to
/// the real coordinates `x = (Re ψ, Im ψ)`.
///
/// On the sphere the excess equals `Σ_{(p,q)≠(0,0)} (w_pq − 1/(d+1))²` with
/// `w_pq = |⟨ψ|X^p Z^q|ψ⟩|²`, which is how it is evaluated: near a SIC this
/// keeps full relative precision where `F` itself would cancel. The function is
/// scale invariant, so the gradient is tangent to the sphere through `x`.
pub fn excess_and_gradient(x: &[f64]) -> (f64, Vec<f64>) {
    let d = x.len() / 2;
    let target = 1.0 / (d as f64 + 1.0);
    let psi = CVec::from_fn(d, |k, _| c(x[k], x[d + k]));
    let n = psi.norm_squared();
    let n2 = n * n;
    let mut excess = 0.0;
    // complex form of the gradient: ∂/∂x + i ∂/∂y
    let mut grad = CVec::zeros(d);
    let mut radial = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p == 0 && q == 0 {
                continue;
            }
            let dpsi = displace(&psi, p, q);
            let overlap = psi.dotc(&dpsi);
            let raw = overlap.norm_sqr();
            let r = raw / n2 - target;
            excess += r * r;
            let adj = displace_adjoint(&psi, p, q);
            // ∇|c|² = 2(c̄ Dψ + c D†ψ), ∇w = ∇|c|²/n² − 4|c|² x/n³
            grad += (dpsi * overlap.conj() + adj * overlap) * c(4.0 * r / n2, 0.0);
            radial += 2.0 * r * 4.0 * raw / (n2 * n);
        }
    }
    let mut g = vec![0.0; 2 * d];
    for k in 0..d {
        g[k] = grad[k].re - radial * x[k];
        g[d + k] = grad[k].im - radial * x[d + k];
    }
    (excess, g)
}

/// Residuals `w_pq − 1/(d+1)` over `(p,q) ≠ (0,0)` and their Jacobian with
/// respect to `x = (Re ψ, Im ψ)`.
fn residuals_and_jacobian(x: &[f64]) -> (DVector<f64>, RMat) {
    let d = x.len() / 2;
    let target = 1.0 / (d as f64 + 1.0);
    let psi = CVec::from_fn(d, |k, _| c(x[k], x[d + k]));
    let n = psi.norm_squared();
    let n2 = n * n;
    let m = d * d - 1;
    let mut r = DVector::zeros(m);
    let mut jac = RMat::zeros(m, 2 * d);
    let mut row = 0;
    for p in 0..d {
        for q in 0..d {
            if p == 0 && q == 0 {
                continue;
            }
            let dpsi = displace(&psi, p, q);
            let overlap = psi.dotc(&dpsi);
            let raw = overlap.norm_sqr();
            r[row] = raw / n2 - target;
            let grad = (dpsi * overlap.conj() + displace_adjoint(&psi, p, q) * overlap) * c(2.0 / n2, 0.0);
            let radial = 4.0 * raw / (n2 * n);
            for k in 0..d {
                jac[(row, k)] = grad[k].re - radial * x[k];
                jac[(row, d + k)] = grad[k].im - radial * x[d + k];
            }
            row += 1;
        }
    }
    (r, jac)
}

/// Gauss–Newton steps on the overlap residuals. Near a SIC this converges
/// quadratically even where the excess has a degenerate (quartic) minimum and
/// gradient descent slows to a crawl.
fn polish(x: &mut Vec<f64>, f: &mut f64, steps: usize) -> usize {
    let mut used = 0;
    for _ in 0..steps {
        let (r, jac) = residuals_and_jacobian(x);
        let (delta, _) = lstsq(&jac, &(-r));
        let mut trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
        normalize(&mut trial);
        let (ft, _) = excess_and_gradient(&trial);
        used += 1;
        if !(ft < *f) {
            break;
        }
        *x = trial;
        *f = ft;
    }
    used
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub d: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(d: usize, restarts: usize, seed: u64) -> Self {
        Self { d, restarts, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.d) {
            return Err(QplexError::InvalidConfig(format!("dimension {} outside 2..=8", self.d)));
        }
        if self.restarts == 0 {
            return Err(QplexError::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(QplexError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(QplexError::InvalidConfig("grad_tol must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { d: 2, restarts: 16, max_iters: 20_000, grad_tol: 1e-13, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub d: usize,
    pub best_potential: f64,
    /// (d−1)/(d+1)
    pub theoretical_minimum: f64,
    pub achieved_equiangularity_deviation: f64,
    pub iterations_used: usize,
    pub restart_index: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    index: usize,
    excess: f64,
    potential: f64,
    deviation: f64,
    iterations: usize,
    fiducial: PureState,
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

fn to_state(x: &[f64]) -> PureState {
    let d = x.len() / 2;
    PureState::normalized(CVec::from_fn(d, |k, _| c(x[k], x[d + k]))).expect("iterate is nonzero")
}

/// Excess below which the Gauss–Newton polish is attempted.
const POLISH_THRESHOLD: f64 = 1e-12;

/// Projected gradient descent with Armijo backtracking. The trial step is the
/// Barzilai–Borwein length from the previous iterate.
fn descend(config: &SearchConfig, index: usize) -> RestartOutcome {
    let d = config.d;
    let mut rng = seeded_rng(config.seed, index as u64);
    let start = random_pure_with(d, &mut rng);
    let mut x: Vec<f64> = start.amplitudes().iter().map(|z| z.re).chain(start.amplitudes().iter().map(|z| z.im)).collect();
    let (mut f, mut g) = excess_and_gradient(&x);
    let mut step = 0.1;
    let mut iterations = 0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    while iterations < config.max_iters {
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2.sqrt() < config.grad_tol || f < POLISH_THRESHOLD {
            break;
        }
        iterations += 1;
        if let Some((px, pg)) = &prev {
            let (mut sy, mut ss) = (0.0, 0.0);
            for k in 0..x.len() {
                let s = x[k] - px[k];
                sy += s * (g[k] - pg[k]);
                ss += s * s;
            }
            if sy > 0.0 && ss > 0.0 {
                step = ss / sy;
            }
        }
        let mut accepted = None;
        let mut t = step;
        while t > 1e-18 {
            let mut trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            normalize(&mut trial);
            let (ft, gt) = excess_and_gradient(&trial);
            // strict decrease: at round-off level the Armijo bound alone accepts no-op steps
            if ft < f && ft <= f - 1e-4 * t * gnorm2 {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nx, nf, ng)) => {
                prev = Some((std::mem::replace(&mut x, nx), std::mem::replace(&mut g, ng)));
                f = nf;
                step = t;
            }
            // no descent possible at this precision
            None => break,
        }
    }
    if f < POLISH_THRESHOLD {
        iterations += polish(&mut x, &mut f, 16);
    }
    let fiducial = to_state(&x);
    let deviation = verify_equiangular(&crate::reference::wh_orbit_effects(&fiducial)).deviation;
    let (excess, _) = excess_and_gradient(&x);
    RestartOutcome { index, excess, potential: sic_potential(d) + excess, deviation, iterations, fiducial }
}

pub fn find_sic_fiducial(config: &SearchConfig) -> Result<(SicPovm, SearchReport)> {
    find_sic_fiducial_with(config, Exec::default())
}

/// Runs every restart (in parallel when `exec` allows), then picks the lowest
/// potential among equiangular results, ties broken by restart index.
pub fn find_sic_fiducial_with(config: &SearchConfig, exec: Exec) -> Result<(SicPovm, SearchReport)> {
    config.validate()?;
    let outcomes = exec.map(config.restarts, |i| descend(config, i));
    let by_potential = |a: &&RestartOutcome, b: &&RestartOutcome| {
        a.excess.total_cmp(&b.excess).then(a.index.cmp(&b.index))
    };
    let best = outcomes.iter().filter(|o| o.deviation <= tol::SIC).min_by(by_potential);
    let Some(best) = best else {
        let closest = outcomes.iter().min_by(by_potential).expect("at least one restart");
        return Err(QplexError::NotConverged { potential: closest.potential, deviation: closest.deviation });
    };
    let sic = wh_sic_from_fiducial(&best.fiducial, config.d)?;
    let report = SearchReport {
        d: config.d,
        best_potential: best.potential,
        theoretical_minimum: sic_potential(config.d),
        achieved_equiangularity_deviation: best.deviation,
        iterations_used: best.iterations,
        restart_index: best.index,
        converged: true,
    };
    Ok((sic, report))
}
