//! Convex geometry of finite samples of a state space inside the simplex.
//!
//! Points are probability vectors in R^N. With urgleichung parameters (α, β)
//! every pair of valid points satisfies `P·P′ ≥ β/α`; for SIC images in
//! dimension d the qplex bounds are `1/(d(d+1)) ≤ P·P′ ≤ 2/(d(d+1))`.

use serde::Serialize;

use crate::error::{QplexError, Result};
use crate::exec::Exec;
use crate::operator::seeded_rng;
use crate::rep::{dot, ProbVector, UrgleichungParams};
use crate::tol;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct PointSet {
    n: usize,
    points: Vec<ProbVector>,
    params: UrgleichungParams,
}

impl PointSet {
    pub fn new(points: Vec<ProbVector>, params: UrgleichungParams) -> Result<Self> {
        let n = params.n_outcomes();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(QplexError::DimensionMismatch { expected: n, found: p.len() });
        }
        Ok(Self { n, points, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProbVector] {
        &self.points
    }

    pub fn params(&self) -> &UrgleichungParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairViolation {
    pub i: usize,
    pub j: usize,
    pub product: f64,
    pub kind: BoundKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub pairs_checked: usize,
    /// Minimum over distinct pairs.
    pub min_product: f64,
    /// Maximum over all pairs, self-pairs included.
    pub max_product: f64,
    pub violations: Vec<PairViolation>,
    /// Distinct pairs at the lower bound within `tol::QPLEX_BOUND`.
    pub saturating: Vec<(usize, usize)>,
}

/// Checks `1/(d(d+1)) ≤ P·P′ ≤ 2/(d(d+1))` over every pair; self-pairs are
/// included for the upper bound.
pub fn pair_bounds_check(set: &PointSet, d: usize, exec: Exec) -> Result<PairBoundsReport> {
    if set.n() != d * d {
        return Err(QplexError::DimensionMismatch { expected: d * d, found: set.n() });
    }
    let df = d as f64;
    let lower = 1.0 / (df * (df + 1.0));
    let upper = 2.0 / (df * (df + 1.0));
    let pts = set.points();
    let rows = exec.map(pts.len(), |i| {
        let mut min_p = f64::INFINITY;
        let mut max_p = f64::NEG_INFINITY;
        let mut violations = Vec::new();
        let mut saturating = Vec::new();
        let a = pts[i].values();
        for (j, q) in pts.iter().enumerate().skip(i) {
            let product = dot(a, q.values());
            if j != i {
                min_p = min_p.min(product);
                if (product - lower).abs() <= tol::QPLEX_BOUND {
                    saturating.push((i, j));
                }
                if product < lower - tol::QPLEX_BOUND {
                    violations.push(PairViolation { i, j, product, kind: BoundKind::Lower });
                }
            }
            max_p = max_p.max(product);
            if product > upper + tol::QPLEX_BOUND {
                violations.push(PairViolation { i, j, product, kind: BoundKind::Upper });
            }
        }
        (min_p, max_p, violations, saturating)
    });
    let mut report = PairBoundsReport {
        lower,
        upper,
        pairs_checked: pts.len() * (pts.len() + 1) / 2,
        min_product: f64::INFINITY,
        max_product: f64::NEG_INFINITY,
        violations: Vec::new(),
        saturating: Vec::new(),
    };
    for (min_p, max_p, v, sat) in rows {
        report.min_product = report.min_product.min(min_p);
        report.max_product = report.max_product.max(max_p);
        report.violations.extend(v);
        report.saturating.extend(sat);
    }
    Ok(report)
}

/// `u ∈ A*` iff `u·v ≥ β/α` for every `v ∈ A`.
pub fn polar_membership(u: &[f64], set: &PointSet) -> Result<bool> {
    if u.len() != set.n() {
        return Err(QplexError::DimensionMismatch { expected: set.n(), found: u.len() });
    }
    let sum: f64 = u.iter().sum();
    if (sum - 1.0).abs() > tol::PROB_SUM {
        return Err(QplexError::NotProbVector(format!("polar candidate sums to {sum}")));
    }
    let bound = set.params().lower_bound();
    Ok(set.points().iter().all(|v| dot(u, v.values()) >= bound - tol::POLAR))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorProbe {
    pub u: Vec<f64>,
    /// Upper estimate of the distance from `u` to the convex hull of the sample.
    pub hull_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfPolarReport {
    /// A ⊆ A*: every pair meets the lower bound.
    pub contained_in_polar: bool,
    /// Per point: min over the set (itself included) of `p·v − β/α`.
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    /// Distinct pairs with `p·v = β/α` within `tol::QPLEX_BOUND`.
    pub equality_pairs: Vec<(usize, usize)>,
    /// Sampled polar members that lie away from the sampled hull. Informational
    /// only: A* ⊆ A cannot be decided from finitely many points.
    pub exterior_probes: Vec<ExteriorProbe>,
}

/// Certifies A ⊆ A* on the sample. `probes` random unit-sum directions are
/// additionally tested for membership in A*; members farther than
/// `flag_distance` from the hull of A are reported.
pub fn self_polar_consistency(
    set: &PointSet,
    probes: usize,
    flag_distance: f64,
    seed: u64,
    exec: Exec,
) -> SelfPolarReport {
    let bound = set.params().lower_bound();
    let pts = set.points();
    let rows = exec.map(pts.len(), |i| {
        let a = pts[i].values();
        let mut slack = f64::INFINITY;
        let mut eq = Vec::new();
        for (j, q) in pts.iter().enumerate() {
            let s = dot(a, q.values()) - bound;
            slack = slack.min(s);
            if j > i && s.abs() <= tol::QPLEX_BOUND {
                eq.push((i, j));
            }
        }
        (slack, eq)
    });
    let mut slacks = Vec::with_capacity(pts.len());
    let mut equality_pairs = Vec::new();
    for (s, eq) in rows {
        slacks.push(s);
        equality_pairs.extend(eq);
    }
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let contained_in_polar = min_slack >= -tol::QPLEX_BOUND;

    let mut exterior_probes = Vec::new();
    if !pts.is_empty() && probes > 0 {
        let r_out = radii_and_dimension(set).radii.r_out;
        let n = set.n();
        let candidates = exec.map(probes, |k| {
            let mut rng = seeded_rng(seed, k as u64);
            let mut w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let mean = w.iter().sum::<f64>() / n as f64;
            w.iter_mut().for_each(|x| *x -= mean);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = 1.5 * r_out * rng.random::<f64>();
            let u: Vec<f64> = w.iter().map(|x| 1.0 / n as f64 + radius * x / norm).collect();
            let in_polar = pts.iter().all(|v| dot(&u, v.values()) >= bound - tol::POLAR);
            if !in_polar {
                return None;
            }
            let dist = hull_distance(&u, pts, 500);
            (dist > flag_distance).then_some(ExteriorProbe { u, hull_distance: dist })
        });
        exterior_probes = candidates.into_iter().flatten().collect();
    }
    SelfPolarReport { contained_in_polar, slacks, min_slack, equality_pairs, exterior_probes }
}

/// Frank–Wolfe estimate of the distance from `u` to conv(points).
fn hull_distance(u: &[f64], points: &[ProbVector], iters: usize) -> f64 {
    let n = u.len();
    let mut x: Vec<f64> = points[0].values().to_vec();
    for k in 0..iters {
        let grad: Vec<f64> = (0..n).map(|i| x[i] - u[i]).collect();
        let (best, _) = points
            .iter()
            .enumerate()
            .map(|(idx, p)| (idx, dot(&grad, p.values())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let s = points[best].values();
        // exact line search on the segment x → s
        let dir: Vec<f64> = (0..n).map(|i| s[i] - x[i]).collect();
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&grad, &dir) / dd).clamp(0.0, 1.0);
        if gamma == 0.0 && k > 0 {
            break;
        }
        for i in 0..n {
            x[i] += gamma * dir[i];
        }
    }
    (0..n).map(|i| (x[i] - u[i]).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MmdSet {
    pub size: usize,
    pub witnesses: Vec<usize>,
}

/// Largest set of out-sphere points whose pairwise products all equal β/α
/// within `tol`. Points without any saturating partner can only form
/// singleton sets and do not count against `budget` (at most 64).
pub fn mmd_max_set(set: &PointSet, tol: f64, budget: usize) -> Result<MmdSet> {
    let budget = budget.min(64);
    let pts = set.points();
    if pts.is_empty() {
        return Ok(MmdSet { size: 0, witnesses: Vec::new() });
    }
    let dists: Vec<f64> = pts.iter().map(ProbVector::distance_from_barycenter).collect();
    let r_out = dists.iter().copied().fold(0.0, f64::max);
    let candidates: Vec<usize> = (0..pts.len()).filter(|&i| (dists[i] - r_out).abs() <= tol).collect();
    let bound = set.params().lower_bound();
    let saturates = |a: usize, b: usize| (pts[a].dot(&pts[b]) - bound).abs() <= tol;
    let vertices: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&a| candidates.iter().any(|&b| b != a && saturates(a, b)))
        .collect();
    if vertices.is_empty() {
        return Ok(MmdSet { size: 1, witnesses: vec![candidates[0]] });
    }
    if vertices.len() > budget {
        return Err(QplexError::TooManyCandidates { count: vertices.len(), budget });
    }
    let adj: Vec<u64> = (0..vertices.len())
        .map(|a| {
            (0..vertices.len())
                .filter(|&b| b != a && saturates(vertices[a], vertices[b]))
                .fold(0u64, |m, b| m | (1u64 << b))
        })
        .collect();
    let all = if vertices.len() == 64 { u64::MAX } else { (1u64 << vertices.len()) - 1 };
    let mut best = Vec::new();
    let mut current = Vec::new();
    max_clique(&adj, all, &mut current, &mut best);
    let witnesses: Vec<usize> = best.iter().map(|&v| vertices[v]).collect();
    Ok(MmdSet { size: witnesses.len(), witnesses })
}

fn max_clique(adj: &[u64], mut candidates: u64, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    while candidates != 0 {
        if current.len() + candidates.count_ones() as usize <= best.len() {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        current.push(v);
        max_clique(adj, candidates & adj[v], current, best);
        current.pop();
        candidates &= !(1u64 << v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereRadii {
    pub r_in: f64,
    pub r_mid: f64,
    pub r_out: f64,
}

impl SphereRadii {
    /// r_in ≤ r_mid ≤ r_out. Fails for samples that do not reach the out-sphere,
    /// e.g. a lone barycenter.
    pub fn is_ordered(&self) -> bool {
        self.r_in <= self.r_mid && self.r_mid <= self.r_out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiiReport {
    pub radii: SphereRadii,
    pub d_estimate: f64,
}

/// r_out from the sample, r_mid = 1/√(Nα), r_in = 1/√(N(N−1)) and
/// d = 1 + r_out²/r_mid².
pub fn radii_and_dimension(set: &PointSet) -> RadiiReport {
    let n = set.n() as f64;
    let r_out = set.points().iter().map(ProbVector::distance_from_barycenter).fold(0.0, f64::max);
    let r_mid = 1.0 / (n * set.params().alpha()).sqrt();
    let r_in = if set.n() > 1 { 1.0 / (n * (n - 1.0)).sqrt() } else { 0.0 };
    RadiiReport { radii: SphereRadii { r_in, r_mid, r_out }, d_estimate: 1.0 + (r_out * r_out) / (r_mid * r_mid) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitBallReport {
    /// 1/√12
    pub radius: f64,
    pub max_distance: f64,
    pub all_inside: bool,
    pub outside: Vec<usize>,
    /// Points within `tol::QPLEX_BOUND` of the sphere of radius 1/√12.
    pub on_boundary: Vec<usize>,
}

/// Every point of a qubit (N = 4, α = 3) sample must lie in the inscribed
/// ball of the simplex.
pub fn bit_ball_check(set: &PointSet) -> Result<BitBallReport> {
    let p = set.params();
    if set.n() != 4 || (p.alpha() - 3.0).abs() > 1e-12 || (p.beta() - 0.5).abs() > 1e-12 {
        return Err(QplexError::InvalidConfig("bit-ball check needs N = 4, alpha = 3, beta = 1/2".into()));
    }
    let radius = 1.0 / 12f64.sqrt();
    let mut report = BitBallReport { radius, max_distance: 0.0, all_inside: true, outside: Vec::new(), on_boundary: Vec::new() };
    for (i, q) in set.points().iter().enumerate() {
        let dist = q.distance_from_barycenter();
        report.max_distance = report.max_distance.max(dist);
        if dist > radius + tol::QPLEX_BOUND {
            report.outside.push(i);
            report.all_inside = false;
        } else if (dist - radius).abs() <= tol::QPLEX_BOUND {
            report.on_boundary.push(i);
        }
    }
    Ok(report)
}
