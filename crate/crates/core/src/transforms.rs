//! Linear maps on probability 6-vectors induced by changes of the complete set
//! of complementary measurements.
//!
//! A frame change acts on mean values as `m -> G m + c`. Because every valid
//! 6-vector satisfies `p_u + (1 - p_u) = 1` in each sector, the affine action
//! can be written as a genuine 6x6 matrix. The constant term of output sector
//! `u` is spread over the input sectors with weights `G_uv² / |G_u|²`, so a
//! signed permutation of the axes realizes as an exact 0/1 permutation matrix.

use std::cmp::Ordering;

use nalgebra::{Matrix3, Rotation3, SMatrix, Unit, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::normalized_measure;
use crate::qubit::{
    self, random_state, total_uncertainty_state, ComplementaryFrame, MeanValueVector, QubitState, StateKind,
};
use crate::seed::{Domain, SeedStream};

pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Tolerance for accepting a 3x3 matrix as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InducedMap(Matrix6);

impl InducedMap {
    pub fn from_matrix(a: Matrix6) -> Self {
        Self(a)
    }

    pub fn from_rows(rows: [[f64; 6]; 6]) -> Self {
        Self(Matrix6::from_fn(|i, j| rows[i][j]))
    }

    pub fn identity() -> Self {
        Self(Matrix6::identity())
    }

    pub fn matrix(&self) -> &Matrix6 {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 6]; 6] {
        let mut rows = [[0.0; 6]; 6];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[(i, j)];
            }
        }
        rows
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &InducedMap) -> InducedMap {
        InducedMap(self.0 * other.0)
    }

    pub fn apply_raw(&self, p: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..6).map(|j| self.0[(i, j)] * p[j]).sum();
        }
        out
    }

    /// The affine action `m -> G m + c` on mean values, read off the matrix.
    /// Meaningful only for maps with sector column structure.
    pub fn mean_action(&self) -> (Matrix3<f64>, Vector3<f64>) {
        let a = &self.0;
        let g = Matrix3::from_fn(|u, v| a[(2 * u, 2 * v)] - a[(2 * u, 2 * v + 1)]);
        let c = Vector3::from_fn(|u, _| (0..3).map(|v| a[(2 * u, 2 * v)] + a[(2 * u, 2 * v + 1)]).sum::<f64>() - 1.0);
        (g, c)
    }

    pub fn distance(&self, other: &InducedMap) -> f64 {
        (self.0 - other.0).amax()
    }
}

/// Realizes the affine mean-value map `m -> G m + c` as a 6x6 matrix.
pub fn induced_from_affine(g: &Matrix3<f64>, c: &Vector3<f64>) -> InducedMap {
    let mut a = Matrix6::zeros();
    for u in 0..3 {
        let row_sq: f64 = (0..3).map(|v| g[(u, v)] * g[(u, v)]).sum();
        for v in 0..3 {
            let w = if row_sq > 0.0 { g[(u, v)] * g[(u, v)] / row_sq } else { 1.0 / 3.0 };
            let guv = g[(u, v)];
            a[(2 * u, 2 * v)] = 0.5 * (w * (1.0 + c[u]) + guv);
            a[(2 * u, 2 * v + 1)] = 0.5 * (w * (1.0 + c[u]) - guv);
            a[(2 * u + 1, 2 * v)] = 0.5 * (w * (1.0 - c[u]) - guv);
            a[(2 * u + 1, 2 * v + 1)] = 0.5 * (w * (1.0 - c[u]) + guv);
        }
    }
    InducedMap(a)
}

/// The map on probability vectors induced by the orthogonal mean-value map `r`.
pub fn induced_from_rotation(r: &Matrix3<f64>) -> Result<InducedMap> {
    let dev = (r.transpose() * r - Matrix3::identity()).amax();
    if !(dev <= ORTHOGONALITY_TOL) {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(induced_from_affine(r, &Vector3::zeros()))
}

/// The discrete sector permutation `p_x -> p_y, p_y -> 1 - p_x, p_z -> p_z`.
pub fn example_permutation_map() -> InducedMap {
    InducedMap::from_rows([
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ])
}

/// Applies the map and validates the image as a physical state.
pub fn apply(map: &InducedMap, s: &QubitState) -> Result<QubitState> {
    let out = map.apply_raw(s.as_array());
    QubitState::new(out).map_err(|_| Error::NotSectorStochastic(image_violation(&out)))
}

fn image_violation(p: &[f64; 6]) -> f64 {
    let sums = p.chunks_exact(2).map(|s| (s[0] + s[1] - 1.0).abs());
    let range = p.iter().map(|&x| (-x).max(x - 1.0).max(0.0));
    let norm = {
        let m = Vector3::new(2.0 * p[0] - 1.0, 2.0 * p[2] - 1.0, 2.0 * p[4] - 1.0).norm();
        (m - 1.0).max(0.0)
    };
    sums.chain(range).fold(norm, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorReport {
    pub stochastic: bool,
    /// Largest mismatch between the two column sums of an input sector within
    /// an output sector, or of their total from one.
    pub column_violation: f64,
    /// Largest excursion of an output probability outside [0, 1] over all
    /// physical input states.
    pub range_violation: f64,
}

/// Sector-stochasticity over the physical states (`|m| ≤ 1`).
///
/// Sector sums are exact iff each output sector gives equal column sums to
/// the two columns of every input sector, with those sums totalling one.
/// Each output probability is affine in `m`, `c0 + g·m`, so its range over
/// the unit ball is exactly `[c0 - |g|, c0 + |g|]`.
pub fn is_sector_stochastic(map: &InducedMap, tol: f64) -> SectorReport {
    let a = map.matrix();
    let mut column_violation = 0.0f64;
    for u in 0..3 {
        let mut total = 0.0;
        for v in 0..3 {
            let cp = a[(2 * u, 2 * v)] + a[(2 * u + 1, 2 * v)];
            let cq = a[(2 * u, 2 * v + 1)] + a[(2 * u + 1, 2 * v + 1)];
            column_violation = column_violation.max((cp - cq).abs());
            total += cp;
        }
        column_violation = column_violation.max((total - 1.0).abs());
    }
    let mut range_violation = 0.0f64;
    for i in 0..6 {
        let c0: f64 = (0..3).map(|v| 0.5 * (a[(i, 2 * v)] + a[(i, 2 * v + 1)])).sum();
        let g = Vector3::from_fn(|v, _| 0.5 * (a[(i, 2 * v)] - a[(i, 2 * v + 1)])).norm();
        range_violation = range_violation.max(-(c0 - g)).max(c0 + g - 1.0);
    }
    let range_violation = range_violation.max(0.0);
    SectorReport {
        stochastic: column_violation <= tol && range_violation <= tol,
        column_violation,
        range_violation,
    }
}

/// Largest excursion outside [0, 1] over every probability 6-vector, not
/// just the physical ones. The mean vector then ranges over the cube
/// `[-1, 1]^3`, so the bound uses the 1-norm of `g`.
pub fn cube_range_violation(map: &InducedMap) -> f64 {
    let a = map.matrix();
    (0..6)
        .map(|i| {
            let c0: f64 = (0..3).map(|v| 0.5 * (a[(i, 2 * v)] + a[(i, 2 * v + 1)])).sum();
            let g: f64 = (0..3).map(|v| 0.5 * (a[(i, 2 * v)] - a[(i, 2 * v + 1)]).abs()).sum();
            (g - c0).max(c0 + g - 1.0)
        })
        .fold(0.0, f64::max)
}

/// `‖r‖_α = (Σ |rᵢ|^α)^{1/α}`.
pub fn alpha_norm(r: &[f64], alpha: f64) -> f64 {
    r.iter().map(|x| x.abs().powf(alpha)).sum::<f64>().powf(1.0 / alpha)
}

pub fn alpha_norm_deviation(map: &InducedMap, s: &QubitState, alpha: f64) -> f64 {
    let image = map.apply_raw(s.as_array());
    (alpha_norm(&image, alpha) - alpha_norm(s.as_array(), alpha)).abs()
}

/// Haar-random orthogonal 3x3 matrix with determinant +1 (`proper`) or -1.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, proper: bool) -> Matrix3<f64> {
    let e1 = qubit::random_unit_vector(rng);
    let e2 = loop {
        let v = qubit::random_unit_vector(rng);
        let w = v - e1 * e1.dot(&v);
        if w.norm() > 1e-6 {
            break w.normalize();
        }
    };
    let e3 = if proper { e1.cross(&e2) } else { -e1.cross(&e2) };
    Matrix3::from_columns(&[e1, e2, e3])
}

pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle).into_inner()
}

/// The 48 sector-respecting permutation maps (signed permutations of the axes).
pub fn sector_permutations() -> Vec<InducedMap> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in 0..8u32 {
            let mut g = Matrix3::zeros();
            for u in 0..3 {
                g[(u, perm[u])] = if signs & (1 << u) == 0 { 1.0 } else { -1.0 };
            }
            out.push(induced_from_affine(&g, &Vector3::zeros()));
        }
    }
    out
}

/// Max-entry distance to the nearest sector-respecting permutation map.
pub fn permutation_distance(map: &InducedMap) -> f64 {
    sector_permutations().iter().map(|p| map.distance(p)).fold(f64::INFINITY, f64::min)
}

pub fn is_permutation_type(map: &InducedMap, tol: f64) -> bool {
    permutation_distance(map) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFamily {
    /// Haar-random rotations (determinant +1).
    Proper,
    /// Haar-random reflections (determinant -1).
    Improper,
    /// Only the identity map.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub alpha: f64,
    pub n_states: usize,
    pub n_maps: usize,
    pub max_deviation: f64,
    pub worst_state: usize,
    pub worst_map: usize,
    pub family: MapFamily,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPlan {
    pub n_states: usize,
    pub n_maps: usize,
    pub family: MapFamily,
    /// Prepend the six axis-aligned pure states and 45° rotations about the
    /// three axes to the sampled sets.
    pub anchors: bool,
}

impl ScanPlan {
    pub fn new(n_states: usize, n_maps: usize) -> Self {
        Self { n_states, n_maps, family: MapFamily::Proper, anchors: true }
    }
}

fn axis_states() -> Vec<QubitState> {
    let canon = ComplementaryFrame::canonical();
    let mut out = Vec::with_capacity(6);
    for u in 0..3 {
        for sign in [1.0, -1.0] {
            let mut m = Vector3::zeros();
            m[u] = sign;
            out.push(qubit::probabilities_from_mean(&MeanValueVector(m), &canon).expect("unit vector"));
        }
    }
    out
}

/// State `i` of the sampled set: even indices pure, odd indices mixed.
fn sampled_state(seeds: &SeedStream, i: usize) -> QubitState {
    let kind = if i.is_multiple_of(2) { StateKind::Pure } else { StateKind::Mixed };
    random_state(&mut seeds.rng(Domain::States, i as u64), kind)
}

fn scan_states(plan: &ScanPlan, seeds: &SeedStream) -> Vec<QubitState> {
    let mut states = if plan.anchors { axis_states() } else { Vec::new() };
    states.extend((0..plan.n_states).map(|i| sampled_state(seeds, i)));
    states
}

fn scan_maps(plan: &ScanPlan, seeds: &SeedStream) -> Vec<InducedMap> {
    let proper = match plan.family {
        MapFamily::Identity => return vec![InducedMap::identity()],
        MapFamily::Proper => true,
        MapFamily::Improper => false,
    };
    let flip = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
    let mut rotations = Vec::new();
    if plan.anchors {
        for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
            let r = rotation_about(&axis, std::f64::consts::FRAC_PI_4);
            rotations.push(if proper { r } else { flip * r });
        }
    }
    rotations.extend((0..plan.n_maps).map(|j| random_orthogonal(&mut seeds.rng(Domain::Maps, j as u64), proper)));
    rotations
        .iter()
        .map(|r| induced_from_rotation(r).expect("sampled matrix is orthogonal"))
        .collect()
}

/// Larger deviation wins; ties go to the lexicographically smallest
/// `(state, map)` so the reduction does not depend on evaluation order.
fn worse(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if (a.1, a.2) <= (b.1, b.2) {
                a
            } else {
                b
            }
        }
    }
}

/// For each α, the largest change of the normalized total uncertainty over all
/// (state, map) pairs.
pub fn invariance_scan(alphas: &[f64], n_states: usize, n_maps: usize, seeds: &SeedStream) -> Result<Vec<InvarianceReport>> {
    invariance_scan_with(alphas, &ScanPlan::new(n_states, n_maps), seeds)
}

pub fn invariance_scan_with(alphas: &[f64], plan: &ScanPlan, seeds: &SeedStream) -> Result<Vec<InvarianceReport>> {
    if plan.n_states == 0 && !plan.anchors {
        return Err(Error::InvalidArgument("n_states must be at least 1".into()));
    }
    if plan.n_maps == 0 && plan.family != MapFamily::Identity {
        return Err(Error::InvalidArgument("n_maps must be at least 1".into()));
    }
    let states = scan_states(plan, seeds);
    let maps = scan_maps(plan, seeds);
    let images: Vec<Vec<QubitState>> = maps
        .par_iter()
        .map(|a| states.iter().map(|s| apply(a, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    alphas
        .iter()
        .map(|&alpha| {
            let m = normalized_measure(alpha)?;
            let before: Vec<f64> = states.iter().map(|s| total_uncertainty_state(s, &m)).collect::<Result<_>>()?;
            let (max_deviation, worst_state, worst_map) = images
                .par_iter()
                .enumerate()
                .map(|(j, row)| -> Result<(f64, usize, usize)> {
                    let mut best = (0.0, 0, j);
                    for (i, image) in row.iter().enumerate() {
                        let dev = (total_uncertainty_state(image, &m)? - before[i]).abs();
                        best = worse(best, (dev, i, j));
                    }
                    Ok(best)
                })
                .try_reduce(|| (0.0, 0, 0), |a, b| Ok(worse(a, b)))?;
            Ok(InvarianceReport {
                alpha,
                n_states: states.len(),
                n_maps: maps.len(),
                max_deviation,
                worst_state,
                worst_map,
                family: plan.family,
            })
        })
        .collect()
}

/// Fixed probe states for norm-preservation tests: 26 pure states on the
/// axes, face diagonals and body diagonals, the same directions at half
/// length, the maximally mixed state and 11 seeded samples. Always 64 states.
pub fn probe_states() -> Vec<QubitState> {
    let canon = ComplementaryFrame::canonical();
    let mut dirs = Vec::new();
    for x in -1i32..=1 {
        for y in -1i32..=1 {
            for z in -1i32..=1 {
                if (x, y, z) != (0, 0, 0) {
                    dirs.push(Vector3::new(x as f64, y as f64, z as f64).normalize());
                }
            }
        }
    }
    let mut out = Vec::with_capacity(64);
    for scale in [1.0, 0.5] {
        for d in &dirs {
            out.push(qubit::probabilities_from_mean(&MeanValueVector(d * scale), &canon).expect("inside ball"));
        }
    }
    out.push(QubitState::maximally_mixed());
    let seeds = SeedStream::new(0x0b17_5eed);
    out.extend((0..11).map(|i| {
        let kind = if i % 2 == 0 { StateKind::Pure } else { StateKind::Mixed };
        random_state(&mut seeds.rng(Domain::Probes, i), kind)
    }));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreserverCandidate {
    pub map: InducedMap,
    /// Largest α-norm deviation over the probe set and 64 extra sampled states.
    pub residual: f64,
    pub mean_residual: f64,
    pub permutation_distance: f64,
    pub restart: usize,
}

/// Objective evaluations granted to one random restart.
pub const EVALS_PER_RESTART: usize = 5_000;

struct NormObjective {
    alpha: f64,
    means: Vec<Vector3<f64>>,
    norms: Vec<f64>,
}

impl NormObjective {
    fn new(alpha: f64, probes: &[QubitState]) -> Self {
        Self {
            alpha,
            means: probes.iter().map(|s| s.mean().0).collect(),
            norms: probes.iter().map(|s| alpha_norm(s.as_array(), alpha)).collect(),
        }
    }

    fn unpack(x: &[f64; 12]) -> (Matrix3<f64>, Vector3<f64>) {
        (Matrix3::from_row_slice(&x[..9]), Vector3::new(x[9], x[10], x[11]))
    }

    /// Mean squared norm deviation plus a squared penalty for leaving the
    /// sector-stochastic set.
    fn eval(&self, x: &[f64; 12]) -> f64 {
        let (g, c) = Self::unpack(x);
        let mut penalty = 0.0;
        for u in 0..3 {
            let excess = (c[u].abs() + g.row(u).norm() - 1.0).max(0.0);
            penalty += excess * excess;
        }
        let mut sq = 0.0;
        for (m, &target) in self.means.iter().zip(&self.norms) {
            let image = g * m + c;
            let power: f64 = image
                .iter()
                .map(|&mu| (0.5 * (1.0 + mu)).abs().powf(self.alpha) + (0.5 * (1.0 - mu)).abs().powf(self.alpha))
                .sum();
            let d = power.powf(1.0 / self.alpha) - target;
            sq += d * d;
        }
        sq / self.means.len() as f64 + penalty
    }
}

fn random_start<R: Rng + ?Sized>(rng: &mut R) -> [f64; 12] {
    let mut x = [0.0; 12];
    for u in 0..3 {
        let radius: f64 = rng.random();
        let row = qubit::random_unit_vector(rng) * radius;
        x[3 * u..3 * u + 3].copy_from_slice(row.as_slice());
        x[9 + u] = (1.0 - radius) * rng.random_range(-1.0..1.0);
    }
    x
}

/// Compass search with a shrinking step; stops when the allotment is spent or
/// the step underflows.
fn refine(objective: &NormObjective, mut x: [f64; 12], allotment: usize) -> ([f64; 12], f64) {
    let mut f = objective.eval(&x);
    let mut evals = 1;
    let mut step = 0.25;
    while evals < allotment && step > 1e-13 {
        let mut improved = false;
        'coords: for k in 0..12 {
            for sign in [1.0, -1.0] {
                if evals >= allotment {
                    break 'coords;
                }
                let mut trial = x;
                trial[k] += sign * step;
                let ft = objective.eval(&trial);
                evals += 1;
                if ft < f {
                    x = trial;
                    f = ft;
                    improved = true;
                    continue 'coords;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, f)
}

/// Randomized search for linear maps that preserve the α-norm of probability
/// vectors.
///
/// `budget` counts objective evaluations, split into restarts of
/// [`EVALS_PER_RESTART`]. Every refined map whose residual falls below `tol`
/// and which is sector-stochastic within `tol` is returned, annotated with
/// its distance to the sector permutations.
pub fn search_norm_preservers(alpha: f64, budget: usize, seeds: &SeedStream, tol: f64) -> Result<Vec<PreserverCandidate>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    let probes = probe_states();
    let objective = NormObjective::new(alpha, &probes);
    let restarts = budget.div_ceil(EVALS_PER_RESTART);
    let found: Vec<Option<PreserverCandidate>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let allotment = EVALS_PER_RESTART.min(budget - r * EVALS_PER_RESTART);
            let mut rng = seeds.rng(Domain::Search, r as u64);
            let (x, _) = refine(&objective, random_start(&mut rng), allotment);
            let (g, c) = NormObjective::unpack(&x);
            let map = induced_from_affine(&g, &c);
            if !is_sector_stochastic(&map, tol).stochastic {
                return None;
            }
            let checks: Vec<f64> = probes
                .iter()
                .copied()
                .chain((0..64).map(|i| random_state(&mut rng, if i % 2 == 0 { StateKind::Pure } else { StateKind::Mixed })))
                .map(|s| alpha_norm_deviation(&map, &s, alpha))
                .collect();
            let residual = checks.iter().copied().fold(0.0, f64::max);
            (residual < tol).then(|| PreserverCandidate {
                map,
                residual,
                mean_residual: checks.iter().sum::<f64>() / checks.len() as f64,
                permutation_distance: permutation_distance(&map),
                restart: r,
            })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}
