//! Corner detection in sampled clouds and first-order certificates.
//!
//! A cloud point `u` is a corner candidate when some unit `w` keeps every
//! nearby cloud point `v` inside the cone `Re⟨v − u, w⟩ ≥ δ|v − u|`. The
//! complex inner product is read through its real part, i.e. chords live in
//! `R^{2n}`. Certificates add the analytic derivatives of `τ` along the two
//! path families of [`PathProbe`] and the eigen-residuals of the witness.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{derive_seed, random_exterior_unit, rng_from_seed, Frame, PathProbe};
use crate::numerics::{inner, norm, scale, ComplexMatrix};
use crate::range::{distance, probe_directions, re_inner, PointCloud, RangePoint};

/// Directions used to pick boundary candidates in [`corner_scan`].
pub const SCAN_DIRECTIONS: usize = 64;
/// Candidates closer than this are treated as one.
pub const DEDUP_TOL: f64 = 1e-8;
/// Points within `COINCIDENCE_TOL · extent` of the candidate are the
/// candidate itself (optimizer noise), not neighbours.
pub const COINCIDENCE_TOL: f64 = 1e-10;
pub const SUBGRADIENT_STEPS: usize = 100;
/// `default_epsilon` multiplies the median nearest-neighbour distance by this.
pub const EPSILON_FACTOR: f64 = 5.0;
/// At most this many cloud points are used as queries in `default_epsilon`.
pub const EPSILON_QUERIES: usize = 1000;
/// With a defaulted radius, [`corner_scan`] widens the neighbourhood of a
/// candidate until it holds at least this many distinct points.
pub const MIN_NEIGHBORS: usize = 8;
const STREAM_PROBE: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeResult {
    pub direction: Vec<Complex64>,
    pub delta: f64,
    pub neighbor_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerCertificate {
    pub point: RangePoint,
    pub direction: Vec<Complex64>,
    pub delta: f64,
    pub epsilon: f64,
    pub neighbor_count: usize,
    /// `max |φ'(0)|` over the probe report; absent until certified.
    pub probe_max_derivative: Option<f64>,
    /// `‖Te_j − λ_j e_j‖` per witness column; absent until certified.
    pub eigen_residuals: Option<Vec<f64>>,
    /// `delta ≥ delta_min` at the time of the scan or certification.
    pub certified: bool,
}

impl CornerCertificate {
    pub fn max_residual(&self) -> Option<f64> {
        self.eigen_residuals
            .as_ref()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeValue {
    pub probe: PathProbe,
    pub derivative: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probes: Vec<ProbeValue>,
    pub max_abs: f64,
    /// Exterior probes were requested but the frame spans the whole space.
    pub exterior_skipped: bool,
}

fn to_real(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_real(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

fn worst_chord(chords: &[Vec<f64>], w: &[f64]) -> (f64, usize) {
    let mut worst = (f64::INFINITY, 0);
    for (i, c) in chords.iter().enumerate() {
        let s = dot(c, w);
        if s < worst.0 {
            worst = (s, i);
        }
    }
    worst
}

fn coincidence(cloud: &PointCloud) -> f64 {
    COINCIDENCE_TOL * cloud.extent()
}

/// Best cone direction at `u` against the cloud points within `epsilon`.
///
/// The direction starts at the normalised mean of the unit chords and is
/// refined by projected subgradient steps of size `1/k` on
/// `δ(w) = min_v Re⟨v − u, w⟩/|v − u|`; the best iterate is returned.
/// A cloud with no point distinct from `u` is a vacuous corner:
/// `delta = 1`, `w = e_1`.
pub fn cone_test(cloud: &PointCloud, u: &RangePoint, epsilon: f64) -> Result<ConeResult> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if u.n() != cloud.n || u.witness.d() != cloud.meta.fingerprint.d {
        return Err(Error::contract("candidate does not belong to the cloud's range"));
    }
    let floor = coincidence(cloud);
    let mut chords = Vec::new();
    let mut nearest = f64::INFINITY;
    for v in &cloud.points {
        let r = distance(&v.value, &u.value);
        if r <= floor {
            continue;
        }
        nearest = nearest.min(r);
        if r < epsilon {
            let diff: Vec<Complex64> = v.value.iter().zip(&u.value).map(|(a, b)| a - b).collect();
            let mut c = to_real(&diff);
            normalize(&mut c);
            chords.push(c);
        }
    }
    if nearest.is_infinite() {
        let mut w = vec![Complex64::new(0.0, 0.0); cloud.n];
        w[0] = Complex64::new(1.0, 0.0);
        return Ok(ConeResult { direction: w, delta: 1.0, neighbor_count: 0 });
    }
    if chords.is_empty() {
        return Err(Error::InsufficientSampling { epsilon, nearest });
    }

    let dim = 2 * cloud.n;
    let mut w = vec![0.0; dim];
    for c in &chords {
        w.iter_mut().zip(c).for_each(|(a, b)| *a += b);
    }
    if normalize(&mut w) <= 1e-12 * chords.len() as f64 {
        w.clone_from(&chords[0]);
    }
    let (mut best_delta, mut arg) = worst_chord(&chords, &w);
    let mut best_w = w.clone();
    for k in 1..=SUBGRADIENT_STEPS {
        let step = 1.0 / k as f64;
        let c = &chords[arg];
        w.iter_mut().zip(c).for_each(|(a, b)| *a += step * b);
        if normalize(&mut w) == 0.0 {
            break;
        }
        let (delta, i) = worst_chord(&chords, &w);
        arg = i;
        if delta > best_delta {
            best_delta = delta;
            best_w.clone_from(&w);
        }
    }
    Ok(ConeResult {
        direction: from_real(&best_w),
        delta: best_delta.min(1.0),
        neighbor_count: chords.len(),
    })
}

/// `EPSILON_FACTOR` times the median nearest-neighbour distance, measured
/// from up to [`EPSILON_QUERIES`] evenly strided query points against the
/// whole cloud. Falls back to 1 when no two points are distinct.
pub fn default_epsilon(cloud: &PointCloud) -> f64 {
    let floor = coincidence(cloud);
    let stride = cloud.len().div_ceil(EPSILON_QUERIES).max(1);
    let mut nn: Vec<f64> = (0..cloud.len())
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .filter_map(|&q| {
            let u = &cloud.points[q].value;
            let r = cloud
                .points
                .iter()
                .map(|v| distance(&v.value, u))
                .filter(|&r| r > floor)
                .fold(f64::INFINITY, f64::min);
            r.is_finite().then_some(r)
        })
        .collect();
    if nn.is_empty() {
        return 1.0;
    }
    nn.sort_by(f64::total_cmp);
    let m = nn.len();
    let median = if m % 2 == 1 { nn[m / 2] } else { 0.5 * (nn[m / 2 - 1] + nn[m / 2]) };
    EPSILON_FACTOR * median
}

/// Cloud points attaining `max Re⟨·, w⟩` over the scan directions, first
/// occurrence kept, duplicates within [`DEDUP_TOL`] dropped.
pub fn boundary_candidates(cloud: &PointCloud) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for w in probe_directions(cloud.n, SCAN_DIRECTIONS) {
        let (_, i) = cloud.support(&w);
        let p = &cloud.points[i].value;
        if out.iter().all(|&j| distance(&cloud.points[j].value, p) > DEDUP_TOL) {
            out.push(i);
        }
    }
    out
}

/// Radius that keeps at least [`MIN_NEIGHBORS`] distinct points (or all of
/// them) strictly inside the ball around `u`, and never less than `eps`.
fn widened_epsilon(cloud: &PointCloud, u: &[Complex64], eps: f64) -> f64 {
    let floor = coincidence(cloud);
    let mut r: Vec<f64> = cloud
        .points
        .iter()
        .map(|v| distance(&v.value, u))
        .filter(|&r| r > floor)
        .collect();
    if r.is_empty() {
        return eps;
    }
    let k = MIN_NEIGHBORS.min(r.len()) - 1;
    let (_, kth, _) = r.select_nth_unstable_by(k, f64::total_cmp);
    eps.max(*kth * (1.0 + 1e-9))
}

/// Cone tests at every boundary candidate. Keeps those with
/// `delta ≥ delta_min`, sorted by `delta` descending (ties keep candidate
/// order).
///
/// `epsilon = None` uses [`default_epsilon`], widened per candidate so that
/// at least [`MIN_NEIGHBORS`] points take part (extreme points sit where a
/// cloud is sparsest). An explicit `epsilon` is used as given.
pub fn corner_scan(cloud: &PointCloud, delta_min: f64, epsilon: Option<f64>) -> Result<Vec<CornerCertificate>> {
    if !(delta_min > 0.0 && delta_min <= 1.0) {
        return Err(Error::invalid(format!("delta_min must lie in (0, 1], got {delta_min}")));
    }
    let base = match epsilon {
        Some(e) => e,
        None => default_epsilon(cloud),
    };
    let candidates = boundary_candidates(cloud);
    let tested = candidates
        .par_iter()
        .map(|&i| {
            let u = &cloud.points[i];
            let eps = match epsilon {
                Some(_) => base,
                None => widened_epsilon(cloud, &u.value, base),
            };
            let cone = cone_test(cloud, u, eps)?;
            Ok(CornerCertificate {
                point: u.clone(),
                direction: cone.direction,
                delta: cone.delta,
                epsilon: eps,
                neighbor_count: cone.neighbor_count,
                probe_max_derivative: None,
                eigen_residuals: None,
                certified: cone.delta >= delta_min,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut kept: Vec<CornerCertificate> = tested.into_iter().filter(|c| c.certified).collect();
    kept.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    Ok(kept)
}

/// Analytic `φ'(0)` of `τ_j` along a probe path (`j` = the probe's target).
///
/// Exterior mix: `⟨Tu, e_j⟩ + ⟨Te_j, u⟩`.
/// Planar rotation: `e^{−iα}⟨Te_j, e_k⟩ + e^{iα}⟨Te_k, e_j⟩`.
pub fn path_derivative(t: &ComplexMatrix, frame: &Frame, probe: &PathProbe) -> Result<Complex64> {
    if frame.d() != t.dim() {
        return Err(Error::dimension("probe frame and operator dimensions differ"));
    }
    probe.validate(frame)?;
    Ok(match probe {
        PathProbe::ExteriorMix { j, u } => {
            let ej = frame.column(*j);
            inner(&t.matvec(u), ej) + inner(&t.matvec(ej), u)
        }
        PathProbe::PlanarRotation { j, k, alpha } => {
            let (ej, ek) = (frame.column(*j), frame.column(*k));
            let phase = Complex64::from_polar(1.0, *alpha);
            phase.conj() * inner(&t.matvec(ej), ek) + phase * inner(&t.matvec(ek), ej)
        }
    })
}

/// Exterior vectors probed for column `j`: `exterior_count` random unit
/// vectors orthogonal to the frame, plus the normalised components of
/// `Te_j` and `T*e_j` orthogonal to the span (when non-negligible). The
/// latter make a vanishing report equivalent to `Te_j, T*e_j ∈ span(F)`.
fn exterior_vectors(t: &ComplexMatrix, frame: &Frame, j: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_PROBE, j as u64));
    let mut out: Vec<Vec<Complex64>> = (0..count)
        .filter_map(|_| random_exterior_unit(frame, &mut rng))
        .collect();
    let floor = 1e-14 * t.spectral_norm();
    let ej = frame.column(j);
    for image in [t.matvec(ej), t.adjoint_matvec(ej)] {
        let r = frame.project_out(&frame.project_out(&image));
        let nr = norm(&r);
        if nr > floor && nr > 0.0 {
            out.push(scale(Complex64::new(1.0 / nr, 0.0), &r));
        }
    }
    out
}

/// Derivatives of `τ` along exterior-mix probes (each vector `u` together
/// with `i·u`) and planar rotations of every pair `j < k` at `α ∈ {0, π/2}`.
pub fn probe_derivatives(t: &ComplexMatrix, frame: &Frame, exterior_count: usize, seed: u64) -> Result<ProbeReport> {
    if frame.d() != t.dim() {
        return Err(Error::dimension("probe frame and operator dimensions differ"));
    }
    let n = frame.n();
    let exterior_skipped = exterior_count > 0 && n == frame.d();
    let mut probes = Vec::new();
    if n < frame.d() {
        for j in 0..n {
            for u in exterior_vectors(t, frame, j, exterior_count, seed) {
                let iu = scale(Complex64::i(), &u);
                probes.push(PathProbe::ExteriorMix { j, u });
                probes.push(PathProbe::ExteriorMix { j, u: iu });
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            for alpha in [0.0, std::f64::consts::FRAC_PI_2] {
                probes.push(PathProbe::PlanarRotation { j, k, alpha });
            }
        }
    }
    let probes = probes
        .into_iter()
        .map(|probe| {
            let derivative = path_derivative(t, frame, &probe)?;
            Ok(ProbeValue { probe, derivative })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs = probes.iter().map(|p| p.derivative.norm()).fold(0.0, f64::max);
    Ok(ProbeReport { probes, max_abs, exterior_skipped })
}

/// `‖Te_j − λ_j e_j‖` for every column of the witness, `λ = point.value`.
pub fn eigen_residuals(t: &ComplexMatrix, point: &RangePoint) -> Result<Vec<f64>> {
    if point.witness.d() != t.dim() {
        return Err(Error::dimension("witness and operator dimensions differ"));
    }
    Ok(point
        .witness
        .columns()
        .iter()
        .zip(&point.value)
        .map(|(e, &lam)| {
            let te = t.matvec(e);
            te.iter().zip(e).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect())
}

/// Cone test, probe report and eigen-residuals at `u`.
pub fn certify_corner(
    t: &ComplexMatrix,
    cloud: &PointCloud,
    u: &RangePoint,
    epsilon: f64,
    delta_min: f64,
    seed: u64,
    exterior_count: usize,
) -> Result<CornerCertificate> {
    if !cloud.matches(t) {
        return Err(Error::contract("cloud was sampled from a different operator"));
    }
    if !(delta_min > 0.0 && delta_min <= 1.0) {
        return Err(Error::invalid(format!("delta_min must lie in (0, 1], got {delta_min}")));
    }
    let cone = cone_test(cloud, u, epsilon)?;
    let probes = probe_derivatives(t, &u.witness, exterior_count, seed)?;
    let residuals = eigen_residuals(t, u)?;
    Ok(CornerCertificate {
        point: u.clone(),
        direction: cone.direction,
        delta: cone.delta,
        epsilon,
        neighbor_count: cone.neighbor_count,
        probe_max_derivative: Some(probes.max_abs),
        eigen_residuals: Some(residuals),
        certified: cone.delta >= delta_min,
    })
}

/// Post-hoc check of a cone claim: the smallest `Re⟨v − u, w⟩/(|v − u||w|)`
/// over cloud points with `0 < |v − u| < epsilon` (coincident points
/// excluded as in [`cone_test`]). `None` when there are no such points.
pub fn cone_margin(cloud: &PointCloud, u: &[Complex64], w: &[Complex64], epsilon: f64) -> Option<f64> {
    let floor = coincidence(cloud);
    let nw = norm(w);
    cloud
        .points
        .iter()
        .filter_map(|v| {
            let r = distance(&v.value, u);
            (r > floor && r < epsilon).then(|| {
                let diff: Vec<Complex64> = v.value.iter().zip(u).map(|(a, b)| a - b).collect();
                re_inner(&diff, w) / (r * nw)
            })
        })
        .reduce(f64::min)
}
