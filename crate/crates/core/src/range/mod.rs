//! Evaluation and approximation of `W_n(T)`.
//!
//! Two complementary views are provided: Monte-Carlo point clouds (Haar
//! frames pushed through τ) and support values `h(w) = sup Re⟨z, w⟩` found by
//! gradient ascent on the Stiefel manifold. Clouds can be enriched with
//! support maximizers and small perturbations around them, which is where
//! corners live.

mod ascent;

pub use ascent::{
    ascend_from, objective, riemannian_gradient, support_stiefel, support_stiefel_with, AscentOptions,
    AscentTrace, SupportResult,
};

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{derive_seed, gaussian_vector, haar_frame, rng_from_seed, Frame};
use crate::numerics::{hermitian_eigensystem, hermitian_part, inner, norm, ComplexMatrix, Fingerprint};

pub(crate) const STREAM_SAMPLE: u64 = 1;
pub(crate) const STREAM_RESTART: u64 = 2;
pub(crate) const STREAM_BOUNDARY: u64 = 3;
pub(crate) const STREAM_LOCAL: u64 = 4;
const DIRECTION_SEED: u64 = 0x6e75_6d72_616e_6765;

/// Default number of Haar samples per cloud.
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Frame perturbation sizes used around each boundary maximizer.
pub const LOCAL_SCALES: [f64; 5] = [1e-3, 1e-2, 3e-2, 1e-1, 3e-1];
pub const LOCAL_PER_SCALE: usize = 8;

/// `Re⟨v, w⟩ = Σ Re(v_i conj(w_i))`, the real inner product of C^n ≅ R^{2n}.
pub fn re_inner(v: &[Complex64], w: &[Complex64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `τ(T, F) = (⟨Te_1, e_1⟩, …, ⟨Te_n, e_n⟩)`.
pub fn tau(t: &ComplexMatrix, frame: &Frame) -> Result<Vec<Complex64>> {
    if frame.d() != t.dim() {
        return Err(Error::dimension(format!(
            "frame lives in C^{}, operator acts on C^{}",
            frame.d(),
            t.dim()
        )));
    }
    Ok(frame.columns().iter().map(|e| inner(&t.matvec(e), e)).collect())
}

/// A point of `W_n(T)` together with the frame that realises it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangePoint {
    pub value: Vec<Complex64>,
    pub witness: Frame,
}

impl RangePoint {
    pub fn from_frame(t: &ComplexMatrix, witness: Frame) -> Result<Self> {
        let value = tau(t, &witness)?;
        Ok(Self { value, witness })
    }

    pub fn n(&self) -> usize {
        self.value.len()
    }

    /// `max_j |value_j − ⟨Te_j, e_j⟩|`
    pub fn witness_error(&self, t: &ComplexMatrix) -> Result<f64> {
        let fresh = tau(t, &self.witness)?;
        Ok(fresh
            .iter()
            .zip(&self.value)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub fingerprint: Fingerprint,
    pub sampler: String,
    pub seed: u64,
    pub count: usize,
}

/// Finite sample of `W_n(T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub n: usize,
    pub points: Vec<RangePoint>,
    pub meta: CloudMeta,
}

impl PointCloud {
    pub fn new(n: usize, points: Vec<RangePoint>, meta: CloudMeta) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a point cloud needs at least one point"));
        }
        if points.iter().any(|p| p.n() != n || p.witness.n() != n) {
            return Err(Error::invalid(format!("every point must have {n} coordinates")));
        }
        if points.iter().any(|p| p.witness.d() != meta.fingerprint.d) {
            return Err(Error::invalid("witness dimension disagrees with the fingerprint"));
        }
        Ok(Self { n, points, meta })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(max_v Re⟨v, w⟩, index of the first maximizer)`.
    pub fn support(&self, w: &[Complex64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, p) in self.points.iter().enumerate() {
            let s = re_inner(&p.value, w);
            if s > best.0 {
                best = (s, i);
            }
        }
        best
    }

    /// Largest coordinate modulus over the cloud.
    pub fn extent(&self) -> f64 {
        self.points
            .iter()
            .map(|p| norm(&p.value))
            .fold(0.0, f64::max)
    }

    pub fn matches(&self, t: &ComplexMatrix) -> bool {
        self.meta.fingerprint == t.fingerprint()
    }
}

/// `count` points `τ(T, F_i)` with `F_i` Haar frames seeded by
/// `derive_seed(seed, ·, i)`. Fails with a dimension error when `n > d`.
pub fn sample_cloud(t: &ComplexMatrix, n: usize, count: usize, seed: u64) -> Result<PointCloud> {
    let d = t.dim();
    if n == 0 || n > d {
        return Err(Error::dimension(format!(
            "W_{n}(T) is empty: the space has dimension {d} < {n}"
        )));
    }
    if count == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let points = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let frame = haar_frame(d, n, derive_seed(seed, STREAM_SAMPLE, i))?;
            RangePoint::from_frame(t, frame)
        })
        .collect::<Result<Vec<_>>>()?;
    PointCloud::new(
        n,
        points,
        CloudMeta {
            fingerprint: t.fingerprint(),
            sampler: "haar".to_string(),
            seed,
            count,
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSupport {
    pub value: f64,
    pub maximizer: Vec<Complex64>,
}

/// `sup_{‖e‖=1} Re(e^{−iθ}⟨Te, e⟩)`: the top eigenpair of
/// `hermitian_part(T, e^{iθ})`.
pub fn support_exact_1d(t: &ComplexMatrix, theta: f64) -> Result<ExactSupport> {
    if !theta.is_finite() {
        return Err(Error::invalid("support angle must be finite"));
    }
    let h = hermitian_part(t, Complex64::from_polar(1.0, theta))?;
    let eig = hermitian_eigensystem(&h)?;
    Ok(ExactSupport {
        value: eig.values[0],
        maximizer: eig.vector(0),
    })
}

/// Matrix of the compression `P T|_L` in the basis given by the frame:
/// entry `(j, k)` is `⟨T e_k, e_j⟩`.
pub fn compress(t: &ComplexMatrix, frame: &Frame) -> Result<ComplexMatrix> {
    if frame.d() != t.dim() {
        return Err(Error::dimension("compress: frame and operator dimensions differ"));
    }
    let n = frame.n();
    let images: Vec<Vec<Complex64>> = frame.columns().iter().map(|e| t.matvec(e)).collect();
    let mut c = ComplexMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            c[(j, k)] = inner(&images[k], frame.column(j));
        }
    }
    Ok(c)
}

/// Keeps the first `k` coordinates of every point and the first `k` columns
/// of every witness.
pub fn project_cloud(cloud: &PointCloud, k: usize) -> Result<PointCloud> {
    if k == 0 || k > cloud.n {
        return Err(Error::dimension(format!(
            "cannot project W_{} samples onto {k} coordinates",
            cloud.n
        )));
    }
    let points = cloud
        .points
        .iter()
        .map(|p| {
            Ok(RangePoint {
                value: p.value[..k].to_vec(),
                witness: p.witness.truncated(k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sampler = if k == cloud.n {
        cloud.meta.sampler.clone()
    } else {
        format!("{}|proj{k}", cloud.meta.sampler)
    };
    PointCloud::new(
        k,
        points,
        CloudMeta {
            sampler,
            ..cloud.meta.clone()
        },
    )
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::invalid(format!("permutation has {} entries, expected {n}", pi.len())));
    }
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid(format!("{pi:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Applies `U_π`: coordinate `k` (and witness column `k`) moves to `pi[k]`.
pub fn permute_point(p: &RangePoint, pi: &[usize]) -> Result<RangePoint> {
    check_permutation(pi, p.n())?;
    let mut value = vec![Complex64::new(0.0, 0.0); p.n()];
    for (k, &target) in pi.iter().enumerate() {
        value[target] = p.value[k];
    }
    Ok(RangePoint {
        value,
        witness: p.witness.permuted_unchecked(pi),
    })
}

/// Applies `U_π` to a plain vector of C^n.
pub fn permute_vector(v: &[Complex64], pi: &[usize]) -> Result<Vec<Complex64>> {
    check_permutation(pi, v.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (k, &target) in pi.iter().enumerate() {
        out[target] = v[k];
    }
    Ok(out)
}

/// Deterministic unit directions in C^n used to pick boundary candidates.
///
/// For `n = 1` these are the `count` equally spaced angles. For larger `n`
/// the first ones are `±e_j` and `±i·e_j`, the rest normalised Gaussian
/// draws from a fixed seed.
pub fn probe_directions(n: usize, count: usize) -> Vec<Vec<Complex64>> {
    if n == 1 {
        return (0..count)
            .map(|k| vec![Complex64::from_polar(1.0, TAU * k as f64 / count as f64)])
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    'axes: for j in 0..n {
        for phase in [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ] {
            if out.len() == count {
                break 'axes;
            }
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            w[j] = phase;
            out.push(w);
        }
    }
    let mut rng = rng_from_seed(DIRECTION_SEED ^ n as u64);
    while out.len() < count {
        let g = gaussian_vector(n, &mut rng);
        let ng = norm(&g);
        if ng > 1e-3 {
            out.push(g.iter().map(|z| z / ng).collect());
        }
    }
    out
}

/// Adds boundary information to a cloud: for every direction, the support
/// maximizer and `LOCAL_PER_SCALE` random perturbations of its frame at
/// each of the [`LOCAL_SCALES`]. All added points carry their witnesses.
pub fn enrich_boundary(
    t: &ComplexMatrix,
    cloud: &PointCloud,
    directions: &[Vec<Complex64>],
    restarts: usize,
    seed: u64,
) -> Result<PointCloud> {
    if !cloud.matches(t) {
        return Err(Error::contract("cloud was sampled from a different operator"));
    }
    let n = cloud.n;
    let d = t.dim();
    let added = directions
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let res = support_stiefel(t, n, w, restarts, derive_seed(seed, STREAM_BOUNDARY, i as u64))?;
            let mut rng = rng_from_seed(derive_seed(seed, STREAM_LOCAL, i as u64));
            let mut pts = vec![RangePoint::from_frame(t, res.maximizer.clone())?];
            for &s in &LOCAL_SCALES {
                for _ in 0..LOCAL_PER_SCALE {
                    let g: Vec<Vec<Complex64>> = (0..n).map(|_| gaussian_vector(d, &mut rng)).collect();
                    let gn = g.iter().map(|c| norm(c).powi(2)).sum::<f64>().sqrt();
                    let moved: Vec<Vec<Complex64>> = res
                        .maximizer
                        .columns()
                        .iter()
                        .zip(&g)
                        .map(|(e, gc)| e.iter().zip(gc).map(|(a, b)| a + b * (s / gn)).collect())
                        .collect();
                    pts.push(RangePoint::from_frame(t, Frame::orthonormalize(&moved)?)?);
                }
            }
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = cloud.points.clone();
    points.extend(added.into_iter().flatten());
    let count = points.len();
    PointCloud::new(
        n,
        points,
        CloudMeta {
            sampler: format!("{}+boundary", cloud.meta.sampler),
            count,
            ..cloud.meta.clone()
        },
    )
}
