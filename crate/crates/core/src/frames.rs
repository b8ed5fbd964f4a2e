//! Orthonormal n-frames in C^d.
//!
//! A [`Frame`] is a point of the complex Stiefel manifold: `n ≤ d` columns
//! that are orthonormal within [`FRAME_TOL`]. Frames are immutable once built.
//!
//! Randomness: every sampler is driven by `ChaCha20Rng::seed_from_u64`, and
//! per-item seeds are derived with [`derive_seed`] (a SplitMix64 mix of the
//! base seed, a stream tag and an index). Identical seeds give bit-identical
//! frames on every platform.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{axpy, gram_schmidt, inner, norm, scale, ComplexMatrix, ONE, ZERO};

/// Gram residual `‖F*F − I‖_F` accepted for a frame.
pub const FRAME_TOL: f64 = 1e-10;
/// Path parameters live in `[−PATH_T_MAX, PATH_T_MAX]`.
pub const PATH_T_MAX: f64 = 0.5;
/// Projected Gaussian draws shorter than this are redrawn.
pub const EXTERIOR_MIN_NORM: f64 = 1e-8;

pub type Rng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent child seed for item `index` of stream `stream`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream)).wrapping_add(index))
}

/// Standard complex normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

pub fn gaussian_vector(d: usize, rng: &mut Rng) -> Vec<Complex64> {
    (0..d).map(|_| complex_normal(rng)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct Frame {
    d: usize,
    columns: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    d: usize,
    n: usize,
    columns: Vec<Vec<Complex64>>,
}

impl TryFrom<FrameRepr> for Frame {
    type Error = Error;

    fn try_from(r: FrameRepr) -> Result<Self> {
        if r.columns.len() != r.n {
            return Err(Error::invalid("frame: column count does not match n"));
        }
        if r.columns.iter().any(|c| c.len() != r.d) {
            return Err(Error::invalid("frame: column length does not match d"));
        }
        Frame::new(r.columns)
    }
}

impl From<Frame> for FrameRepr {
    fn from(f: Frame) -> Self {
        FrameRepr {
            d: f.d,
            n: f.columns.len(),
            columns: f.columns,
        }
    }
}

impl Frame {
    /// Validates shape (`1 ≤ n ≤ d`) and orthonormality.
    pub fn new(columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::dimension("a frame needs at least one column"));
        }
        let d = columns[0].len();
        if d == 0 || columns.iter().any(|c| c.len() != d) {
            return Err(Error::dimension("frame columns must share a positive length"));
        }
        if n > d {
            return Err(Error::dimension(format!(
                "no orthonormal system of {n} vectors exists in dimension {d}"
            )));
        }
        if columns.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::invalid("frame has a non-finite entry"));
        }
        let frame = Self { d, columns };
        let residual = frame.gram_residual();
        if residual > FRAME_TOL {
            return Err(Error::contract(format!(
                "columns are not orthonormal: ‖F*F − I‖ = {residual:e}"
            )));
        }
        Ok(frame)
    }

    /// First `n` standard basis vectors of C^d.
    pub fn standard(d: usize, n: usize) -> Result<Self> {
        if n == 0 || n > d {
            return Err(Error::dimension(format!("standard frame needs 1 ≤ n ≤ d, got n={n}, d={d}")));
        }
        let columns = (0..n)
            .map(|j| {
                let mut c = vec![ZERO; d];
                c[j] = ONE;
                c
            })
            .collect();
        Ok(Self { d, columns })
    }

    /// Orthonormalises `vectors` and wraps the result.
    pub fn orthonormalize(vectors: &[Vec<Complex64>]) -> Result<Self> {
        Frame::new(gram_schmidt(vectors)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    /// `‖F*F − I‖_F`
    pub fn gram_residual(&self) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g = inner(&self.columns[j], &self.columns[i]);
                let target = if i == j { ONE } else { ZERO };
                s += (g - target).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `F*x`
    pub fn coefficients(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.columns.iter().map(|e| inner(x, e)).collect()
    }

    /// `F c`
    pub fn combine(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.d];
        for (c, e) in coeffs.iter().zip(&self.columns) {
            axpy(*c, e, &mut out);
        }
        out
    }

    /// `x − F F* x`
    pub fn project_out(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut r = x.to_vec();
        for e in &self.columns {
            let c = inner(&r, e);
            axpy(-c, e, &mut r);
        }
        r
    }

    /// First `k` columns.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(Error::dimension(format!(
                "cannot keep {k} columns of a {}-frame",
                self.n()
            )));
        }
        Ok(Self {
            d: self.d,
            columns: self.columns[..k].to_vec(),
        })
    }

    /// Column `k` of the result is column `pi⁻¹(k)` of `self`, i.e. old
    /// column `j` moves to slot `pi[j]`. `pi` must be a validated permutation.
    pub(crate) fn permuted_unchecked(&self, pi: &[usize]) -> Self {
        let mut columns = vec![Vec::new(); self.n()];
        for (j, &target) in pi.iter().enumerate() {
            columns[target] = self.columns[j].clone();
        }
        Self { d: self.d, columns }
    }

    pub(crate) fn from_columns_unchecked(columns: Vec<Vec<Complex64>>) -> Self {
        Self {
            d: columns[0].len(),
            columns,
        }
    }
}

/// Haar-uniform `n`-frame in C^d: complex Gaussian columns, then
/// Gram–Schmidt. Fails with a dimension error when `n > d`.
pub fn haar_frame(d: usize, n: usize, seed: u64) -> Result<Frame> {
    if n == 0 || n > d {
        return Err(Error::dimension(format!(
            "orthonormal {n}-frames in C^{d} do not exist (need 1 ≤ n ≤ d)"
        )));
    }
    let mut rng = rng_from_seed(seed);
    loop {
        let raw: Vec<Vec<Complex64>> = (0..n).map(|_| gaussian_vector(d, &mut rng)).collect();
        // A Gaussian draw is rank deficient with probability zero; redraw if it happens.
        match Frame::orthonormalize(&raw) {
            Ok(f) => return Ok(f),
            Err(Error::Degenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Random unit vector orthogonal to the span of `frame`: a Gaussian draw
/// with the span projected out (twice), redrawn while the remainder is
/// shorter than [`EXTERIOR_MIN_NORM`]. `None` when `n = d`.
pub fn random_exterior_unit(frame: &Frame, rng: &mut Rng) -> Option<Vec<Complex64>> {
    if frame.n() >= frame.d() {
        return None;
    }
    loop {
        let g = gaussian_vector(frame.d(), rng);
        let r = frame.project_out(&frame.project_out(&g));
        let nr = norm(&r);
        if nr >= EXTERIOR_MIN_NORM * norm(&g).max(1.0) {
            return Some(scale(Complex64::new(1.0 / nr, 0.0), &r));
        }
    }
}

/// One-parameter perturbations of a frame whose derivative at `t = 0`
/// decides the first-order corner condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PathProbe {
    /// Column `j` follows `t·u + sqrt(1 − t²)·e_j` with `u` a unit vector
    /// orthogonal to the frame.
    ExteriorMix { j: usize, u: Vec<Complex64> },
    /// Columns `j`, `k` rotate inside their span:
    /// `e_j ← sqrt(1 − t²)·e_j + e^{iα} t·e_k`,
    /// `e_k ← sqrt(1 − t²)·e_k − e^{−iα} t·e_j`.
    PlanarRotation { j: usize, k: usize, alpha: f64 },
}

impl PathProbe {
    /// Column whose diagonal entry the probe differentiates.
    pub fn target(&self) -> usize {
        match self {
            PathProbe::ExteriorMix { j, .. } | PathProbe::PlanarRotation { j, .. } => *j,
        }
    }

    /// Checks the probe against `frame`: indices in range, and for
    /// exterior probes `‖u‖ = 1` and `|⟨u, e_l⟩| ≤ FRAME_TOL` for every column.
    pub fn validate(&self, frame: &Frame) -> Result<()> {
        match self {
            PathProbe::ExteriorMix { j, u } => {
                if *j >= frame.n() {
                    return Err(Error::contract(format!("probe column {j} outside a {}-frame", frame.n())));
                }
                if u.len() != frame.d() {
                    return Err(Error::contract(format!(
                        "exterior vector has length {}, frame lives in C^{}",
                        u.len(),
                        frame.d()
                    )));
                }
                if (norm(u) - 1.0).abs() > FRAME_TOL {
                    return Err(Error::contract("exterior vector is not a unit vector"));
                }
                if let Some(l) = frame
                    .columns()
                    .iter()
                    .position(|e| inner(u, e).norm() > FRAME_TOL)
                {
                    return Err(Error::contract(format!(
                        "exterior vector is not orthogonal to frame column {l}"
                    )));
                }
                Ok(())
            }
            PathProbe::PlanarRotation { j, k, alpha } => {
                if frame.n() < 2 {
                    return Err(Error::dimension("planar rotations need a frame with n ≥ 2"));
                }
                if *j >= frame.n() || *k >= frame.n() {
                    return Err(Error::contract("planar rotation index outside the frame"));
                }
                if j == k {
                    return Err(Error::contract("planar rotation needs two distinct columns"));
                }
                if !alpha.is_finite() {
                    return Err(Error::invalid("planar rotation phase is not finite"));
                }
                Ok(())
            }
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t.abs() > PATH_T_MAX {
        return Err(Error::contract(format!(
            "path parameter t = {t} outside [−{PATH_T_MAX}, {PATH_T_MAX}]"
        )));
    }
    Ok(())
}

/// Frame at parameter `t` on an exterior-mix path.
pub fn exterior_mix_point(frame: &Frame, probe: &PathProbe, t: f64) -> Result<Frame> {
    let PathProbe::ExteriorMix { j, u } = probe else {
        return Err(Error::contract("exterior_mix_point expects an exterior-mix probe"));
    };
    probe.validate(frame)?;
    check_t(t)?;
    let c = (1.0 - t * t).sqrt();
    let mut columns = frame.columns().to_vec();
    columns[*j] = frame.columns()[*j]
        .iter()
        .zip(u)
        .map(|(e, u)| e * c + u * t)
        .collect();
    Ok(Frame::from_columns_unchecked(columns))
}

/// Frame at parameter `t` on a planar-rotation path.
pub fn planar_rotation_point(frame: &Frame, probe: &PathProbe, t: f64) -> Result<Frame> {
    let PathProbe::PlanarRotation { j, k, alpha } = probe else {
        return Err(Error::contract("planar_rotation_point expects a planar-rotation probe"));
    };
    probe.validate(frame)?;
    check_t(t)?;
    let c = (1.0 - t * t).sqrt();
    let phase = Complex64::from_polar(1.0, *alpha);
    let ej = frame.column(*j);
    let ek = frame.column(*k);
    let new_j = ej.iter().zip(ek).map(|(a, b)| a * c + phase * t * b).collect();
    let new_k = ek.iter().zip(ej).map(|(b, a)| b * c - phase.conj() * t * a).collect();
    let mut columns = frame.columns().to_vec();
    columns[*j] = new_j;
    columns[*k] = new_k;
    Ok(Frame::from_columns_unchecked(columns))
}

/// Frame at parameter `t` on either kind of path.
pub fn path_point(frame: &Frame, probe: &PathProbe, t: f64) -> Result<Frame> {
    match probe {
        PathProbe::ExteriorMix { .. } => exterior_mix_point(frame, probe, t),
        PathProbe::PlanarRotation { .. } => planar_rotation_point(frame, probe, t),
    }
}

/// `‖x − P x‖` with `P` the orthogonal projector onto the column span.
pub fn distance_to_span(x: &[Complex64], frame: &Frame) -> Result<f64> {
    if x.len() != frame.d() {
        return Err(Error::dimension(format!(
            "vector of length {} against a frame in C^{}",
            x.len(),
            frame.d()
        )));
    }
    let coeffs = frame.coefficients(x);
    let px = frame.combine(&coeffs);
    Ok(x.iter().zip(&px).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
}

/// Orthogonal projector `F F*` onto the span of a frame, as a d×d matrix.
pub fn span_projector(frame: &Frame) -> ComplexMatrix {
    let d = frame.d();
    let mut p = ComplexMatrix::zeros(d);
    for e in frame.columns() {
        for i in 0..d {
            for k in 0..d {
                p[(i, k)] += e[i] * e[k].conj();
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn haar_frame_is_orthonormal() {
        let f = haar_frame(3, 2, 42).unwrap();
        assert_eq!((f.d(), f.n()), (3, 2));
        assert!(f.gram_residual() <= 1e-10);
    }

    #[test]
    fn haar_frame_full_rank_in_c2() {
        for s in 0..20 {
            let f = haar_frame(2, 2, s).unwrap();
            let p = span_projector(&f);
            assert!(p.sub(&ComplexMatrix::identity(2)).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn haar_frame_rejects_oversized() {
        assert!(matches!(haar_frame(2, 3, 0), Err(Error::Dimension(_))));
        assert!(matches!(haar_frame(2, 0, 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn haar_frame_is_deterministic() {
        let a = haar_frame(5, 3, 1234).unwrap();
        let b = haar_frame(5, 3, 1234).unwrap();
        let bits = |f: &Frame| -> Vec<u64> {
            f.columns()
                .iter()
                .flatten()
                .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&haar_frame(5, 3, 1235).unwrap()));
    }

    #[test]
    fn haar_coordinate_second_moment() {
        // Haar symmetry: every coordinate of a Haar column has E|x|² = 1/d.
        let count = 100_000u64;
        let mean = (0..count)
            .map(|s| haar_frame(4, 1, derive_seed(7, 0, s)).unwrap().column(0)[0].norm_sqr())
            .sum::<f64>()
            / count as f64;
        assert!((mean - 0.25).abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn exterior_mix_examples() {
        let f = Frame::standard(2, 1).unwrap();
        let probe = PathProbe::ExteriorMix { j: 0, u: vec![ZERO, ONE] };
        assert_eq!(exterior_mix_point(&f, &probe, 0.0).unwrap(), f);
        let g = exterior_mix_point(&f, &probe, 0.5).unwrap();
        assert_abs_diff_eq!(g.column(0)[0].re, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.column(0)[1].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn exterior_mix_rejects_mismatched_probes() {
        let f = Frame::standard(3, 1).unwrap();
        let not_orth = PathProbe::ExteriorMix { j: 0, u: vec![ONE, ZERO, ZERO] };
        assert!(matches!(exterior_mix_point(&f, &not_orth, 0.1), Err(Error::ContractViolation(_))));
        let wrong_d = PathProbe::ExteriorMix { j: 0, u: vec![ZERO, ONE] };
        assert!(matches!(exterior_mix_point(&f, &wrong_d, 0.1), Err(Error::ContractViolation(_))));
        let ok = PathProbe::ExteriorMix { j: 0, u: vec![ZERO, ONE, ZERO] };
        assert!(exterior_mix_point(&f, &ok, 0.7).is_err());
    }

    #[test]
    fn exterior_mix_preserves_orthonormality() {
        let mut rng = rng_from_seed(17);
        for trial in 0..1000u64 {
            let d = rng.random_range(2..9);
            let n = rng.random_range(1..d);
            let f = haar_frame(d, n, trial).unwrap();
            let u = random_exterior_unit(&f, &mut rng).unwrap();
            let j = rng.random_range(0..n);
            let t = rng.random_range(-0.5..=0.5);
            let g = exterior_mix_point(&f, &PathProbe::ExteriorMix { j, u }, t).unwrap();
            assert!(g.gram_residual() <= 1e-12);
        }
    }

    #[test]
    fn planar_rotation_examples() {
        let f = Frame::standard(2, 2).unwrap();
        let probe = PathProbe::PlanarRotation { j: 0, k: 1, alpha: 0.0 };
        assert_eq!(planar_rotation_point(&f, &probe, 0.0).unwrap(), f);
        let g = planar_rotation_point(&f, &probe, 0.5).unwrap();
        let r3 = 3f64.sqrt() / 2.0;
        let expect = [[r3, 0.5], [-0.5, r3]];
        for (col, exp) in g.columns().iter().zip(expect) {
            for (z, e) in col.iter().zip(exp) {
                assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn planar_rotation_needs_two_columns() {
        let f = Frame::standard(3, 1).unwrap();
        let probe = PathProbe::PlanarRotation { j: 0, k: 1, alpha: 0.0 };
        assert!(matches!(planar_rotation_point(&f, &probe, 0.1), Err(Error::Dimension(_))));
        let f = Frame::standard(3, 2).unwrap();
        let same = PathProbe::PlanarRotation { j: 1, k: 1, alpha: 0.0 };
        assert!(planar_rotation_point(&f, &same, 0.1).is_err());
    }

    #[test]
    fn planar_rotation_keeps_span() {
        let mut rng = rng_from_seed(23);
        for trial in 0..1000u64 {
            let d = rng.random_range(2..9);
            let n = rng.random_range(2..=d);
            let f = haar_frame(d, n, trial).unwrap();
            let j = rng.random_range(0..n);
            let k = (j + rng.random_range(1..n)) % n;
            let alpha = rng.random_range(0.0..std::f64::consts::TAU);
            let t = rng.random_range(-0.5..=0.5);
            let g = planar_rotation_point(&f, &PathProbe::PlanarRotation { j, k, alpha }, t).unwrap();
            assert!(g.gram_residual() <= 1e-12);
            let diff = span_projector(&f).sub(&span_projector(&g)).frobenius_norm();
            assert!(diff <= 1e-12, "projector difference {diff}");
        }
    }

    #[test]
    fn paths_are_smooth() {
        // Second differences of every entry stay bounded on the whole parameter range.
        let mut rng = rng_from_seed(29);
        let f = haar_frame(5, 3, 3).unwrap();
        let u = random_exterior_unit(&f, &mut rng).unwrap();
        let probes = [
            PathProbe::ExteriorMix { j: 1, u },
            PathProbe::PlanarRotation { j: 0, k: 2, alpha: 0.7 },
        ];
        let h = 1e-3;
        for probe in &probes {
            let mut t = -0.5 + h;
            while t <= 0.5 - h {
                let a = path_point(&f, probe, t - h).unwrap();
                let b = path_point(&f, probe, t).unwrap();
                let c2 = path_point(&f, probe, t + h).unwrap();
                for col in 0..3 {
                    for i in 0..5 {
                        let second = (a.column(col)[i] - b.column(col)[i] * 2.0 + c2.column(col)[i]) / (h * h);
                        assert!(second.norm() <= 10.0);
                    }
                }
                t += 0.01;
            }
        }
    }

    #[test]
    fn distance_to_span_examples() {
        let f = Frame::standard(2, 1).unwrap();
        assert_abs_diff_eq!(distance_to_span(&[ZERO, ONE], &f).unwrap(), 1.0);
        assert_abs_diff_eq!(distance_to_span(&[ONE, ZERO], &f).unwrap(), 0.0);
        let s = FRAC_1_SQRT_2;
        assert_abs_diff_eq!(distance_to_span(&[c(s, 0.0), c(s, 0.0)], &f).unwrap(), s, epsilon = 1e-15);
        assert!(distance_to_span(&[ONE], &f).is_err());
    }

    #[test]
    fn distance_to_span_vanishes_on_combinations() {
        let mut rng = rng_from_seed(31);
        for trial in 0..200u64 {
            let f = haar_frame(7, 3, trial).unwrap();
            let coeffs = gaussian_vector(3, &mut rng);
            let x = f.combine(&coeffs);
            assert!(distance_to_span(&x, &f).unwrap() <= 1e-10 * norm(&x));
        }
    }

    #[test]
    fn frame_new_validates() {
        assert!(Frame::new(vec![vec![ONE, ZERO], vec![ONE, ZERO]]).is_err());
        assert!(matches!(
            Frame::new(vec![vec![ONE], vec![ONE], vec![ONE]]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn frame_serde_validates() {
        let f = haar_frame(3, 2, 5).unwrap();
        let repr = FrameRepr::from(f.clone());
        let back = Frame::try_from(repr).unwrap();
        assert_eq!(back, f);
        let bad = FrameRepr { d: 2, n: 2, columns: vec![vec![ONE, ZERO], vec![ONE, ZERO]] };
        assert!(Frame::try_from(bad).is_err());
    }
}
