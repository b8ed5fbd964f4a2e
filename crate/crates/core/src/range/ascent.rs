//! Riemannian gradient ascent on the complex Stiefel manifold.
//!
//! Maximises `f(F) = Σ_j Re(conj(w_j)⟨Te_j, e_j⟩) = Σ_j ⟨H_j e_j, e_j⟩`
//! with `H_j = hermitian_part(T, w_j)`. The Euclidean gradient has columns
//! `2 H_j e_j`; it is projected onto the tangent space by
//! `G ↦ G − F·herm(F*G)` and steps are retracted with Gram–Schmidt.
//! Step sizes come from Armijo backtracking starting at 1.
//!
//! Gradient steps crawl when two candidate vertices nearly tie, so every run
//! ends with an exact block-coordinate polish: each column is replaced by the
//! top eigenvector of its `H_j` compressed to the complement of the other
//! columns, and each pair `(j, k)` is rotated inside its span by the top
//! eigenvector of the 2×2 compression of `H_j − H_k`. Both updates are
//! global maximizers of their subproblem, so the objective never decreases.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tau, STREAM_RESTART};
use crate::error::{Error, Result};
use crate::frames::{derive_seed, haar_frame, Frame};
use crate::numerics::{gram_schmidt, hermitian_eigensystem, inner, norm, ComplexMatrix};

/// Unit-norm tolerance on support directions.
pub const DIRECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOptions {
    pub max_iter: usize,
    /// Stop once `‖grad‖ ≤ grad_tol·‖T‖`.
    pub grad_tol: f64,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo_slope: f64,
    pub max_backtracks: usize,
    /// After an accepted step `s`, the next search starts at
    /// `min(growth·s, max_step)`; the first search starts at `initial_step`.
    pub growth: f64,
    pub max_step: f64,
    /// Block-coordinate sweeps run after the gradient phase.
    pub polish_sweeps: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            grad_tol: 1e-8,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo_slope: 1e-4,
            max_backtracks: 60,
            growth: 2.0,
            max_step: 1e3,
            polish_sweeps: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportResult {
    pub direction: Vec<Complex64>,
    /// `Re⟨τ(T, maximizer), w⟩`
    pub value: f64,
    pub maximizer: Frame,
    pub restarts_used: usize,
    pub converged: bool,
    /// Final Riemannian gradient norm, relative to `‖T‖`.
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Outcome of one ascent run (on the normalised operator).
#[derive(Debug, Clone)]
pub struct AscentTrace {
    pub frame: Frame,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// `Σ_j Re(conj(w_j)⟨Te_j, e_j⟩)`
pub fn objective(t: &ComplexMatrix, w: &[Complex64], frame: &Frame) -> Result<f64> {
    let z = tau(t, frame)?;
    Ok(z.iter().zip(w).map(|(a, b)| (b.conj() * a).re).sum())
}

/// `H_j e_j = (conj(w_j) T e_j + w_j T* e_j)/2` for every column.
fn half_gradients(t: &ComplexMatrix, w: &[Complex64], columns: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    columns
        .iter()
        .zip(w)
        .map(|(e, &wj)| {
            let te = t.matvec(e);
            let tse = t.adjoint_matvec(e);
            te.iter()
                .zip(&tse)
                .map(|(a, b)| (wj.conj() * a + wj * b) * 0.5)
                .collect()
        })
        .collect()
}

/// `G − F·herm(F*G)`
fn project_tangent(columns: &[Vec<Complex64>], g: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = columns.len();
    // m[i][j] = e_i* g_j
    let m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| inner(&g[j], &columns[i])).collect())
        .collect();
    (0..n)
        .map(|j| {
            let mut xi = g[j].clone();
            for i in 0..n {
                let herm = (m[i][j] + m[j][i].conj()) * 0.5;
                for (x, e) in xi.iter_mut().zip(&columns[i]) {
                    *x -= herm * e;
                }
            }
            xi
        })
        .collect()
}

fn frob(cols: &[Vec<Complex64>]) -> f64 {
    cols.iter().map(|c| norm(c).powi(2)).sum::<f64>().sqrt()
}

/// Riemannian gradient of [`objective`] at `frame`, in the units of `t`.
pub fn riemannian_gradient(t: &ComplexMatrix, w: &[Complex64], frame: &Frame) -> Result<Vec<Vec<Complex64>>> {
    check_shapes(t, frame.n(), w)?;
    if frame.d() != t.dim() {
        return Err(Error::dimension("gradient: frame and operator dimensions differ"));
    }
    let g: Vec<Vec<Complex64>> = half_gradients(t, w, frame.columns())
        .into_iter()
        .map(|c| c.into_iter().map(|z| z * 2.0).collect())
        .collect();
    Ok(project_tangent(frame.columns(), &g))
}

fn check_shapes(t: &ComplexMatrix, n: usize, w: &[Complex64]) -> Result<()> {
    if n == 0 || n > t.dim() {
        return Err(Error::dimension(format!(
            "W_{n}(T) is empty for a {}-dimensional operator",
            t.dim()
        )));
    }
    if w.len() != n {
        return Err(Error::dimension(format!("direction has {} entries, expected {n}", w.len())));
    }
    if w.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("direction has a non-finite entry"));
    }
    let nw = norm(w);
    if nw == 0.0 {
        return Err(Error::ZeroDirection);
    }
    if (nw - 1.0).abs() > DIRECTION_TOL {
        return Err(Error::contract(format!("direction must be a unit vector, ‖w‖ = {nw}")));
    }
    Ok(())
}

/// Runs gradient ascent from `start` on `t` (which the caller is expected
/// to have normalised to unit spectral norm).
pub fn ascend_from(t: &ComplexMatrix, w: &[Complex64], start: &Frame, opts: &AscentOptions) -> Result<AscentTrace> {
    let mut cols = start.columns().to_vec();
    let mut hx = half_gradients(t, w, &cols);
    let mut iterations = 0;
    let mut gnorm;
    let mut first_step = opts.initial_step;
    loop {
        let g: Vec<Vec<Complex64>> = hx
            .iter()
            .map(|c| c.iter().map(|z| z * 2.0).collect())
            .collect();
        let xi = project_tangent(&cols, &g);
        gnorm = frob(&xi);
        if gnorm <= opts.grad_tol || iterations >= opts.max_iter {
            break;
        }
        let required = opts.armijo_slope * gnorm * gnorm;
        let mut step = first_step;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let trial: Vec<Vec<Complex64>> = cols
                .iter()
                .zip(&xi)
                .map(|(e, x)| e.iter().zip(x).map(|(a, b)| a + b * step).collect())
                .collect();
            if let Ok(next) = gram_schmidt(&trial) {
                let hx_next = half_gradients(t, w, &next);
                // f(F') − f(F) = Σ_j Re⟨H_j(e'_j + e_j), e'_j − e_j⟩, exact for Hermitian H_j
                // and free of the cancellation a plain difference of objectives suffers.
                let gain: f64 = (0..cols.len())
                    .map(|j| {
                        let sum: Vec<Complex64> = hx_next[j].iter().zip(&hx[j]).map(|(a, b)| a + b).collect();
                        let diff: Vec<Complex64> = next[j].iter().zip(&cols[j]).map(|(a, b)| a - b).collect();
                        inner(&sum, &diff).re
                    })
                    .sum();
                if gain >= required * step {
                    first_step = (step * opts.growth).min(opts.max_step);
                    accepted = Some((next, hx_next));
                    break;
                }
            }
            step *= opts.backtrack;
        }
        match accepted {
            Some((next, hx_next)) => {
                cols = next;
                hx = hx_next;
                iterations += 1;
            }
            None => break,
        }
    }
    if opts.polish_sweeps > 0 {
        cols = polish(t, w, cols, opts.polish_sweeps)?;
        let g: Vec<Vec<Complex64>> = half_gradients(t, w, &cols)
            .into_iter()
            .map(|c| c.into_iter().map(|z| z * 2.0).collect())
            .collect();
        gnorm = frob(&project_tangent(&cols, &g));
    }
    Ok(AscentTrace {
        frame: Frame::new(cols)?,
        iterations,
        gradient_norm: gnorm,
        converged: gnorm <= opts.grad_tol,
    })
}

fn h_matrix(t: &ComplexMatrix, wj: Complex64) -> ComplexMatrix {
    // (conj(w)T + wT*)/2, assembled directly: callers guarantee finite input
    t.scaled(wj.conj() * 0.5).add(&t.adjoint().scaled(wj * 0.5))
}

fn rayleigh(h: &ComplexMatrix, x: &[Complex64]) -> f64 {
    inner(&h.matvec(x), x).re
}

/// Exact block-coordinate sweeps; stops when a sweep gains less than
/// `1e-15` (the operator is normalised) or after `sweeps` sweeps.
fn polish(t: &ComplexMatrix, w: &[Complex64], mut cols: Vec<Vec<Complex64>>, sweeps: usize) -> Result<Vec<Vec<Complex64>>> {
    let d = t.dim();
    let n = cols.len();
    let hs: Vec<ComplexMatrix> = w.iter().map(|&wj| h_matrix(t, wj)).collect();
    let shift = 1.0 + hs.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max);
    for _ in 0..sweeps {
        let mut gain = 0.0;
        for j in 0..n {
            // P (H_j + shift) P, P projecting onto the complement of the other columns
            let mut basis = Vec::with_capacity(d);
            for i in 0..d {
                let mut x = vec![Complex64::new(0.0, 0.0); d];
                x[i] = Complex64::new(1.0, 0.0);
                for (l, e) in cols.iter().enumerate() {
                    if l != j {
                        let c = inner(&x, e);
                        x.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                    }
                }
                basis.push(x);
            }
            let p = ComplexMatrix::from_columns(&basis);
            let m = p.matmul(&hs[j].shifted(Complex64::new(-shift, 0.0))).matmul(&p);
            let m = m.add(&m.adjoint()).scaled(Complex64::new(0.5, 0.0));
            let top = hermitian_eigensystem(&m)?.vector(0);
            let mut u = p.matvec(&top);
            for (l, e) in cols.iter().enumerate() {
                if l != j {
                    let c = inner(&u, e);
                    u.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                }
            }
            let nu = norm(&u);
            if nu < 0.5 {
                continue;
            }
            u.iter_mut().for_each(|z| *z /= nu);
            let delta = rayleigh(&hs[j], &u) - rayleigh(&hs[j], &cols[j]);
            if delta > 0.0 {
                cols[j] = u;
                gain += delta;
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let m = hs[j].sub(&hs[k]);
                let (ej, ek) = (&cols[j], &cols[k]);
                let (mj, mk) = (m.matvec(ej), m.matvec(ek));
                let a = inner(&mj, ej).re;
                let b = inner(&mk, ej);
                let c = inner(&mk, ek).re;
                let small = ComplexMatrix::from_rows(&[
                    vec![Complex64::new(a, 0.0), b],
                    vec![b.conj(), Complex64::new(c, 0.0)],
                ]);
                let v = hermitian_eigensystem(&small)?.vector(0);
                let u1: Vec<Complex64> = ej.iter().zip(ek).map(|(x, y)| v[0] * x + v[1] * y).collect();
                let u2: Vec<Complex64> = ej
                    .iter()
                    .zip(ek)
                    .map(|(x, y)| -v[1].conj() * x + v[0].conj() * y)
                    .collect();
                let before = rayleigh(&hs[j], ej) + rayleigh(&hs[k], ek);
                let after = rayleigh(&hs[j], &u1) + rayleigh(&hs[k], &u2);
                if after > before {
                    let fixed = gram_schmidt(&[u1, u2])?;
                    cols[j] = fixed[0].clone();
                    cols[k] = fixed[1].clone();
                    gain += after - before;
                }
            }
        }
        if gain <= 1e-15 {
            break;
        }
    }
    // one re-orthonormalisation pass keeps the frame within tolerance after many rotations
    gram_schmidt(&cols)
}

/// Support value of `W_n(T)` in direction `w` with default options.
pub fn support_stiefel(
    t: &ComplexMatrix,
    n: usize,
    w: &[Complex64],
    restarts: usize,
    seed: u64,
) -> Result<SupportResult> {
    support_stiefel_with(t, n, w, restarts, seed, &AscentOptions::default(), &[])
}

/// Multi-start support ascent.
///
/// Runs from every frame in `warm_starts`, then from `restarts` Haar frames
/// seeded by `derive_seed(seed, ·, r)`. The reported value is evaluated on
/// the original operator at the returned maximizer, so it is always
/// attained (a certified lower bound of the true support). Ties within
/// `1e-12·‖T‖` keep the lowest run index.
pub fn support_stiefel_with(
    t: &ComplexMatrix,
    n: usize,
    w: &[Complex64],
    restarts: usize,
    seed: u64,
    opts: &AscentOptions,
    warm_starts: &[Frame],
) -> Result<SupportResult> {
    check_shapes(t, n, w)?;
    if restarts == 0 && warm_starts.is_empty() {
        return Err(Error::invalid("support ascent needs at least one restart"));
    }
    if warm_starts.iter().any(|f| f.n() != n || f.d() != t.dim()) {
        return Err(Error::dimension("warm-start frame has the wrong shape"));
    }
    let d = t.dim();
    let scale = t.spectral_norm();
    let normalized = if scale > 0.0 {
        t.scaled(Complex64::new(1.0 / scale, 0.0))
    } else {
        t.clone()
    };

    let starts: Vec<Frame> = warm_starts
        .iter()
        .cloned()
        .map(Ok)
        .chain((0..restarts as u64).map(|r| haar_frame(d, n, derive_seed(seed, STREAM_RESTART, r))))
        .collect::<Result<_>>()?;

    let runs = starts
        .par_iter()
        .map(|start| {
            let trace = ascend_from(&normalized, w, start, opts)?;
            let value = objective(t, w, &trace.frame)?;
            Ok((value, trace))
        })
        .collect::<Result<Vec<_>>>()?;

    let tie = 1e-12 * scale;
    let mut best = 0;
    for (i, (value, _)) in runs.iter().enumerate().skip(1) {
        if *value > runs[best].0 + tie {
            best = i;
        }
    }
    let (value, trace) = runs.into_iter().nth(best).expect("at least one run");
    Ok(SupportResult {
        direction: w.to_vec(),
        value,
        maximizer: trace.frame,
        restarts_used: starts.len(),
        converged: trace.converged,
        gradient_norm: trace.gradient_norm,
        iterations: trace.iterations,
    })
}
