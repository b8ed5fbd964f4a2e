//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on plain row-major `Vec<Complex64>` storage; the
//! matrices involved are small (d at most a few hundred), so the kernels
//! favour simple, backward-stable algorithms over blocked ones.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius mass (relative) at which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 60;
/// Relative residual below which Gram–Schmidt declares a vector dependent.
pub const RANK_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `⟨x, y⟩ = Σ x_i conj(y_i)`, linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y ← y + a·x`
pub fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(a: Complex64, x: &[Complex64]) -> Vec<Complex64> {
    x.iter().map(|z| a * z).collect()
}

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    d: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Validating constructor: `entries` must hold `d²` finite values, row-major.
    pub fn new(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if entries.len() != d * d {
            return Err(Error::invalid(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { d, entries })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            entries: vec![ZERO; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Builds a matrix from row slices; panics on ragged input (test helper).
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "rows must form a square matrix");
        Self {
            d,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `d`, `d` of them).
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let d = cols.len();
        let mut m = Self::zeros(d);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), d);
            for i in 0..d {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.d).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.d;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.d);
        (0..self.d)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `T* x` without forming the adjoint.
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        let mut out = vec![ZERO; d];
        for (i, &xi) in x.iter().enumerate().take(d) {
            if xi == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "dimension mismatch in matmul");
        let d = self.d;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        out
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            d: self.d,
            entries: self.entries.iter().map(|z| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "dimension mismatch in add");
        Self {
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-ONE))
    }

    /// `T − λI`
    pub fn shifted(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.d {
            out[(i, i)] -= lambda;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.d;
        let mut m = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    m = m.max(self[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.d).map(|i| self[(i, i)]).collect()
    }

    /// Operator 2-norm, `sqrt(λ_max(T*T))`.
    pub fn spectral_norm(&self) -> f64 {
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return 0.0;
        }
        // Scaling keeps T*T well inside the f64 range.
        let t = self.scaled(Complex64::new(1.0 / fro, 0.0));
        let gram = t.adjoint().matmul(&t);
        let eig = hermitian_eigensystem(&gram).expect("T*T is Hermitian by construction");
        fro * eig.values[0].max(0.0).sqrt()
    }

    /// `‖T − T*‖_F`
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.d;
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.frobenius_norm()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of(self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.d + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.d + j]
    }
}

/// Identifies the operator a cloud or certificate refers to: the dimension
/// plus a 64-bit FNV-1a hash of the little-endian entry bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub d: usize,
    pub hash: u64,
}

impl Fingerprint {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn of(t: &ComplexMatrix) -> Self {
        let mut hash = Self::FNV_OFFSET;
        for z in t.entries() {
            for b in z.re.to_le_bytes().into_iter().chain(z.im.to_le_bytes()) {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(Self::FNV_PRIME);
            }
        }
        Self { d: t.dim(), hash }
    }

    pub fn hex(&self) -> String {
        format!("{:016x}", self.hash)
    }
}

/// `H = (conj(w)·T + w·T*)/2`.
///
/// `⟨Hx, x⟩ = Re(conj(w)⟨Tx, x⟩)` for every `x`, so the quadratic form of `H`
/// is the component of the numerical range along `w`.
pub fn hermitian_part(t: &ComplexMatrix, w: Complex64) -> Result<ComplexMatrix> {
    if !w.is_finite() {
        return Err(Error::invalid("hermitian_part: non-finite weight"));
    }
    if t.entries().iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("hermitian_part: non-finite matrix entry"));
    }
    let d = t.dim();
    let wc = w.conj();
    let mut h = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] = (wc * t[(i, j)] + w * t[(j, i)].conj()) * 0.5;
        }
    }
    Ok(h)
}

/// Eigen-decomposition `H = V Λ V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V Λ V*`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.values.len();
        let mut out = ComplexMatrix::zeros(d);
        for k in 0..d {
            let v = self.vector(k);
            let lam = self.values[k];
            for i in 0..d {
                let a = v[i] * lam;
                for j in 0..d {
                    out[(i, j)] += a * v[j].conj();
                }
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps until the off-diagonal Frobenius mass drops to
/// `JACOBI_TOL·‖H‖_F` or `JACOBI_MAX_SWEEPS` sweeps have run.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    if h.entries().iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("hermitian_eigensystem: non-finite entry"));
    }
    let scale = h.frobenius_norm();
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::contract(format!(
            "matrix is not Hermitian: ‖H − H*‖ = {defect:e} exceeds {HERMITIAN_TOL:e}·‖H‖"
        )));
    }
    let d = h.dim();
    let mut vectors = ComplexMatrix::identity(d);
    if scale == 0.0 {
        return Ok(HermitianEigenSystem {
            values: vec![0.0; d],
            vectors,
        });
    }

    // Work on the exactly Hermitian average (H + H*)/2.
    let mut a = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
        }
        a[(i, i)].im = 0.0;
    }

    let off_mass = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_mass(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let b = a[(p, q)];
                let abs_b = b.norm();
                if abs_b == 0.0 {
                    continue;
                }
                let phase = b / abs_b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * abs_b).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A ← A G
                for r in 0..d {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c + arq * g_qp;
                    a[(r, q)] = arp * s + arq * g_qq;
                }
                // A ← G* A
                for r in 0..d {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = apr * c + aqr * g_qp.conj();
                    a[(q, r)] = apr * s + aqr * g_qq.conj();
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                // V ← V G
                for r in 0..d {
                    let vrp = vectors[(r, p)];
                    let vrq = vectors[(r, q)];
                    vectors[(r, p)] = vrp * c + vrq * g_qp;
                    vectors[(r, q)] = vrp * s + vrq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut sorted = ComplexMatrix::zeros(d);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..d {
            sorted[(r, new)] = vectors[(r, old)];
        }
    }
    Ok(HermitianEigenSystem {
        values,
        vectors: sorted,
    })
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass.
///
/// The first output is `input[0]` normalised. A vector whose residual after
/// projection falls below `RANK_TOL` (relative to its own norm) is reported
/// as [`Error::Degenerate`] with its index.
pub fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let d = first.len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::dimension("gram_schmidt: vectors of unequal length"));
    }
    if vectors.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::invalid("gram_schmidt: non-finite entry"));
    }
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let nv = norm(v);
        if nv == 0.0 || index >= d {
            return Err(Error::Degenerate { index });
        }
        let mut r = scale(Complex64::new(1.0 / nv, 0.0), v);
        for _pass in 0..2 {
            for q in &out {
                let c = inner(&r, q);
                axpy(-c, q, &mut r);
            }
        }
        let nr = norm(&r);
        if nr <= RANK_TOL {
            return Err(Error::Degenerate { index });
        }
        out.push(scale(Complex64::new(1.0 / nr, 0.0), &r));
    }
    Ok(out)
}

/// Smallest singular value of `T − λI`.
///
/// Computed from the Hermitian eigensystem of `A*A` (`A = T − λI`): the
/// eigenvector `v` of the smallest eigenvalue is taken and `‖Av‖` returned.
/// `‖Av‖` is the square root of the Rayleigh quotient, so it agrees with
/// `sqrt(λ_min(A*A))` to second order, but it does not inherit the
/// `sqrt(machine-eps)·‖A‖` floor that the plain square root has when `λ` is
/// an exact eigenvalue.
pub fn min_singular_value(t: &ComplexMatrix, lambda: Complex64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::invalid("min_singular_value: non-finite shift"));
    }
    if t.entries().iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("min_singular_value: non-finite entry"));
    }
    let a = t.shifted(lambda);
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    let an = a.scaled(Complex64::new(1.0 / fro, 0.0));
    let gram = an.adjoint().matmul(&an);
    let eig = hermitian_eigensystem(&gram)?;
    let v = eig.vector(t.dim() - 1);
    Ok(fro * norm(&an.matvec(&v)))
}
