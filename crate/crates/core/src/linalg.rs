//! Dense complex linear algebra for finite-dimensional quantum states.
//!
//! Matrices are row-major [`ComplexMatrix`] values over `Complex64`.
//! Hermitian eigendecomposition uses cyclic Jacobi sweeps with complex
//! Givens rotations: deterministic, dependency-free, and accurate to near
//! machine precision at the dimensions this crate targets (n ≤ 64).

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Result};

/// Hermiticity validation tolerance, relative to the largest entry.
const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed trace deviation for density matrices.
const TRACE_TOL: f64 = 1e-10;
/// Allowed negative eigenvalue magnitude for density matrices.
const PSD_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; fails if the rows are ragged or empty.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged or empty matrix rows".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Square matrix with the given real diagonal.
    pub fn real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i1 in 0..ra {
            for j1 in 0..ca {
                let a = self[(i1, j1)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..rb {
                    for j2 in 0..cb {
                        out[(i1 * rb + i2, j1 * cb + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Copy of column `j`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Outer product `u·v†`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Largest entry of `self − other` in absolute value.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A validated Hermitian matrix. Construction symmetrizes the input,
/// `M ← (M + M†)/2`, so rounding drift in the caller cancels out.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare { rows: mat.rows, cols: mat.cols });
        }
        if !mat.max_abs_entry().is_finite() {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let dev = mat.hermitian_deviation();
        let tol = HERMITIAN_TOL * (1.0 + mat.max_abs_entry());
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrize(mat))
    }

    /// For results that are Hermitian by construction (commutators,
    /// matrix functions, projector sandwiches). Still symmetrizes.
    pub(crate) fn symmetrize(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        let n = mat.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(mat[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (mat[(i, j)] + mat[(j, i)].conj()).scale(0.5);
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        Self { mat: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: ComplexMatrix::identity(n) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self { mat: ComplexMatrix::real_diagonal(diag) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Real trace of a Hermitian matrix.
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Eigendecomposition with ascending eigenvalues.
    pub fn eigen(&self) -> Spectrum {
        jacobi_hermitian(&self.mat)
    }
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semi-definite up to rounding.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    herm: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(herm: HermitianMatrix) -> Result<Self> {
        let tr = herm.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let spec = herm.eigen();
        let min_eig = spec.eigenvalues.first().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "not positive semi-definite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { herm })
    }

    /// For states that are PSD with unit trace by construction
    /// (mixtures, conjugations, partial traces of valid states).
    pub(crate) fn from_trusted(herm: HermitianMatrix) -> Self {
        debug_assert!((herm.trace() - 1.0).abs() <= 1e-8, "trace drifted: {}", herm.trace());
        Self { herm }
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.herm.matrix()
    }

    pub fn eigen(&self) -> Spectrum {
        self.herm.eigen()
    }

    /// The maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { herm: HermitianMatrix { mat: ComplexMatrix::identity(n).scale_re(1.0 / n as f64) } }
    }

    /// Convex mixture `Σ w_i ρ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("empty mixture".into()));
        }
        let n = parts[0].1.dim();
        let wsum: f64 = parts.iter().map(|(w, _)| *w).sum();
        if (wsum - 1.0).abs() > 1e-10 || parts.iter().any(|(w, _)| *w < -1e-14) {
            return Err(Error::InvalidArgument("mixture weights must form a probability vector".into()));
        }
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rho.dim() });
            }
            acc = &acc + &rho.matrix().scale_re(*w);
        }
        Ok(Self::from_trusted(HermitianMatrix::symmetrize(acc)))
    }
}

/// Eigendecomposition of a Hermitian matrix: `U · diag(λ) · U†`
/// reconstructs the input, eigenvalues ascending, eigenvectors in the
/// columns of `unitary`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub unitary: ComplexMatrix,
}

impl Spectrum {
    /// Transform a matrix into the eigenbasis: `U† M U`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.unitary.adjoint() * m) * &self.unitary
    }

    /// Assemble `U · diag(vals) · U†`.
    pub fn assemble(&self, vals: &[f64]) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        debug_assert_eq!(vals.len(), n);
        // U · diag(vals), then times U†.
        let mut ud = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ud[(i, j)] = self.unitary[(i, j)] * vals[j];
            }
        }
        &ud * &self.unitary.adjoint()
    }
}

const MAX_SWEEPS: usize = 60;

/// Cyclic Jacobi for complex Hermitian matrices. Each rotation zeroes one
/// off-diagonal pivot with a phased Givens rotation; sweeps repeat until
/// the off-diagonal norm falls below `1e-14 · ‖A‖_F`.
fn jacobi_hermitian(mat: &ComplexMatrix) -> Spectrum {
    let n = mat.rows();
    let mut a = mat.clone();
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm();
    if n > 1 && fro > 0.0 {
        let tol = 1e-14 * fro;
        let skip = 1e-18 * fro;
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, skip);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let unitary = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Spectrum { eigenvalues, unitary }
}

/// One Jacobi rotation zeroing the pivot `a[(p,q)]`. The 2×2 unitary is
/// `[[u·c, u·s], [−s, c]]` with `u = a_pq/|a_pq|` and the classic real
/// rotation `(c, s)` for the de-phased pivot.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, skip: f64) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= skip {
        return;
    }
    let u = apq.unscale(r);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let gpp = u.scale(c);
    let gpq = u.scale(s);

    let n = a.rows();
    // A ← A·G, then A ← G†·A; V ← V·G.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp - akq.scale(s);
        a[(k, q)] = akp * gpq + akq.scale(c);
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp - vkq.scale(s);
        v[(k, q)] = vkp * gpq + vkq.scale(c);
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * gpp.conj() - aqk.scale(s);
        a[(q, k)] = apk * gpq.conj() + aqk.scale(c);
    }
    // Analytic values for the transformed 2×2 block.
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
}

/// Which tensor factor of a bipartite system an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    One,
    Two,
}

/// Partial trace over the non-retained party of an `n1·n2`-dimensional
/// operator. `retain = Party::One` returns the `n1`-dimensional operator
/// `Tr₂ M`, and symmetrically for `Party::Two`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    n1: usize,
    n2: usize,
    retain: Party,
) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != n1 * n2 {
        return Err(Error::DimensionMismatch { expected: n1 * n2, found: m.rows() });
    }
    let out = match retain {
        Party::One => ComplexMatrix::from_fn(n1, n1, |i, j| {
            (0..n2).map(|k| m[(i * n2 + k, j * n2 + k)]).sum()
        }),
        Party::Two => ComplexMatrix::from_fn(n2, n2, |i, j| {
            (0..n1).map(|k| m[(k * n2 + i, k * n2 + j)]).sum()
        }),
    };
    Ok(out)
}

/// Partial trace of a state; the result is again a valid state.
pub fn partial_trace(
    rho: &DensityMatrix,
    n1: usize,
    n2: usize,
    retain: Party,
) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(rho.matrix(), n1, n2, retain)?;
    Ok(DensityMatrix::from_trusted(HermitianMatrix::symmetrize(reduced)))
}

/// The Hermitian commutator `i(ρA − Aρ)`.
pub fn commutator_i(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    let ra = rho.matrix() * a.matrix();
    let ar = a.matrix() * rho.matrix();
    let m = (&ra - &ar).scale(Complex64::new(0.0, 1.0));
    Ok(HermitianMatrix::symmetrize(m))
}

/// Apply a real scalar function to a Hermitian matrix through its
/// eigendecomposition: `U·φ(Λ)·U†`.
pub fn matrix_function(
    m: &HermitianMatrix,
    phi: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    let spec = m.eigen();
    let mut vals = Vec::with_capacity(spec.eigenvalues.len());
    for &lam in &spec.eigenvalues {
        let y = phi(lam);
        if !y.is_finite() {
            return Err(Error::Domain(format!(
                "matrix function undefined at eigenvalue {lam:.6e}"
            )));
        }
        vals.push(y);
    }
    Ok(HermitianMatrix::symmetrize(spec.assemble(&vals)))
}

/// Unitary conjugation `ρ_t = e^{itH} ρ e^{−itH}`.
pub fn time_evolve(rho: &DensityMatrix, h: &HermitianMatrix, t: f64) -> Result<DensityMatrix> {
    let n = rho.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.dim() });
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let spec = h.eigen();
    // e^{itH} = W·diag(e^{itλ})·W†
    let wd = ComplexMatrix::from_fn(n, n, |i, j| {
        spec.unitary[(i, j)] * Complex64::new(0.0, t * spec.eigenvalues[j]).exp()
    });
    let u = &wd * &spec.unitary.adjoint();
    let evolved = &(&u * rho.matrix()) * &u.adjoint();
    Ok(DensityMatrix::from_trusted(HermitianMatrix::symmetrize(evolved)))
}

/// `Var_ρ(A) = Tr ρA² − (Tr ρA)²`.
pub fn variance(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    let ra = rho.matrix() * a.matrix();
    let mean = ra.trace().re;
    let second = (&ra * a.matrix()).trace().re;
    Ok(second - mean * mean)
}

/// Pauli σx.
pub fn pauli_x() -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    m[(1, 0)] = Complex64::new(1.0, 0.0);
    HermitianMatrix::symmetrize(m)
}

/// Pauli σy.
pub fn pauli_y() -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(0.0, -1.0);
    m[(1, 0)] = Complex64::new(0.0, 1.0);
    HermitianMatrix::symmetrize(m)
}

/// Pauli σz.
pub fn pauli_z() -> HermitianMatrix {
    HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
}
