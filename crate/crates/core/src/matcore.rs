//! Dense complex matrix algebra on `M_n(C)` with the normalized trace
//! `tau = tr / n`.
//!
//! Elements of the algebra are plain [`AlgElement`] matrices. Linear maps on
//! the algebra are [`SuperOp`]s, stored as `n^2 x n^2` matrices acting on the
//! row-major vectorization `vec(x)[p*n + q] = x[p, q]`. The scaled matrix
//! units `sqrt(n) e_pq` form a tau-orthonormal basis, and in that basis the
//! coordinate vector is `vec(x) / sqrt(n)`. Because the scaling is uniform, the
//! matrix of a superoperator is the same in both coordinate systems and the
//! adjoint with respect to `<x, y> = tau(x* y)` is the conjugate transpose.

use std::ops::{Add, Mul, Neg, Sub};

pub use nalgebra::Complex;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// An element of `M_n(C)`.
pub type AlgElement = DMatrix<C64>;

/// Relative tolerance for treating an input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> AlgElement {
    DMatrix::identity(n, n)
}

/// Matrix unit `e_pq`.
pub fn matrix_unit(n: usize, p: usize, q: usize) -> AlgElement {
    let mut e = DMatrix::zeros(n, n);
    e[(p, q)] = c64(1.0, 0.0);
    e
}

pub fn tau(x: &AlgElement) -> C64 {
    x.trace() / x.nrows() as f64
}

/// `tau(x* y)`.
pub fn tau_inner(x: &AlgElement, y: &AlgElement) -> Result<C64> {
    check_same_dim(x, y)?;
    let n = x.nrows();
    let s: C64 = x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(s / n as f64)
}

pub fn tau_norm(x: &AlgElement) -> f64 {
    (x.norm_squared() / x.nrows() as f64).sqrt()
}

/// `|x|^2 = x* x`.
pub fn abs_sq(x: &AlgElement) -> AlgElement {
    x.adjoint() * x
}

/// `(x + x*) / 2`.
pub fn hermitian_part(x: &AlgElement) -> AlgElement {
    (x + x.adjoint()) * c64(0.5, 0.0)
}

pub fn commutator(a: &AlgElement, b: &AlgElement) -> AlgElement {
    a * b - b * a
}

pub(crate) fn check_same_dim(x: &AlgElement, y: &AlgElement) -> Result<()> {
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.nrows(),
        });
    }
    Ok(())
}

/// Absolute asymmetry `max |A - A*|` of a square matrix.
pub fn hermitian_asymmetry(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn is_hermitian(a: &DMatrix<C64>, rel_tol: f64) -> bool {
    a.is_square() && hermitian_asymmetry(a) <= rel_tol * max_abs(a).max(1.0)
}

fn require_hermitian(a: &DMatrix<C64>, rel_tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let asym = hermitian_asymmetry(a);
    if asym > rel_tol * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

/// Spectral decomposition `A = U diag(values) U*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermEig {
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.reconstruct_with(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `max(1, largest |eigenvalue|)`.
    pub fn scale(&self) -> f64 {
        self.min().abs().max(self.max().abs()).max(1.0)
    }
}

/// Hermitian eigendecomposition, tolerating asymmetry up to [`HERMITIAN_TOL`]
/// relative to the largest entry.
pub fn herm_eig(a: &DMatrix<C64>) -> Result<HermEig> {
    herm_eig_tol(a, HERMITIAN_TOL)
}

pub(crate) fn herm_eig_tol(a: &DMatrix<C64>, rel_tol: f64) -> Result<HermEig> {
    require_hermitian(a, rel_tol)?;
    Ok(herm_eig_unchecked(a))
}

/// Eigendecomposition of the Hermitian part of `a`, without the symmetry check.
pub(crate) fn herm_eig_unchecked(a: &DMatrix<C64>) -> HermEig {
    let sym = (a + a.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermEig { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(a: &DMatrix<C64>) -> Result<Vec<f64>> {
    require_hermitian(a, HERMITIAN_TOL)?;
    let sym = (a + a.adjoint()) * c64(0.5, 0.0);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// `f(A)` for Hermitian `A` via the spectral theorem. Fails if `f` is not
/// finite on some eigenvalue.
pub fn mat_func(a: &AlgElement, f: impl Fn(f64) -> f64) -> Result<AlgElement> {
    let eig = herm_eig(a)?;
    for &l in &eig.values {
        if !f(l).is_finite() {
            return Err(Error::Domain { eigenvalue: l });
        }
    }
    Ok(eig.reconstruct_with(f))
}

/// Matrix logarithm of a positive definite matrix.
pub fn mat_log(a: &AlgElement) -> Result<AlgElement> {
    let eig = herm_eig(a)?;
    if let Some(&l) = eig.values.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Domain { eigenvalue: l });
    }
    Ok(eig.reconstruct_with(f64::ln))
}

/// Smallest eigenvalue and the verdict `min >= -tol * max(1, |A|)`.
pub fn psd_min_eig(a: &DMatrix<C64>, tol: f64) -> Result<(f64, bool)> {
    let vals = herm_eigenvalues(a)?;
    let min = vals.first().copied().unwrap_or(0.0);
    let max = vals.last().copied().unwrap_or(0.0);
    let scale = min.abs().max(max.abs()).max(1.0);
    Ok((min, min >= -tol * scale))
}

/// Smallest eigenvalue with a unit eigenvector.
pub fn bottom_eigpair(a: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    let eig = herm_eig(a)?;
    Ok((eig.min(), eig.vectors.column(0).into_owned()))
}

/// Row-major vectorization.
pub fn vectorize(x: &AlgElement) -> DVector<C64> {
    let n = x.nrows();
    DVector::from_fn(n * n, |k, _| x[(k / n, k % n)])
}

pub fn unvectorize(v: &DVector<C64>, n: usize) -> AlgElement {
    assert_eq!(v.len(), n * n, "vector length must be n^2");
    DMatrix::from_fn(n, n, |p, q| v[p * n + q])
}

/// The tau-orthonormal basis of scaled matrix units `f_(p*n+q) = sqrt(n) e_pq`.
#[derive(Clone, Debug)]
pub struct TauBasis {
    n: usize,
    elements: Vec<AlgElement>,
}

impl TauBasis {
    pub fn new(n: usize) -> Self {
        let s = (n as f64).sqrt();
        let elements = (0..n * n).map(|k| matrix_unit(n, k / n, k % n) * c64(s, 0.0)).collect();
        Self { n, elements }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[AlgElement] {
        &self.elements
    }

    /// Coordinates `<f_a, x>`.
    pub fn coords(&self, x: &AlgElement) -> DVector<C64> {
        vectorize(x) / c64((self.n as f64).sqrt(), 0.0)
    }

    pub fn element_from_coords(&self, c: &DVector<C64>) -> AlgElement {
        unvectorize(c, self.n) * c64((self.n as f64).sqrt(), 0.0)
    }
}

/// A linear map on `M_n(C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    n: usize,
    mat: DMatrix<C64>,
}

impl SuperOp {
    pub fn from_matrix(n: usize, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != n * n || mat.ncols() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: mat.nrows(),
            });
        }
        Ok(Self { n, mat })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            mat: DMatrix::identity(n * n, n * n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            mat: DMatrix::zeros(n * n, n * n),
        }
    }

    /// Assembles the matrix of `f` column by column on matrix units.
    pub fn from_fn(n: usize, f: impl Fn(&AlgElement) -> AlgElement) -> Self {
        let mut mat = DMatrix::zeros(n * n, n * n);
        for k in 0..n * n {
            let img = f(&matrix_unit(n, k / n, k % n));
            mat.set_column(k, &vectorize(&img));
        }
        Self { n, mat }
    }

    /// `x -> rho x`.
    pub fn left_mult(rho: &AlgElement) -> Self {
        let n = rho.nrows();
        Self {
            n,
            mat: rho.kronecker(&DMatrix::<C64>::identity(n, n)),
        }
    }

    /// `x -> x rho`.
    pub fn right_mult(rho: &AlgElement) -> Self {
        let n = rho.nrows();
        Self {
            n,
            mat: DMatrix::<C64>::identity(n, n).kronecker(&rho.transpose()),
        }
    }

    /// `x -> [v, x]`.
    pub fn commutator(v: &AlgElement) -> Self {
        let n = v.nrows();
        let id = DMatrix::<C64>::identity(n, n);
        Self {
            n,
            mat: v.kronecker(&id) - id.kronecker(&v.transpose()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn apply(&self, x: &AlgElement) -> AlgElement {
        assert_eq!(x.nrows(), self.n, "superoperator applied to element of wrong size");
        unvectorize(&(&self.mat * vectorize(x)), self.n)
    }

    pub fn try_apply(&self, x: &AlgElement) -> Result<AlgElement> {
        if x.nrows() != self.n || x.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.nrows(),
            });
        }
        Ok(self.apply(x))
    }

    /// Adjoint with respect to the tau inner product.
    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            mat: self.mat.adjoint(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SuperOp) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            mat: &self.mat * &other.mat,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            mat: &self.mat * c64(s, 0.0),
        }
    }

    /// `(T + T†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            n: self.n,
            mat: (&self.mat + self.mat.adjoint()) * c64(0.5, 0.0),
        }
    }

    pub fn is_self_adjoint(&self, rel_tol: f64) -> bool {
        is_hermitian(&self.mat, rel_tol)
    }

    /// Frobenius norm of the matrix.
    pub fn frobenius(&self) -> f64 {
        self.mat.norm()
    }

    /// Operator norm for a self-adjoint superoperator.
    pub fn self_adjoint_norm(&self) -> Result<f64> {
        let vals = herm_eigenvalues(&self.mat)?;
        Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// `T1 ⊗ T2` acting on `M_{n1} ⊗ M_{n2} = M_{n1 n2}`.
    pub fn tensor(&self, other: &SuperOp) -> Self {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        // vec index of M_{n1 n2} entry ((i1,i2),(j1,j2)) is ((i1 n2 + i2) n + j1 n2 + j2);
        // the Kronecker product of the factor matrices uses index
        // ((i1 n1 + j1) n2^2 + i2 n2 + j2).
        let big = self.mat.kronecker(&other.mat);
        let perm = |k: usize| {
            let (row, col) = (k / n, k % n);
            let (i1, i2) = (row / n2, row % n2);
            let (j1, j2) = (col / n2, col % n2);
            (i1 * n1 + j1) * n2 * n2 + i2 * n2 + j2
        };
        let idx: Vec<usize> = (0..n * n).map(perm).collect();
        let mat = DMatrix::from_fn(n * n, n * n, |r, c| big[(idx[r], idx[c])]);
        Self { n, mat }
    }
}

impl Add for &SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.n, rhs.n);
        SuperOp {
            n: self.n,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.n, rhs.n);
        SuperOp {
            n: self.n,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: &SuperOp) -> SuperOp {
        self.compose(rhs)
    }
}

impl Neg for &SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        SuperOp {
            n: self.n,
            mat: -&self.mat,
        }
    }
}

/// Kronecker product of algebra elements, `x ⊗ y` in `M_{n1 n2}`.
pub fn kron(x: &AlgElement, y: &AlgElement) -> AlgElement {
    x.kronecker(y)
}
