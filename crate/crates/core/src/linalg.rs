//! Small dense complex linear algebra.
//!
//! Everything here operates on `L x L` matrices with `L` at most a handful,
//! so the routines favour robustness over speed: a cyclic Jacobi sweep for
//! hermitian spectra and a Cholesky reduction for the hermitian-definite
//! generalized problem.

use std::ops::{Add, Deref, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, tol, Scalar};

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Complex<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: dim.max(1) * dim.max(1),
                found: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    /// Convenience for literal 2x2 (or larger) matrices given as rows.
    pub fn from_rows<const N: usize>(rows: [[Complex<T>; N]; N]) -> Self {
        Self::from_fn(N, |i, j| rows[i][j])
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        self.check_dim(other.dim);
        let n = self.dim;
        let mut acc = Complex::zero();
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * factor).collect(),
        }
    }

    /// `self += factor * other`, in place.
    pub fn add_scaled(&mut self, factor: T, other: &Self) {
        self.check_dim(other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * factor;
        }
    }

    pub fn mul_vec(&self, v: &ComplexVector<T>) -> ComplexVector<T> {
        self.check_dim(v.dim());
        let n = self.dim;
        ComplexVector::from_fn(n, |i| (0..n).map(|k| self[(i, k)] * v[k]).sum())
    }

    /// `U * self * U^*`.
    pub fn conjugate_by(&self, unitary: &Self) -> Self {
        &(unitary * self) * &unitary.adjoint()
    }

    /// Largest elementwise deviation `max |M - M^*|`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: T) -> bool {
        self.hermitian_defect() <= tolerance
    }

    /// `(M + M^*) / 2`, which also forces an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let half = lit::<T>(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.check_dim(other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    #[inline]
    fn check_dim(&self, other: usize) {
        assert_eq!(self.dim, other, "matrix dimension mismatch");
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.check_dim(rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.check_dim(rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.check_dim(rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector<T> {
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Self {
        assert!(!data.is_empty(), "vector dimension must be positive");
        Self { data }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self::new((0..dim).map(f).collect())
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        Self::from_fn(dim, |i| {
            if i == index {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= T::min_positive_value() {
            return Err(Error::NotUnitNorm {
                norm: norm.to_f64().unwrap_or(0.0),
            });
        }
        Ok(self.scale(Complex::new(norm.recip(), T::zero())))
    }

    pub fn is_unit(&self, tolerance: T) -> bool {
        (self.norm() - T::one()).abs() <= tolerance
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * *b)
            .sum()
    }

    /// `self * other^*`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        ComplexMatrix::from_fn(self.dim(), |i, j| self[i] * other[j].conj())
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::new(self.data.iter().map(|z| *z * factor).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > T::zero() {
            overlap.conj() / overlap.norm()
        } else {
            Complex::one()
        };
        self.max_abs_diff(&other.scale(phase))
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

/// Unit-norm pulse: a precoder `gamma` or an equalizer `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pulse<T>(ComplexVector<T>);

impl<T: Scalar> Pulse<T> {
    pub fn new(v: ComplexVector<T>) -> Result<Self> {
        if !v.is_unit(tol(1e-12)) {
            return Err(Error::NotUnitNorm {
                norm: v.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(v))
    }

    /// Rescales `v` to unit norm.
    pub fn normalize(v: &ComplexVector<T>) -> Result<Self> {
        Ok(Self(v.normalized()?))
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.0
    }

    pub fn into_vector(self) -> ComplexVector<T> {
        self.0
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        self.0.outer(&self.0)
    }
}

impl<T> Deref for Pulse<T> {
    type Target = ComplexVector<T>;
    fn deref(&self) -> &ComplexVector<T> {
        &self.0
    }
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    pub vectors: Vec<ComplexVector<T>>,
}

impl<T: Scalar> EigenSystem<T> {
    pub fn max_value(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn min_value(&self) -> T {
        self.values[0]
    }

    pub fn top_vector(&self) -> &ComplexVector<T> {
        self.vectors.last().expect("nonempty spectrum")
    }

    /// `sum_i lambda_i v_i v_i^*`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.vectors[0].dim());
        for (value, vector) in self.values.iter().zip(&self.vectors) {
            out.add_scaled(*value, &vector.outer(vector));
        }
        out
    }
}

fn hermitian_tolerance<T: Scalar>(m: &ComplexMatrix<T>) -> T {
    tol::<T>(1e-12) * m.max_abs().max(T::one())
}

fn ensure_hermitian<T: Scalar>(m: &ComplexMatrix<T>) -> Result<()> {
    let deviation = m.hermitian_defect();
    if deviation > hermitian_tolerance(m) {
        return Err(Error::NonHermitianInput {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a hermitian matrix,
/// computed by cyclic complex Jacobi rotations.
pub fn hermitian_eigensystem<T: Scalar>(m: &ComplexMatrix<T>) -> Result<EigenSystem<T>> {
    ensure_hermitian(m)?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let threshold = T::epsilon() * scale;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= threshold || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(T, ComplexVector<T>)> = (0..n)
        .map(|k| (a[(k, k)].re, ComplexVector::from_fn(n, |i| v[(i, k)])))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenSystem { values, vectors })
}

/// Annihilates `a[p][q]` with the unitary `V = diag-phase * Givens`, updating
/// `a <- V^* a V` and `v <- v V`.
fn jacobi_rotate<T: Scalar>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude.is_zero() {
        return;
    }
    let phase = apq / magnitude;
    let two = lit::<T>(2.0);
    let theta = (a[(q, q)].re - a[(p, p)].re) / (two * magnitude);
    let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
    let c = T::one() / t.hypot(T::one());
    let s = t * c;
    let n = a.dim();

    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;
    let rotate_columns = |m: &mut ComplexMatrix<T>| {
        for k in 0..n {
            let mkp = m[(k, p)];
            let mkq = m[(k, q)];
            m[(k, p)] = mkp * c + mkq * vqp;
            m[(k, q)] = mkp * s + mkq * vqq;
        }
    };
    rotate_columns(a);
    rotate_columns(v);
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * vqp.conj();
        a[(q, j)] = apj * s + aqj * vqq.conj();
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}

/// Largest eigenvalue of a hermitian matrix.
pub fn lambda_max<T: Scalar>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(hermitian_eigensystem(m)?.max_value())
}

/// Lower-triangular Cholesky factor `L` with `B = L L^*`.
pub fn cholesky<T: Scalar>(b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    ensure_hermitian(b)?;
    let n = b.dim();
    let mut l = ComplexMatrix::<T>::zeros(n);
    let floor = tol::<T>(1e-12);
    for j in 0..n {
        let mut pivot = b[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if pivot.is_nan() || pivot <= floor {
            return Err(Error::SingularDenominator);
        }
        let diag = pivot.sqrt();
        l[(j, j)] = Complex::new(diag, T::zero());
        for i in j + 1..n {
            let mut acc = b[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / diag;
        }
    }
    Ok(l)
}

/// Solves `L X = R` for lower-triangular `L`.
fn forward_solve<T: Scalar>(l: &ComplexMatrix<T>, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = l.dim();
    let mut x = ComplexMatrix::zeros(n);
    for col in 0..n {
        for i in 0..n {
            let mut acc = rhs[(i, col)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = acc / l[(i, i)];
        }
    }
    x
}

/// Solves `L^* x = y` for lower-triangular `L`.
fn adjoint_back_solve<T: Scalar>(l: &ComplexMatrix<T>, y: &ComplexVector<T>) -> ComplexVector<T> {
    let n = l.dim();
    let mut x = vec![Complex::zero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in i + 1..n {
            acc -= l[(k, i)].conj() * x[k];
        }
        x[i] = acc / l[(i, i)].conj();
    }
    ComplexVector::new(x)
}

/// Maximal generalized eigenpair of `A v = lambda B v` with `B` hermitian
/// positive definite. The returned vector has unit Euclidean norm.
///
/// When the top eigenvalue is repeated any unit vector of the top eigenspace
/// may be returned.
pub fn max_generalized_eigenpair<T: Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<(T, ComplexVector<T>)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    ensure_hermitian(a)?;
    if hermitian_eigensystem(b)?.min_value() <= tol::<T>(1e-12) {
        return Err(Error::SingularDenominator);
    }
    let l = cholesky(b)?;
    // L^-1 A L^-*  ==  L^-1 (L^-1 A)^*  for hermitian A.
    let left = forward_solve(&l, a);
    let reduced = forward_solve(&l, &left.adjoint()).hermitian_part();
    let eig = hermitian_eigensystem(&reduced)?;
    let lambda = eig.max_value();
    let v = adjoint_back_solve(&l, eig.top_vector()).normalized()?;
    Ok((lambda, v))
}

/// Orthogonal projector `v v^*` onto a unit vector.
pub fn rank_one_projector<T: Scalar>(v: &ComplexVector<T>) -> Result<ComplexMatrix<T>> {
    if !v.is_unit(tol(1e-12)) {
        return Err(Error::NotUnitNorm {
            norm: v.norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(v.outer(v))
}

/// `<v, M v> / <v, B v>`.
pub fn rayleigh_quotient<T: Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    v: &ComplexVector<T>,
) -> T {
    v.inner(&a.mul_vec(v)).re / v.inner(&b.mul_vec(v)).re
}
