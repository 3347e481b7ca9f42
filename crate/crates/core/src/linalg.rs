//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are stored row-major. Dimensions are desk-scale (at most 64 per
//! tensor factor), so there is no sparse support and every routine is a
//! straightforward dense loop. Hermitian eigendecomposition is delegated to
//! `nalgebra`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numeric;

/// Largest row or column count a matrix may have.
pub const MAX_DIMENSION: usize = 4096;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

fn all_finite(data: &[C64]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A complex column vector (state vector, multimode vector, eigenvector).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if !all_finite(&data) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(ComplexVector { data })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Ok(ComplexVector { data })
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::mismatch(self.dim(), other.dim()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: C64) -> ComplexVector {
        ComplexVector {
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<ComplexVector> {
        let norm = self.norm();
        if norm <= numeric::DIVISION_GUARD {
            return Err(Error::ZeroProbability(norm));
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        let (r, c) = (self.dim(), other.dim());
        let mut data = Vec::with_capacity(r * c);
        for a in &self.data {
            for b in &other.data {
                data.push(a * b.conj());
            }
        }
        ComplexMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Kronecker product with `self` as the slow index.
    pub fn tensor(&self, other: &ComplexVector) -> ComplexVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        ComplexVector { data }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

/// Dense row-major complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ComplexVector::dim);
        if columns.iter().any(|c| c.dim() != rows) {
            return Err(Error::Shape("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Option<C64> {
        (i < self.rows && j < self.cols).then(|| self.data[i * self.cols + j])
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            data: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> ComplexMatrix {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::mismatch(self.cols, v.dim()));
        }
        Ok(ComplexVector {
            data: (0..self.rows)
                .map(|i| self.row(i).iter().zip(&v.data).map(|(a, b)| a * b).sum())
                .collect(),
        })
    }

    /// `⟨u|M|v⟩`.
    pub fn sandwich(&self, u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
        u.inner(&self.mul_vector(v)?)
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "{}x{} and {}x{} differ",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.try_sub(other).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// `max |M − M†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |M M† − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self * &self.adjoint()).max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    pub fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    pub fn require_hermitian(&self, what: &'static str) -> Result<()> {
        self.require_square()?;
        let residual = self.hermiticity_residual();
        if residual > numeric::tolerance() {
            return Err(Error::constraint(what, "Hermitian", residual));
        }
        Ok(())
    }

    pub fn require_unitary(&self, what: &'static str) -> Result<()> {
        self.require_square()?;
        let residual = self.unitarity_residual();
        if residual > numeric::tolerance() {
            return Err(Error::constraint(what, "unitary", residual));
        }
        Ok(())
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        u.try_mul(self)?.try_mul(&u.adjoint())
    }

    /// Eigendecomposition of a Hermitian matrix: eigenvalues in ascending
    /// order and the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        self.require_hermitian("matrix")?;
        let n = self.rows;
        let sym = DMatrix::<C64>::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        self.eigh().map(|(values, _)| values)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DIMENSION || cols > MAX_DIMENSION {
        return Err(Error::SizeLimit(format!(
            "{rows}x{cols} exceeds the {MAX_DIMENSION} limit"
        )));
    }
    Ok(())
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::try_mul`] for fallible code.
impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}

/// Kronecker product `a ⊗ b`; the row index of `a` is the slow index, so
/// basis vector `|n⟩⊗|α⟩` sits at position `n·dim_b + α`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(Error::SizeLimit("tensor product dimension overflow".into())),
    };
    check_dims(rows, cols)?;
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    }))
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out one factor of an operator on `C^dim_a ⊗ C^dim_b`.
pub fn partial_trace(
    m: &ComplexMatrix,
    (dim_a, dim_b): (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    if dim_a == 0 || dim_b == 0 || dim_a.checked_mul(dim_b) != Some(n) {
        return Err(Error::Shape(format!(
            "{n}x{n} matrix does not factor as {dim_a}x{dim_b}"
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// `exp(−i h t)` for Hermitian `h`, via eigendecomposition.
pub fn matrix_exponential(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    let (values, vectors) = h.eigh()?;
    let phases: Vec<C64> = values
        .iter()
        .map(|&lambda| {
            let (s, c) = libm::sincos(-lambda * t);
            C64::new(c, s)
        })
        .collect();
    let n = values.len();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * phases[j]);
    scaled.try_mul(&vectors.adjoint())
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue modulus; the
/// largest eigenvalue for positive semidefinite input).
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    m.require_square()?;
    let values = m.eigenvalues_hermitian()?;
    Ok(values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}
