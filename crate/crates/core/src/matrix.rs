//! Dense complex d×d matrices: the algebra M_d.
//!
//! Entries are stored row-major. Besides ordinary arithmetic this module
//! provides the Schur (entrywise) product, Kronecker products, matrix units
//! and the Hermitian/positivity/projection predicates the rest of the crate
//! relies on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{EPS_EQ, PSD_FLOOR};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::dims("matrix entries", dim * dim, data.len()));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix".into(),
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    /// All-ones matrix, the unit of the Schur product.
    pub fn ones(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ONE)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::dims(&format!("row {i}"), dim, row.len()));
            }
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    /// Builds a matrix from rows of real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance; panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// ‖A − A†‖_max.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.offdiagonal_max_abs() <= tol
    }

    pub fn offdiagonal_max_abs(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::dims("matmul", self.dim, rhs.dim));
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, rhs.dim, "elementwise op: dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .hermitian_part()
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Minimum eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let defect = self.hermitian_defect();
        if defect > EPS_EQ * (1.0 + self.max_abs()) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(self.hermitian_eigenvalues()[0])
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Matrix product; panics on dimension mismatch (use [`ComplexMatrix::matmul`]
    /// for a fallible version).
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product: dimension mismatch")
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self.rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Position (h, k) of a matrix unit, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixUnitIndex {
    pub row: usize,
    pub col: usize,
}

impl MatrixUnitIndex {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// e_{hk}: the matrix with a single 1 at row h, column k.
pub fn matrix_unit(idx: MatrixUnitIndex, dim: usize) -> Result<ComplexMatrix> {
    if idx.row >= dim || idx.col >= dim {
        return Err(Error::IndexOutOfRange {
            row: idx.row,
            col: idx.col,
            dim,
        });
    }
    let mut m = ComplexMatrix::zeros(dim);
    m[(idx.row, idx.col)] = ONE;
    Ok(m)
}

/// Entrywise (Schur/Hadamard) product a ◇ b.
pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != b.dim {
        return Err(Error::dims("schur_product", a.dim, b.dim));
    }
    Ok(a.zip_with(b, |x, y| x * y))
}

/// Kronecker product a ⊗ b; the (p, r), (s, t) entry sits at
/// row p·dim(b) + r, column s·dim(b) + t.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for p in 0..da {
        for s in 0..da {
            let x = a.get(p, s);
            if x == ZERO {
                continue;
            }
            for r in 0..db {
                for t in 0..db {
                    out.data[(p * db + r) * n + s * db + t] = x * b.get(r, t);
                }
            }
        }
    }
    out
}

/// True iff the smallest eigenvalue of the (Hermitian) matrix is ≥ `floor`.
pub fn is_psd(a: &ComplexMatrix, floor: f64) -> Result<bool> {
    Ok(a.min_eigenvalue()? >= floor)
}

/// Orthogonal projection: Hermitian and idempotent within [`EPS_EQ`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(ComplexMatrix);

impl Projection {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermitian_defect();
        if herm > EPS_EQ {
            return Err(Error::NotProjection {
                reason: format!("not Hermitian (defect {herm:e})"),
            });
        }
        let idem = (&matrix * &matrix).max_abs_diff(&matrix);
        if idem > EPS_EQ {
            return Err(Error::NotProjection {
                reason: format!("not idempotent (defect {idem:e})"),
            });
        }
        Ok(Self(matrix))
    }

    pub fn zero(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// Diagonal projection onto the canonical basis vectors flagged in `mask`.
    pub fn diagonal(mask: &[bool]) -> Self {
        let diag: Vec<Complex64> = mask.iter().map(|&m| if m { ONE } else { ZERO }).collect();
        Self(ComplexMatrix::from_diagonal(&diag))
    }

    /// e^⊥ = id − e.
    pub fn complement(&self) -> Self {
        Self(&ComplexMatrix::identity(self.dim()) - &self.0)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Rank, i.e. the (real) trace rounded to the nearest integer.
    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }
}

/// Checks that `rho` is a density matrix: Hermitian, PSD and unit trace.
pub fn check_density(rho: &ComplexMatrix) -> Result<()> {
    let defect = rho.hermitian_defect();
    if defect > EPS_EQ {
        return Err(Error::NotDensity {
            reason: format!("not Hermitian (defect {defect:e})"),
        });
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > 1e-9 {
        return Err(Error::NotDensity {
            reason: format!("trace is {}{:+}i, expected 1", tr.re, tr.im),
        });
    }
    let min_ev = rho.hermitian_eigenvalues()[0];
    if min_ev < PSD_FLOOR {
        return Err(Error::NotDensity {
            reason: format!("negative eigenvalue {min_ev:e}"),
        });
    }
    Ok(())
}
