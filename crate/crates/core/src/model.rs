//! Classical model data: row-stochastic matrices and the hidden model λ = (π, Π, Q).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{check_density, ComplexMatrix};
use crate::EPS_STOCH;

/// d×d row-stochastic matrix with nonnegative real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    /// Validates `rows`; `name` is used in error messages.
    pub fn new(name: &str, rows: &[Vec<f64>]) -> Result<Self> {
        Self::build(name, rows, false)
    }

    /// Like [`StochasticMatrix::new`] but rescales each row to sum to one
    /// instead of rejecting rows that are off by more than the tolerance.
    /// Negative entries and zero rows are still rejected.
    pub fn new_renormalized(name: &str, rows: &[Vec<f64>]) -> Result<Self> {
        Self::build(name, rows, true)
    }

    fn build(name: &str, rows: &[Vec<f64>], renormalize: bool) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid(name, "matrix is empty"));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(
                    format!("{name}[{i}]"),
                    format!("row has {} entries, expected {dim}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::invalid(format!("{name}[{i}][{j}]"), "entry is not finite"));
                }
                if x < -EPS_STOCH {
                    return Err(Error::invalid(
                        format!("{name}[{i}][{j}]"),
                        format!("negative entry {x}"),
                    ));
                }
            }
            // Negative-within-tolerance entries are clamped before any sqrt.
            let clamped: Vec<f64> = row.iter().map(|&x| x.max(0.0)).collect();
            let sum: f64 = clamped.iter().sum();
            if renormalize {
                if sum <= 0.0 {
                    return Err(Error::invalid(format!("{name}[{i}]"), "row sums to zero"));
                }
                entries.extend(clamped.iter().map(|x| x / sum));
            } else {
                if (sum - 1.0).abs() > EPS_STOCH {
                    return Err(Error::invalid(
                        format!("{name}[{i}]"),
                        format!("row sums to {sum}, expected 1"),
                    ));
                }
                entries.extend(clamped);
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Entrywise square root as a complex matrix (the R in R·A·Rᵀ).
    pub fn sqrt_entries(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| Complex64::new(self.get(i, j).sqrt(), 0.0))
    }

    /// Action on a column vector, (P·y)_i = Σ_l P_il y_l.
    pub fn apply_to_vector(&self, y: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|l| y[l] * self.get(i, l)).sum())
            .collect()
    }
}

/// Hidden Markov model λ = (π, Π, Q) together with the initial density W₀.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenModel {
    pi: Vec<f64>,
    transition: StochasticMatrix,
    emission: StochasticMatrix,
    initial_density: ComplexMatrix,
}

impl HiddenModel {
    /// Builds the model with the diagonal initial density W₀ = Σ_j π_j e_jj.
    pub fn new(pi: Vec<f64>, transition: StochasticMatrix, emission: StochasticMatrix) -> Result<Self> {
        let d = transition.dim();
        if emission.dim() != d {
            return Err(Error::invalid(
                "Q",
                format!("dimension {} does not match Pi dimension {d}", emission.dim()),
            ));
        }
        if pi.len() != d {
            return Err(Error::invalid(
                "pi",
                format!("length {} does not match d = {d}", pi.len()),
            ));
        }
        for (j, &p) in pi.iter().enumerate() {
            if !p.is_finite() || p < -EPS_STOCH {
                return Err(Error::invalid(format!("pi[{j}]"), format!("invalid probability {p}")));
            }
        }
        let pi: Vec<f64> = pi.into_iter().map(|p| p.max(0.0)).collect();
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > EPS_STOCH {
            return Err(Error::invalid("pi", format!("sums to {total}, expected 1")));
        }
        let initial_density = diagonal_density(&pi);
        Ok(Self {
            pi,
            transition,
            emission,
            initial_density,
        })
    }

    /// Replaces the default diagonal W₀ with an arbitrary density matrix.
    pub fn with_initial_density(mut self, w0: ComplexMatrix) -> Result<Self> {
        if w0.dim() != self.dim() {
            return Err(Error::invalid(
                "W0",
                format!("dimension {} does not match d = {}", w0.dim(), self.dim()),
            ));
        }
        check_density(&w0).map_err(|e| Error::invalid("W0", e.to_string()))?;
        self.initial_density = w0;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.transition.dim()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Hidden stochastic matrix Π.
    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    /// Emission stochastic matrix Q.
    pub fn emission(&self) -> &StochasticMatrix {
        &self.emission
    }

    /// W₀, the density of the initial state φ_{H,0} = Tr(W₀ ·).
    pub fn initial_density(&self) -> &ComplexMatrix {
        &self.initial_density
    }

    /// True when W₀ is the diagonal density built from π.
    pub fn has_default_density(&self) -> bool {
        self.initial_density == diagonal_density(&self.pi)
    }
}

fn diagonal_density(pi: &[f64]) -> ComplexMatrix {
    let diag: Vec<Complex64> = pi.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    ComplexMatrix::from_diagonal(&diag)
}
