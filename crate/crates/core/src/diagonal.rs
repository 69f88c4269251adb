//! Classical reference computations and the diagonal-restriction layer.
//!
//! On words of diagonal matrix units the underlying chain (W₀, 𝔈_H^{(O)})
//! reduces to the classical Markov chain (π, Π). Diagonal matrices are the
//! canonical-basis diagonal subalgebra; functions on D are represented by
//! their diagonal matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_from_pair_map, ChannelKind};
use crate::error::{Error, Result};
use crate::joint::{hidden_expectation, HiddenWord};
use crate::matrix::{matrix_unit, ComplexMatrix, MatrixUnitIndex};
use crate::model::HiddenModel;

/// Classical trajectory j_0, …, j_n (0-based states).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DiagonalWord(Vec<usize>);

impl DiagonalWord {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_range(&self, dim: usize) -> Result<()> {
        match self.0.iter().find(|&&j| j >= dim) {
            Some(&j) => Err(Error::IndexOutOfRange { row: j, col: j, dim }),
            None => Ok(()),
        }
    }

    /// The hidden word e_{j_0 j_0} ⊗ … ⊗ e_{j_n j_n}.
    pub fn to_hidden_word(&self, dim: usize) -> Result<HiddenWord> {
        let factors = self
            .0
            .iter()
            .map(|&j| matrix_unit(MatrixUnitIndex::new(j, j), dim))
            .collect::<Result<Vec<_>>>()?;
        HiddenWord::new(factors)
    }

    /// Every word of the given length over d states, in lexicographic order.
    pub fn all(dim: usize, len: usize) -> impl Iterator<Item = DiagonalWord> {
        let total = dim.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut idx = vec![0; len];
            for slot in idx.iter_mut().rev() {
                *slot = code % dim;
                code /= dim;
            }
            DiagonalWord(idx)
        })
    }
}

/// π_{j_0} · Π_{m<n} Π_{j_m j_{m+1}}.
pub fn classical_markov_probability(model: &HiddenModel, w: &DiagonalWord) -> Result<f64> {
    w.check_range(model.dim())?;
    let idx = w.indices();
    Ok(idx
        .windows(2)
        .fold(model.pi()[idx[0]], |p, s| p * model.transition().get(s[0], s[1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRestriction {
    pub quantum: f64,
    pub classical: f64,
    pub defect: f64,
}

/// Compares φ_H^{(O)} on the diagonal word with the classical path probability.
pub fn diagonal_restriction_check(model: &HiddenModel, w: &DiagonalWord) -> Result<DiagonalRestriction> {
    let classical = classical_markov_probability(model, w)?;
    let te = channel_from_pair_map(model, ChannelKind::Underlying);
    let value = hidden_expectation(model.initial_density(), &te, &w.to_hidden_word(model.dim())?)?;
    Ok(DiagonalRestriction {
        quantum: value.re,
        classical,
        defect: (value - Complex64::new(classical, 0.0)).norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalClosure {
    /// Largest off-diagonal modulus of 𝔈_H^{(O)}(diag(x) ⊗ diag(y)).
    pub image_offdiag_norm: f64,
    pub image_diag: Vec<Complex64>,
    /// max_i |image_diag_i − x_i (Π y)_i|.
    pub closed_form_defect: f64,
}

/// Applies 𝔈_H^{(O)} to diag(x) ⊗ diag(y) and compares with x_i (Π y)_i.
pub fn diagonal_closure_check(model: &HiddenModel, x: &[Complex64], y: &[Complex64]) -> Result<DiagonalClosure> {
    let d = model.dim();
    if x.len() != d {
        return Err(Error::dims("x", d, x.len()));
    }
    if y.len() != d {
        return Err(Error::dims("y", d, y.len()));
    }
    let te = channel_from_pair_map(model, ChannelKind::Underlying);
    let image = te.apply_pair(&ComplexMatrix::from_diagonal(x), &ComplexMatrix::from_diagonal(y))?;
    let py = model.transition().apply_to_vector(y);
    let image_diag = image.diagonal();
    let closed_form_defect = image_diag
        .iter()
        .zip(x.iter().zip(&py))
        .map(|(z, (xi, pyi))| (z - xi * pyi).norm())
        .fold(0.0, f64::max);
    Ok(DiagonalClosure {
        image_offdiag_norm: image.offdiagonal_max_abs(),
        image_diag,
        closed_form_defect,
    })
}
