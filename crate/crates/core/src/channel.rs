//! Linear maps M_{D_in} → M_d stored as Choi matrices.
//!
//! Index packing: the Choi matrix has dimension `out_dim · in_dim`; its row
//! index packs (output row i, input row k) as `i·in_dim + k` and its column
//! index packs (output column j, input column l) as `j·in_dim + l`, so that
//!
//! ```text
//! L(x)_ij = Σ_kl choi[(i,k),(j,l)] · x_kl
//! ```
//!
//! This is a simultaneous row/column permutation of the usual
//! `Σ e_kl ⊗ L(e_kl)` form, so L is completely positive iff `choi` is PSD.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entangled::{emission_operator_ho, transition_expectation_h, underlying_transition_expectation};
use crate::error::{Error, Result};
use crate::matrix::{kron, matrix_unit, ComplexMatrix, MatrixUnitIndex};
use crate::model::HiddenModel;
use crate::{EPS_EQ, PSD_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct QuantumChannelMap {
    in_dim: usize,
    out_dim: usize,
    choi: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    in_dim: usize,
    out_dim: usize,
    choi: ComplexMatrix,
}

impl TryFrom<ChannelRepr> for QuantumChannelMap {
    type Error = Error;

    fn try_from(r: ChannelRepr) -> Result<Self> {
        QuantumChannelMap::from_choi(r.in_dim, r.out_dim, r.choi)
    }
}

impl From<QuantumChannelMap> for ChannelRepr {
    fn from(c: QuantumChannelMap) -> Self {
        ChannelRepr {
            in_dim: c.in_dim,
            out_dim: c.out_dim,
            choi: c.choi,
        }
    }
}

/// Which of the model's ◇-form maps to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Hidden transition expectation 𝔈_H.
    #[serde(rename = "H")]
    Hidden,
    /// Emission operator 𝔈_{H,O}.
    #[serde(rename = "HO")]
    Emission,
    /// Underlying-chain transition expectation 𝔈_H^{(O)}.
    #[serde(rename = "underlying")]
    Underlying,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Hidden, ChannelKind::Emission, ChannelKind::Underlying];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Hidden => "H",
            ChannelKind::Emission => "HO",
            ChannelKind::Underlying => "underlying",
        }
    }
}

impl QuantumChannelMap {
    pub fn from_choi(in_dim: usize, out_dim: usize, choi: ComplexMatrix) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("channel", "dimensions must be positive"));
        }
        if choi.dim() != in_dim * out_dim {
            return Err(Error::dims("choi matrix", in_dim * out_dim, choi.dim()));
        }
        Ok(Self { in_dim, out_dim, choi })
    }

    /// Materializes a linear map by evaluating it on every matrix unit of
    /// M_{in_dim}.
    pub fn from_linear_map<F>(in_dim: usize, out_dim: usize, mut map: F) -> Result<Self>
    where
        F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let n = in_dim * out_dim;
        let mut choi = ComplexMatrix::zeros(n);
        for k in 0..in_dim {
            for l in 0..in_dim {
                let image = map(&matrix_unit(MatrixUnitIndex::new(k, l), in_dim)?)?;
                if image.dim() != out_dim {
                    return Err(Error::dims("linear map image", out_dim, image.dim()));
                }
                for i in 0..out_dim {
                    for j in 0..out_dim {
                        choi[(i * in_dim + k, j * in_dim + l)] = image.get(i, j);
                    }
                }
            }
        }
        Self::from_choi(in_dim, out_dim, choi)
    }

    /// Linear extension of a map defined on elementary tensors a ⊗ b of
    /// M_d ⊗ M_d. The matrix unit of M_{d²} at ((p,r),(s,t)) is e_ps ⊗ e_rt.
    pub fn from_pair_map<F>(dim: usize, mut pair: F) -> Result<Self>
    where
        F: FnMut(&ComplexMatrix, &ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let mut units = Vec::with_capacity(dim * dim);
        for h in 0..dim {
            for k in 0..dim {
                units.push(matrix_unit(MatrixUnitIndex::new(h, k), dim)?);
            }
        }
        let in_dim = dim * dim;
        let mut choi = ComplexMatrix::zeros(in_dim * dim);
        for p in 0..dim {
            for s in 0..dim {
                for r in 0..dim {
                    for t in 0..dim {
                        let image = pair(&units[p * dim + s], &units[r * dim + t])?;
                        if image.dim() != dim {
                            return Err(Error::dims("pair map image", dim, image.dim()));
                        }
                        let (k, l) = (p * dim + r, s * dim + t);
                        for i in 0..dim {
                            for j in 0..dim {
                                choi[(i * in_dim + k, j * in_dim + l)] = image.get(i, j);
                            }
                        }
                    }
                }
            }
        }
        Self::from_choi(in_dim, dim, choi)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.in_dim {
            return Err(Error::dims("channel input", self.in_dim, x.dim()));
        }
        let (din, dout) = (self.in_dim, self.out_dim);
        Ok(ComplexMatrix::from_fn(dout, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..din {
                for l in 0..din {
                    let xkl = x.get(k, l);
                    if xkl != Complex64::new(0.0, 0.0) {
                        acc += self.choi.get(i * din + k, j * din + l) * xkl;
                    }
                }
            }
            acc
        }))
    }

    /// L(a ⊗ b).
    pub fn apply_pair(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(&kron(a, b))
    }
}

/// Materializes one of the model's ◇-form maps as a channel on M_{d²}.
pub fn channel_from_pair_map(model: &HiddenModel, kind: ChannelKind) -> QuantumChannelMap {
    let d = model.dim();
    let built = match kind {
        ChannelKind::Hidden => QuantumChannelMap::from_pair_map(d, |a, b| transition_expectation_h(model, a, b)),
        ChannelKind::Emission => QuantumChannelMap::from_pair_map(d, |a, b| emission_operator_ho(model, a, b)),
        ChannelKind::Underlying => {
            QuantumChannelMap::from_pair_map(d, |a, b| underlying_transition_expectation(model, a, b))
        }
    };
    built.expect("model maps are defined on all of M_d ⊗ M_d")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub cp: bool,
    pub unital: bool,
    pub min_choi_eigenvalue: f64,
    pub unitality_defect: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.cp && self.unital
    }
}

/// Checks complete positivity (Choi spectrum) and unitality. A Choi matrix
/// that is not Hermitian is reported as not CP.
pub fn validate_channel(ch: &QuantumChannelMap) -> ValidationReport {
    let hermitian = ch.choi.hermitian_defect() <= EPS_EQ * (1.0 + ch.choi.max_abs());
    let min_choi_eigenvalue = ch.choi.hermitian_eigenvalues()[0];
    let unitality_defect = ch
        .apply(&ComplexMatrix::identity(ch.in_dim))
        .expect("identity has input dimension")
        .max_abs_diff(&ComplexMatrix::identity(ch.out_dim));
    ValidationReport {
        cp: hermitian && min_choi_eigenvalue >= PSD_FLOOR,
        unital: unitality_defect <= EPS_EQ,
        min_choi_eigenvalue,
        unitality_defect,
    }
}
