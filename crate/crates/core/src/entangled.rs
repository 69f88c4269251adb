//! Entangled Markov operators and the ◇-form transition expectations built
//! from them.
//!
//! For a row-stochastic P the entangled operator is
//! `P(A)_ij = Σ_kl sqrt(P_ik P_jl) a_kl`, i.e. `R A Rᵀ` with `R = sqrt(P)`
//! entrywise. It is not unital in general; unitality is restored by the
//! Schur product with the first tensor factor.

use crate::error::{Error, Result};
use crate::matrix::{schur_product, ComplexMatrix};
use crate::model::{HiddenModel, StochasticMatrix};

fn check_dim(context: &str, expected: usize, m: &ComplexMatrix) -> Result<()> {
    if m.dim() != expected {
        return Err(Error::dims(context, expected, m.dim()));
    }
    Ok(())
}

/// Entangled operator `A ↦ R·A·Rᵀ` with `R` the entrywise square root of `p`.
pub fn apply_entangled(p: &StochasticMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim("apply_entangled", p.dim(), a)?;
    let r = p.sqrt_entries();
    Ok(&(&r * a) * &r.transpose())
}

/// Same map as [`apply_entangled`] evaluated as the quadruple sum over
/// (i, j, k, l). O(d⁴); used as a reference.
pub fn apply_entangled_direct(p: &StochasticMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim("apply_entangled_direct", p.dim(), a)?;
    let d = p.dim();
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                acc += a.get(k, l) * (p.get(i, k) * p.get(j, l)).sqrt();
            }
        }
        acc
    }))
}

/// 𝔈_H(a ⊗ b) = a ◇ P_H(b).
pub fn transition_expectation_h(model: &HiddenModel, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim("transition_expectation_h", model.dim(), a)?;
    schur_product(a, &apply_entangled(model.transition(), b)?)
}

/// 𝔈_{H,O}(a ⊗ b) = a ◇ P_{H,O}(b).
pub fn emission_operator_ho(model: &HiddenModel, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim("emission_operator_ho", model.dim(), a)?;
    schur_product(a, &apply_entangled(model.emission(), b)?)
}

/// Transition expectation of the underlying hidden chain,
/// 𝔈_H^{(O)}(a ⊗ b) = a ◇ P_{H,O}(id) ◇ P_H(b).
pub fn underlying_transition_expectation(
    model: &HiddenModel,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_dim("underlying_transition_expectation", model.dim(), a)?;
    let emission_id = apply_entangled(model.emission(), &ComplexMatrix::identity(model.dim()))?;
    schur_product(
        &schur_product(a, &emission_id)?,
        &apply_entangled(model.transition(), b)?,
    )
}
