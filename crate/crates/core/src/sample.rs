//! Random model and operator generators for experiments and tests.

use num_complex::Complex64;
use rand::Rng;

use crate::matrix::{ComplexMatrix, Projection};
use crate::model::{HiddenModel, StochasticMatrix};

fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..1.0)
}

/// Entries with real and imaginary parts uniform in [-1, 1).
pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| Complex64::new(unit(rng), unit(rng)))
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(unit(rng), unit(rng))).collect()
}

pub fn hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    complex_matrix(rng, dim).hermitian_part()
}

/// X·X† for a random X.
pub fn psd_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let x = complex_matrix(rng, dim);
    &x * &x.adjoint()
}

/// Random full-rank density matrix.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let p = psd_matrix(rng, dim);
    let tr = p.trace();
    p.scale(Complex64::new(1.0 / tr.re, 0.0))
}

/// Row-stochastic matrix; each entry is zeroed with probability
/// `sparsity` (rows are never left empty).
pub fn stochastic_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, sparsity: f64) -> StochasticMatrix {
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| {
            let mut row: Vec<f64> = (0..dim)
                .map(|_| {
                    if rng.gen_bool(sparsity) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect();
            if row.iter().all(|&x| x == 0.0) {
                row[rng.gen_range(0..dim)] = 1.0;
            }
            row
        })
        .collect();
    StochasticMatrix::new_renormalized("random", &rows).expect("rows are nonnegative and nonzero")
}

/// Strictly positive probability vector.
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut pi: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Push the rounding residue into the last entry so Σπ = 1 to the last bit available.
    let head: f64 = pi[..dim - 1].iter().sum();
    pi[dim - 1] = 1.0 - head;
    pi
}

/// Random λ = (π, Π, Q) with strictly positive π and diagonal W₀.
pub fn hidden_model<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HiddenModel {
    let pi = probability_vector(rng, dim);
    let transition = stochastic_matrix(rng, dim, 0.2);
    let emission = stochastic_matrix(rng, dim, 0.2);
    HiddenModel::new(pi, transition, emission).expect("generated model is valid")
}

/// Orthogonal projection onto the span of `rank` random vectors.
pub fn projection_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Projection {
    assert!(rank <= dim, "rank exceeds dimension");
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v = complex_vector(rng, dim);
        for u in &basis {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let p = ComplexMatrix::from_fn(dim, |i, j| basis.iter().map(|u| u[i] * u[j].conj()).sum());
    // Symmetrize to remove rounding asymmetry before validation.
    Projection::new(p.hermitian_part()).expect("Gram–Schmidt output is a projection")
}

/// Projection of uniformly random rank in 0..=dim.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Projection {
    let rank = rng.gen_range(0..=dim);
    projection_of_rank(rng, dim, rank)
}
