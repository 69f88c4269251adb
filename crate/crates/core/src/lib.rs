//! Numerical engine for bi-entangled hidden quantum Markov models.
//!
//! A classical hidden Markov model λ = (π, Π, Q) induces entangled Markov
//! operators `P_H`, `P_{H,O}` and from them the ◇-form transition
//! expectation 𝔈_H, emission operator 𝔈_{H,O} and the transition
//! expectation 𝔈_H^{(O)} of the underlying hidden chain. This crate builds
//! these maps, evaluates joint expectations of finite operator words (by
//! recursion and by explicit index sums), runs recurrence and accessibility
//! diagnostics, and checks that the diagonal restriction is the classical
//! Markov chain (π, Π).
//!
//! Indices are 0-based throughout; the matrix unit `e_hk` has its single 1
//! at row h, column k.

pub mod channel;
pub mod diagonal;
pub mod entangled;
pub mod error;
pub mod joint;
pub mod matrix;
pub mod model;
pub mod recurrence;
pub mod sample;

pub use channel::{channel_from_pair_map, validate_channel, ChannelKind, QuantumChannelMap, ValidationReport};
pub use diagonal::{
    classical_markov_probability, diagonal_closure_check, diagonal_restriction_check, DiagonalClosure,
    DiagonalRestriction, DiagonalWord,
};
pub use entangled::{
    apply_entangled, apply_entangled_direct, emission_operator_ho, transition_expectation_h,
    underlying_transition_expectation,
};
pub use error::{Error, Result};
pub use joint::{
    e0_of_word, hidden_expectation, hidden_lemma_formula, joint_expectation_bi, joint_expectation_generic,
    joint_expectation_oracle, HiddenWord, OperatorWord, DEFAULT_SUMMAND_BUDGET,
};
pub use matrix::{is_psd, kron, matrix_unit, schur_product, ComplexMatrix, MatrixUnitIndex, Projection};
pub use model::{HiddenModel, StochasticMatrix};
pub use num_complex::Complex64;
pub use recurrence::{
    accessibility, communicates, complete_accessibility, e_recurrence_check, phi_recurrence_report, stopping_time_word,
    tail_word, Accessibility, CompleteAccessibility, ERecurrenceCheck, RecurrenceReport, StoppingTimeSpec, Verdict,
};

/// Max-norm tolerance for equality checks (Hermiticity, idempotence, unitality).
pub const EPS_EQ: f64 = 1e-10;
/// Eigenvalue floor for positive semidefiniteness.
pub const PSD_FLOOR: f64 = -1e-9;
/// Tolerance on row sums and probability vectors.
pub const EPS_STOCH: f64 = 1e-9;
