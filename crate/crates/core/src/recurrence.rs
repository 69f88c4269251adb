//! Stopping times, accessibility and recurrence diagnostics for a quantum
//! Markov chain (φ₀, 𝔈).
//!
//! Infinite objects (τ_{e;∞}, infinite sums over stopping times) are never
//! materialized: everything here is a truncation at a finite horizon N, and
//! the report says whether the truncation is backed by a decay certificate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_from_pair_map, validate_channel, ChannelKind, QuantumChannelMap};
use crate::error::{Error, Result};
use crate::joint::{e0_of_word, trace_product, HiddenWord};
use crate::matrix::{ComplexMatrix, Projection};
use crate::model::HiddenModel;
use crate::EPS_EQ;

/// r_N must fall below this for a numerical recurrence verdict.
pub const NUMERICAL_RESIDUAL_THRESHOLD: f64 = 1e-8;
/// Largest admissible ratio r_{n+1}/r_n over the decay window.
pub const DECAY_RATIO: f64 = 0.99;
/// Number of trailing ratios inspected for the decay check.
pub const DECAY_WINDOW: usize = 5;

/// A projection together with the truncation horizon N ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingTimeSpec {
    e: Projection,
    horizon: usize,
}

impl StoppingTimeSpec {
    pub fn new(e: Projection, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("horizon", "must be at least 1"));
        }
        Ok(Self { e, horizon })
    }

    pub fn projection(&self) -> &Projection {
        &self.e
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

fn word_of(factors: Vec<ComplexMatrix>) -> HiddenWord {
    HiddenWord::new(factors).expect("stopping-time words are nonempty with a common dimension")
}

/// τ_{e;k}: k copies of e^⊥ followed by e.
pub fn stopping_time_word(e: &Projection, k: usize) -> HiddenWord {
    let mut factors = vec![e.complement().into_matrix(); k];
    factors.push(e.matrix().clone());
    word_of(factors)
}

/// τ_{e;n;∞}: n + 1 copies of e^⊥ (the event has not occurred at times 0..=n).
pub fn tail_word(e: &Projection, n: usize) -> HiddenWord {
    word_of(vec![e.complement().into_matrix(); n + 1])
}

/// e followed by n copies of e^⊥: the event holds at time 0 and does not
/// return during times 1..=n.
pub fn no_return_word(e: &Projection, n: usize) -> HiddenWord {
    let mut factors = Vec::with_capacity(n + 1);
    factors.push(e.matrix().clone());
    factors.extend(std::iter::repeat_n(e.complement().into_matrix(), n));
    word_of(factors)
}

/// e ⊗ τ_{e;n}: e, then n copies of e^⊥, then e (first return at time n + 1).
pub fn first_return_word(e: &Projection, n: usize) -> HiddenWord {
    no_return_word(e, n).then(e.matrix().clone()).expect("same dimension")
}

/// q = Σ_ij |e^⊥_ij|.
pub fn complement_mass(e: &Projection) -> f64 {
    e.complement().matrix().as_slice().iter().map(|z| z.norm()).sum()
}

fn ensure_channel_dim(te: &QuantumChannelMap, e: &Projection) -> Result<()> {
    let d = e.dim();
    if te.out_dim() != d || te.in_dim() != d * d {
        return Err(Error::dims("channel vs projection", d, te.out_dim()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompleteAccessibility {
    pub accessible: bool,
    /// ‖E_{0]}(τ_{e;n;∞})‖_max for n = 0..=N.
    pub residual_norms: Vec<f64>,
}

/// Truncated test of E_{0]}(τ_{e;n;∞}) → 0.
///
/// Accessible iff ‖M_N‖_max ≤ `tol` and the norms are non-increasing over
/// the last ⌈N/2⌉ steps.
pub fn complete_accessibility(
    te: &QuantumChannelMap,
    spec: &StoppingTimeSpec,
    tol: f64,
) -> Result<CompleteAccessibility> {
    let e = spec.projection();
    ensure_channel_dim(te, e)?;
    let report = validate_channel(te);
    if !report.cp {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: report.min_choi_eigenvalue,
        });
    }
    if !report.unital {
        return Err(Error::NotUnital {
            defect: report.unitality_defect,
        });
    }
    let n_max = spec.horizon();
    let residual_norms = (0..=n_max)
        .map(|n| e0_of_word(te, &tail_word(e, n)).map(|m| m.max_abs()))
        .collect::<Result<Vec<_>>>()?;
    let window = n_max.div_ceil(2);
    let monotone = residual_norms[n_max - window..]
        .windows(2)
        .all(|w| w[1] <= w[0] + EPS_EQ);
    Ok(CompleteAccessibility {
        accessible: residual_norms[n_max] <= tol && monotone,
        residual_norms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RecurrentCertified,
    RecurrentNumerical,
    Inconclusive,
    Undefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::RecurrentCertified => "recurrent_certified",
            Verdict::RecurrentNumerical => "recurrent_numerical",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Undefined => "undefined",
        }
    }
}

/// φ-recurrence diagnostics of a projection on the underlying chain
/// (W₀, 𝔈_H^{(O)}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    /// Σ_ij |e^⊥_ij|.
    pub q: f64,
    /// 1/d.
    pub q_threshold: f64,
    pub bound_certified: bool,
    /// r_n = |φ(e ⊗ e^⊥ ⊗ … ⊗ e^⊥)| with n complement factors, n = 1..=N.
    pub residual_sequence: Vec<f64>,
    /// d²(dq)^{n−1}, n = 1..=N.
    pub bound_sequence: Vec<f64>,
    /// r_n ≤ d²(dq)^{n−1}(1 + 1e−9) for every n.
    pub bound_holds: bool,
    /// ‖Σ_{n≤N} E_{0]}(τ_{e;n}) + E_{0]}(τ_{e;N;∞}) − id‖_max.
    pub partition_defect: f64,
    /// φ(j_0(e)).
    pub phi_e: f64,
    /// φ(Σ_{n≤N} e ⊗ τ_{e;n}) / φ(j_0(e)).
    pub normalized_phi_sum: f64,
    /// d²(dq)^N / (1 − dq) when certified.
    pub tail_bound: Option<f64>,
    pub verdict: Verdict,
}

/// Diagnostics for φ_H^{(O)}-recurrence of `e` under the model's underlying
/// chain. Fails with [`Error::UndefinedRecurrence`] when φ(j_0(e)) ≤ ε.
pub fn phi_recurrence_report(model: &HiddenModel, spec: &StoppingTimeSpec) -> Result<RecurrenceReport> {
    let te = channel_from_pair_map(model, ChannelKind::Underlying);
    let report = evaluate_phi_recurrence(model.initial_density(), &te, spec)?;
    if report.verdict == Verdict::Undefined {
        return Err(Error::UndefinedRecurrence { phi_e: report.phi_e });
    }
    Ok(report)
}

/// Builds the report for an arbitrary chain (init, te) without failing on an
/// undefined verdict.
pub fn evaluate_phi_recurrence(
    init: &ComplexMatrix,
    te: &QuantumChannelMap,
    spec: &StoppingTimeSpec,
) -> Result<RecurrenceReport> {
    let e = spec.projection();
    ensure_channel_dim(te, e)?;
    if init.dim() != e.dim() {
        return Err(Error::dims("initial density", e.dim(), init.dim()));
    }
    let d = e.dim() as f64;
    let horizon = spec.horizon();
    let phi = |w: &HiddenWord| -> Result<Complex64> { Ok(trace_product(init, &e0_of_word(te, w)?)) };

    let q = complement_mass(e);
    let q_threshold = 1.0 / d;
    let bound_certified = q < q_threshold;

    let residual_sequence = (1..=horizon)
        .map(|n| phi(&no_return_word(e, n)).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    let bound_sequence: Vec<f64> = (1..=horizon).map(|n| d * d * (d * q).powi(n as i32 - 1)).collect();
    let bound_holds = residual_sequence
        .iter()
        .zip(&bound_sequence)
        .all(|(r, b)| *r <= b * (1.0 + 1e-9));

    let mut partition = e0_of_word(te, &tail_word(e, horizon))?;
    for n in 0..=horizon {
        partition = &partition + &e0_of_word(te, &stopping_time_word(e, n))?;
    }
    let partition_defect = partition.max_abs_diff(&ComplexMatrix::identity(e.dim()));

    let phi_e = phi(&word_of(vec![e.matrix().clone()]))?.re;
    let mut return_sum = Complex64::new(0.0, 0.0);
    for n in 0..=horizon {
        return_sum += phi(&first_return_word(e, n))?;
    }
    let normalized_phi_sum = if phi_e > EPS_EQ {
        return_sum.re / phi_e
    } else {
        f64::NAN
    };
    let tail_bound = bound_certified.then(|| d * d * (d * q).powi(horizon as i32) / (1.0 - d * q));

    let verdict = if phi_e <= EPS_EQ {
        Verdict::Undefined
    } else if bound_certified {
        Verdict::RecurrentCertified
    } else if numerically_decayed(&residual_sequence) {
        Verdict::RecurrentNumerical
    } else {
        Verdict::Inconclusive
    };

    Ok(RecurrenceReport {
        q,
        q_threshold,
        bound_certified,
        residual_sequence,
        bound_sequence,
        bound_holds,
        partition_defect,
        phi_e,
        normalized_phi_sum,
        tail_bound,
        verdict,
    })
}

fn numerically_decayed(residuals: &[f64]) -> bool {
    let Some(&last) = residuals.last() else {
        return false;
    };
    if last > NUMERICAL_RESIDUAL_THRESHOLD {
        return false;
    }
    let start = residuals.len().saturating_sub(DECAY_WINDOW + 1);
    residuals[start..]
        .windows(2)
        .all(|w| w[1] == 0.0 || w[1] <= DECAY_RATIO * w[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ERecurrenceCheck {
    /// Tr(E_{0]}(Σ_{n≤N} e ⊗ τ_{e;n})) / Tr(𝔈(e ⊗ id)).
    pub lhs: f64,
    /// ‖𝔈(e ⊗ E_{0]}(τ_{e;N;∞}))‖_max.
    pub residual: f64,
    pub satisfied: bool,
}

/// Truncated 𝔈-recurrence test: satisfied iff |lhs − 1| ≤ `tol` and the
/// never-return residual is ≤ `tol`.
pub fn e_recurrence_check(te: &QuantumChannelMap, spec: &StoppingTimeSpec, tol: f64) -> Result<ERecurrenceCheck> {
    let e = spec.projection();
    ensure_channel_dim(te, e)?;
    let id = ComplexMatrix::identity(e.dim());
    let trace = te.apply_pair(e.matrix(), &id)?.trace().re;
    if trace <= EPS_EQ {
        return Err(Error::DegenerateTrace { trace });
    }
    let horizon = spec.horizon();
    let mut partial = ComplexMatrix::zeros(e.dim());
    for n in 0..=horizon {
        partial = &partial + &e0_of_word(te, &first_return_word(e, n))?;
    }
    let lhs = partial.trace().re / trace;
    let residual = e0_of_word(te, &no_return_word(e, horizon + 1))?.max_abs();
    Ok(ERecurrenceCheck {
        lhs,
        residual,
        satisfied: (lhs - 1.0).abs() <= tol && residual <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accessibility {
    pub accessible: bool,
    pub first_m: Option<usize>,
}

/// Smallest m in 1..=`max_m` with E_{0]}(j_0(e) j_m(f)) ≠ 0 (max-norm above ε).
pub fn accessibility(te: &QuantumChannelMap, e: &Projection, f: &Projection, max_m: usize) -> Result<Accessibility> {
    ensure_channel_dim(te, e)?;
    if f.dim() != e.dim() {
        return Err(Error::dims("projection pair", e.dim(), f.dim()));
    }
    let id = ComplexMatrix::identity(e.dim());
    for m in 1..=max_m {
        let mut factors = vec![e.matrix().clone()];
        factors.extend(std::iter::repeat_n(id.clone(), m - 1));
        factors.push(f.matrix().clone());
        if e0_of_word(te, &word_of(factors))?.max_abs() > EPS_EQ {
            return Ok(Accessibility {
                accessible: true,
                first_m: Some(m),
            });
        }
    }
    Ok(Accessibility {
        accessible: false,
        first_m: None,
    })
}

/// e ↔ f: accessibility in both directions within `max_m` steps.
pub fn communicates(te: &QuantumChannelMap, e: &Projection, f: &Projection, max_m: usize) -> Result<bool> {
    Ok(accessibility(te, e, f, max_m)?.accessible && accessibility(te, f, e, max_m)?.accessible)
}
