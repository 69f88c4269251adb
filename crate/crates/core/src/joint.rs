//! Joint expectations of finite operator words.
//!
//! Words are finite cylinder elements: an [`OperatorWord`] is
//! `⊗_m j_{H_m}(a_m) j_{O_m}(b_m)` for m = 0..=n, a [`HiddenWord`] is
//! `a_0 ⊗ … ⊗ a_n` on the hidden chain alone. All nested formulas are
//! evaluated right to left exactly as they nest.

use num_complex::Complex64;

use crate::channel::QuantumChannelMap;
use crate::entangled::apply_entangled;
use crate::error::{Error, Result};
use crate::matrix::{check_density, kron, schur_product, ComplexMatrix};
use crate::model::HiddenModel;

/// Default cap on the number of summands the explicit index sums may visit.
pub const DEFAULT_SUMMAND_BUDGET: f64 = 1e8;

fn common_dim<'a>(mut mats: impl Iterator<Item = &'a ComplexMatrix>) -> Result<usize> {
    let d = mats.next().ok_or(Error::EmptyWord)?.dim();
    for (pos, m) in mats.enumerate() {
        if m.dim() != d {
            return Err(Error::dims(&format!("word factor {}", pos + 1), d, m.dim()));
        }
    }
    Ok(d)
}

/// Sequence of (a_m, b_m) pairs, m = 0..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWord {
    pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    dim: usize,
}

impl OperatorWord {
    pub fn new(pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let dim = common_dim(pairs.iter().flat_map(|(a, b)| [a, b]))?;
        Ok(Self { pairs, dim })
    }

    /// Word of `len` copies of (id, id).
    pub fn identity(dim: usize, len: usize) -> Self {
        let id = ComplexMatrix::identity(dim);
        Self {
            pairs: vec![(id.clone(), id); len],
            dim,
        }
    }

    pub fn pairs(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The hidden factors a_0, …, a_n.
    pub fn hidden_part(&self) -> HiddenWord {
        HiddenWord {
            factors: self.pairs.iter().map(|(a, _)| a.clone()).collect(),
            dim: self.dim,
        }
    }
}

/// Sequence of hidden-chain factors a_0, …, a_n.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenWord {
    factors: Vec<ComplexMatrix>,
    dim: usize,
}

impl HiddenWord {
    pub fn new(factors: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = common_dim(factors.iter())?;
        Ok(Self { factors, dim })
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Word with `factor` appended at the next position.
    pub fn then(mut self, factor: ComplexMatrix) -> Result<Self> {
        if factor.dim() != self.dim {
            return Err(Error::dims("appended factor", self.dim, factor.dim()));
        }
        self.factors.push(factor);
        Ok(self)
    }
}

/// Tr(w · y).
pub fn trace_product(w: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    let d = w.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += w.get(i, j) * y.get(j, i);
        }
    }
    acc
}

fn check_model_dim(model: &HiddenModel, dim: usize) -> Result<()> {
    if dim != model.dim() {
        return Err(Error::dims("word vs model", model.dim(), dim));
    }
    Ok(())
}

fn check_channel(name: &str, ch: &QuantumChannelMap, dim: usize) -> Result<()> {
    if ch.out_dim() != dim {
        return Err(Error::dims(&format!("{name} output"), dim, ch.out_dim()));
    }
    if ch.in_dim() != dim * dim {
        return Err(Error::dims(&format!("{name} input"), dim * dim, ch.in_dim()));
    }
    Ok(())
}

/// φ_{H,O} on a word of the bi-entangled model, via the recursion
/// `Y_n = a_n ◇ P_{H,O}(b_n) ◇ P_H(id)`,
/// `Y_m = a_m ◇ P_{H,O}(b_m) ◇ P_H(Y_{m+1})`, value `Tr(W₀ Y_0)`. O(n·d³).
pub fn joint_expectation_bi(model: &HiddenModel, w: &OperatorWord) -> Result<Complex64> {
    check_model_dim(model, w.dim())?;
    let mut y = ComplexMatrix::identity(w.dim());
    for (a, b) in w.pairs().iter().rev() {
        let emitted = schur_product(a, &apply_entangled(model.emission(), b)?)?;
        y = schur_product(&emitted, &apply_entangled(model.transition(), &y)?)?;
    }
    Ok(trace_product(model.initial_density(), &y))
}

/// φ_{H,O} on a word as the explicit multi-index sum obtained by expanding
/// every ◇ and every entangled operator in the recursion of
/// [`joint_expectation_bi`]:
///
/// ```text
/// Σ (W₀)_{l0 k0} · Π_{m=0..n} a_m[k_m,l_m] b_m[o_m,o'_m] √(Q_{k_m o_m} Q_{l_m o'_m})
///                · Π_{m=0..n-1} √(Π_{k_m k_{m+1}} Π_{l_m l_{m+1}})
///                · √(Π_{k_n h} Π_{l_n h})
/// ```
///
/// over k, l, o, o' ∈ D^{n+1} and h ∈ D: d^{4n+5} summands. No
/// intermediate matrices are formed. Fails with
/// [`Error::BudgetExceeded`] when the summand count exceeds `budget`.
pub fn joint_expectation_oracle(model: &HiddenModel, w: &OperatorWord, budget: f64) -> Result<Complex64> {
    check_model_dim(model, w.dim())?;
    let d = w.dim();
    let n = w.len() - 1;
    let required = (d as f64).powi(4 * n as i32 + 5);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let sp = sqrt_table(|i, j| model.transition().get(i, j), d);
    let sq = sqrt_table(|i, j| model.emission().get(i, j), d);
    let oracle = JointOracle {
        d,
        pairs: w.pairs(),
        w0: model.initial_density(),
        sp: &sp,
        sq: &sq,
    };
    let mut total = Complex64::new(0.0, 0.0);
    for k0 in 0..d {
        for l0 in 0..d {
            let weight = oracle.w0.get(l0, k0);
            total += oracle.descend(0, k0, l0, weight);
        }
    }
    Ok(total)
}

fn sqrt_table(entry: impl Fn(usize, usize) -> f64, d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|i| (0..d).map(|j| entry(i, j).sqrt()).collect()).collect()
}

struct JointOracle<'a> {
    d: usize,
    pairs: &'a [(ComplexMatrix, ComplexMatrix)],
    w0: &'a ComplexMatrix,
    sp: &'a [Vec<f64>],
    sq: &'a [Vec<f64>],
}

impl JointOracle<'_> {
    /// Sum over every index from position m onwards, given (k_m, l_m) and the
    /// scalar product of all factors fixed so far.
    fn descend(&self, m: usize, k: usize, l: usize, prefix: Complex64) -> Complex64 {
        let d = self.d;
        let (a, b) = &self.pairs[m];
        let mut total = Complex64::new(0.0, 0.0);
        for o in 0..d {
            for o2 in 0..d {
                let here = prefix * a.get(k, l) * b.get(o, o2) * (self.sq[k][o] * self.sq[l][o2]);
                if m + 1 == self.pairs.len() {
                    for h in 0..d {
                        total += here * (self.sp[k][h] * self.sp[l][h]);
                    }
                } else {
                    for k1 in 0..d {
                        for l1 in 0..d {
                            let step = here * (self.sp[k][k1] * self.sp[l][l1]);
                            total += self.descend(m + 1, k1, l1, step);
                        }
                    }
                }
            }
        }
        total
    }
}

/// Nested evaluation of an HQMP with arbitrary transition expectation `te`
/// and emission operator `em`:
/// `𝔈(𝔈_O(a_0⊗b_0) ⊗ 𝔈(𝔈_O(a_1⊗b_1) ⊗ … 𝔈(𝔈_O(a_n⊗b_n) ⊗ id)…))`,
/// then traced against `init`.
pub fn joint_expectation_generic(
    init: &ComplexMatrix,
    te: &QuantumChannelMap,
    em: &QuantumChannelMap,
    w: &OperatorWord,
) -> Result<Complex64> {
    let d = w.dim();
    check_channel("transition expectation", te, d)?;
    check_channel("emission operator", em, d)?;
    if init.dim() != d {
        return Err(Error::dims("initial density", d, init.dim()));
    }
    check_density(init)?;
    let mut y = ComplexMatrix::identity(d);
    for (a, b) in w.pairs().iter().rev() {
        let emitted = em.apply_pair(a, b)?;
        y = te.apply(&kron(&emitted, &y))?;
    }
    Ok(trace_product(init, &y))
}

/// E_{0]}(a_0 ⊗ … ⊗ a_n) = 𝔈(a_0 ⊗ 𝔈(a_1 ⊗ … ⊗ 𝔈(a_n ⊗ id)…)).
pub fn e0_of_word(te: &QuantumChannelMap, hw: &HiddenWord) -> Result<ComplexMatrix> {
    let d = hw.dim();
    check_channel("transition expectation", te, d)?;
    let mut y = ComplexMatrix::identity(d);
    for a in hw.factors().iter().rev() {
        y = te.apply(&kron(a, &y))?;
    }
    Ok(y)
}

/// φ(a_0 ⊗ … ⊗ a_n) = Tr(init · E_{0]}(a_0 ⊗ … ⊗ a_n)) for the chain (init, te).
pub fn hidden_expectation(init: &ComplexMatrix, te: &QuantumChannelMap, hw: &HiddenWord) -> Result<Complex64> {
    if init.dim() != hw.dim() {
        return Err(Error::dims("initial density", hw.dim(), init.dim()));
    }
    check_density(init)?;
    Ok(trace_product(init, &e0_of_word(te, hw)?))
}

/// E_{0]} of a hidden word under 𝔈_H, as the explicit sum over k- and
/// l-chains:
///
/// ```text
/// [k_0, l_0] ↦ Σ Π_{m<r} √(Π_{k_m k_{m+1}} Π_{l_m l_{m+1}}) a_m[k_m,l_m]
///              · a_r[k_r,l_r] Σ_j √(Π_{k_r j} Π_{l_r j})
/// ```
///
/// with d^{2r+3} summands for a word of length r+1.
pub fn hidden_lemma_formula(model: &HiddenModel, hw: &HiddenWord, budget: f64) -> Result<ComplexMatrix> {
    check_model_dim(model, hw.dim())?;
    let d = hw.dim();
    let r = hw.len() - 1;
    let required = (d as f64).powi(2 * r as i32 + 3);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let sp = sqrt_table(|i, j| model.transition().get(i, j), d);
    let factors = hw.factors();

    fn chain(factors: &[ComplexMatrix], sp: &[Vec<f64>], m: usize, k: usize, l: usize, prefix: Complex64) -> Complex64 {
        let d = sp.len();
        let here = prefix * factors[m].get(k, l);
        if m + 1 == factors.len() {
            let terminal: f64 = (0..d).map(|j| sp[k][j] * sp[l][j]).sum();
            return here * terminal;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for k1 in 0..d {
            for l1 in 0..d {
                total += chain(factors, sp, m + 1, k1, l1, here * (sp[k][k1] * sp[l][l1]));
            }
        }
        total
    }

    Ok(ComplexMatrix::from_fn(d, |k0, l0| {
        chain(factors, &sp, 0, k0, l0, Complex64::new(1.0, 0.0))
    }))
}
