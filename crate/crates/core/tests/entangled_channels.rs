use behmm_core::sample;
use behmm_core::{
    apply_entangled, apply_entangled_direct, channel_from_pair_map, emission_operator_ho, kron, matrix_unit,
    schur_product, transition_expectation_h, underlying_transition_expectation, validate_channel, ChannelKind,
    Complex64, ComplexMatrix, HiddenModel, MatrixUnitIndex, StochasticMatrix, EPS_EQ,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Σ_ijkl √(P_ik P_jl) a_ij b_kl e_ij, written out independently of the
/// library's Schur/entangled-operator path.
fn diamond_form_oracle(p: &StochasticMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[(i, j)] += a.get(i, j) * b.get(k, l) * (p.get(i, k) * p.get(j, l)).sqrt();
                }
            }
        }
    }
    out
}

/// Σ_{k,m,l,i,j} a_ij b_ml √(Q_ik Q_jk) √(Π_im Π_jl) e_ij.
fn underlying_oracle(model: &HiddenModel, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    let (t, q) = (model.transition(), model.emission());
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    for l in 0..d {
                        out[(i, j)] += a.get(i, j)
                            * b.get(m, l)
                            * (q.get(i, k) * q.get(j, k)).sqrt()
                            * (t.get(i, m) * t.get(j, l)).sqrt();
                    }
                }
            }
        }
    }
    out
}

#[test]
fn fast_path_matches_quadruple_sum() {
    let mut r = rng(1);
    for trial in 0..200 {
        let d = 1 + trial % 5;
        let p = sample::stochastic_matrix(&mut r, d, 0.25);
        let a = sample::complex_matrix(&mut r, d);
        let fast = apply_entangled(&p, &a).unwrap();
        let direct = apply_entangled_direct(&p, &a).unwrap();
        assert!(fast.max_abs_diff(&direct) <= 1e-12, "trial {trial}");
    }
}

#[test]
fn transition_and_emission_match_closed_form() {
    let mut r = rng(2);
    for _ in 0..50 {
        let d = r.gen_range(1..=3);
        let m = sample::hidden_model(&mut r, d);
        let a = sample::complex_matrix(&mut r, d);
        let b = sample::complex_matrix(&mut r, d);
        let h = transition_expectation_h(&m, &a, &b).unwrap();
        assert!(h.approx_eq(&diamond_form_oracle(m.transition(), &a, &b), 1e-12));
        let o = emission_operator_ho(&m, &a, &b).unwrap();
        assert!(o.approx_eq(&diamond_form_oracle(m.emission(), &a, &b), 1e-12));
    }
}

#[test]
fn underlying_matches_five_index_sum_and_composition() {
    let mut r = rng(3);
    let mut buf = Vec::new();
    for _ in 0..50 {
        let d = r.gen_range(1..=3);
        let m = sample::hidden_model(&mut r, d);
        let a = sample::complex_matrix(&mut r, d);
        let b = sample::complex_matrix(&mut r, d);
        let product_form = underlying_transition_expectation(&m, &a, &b).unwrap();
        assert!(product_form.approx_eq(&underlying_oracle(&m, &a, &b), 1e-12));

        let inner = emission_operator_ho(&m, &a, &ComplexMatrix::identity(d)).unwrap();
        let composed = transition_expectation_h(&m, &inner, &b).unwrap();
        assert!(product_form.approx_eq(&composed, EPS_EQ));
        buf.push(product_form.max_abs());
    }
    assert!(buf.iter().any(|&x| x > 0.1));
}

#[test]
fn entangled_operator_is_not_unital() {
    let uniform = StochasticMatrix::new("Pi", &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let img = apply_entangled(&uniform, &ComplexMatrix::identity(2)).unwrap();
    assert!(img.max_abs_diff(&ComplexMatrix::identity(2)) > 0.1);
    // ... while the Schur-product form restores unitality.
    let m = HiddenModel::new(vec![0.5, 0.5], uniform.clone(), uniform).unwrap();
    let id = ComplexMatrix::identity(2);
    assert!(transition_expectation_h(&m, &id, &id).unwrap().approx_eq(&id, EPS_EQ));
}

#[test]
fn channels_are_unital_and_cp_for_random_models() {
    let mut r = rng(4);
    for trial in 0..50 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        let id = ComplexMatrix::identity(d);
        for kind in ChannelKind::ALL {
            let ch = channel_from_pair_map(&m, kind);
            let report = validate_channel(&ch);
            assert!(report.min_choi_eigenvalue >= -1e-9, "{kind:?}: {report:?}");
            assert!(report.cp && report.unital, "{kind:?}: {report:?}");
            assert!(ch.apply_pair(&id, &id).unwrap().max_abs_diff(&id) <= EPS_EQ);
        }
    }
}

#[test]
fn channels_reproduce_pair_maps() {
    let mut r = rng(5);
    for _ in 0..30 {
        let d = r.gen_range(1..=3);
        let m = sample::hidden_model(&mut r, d);
        let a = sample::complex_matrix(&mut r, d);
        let b = sample::complex_matrix(&mut r, d);
        let pairs: [(ChannelKind, ComplexMatrix); 3] = [
            (ChannelKind::Hidden, transition_expectation_h(&m, &a, &b).unwrap()),
            (ChannelKind::Emission, emission_operator_ho(&m, &a, &b).unwrap()),
            (
                ChannelKind::Underlying,
                underlying_transition_expectation(&m, &a, &b).unwrap(),
            ),
        ];
        for (kind, expected) in pairs {
            let ch = channel_from_pair_map(&m, kind);
            assert!(ch.apply(&kron(&a, &b)).unwrap().approx_eq(&expected, 1e-12), "{kind:?}");
        }
    }
}

#[test]
fn hermitian_inputs_give_hermitian_outputs() {
    let mut r = rng(6);
    for _ in 0..50 {
        let d = r.gen_range(1..=4);
        let m = sample::hidden_model(&mut r, d);
        let a = sample::hermitian_matrix(&mut r, d);
        let b = sample::hermitian_matrix(&mut r, d);
        for out in [
            transition_expectation_h(&m, &a, &b).unwrap(),
            emission_operator_ho(&m, &a, &b).unwrap(),
            underlying_transition_expectation(&m, &a, &b).unwrap(),
        ] {
            assert!(out.is_hermitian(EPS_EQ));
        }
    }
}

#[test]
fn hidden_channel_single_unit_terms() {
    let mut r = rng(7);
    let m = sample::hidden_model(&mut r, 3);
    let ch = channel_from_pair_map(&m, ChannelKind::Hidden);
    let e = |h, k| matrix_unit(MatrixUnitIndex::new(h, k), 3).unwrap();
    for (i, j, k, l) in [(0, 1, 2, 0), (2, 2, 1, 1), (1, 0, 0, 2)] {
        let w = (m.transition().get(i, k) * m.transition().get(j, l)).sqrt();
        let got = ch.apply_pair(&e(i, j), &e(k, l)).unwrap();
        assert!(got.approx_eq(&e(i, j).scale(Complex64::new(w, 0.0)), 1e-15));
    }
}

#[test]
fn schur_with_positive_kernel_view() {
    // 𝔈_{H,O}(a ⊗ id) = a ◇ P_{H,O}(id) and P_{H,O}(id) = R Rᵀ is PSD.
    let mut r = rng(8);
    for _ in 0..20 {
        let d = r.gen_range(1..=4);
        let m = sample::hidden_model(&mut r, d);
        let kernel = apply_entangled(m.emission(), &ComplexMatrix::identity(d)).unwrap();
        assert!(behmm_core::is_psd(&kernel, -1e-9).unwrap());
        let a = sample::complex_matrix(&mut r, d);
        let lhs = emission_operator_ho(&m, &a, &ComplexMatrix::identity(d)).unwrap();
        assert!(lhs.approx_eq(&schur_product(&a, &kernel).unwrap(), 1e-14));
    }
}
