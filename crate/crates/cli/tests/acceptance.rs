//! Acceptance suite: each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use behmm_core::recurrence::complement_mass;
use behmm_core::sample;
use behmm_core::{
    apply_entangled, channel_from_pair_map, classical_markov_probability, diagonal_closure_check,
    diagonal_restriction_check, e0_of_word, e_recurrence_check, joint_expectation_bi, joint_expectation_generic,
    joint_expectation_oracle, phi_recurrence_report, stopping_time_word, tail_word, validate_channel, ChannelKind,
    Complex64, ComplexMatrix, DiagonalWord, HiddenModel, OperatorWord, Projection, StochasticMatrix, StoppingTimeSpec,
    Verdict, DEFAULT_SUMMAND_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{}; {:.2}s", out.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            out.passed = false;
            out.detail = format!("{} exceeds {}s", out.detail, limit.as_secs());
        }
    }
    out
}

fn random_word(r: &mut ChaCha8Rng, d: usize, len: usize) -> OperatorWord {
    OperatorWord::new(
        (0..len)
            .map(|_| (sample::complex_matrix(r, d), sample::complex_matrix(r, d)))
            .collect(),
    )
    .unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for d in 1..=3 {
        for len in 1..=3 {
            for _ in 0..100 {
                let m = sample::hidden_model(&mut r, d);
                let w = random_word(&mut r, d, len);
                let fast = joint_expectation_bi(&m, &w).unwrap();
                let slow = joint_expectation_oracle(&m, &w, DEFAULT_SUMMAND_BUDGET).unwrap();
                worst = worst.max((fast - slow).norm() / (1.0 + fast.norm()));
                cases += 1;
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{cases} cases, max relative difference {worst:.2e}"),
    )
}

fn channel_axioms() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1002);
    let (mut min_eig, mut max_defect) = (f64::INFINITY, 0.0f64);
    for trial in 0..50 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        let id = ComplexMatrix::identity(d);
        for kind in ChannelKind::ALL {
            let ch = channel_from_pair_map(&m, kind);
            min_eig = min_eig.min(validate_channel(&ch).min_choi_eigenvalue);
            max_defect = max_defect.max(ch.apply_pair(&id, &id).unwrap().max_abs_diff(&id));
        }
    }
    outcome(
        min_eig >= -1e-9 && max_defect <= 1e-12,
        format!("min Choi eigenvalue {min_eig:.2e}, max unitality defect {max_defect:.2e}"),
    )
}

fn entangledness_witness() -> Outcome {
    let uniform = StochasticMatrix::new("Pi", &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let id = ComplexMatrix::identity(2);
    let gap = apply_entangled(&uniform, &id).unwrap().max_abs_diff(&id);
    outcome(gap > 0.1, format!("uniform 2x2: |P_H(id) - id|_max = {gap}"))
}

fn classical_recovery() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1004);
    let mut worst = 0.0f64;
    let mut words = 0;
    for trial in 0..20 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        for len in 1..=4 {
            for w in DiagonalWord::all(d, len) {
                worst = worst.max(diagonal_restriction_check(&m, &w).unwrap().defect);
                words += 1;
            }
        }
    }
    let t = StochasticMatrix::new("Pi", &[vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap();
    let q = StochasticMatrix::new("Q", &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
    let m = HiddenModel::new(vec![0.5, 0.5], t, q).unwrap();
    let w = DiagonalWord::new(vec![0, 1]).unwrap();
    let worked = diagonal_restriction_check(&m, &w).unwrap();
    let classical = classical_markov_probability(&m, &w).unwrap();
    let worked_ok = (worked.quantum - 0.15).abs() <= 1e-12 && (classical - 0.15).abs() <= 1e-12;
    outcome(
        worst <= 1e-12 && worked_ok,
        format!(
            "{words} words, max defect {worst:.2e}; worked value {:.15}",
            worked.quantum
        ),
    )
}

fn diagonal_closure() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1005);
    let (mut offdiag, mut action) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let d = r.gen_range(1..=3);
        let m = sample::hidden_model(&mut r, d);
        let x = sample::complex_vector(&mut r, d);
        let y = sample::complex_vector(&mut r, d);
        let c = diagonal_closure_check(&m, &x, &y).unwrap();
        offdiag = offdiag.max(c.image_offdiag_norm);
        // x_i (Π y)_i computed here from the raw entries.
        for (i, (&xi, &img)) in x.iter().zip(&c.image_diag).enumerate() {
            let py: Complex64 = y.iter().enumerate().map(|(l, &yl)| yl * m.transition().get(i, l)).sum();
            action = action.max((img - xi * py).norm());
        }
    }
    outcome(
        offdiag <= 1e-12 && action <= 1e-12,
        format!("100 pairs, max off-diagonal {offdiag:.2e}, max action defect {action:.2e}"),
    )
}

fn partition_identity() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1006);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        let te = channel_from_pair_map(&m, ChannelKind::Underlying);
        let e = sample::projection(&mut r, d);
        for horizon in 0..=12 {
            let mut total = e0_of_word(&te, &tail_word(&e, horizon)).unwrap();
            for n in 0..=horizon {
                total = &total + &e0_of_word(&te, &stopping_time_word(&e, n)).unwrap();
            }
            worst = worst.max(total.max_abs_diff(&ComplexMatrix::identity(d)));
        }
    }
    outcome(worst <= 1e-10, format!("20 models, N = 0..=12, max defect {worst:.2e}"))
}

/// Draws projections until one has q < 1/d. Since q ≥ rank(e^⊥), only e = id qualifies.
fn certified_projection(r: &mut ChaCha8Rng, d: usize) -> (Projection, usize) {
    for attempt in 1.. {
        let e = sample::projection(r, d);
        if complement_mass(&e) < 1.0 / d as f64 {
            return (e, attempt);
        }
    }
    unreachable!()
}

fn recurrence_certificate() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1007);
    let horizon = 20;
    let mut failures = Vec::new();
    let mut draws = 0;
    for trial in 0..20 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        let (e, attempts) = certified_projection(&mut r, d);
        draws += attempts;
        let q = complement_mass(&e);
        let report = phi_recurrence_report(&m, &StoppingTimeSpec::new(e.clone(), horizon).unwrap()).unwrap();
        let df = d as f64;
        for (k, &r_n) in report.residual_sequence.iter().enumerate() {
            let n = k as i32 + 1;
            let bound = df * df * (df * q).powi(n - 1) * (1.0 + 1e-9);
            if r_n > bound {
                failures.push(format!("trial {trial} n={n}: {r_n} > {bound}"));
            }
        }
        if report.verdict != Verdict::RecurrentCertified {
            failures.push(format!("trial {trial}: verdict {}", report.verdict.as_str()));
        }
        let exact =
            phi_recurrence_report(&m, &StoppingTimeSpec::new(Projection::identity(d), horizon).unwrap()).unwrap();
        if exact.residual_sequence.iter().any(|&x| x != 0.0) {
            failures.push(format!("trial {trial}: e = id has nonzero residual"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 models, {draws} projections drawn to find q < 1/d (all have rank d); exact e = id residuals all zero{}",
            failure_suffix(&failures)
        ),
    )
}

fn normalized_sums() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1008);
    let horizon = 20;
    let mut failures = Vec::new();
    let (mut phi_gap, mut e_gap) = (0.0f64, 0.0f64);
    for trial in 0..20 {
        let d = 1 + trial % 3;
        let m = sample::hidden_model(&mut r, d);
        let (e, _) = certified_projection(&mut r, d);
        let spec = StoppingTimeSpec::new(e.clone(), horizon).unwrap();
        let report = phi_recurrence_report(&m, &spec).unwrap();
        let te = channel_from_pair_map(&m, ChannelKind::Underlying);
        let check = e_recurrence_check(&te, &spec, 1e-6).unwrap();
        phi_gap = phi_gap.max((report.normalized_phi_sum - 1.0).abs());
        e_gap = e_gap.max((check.lhs - 1.0).abs());
        let dq = d as f64 * complement_mass(&e);
        let expected_tail = (d * d) as f64 * dq.powi(horizon as i32) / (1.0 - dq);
        match report.tail_bound {
            Some(t) if (t - expected_tail).abs() <= 1e-15 * (1.0 + expected_tail) => {}
            other => failures.push(format!("trial {trial}: tail bound {other:?}, expected {expected_tail}")),
        }
    }
    outcome(
        failures.is_empty() && phi_gap <= 1e-6 && e_gap <= 1e-6,
        format!(
            "max |phi sum - 1| {phi_gap:.2e}, max |E sum - 1| {e_gap:.2e}{}",
            failure_suffix(&failures)
        ),
    )
}

fn generic_agreement() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1009);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = r.gen_range(1..=3);
        let m = sample::hidden_model(&mut r, d);
        let te = channel_from_pair_map(&m, ChannelKind::Hidden);
        let em = channel_from_pair_map(&m, ChannelKind::Emission);
        let len = r.gen_range(1..=4);
        let w = random_word(&mut r, d, len);
        let generic = joint_expectation_generic(m.initial_density(), &te, &em, &w).unwrap();
        worst = worst.max((generic - joint_expectation_bi(&m, &w).unwrap()).norm());
    }
    outcome(worst <= 1e-10, format!("100 words, max difference {worst:.2e}"))
}

fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn run_cli(args: &[String]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_behmm"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

fn cli_end_to_end() -> Outcome {
    let dir = examples_dir();
    let model = dir.join("model.json").display().to_string();
    let query = |name: &str| dir.join(name).display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), "--model".into(), model.clone()],
        vec![
            "joint".into(),
            "--model".into(),
            model.clone(),
            "--query".into(),
            query("joint.json"),
            "--oracle".into(),
        ],
        vec![
            "recurrence".into(),
            "--model".into(),
            model.clone(),
            "--query".into(),
            query("recurrence.json"),
        ],
        vec![
            "diagonal".into(),
            "--model".into(),
            model.clone(),
            "--query".into(),
            query("diagonal.json"),
        ],
    ];
    let mut failures = Vec::new();
    for cmd in &commands {
        for format in ["table", "structured"] {
            let mut args = cmd.clone();
            args.extend(["--format".to_string(), format.to_string()]);
            let (first, code1) = run_cli(&args);
            let (second, code2) = run_cli(&args);
            if code1 != Some(0) || code2 != Some(0) {
                failures.push(format!("{} {format}: exit {code1:?}/{code2:?}", cmd[0]));
            }
            if first != second || first.is_empty() {
                failures.push(format!("{} {format}: output differs between runs", cmd[0]));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("4 commands x 2 formats, run twice{}", failure_suffix(&failures)),
    )
}

fn failure_suffix(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", failures.join(" | "))
    }
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", secs(10), oracle_equivalence),
        ("channel axioms", secs(5), channel_axioms),
        ("entangledness witness", None, entangledness_witness),
        ("classical recovery", secs(5), classical_recovery),
        ("diagonal closure", None, diagonal_closure),
        ("partition identity", None, partition_identity),
        ("recurrence certificate", None, recurrence_certificate),
        ("normalized recurrence sums", None, normalized_sums),
        ("generic/specialized agreement", None, generic_agreement),
        ("CLI end-to-end", None, cli_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let out = timed(limit, check);
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name}: {}", i + 1, out.detail);
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
