use behmm_core::{
    channel_from_pair_map, complete_accessibility, diagonal_restriction_check, e_recurrence_check, hidden_expectation,
    joint_expectation_bi, joint_expectation_oracle, phi_recurrence_report, validate_channel, ChannelKind, HiddenModel,
    StoppingTimeSpec, DEFAULT_SUMMAND_BUDGET,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::files::{QueryFile, QueryKind, DEFAULT_HORIZON, DEFAULT_TOL};
use crate::report::{
    ChannelEntry, DiagonalEntry, HiddenEntry, JointEntry, OracleComparison, RecurrenceEntry, Report, Results,
};

/// Relative agreement required between the recursion and the oracle.
pub const ORACLE_AGREEMENT: f64 = 1e-10;
/// Largest acceptable partition-identity defect in a recurrence report.
pub const PARTITION_TOL: f64 = 1e-9;

/// Command-line overrides; each takes precedence over the query file.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub oracle: bool,
    pub horizon: Option<usize>,
    pub tol: Option<f64>,
    pub channel: Option<ChannelKind>,
    /// Worker threads for independent words/projections; `None` runs inline.
    pub jobs: Option<usize>,
}

fn par_map<T, R, F>(jobs: Option<usize>, items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> CliResult<R> + Sync,
{
    match jobs {
        Some(k) if k > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            pool.install(|| items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect())
        }
        _ => items.iter().enumerate().map(|(i, x)| f(i, x)).collect(),
    }
}

/// Runs `kind` against `model`. A query whose own `kind` disagrees is rejected.
pub fn run_query(model: &HiddenModel, kind: QueryKind, query: &QueryFile, opts: &Options) -> CliResult<Report> {
    if let Some(k) = query.kind {
        if k != kind {
            return Err(CliError::parse(
                "query.kind",
                format!("query is for `{}` but the command is `{}`", k.as_str(), kind.as_str()),
            ));
        }
    }
    let d = model.dim();
    let tol = opts.tol.or(query.tol).unwrap_or(DEFAULT_TOL);
    let horizon = opts.horizon.or(query.horizon).unwrap_or(DEFAULT_HORIZON);
    let mut report = Report {
        command: kind,
        passed: true,
        horizon: None,
        tol: None,
        results: Results::Validate(Vec::new()),
    };
    match kind {
        QueryKind::Validate => {
            let kinds: Vec<ChannelKind> = match opts.channel.or(query.channel) {
                Some(k) => vec![k],
                None => ChannelKind::ALL.to_vec(),
            };
            let rows = par_map(opts.jobs, &kinds, |_, &k| {
                let v = validate_channel(&channel_from_pair_map(model, k));
                Ok(ChannelEntry {
                    channel: k,
                    cp: v.cp,
                    unital: v.unital,
                    min_choi_eigenvalue: v.min_choi_eigenvalue,
                    unitality_defect: v.unitality_defect,
                })
            })?;
            report.passed = rows.iter().all(|r| r.cp && r.unital);
            report.results = Results::Validate(rows);
        }
        QueryKind::Joint => {
            let words = query.operator_words(d)?;
            let oracle = opts.oracle || query.oracle.unwrap_or(false);
            let budget = query.budget.unwrap_or(DEFAULT_SUMMAND_BUDGET);
            let rows = par_map(opts.jobs, &words, |i, w| {
                let ctx = || format!("words[{i}]");
                let value = joint_expectation_bi(model, w).map_err(|e| CliError::model(ctx(), e))?;
                let oracle = if oracle {
                    let o = joint_expectation_oracle(model, w, budget).map_err(|e| CliError::model(ctx(), e))?;
                    let difference = (value - o).norm();
                    Some(OracleComparison {
                        value: o,
                        difference,
                        agrees: difference <= ORACLE_AGREEMENT * (1.0 + value.norm()),
                    })
                } else {
                    None
                };
                Ok(JointEntry {
                    word: i,
                    length: w.len(),
                    value,
                    oracle,
                })
            })?;
            report.passed = rows.iter().all(|r| r.oracle.as_ref().is_none_or(|o| o.agrees));
            report.results = Results::Joint(rows);
        }
        QueryKind::Hidden => {
            let words = query.hidden_words(d)?;
            let kind = opts.channel.or(query.channel).unwrap_or(ChannelKind::Underlying);
            let te = channel_from_pair_map(model, kind);
            let rows = par_map(opts.jobs, &words, |i, w| {
                let value = hidden_expectation(model.initial_density(), &te, w)
                    .map_err(|e| CliError::model(format!("words[{i}]"), e))?;
                Ok(HiddenEntry {
                    word: i,
                    length: w.len(),
                    channel: kind,
                    value,
                })
            })?;
            report.results = Results::Hidden(rows);
        }
        QueryKind::Recurrence => {
            let projections = query.projections(d)?;
            let te = channel_from_pair_map(model, ChannelKind::Underlying);
            let rows = par_map(opts.jobs, &projections, |i, e| {
                let ctx = || format!("projections[{i}]");
                let spec = StoppingTimeSpec::new(e.clone(), horizon).map_err(|err| CliError::model("horizon", err))?;
                let phi = phi_recurrence_report(model, &spec).map_err(|err| CliError::model(ctx(), err))?;
                let e_recurrence = e_recurrence_check(&te, &spec, tol).map_err(|err| CliError::model(ctx(), err))?;
                let access = complete_accessibility(&te, &spec, tol).map_err(|err| CliError::model(ctx(), err))?;
                Ok(RecurrenceEntry {
                    projection: i,
                    rank: e.rank(),
                    phi,
                    e_recurrence,
                    complete_accessibility: access,
                })
            })?;
            report.passed = rows
                .iter()
                .all(|r| r.phi.bound_holds && r.phi.partition_defect <= PARTITION_TOL);
            report.horizon = Some(horizon);
            report.tol = Some(tol);
            report.results = Results::Recurrence(rows);
        }
        QueryKind::Diagonal => {
            let words = query.diagonal_words(d)?;
            let rows = par_map(opts.jobs, &words, |i, w| {
                let c = diagonal_restriction_check(model, w).map_err(|e| CliError::model(format!("words[{i}]"), e))?;
                Ok(DiagonalEntry {
                    word: w.clone(),
                    quantum: c.quantum,
                    classical: c.classical,
                    defect: c.defect,
                    passed: c.defect <= tol,
                })
            })?;
            report.passed = rows.iter().all(|r| r.passed);
            report.tol = Some(tol);
            report.results = Results::Diagonal(rows);
        }
    }
    Ok(report)
}
