//! Query results, rendered either as pretty JSON or as a plain-text table.
//! Field order and float formatting are fixed so equal inputs give
//! byte-identical output.

use std::fmt::Write;

use behmm_core::{ChannelKind, CompleteAccessibility, Complex64, DiagonalWord, ERecurrenceCheck, RecurrenceReport};
use serde::Serialize;

use crate::files::QueryKind;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: QueryKind,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub results: Results,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Validate(Vec<ChannelEntry>),
    Joint(Vec<JointEntry>),
    Hidden(Vec<HiddenEntry>),
    Recurrence(Vec<RecurrenceEntry>),
    Diagonal(Vec<DiagonalEntry>),
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelEntry {
    pub channel: ChannelKind,
    pub cp: bool,
    pub unital: bool,
    pub min_choi_eigenvalue: f64,
    pub unitality_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub value: Complex64,
    pub difference: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointEntry {
    pub word: usize,
    pub length: usize,
    pub value: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HiddenEntry {
    pub word: usize,
    pub length: usize,
    pub channel: ChannelKind,
    pub value: Complex64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceEntry {
    pub projection: usize,
    pub rank: usize,
    pub phi: RecurrenceReport,
    pub e_recurrence: ERecurrenceCheck,
    pub complete_accessibility: CompleteAccessibility,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalEntry {
    pub word: DiagonalWord,
    pub quantum: f64,
    pub classical: f64,
    pub defect: f64,
    pub passed: bool,
}

fn complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl Report {
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command.as_str());
        if let Some(n) = self.horizon {
            let _ = writeln!(out, "horizon: {n}");
        }
        if let Some(t) = self.tol {
            let _ = writeln!(out, "tol: {}", sci(t));
        }
        out.push('\n');
        match &self.results {
            Results::Validate(rows) => {
                let _ = writeln!(
                    out,
                    "{:<12} {:>4} {:>7} {:>14} {:>14}",
                    "channel", "cp", "unital", "min_choi_eig", "unital_defect"
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<12} {:>4} {:>7} {:>14} {:>14}",
                        r.channel.name(),
                        yes_no(r.cp),
                        yes_no(r.unital),
                        sci(r.min_choi_eigenvalue),
                        sci(r.unitality_defect)
                    );
                }
            }
            Results::Joint(rows) => {
                let _ = writeln!(
                    out,
                    "{:<5} {:>4}  {:<36} {:<36} {:>10}",
                    "word", "len", "value", "oracle", "diff"
                );
                for r in rows {
                    let (oracle, diff) = match &r.oracle {
                        Some(o) => (complex(o.value), sci(o.difference)),
                        None => ("-".to_string(), "-".to_string()),
                    };
                    let _ = writeln!(
                        out,
                        "{:<5} {:>4}  {:<36} {:<36} {:>10}",
                        r.word,
                        r.length,
                        complex(r.value),
                        oracle,
                        diff
                    );
                }
            }
            Results::Hidden(rows) => {
                let _ = writeln!(out, "{:<5} {:>4}  {:<11} value", "word", "len", "channel");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<5} {:>4}  {:<11} {}",
                        r.word,
                        r.length,
                        r.channel.name(),
                        complex(r.value)
                    );
                }
            }
            Results::Recurrence(rows) => {
                for r in rows {
                    let p = &r.phi;
                    let _ = writeln!(out, "projection {} (rank {})", r.projection, r.rank);
                    let _ = writeln!(out, "  verdict              {}", p.verdict.as_str());
                    let _ = writeln!(out, "  q / threshold        {:.6} / {:.6}", p.q, p.q_threshold);
                    let _ = writeln!(out, "  bound certified      {}", yes_no(p.bound_certified));
                    let _ = writeln!(out, "  bound holds          {}", yes_no(p.bound_holds));
                    let _ = writeln!(out, "  phi(e)               {:.12}", p.phi_e);
                    let _ = writeln!(out, "  normalized phi sum   {:.12}", p.normalized_phi_sum);
                    let last = p.residual_sequence.last().copied().unwrap_or(0.0);
                    let _ = writeln!(out, "  final residual       {}", sci(last));
                    let _ = writeln!(out, "  partition defect     {}", sci(p.partition_defect));
                    if let Some(t) = p.tail_bound {
                        let _ = writeln!(out, "  tail bound           {}", sci(t));
                    }
                    let e = &r.e_recurrence;
                    let _ = writeln!(
                        out,
                        "  E-recurrence         {} (lhs {:.12}, residual {})",
                        yes_no(e.satisfied),
                        e.lhs,
                        sci(e.residual)
                    );
                    let a = &r.complete_accessibility;
                    let tail = a.residual_norms.last().copied().unwrap_or(0.0);
                    let _ = writeln!(
                        out,
                        "  complete access.     {} (residual {})",
                        yes_no(a.accessible),
                        sci(tail)
                    );
                }
            }
            Results::Diagonal(rows) => {
                let _ = writeln!(
                    out,
                    "{:<16} {:>16} {:>16} {:>10} {:>4}",
                    "word", "quantum", "classical", "defect", "ok"
                );
                for r in rows {
                    let word = r
                        .word
                        .indices()
                        .iter()
                        .map(|j| j.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    let _ = writeln!(
                        out,
                        "{:<16} {:>16.12} {:>16.12} {:>10} {:>4}",
                        word,
                        r.quantum,
                        r.classical,
                        sci(r.defect),
                        yes_no(r.passed)
                    );
                }
            }
        }
        let _ = writeln!(out, "\nresult: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}
