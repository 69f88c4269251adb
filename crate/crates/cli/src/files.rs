//! JSON model and query files.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. A model file looks like
//!
//! ```json
//! { "d": 2, "pi": [0.5, 0.5],
//!   "Pi": [[0.7, 0.3], [0.4, 0.6]],
//!   "Q":  [[0.9, 0.1], [0.2, 0.8]] }
//! ```
//!
//! with an optional `"W0"` complex density replacing diag(π).

use std::fs;
use std::path::Path;

use behmm_core::{
    ChannelKind, ComplexMatrix, DiagonalWord, HiddenModel, HiddenWord, OperatorWord, Projection, StochasticMatrix,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const DEFAULT_HORIZON: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub d: usize,
    pub pi: Vec<f64>,
    #[serde(rename = "Pi")]
    pub transition: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub emission: Vec<Vec<f64>>,
    #[serde(rename = "W0", default, skip_serializing_if = "Option::is_none")]
    pub initial_density: Option<ComplexMatrix>,
}

impl ModelFile {
    /// Validates the file contents. With `renormalize`, rows of Π and Q and
    /// the vector π are rescaled to sum to one instead of being rejected.
    pub fn into_model(self, renormalize: bool) -> CliResult<HiddenModel> {
        let invalid =
            |field: String, reason: String| CliError::model("model", behmm_core::Error::Validation { field, reason });
        let d = self.d;
        if d == 0 {
            return Err(invalid("d".into(), "must be at least 1".into()));
        }
        if self.pi.len() != d {
            return Err(invalid(
                "pi".into(),
                format!("has {} entries, expected d = {d}", self.pi.len()),
            ));
        }
        for (name, m) in [("Pi", &self.transition), ("Q", &self.emission)] {
            if m.len() != d {
                return Err(invalid(name.into(), format!("has {} rows, expected d = {d}", m.len())));
            }
        }
        let stochastic = |name, rows: &[Vec<f64>]| {
            if renormalize {
                StochasticMatrix::new_renormalized(name, rows)
            } else {
                StochasticMatrix::new(name, rows)
            }
        };
        let pi = if renormalize {
            let total: f64 = self.pi.iter().sum();
            if total.is_nan() || total <= 0.0 {
                return Err(invalid("pi".into(), "sums to zero".into()));
            }
            self.pi.iter().map(|p| p / total).collect()
        } else {
            self.pi
        };
        let built = stochastic("Pi", &self.transition)
            .and_then(|t| Ok((t, stochastic("Q", &self.emission)?)))
            .and_then(|(t, q)| HiddenModel::new(pi, t, q));
        let mut model = built.map_err(|e| CliError::model("model", e))?;
        if let Some(w0) = self.initial_density {
            model = model
                .with_initial_density(w0)
                .map_err(|e| CliError::model("model", e))?;
        }
        Ok(model)
    }

    /// The file form of a model; `W0` is written only when it differs from diag(π).
    pub fn from_model(model: &HiddenModel) -> Self {
        Self {
            d: model.dim(),
            pi: model.pi().to_vec(),
            transition: model.transition().to_rows(),
            emission: model.emission().to_rows(),
            initial_density: (!model.has_default_density()).then(|| model.initial_density().clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_model(text: &str, renormalize: bool) -> CliResult<HiddenModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| CliError::parse("model", e))?;
    file.into_model(renormalize)
}

pub fn load_model(path: &Path, renormalize: bool) -> CliResult<HiddenModel> {
    parse_model(&read(path)?, renormalize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Joint,
    Hidden,
    Recurrence,
    Diagonal,
    Validate,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Joint => "joint",
            QueryKind::Hidden => "hidden",
            QueryKind::Recurrence => "recurrence",
            QueryKind::Diagonal => "diagonal",
            QueryKind::Validate => "validate",
        }
    }
}

/// Raw query file. `word`/`words` are interpreted according to `kind`:
/// a list of `[a, b]` matrix pairs for `joint`, a list of matrices for
/// `hidden`, a list of indices for `diagonal`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub kind: Option<QueryKind>,
    pub word: Option<Value>,
    pub words: Option<Vec<Value>>,
    pub projection: Option<ComplexMatrix>,
    pub projections: Option<Vec<ComplexMatrix>>,
    pub horizon: Option<usize>,
    pub tol: Option<f64>,
    pub oracle: Option<bool>,
    pub channel: Option<ChannelKind>,
    pub budget: Option<f64>,
}

pub fn parse_query(text: &str) -> CliResult<QueryFile> {
    serde_json::from_str(text).map_err(|e| CliError::parse("query", e))
}

pub fn load_query(path: &Path) -> CliResult<QueryFile> {
    parse_query(&read(path)?)
}

impl QueryFile {
    /// `word` followed by `words`, each tagged with its field path.
    fn raw_words(&self) -> CliResult<Vec<(String, &Value)>> {
        let mut out = Vec::new();
        if let Some(w) = &self.word {
            out.push(("word".to_string(), w));
        }
        for (i, w) in self.words.iter().flatten().enumerate() {
            out.push((format!("words[{i}]"), w));
        }
        if out.is_empty() {
            return Err(CliError::parse("query", "expected a `word` or `words` field"));
        }
        Ok(out)
    }

    pub fn operator_words(&self, dim: usize) -> CliResult<Vec<OperatorWord>> {
        self.raw_words()?
            .into_iter()
            .map(|(path, v)| {
                let pairs: Vec<(ComplexMatrix, ComplexMatrix)> =
                    serde_json::from_value(v.clone()).map_err(|e| CliError::parse(path.clone(), e))?;
                check_dims(&path, dim, pairs.iter().flat_map(|(a, b)| [a, b]))?;
                OperatorWord::new(pairs).map_err(|e| CliError::model(path, e))
            })
            .collect()
    }

    pub fn hidden_words(&self, dim: usize) -> CliResult<Vec<HiddenWord>> {
        self.raw_words()?
            .into_iter()
            .map(|(path, v)| {
                let factors: Vec<ComplexMatrix> =
                    serde_json::from_value(v.clone()).map_err(|e| CliError::parse(path.clone(), e))?;
                check_dims(&path, dim, factors.iter())?;
                HiddenWord::new(factors).map_err(|e| CliError::model(path, e))
            })
            .collect()
    }

    pub fn diagonal_words(&self, dim: usize) -> CliResult<Vec<DiagonalWord>> {
        self.raw_words()?
            .into_iter()
            .map(|(path, v)| {
                let indices: Vec<usize> =
                    serde_json::from_value(v.clone()).map_err(|e| CliError::parse(path.clone(), e))?;
                if let Some((pos, &j)) = indices.iter().enumerate().find(|(_, &j)| j >= dim) {
                    return Err(CliError::model(
                        format!("{path}[{pos}]"),
                        behmm_core::Error::IndexOutOfRange { row: j, col: j, dim },
                    ));
                }
                DiagonalWord::new(indices).map_err(|e| CliError::model(path, e))
            })
            .collect()
    }

    pub fn projections(&self, dim: usize) -> CliResult<Vec<Projection>> {
        let mut raw = Vec::new();
        if let Some(p) = &self.projection {
            raw.push(("projection".to_string(), p));
        }
        for (i, p) in self.projections.iter().flatten().enumerate() {
            raw.push((format!("projections[{i}]"), p));
        }
        if raw.is_empty() {
            return Err(CliError::parse(
                "query",
                "expected a `projection` or `projections` field",
            ));
        }
        raw.into_iter()
            .map(|(path, p)| {
                check_dims(&path, dim, std::iter::once(p))?;
                Projection::new(p.clone()).map_err(|e| CliError::model(path, e))
            })
            .collect()
    }
}

fn check_dims<'a>(path: &str, dim: usize, mats: impl Iterator<Item = &'a ComplexMatrix>) -> CliResult<()> {
    for (i, m) in mats.enumerate() {
        if m.dim() != dim {
            return Err(CliError::model(
                format!("{path} (matrix {i})"),
                behmm_core::Error::DimensionMismatch {
                    context: "matrix".into(),
                    expected: dim,
                    found: m.dim(),
                },
            ));
        }
    }
    Ok(())
}
