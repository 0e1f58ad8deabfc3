//! The experiment document: model, scenarios, laws, outputs, tolerances.
//!
//! Complex numbers travel as `[re, im]` pairs and matrices as arrays of rows.

use nhqdyn::{Complex, GeneratorKind, NormalizationPolicy, ProbabilityLaw, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::state_expr;

pub type Rows = Vec<Vec<Complex<f64>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationPolicy>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioSpec>,
    #[serde(default = "all_laws")]
    pub laws: Vec<ProbabilityLaw>,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn all_laws() -> Vec<ProbabilityLaw> {
    ProbabilityLaw::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Matrix(Rows),
    Sds {
        g: f64,
        k: f64,
    },
    /// `H = omega N + shift I` for the number operator of the algebra.
    Pf {
        a: Rows,
        b: Rows,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        shift: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Matrix(rows) => rows.len(),
            ModelSpec::Sds { .. } | ModelSpec::Pf { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub initial: StateSpec,
    #[serde(rename = "final")]
    pub target: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    pub grid: GridSpec,
}

/// Either an expression over the basis symbols or explicit components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Expr(String),
    Vector(Vec<Complex<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Times(Vec<f64>),
    Range(GridRange),
}

/// `steps + 1` samples with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    /// `start:stop:steps`
    pub fn parse_sugar(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Usage(format!("grid `{s}` is not start:stop:steps"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(GridSpec::Range(GridRange {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            steps: parts[2].trim().parse().map_err(|_| bad())?,
        }))
    }

    pub fn to_grid(&self) -> nhqdyn::Result<nhqdyn::TimeGrid<f64>> {
        match self {
            GridSpec::Times(t) => nhqdyn::TimeGrid::new(t.clone()),
            GridSpec::Range(r) => nhqdyn::TimeGrid::linspace(r.start, r.stop, r.steps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Used when `--out-dir` is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    pub csv: bool,
    pub json: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: None,
            csv: true,
            json: true,
        }
    }
}

impl ExperimentSpec {
    pub fn normalization(&self) -> NormalizationPolicy {
        self.normalization.unwrap_or(match self.model {
            ModelSpec::Sds { .. } => NormalizationPolicy::Sds,
            _ => NormalizationPolicy::UnitPhi,
        })
    }

    pub fn scenario_name(&self, index: usize) -> String {
        self.scenarios[index]
            .name
            .clone()
            .unwrap_or_else(|| format!("scenario{index}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Structural checks that need no numerics.
    pub fn validate(&self) -> CliResult<()> {
        match &self.model {
            ModelSpec::Matrix(rows) => check_square("model.matrix", rows)?,
            ModelSpec::Sds { g, k } => {
                if !(k.is_finite() && k.abs() < 1.0) {
                    return Err(CliError::Validation {
                        field: "model.sds.k".into(),
                        kind: "ParameterOutOfRange",
                        message: format!("k = {k} must lie strictly between -1 and 1"),
                    });
                }
                if !(g.is_finite() && *g != 0.0) {
                    return Err(CliError::Validation {
                        field: "model.sds.g".into(),
                        kind: "ParameterOutOfRange",
                        message: format!("g = {g} must be finite and nonzero"),
                    });
                }
            }
            ModelSpec::Pf { a, b, omega, shift } => {
                check_square("model.pf.a", a)?;
                check_square("model.pf.b", b)?;
                if a.len() != 2 || b.len() != 2 {
                    return Err(CliError::validation("model.pf", "pseudo-fermion operators must be 2x2"));
                }
                if !(omega.is_finite() && shift.is_finite()) {
                    return Err(CliError::validation("model.pf", "omega and shift must be finite"));
                }
            }
        }
        if self.laws.is_empty() {
            return Err(CliError::validation("laws", "at least one law is required"));
        }
        for (i, law) in self.laws.iter().enumerate() {
            if self.laws[..i].contains(law) {
                return Err(CliError::validation(format!("laws[{i}]"), "duplicate law"));
            }
        }
        let dim = self.model.dim();
        let mut names = Vec::new();
        for (i, sc) in self.scenarios.iter().enumerate() {
            let name = self.scenario_name(i);
            let valid_name = !name.is_empty()
                && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !name.starts_with('.');
            if !valid_name {
                return Err(CliError::validation(
                    format!("scenarios[{i}].name"),
                    "names may only use letters, digits, `_`, `-` and `.`",
                ));
            }
            if names.contains(&name) {
                return Err(CliError::validation(format!("scenarios[{i}].name"), "duplicate scenario name"));
            }
            names.push(name);
            check_state(&format!("scenarios[{i}].initial"), &sc.initial, dim)?;
            check_state(&format!("scenarios[{i}].final"), &sc.target, dim)?;
            sc.grid.to_grid().map_err(|e| CliError::Validation {
                field: format!("scenarios[{i}].grid"),
                kind: e.kind(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }
}

fn check_square(field: &str, rows: &Rows) -> CliResult<()> {
    if rows.is_empty() {
        return Err(CliError::validation(field, "matrix is empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != rows.len()) {
        return Err(CliError::validation(
            format!("{field}[{i}]"),
            format!("row has {} entries, expected {}", rows[i].len(), rows.len()),
        ));
    }
    if rows.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::validation(field, "entries must be finite"));
    }
    Ok(())
}

fn check_state(field: &str, state: &StateSpec, dim: usize) -> CliResult<()> {
    match state {
        StateSpec::Expr(s) => {
            let expr = state_expr::parse(s).map_err(|m| CliError::validation(field, m))?;
            if expr.max_index() >= dim {
                return Err(CliError::validation(
                    field,
                    format!("index {} out of range for dimension {dim}", expr.max_index()),
                ));
            }
        }
        StateSpec::Vector(v) => {
            if v.len() != dim {
                return Err(CliError::validation(
                    field,
                    format!("vector has {} components, expected {dim}", v.len()),
                ));
            }
        }
    }
    Ok(())
}

/// Parses and validates a JSON experiment document.
pub fn parse_spec(text: &str) -> CliResult<ExperimentSpec> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: ExperimentSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| CliError::Parse {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}
