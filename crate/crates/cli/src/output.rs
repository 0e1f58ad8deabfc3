//! Wire shapes of the JSON reports and the CSV trace writer.

use std::fs;
use std::path::Path;

use nhqdyn::audit::Check;
use nhqdyn::thermal::KmsEntry;
use nhqdyn::{
    Complex, GeneratorKind, Matrix, NormalizationPolicy, Picture, ProbabilityLaw, Quality, Sds,
    SpectrumKind, System, Tolerances, Vector,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub type Rows = Vec<Vec<Complex<f64>>>;

fn rows(m: &Matrix) -> Rows {
    m.rows()
}

fn components(v: &Vector) -> Vec<Complex<f64>> {
    v.as_slice().to_vec()
}

#[derive(Debug, Serialize)]
pub struct SystemJson {
    pub dim: usize,
    pub normalization: NormalizationPolicy,
    pub spectrum: SpectrumKind,
    pub max_imag: f64,
    pub condition: f64,
    pub quality: Quality,
    pub eigenvalues: Vec<Complex<f64>>,
    pub h: Rows,
    pub phi: Vec<Vec<Complex<f64>>>,
    pub psi: Vec<Vec<Complex<f64>>>,
    pub s_phi: Rows,
    pub s_psi: Rows,
    pub h0: Rows,
    pub warnings: Vec<String>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sds: Option<SdsJson>,
}

#[derive(Debug, Serialize)]
pub struct SdsJson {
    pub g: f64,
    pub k: f64,
    pub alpha: f64,
    pub rho: f64,
    pub omega: f64,
    pub shift: f64,
    pub fit_residual: f64,
    pub c: Rows,
    pub n0: Rows,
    /// Distances to commonly displayed closed forms; informational.
    pub display_deviations: DisplayJson,
}

#[derive(Debug, Serialize)]
pub struct DisplayJson {
    pub c: f64,
    pub n0: f64,
    pub h0: f64,
    pub decomposition: f64,
    pub ground_energy: f64,
}

impl SystemJson {
    pub fn new(sys: &System, sds: Option<&Sds>) -> Self {
        let spectrum = sys.spectrum();
        Self {
            dim: sys.dim(),
            normalization: sys.normalization(),
            spectrum: spectrum.kind,
            max_imag: spectrum.max_imag,
            condition: sys.condition(),
            quality: sys.quality(),
            eigenvalues: sys.eigenvalues().to_vec(),
            h: rows(sys.h()),
            phi: sys.phi().iter().map(components).collect(),
            psi: sys.psi().iter().map(components).collect(),
            s_phi: rows(sys.s_phi()),
            s_psi: rows(sys.s_psi()),
            h0: rows(sys.h0()),
            warnings: nhqdyn::transition::system_warnings(sys),
            tolerances: *sys.tolerances(),
            sds: sds.map(|m| SdsJson {
                g: m.g,
                k: m.k,
                alpha: m.alpha,
                rho: m.rho,
                omega: m.omega,
                shift: m.shift,
                fit_residual: m.fit_residual,
                c: rows(&m.c),
                n0: rows(&m.n0),
                display_deviations: DisplayJson {
                    c: m.display.c,
                    n0: m.display.n0,
                    h0: m.display.h0,
                    decomposition: m.display.decomposition,
                    ground_energy: m.display.ground_energy,
                },
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&Check<f64>> for CheckJson {
    fn from(c: &Check<f64>) -> Self {
        Self {
            name: c.name.clone(),
            residual: c.residual,
            tolerance: c.tolerance,
            pass: c.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AuditJson {
    pub seed: u64,
    pub all_pass: bool,
    pub checks: Vec<CheckJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra_checks: Option<Vec<CheckJson>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ComparisonJson {
    pub first: ProbabilityLaw,
    pub second: ProbabilityLaw,
    pub max_difference: f64,
    pub distinguishable: bool,
}

#[derive(Debug, Serialize)]
pub struct ScenarioJson {
    pub name: String,
    pub generator: GeneratorKind,
    pub samples: usize,
    pub initial: Vec<Complex<f64>>,
    #[serde(rename = "final")]
    pub target: Vec<Complex<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
    pub comparisons: Vec<ComparisonJson>,
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub normalization: NormalizationPolicy,
    pub threshold: f64,
    pub laws: Vec<ProbabilityLaw>,
    pub warnings: Vec<String>,
    pub scenarios: Vec<ScenarioJson>,
}

#[derive(Debug, Serialize)]
pub struct PartitionJson {
    pub state: GeneratorKind,
    pub z: Complex<f64>,
    pub normalization_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct KmsJson {
    pub t: f64,
    pub state: GeneratorKind,
    pub picture: Picture,
    pub residual: f64,
    /// `null` for report-only combinations.
    pub pass: Option<bool>,
}

impl KmsJson {
    pub fn new(t: f64, e: &KmsEntry<f64>) -> Self {
        Self {
            t,
            state: e.state,
            picture: e.picture,
            residual: e.residual,
            pass: e.verdict,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ThermalJson {
    pub beta: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub all_matched_pass: bool,
    pub partition: Vec<PartitionJson>,
    pub kms: Vec<KmsJson>,
    pub warnings: Vec<String>,
}

/// 17 significant digits, so every value re-parses to the same double.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Header `t, <columns...>`; one row per time.
pub fn write_trace_csv(path: &Path, times: &[f64], columns: &[(String, &[f64])]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let header = std::iter::once("t".to_string()).chain(columns.iter().map(|(n, _)| n.clone()));
    w.write_record(header).map_err(|e| CliError::io(path, e))?;
    for (i, t) in times.iter().enumerate() {
        let record = std::iter::once(format_value(*t))
            .chain(columns.iter().map(|(_, s)| format_value(s[i])));
        w.write_record(record).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
