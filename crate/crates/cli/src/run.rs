//! Executes subcommands against a validated spec.

use std::fs;
use std::path::{Path, PathBuf};

use nhqdyn::pseudofermion::{system_from_algebra, verify_algebra};
use nhqdyn::thermal::{kms_table, kms_tolerance};
use nhqdyn::transition::{evaluate_scenario, system_warnings};
use nhqdyn::{
    audit_system, build_pf, build_sds, build_thermal, evolve_state, transition_trace, Algebra,
    Ensemble, GeneratorKind, Matrix, MetricKind, NormalizationPolicy, PfNormalization,
    ProbabilityLaw, Scenario, Sds, System, Tolerances,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::output::{
    write_json, write_trace_csv, AuditJson, CheckJson, ComparisonJson, KmsJson, PartitionJson,
    ReportJson, ScenarioJson, SystemJson, ThermalJson,
};
use crate::spec::{ExperimentSpec, GridRange, GridSpec, ModelSpec, ScenarioSpec, StateSpec};
use crate::state_expr;

/// Times at which the KMS table is evaluated.
pub const KMS_TIMES: [f64; 2] = [0.3, 1.7];

pub const MAX_DIM_ENV: &str = "NHQDYN_MAX_DIM";

/// Command-line overrides layered on top of the spec; grid, generator and
/// laws replace the spec's values for every scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub grid: Option<GridSpec>,
    pub laws: Option<Vec<ProbabilityLaw>>,
    pub generator: Option<GeneratorKind>,
    /// `key=value` pairs, applied last.
    pub tol: Vec<String>,
    pub seed: u64,
}

/// What a command produced: files written and lines for stdout.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// Set when a verification ran and something failed; the files are
    /// still written.
    pub failures: usize,
}

pub struct Model {
    pub system: System,
    pub sds: Option<Sds>,
    pub algebra: Option<Algebra>,
}

/// Spec tolerances, then the environment cap, then `--tol` flags.
pub fn effective_tolerances(spec: &ExperimentSpec, ov: &Overrides) -> CliResult<Tolerances> {
    let mut tol = spec.tolerances;
    if let Ok(v) = std::env::var(MAX_DIM_ENV) {
        if !tol.set("max_dim", &v) {
            return Err(CliError::Usage(format!("{MAX_DIM_ENV}={v} is not a positive integer")));
        }
    }
    for kv in &ov.tol {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(CliError::Usage(format!("--tol expects key=value, got `{kv}`")));
        };
        if !tol.set(k.trim(), v) {
            return Err(CliError::Usage(format!(
                "--tol {kv}: unknown key or invalid value (keys: {})",
                Tolerances::KEYS.join(", ")
            )));
        }
    }
    Ok(tol)
}

pub fn build_model(spec: &ExperimentSpec, tol: &Tolerances) -> CliResult<Model> {
    let policy = spec.normalization();
    Ok(match &spec.model {
        ModelSpec::Matrix(rows) => {
            let h = Matrix::from_rows(rows.clone())?;
            Model {
                system: System::build(&h, policy, tol)?,
                sds: None,
                algebra: None,
            }
        }
        ModelSpec::Sds { g, k } => {
            let model = build_sds(*g, *k, policy, tol)?;
            Model {
                system: model.system.clone(),
                algebra: Some(model.algebra.clone()),
                sds: Some(model),
            }
        }
        ModelSpec::Pf { a, b, omega, shift } => {
            let a = Matrix::from_rows(a.clone())?;
            let b = Matrix::from_rows(b.clone())?;
            let alg = build_pf(&a, &b, PfNormalization::UnitVacuum)?;
            let h = &alg.n.scale_real(*omega) + &Matrix::identity(2).scale_real(*shift);
            Model {
                system: system_from_algebra(&h, &alg, policy, tol)?,
                sds: None,
                algebra: Some(alg),
            }
        }
    })
}

fn resolve_state(state: &StateSpec, sys: &System) -> nhqdyn::Vector {
    match state {
        StateSpec::Expr(s) => state_expr::parse(s)
            .expect("validated expression")
            .evaluate(sys),
        StateSpec::Vector(v) => nhqdyn::Vector::from_vec(v.clone()),
    }
}

/// Scenarios with states resolved against the system's bases.
pub fn resolve_scenarios(spec: &ExperimentSpec, sys: &System) -> CliResult<Vec<Scenario<f64>>> {
    spec.scenarios
        .iter()
        .enumerate()
        .map(|(i, sc)| {
            let grid = sc.grid.to_grid()?;
            Ok(Scenario {
                name: spec.scenario_name(i),
                initial: resolve_state(&sc.initial, sys),
                target: resolve_state(&sc.target, sys),
                generator: sc.generator.unwrap_or(GeneratorKind::H),
                grid,
            })
        })
        .collect()
}

pub fn out_dir(spec: &ExperimentSpec, ov: &Overrides) -> CliResult<PathBuf> {
    let dir = ov
        .out_dir
        .clone()
        .or_else(|| spec.outputs.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn require_scenarios(spec: &ExperimentSpec) -> CliResult<()> {
    if spec.scenarios.is_empty() {
        return Err(CliError::validation("scenarios", "this command needs at least one scenario"));
    }
    Ok(())
}

/// Everything a run needs after parsing.
pub struct Prepared {
    pub spec: ExperimentSpec,
    pub ov: Overrides,
    pub model: Model,
    pub dir: PathBuf,
}

pub fn prepare(mut spec: ExperimentSpec, ov: Overrides) -> CliResult<Prepared> {
    spec.tolerances = effective_tolerances(&spec, &ov)?;
    if let Some(l) = &ov.laws {
        spec.laws = l.clone();
    }
    for sc in &mut spec.scenarios {
        if let Some(g) = &ov.grid {
            sc.grid = g.clone();
        }
        if let Some(g) = ov.generator {
            sc.generator = Some(g);
        }
    }
    spec.validate()?;
    let model = build_model(&spec, &spec.tolerances)?;
    let dir = out_dir(&spec, &ov)?;
    Ok(Prepared { spec, ov, model, dir })
}

fn audit_json(p: &Prepared) -> CliResult<AuditJson> {
    let report = audit_system(&p.model.system, p.ov.seed)?;
    let algebra_checks = p
        .model
        .algebra
        .as_ref()
        .map(|alg| verify_algebra(alg, Some(&p.model.system)));
    let algebra_pass = algebra_checks.as_ref().is_none_or(|a| a.all_pass());
    Ok(AuditJson {
        seed: p.ov.seed,
        all_pass: report.all_pass() && algebra_pass,
        checks: report.checks.iter().map(CheckJson::from).collect(),
        algebra_checks: algebra_checks.map(|a| a.checks.iter().map(CheckJson::from).collect()),
        warnings: report.warnings,
    })
}

/// `system.json` and `audit.json`.
pub fn cmd_build(p: &Prepared) -> CliResult<Outcome> {
    build_outputs(p).map(|(out, _)| out)
}

fn build_outputs(p: &Prepared) -> CliResult<(Outcome, AuditJson)> {
    let mut out = Outcome::default();
    let path = p.dir.join("system.json");
    write_json(&path, &SystemJson::new(&p.model.system, p.model.sds.as_ref()))?;
    out.files.push(path);
    let audit = audit_json(p)?;
    let path = p.dir.join("audit.json");
    write_json(&path, &audit)?;
    out.files.push(path);
    out.summary.push(audit_line(&audit));
    Ok((out, audit))
}

fn audit_line(a: &AuditJson) -> String {
    let total = a.checks.len() + a.algebra_checks.as_ref().map_or(0, Vec::len);
    let failed = a.checks.iter().chain(a.algebra_checks.iter().flatten()).filter(|c| !c.pass).count();
    format!("audit: {}/{} checks pass", total - failed, total)
}

/// Like `build`, but a failing check makes the run fail.
pub fn cmd_verify(p: &Prepared) -> CliResult<Outcome> {
    let (mut out, audit) = build_outputs(p)?;
    out.failures = audit
        .checks
        .iter()
        .chain(audit.algebra_checks.iter().flatten())
        .filter(|c| !c.pass)
        .count();
    Ok(out)
}

/// Norms of the evolved initial state in all three geometries.
pub fn cmd_evolve(p: &Prepared) -> CliResult<Outcome> {
    require_scenarios(&p.spec)?;
    let sys = &p.model.system;
    let scenarios = resolve_scenarios(&p.spec, sys)?;
    let traces = scenarios
        .par_iter()
        .map(|s| evolve_state(sys, s.generator, &s.initial, &s.grid))
        .collect::<nhqdyn::Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    for (s, trace) in scenarios.iter().zip(&traces) {
        let path = p.dir.join(format!("evolve_{}.csv", s.name));
        let columns: Vec<(String, &[f64])> = MetricKind::ALL
            .iter()
            .map(|k| (format!("norm_{}", k.name()), trace.norms(*k)))
            .collect();
        write_trace_csv(&path, &trace.times, &columns)?;
        out.files.push(path);
    }
    out.summary.extend(system_warnings(sys).into_iter().map(|w| format!("warning: {w}")));
    Ok(out)
}

fn write_transit_csvs(p: &Prepared, scenarios: &[Scenario<f64>]) -> CliResult<Vec<PathBuf>> {
    let sys = &p.model.system;
    let laws = p.spec.laws.clone();
    let traces = scenarios
        .par_iter()
        .map(|s| transition_trace(sys, &laws, &s.initial, &s.target, s.generator, &s.grid))
        .collect::<nhqdyn::Result<Vec<_>>>()?;
    let mut files = Vec::new();
    for (s, trace) in scenarios.iter().zip(&traces) {
        let path = trace_path(&p.dir, &s.name);
        let columns: Vec<(String, &[f64])> = laws
            .iter()
            .zip(&trace.values)
            .map(|(l, v)| (format!("P_{}", l.name()), v.as_slice()))
            .collect();
        write_trace_csv(&path, &trace.times, &columns)?;
        files.push(path);
    }
    Ok(files)
}

fn trace_name(scenario: &str) -> String {
    format!("transit_{scenario}.csv")
}

fn trace_path(dir: &Path, scenario: &str) -> PathBuf {
    dir.join(trace_name(scenario))
}

/// One CSV per scenario with the requested probability laws.
pub fn cmd_transit(p: &Prepared) -> CliResult<Outcome> {
    require_scenarios(&p.spec)?;
    let scenarios = resolve_scenarios(&p.spec, &p.model.system)?;
    let mut out = Outcome::default();
    if p.spec.outputs.csv {
        out.files = write_transit_csvs(p, &scenarios)?;
    }
    out.summary
        .extend(system_warnings(&p.model.system).into_iter().map(|w| format!("warning: {w}")));
    Ok(out)
}

/// Trace CSVs plus `report.json` with pairwise law comparisons.
pub fn cmd_discriminate(p: &Prepared) -> CliResult<Outcome> {
    require_scenarios(&p.spec)?;
    let sys = &p.model.system;
    let scenarios = resolve_scenarios(&p.spec, sys)?;
    let laws = p.spec.laws.clone();
    let mut out = Outcome::default();
    if p.spec.outputs.csv {
        out.files = write_transit_csvs(p, &scenarios)?;
    }
    let reports = scenarios
        .par_iter()
        .map(|s| evaluate_scenario(sys, s))
        .collect::<nhqdyn::Result<Vec<_>>>()?;
    let report = ReportJson {
        normalization: sys.normalization(),
        threshold: sys.tolerances().discrim_threshold,
        laws: laws.clone(),
        warnings: system_warnings(sys),
        scenarios: scenarios
            .iter()
            .zip(&reports)
            .map(|(s, r)| ScenarioJson {
                name: s.name.clone(),
                generator: s.generator,
                samples: s.grid.len(),
                initial: s.initial.as_slice().to_vec(),
                target: s.target.as_slice().to_vec(),
                trace_file: p.spec.outputs.csv.then(|| trace_name(&s.name)),
                comparisons: r
                    .comparisons
                    .iter()
                    .filter(|c| laws.contains(&c.first) && laws.contains(&c.second))
                    .map(|c| ComparisonJson {
                        first: c.first,
                        second: c.second,
                        max_difference: c.max_difference,
                        distinguishable: c.distinguishable,
                    })
                    .collect(),
            })
            .collect(),
    };
    for sc in &report.scenarios {
        for c in &sc.comparisons {
            out.summary.push(format!(
                "{}: {} vs {}: max |dP| = {:e} ({})",
                sc.name,
                c.first.name(),
                c.second.name(),
                c.max_difference,
                if c.distinguishable { "distinguishable" } else { "indistinguishable" }
            ));
        }
    }
    out.summary.extend(report.warnings.iter().map(|w| format!("warning: {w}")));
    if p.spec.outputs.json {
        let path = p.dir.join("report.json");
        write_json(&path, &report)?;
        out.files.push(path);
    }
    Ok(out)
}

/// Partition functions and the KMS table for seeded random unit-norm `A`, `B`.
pub fn cmd_thermal(p: &Prepared, beta: f64) -> CliResult<Outcome> {
    let sys = &p.model.system;
    let n = sys.dim();
    let mut rng = Ensemble::new(p.ov.seed);
    let a = rng.unit_matrix::<f64>(n);
    let b = rng.unit_matrix::<f64>(n);
    let id = Matrix::identity(n);
    let mut partition = Vec::new();
    for kind in GeneratorKind::ALL {
        let state = build_thermal(sys, kind, beta)?;
        partition.push(PartitionJson {
            state: kind,
            z: state.z,
            normalization_residual: (state.expectation(&id)? - nhqdyn::Complex::new(1.0, 0.0)).norm(),
        });
    }
    let mut kms = Vec::new();
    for t in KMS_TIMES {
        for entry in kms_table(sys, &a, &b, t, beta)? {
            kms.push(KmsJson::new(t, &entry));
        }
    }
    let report = ThermalJson {
        beta,
        seed: p.ov.seed,
        tolerance: kms_tolerance(sys),
        all_matched_pass: kms.iter().all(|e| e.pass != Some(false)),
        partition,
        kms,
        warnings: system_warnings(sys),
    };
    let mut out = Outcome::default();
    for e in &report.kms {
        let verdict = match e.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "report-only",
        };
        out.summary.push(format!(
            "kms t={} state={} picture={} residual={:e} {verdict}",
            e.t,
            e.state.name(),
            e.picture.name(),
            e.residual
        ));
    }
    out.summary.extend(report.warnings.iter().map(|w| format!("warning: {w}")));
    let path = p.dir.join("thermal.json");
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

/// The two-level model with its three characteristic scenarios over two
/// periods `[0, 4π / (2|ρ|)]` (400 steps unless a grid is given).
pub fn sds_spec(g: f64, k: f64) -> ExperimentSpec {
    let rho = (g * (1.0 - k * k).max(0.0).sqrt()).abs();
    let stop = if rho > 0.0 && rho.is_finite() {
        2.0 * std::f64::consts::PI / rho
    } else {
        10.0
    };
    let grid = GridSpec::Range(GridRange { start: 0.0, stop, steps: 400 });
    let scenario = |name: &str, initial: &str, target: &str| ScenarioSpec {
        name: Some(name.into()),
        initial: StateSpec::Expr(initial.into()),
        target: StateSpec::Expr(target.into()),
        generator: Some(GeneratorKind::H),
        grid: grid.clone(),
    };
    ExperimentSpec {
        model: ModelSpec::Sds { g, k },
        normalization: Some(NormalizationPolicy::Sds),
        scenarios: vec![
            scenario("vacuum_to_psi1", "phi0", "psi1"),
            scenario("vacuum_to_phi1", "phi0", "phi1"),
            scenario("superposition_to_psi0", "phi0 + phi1", "psi0"),
        ],
        laws: ProbabilityLaw::ALL.to_vec(),
        outputs: Default::default(),
        tolerances: Tolerances::default(),
    }
}

/// Writes `spec.json`, then discriminates; with `verify` also audits.
pub fn cmd_sds(spec: ExperimentSpec, ov: Overrides, verify: bool) -> CliResult<Outcome> {
    spec.validate()?;
    let p = prepare(spec, ov)?;
    let path = p.dir.join("spec.json");
    write_json(&path, &p.spec)?;
    let mut out = cmd_discriminate(&p)?;
    out.files.insert(0, path);
    if verify {
        let v = cmd_verify(&p)?;
        out.files.extend(v.files);
        out.summary.extend(v.summary);
        out.failures = v.failures;
    }
    Ok(out)
}
