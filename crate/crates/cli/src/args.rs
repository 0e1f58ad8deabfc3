use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nhqdyn::{GeneratorKind, ProbabilityLaw};

use crate::error::{CliError, CliResult};
use crate::run::{self, Outcome, Overrides};
use crate::spec::{parse_spec, GridSpec};

#[derive(Debug, Parser)]
#[command(name = "nhqdyn", version, about = "Dynamics and transition probabilities for non-self-adjoint Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment spec (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for traces and reports (default: spec `outputs.dir`, else `.`).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Replaces every scenario grid: `start:stop:steps`, steps + 1 samples.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Comma-separated subset of standard, psi, phi.
    #[arg(long, global = true, value_delimiter = ',')]
    pub laws: Option<Vec<String>>,
    /// Replaces every scenario generator: h, hdagger or h0.
    #[arg(long, global = true)]
    pub generator: Option<String>,
    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tol", global = true)]
    pub tol: Vec<String>,
    /// Seed for random probes (audit matrices, thermal observables).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the system; write system.json and audit.json.
    Build,
    /// Norm traces of each scenario's initial state.
    Evolve,
    /// Transition-probability traces per scenario.
    Transit,
    /// Traces plus a report of which laws are distinguishable.
    Discriminate,
    /// Gibbs states and KMS residual table.
    Thermal {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Two-level pseudo-fermion model with its standard scenarios.
    Sds {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        /// Also run the invariant audit; fails if any check fails.
        #[arg(long)]
        verify: bool,
    },
    /// Full invariant suite; fails if any check fails.
    Verify,
}

impl Cli {
    pub fn overrides(&self) -> CliResult<Overrides> {
        let laws = match &self.laws {
            None => None,
            Some(names) => Some(
                names
                    .iter()
                    .map(|n| {
                        ProbabilityLaw::from_name(n.trim())
                            .ok_or_else(|| CliError::Usage(format!("unknown law `{n}`")))
                    })
                    .collect::<CliResult<Vec<_>>>()?,
            ),
        };
        let generator = match self.generator.as_deref() {
            None => None,
            Some(g) => Some(
                GeneratorKind::ALL
                    .into_iter()
                    .find(|k| k.name() == g)
                    .ok_or_else(|| CliError::Usage(format!("unknown generator `{g}`")))?,
            ),
        };
        Ok(Overrides {
            out_dir: self.out_dir.clone(),
            grid: self.grid.as_deref().map(GridSpec::parse_sugar).transpose()?,
            laws,
            generator,
            tol: self.tol.clone(),
            seed: self.seed,
        })
    }

    fn load_spec(&self) -> CliResult<crate::ExperimentSpec> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Usage("--input <spec.json> is required".into()))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        parse_spec(&text)
    }

    pub fn execute(&self) -> CliResult<Outcome> {
        let ov = self.overrides()?;
        if let Command::Sds { g, k, verify } = self.command {
            let spec = match &self.input {
                Some(_) => self.load_spec()?,
                None => run::sds_spec(g, k),
            };
            return run::cmd_sds(spec, ov, verify);
        }
        let p = run::prepare(self.load_spec()?, ov)?;
        match self.command {
            Command::Build => run::cmd_build(&p),
            Command::Evolve => run::cmd_evolve(&p),
            Command::Transit => run::cmd_transit(&p),
            Command::Discriminate => run::cmd_discriminate(&p),
            Command::Thermal { beta } => run::cmd_thermal(&p, beta),
            Command::Verify => run::cmd_verify(&p),
            Command::Sds { .. } => unreachable!(),
        }
    }
}
