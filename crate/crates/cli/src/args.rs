use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfsim::scenario::{HamiltonianSpec, InitialState, ScenarioConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "dfsim",
    version,
    about = "Two-level systems in a common squeezed vacuum bath"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the master equation; writes a CSV time series and a JSON summary.
    Evolve(EvolveArgs),
    /// Decoherence-free subspace of a register: dimension and basis.
    Dfs(DfsArgs),
    /// Closed-form stationary state of a two-qubit scenario.
    Steady(SteadyArgs),
    /// Stationary or final-state diagnostics over a parameter grid.
    Sweep(SweepArgs),
    /// Spectrum of the Liouvillian.
    Rates(RatesArgs),
    /// Check that a coupling Hamiltonian keeps the DFS invariant.
    CheckCouplings(CouplingArgs),
}

/// Scenario fields; flags override values read from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Mean photon number N of the bath.
    #[arg(long)]
    pub n_bath: Option<f64>,
    /// Squeezing phase psi (radians).
    #[arg(long, allow_negative_numbers = true)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n_qubits: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Named initial state (++, +-, -+, --, phi1..phi4, phi1+phi2, bell, random)
    /// or a +/- pattern; write `--initial=--` for the all-minus state.
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// `none`, `dipole:OMEGA`, `ising:A` or `ising-periodic:A`.
    #[arg(long, value_parser = parse_hamiltonian)]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ScenarioArgs {
    /// Reads the config file (if any), applies the flag overrides and
    /// validates the result.
    pub fn resolve(&self) -> CliResult<ScenarioConfig> {
        let cfg = self.merged()?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`resolve`](Self::resolve) but ignores the initial state, for
    /// commands that only need the generator.
    pub fn resolve_model(&self) -> CliResult<ScenarioConfig> {
        let cfg = self.merged()?;
        cfg.validate_model()?;
        Ok(cfg)
    }

    fn merged(&self) -> CliResult<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::config(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::config(format!("invalid config {}: {e}", path.display()))
                })?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.n_bath {
            cfg.n_bath = v;
        }
        if let Some(v) = self.psi {
            cfg.psi = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.n_qubits {
            cfg.n_qubits = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = &self.initial {
            cfg.initial_state = InitialState::Named(v.clone());
        }
        if let Some(v) = self.hamiltonian {
            cfg.hamiltonian = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }
}

pub fn parse_hamiltonian(s: &str) -> Result<HamiltonianSpec, String> {
    if s == "none" {
        return Ok(HamiltonianSpec::None);
    }
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| format!("expected none, dipole:OMEGA or ising:A, got '{s}'"))?;
    let x: f64 = value
        .parse()
        .map_err(|_| format!("'{value}' is not a number"))?;
    match kind {
        "dipole" => Ok(HamiltonianSpec::Dipole { omega: x }),
        "ising" => Ok(HamiltonianSpec::Ising {
            coupling: x,
            periodic: false,
        }),
        "ising-periodic" => Ok(HamiltonianSpec::Ising {
            coupling: x,
            periodic: true,
        }),
        _ => Err(format!("unknown coupling '{kind}'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, env = "DFSIM_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Stem of the output file names.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DfsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub n_bath: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi: f64,
    #[arg(long, default_value_t = 2)]
    pub n_qubits: usize,
    /// Relative singular-value cutoff for the kernel of S.
    #[arg(long, default_value_t = 1e-10)]
    pub svd_tol: f64,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Also project the initial state onto the Liouvillian null space and
    /// report the residual against the closed form.
    #[arg(long)]
    pub cross_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    #[value(name = "n_bath", alias = "n-bath")]
    NBath,
    Psi,
    /// Weight of phi2 mixed into the initial state.
    #[value(name = "rho22_0", alias = "rho22-0")]
    Rho220,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::NBath => "n_bath",
            SweepAxis::Psi => "psi",
            SweepAxis::Rho220 => "rho22_0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum SweepMode {
    /// Closed-form stationary state.
    #[default]
    Steady,
    /// Final state of an integration to `t_end`.
    Evolve,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated grid values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "range"
    )]
    pub values: Vec<f64>,
    /// `start:stop:count`, endpoints included.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, value_enum, default_value_t = SweepMode::Steady)]
    pub mode: SweepMode,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SweepArgs {
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        let grid = match &self.range {
            Some(spec) => parse_range(spec)?,
            None => self.values.clone(),
        };
        if grid.len() < 2 {
            return Err(CliError::config(format!(
                "sweep needs at least 2 grid points, got {}",
                grid.len()
            )));
        }
        if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
            return Err(CliError::config(format!("non-finite grid value {v}")));
        }
        Ok(grid)
    }
}

pub fn parse_range(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::config(format!("range must be start:stop:count, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    })
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingKind {
    Dipole,
    Ising,
}

#[derive(Debug, Args)]
pub struct CouplingArgs {
    #[arg(long, value_enum)]
    pub coupling: CouplingKind,
    /// Omega for the dipole exchange, A for the Ising chain.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub strength: f64,
    #[arg(long, default_value_t = 1.0)]
    pub n_bath: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi: f64,
    #[arg(long, default_value_t = 2)]
    pub n_qubits: usize,
    /// Close the Ising chain into a ring.
    #[arg(long)]
    pub periodic: bool,
    /// Largest sampled time.
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    /// Number of sampled times in `(0, t_max]`.
    #[arg(long, default_value_t = 10)]
    pub t_samples: usize,
}
