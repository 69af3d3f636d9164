use std::path::PathBuf;

use dfsim::couplings::{check_dipole_invariance, check_ising_invariance_with, InvarianceReport};
use dfsim::dfs::{dfs_basis, dfs_dimension, dfs_kernel};
use dfsim::dynamics::{
    asymptotic_state, build_liouvillian, decay_rates, evolve, IntegratorOptions, Trajectory,
};
use dfsim::linalg::{max_abs, projector, span_projector};
use dfsim::measures::{concurrence, observe, purity, trace_distance, ObservableReport};
use dfsim::operators::{Boundary, SqueezeParams};
use dfsim::scenario::{evolve_scenario, HamiltonianSpec, InitialState, ScenarioConfig};
use dfsim::state::{ComplexPair, DensityMatrix};
use dfsim::stationary::{
    classify_purity, project_initial, spectral_decomposition, steady_closed_form, steady_weights,
    InitialProjection, PurityClass,
};
use dfsim::CVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    CouplingArgs, CouplingKind, DfsArgs, EvolveArgs, RatesArgs, SteadyArgs, SweepArgs, SweepAxis,
    SweepMode,
};
use crate::error::{CliError, CliResult, EXIT_NUMERICS};
use crate::output::{
    fmt_num, matrix_rows, output_path, prepare_dir, validate_csv, write_json, write_trajectory_csv,
};

/// Largest register for which `rates` builds the dense spectrum.
pub const MAX_RATES_QUBITS: usize = 4;

fn amplitudes(v: &CVector<f64>) -> Vec<ComplexPair> {
    v.iter().map(|z| (*z).into()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionSummary {
    pub rho22_0: f64,
    pub rho12_0: ComplexPair,
    pub residual_weight: f64,
}

impl From<&InitialProjection<f64>> for ProjectionSummary {
    fn from(p: &InitialProjection<f64>) -> Self {
        Self {
            rho22_0: p.rho22_0,
            rho12_0: p.rho12_0.into(),
            residual_weight: p.residual_weight,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyPrediction {
    /// `(1 - rho22(0), rho22(0))` on `(phi1, phi2)`.
    pub phi_weights: [f64; 2],
    /// Eigenvalues `P1 >= P2`.
    pub eigenvalues: [f64; 2],
    pub x_param: Option<f64>,
    pub state: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conservation {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub config: ScenarioConfig,
    pub stopped_early_at: Option<f64>,
    pub final_state: Vec<Vec<ComplexPair>>,
    pub final_observables: ObservableReport,
    pub final_dfs_fidelity: f64,
    pub conservation: Conservation,
    pub projection: ProjectionSummary,
    pub classification: PurityClass,
    /// Absent when a coupling Hamiltonian keeps the DFS block rotating.
    pub steady_prediction: Option<SteadyPrediction>,
    /// Largest trace distance between the last tenth of the samples and the prediction.
    pub max_tail_deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn cmd_evolve(args: &EvolveArgs) -> CliResult<Written> {
    let cfg = args.scenario.resolve()?;
    if cfg.n_qubits != 2 {
        return Err(CliError::config(format!(
            "evolve reports phi-basis observables and needs n_qubits = 2, got {}",
            cfg.n_qubits
        )));
    }
    let traj = evolve_scenario(&cfg)?;
    let summary = evolve_summary(&cfg, &traj)?;

    prepare_dir(&args.out.out_dir)?;
    let stem = args.out.name.as_deref().unwrap_or("evolve");
    let written = Written {
        csv: output_path(&args.out.out_dir, stem, "csv"),
        json: output_path(&args.out.out_dir, stem, "json"),
    };
    write_trajectory_csv(&written.csv, &traj)?;
    validate_csv(&written.csv)?;
    write_json(&written.json, &summary)?;
    Ok(written)
}

pub fn evolve_summary(cfg: &ScenarioConfig, traj: &Trajectory<f64>) -> CliResult<EvolveSummary> {
    let params = cfg.params()?;
    let basis = dfs_basis(&params);
    let rho0 = &traj.states[0];
    let last = traj
        .final_state()
        .ok_or_else(|| CliError::numerics("empty trajectory"))?;
    let proj = project_initial(rho0, &basis)?;
    let report = traj.conservation();

    let (prediction, tail) = if cfg.hamiltonian == HamiltonianSpec::None {
        let target = steady_closed_form(&proj, &basis)?;
        let dec = spectral_decomposition(&proj, &basis)?;
        let n_tail = (traj.len() / 10).max(1);
        let tail = traj.states[traj.len() - n_tail..]
            .iter()
            .map(|r| trace_distance(r, &target))
            .fold(0.0, f64::max);
        let prediction = SteadyPrediction {
            phi_weights: [1.0 - proj.rho22_0, proj.rho22_0],
            eigenvalues: [dec.p1, dec.p2],
            x_param: dec.x_param,
            state: matrix_rows(target.matrix()),
        };
        (Some(prediction), Some(tail))
    } else {
        (None, None)
    };

    Ok(EvolveSummary {
        config: cfg.clone(),
        stopped_early_at: traj.stopped_early_at,
        final_state: matrix_rows(last.matrix()),
        final_observables: observe(last, &basis)?,
        final_dfs_fidelity: traj
            .observable("dfs_fidelity")
            .and_then(|v| v.last().copied())
            .unwrap_or(f64::NAN),
        conservation: Conservation {
            max_trace_error: report.max_trace_error,
            max_hermiticity_error: report.max_hermiticity_error,
            min_eigenvalue: report.min_eigenvalue,
        },
        projection: (&proj).into(),
        classification: classify_purity(&proj),
        steady_prediction: prediction,
        max_tail_deviation: tail,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DfsReport {
    pub n_bath: f64,
    pub psi: f64,
    pub n_qubits: usize,
    pub numeric_dimension: usize,
    /// `N! / ((N/2)!)^2`; only defined for even registers.
    pub formula_dimension: Option<u64>,
    pub formula_applies: bool,
    /// Orthonormal kernel basis of `S`, computational-basis amplitudes.
    pub basis: Vec<Vec<ComplexPair>>,
    /// `phi1`, `phi2` for two qubits.
    pub phi_basis: Option<Vec<Vec<ComplexPair>>>,
    /// Frobenius distance between the kernel projector and the `phi1, phi2` projector.
    pub phi_projector_distance: Option<f64>,
}

pub fn cmd_dfs(args: &DfsArgs) -> CliResult<DfsReport> {
    let params = SqueezeParams::new(args.n_bath, args.psi, 1.0)?;
    if args.n_qubits == 0 || args.n_qubits > dfsim::scenario::MAX_QUBITS {
        return Err(CliError::config(format!(
            "n_qubits must be in 1..={}, got {}",
            dfsim::scenario::MAX_QUBITS,
            args.n_qubits
        )));
    }
    let kernel = dfs_kernel(&params, args.n_qubits, args.svd_tol)?;
    let formula = dfs_dimension(args.n_qubits).ok();
    let vecs: Vec<CVector<f64>> = kernel.iter().map(|k| k.amplitudes().clone()).collect();
    let (phi_basis, distance) = if args.n_qubits == 2 {
        let b = dfs_basis(&params);
        let pair = [b.phi1.amplitudes().clone(), b.phi2.amplitudes().clone()];
        let d = (span_projector(4, &vecs) - projector(4, &pair)).norm();
        (Some(pair.iter().map(amplitudes).collect()), Some(d))
    } else {
        (None, None)
    };
    Ok(DfsReport {
        n_bath: args.n_bath,
        psi: args.psi,
        n_qubits: args.n_qubits,
        numeric_dimension: kernel.len(),
        formula_dimension: formula,
        formula_applies: formula.is_some(),
        basis: vecs.iter().map(amplitudes).collect(),
        phi_basis,
        phi_projector_distance: distance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub null_space_dimension: usize,
    /// Largest element of the difference between the null-space projection
    /// of the initial state and the closed form.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyReport {
    pub n_bath: f64,
    pub psi: f64,
    pub initial_state: InitialState,
    pub projection: ProjectionSummary,
    pub classification: PurityClass,
    pub is_pure: bool,
    pub phi_weights: [f64; 2],
    pub eigenvalues: [f64; 2],
    pub x_param: Option<f64>,
    pub nu1: Vec<ComplexPair>,
    pub nu2: Vec<ComplexPair>,
    pub steady_state: Vec<Vec<ComplexPair>>,
    pub purity: f64,
    pub concurrence: f64,
    pub cross_check: Option<CrossCheck>,
}

pub fn cmd_steady(args: &SteadyArgs) -> CliResult<SteadyReport> {
    let cfg = args.scenario.resolve()?;
    if cfg.n_qubits != 2 {
        return Err(CliError::config(format!(
            "the closed-form stationary state is two-qubit only, got n_qubits = {}",
            cfg.n_qubits
        )));
    }
    if cfg.hamiltonian != HamiltonianSpec::None {
        return Err(CliError::config(
            "the closed-form stationary state assumes no coupling Hamiltonian",
        ));
    }
    let params = cfg.params()?;
    let basis = dfs_basis(&params);
    let rho0 = cfg.initial_density()?;
    let proj = project_initial(&rho0, &basis)?;
    let state = steady_closed_form(&proj, &basis)?;
    let dec = spectral_decomposition(&proj, &basis)?;
    let class = classify_purity(&proj);

    let cross_check = if args.cross_check {
        let l = build_liouvillian(&cfg.lindblad()?, cfg.gamma, None)?;
        let tol = cfg.tolerances.svd_tol;
        let limit = asymptotic_state(&l, rho0.matrix(), tol)?;
        Some(CrossCheck {
            null_space_dimension: dfsim::dynamics::steady_states(&l, tol).len(),
            residual: max_abs(&(limit - state.matrix())),
        })
    } else {
        None
    };

    Ok(SteadyReport {
        n_bath: cfg.n_bath,
        psi: cfg.psi,
        initial_state: cfg.initial_state.clone(),
        projection: (&proj).into(),
        classification: class,
        is_pure: class.is_pure(),
        phi_weights: [1.0 - proj.rho22_0, proj.rho22_0],
        eigenvalues: [dec.p1, dec.p2],
        x_param: dec.x_param,
        nu1: amplitudes(dec.nu1.amplitudes()),
        nu2: amplitudes(dec.nu2.amplitudes()),
        steady_state: matrix_rows(state.matrix()),
        purity: purity(&state),
        concurrence: concurrence(&state)?,
        cross_check,
    })
}

pub const SWEEP_HEADER: [&str; 9] = [
    "axis_value",
    "rho22_0",
    "p1",
    "p2",
    "purity",
    "concurrence",
    "fidelity_phi1",
    "fidelity_phi2",
    "class",
];

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub rho22_0: f64,
    pub p1: f64,
    pub p2: f64,
    pub purity: f64,
    pub concurrence: f64,
    pub fidelity_phi1: f64,
    pub fidelity_phi2: f64,
    pub class: PurityClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub axis_value: f64,
    pub exit_code: u8,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub config: ScenarioConfig,
    pub axis: &'static str,
    pub mode: &'static str,
    pub points: usize,
    pub completed: usize,
    pub failures: Vec<SweepFailure>,
}

/// One grid point. For the `rho22_0` axis the initial state is
/// `(1 - p) rho_init + p |phi2><phi2|`.
pub fn sweep_point(
    base: &ScenarioConfig,
    axis: SweepAxis,
    value: f64,
    mode: SweepMode,
) -> CliResult<SweepRow> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::NBath => cfg.n_bath = value,
        SweepAxis::Psi => cfg.psi = value,
        SweepAxis::Rho220 => {
            if !(0.0..=1.0).contains(&value) {
                return Err(CliError::config(format!(
                    "rho22_0 weight {value} outside [0, 1]"
                )));
            }
        }
    }
    cfg.validate()?;
    let params = cfg.params()?;
    let basis = dfs_basis(&params);
    let mut rho0 = cfg.initial_density()?;
    if axis == SweepAxis::Rho220 {
        let m = rho0.matrix() * dfsim::Cx::new(1.0 - value, 0.0)
            + basis.phi2.projector().matrix() * dfsim::Cx::new(value, 0.0);
        rho0 = DensityMatrix::new(m)?;
    }
    let proj = project_initial(&rho0, &basis)?;
    let final_state = match mode {
        SweepMode::Steady => steady_closed_form(&proj, &basis)?,
        SweepMode::Evolve => {
            let opts = IntegratorOptions {
                samples: 2,
                ..cfg.integrator_options()
            };
            let h = cfg.hamiltonian_matrix()?;
            let traj = evolve(
                &rho0,
                &cfg.lindblad()?,
                cfg.gamma,
                h.as_ref(),
                cfg.t_end,
                &opts,
            )?;
            traj.final_state()
                .cloned()
                .ok_or_else(|| CliError::numerics("empty trajectory"))?
        }
    };
    let (p1, p2) = steady_weights(&proj);
    Ok(SweepRow {
        axis_value: value,
        rho22_0: proj.rho22_0,
        p1,
        p2,
        purity: purity(&final_state),
        concurrence: concurrence(&final_state)?,
        fidelity_phi1: final_state.expectation(&basis.phi1),
        fidelity_phi2: final_state.expectation(&basis.phi2),
        class: classify_purity(&proj),
    })
}

fn class_name(c: PurityClass) -> &'static str {
    match c {
        PurityClass::SymmetricPure => "SymmetricPure",
        PurityClass::Phi2Invariant => "Phi2Invariant",
        PurityClass::SaturatedPure => "SaturatedPure",
        PurityClass::Mixed => "Mixed",
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<Written> {
    let grid = args.grid()?;
    let cfg = args.scenario.resolve()?;
    if cfg.n_qubits != 2 {
        return Err(CliError::config(
            "sweep reports two-qubit diagnostics; n_qubits must be 2",
        ));
    }
    let work = || -> Vec<CliResult<SweepRow>> {
        grid.par_iter()
            .map(|&v| sweep_point(&cfg, args.axis, v, args.mode))
            .collect()
    };
    let results = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::other(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    prepare_dir(&args.out.out_dir)?;
    let stem = args.out.name.as_deref().unwrap_or("sweep");
    let written = Written {
        csv: output_path(&args.out.out_dir, stem, "csv"),
        json: output_path(&args.out.out_dir, stem, "json"),
    };
    let mut w = csv::Writer::from_path(&written.csv)?;
    w.write_record(SWEEP_HEADER)?;
    let mut failures = Vec::new();
    for (value, result) in grid.iter().zip(&results) {
        match result {
            Ok(row) => {
                let mut rec: Vec<String> = [
                    row.axis_value,
                    row.rho22_0,
                    row.p1,
                    row.p2,
                    row.purity,
                    row.concurrence,
                    row.fidelity_phi1,
                    row.fidelity_phi2,
                ]
                .iter()
                .map(|x| fmt_num(*x))
                .collect();
                rec.push(class_name(row.class).to_string());
                w.write_record(&rec)?;
            }
            Err(e) => failures.push(SweepFailure {
                axis_value: *value,
                exit_code: e.code,
                error: e.message.clone(),
            }),
        }
    }
    w.flush()?;
    drop(w);
    let completed = grid.len() - failures.len();
    let summary = SweepSummary {
        config: cfg,
        axis: args.axis.column(),
        mode: match args.mode {
            SweepMode::Steady => "steady",
            SweepMode::Evolve => "evolve",
        },
        points: grid.len(),
        completed,
        failures,
    };
    write_json(&written.json, &summary)?;
    if completed > 0 {
        validate_csv(&written.csv)?;
    }
    if let Some(worst) = summary.failures.iter().map(|f| f.exit_code).max() {
        let first = &summary.failures[0];
        let msg = format!(
            "{} of {} sweep points failed; first at {} = {}: {}",
            summary.failures.len(),
            summary.points,
            summary.axis,
            first.axis_value,
            first.error
        );
        return Err(if worst == EXIT_NUMERICS {
            CliError::numerics(msg)
        } else {
            CliError {
                code: worst,
                message: msg,
            }
        });
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct RatesReport {
    pub n_bath: f64,
    pub psi: f64,
    pub gamma: f64,
    pub n_qubits: usize,
    pub hamiltonian: HamiltonianSpec,
    /// Number of eigenvalues with `|z| <= 1e-9 gamma`.
    pub stationary_dimension: usize,
    /// Smallest nonzero decay rate `-Re z`.
    pub spectral_gap: Option<f64>,
    /// Eigenvalues `[re, im]`, slowest first.
    pub rates: Vec<ComplexPair>,
}

pub fn cmd_rates(args: &RatesArgs) -> CliResult<RatesReport> {
    let cfg = args.scenario.resolve_model()?;
    if cfg.n_qubits > MAX_RATES_QUBITS {
        return Err(CliError::config(format!(
            "rates supports up to {MAX_RATES_QUBITS} qubits, got {}",
            cfg.n_qubits
        )));
    }
    let h = cfg.hamiltonian_matrix()?;
    let l = build_liouvillian(&cfg.lindblad()?, cfg.gamma, h.as_ref())?;
    let rates = decay_rates(&l).map_err(|e| CliError::numerics(e.to_string()))?;
    let zero = 1e-9 * cfg.gamma;
    let stationary = rates.iter().filter(|z| z.norm() <= zero).count();
    let gap = rates
        .iter()
        .filter(|z| z.re < -zero)
        .map(|z| -z.re)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.min(r)))
        });
    Ok(RatesReport {
        n_bath: cfg.n_bath,
        psi: cfg.psi,
        gamma: cfg.gamma,
        n_qubits: cfg.n_qubits,
        hamiltonian: cfg.hamiltonian,
        stationary_dimension: stationary,
        spectral_gap: gap,
        rates: rates.into_iter().map(Into::into).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingCheck {
    #[serde(flatten)]
    pub report: InvarianceReport,
    pub tolerance: f64,
    pub invariant: bool,
}

pub const INVARIANCE_TOL: f64 = 1e-10;

pub fn cmd_check_couplings(args: &CouplingArgs) -> CliResult<CouplingCheck> {
    let params = SqueezeParams::new(args.n_bath, args.psi, 1.0)?;
    if args.t_samples == 0 {
        return Err(CliError::config("t_samples must be >= 1"));
    }
    if !(args.t_max > 0.0 && args.t_max.is_finite()) {
        return Err(CliError::config(format!(
            "t_max must be > 0, got {}",
            args.t_max
        )));
    }
    let grid: Vec<f64> = (1..=args.t_samples)
        .map(|k| args.t_max * k as f64 / args.t_samples as f64)
        .collect();
    let report = match args.coupling {
        CouplingKind::Dipole => {
            if args.n_qubits != 2 {
                return Err(CliError::config(
                    "the dipole check is defined for two qubits",
                ));
            }
            check_dipole_invariance(&params, args.strength, &grid)?
        }
        CouplingKind::Ising => {
            if args.n_qubits > dfsim::scenario::MAX_QUBITS {
                return Err(CliError::config(format!(
                    "n_qubits must be <= {}",
                    dfsim::scenario::MAX_QUBITS
                )));
            }
            let boundary = if args.periodic {
                Boundary::Periodic
            } else {
                Boundary::Open
            };
            check_ising_invariance_with(&params, args.strength, args.n_qubits, boundary, &grid)?
        }
    };
    let invariant = report.holds(INVARIANCE_TOL);
    Ok(CouplingCheck {
        report,
        tolerance: INVARIANCE_TOL,
        invariant,
    })
}
