//! Serializable description of a single simulation run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dfs::{dfs_basis, dfs_kernel};
use crate::dynamics::{evolve, EvolveError, IntegratorOptions, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::span_projector;
use crate::operators::{
    dipole_hamiltonian, ising_hamiltonian, lindblad_s, Boundary, SqueezeParams,
};
use crate::random::random_density_matrix;
use crate::scalar::{CMatrix, CVector};
use crate::state::{ComplexPair, DensityMatrix, KetState};

/// Names accepted by [`InitialState::Named`], besides arbitrary `+`/`-`
/// product patterns of the register length.
pub const NAMED_STATES: &[&str] = &[
    "++",
    "+-",
    "-+",
    "--",
    "phi1",
    "phi2",
    "phi3",
    "phi4",
    "phi1+phi2",
    "bell",
    "random",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// See [`NAMED_STATES`]. `bell` is `(|++> + |-->)/sqrt 2`; `random` draws a
    /// Hilbert-Schmidt uniform density matrix from the scenario seed.
    Named(String),
    /// Computational-basis amplitudes as `[re, im]` pairs; normalized on use.
    Amplitudes(Vec<ComplexPair>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named("++".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum HamiltonianSpec {
    #[default]
    None,
    Dipole {
        omega: f64,
    },
    Ising {
        coupling: f64,
        #[serde(default)]
        periodic: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Relative singular-value threshold for kernels and null spaces.
    pub svd_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            svd_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_bath: f64,
    pub psi: f64,
    pub gamma: f64,
    pub n_qubits: usize,
    pub initial_state: InitialState,
    pub hamiltonian: HamiltonianSpec,
    pub t_end: f64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_bath: 1.0,
            psi: 0.0,
            gamma: 1.0,
            n_qubits: 2,
            initial_state: InitialState::default(),
            hamiltonian: HamiltonianSpec::None,
            t_end: 20.0,
            samples: 201,
            tolerances: Tolerances::default(),
            seed: 0,
        }
    }
}

/// Largest register the dense solvers are allowed to build.
pub const MAX_QUBITS: usize = 8;

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.validate_model()?;
        self.initial_density().map(|_| ())
    }

    /// Everything except the initial state.
    pub fn validate_model(&self) -> Result<()> {
        SqueezeParams::new(self.n_bath, self.psi, self.gamma)?;
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {}",
                self.n_qubits
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain(format!(
                "t_end must be > 0, got {}",
                self.t_end
            )));
        }
        if self.samples < 2 {
            return Err(Error::Domain(format!(
                "samples must be >= 2, got {}",
                self.samples
            )));
        }
        let tol = &self.tolerances;
        for (name, v) in [
            ("rtol", tol.rtol),
            ("atol", tol.atol),
            ("svd_tol", tol.svd_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        match self.hamiltonian {
            HamiltonianSpec::Dipole { omega } => {
                if self.n_qubits != 2 {
                    return Err(Error::Domain(
                        "the dipole coupling is defined for two qubits only".into(),
                    ));
                }
                finite("omega", omega)?;
            }
            HamiltonianSpec::Ising { coupling, .. } => {
                if self.n_qubits < 2 {
                    return Err(Error::Domain(
                        "Ising coupling needs at least 2 qubits".into(),
                    ));
                }
                finite("coupling", coupling)?;
            }
            HamiltonianSpec::None => {}
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SqueezeParams<f64>> {
        SqueezeParams::new(self.n_bath, self.psi, self.gamma)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn lindblad(&self) -> Result<CMatrix<f64>> {
        lindblad_s(&self.params()?, self.n_qubits)
    }

    pub fn hamiltonian_matrix(&self) -> Result<Option<CMatrix<f64>>> {
        Ok(match self.hamiltonian {
            HamiltonianSpec::None => None,
            HamiltonianSpec::Dipole { omega } => Some(dipole_hamiltonian(omega)),
            HamiltonianSpec::Ising { coupling, periodic } => {
                let boundary = if periodic {
                    Boundary::Periodic
                } else {
                    Boundary::Open
                };
                Some(ising_hamiltonian(coupling, self.n_qubits, boundary)?)
            }
        })
    }

    pub fn integrator_options(&self) -> IntegratorOptions<f64> {
        IntegratorOptions {
            samples: self.samples,
            rtol: self.tolerances.rtol,
            atol: self.tolerances.atol,
            ..IntegratorOptions::default()
        }
    }

    /// Projector onto the kernel of `S` for this register.
    pub fn dfs_projector(&self) -> Result<CMatrix<f64>> {
        let kernel = dfs_kernel(&self.params()?, self.n_qubits, self.tolerances.svd_tol)?;
        let vecs: Vec<CVector<f64>> = kernel.into_iter().map(KetState::into_amplitudes).collect();
        Ok(span_projector(self.dim(), &vecs))
    }

    pub fn initial_density(&self) -> Result<DensityMatrix<f64>> {
        let dim = self.dim();
        match &self.initial_state {
            InitialState::Amplitudes(amps) => {
                if amps.len() != dim {
                    return Err(Error::Domain(format!(
                        "expected {dim} amplitudes, got {}",
                        amps.len()
                    )));
                }
                let v = CVector::from_iterator(dim, amps.iter().map(|p| p.to_complex()));
                Ok(KetState::normalized(v)?.projector())
            }
            InitialState::Named(name) => self.named_state(name),
        }
    }

    fn named_state(&self, raw: &str) -> Result<DensityMatrix<f64>> {
        let name = raw.replace('\u{2212}', "-");
        if name == "random" {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            return Ok(random_density_matrix(self.dim(), &mut rng));
        }
        if !name.is_empty() && name.chars().all(|c| c == '+' || c == '-') {
            if name.len() != self.n_qubits {
                return Err(Error::Domain(format!(
                    "product state '{raw}' does not match {} qubits",
                    self.n_qubits
                )));
            }
            return Ok(KetState::product(&name)?.projector());
        }
        if self.n_qubits != 2 {
            return Err(Error::Domain(format!(
                "initial state '{raw}' is only defined for two qubits"
            )));
        }
        let b = dfs_basis(&self.params()?);
        let ket = match name.as_str() {
            "phi1" => b.phi1,
            "phi2" => b.phi2,
            "phi3" => b.phi3,
            "phi4" => b.phi4,
            "phi1+phi2" => KetState::normalized(b.phi1.amplitudes() + b.phi2.amplitudes())?,
            "bell" => {
                let pp = KetState::<f64>::product("++")?;
                let mm = KetState::<f64>::product("--")?;
                KetState::normalized(pp.amplitudes() + mm.amplitudes())?
            }
            _ => return Err(Error::Domain(format!(
                "unknown initial state '{raw}'; expected one of {NAMED_STATES:?} or a +/- pattern"
            ))),
        };
        Ok(ket.projector())
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

/// Runs the scenario. Adds the `dfs_fidelity` series `Tr(P rho)`, and for two
/// qubits the phi-basis observables plus `coherence_re`/`coherence_im` of
/// `<phi1|rho|phi2>`.
pub fn evolve_scenario(
    config: &ScenarioConfig,
) -> std::result::Result<Trajectory<f64>, EvolveError<f64>> {
    config.validate()?;
    let rho0 = config.initial_density()?;
    let s = config.lindblad()?;
    let h = config.hamiltonian_matrix()?;
    let mut traj = evolve(
        &rho0,
        &s,
        config.gamma,
        h.as_ref(),
        config.t_end,
        &config.integrator_options(),
    )?;
    let p = config.dfs_projector()?;
    let fid = traj
        .states
        .iter()
        .map(|r| (&p * r.matrix()).trace().re)
        .collect();
    traj.observables.insert("dfs_fidelity".into(), fid);
    if config.n_qubits == 2 {
        let b = dfs_basis(&config.params()?);
        traj.attach_phi_observables(&b)?;
        let (mut cr, mut ci) = (vec![], vec![]);
        for r in &traj.states {
            let z = b
                .phi1
                .amplitudes()
                .dotc(&(r.matrix() * b.phi2.amplitudes()));
            cr.push(z.re);
            ci.push(z.im);
        }
        traj.observables.insert("coherence_re".into(), cr);
        traj.observables.insert("coherence_im".into(), ci);
    }
    Ok(traj)
}
