//! Checks that Hamiltonian couplings between the qubits keep the
//! decoherence-free subspace invariant.

use serde::{Deserialize, Serialize};

use crate::dfs::{dfs_basis, dfs_kernel, DEFAULT_KERNEL_TOL};
use crate::dynamics::{EvolveError, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, identity, projector, span_projector};
use crate::operators::{dipole_hamiltonian, ising_hamiltonian, Boundary, SqueezeParams};
use crate::scalar::{cis, lit, to_f64, CMatrix, CVector, Cx, Real};
use crate::scenario::{evolve_scenario, HamiltonianSpec, ScenarioConfig};
use crate::state::{ComplexPair, KetState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceSample {
    pub t: f64,
    /// `||(I - P) U(t) P||_F`.
    pub leakage: f64,
    /// `<phi2|U(t)|phi2> e^{-i Omega t}`; dipole checks only.
    pub phase_ratio: Option<ComplexPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub coupling: String,
    pub n_qubits: usize,
    pub dfs_dimension: usize,
    /// `||(I - P) H P||_F`.
    pub generator_leakage: f64,
    /// Largest `||(I - P) U(t) P||_F` over the time grid.
    pub subspace_leakage: f64,
    /// Phase ratio at the last sampled time; 1 when the predicted
    /// `e^{i Omega t}` on `phi2` is exact.
    pub phase_check: Option<ComplexPair>,
    /// Largest `||U(t) phi2 - e^{i Omega t} phi2||`.
    pub max_phase_error: Option<f64>,
    /// Largest `||U(t) phi1 - phi1||`.
    pub max_phi1_error: Option<f64>,
    pub samples: Vec<InvarianceSample>,
}

impl InvarianceReport {
    /// All recorded deviations are within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.generator_leakage <= tol
            && self.subspace_leakage <= tol
            && self.max_phase_error.is_none_or(|e| e <= tol)
            && self.max_phi1_error.is_none_or(|e| e <= tol)
    }
}

fn check_grid<T: Real>(t_grid: &[T]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Domain("time grid is empty".into()));
    }
    if t_grid.iter().any(|t| !to_f64(*t).is_finite()) {
        return Err(Error::Domain("time grid contains non-finite values".into()));
    }
    Ok(())
}

/// `||(I - P) A P||_F`.
pub fn leakage<T: Real>(p: &CMatrix<T>, a: &CMatrix<T>) -> T {
    let q = identity::<T>(p.nrows()) - p;
    (q * a * p).norm()
}

/// Dipole exchange on two qubits, checked against `span{phi1, phi2}`.
pub fn check_dipole_invariance<T: Real>(
    params: &SqueezeParams<T>,
    omega: T,
    t_grid: &[T],
) -> Result<InvarianceReport> {
    check_grid(t_grid)?;
    let h = dipole_hamiltonian(omega);
    let b = dfs_basis(params);
    let p = projector(
        4,
        &[b.phi1.amplitudes().clone(), b.phi2.amplitudes().clone()],
    );
    let generator_leakage = to_f64(leakage(&p, &h));

    let mut samples = Vec::with_capacity(t_grid.len());
    let (mut worst_leak, mut worst_phase, mut worst_phi1) = (0.0f64, 0.0f64, 0.0f64);
    for &t in t_grid {
        let u = expm_hermitian(&h, t);
        let leak = to_f64(leakage(&p, &u));
        let predicted = cis(omega * t);
        let u_phi2 = &u * b.phi2.amplitudes();
        let phase_err = to_f64((&u_phi2 - b.phi2.amplitudes() * predicted).norm());
        let phi1_err = to_f64((&u * b.phi1.amplitudes() - b.phi1.amplitudes()).norm());
        let ratio: Cx<T> = b.phi2.amplitudes().dotc(&u_phi2) * predicted.conj();
        worst_leak = worst_leak.max(leak);
        worst_phase = worst_phase.max(phase_err);
        worst_phi1 = worst_phi1.max(phi1_err);
        samples.push(InvarianceSample {
            t: to_f64(t),
            leakage: leak,
            phase_ratio: Some(ratio.into()),
        });
    }
    Ok(InvarianceReport {
        coupling: "dipole".into(),
        n_qubits: 2,
        dfs_dimension: 2,
        generator_leakage,
        subspace_leakage: worst_leak,
        phase_check: samples.last().and_then(|s| s.phase_ratio),
        max_phase_error: Some(worst_phase),
        max_phi1_error: Some(worst_phi1),
        samples,
    })
}

/// Open Ising chain on an even register, checked against the numerical
/// kernel of `S`.
pub fn check_ising_invariance<T: Real>(
    params: &SqueezeParams<T>,
    coupling: T,
    n_qubits: usize,
    t_grid: &[T],
) -> Result<InvarianceReport> {
    check_ising_invariance_with(params, coupling, n_qubits, Boundary::Open, t_grid)
}

pub fn check_ising_invariance_with<T: Real>(
    params: &SqueezeParams<T>,
    coupling: T,
    n_qubits: usize,
    boundary: Boundary,
    t_grid: &[T],
) -> Result<InvarianceReport> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "Ising check needs an even register >= 2, got {n_qubits}"
        )));
    }
    check_grid(t_grid)?;
    let h = ising_hamiltonian(coupling, n_qubits, boundary)?;
    let kernel = dfs_kernel(params, n_qubits, lit(DEFAULT_KERNEL_TOL))?;
    let dfs_dimension = kernel.len();
    let vecs: Vec<CVector<T>> = kernel.into_iter().map(KetState::into_amplitudes).collect();
    let p = span_projector(1 << n_qubits, &vecs);
    let generator_leakage = to_f64(leakage(&p, &h));

    let samples: Vec<InvarianceSample> = t_grid
        .iter()
        .map(|&t| InvarianceSample {
            t: to_f64(t),
            leakage: to_f64(leakage(&p, &expm_hermitian(&h, t))),
            phase_ratio: None,
        })
        .collect();
    Ok(InvarianceReport {
        coupling: "ising".into(),
        n_qubits,
        dfs_dimension,
        generator_leakage,
        subspace_leakage: samples.iter().fold(0.0, |m, s| m.max(s.leakage)),
        phase_check: None,
        max_phase_error: None,
        max_phi1_error: None,
        samples,
    })
}

/// Master-equation run with a coupling Hamiltonian; see [`evolve_scenario`]
/// for the recorded series.
pub fn evolve_with_coupling(
    config: &ScenarioConfig,
) -> std::result::Result<Trajectory<f64>, EvolveError<f64>> {
    if config.hamiltonian == HamiltonianSpec::None {
        return Err(Error::Domain("a coupling Hamiltonian is required".into()).into());
    }
    evolve_scenario(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::lambda_product_states;
    use crate::linalg::max_abs;
    use crate::scenario::InitialState;
    use std::f64::consts::PI;

    fn p(n: f64, psi: f64) -> SqueezeParams<f64> {
        SqueezeParams::new(n, psi, 1.0).unwrap()
    }

    fn grid() -> Vec<f64> {
        (1..=50).map(|k| 0.1 * k as f64).collect()
    }

    #[test]
    fn dipole_phase_at_half_period() {
        let r = check_dipole_invariance(&p(1.0, 0.0), 1.0, &[PI]).unwrap();
        let b = dfs_basis(&p(1.0, 0.0));
        let u = expm_hermitian(&dipole_hamiltonian(1.0), PI);
        let amp = b.phi2.amplitudes().dotc(&(&u * b.phi2.amplitudes()));
        assert!((amp.re + 1.0).abs() < 1e-12 && amp.im.abs() < 1e-12);
        let ratio = r.phase_check.unwrap().to_complex::<f64>();
        assert!((ratio - Cx::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dipole_leaves_dfs_invariant() {
        for (n, psi) in [(1.0, 0.0), (0.3, 1.2), (4.0, -2.0)] {
            let r = check_dipole_invariance(&p(n, psi), 2.0, &grid()).unwrap();
            assert!(r.generator_leakage <= 1e-14, "{}", r.generator_leakage);
            assert!(r.samples.iter().all(|s| s.leakage <= 1e-12));
            assert!(r.holds(1e-10));
        }
    }

    #[test]
    fn dipole_spectrum_on_phi_basis() {
        let b = dfs_basis(&p(1.0, 0.7));
        let h = dipole_hamiltonian(1.5);
        let expect = [0.0, -1.5, 1.5, 0.0];
        for (k, e) in b.as_array().into_iter().zip(expect) {
            let resid = &h * k.amplitudes() - k.amplitudes() * Cx::new(e, 0.0);
            assert!(resid.norm() < 1e-14);
        }
    }

    #[test]
    fn zero_couplings_are_trivial() {
        let r = check_dipole_invariance(&p(2.0, 0.0), 0.0, &grid()).unwrap();
        assert!(r.subspace_leakage < 1e-14);
        assert!(r.max_phase_error.unwrap() < 1e-14);
        let r = check_ising_invariance(&p(1.0, 0.0), 0.0, 4, &grid()).unwrap();
        assert!(r.subspace_leakage < 1e-13);
    }

    #[test]
    fn ising_two_qubits_is_invariant() {
        for n in [0.2, 1.0, 3.0] {
            let r = check_ising_invariance(&p(n, 0.4), 1.0, 2, &grid()).unwrap();
            assert_eq!(r.dfs_dimension, 2);
            assert!(r.generator_leakage <= 1e-14, "{}", r.generator_leakage);
            assert!(r.subspace_leakage <= 1e-10);
        }
    }

    #[test]
    fn sigma_z_swaps_lambda_states_on_two_qubits() {
        let params = p(1.0, 0.0);
        let (pm, mp) = lambda_product_states(&params).unwrap();
        let h = ising_hamiltonian(1.0, 2, Boundary::Open).unwrap();
        // the single-spin map acts on each factor, so |l+ l-> goes to |l- l+>
        let img = &h * pm.amplitudes();
        let overlap = mp.amplitudes().dotc(&img);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ising_four_qubit_chain_leaks() {
        // the single-spin identity does not close the larger kernel under
        // nearest-neighbour zz bonds
        let r = check_ising_invariance(&p(1.0, 0.0), 1.0, 4, &grid()).unwrap();
        assert_eq!(r.dfs_dimension, 6);
        assert!(r.generator_leakage > 1.0);
        assert!(!r.holds(1e-10));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(check_dipole_invariance(&p(1.0, 0.0), 1.0, &[]).is_err());
        assert!(check_ising_invariance(&p(1.0, 0.0), 1.0, 3, &[1.0]).is_err());
        let cfg = ScenarioConfig::default();
        assert!(evolve_with_coupling(&cfg).is_err());
    }

    #[test]
    fn phi2_under_dipole_evolution_keeps_populations() {
        let cfg = ScenarioConfig {
            initial_state: InitialState::Named("phi2".into()),
            hamiltonian: HamiltonianSpec::Dipole { omega: 1.0 },
            t_end: 5.0,
            samples: 26,
            ..ScenarioConfig::default()
        };
        let traj = evolve_with_coupling(&cfg).unwrap();
        for k in 0..traj.len() {
            assert!((traj.observable("pop_phi2").unwrap()[k] - 1.0).abs() < 1e-9);
            assert!(traj.observable("coherence_re").unwrap()[k].abs() < 1e-9);
            assert!(traj.observable("coherence_im").unwrap()[k].abs() < 1e-9);
        }
        assert!(traj.conservation().holds());
    }

    #[test]
    fn dfs_superposition_rotates() {
        let omega = 1.0;
        let cfg = ScenarioConfig {
            initial_state: InitialState::Named("phi1+phi2".into()),
            hamiltonian: HamiltonianSpec::Dipole { omega },
            t_end: 5.0,
            samples: 51,
            ..ScenarioConfig::default()
        };
        let traj = evolve_with_coupling(&cfg).unwrap();
        let fid = traj.observable("dfs_fidelity").unwrap();
        let (cr, ci) = (
            traj.observable("coherence_re").unwrap(),
            traj.observable("coherence_im").unwrap(),
        );
        for (k, &t) in traj.times.iter().enumerate() {
            assert!(fid[k] >= 1.0 - 1e-8);
            let expected = Cx::new(0.0, -omega * t).exp() * 0.5;
            assert!((Cx::new(cr[k], ci[k]) - expected).norm() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn dfs_states_survive_ising_dynamics() {
        let cfg = ScenarioConfig {
            initial_state: InitialState::Named("phi1".into()),
            hamiltonian: HamiltonianSpec::Ising {
                coupling: 1.0,
                periodic: false,
            },
            n_bath: 0.5,
            t_end: 5.0,
            samples: 26,
            ..ScenarioConfig::default()
        };
        let traj = evolve_with_coupling(&cfg).unwrap();
        assert!(traj
            .observable("dfs_fidelity")
            .unwrap()
            .iter()
            .all(|f| *f >= 1.0 - 1e-8));
    }

    #[test]
    fn leakage_of_projector_itself_vanishes() {
        let b = dfs_basis(&p(1.0, 0.0));
        let proj = projector(4, &[b.phi1.amplitudes().clone()]);
        assert!(leakage(&proj, &proj) < 1e-15);
        assert!(max_abs(&proj) <= 1.0);
    }
}
