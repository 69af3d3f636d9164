//! State diagnostics: purity, fidelity, trace distance and the Wootters
//! concurrence.

use nalgebra::{ComplexField, SVD};
use serde::{Deserialize, Serialize};

use crate::dfs::DfsBasis;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, kron};
use crate::operators::sigma_y;
use crate::scalar::{lit, to_f64, CMatrix, Real};
use crate::state::{DensityMatrix, KetState};

/// `Tr(rho^2)`.
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    rho.matrix()
        .iter()
        .fold(T::zero(), |acc, z| acc + z.modulus_squared())
}

/// `<psi| rho |psi>`.
pub fn fidelity_to_pure<T: Real>(rho: &DensityMatrix<T>, psi: &KetState<T>) -> Result<T> {
    if rho.dim() != psi.dim() {
        return Err(Error::Shape {
            expected: rho.dim(),
            found_rows: psi.dim(),
            found_cols: 1,
        });
    }
    Ok(rho.expectation(psi))
}

/// `||a - b||_1 / 2`.
pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> T {
    let diff = a.matrix() - b.matrix();
    eigvalsh(&diff)
        .into_iter()
        .fold(T::zero(), |acc, e| acc + e.abs())
        * lit(0.5)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_i` are the singular values of the symmetric matrix
/// `tau = W^T (Y⊗Y) W`, where the columns of `W` are `sqrt(p_k) v_k` from the
/// eigendecomposition of `rho`. They coincide with the square roots of the
/// eigenvalues of `rho (Y⊗Y) rho* (Y⊗Y)`, but small ones are not squared and
/// square-rooted on the way, so pure states come out exact to rounding.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != 4 {
        return Err(Error::Domain(format!(
            "concurrence is defined for two qubits, got dimension {}",
            rho.dim()
        )));
    }
    let yy = kron(&sigma_y::<T>(), &sigma_y::<T>());
    let eig = eigh(rho.matrix());
    let mut w = eig.vectors.clone();
    for (k, p) in eig.values.iter().enumerate() {
        // round-off negatives clamped
        let scale = p.max(T::zero()).sqrt();
        w.column_mut(k).scale_mut(scale);
    }
    let tau = w.transpose() * yy * &w;
    let mut roots: Vec<T> = SVD::new(tau, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let c = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(c.max(T::zero()))
}

/// Schmidt coefficients of a two-qubit pure state, descending.
pub fn schmidt_coefficients<T: Real>(psi: &KetState<T>) -> Result<[T; 2]> {
    if psi.dim() != 4 {
        return Err(Error::Domain(
            "Schmidt decomposition needs a two-qubit state".into(),
        ));
    }
    let m = CMatrix::from_row_slice(2, 2, psi.as_slice());
    let sv = SVD::new(m, false, false).singular_values;
    let (a, b) = (sv[0], sv[1]);
    Ok(if a >= b { [a, b] } else { [b, a] })
}

/// Snapshot of the diagnostics tracked along a two-qubit trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub purity: f64,
    pub fidelity_phi1: f64,
    pub fidelity_phi2: f64,
    pub concurrence: f64,
    pub min_eigenvalue: f64,
    /// Populations on `phi1..phi4`.
    pub populations: [f64; 4],
}

pub fn observe<T: Real>(rho: &DensityMatrix<T>, basis: &DfsBasis<T>) -> Result<ObservableReport> {
    let pops = basis.as_array().map(|k| to_f64(rho.expectation(k)));
    Ok(ObservableReport {
        purity: to_f64(purity(rho)),
        fidelity_phi1: pops[0],
        fidelity_phi2: pops[1],
        concurrence: to_f64(concurrence(rho)?),
        min_eigenvalue: to_f64(rho.min_eigenvalue()),
        populations: pops,
    })
}

impl<T: Real> Trajectory<T> {
    /// Adds the phi-basis series (`fidelity_phi1`, `fidelity_phi2`,
    /// `concurrence`, `pop_phi1..4`) for a two-qubit trajectory.
    pub fn attach_phi_observables(&mut self, basis: &DfsBasis<T>) -> Result<()> {
        let mut series: Vec<(&str, Vec<T>)> = vec![
            ("fidelity_phi1", vec![]),
            ("fidelity_phi2", vec![]),
            ("concurrence", vec![]),
            ("pop_phi1", vec![]),
            ("pop_phi2", vec![]),
            ("pop_phi3", vec![]),
            ("pop_phi4", vec![]),
        ];
        for rho in &self.states {
            let pops = basis.as_array().map(|k| rho.expectation(k));
            series[0].1.push(pops[0]);
            series[1].1.push(pops[1]);
            series[2].1.push(concurrence(rho)?);
            for (j, p) in pops.into_iter().enumerate() {
                series[3 + j].1.push(p);
            }
        }
        for (name, values) in series {
            self.observables.insert(name.to_string(), values);
        }
        Ok(())
    }
}
