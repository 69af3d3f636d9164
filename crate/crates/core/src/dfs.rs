//! The decoherence-free subspace of the collective squeezed-bath operator:
//! single-qubit eigenstates `|lambda_±>`, the adapted two-qubit basis
//! `phi_1..phi_4`, the Lindblad operator written in that basis, and the
//! numerical kernel of `S` for larger registers.

use crate::error::{Error, Result};
use crate::linalg::{fix_phase, null_space};
use crate::operators::{lindblad_s, SqueezeParams};
use crate::scalar::{cis, lit, re, CMatrix, CVector, Cx, Real};
use crate::state::KetState;

/// Default relative singular-value threshold for null-space extraction.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

/// Orthonormal two-qubit basis adapted to the DFS: `phi1`, `phi2` span the
/// kernel of `S`, `phi3`, `phi4` complete the space.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsBasis<T: Real> {
    pub phi1: KetState<T>,
    pub phi2: KetState<T>,
    pub phi3: KetState<T>,
    pub phi4: KetState<T>,
}

impl<T: Real> DfsBasis<T> {
    pub fn as_array(&self) -> [&KetState<T>; 4] {
        [&self.phi1, &self.phi2, &self.phi3, &self.phi4]
    }

    /// Unitary whose columns are `phi1..phi4`.
    pub fn unitary(&self) -> CMatrix<T> {
        let cols: Vec<CVector<T>> = self
            .as_array()
            .iter()
            .map(|k| k.amplitudes().clone())
            .collect();
        CMatrix::from_columns(&cols)
    }

    /// `U^dag A U`: components of an operator in the phi basis.
    pub fn to_phi_basis(&self, op: &CMatrix<T>) -> CMatrix<T> {
        let u = self.unitary();
        u.adjoint() * op * u
    }

    /// `U A U^dag`: back to the computational basis.
    pub fn from_phi_basis(&self, op: &CMatrix<T>) -> CMatrix<T> {
        let u = self.unitary();
        &u * op * u.adjoint()
    }
}

/// Eigenvalues `lambda_± = ± i sqrt(M) e^{i psi / 2}` of the one-qubit `S`.
pub fn lambda_eigenvalues<T: Real>(params: &SqueezeParams<T>) -> (Cx<T>, Cx<T>) {
    let i = Cx::new(T::zero(), T::one());
    let lam = i * cis(params.psi * lit(0.5)) * params.m().sqrt();
    (lam, -lam)
}

/// Eigenstates `|lambda_+>`, `|lambda_->` of the single-qubit operator `S`.
///
/// Undefined in the vacuum (`N = 0`), where `S` reduces to the nilpotent
/// `sigma` and the normalization `N / (N + M)` becomes `0 / 0`.
pub fn lambda_states<T: Real>(params: &SqueezeParams<T>) -> Result<(KetState<T>, KetState<T>)> {
    if params.is_vacuum() {
        return Err(Error::DegenerateLimit(
            "lambda eigenstates are undefined for N = 0".into(),
        ));
    }
    let (n, m) = (params.n, params.m());
    let upper = re((n / (n + m)).sqrt());
    // -i sqrt(M / (N + M)) e^{-i psi / 2}
    let lower = Cx::new(T::zero(), -(m / (n + m)).sqrt()) * cis(-params.psi * lit(0.5));
    let plus = CVector::from_vec(vec![upper, lower]);
    let minus = CVector::from_vec(vec![upper, -lower]);
    Ok((KetState::new(plus)?, KetState::new(minus)?))
}

/// The non-orthogonal kernel vectors `|lambda_+ lambda_->` and `|lambda_- lambda_+>`.
pub fn lambda_product_states<T: Real>(
    params: &SqueezeParams<T>,
) -> Result<(KetState<T>, KetState<T>)> {
    let (plus, minus) = lambda_states(params)?;
    Ok((plus.tensor(&minus), minus.tensor(&plus)))
}

/// The orthonormal phi basis. At `N = 0` the vacuum limit
/// `phi1 = |-->`, `phi4 = |++>` is used.
pub fn dfs_basis<T: Real>(params: &SqueezeParams<T>) -> DfsBasis<T> {
    let z = re(T::zero());
    let h = re(T::one() / lit::<T>(2.0).sqrt());
    let phi2 = KetState::new(CVector::from_vec(vec![z, -h, h, z])).expect("unit norm");
    let phi3 = KetState::new(CVector::from_vec(vec![z, h, h, z])).expect("unit norm");
    if params.is_vacuum() {
        return DfsBasis {
            phi1: KetState::basis(4, 3),
            phi2,
            phi3,
            phi4: KetState::basis(4, 0),
        };
    }
    let (n, m) = (params.n, params.m());
    let norm = (n * n + m * m).sqrt();
    let phase = cis(-params.psi);
    let phi1 = CVector::from_vec(vec![re(n / norm), z, z, phase * (m / norm)]);
    let phi4 = CVector::from_vec(vec![re(m / norm), z, z, -phase * (n / norm)]);
    DfsBasis {
        phi1: KetState::normalized(phi1).expect("nonzero"),
        phi2,
        phi3,
        phi4: KetState::normalized(phi4).expect("nonzero"),
    }
}

/// `(alpha, beta, delta)` of the phi-basis form of `S`.
pub fn phi_basis_coefficients<T: Real>(params: &SqueezeParams<T>) -> (T, T, T) {
    let two = lit::<T>(2.0);
    let alpha = (two / (two * params.n + T::one())).sqrt();
    let beta = -two * params.m() * alpha;
    let delta = two / alpha;
    (alpha, beta, delta)
}

/// The reference phi-basis matrix of `S`:
/// `s13 = alpha e^{i psi}`, `s34 = delta e^{i psi}`, `s43 = beta`.
pub fn phi_basis_pattern<T: Real>(params: &SqueezeParams<T>) -> CMatrix<T> {
    let (alpha, beta, delta) = phi_basis_coefficients(params);
    let phase = cis(params.psi);
    let mut s = CMatrix::zeros(4, 4);
    s[(0, 2)] = phase * alpha;
    s[(2, 3)] = phase * delta;
    s[(3, 2)] = re(beta);
    s
}

/// Per-vector phases `d` such that `D^dag s D` equals [`phi_basis_pattern`] when
/// `s` is [`s_in_dfs_basis`]: the reference pattern corresponds to
/// `phi4 -> e^{i psi} phi4`.
pub fn phi_basis_phase_alignment<T: Real>(params: &SqueezeParams<T>) -> [Cx<T>; 4] {
    let one = re(T::one());
    [one, one, one, cis(params.psi)]
}

/// Matrix elements `<phi_i| S |phi_j>` of the two-qubit Lindblad operator.
pub fn s_in_dfs_basis<T: Real>(params: &SqueezeParams<T>) -> CMatrix<T> {
    let s = lindblad_s(params, 2).expect("two qubits");
    dfs_basis(params).to_phi_basis(&s)
}

/// Orthonormal basis of `ker S` for an `n_qubits` register. Vectors are
/// phase-fixed so that their first non-negligible amplitude is real positive.
pub fn dfs_kernel<T: Real>(
    params: &SqueezeParams<T>,
    n_qubits: usize,
    tol: T,
) -> Result<Vec<KetState<T>>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain("kernel tolerance must be > 0".into()));
    }
    let s = lindblad_s(params, n_qubits)?;
    null_space(&s, tol)
        .into_iter()
        .map(|mut v| {
            fix_phase(&mut v);
            KetState::normalized(v)
        })
        .collect()
}

/// `N! / ((N/2)!)^2`, the DFS dimension of an even register.
pub fn dfs_dimension(n_qubits: usize) -> Result<u64> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "dimension formula applies to even registers >= 2, got {n_qubits}"
        )));
    }
    let half = (n_qubits / 2) as u64;
    // binomial(n, n/2) computed incrementally; exact at every step
    let mut c: u64 = 1;
    for k in 1..=half {
        c = c * (half + k) / k;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, projector, span_projector};
    use crate::operators::sigma_z;
    use std::f64::consts::PI;

    fn p(n: f64, psi: f64) -> SqueezeParams<f64> {
        SqueezeParams::new(n, psi, 1.0).unwrap()
    }

    const N_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
    const PSI_GRID: [f64; 3] = [0.0, PI / 3.0, PI];

    #[test]
    fn lambda_states_at_unit_photon_number() {
        let params = p(1.0, 0.0);
        let (plus, minus) = lambda_states(&params).unwrap();
        let a = (1.0 / (1.0 + 2f64.sqrt())).sqrt();
        let b = (2f64.sqrt() / (1.0 + 2f64.sqrt())).sqrt();
        assert!((a - 0.64359).abs() < 1e-5 && (b - 0.76537).abs() < 1e-5);
        assert!((plus[0] - re(a)).norm() < 1e-14);
        assert!((plus[1] - Cx::new(0.0, -b)).norm() < 1e-14);
        assert!((minus[1] - Cx::new(0.0, b)).norm() < 1e-14);

        // S |lambda_±> = lambda_± |lambda_±> by direct multiplication
        let s = lindblad_s(&params, 1).unwrap();
        let (lp, lm) = lambda_eigenvalues(&params);
        assert!((lp - Cx::new(0.0, 2f64.powf(0.25))).norm() < 1e-14);
        assert!((lp.im - 1.18921).abs() < 1e-5);
        assert!((&s * plus.amplitudes() - plus.amplitudes() * lp).norm() < 1e-14);
        assert!((&s * minus.amplitudes() - minus.amplitudes() * lm).norm() < 1e-14);
    }

    #[test]
    fn lambda_overlap_is_real_and_below_one() {
        for n in N_GRID {
            for psi in PSI_GRID {
                let params = p(n, psi);
                let (plus, minus) = lambda_states(&params).unwrap();
                let overlap = plus.inner(&minus);
                let m = params.m();
                assert!((overlap - re((n - m) / (n + m))).norm() < 1e-14);
                assert!(overlap.norm() < 1.0);
            }
        }
    }

    #[test]
    fn lambda_phase_at_psi_pi() {
        let (plus, _) = lambda_states(&p(1.0, PI)).unwrap();
        let b = (2f64.sqrt() / (1.0 + 2f64.sqrt())).sqrt();
        // -i e^{-i pi/2} = -1
        assert!((plus[1] - re(-b)).norm() < 1e-14);
    }

    #[test]
    fn lambda_states_reject_vacuum() {
        assert!(matches!(
            lambda_states(&p(0.0, 0.0)),
            Err(Error::DegenerateLimit(_))
        ));
    }

    #[test]
    fn basis_at_unit_photon_number() {
        let b = dfs_basis(&p(1.0, 0.0));
        let k = 1.0 / 3f64.sqrt();
        assert!((b.phi1[0] - re(k)).norm() < 1e-15);
        assert!((b.phi1[3] - re(2f64.sqrt() * k)).norm() < 1e-15);
    }

    #[test]
    fn vacuum_basis() {
        let b = dfs_basis(&p(0.0, 0.7));
        assert_eq!(b.phi1, KetState::product("--").unwrap());
        assert_eq!(b.phi4, KetState::product("++").unwrap());
    }

    #[test]
    fn basis_is_orthonormal_and_unitary() {
        for n in [0.0, 0.1, 1.0, 10.0] {
            for psi in PSI_GRID {
                let u = dfs_basis(&p(n, psi)).unitary();
                let err = max_abs(&(u.adjoint() * &u - CMatrix::identity(4, 4)));
                assert!(err < 1e-12);
            }
        }
    }

    #[test]
    fn phi1_phi2_span_the_lambda_products() {
        for n in N_GRID {
            for psi in PSI_GRID {
                let params = p(n, psi);
                let b = dfs_basis(&params);
                let (psi1, psi2) = lambda_product_states(&params).unwrap();
                let from_products =
                    span_projector(4, &[psi1.into_amplitudes(), psi2.into_amplitudes()]);
                let from_phi = projector(4, &[b.phi1.into_amplitudes(), b.phi2.into_amplitudes()]);
                assert!(max_abs(&(from_products - from_phi)) < 1e-12);
            }
        }
    }

    #[test]
    fn phi1_phi2_are_annihilated() {
        for n in [0.0, 0.1, 0.5, 1.0, 2.0, 10.0] {
            for psi in PSI_GRID {
                let params = p(n, psi);
                let s = lindblad_s(&params, 2).unwrap();
                let b = dfs_basis(&params);
                assert!((&s * b.phi1.amplitudes()).norm() <= 1e-12);
                assert!((&s * b.phi2.amplitudes()).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn phi_basis_coefficients_at_unit_photon_number() {
        let (alpha, beta, delta) = phi_basis_coefficients(&p(1.0, 0.0));
        assert!((alpha - 0.816497).abs() < 1e-6);
        assert!((beta + 2.309401).abs() < 1e-6);
        assert!((delta - 2.449490).abs() < 1e-6);
    }

    #[test]
    fn phi_basis_identities_over_grid() {
        for n in N_GRID {
            let params = p(n, 0.0);
            let (alpha, beta, delta) = phi_basis_coefficients(&params);
            assert!((alpha * delta - 2.0).abs() < 1e-12);
            assert!((beta / alpha + 2.0 * params.m()).abs() < 1e-12);
        }
    }

    #[test]
    fn s_matrix_matches_reference_pattern_up_to_phases() {
        for n in N_GRID {
            for psi in PSI_GRID {
                let params = p(n, psi);
                let s = s_in_dfs_basis(&params);
                // kernel columns vanish
                for row in 0..4 {
                    assert!(s[(row, 0)].norm() < 1e-12 && s[(row, 1)].norm() < 1e-12);
                }
                let d = phi_basis_phase_alignment(&params);
                let aligned = CMatrix::from_fn(4, 4, |i, j| d[i].conj() * s[(i, j)] * d[j]);
                assert!(max_abs(&(aligned - phi_basis_pattern(&params))) < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_dimensions_match_formula() {
        for n in N_GRID {
            for psi in PSI_GRID {
                let params = p(n, psi);
                for qubits in [2, 4, 6] {
                    let k = dfs_kernel(&params, qubits, DEFAULT_KERNEL_TOL).unwrap();
                    assert_eq!(k.len() as u64, dfs_dimension(qubits).unwrap());
                }
            }
        }
    }

    #[test]
    fn kernel_at_two_qubits_spans_phi1_phi2() {
        let params = p(1.0, 0.0);
        let kernel = dfs_kernel(&params, 2, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(kernel.len(), 2);
        let b = dfs_basis(&params);
        let pk = projector(
            4,
            &kernel
                .iter()
                .map(|k| k.amplitudes().clone())
                .collect::<Vec<_>>(),
        );
        let pb = projector(4, &[b.phi1.into_amplitudes(), b.phi2.into_amplitudes()]);
        assert!(max_abs(&(pk - pb)) < 1e-12);
        for k in &kernel {
            let lead = k.iter().find(|a| a.norm() > 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
        }
    }

    #[test]
    fn kernel_is_deterministic_and_empty_for_odd_registers() {
        let params = p(1.0, 0.0);
        let a = dfs_kernel(&params, 4, DEFAULT_KERNEL_TOL).unwrap();
        let b = dfs_kernel(&params, 4, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(a, b);
        assert!(dfs_kernel(&params, 3, DEFAULT_KERNEL_TOL)
            .unwrap()
            .is_empty());
        assert!(dfs_kernel(&params, 1, DEFAULT_KERNEL_TOL)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dfs_dimension(2).unwrap(), 2);
        assert_eq!(dfs_dimension(4).unwrap(), 6);
        assert_eq!(dfs_dimension(6).unwrap(), 20);
        assert_eq!(dfs_dimension(8).unwrap(), 70);
        assert!(dfs_dimension(3).is_err());
        assert!(dfs_dimension(0).is_err());
    }

    #[test]
    fn kernel_at_eight_qubits() {
        let k = dfs_kernel(&p(1.0, 0.0), 8, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(k.len(), 70);
    }

    #[test]
    fn sigma_z_swaps_lambda_states() {
        let sz = sigma_z::<f64>();
        for n in N_GRID {
            for psi in PSI_GRID {
                let (plus, minus) = lambda_states(&p(n, psi)).unwrap();
                assert!((&sz * plus.amplitudes() - minus.amplitudes()).norm() < 1e-15);
                assert!((&sz * minus.amplitudes() - plus.amplitudes()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn f32_basis_and_kernel() {
        let params = SqueezeParams::<f32>::new(1.0, 0.5, 1.0).unwrap();
        let s = lindblad_s(&params, 2).unwrap();
        let b = dfs_basis(&params);
        assert!((&s * b.phi1.amplitudes()).norm() < 1e-5);
        assert_eq!(dfs_kernel(&params, 2, 1e-4).unwrap().len(), 2);
    }
}
