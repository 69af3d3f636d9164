//! Ladder operators, the collective Lindblad operator of the squeezed bath,
//! and the inter-qubit coupling Hamiltonians.
//!
//! Basis convention: each qubit is ordered `(|+>, |->)` (upper level first)
//! and multi-qubit states are `qubit 0 ⊗ qubit 1 ⊗ ...`, so `|+,+>` is index 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, kron};
use crate::scalar::{cis, lit, re, to_f64, CMatrix, Cx, Real};

/// Bath parameters: mean photon number `n`, squeeze phase `psi` and vacuum
/// decay constant `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams<T> {
    pub n: T,
    pub psi: T,
    pub gamma: T,
}

impl<T: Real> SqueezeParams<T> {
    pub fn new(n: T, psi: T, gamma: T) -> Result<Self> {
        if !(n >= T::zero()) {
            return Err(Error::Domain(format!(
                "photon number must be >= 0, got {}",
                to_f64(n)
            )));
        }
        if !(gamma > T::zero()) {
            return Err(Error::Domain(format!(
                "decay constant must be > 0, got {}",
                to_f64(gamma)
            )));
        }
        if !psi.is_finite() {
            return Err(Error::Domain("squeeze phase must be finite".into()));
        }
        Ok(Self { n, psi, gamma })
    }

    /// Unit decay constant (time measured in units of `1/gamma`).
    pub fn with_unit_gamma(n: T, psi: T) -> Result<Self> {
        Self::new(n, psi, T::one())
    }

    /// `M = sqrt(N (N + 1))`.
    pub fn m(&self) -> T {
        (self.n * (self.n + T::one())).sqrt()
    }

    /// `cosh r = sqrt(N + 1)`.
    pub fn cosh_r(&self) -> T {
        (self.n + T::one()).sqrt()
    }

    /// `sinh r = sqrt(N)`.
    pub fn sinh_r(&self) -> T {
        self.n.sqrt()
    }

    /// Squeeze parameter `r`.
    pub fn squeeze_r(&self) -> T {
        self.sinh_r().asinh()
    }

    pub fn is_vacuum(&self) -> bool {
        self.n == T::zero()
    }
}

/// Geometry of the dipole-dipole interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleGeometry<T> {
    /// Squared modulus of the dipole matrix element.
    pub d_sq: T,
    /// Angle between the separation vector and the dipole.
    pub theta: T,
    /// Interatomic distance.
    pub r_sep: T,
}

/// Boundary condition of the Ising chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

fn mat2<T: Real>(a: [[Cx<T>; 2]; 2]) -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]])
}

/// `(sigma^dag, sigma)`: raising and lowering operators of one qubit.
pub fn ladder_single<T: Real>() -> (CMatrix<T>, CMatrix<T>) {
    let (o, z) = (re(T::one()), re(T::zero()));
    (mat2([[z, o], [z, z]]), mat2([[z, z], [o, z]]))
}

/// `diag(1, -1)` in the `(|+>, |->)` ordering.
pub fn sigma_z<T: Real>() -> CMatrix<T> {
    let (o, z) = (re(T::one()), re(T::zero()));
    mat2([[o, z], [z, -o]])
}

pub fn sigma_y<T: Real>() -> CMatrix<T> {
    let z = re(T::zero());
    let i = Cx::new(T::zero(), T::one());
    mat2([[z, -i], [i, z]])
}

/// Places the single-qubit operator `op` at `site` of an `n_qubits` register.
pub fn embed<T: Real>(op: &CMatrix<T>, site: usize, n_qubits: usize) -> Result<CMatrix<T>> {
    if op.shape() != (2, 2) {
        return Err(Error::Shape {
            expected: 2,
            found_rows: op.nrows(),
            found_cols: op.ncols(),
        });
    }
    if site >= n_qubits {
        return Err(Error::Index {
            index: site,
            len: n_qubits,
        });
    }
    let left = identity::<T>(1 << site);
    let right = identity::<T>(1 << (n_qubits - site - 1));
    Ok(kron(&kron(&left, op), &right))
}

fn sum_over_sites<T: Real>(op: &CMatrix<T>, n_qubits: usize) -> CMatrix<T> {
    let dim = 1 << n_qubits;
    (0..n_qubits).fold(CMatrix::zeros(dim, dim), |acc, site| {
        acc + embed(op, site, n_qubits).expect("site in range")
    })
}

/// Collective `(Sigma^dag, Sigma)` with `Sigma = sum_i sigma_i`.
pub fn collective_ladder<T: Real>(n_qubits: usize) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if n_qubits == 0 {
        return Err(Error::Domain("at least one qubit required".into()));
    }
    let (up, down) = ladder_single::<T>();
    Ok((
        sum_over_sites(&up, n_qubits),
        sum_over_sites(&down, n_qubits),
    ))
}

/// Collective Lindblad operator `S = sqrt(N+1) Sigma - sqrt(N) e^{i psi} Sigma^dag`.
pub fn lindblad_s<T: Real>(params: &SqueezeParams<T>, n_qubits: usize) -> Result<CMatrix<T>> {
    let (up, down) = collective_ladder::<T>(n_qubits)?;
    Ok(down * re(params.cosh_r()) - up * (cis(params.psi) * params.sinh_r()))
}

/// `Omega = |d|^2 (1 - 3 cos^2 theta) / R^3`.
pub fn dipole_strength<T: Real>(geom: &DipoleGeometry<T>) -> Result<T> {
    if !(geom.r_sep > T::zero()) {
        return Err(Error::Domain(format!(
            "interatomic distance must be > 0, got {}",
            to_f64(geom.r_sep)
        )));
    }
    let c = geom.theta.cos();
    Ok(geom.d_sq * (T::one() - lit::<T>(3.0) * c * c) / (geom.r_sep * geom.r_sep * geom.r_sep))
}

/// Excitation exchange `Omega (sigma_1 sigma_2^dag + sigma_1^dag sigma_2)` (hbar = 1).
pub fn dipole_hamiltonian<T: Real>(omega: T) -> CMatrix<T> {
    let (up, down) = ladder_single::<T>();
    let exchange = kron(&down, &up) + kron(&up, &down);
    exchange * re(omega)
}

/// `A sum_i sigma_z^i sigma_z^{i+1}`; the periodic chain adds the
/// `(n-1, 0)` bond.
pub fn ising_hamiltonian<T: Real>(
    coupling: T,
    n_qubits: usize,
    boundary: Boundary,
) -> Result<CMatrix<T>> {
    if n_qubits < 2 {
        return Err(Error::Domain(format!(
            "Ising chain needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let sz = sigma_z::<T>();
    let dim = 1 << n_qubits;
    let bonds = match boundary {
        Boundary::Open => n_qubits - 1,
        Boundary::Periodic => n_qubits,
    };
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..bonds {
        let j = (i + 1) % n_qubits;
        h += embed(&sz, i, n_qubits)? * embed(&sz, j, n_qubits)?;
    }
    Ok(h * re(coupling))
}
