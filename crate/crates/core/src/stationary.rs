//! Closed-form stationary state of the two-qubit master equation and its
//! spectral decomposition.
//!
//! Every initial state relaxes onto `span{phi1, phi2}`: the `phi2`
//! population and the `phi1`-`phi2` coherence are conserved, and all weight
//! in `phi3`, `phi4` ends up in `phi1`.

use nalgebra::ComplexField;
use serde::{Deserialize, Serialize};

use crate::dfs::DfsBasis;
use crate::error::{Error, Result};
use crate::linalg::{eigh, fix_phase};
use crate::scalar::{lit, re, to_f64, CMatrix, CVector, Cx, Real};
use crate::state::{DensityMatrix, KetState};

/// Component of the initial state that survives to `t -> inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialProjection<T: Real> {
    /// `<phi2|rho0|phi2>`.
    pub rho22_0: T,
    /// `<phi1|rho0|phi2>`.
    pub rho12_0: Cx<T>,
    /// Population outside `span{phi1, phi2}`; informational only.
    pub residual_weight: T,
}

impl<T: Real> InitialProjection<T> {
    /// Builds a projection directly from the two conserved quantities.
    pub fn new(rho22_0: T, rho12_0: Cx<T>) -> Result<Self> {
        let proj = Self {
            rho22_0,
            rho12_0,
            residual_weight: T::zero(),
        };
        proj.validate()?;
        Ok(proj)
    }

    pub fn validate(&self) -> Result<()> {
        let slack = lit::<T>(1e-12).max(T::default_epsilon() * lit(100.0));
        if self.rho22_0 < -slack || self.rho22_0 > T::one() + slack {
            return Err(Error::Domain(format!(
                "rho22(0) = {} outside [0, 1]",
                to_f64(self.rho22_0)
            )));
        }
        let coherence_sq = self.rho12_0.modulus_squared();
        let bound = self.rho22_0 * (T::one() - self.rho22_0);
        if coherence_sq > bound + slack {
            return Err(Error::InvalidProjection {
                coherence_sq: to_f64(coherence_sq),
                bound: to_f64(bound),
            });
        }
        Ok(())
    }

    /// The 2x2 block `[[1 - rho22, rho12], [rho21, rho22]]` of the
    /// stationary state in the `(phi1, phi2)` basis.
    pub fn dfs_block(&self) -> CMatrix<T> {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                re(T::one() - self.rho22_0),
                self.rho12_0,
                self.rho12_0.conj(),
                re(self.rho22_0),
            ],
        )
    }
}

/// Spectral decomposition `P1 |nu1><nu1| + P2 |nu2><nu2|` of the stationary state.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyDecomposition<T: Real> {
    pub p1: T,
    pub p2: T,
    pub nu1: KetState<T>,
    pub nu2: KetState<T>,
    /// Coherence parameter `x`; `None` when `rho22(0)` is 0 or 1.
    pub x_param: Option<T>,
}

impl<T: Real> SteadyDecomposition<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        self.nu1.projector().matrix() * re(self.p1) + self.nu2.projector().matrix() * re(self.p2)
    }
}

/// Which of the pure cases (if any) the stationary state falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PurityClass {
    /// `rho22(0) = 0`: relaxes to the entangled `phi1`.
    SymmetricPure,
    /// `rho22(0) = 1`: the initial `phi2` never evolves.
    Phi2Invariant,
    /// `0 < rho22(0) < 1` with `x = 1`: a pure superposition inside the DFS.
    SaturatedPure,
    Mixed,
}

impl PurityClass {
    pub fn is_pure(self) -> bool {
        self != PurityClass::Mixed
    }
}

/// Threshold used when comparing `rho22(0)` with 0 or 1 and `x` with 1.
pub fn classification_tol<T: Real>() -> T {
    lit::<T>(1e-9).max(T::default_epsilon() * lit(100.0))
}

pub fn project_initial<T: Real>(
    rho0: &DensityMatrix<T>,
    basis: &DfsBasis<T>,
) -> Result<InitialProjection<T>> {
    if rho0.dim() != 4 {
        return Err(Error::Shape {
            expected: 4,
            found_rows: rho0.dim(),
            found_cols: rho0.dim(),
        });
    }
    let m = rho0.matrix();
    let elem = |a: &KetState<T>, b: &KetState<T>| a.amplitudes().dotc(&(m * b.amplitudes()));
    let rho11 = elem(&basis.phi1, &basis.phi1).re;
    let rho22 = elem(&basis.phi2, &basis.phi2).re;
    Ok(InitialProjection {
        rho22_0: rho22,
        rho12_0: elem(&basis.phi1, &basis.phi2),
        residual_weight: rho0.trace().re - rho11 - rho22,
    })
}

/// `(1 - rho22)|phi1><phi1| + rho22 |phi2><phi2| + rho12 |phi1><phi2| + h.c.`
/// in the computational basis.
pub fn steady_closed_form<T: Real>(
    proj: &InitialProjection<T>,
    basis: &DfsBasis<T>,
) -> Result<DensityMatrix<T>> {
    proj.validate()?;
    let (a, b) = (basis.phi1.amplitudes(), basis.phi2.amplitudes());
    let block = proj.dfs_block();
    let m = a * a.adjoint() * block[(0, 0)]
        + b * b.adjoint() * block[(1, 1)]
        + a * b.adjoint() * block[(0, 1)]
        + b * a.adjoint() * block[(1, 0)];
    Ok(DensityMatrix::new_unchecked(m))
}

/// Stationary weights `P1 >= P2`.
pub fn steady_weights<T: Real>(proj: &InitialProjection<T>) -> (T, T) {
    let half = lit::<T>(0.5);
    let disc =
        half * half + proj.rho12_0.modulus_squared() - proj.rho22_0 * (T::one() - proj.rho22_0);
    let root = disc.max(T::zero()).sqrt();
    (half + root, half - root)
}

pub fn spectral_decomposition<T: Real>(
    proj: &InitialProjection<T>,
    basis: &DfsBasis<T>,
) -> Result<SteadyDecomposition<T>> {
    proj.validate()?;
    let (p1, p2) = steady_weights(proj);
    // eigenvalues ascending: column 1 belongs to P1
    let eig = eigh(&proj.dfs_block());
    let lift = |col: usize| {
        let c = eig.vectors.column(col);
        let mut v: CVector<T> = basis.phi1.amplitudes() * c[0] + basis.phi2.amplitudes() * c[1];
        fix_phase(&mut v);
        KetState::normalized(v)
    };
    Ok(SteadyDecomposition {
        p1,
        p2,
        nu1: lift(1)?,
        nu2: lift(0)?,
        x_param: coherence_parameter(proj).ok(),
    })
}

/// `x = |rho12(0)|^2 / (rho22(0) (1 - rho22(0)))`, in `[0, 1]`.
pub fn coherence_parameter<T: Real>(proj: &InitialProjection<T>) -> Result<T> {
    let tol = classification_tol::<T>();
    if proj.rho22_0 <= tol || proj.rho22_0 >= T::one() - tol {
        return Err(Error::Undefined(format!(
            "x requires 0 < rho22(0) < 1, got {}",
            to_f64(proj.rho22_0)
        )));
    }
    Ok(proj.rho12_0.modulus_squared() / (proj.rho22_0 * (T::one() - proj.rho22_0)))
}

pub fn classify_purity<T: Real>(proj: &InitialProjection<T>) -> PurityClass {
    let tol = classification_tol::<T>();
    if proj.rho22_0.abs() <= tol {
        PurityClass::SymmetricPure
    } else if (proj.rho22_0 - T::one()).abs() <= tol {
        PurityClass::Phi2Invariant
    } else {
        match coherence_parameter(proj) {
            Ok(x) if (x - T::one()).abs() <= tol => PurityClass::SaturatedPure,
            _ => PurityClass::Mixed,
        }
    }
}
