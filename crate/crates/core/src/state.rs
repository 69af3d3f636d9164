//! Pure and mixed state types.

use std::ops::Deref;

use nalgebra::ComplexField;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, hermiticity_error};
use crate::scalar::{lit, re, to_f64, CMatrix, CVector, Cx, Real};

/// Tolerance used by state validation: `1e-12` at f64, scaled up for
/// lower precision scalars.
pub fn validation_tol<T: Real>() -> T {
    lit::<T>(1e-12).max(T::default_epsilon() * lit(100.0))
}

/// Tolerance for the positivity check on density matrices.
pub fn positivity_tol<T: Real>() -> T {
    lit::<T>(1e-9).max(T::default_epsilon() * lit(100.0))
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct KetState<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> KetState<T> {
    /// Wraps `amplitudes`, which must already have unit norm.
    pub fn new(amplitudes: CVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - T::one()).abs() > validation_tol() {
            return Err(Error::InvalidState(format!(
                "ket norm {} is not 1",
                to_f64(norm)
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: CVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > T::zero()) {
            return Err(Error::InvalidState(
                "zero vector cannot be normalized".into(),
            ));
        }
        Ok(Self {
            amplitudes: amplitudes / re(norm),
        })
    }

    pub fn from_amplitudes(amplitudes: &[Cx<T>]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes))
    }

    /// Computational product state from a pattern such as `"+-+"`: `+`
    /// is the upper level (index 0) and `-` the lower one.
    pub fn product(pattern: &str) -> Result<Self> {
        let n = pattern.chars().count();
        if n == 0 {
            return Err(Error::InvalidState("empty product pattern".into()));
        }
        let mut index = 0usize;
        for ch in pattern.chars() {
            index <<= 1;
            match ch {
                '+' => {}
                '-' | '−' => index |= 1,
                other => {
                    return Err(Error::InvalidState(format!(
                        "unknown level '{other}' in product pattern"
                    )))
                }
            }
        }
        Ok(Self::basis(1 << n, index))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = re(T::one());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

impl<T: Real> Deref for KetState<T> {
    type Target = CVector<T>;

    fn deref(&self) -> &CVector<T> {
        &self.amplitudes
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix without checking the density-matrix invariants.
    pub fn new_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.matrix.shape();
        if r != c || r == 0 {
            return Err(Error::Shape {
                expected: r.max(c),
                found_rows: r,
                found_cols: c,
            });
        }
        let tol = validation_tol::<T>();
        let herm = hermiticity_error(&self.matrix);
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {})",
                to_f64(herm)
            )));
        }
        let tr = self.matrix.trace();
        if (tr - re(T::one())).modulus() > tol {
            return Err(Error::InvalidState(format!(
                "trace {} is not 1",
                to_f64(tr.re)
            )));
        }
        let min = self.min_eigenvalue();
        if min < -positivity_tol::<T>() {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                to_f64(min)
            )));
        }
        Ok(())
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) * re(T::one() / lit::<T>(dim as f64)),
        }
    }

    /// Convex combination `sum_k w_k |k><k|`. Weights must sum to one.
    pub fn mixture(components: &[(T, &KetState<T>)]) -> Result<Self> {
        let dim = components
            .first()
            .map(|(_, k)| k.dim())
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, k) in components {
            m += k.projector().matrix * re(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> Cx<T> {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> T {
        eigvalsh(&self.matrix)
            .first()
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// `<psi| rho |psi>` (real part).
    pub fn expectation(&self, psi: &KetState<T>) -> T {
        psi.amplitudes().dotc(&(&self.matrix * psi.amplitudes())).re
    }
}

impl<T: Real> Deref for DensityMatrix<T> {
    type Target = CMatrix<T>;

    fn deref(&self) -> &CMatrix<T> {
        &self.matrix
    }
}

/// Serializable complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl<T: Real> From<Cx<T>> for ComplexPair {
    fn from(z: Cx<T>) -> Self {
        ComplexPair(to_f64(z.re), to_f64(z.im))
    }
}

impl ComplexPair {
    pub fn to_complex<T: Real>(self) -> Cx<T> {
        Cx::new(lit(self.0), lit(self.1))
    }
}
