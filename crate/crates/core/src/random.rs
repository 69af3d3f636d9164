//! Seeded random states.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{lit, re, CMatrix, CVector, Cx, Real};
use crate::state::{DensityMatrix, KetState};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Cx::new(lit(a), lit(b))
}

/// Hilbert-Schmidt-uniform density matrix `G G^dag / Tr(G G^dag)` from a
/// complex Ginibre matrix `G`.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> DensityMatrix<T> {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian::<T, R>(rng));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    let rho = w * re(T::one() / tr);
    DensityMatrix::new_unchecked(crate::linalg::hermitian_part(&rho))
}

/// Haar-random pure state.
pub fn random_ket<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> KetState<T> {
    let v = CVector::from_fn(dim, |_, _| gaussian::<T, R>(rng));
    KetState::normalized(v).expect("gaussian vector is nonzero")
}
