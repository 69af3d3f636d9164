//! Dense complex linear algebra helpers: Kronecker embedding, SVD null
//! spaces, Hermitian spectral functions and column-stacking vectorization.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::scalar::{cis, lit, re, to_f64, CMatrix, CVector, Cx, Real};

pub fn dagger<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.adjoint()
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::identity(dim, dim)
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Cx<T> {
    m.trace()
}

/// Hilbert-Schmidt inner product `Tr(a^dag b)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Cx<T> {
    a.iter()
        .zip(b.iter())
        .fold(Cx::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * *y
        })
}

/// Largest entrywise modulus of `m - m^dag`.
pub fn hermiticity_error<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// `(m + m^dag) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * re(lit::<T>(0.5))
}

/// Column-stacking vectorization: `vec(A rho B) = (B^T kron A) vec(rho)`.
pub fn vectorize<T: Real>(m: &CMatrix<T>) -> CVector<T> {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize<T: Real>(v: &CVector<T>) -> CMatrix<T> {
    let dim = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(dim * dim, v.len(), "vector length is not a perfect square");
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: CMatrix<T>,
}

pub fn eigh<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

pub fn eigvalsh<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    eigh(m).values
}

/// `exp(-i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian<T: Real>(h: &CMatrix<T>, t: T) -> CMatrix<T> {
    let eig = eigh(h);
    let n = h.nrows();
    let phases = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            cis(-eig.values[i] * t)
        } else {
            Cx::new(T::zero(), T::zero())
        }
    });
    &eig.vectors * phases * eig.vectors.adjoint()
}

/// Multiplies `v` by a unit phase so that its first non-negligible
/// amplitude is real and positive.
pub fn fix_phase<T: Real>(v: &mut CVector<T>) {
    let eps = lit::<T>(1e-12).max(T::default_epsilon() * lit(64.0));
    if let Some(a) = v.iter().copied().find(|a| a.modulus() > eps) {
        let phase = a.conj() / re(a.modulus());
        *v *= phase;
    }
}

/// Orthonormal basis of the (right) null space of `m`: right singular
/// vectors whose singular value is below `tol * sigma_max`.
pub fn null_space<T: Real>(m: &CMatrix<T>, tol: T) -> Vec<CVector<T>> {
    let (rows, cols) = m.shape();
    let square = if rows < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(T::zero(), T::max);
    let cutoff = tol * sigma_max;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// Eigenvalues of a general real matrix, computed in double precision.
pub fn real_eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<Cx<T>>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape {
            expected: m.nrows(),
            found_rows: m.nrows(),
            found_cols: m.ncols(),
        });
    }
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| to_f64(m[(i, j)]));
    let ev = a
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(ev
        .into_iter()
        .map(|z| Cx::new(lit(z.re), lit(z.im)))
        .collect())
}

/// Singular values, descending.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().copied().collect()
}

/// Gram-Schmidt on the given vectors; drops vectors with residual norm below `eps`.
pub fn orthonormalize<T: Real>(vectors: &[CVector<T>], eps: T) -> Vec<CVector<T>> {
    let mut out: Vec<CVector<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // Two passes keep the basis orthogonal to working precision.
        for _ in 0..2 {
            for u in &out {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        let n = w.norm();
        if n > eps {
            out.push(w / re(n));
        }
    }
    out
}

/// Orthogonal projector onto the span of the given orthonormal vectors.
pub fn projector<T: Real>(dim: usize, vectors: &[CVector<T>]) -> CMatrix<T> {
    let mut p = CMatrix::zeros(dim, dim);
    for v in vectors {
        p += v * v.adjoint();
    }
    p
}

/// Projector onto the span of arbitrary (possibly non-orthogonal) vectors.
pub fn span_projector<T: Real>(dim: usize, vectors: &[CVector<T>]) -> CMatrix<T> {
    let eps = lit::<T>(1e-10);
    projector(dim, &orthonormalize(vectors, eps))
}

/// Orthonormal Hermitian basis of `dim x dim` matrices under the
/// Hilbert-Schmidt product (generalized Gell-Mann matrices). The first
/// element is `I / sqrt(dim)`; the rest are traceless.
pub fn hermitian_basis<T: Real>(dim: usize) -> Vec<CMatrix<T>> {
    let zero = Cx::new(T::zero(), T::zero());
    let mut basis = Vec::with_capacity(dim * dim);
    basis.push(identity::<T>(dim) * re(T::one() / lit::<T>(dim as f64).sqrt()));
    let inv_sqrt2 = T::one() / lit::<T>(2.0).sqrt();
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut sym = DMatrix::from_element(dim, dim, zero);
            sym[(j, k)] = re(inv_sqrt2);
            sym[(k, j)] = re(inv_sqrt2);
            basis.push(sym);
            let mut anti = DMatrix::from_element(dim, dim, zero);
            anti[(j, k)] = Cx::new(T::zero(), -inv_sqrt2);
            anti[(k, j)] = Cx::new(T::zero(), inv_sqrt2);
            basis.push(anti);
        }
    }
    for l in 1..dim {
        let scale = T::one() / lit::<T>((l * (l + 1)) as f64).sqrt();
        let mut diag = DMatrix::from_element(dim, dim, zero);
        for j in 0..l {
            diag[(j, j)] = re(scale);
        }
        diag[(l, l)] = re(-scale * lit(l as f64));
        basis.push(diag);
    }
    basis
}
