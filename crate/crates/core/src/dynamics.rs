//! Master-equation generator, Liouvillian superoperator, time evolution and
//! numerical steady states.
//!
//! The generator is `(gamma/2)(2 S rho S^dag - rho S^dag S - S^dag S rho) - i[H, rho]`.
//! Superoperators use column-stacking: `vec(A rho B) = (B^T ⊗ A) vec(rho)`.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::integrator::{DormandPrince, StepControl, StepFailure};
use crate::linalg::{
    hermitian_basis, hermitian_part, hermiticity_error, hs_inner, identity, kron, null_space,
    real_eigenvalues, unvectorize, vectorize,
};
use crate::scalar::{lit, re, to_f64, CMatrix, Cx, Real};
use crate::state::DensityMatrix;

fn check_square<T: Real>(m: &CMatrix<T>, dim: usize) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::Shape {
            expected: dim,
            found_rows: m.nrows(),
            found_cols: m.ncols(),
        });
    }
    Ok(())
}

/// Right-hand side of the master equation for a single Lindblad operator.
pub fn lindblad_rhs<T: Real>(
    rho: &CMatrix<T>,
    s_op: &CMatrix<T>,
    gamma: T,
    hamiltonian: Option<&CMatrix<T>>,
) -> Result<CMatrix<T>> {
    let dim = s_op.nrows();
    check_square(s_op, dim)?;
    check_square(rho, dim)?;
    if let Some(h) = hamiltonian {
        check_square(h, dim)?;
    }
    let s_dag = s_op.adjoint();
    let s_dag_s = &s_dag * s_op;
    let jump = s_op * rho * &s_dag * re(lit::<T>(2.0));
    let anti = rho * &s_dag_s + &s_dag_s * rho;
    let mut out = (jump - anti) * re(gamma * lit(0.5));
    if let Some(h) = hamiltonian {
        let comm = h * rho - rho * h;
        out -= comm * Cx::new(T::zero(), T::one());
    }
    Ok(out)
}

/// Precomputed generator used by the integrator:
/// `rho' = K rho + rho K^dag + gamma S rho S^dag` with `K = -iH - (gamma/2) S^dag S`.
struct Generator<T: Real> {
    k: CMatrix<T>,
    k_dag: CMatrix<T>,
    s: CMatrix<T>,
    s_dag_scaled: CMatrix<T>,
}

impl<T: Real> Generator<T> {
    fn new(s_op: &CMatrix<T>, gamma: T, hamiltonian: Option<&CMatrix<T>>) -> Self {
        let s_dag = s_op.adjoint();
        let mut k = (&s_dag * s_op) * re(-gamma * lit(0.5));
        if let Some(h) = hamiltonian {
            k -= h * Cx::new(T::zero(), T::one());
        }
        Self {
            k_dag: k.adjoint(),
            k,
            s: s_op.clone(),
            s_dag_scaled: s_dag * re(gamma),
        }
    }

    fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        &self.k * rho + rho * &self.k_dag + &self.s * rho * &self.s_dag_scaled
    }
}

/// Matrix of the generator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian<T: Real> {
    dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Liouvillian<T> {
    /// Hilbert-space dimension `d`; the matrix is `d^2 x d^2`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dim_sq(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        unvectorize(&(&self.matrix * vectorize(rho)))
    }

    /// The generator as a real `d^2 x d^2` matrix in the Hermitian
    /// (generalized Gell-Mann) basis returned by [`hermitian_basis`]. Its
    /// first row and column belong to `I/sqrt(d)`; the trailing block
    /// acts on traceless Hermitian matrices.
    pub fn real_representation(&self) -> DMatrix<T> {
        let basis = hermitian_basis::<T>(self.dim);
        let images: Vec<CMatrix<T>> = basis.iter().map(|b| self.apply(b)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |k, j| {
            hs_inner(&basis[k], &images[j]).re
        })
    }

    /// Largest `|sum_i L[(i,i),(k)]|`: deviation from trace preservation.
    pub fn trace_preservation_error(&self) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for col in 0..self.dim_sq() {
            let mut s = Cx::new(T::zero(), T::zero());
            for i in 0..d {
                s += self.matrix[(i * d + i, col)];
            }
            worst = worst.max(s.modulus());
        }
        worst
    }
}

pub fn build_liouvillian<T: Real>(
    s_op: &CMatrix<T>,
    gamma: T,
    hamiltonian: Option<&CMatrix<T>>,
) -> Result<Liouvillian<T>> {
    let dim = s_op.nrows();
    check_square(s_op, dim)?;
    let id = identity::<T>(dim);
    let s_dag_s = s_op.adjoint() * s_op;
    let jump = kron(&s_op.conjugate(), s_op) * re(lit::<T>(2.0));
    let anti = kron(&id, &s_dag_s) + kron(&s_dag_s.transpose(), &id);
    let mut matrix = (jump - anti) * re(gamma * lit(0.5));
    if let Some(h) = hamiltonian {
        check_square(h, dim)?;
        let comm = kron(&id, h) - kron(&h.transpose(), &id);
        matrix -= comm * Cx::new(T::zero(), T::one());
    }
    Ok(Liouvillian { dim, matrix })
}

/// Hilbert-Schmidt orthonormal basis of the stationary subspace `ker L`.
pub fn steady_states<T: Real>(liouvillian: &Liouvillian<T>, tol: T) -> Vec<CMatrix<T>> {
    null_space(&liouvillian.matrix, tol)
        .iter()
        .map(unvectorize)
        .collect()
}

/// Projection of `rho0` onto `ker L` along the remaining eigenmodes, built
/// from right and left null vectors. This is the `t -> inf` limit whenever
/// no other eigenvalue of `L` lies on the imaginary axis.
pub fn asymptotic_state<T: Real>(
    liouvillian: &Liouvillian<T>,
    rho0: &CMatrix<T>,
    tol: T,
) -> Result<CMatrix<T>> {
    check_square(rho0, liouvillian.dim)?;
    let right = null_space(&liouvillian.matrix, tol);
    let left = null_space(&liouvillian.matrix.adjoint(), tol);
    if right.is_empty() || right.len() != left.len() {
        return Err(Error::DegenerateLimit(format!(
            "right and left null spaces differ in dimension ({} vs {})",
            right.len(),
            left.len()
        )));
    }
    let r = CMatrix::from_columns(&right);
    let l = CMatrix::from_columns(&left);
    let gram = l.adjoint() * &r;
    let inv = gram.try_inverse().ok_or_else(|| {
        Error::DegenerateLimit("zero eigenvalue of the generator is not semisimple".into())
    })?;
    Ok(unvectorize(&(r * inv * l.adjoint() * vectorize(rho0))))
}

/// Eigenvalues of `L`, sorted by real part (descending), then imaginary part.
pub fn decay_rates<T: Real>(liouvillian: &Liouvillian<T>) -> Result<Vec<Cx<T>>> {
    let mut rates = real_eigenvalues(&liouvillian.real_representation())?;
    rates.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(rates)
}

/// Options for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions<T> {
    /// Number of equally spaced sample times in `[0, t_end]`, endpoints included.
    pub samples: usize,
    pub rtol: T,
    pub atol: T,
    pub h_max: T,
    pub h_min: T,
    /// Replace `rho` by `(rho + rho^dag)/2` after every accepted step.
    pub resymmetrize: bool,
    /// Stop once `||L rho||_F` falls below this threshold at a sample point;
    /// later samples repeat the converged state.
    pub steady_tol: Option<T>,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        let control = StepControl::<T>::default();
        Self {
            samples: 201,
            rtol: control.rtol,
            atol: control.atol,
            h_max: control.h_max,
            h_min: control.h_min,
            resymmetrize: true,
            steady_tol: None,
        }
    }
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    /// Named time series, one value per sample.
    pub observables: BTreeMap<String, Vec<T>>,
    pub stopped_early_at: Option<T>,
}

impl<T: Real> Trajectory<T> {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            observables: BTreeMap::new(),
            stopped_early_at: None,
        }
    }

    fn push(&mut self, t: T, rho: DensityMatrix<T>) {
        let purity = rho
            .matrix()
            .iter()
            .fold(T::zero(), |acc, z| acc + z.modulus_squared());
        let record = [
            ("trace", rho.trace().re),
            ("purity", purity),
            ("hermiticity_error", hermiticity_error(rho.matrix())),
            ("min_eigenvalue", rho.min_eigenvalue()),
        ];
        for (name, value) in record {
            self.observables
                .entry(name.to_string())
                .or_default()
                .push(value);
        }
        self.times.push(t);
        self.states.push(rho);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&DensityMatrix<T>> {
        self.states.last()
    }

    pub fn observable(&self, name: &str) -> Option<&[T]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    /// Worst-case deviations from the density-matrix invariants over all samples.
    pub fn conservation(&self) -> ConservationReport<T> {
        let mut report = ConservationReport {
            max_trace_error: T::zero(),
            max_hermiticity_error: T::zero(),
            min_eigenvalue: T::max_value().unwrap_or_else(T::one),
        };
        for rho in &self.states {
            report.max_trace_error = report
                .max_trace_error
                .max((rho.trace() - re(T::one())).modulus());
            report.max_hermiticity_error = report
                .max_hermiticity_error
                .max(hermiticity_error(rho.matrix()));
            report.min_eigenvalue = report.min_eigenvalue.min(rho.min_eigenvalue());
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport<T> {
    pub max_trace_error: T,
    pub max_hermiticity_error: T,
    pub min_eigenvalue: T,
}

impl<T: Real> ConservationReport<T> {
    /// Trace within `1e-9`, Hermiticity within `1e-10`, eigenvalues above `-1e-8`.
    pub fn holds(&self) -> bool {
        self.max_trace_error <= lit(1e-9)
            && self.max_hermiticity_error <= lit(1e-10)
            && self.min_eigenvalue >= lit(-1e-8)
    }
}

#[derive(Debug, Clone, Error)]
pub enum EvolveError<T: Real> {
    #[error(transparent)]
    Model(#[from] Error),

    #[error("integration failed at t = {t}: {reason}", t = to_f64(*.t))]
    Integration {
        t: T,
        reason: String,
        /// Last accepted state.
        last_state: Box<DensityMatrix<T>>,
        /// Samples recorded before the failure.
        partial: Box<Trajectory<T>>,
    },
}

/// Integrates the master equation from `rho0` over `[0, t_end]`.
pub fn evolve<T: Real>(
    rho0: &DensityMatrix<T>,
    s_op: &CMatrix<T>,
    gamma: T,
    hamiltonian: Option<&CMatrix<T>>,
    t_end: T,
    options: &IntegratorOptions<T>,
) -> std::result::Result<Trajectory<T>, EvolveError<T>> {
    let dim = rho0.dim();
    check_square(s_op, dim)?;
    if let Some(h) = hamiltonian {
        check_square(h, dim)?;
    }
    if !(t_end > T::zero()) {
        return Err(Error::Domain("t_end must be > 0".into()).into());
    }
    if options.samples < 2 {
        return Err(Error::Domain("at least two samples required".into()).into());
    }
    let generator = Generator::new(s_op, gamma, hamiltonian);
    let control = StepControl {
        rtol: options.rtol,
        atol: options.atol,
        h_init: None,
        h_min: options.h_min,
        h_max: options.h_max,
        ..StepControl::default()
    };
    let mut stepper = DormandPrince::new(|rho: &CMatrix<T>| generator.apply(rho), control);
    let resym = options.resymmetrize;
    let mut after = |rho: &mut CMatrix<T>| {
        if resym {
            *rho = hermitian_part(rho);
        }
    };

    let last = lit::<T>((options.samples - 1) as f64);
    let sample_time = |k: usize| {
        if k == options.samples - 1 {
            t_end
        } else {
            t_end * lit::<T>(k as f64) / last
        }
    };

    let mut traj = Trajectory::with_capacity(options.samples);
    let mut rho = rho0.matrix().clone();
    let mut t = T::zero();
    traj.push(t, rho0.clone());
    for k in 1..options.samples {
        let target = sample_time(k);
        if let Some(tol) = options.steady_tol {
            if generator.apply(&rho).norm() < tol {
                traj.stopped_early_at = Some(t);
                for j in k..options.samples {
                    traj.push(sample_time(j), DensityMatrix::new_unchecked(rho.clone()));
                }
                return Ok(traj);
            }
        }
        if let Err(failure) = stepper.advance(&mut t, &mut rho, target, &mut after) {
            let (t_fail, reason) = match failure {
                StepFailure::Underflow { t, h } => {
                    (t, format!("step size underflow (h = {})", to_f64(h)))
                }
                StepFailure::TooManySteps { t } => (t, "step budget exhausted".to_string()),
                StepFailure::NonFinite { t } => (t, "non-finite state".to_string()),
            };
            return Err(EvolveError::Integration {
                t: t_fail,
                reason,
                last_state: Box::new(DensityMatrix::new_unchecked(rho)),
                partial: Box::new(traj),
            });
        }
        traj.push(target, DensityMatrix::new_unchecked(rho.clone()));
    }
    Ok(traj)
}
