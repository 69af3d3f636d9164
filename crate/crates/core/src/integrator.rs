//! Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step size.

use nalgebra::ComplexField;

use crate::scalar::{lit, CMatrix, Real};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: Option<T>,
    pub h_min: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        Self {
            rtol: lit(1e-9),
            atol: lit(1e-12),
            h_init: None,
            h_min: lit(1e-14),
            h_max: lit(1.0),
            max_steps: 10_000_000,
        }
    }
}

/// Why integration stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepFailure<T> {
    /// The controller asked for a step below `h_min` at time `t`.
    Underflow { t: T, h: T },
    /// `max_steps` exhausted at time `t`.
    TooManySteps { t: T },
    /// Non-finite values appeared at time `t`.
    NonFinite { t: T },
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights equal the last row of A
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive integrator for `dy/dt = f(y)` on complex matrices (autonomous).
pub struct DormandPrince<'a, T: Real> {
    rhs: Box<dyn Fn(&CMatrix<T>) -> CMatrix<T> + 'a>,
    control: StepControl<T>,
    h: Option<T>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<'a, T: Real> DormandPrince<'a, T> {
    pub fn new(rhs: impl Fn(&CMatrix<T>) -> CMatrix<T> + 'a, control: StepControl<T>) -> Self {
        Self {
            rhs: Box::new(rhs),
            control,
            h: control.h_init,
            accepted: 0,
            rejected: 0,
        }
    }

    fn error_norm(&self, y: &CMatrix<T>, y_new: &CMatrix<T>, err: &CMatrix<T>) -> T {
        let mut acc = T::zero();
        for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
            let scale = self.control.atol + self.control.rtol * a.modulus().max(b.modulus());
            let r = e.modulus() / scale;
            acc += r * r;
        }
        (acc / lit(err.len().max(1) as f64)).sqrt()
    }

    fn initial_step(&self, y: &CMatrix<T>, f0: &CMatrix<T>, span: T) -> T {
        // Hairer-Norsett-Wanner starting step heuristic (first stage only)
        let d0 = y.norm();
        let d1 = f0.norm();
        let h = if d0 < lit(1e-5) || d1 < lit(1e-5) {
            lit(1e-6)
        } else {
            lit::<T>(0.01) * d0 / d1
        };
        h.min(span).min(self.control.h_max).max(self.control.h_min)
    }

    /// Advances `y` from `t` to exactly `t_target`. `after_step` is applied
    /// to every accepted state (used for re-symmetrization).
    pub fn advance(
        &mut self,
        t: &mut T,
        y: &mut CMatrix<T>,
        t_target: T,
        after_step: &mut dyn FnMut(&mut CMatrix<T>),
    ) -> Result<(), StepFailure<T>> {
        let safety = lit::<T>(0.9);
        let min_factor = lit::<T>(0.2);
        let max_factor = lit::<T>(5.0);
        let order_exp = lit::<T>(0.2);
        while *t < t_target {
            let remaining = t_target - *t;
            let f0 = (self.rhs)(y);
            let mut h = match self.h {
                Some(h) => h,
                None => self.initial_step(y, &f0, remaining),
            };
            let mut landing = false;
            if h >= remaining {
                h = remaining;
                landing = true;
            }
            loop {
                if self.accepted + self.rejected >= self.control.max_steps {
                    return Err(StepFailure::TooManySteps { t: *t });
                }
                let mut k: Vec<CMatrix<T>> = Vec::with_capacity(7);
                k.push(f0.clone());
                for stage in 1..7 {
                    let mut yi = y.clone();
                    for (j, kj) in k.iter().enumerate() {
                        let a = A[stage][j];
                        if a != 0.0 {
                            yi += kj * crate::scalar::re(h * lit(a));
                        }
                    }
                    k.push((self.rhs)(&yi));
                }
                let mut y_new = y.clone();
                let mut err = CMatrix::zeros(y.nrows(), y.ncols());
                for j in 0..7 {
                    if B5[j] != 0.0 {
                        y_new += &k[j] * crate::scalar::re(h * lit(B5[j]));
                    }
                    let e = B5[j] - B4[j];
                    if e != 0.0 {
                        err += &k[j] * crate::scalar::re(h * lit(e));
                    }
                }
                if y_new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(StepFailure::NonFinite { t: *t });
                }
                let en = self.error_norm(y, &y_new, &err);
                if en <= T::one() {
                    self.accepted += 1;
                    *t = if landing { t_target } else { *t + h };
                    let factor = if en == T::zero() {
                        max_factor
                    } else {
                        (safety * en.powf(-order_exp))
                            .min(max_factor)
                            .max(min_factor)
                    };
                    let h_next = (h * factor).min(self.control.h_max);
                    // a landing step may be artificially short; keep the longer proposal
                    self.h = Some(match self.h {
                        Some(prev) if landing => prev.max(h_next),
                        _ => h_next,
                    });
                    *y = y_new;
                    after_step(y);
                    break;
                }
                self.rejected += 1;
                let factor = (safety * en.powf(-order_exp)).max(min_factor);
                h *= factor;
                landing = false;
                if h < self.control.h_min {
                    return Err(StepFailure::Underflow { t: *t, h });
                }
                self.h = Some(h);
            }
        }
        Ok(())
    }
}
