//! Damped Newton iteration with a finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

/// Relative step of the finite-difference Jacobian.
pub const JACOBIAN_REL_STEP: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub z: DVector<f64>,
    pub residual: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl NewtonOutcome {
    pub fn norm(&self) -> f64 {
        self.residual.amax()
    }
}

/// Central-difference Jacobian, falling back to a one-sided difference when
/// one of the two trial evaluations fails.
pub fn jacobian<F>(f: &F, z: &DVector<f64>, fz: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut jac = DMatrix::zeros(fz.len(), z.len());
    for i in 0..z.len() {
        let h = JACOBIAN_REL_STEP * (1.0 + z[i].abs());
        let mut plus = z.clone();
        let mut minus = z.clone();
        plus[i] += h;
        minus[i] -= h;
        let col = match (f(&plus), f(&minus)) {
            (Ok(p), Ok(m)) => (p - m) / (2.0 * h),
            (Ok(p), Err(_)) => (p - fz) / h,
            (Err(_), Ok(m)) => (fz - m) / h,
            (Err(e), Err(_)) => return Err(e),
        };
        jac.set_column(i, &col);
    }
    Ok(jac)
}

fn newton_direction(jac: DMatrix<f64>, fz: &DVector<f64>) -> Option<DVector<f64>> {
    let rhs = -fz;
    if jac.is_square() {
        if let Some(dz) = jac.clone().lu().solve(&rhs) {
            if dz.iter().all(|v| v.is_finite()) {
                return Some(dz);
            }
        }
    }
    jac.svd(true, true).solve(&rhs, 1e-14).ok()
}

/// Drives `f(z)` to zero in the max-norm. Trial points whose evaluation fails
/// (e.g. an integration entering the obstacle) are treated like insufficient
/// decrease and the step is halved. Returns an error only if `f(z0)` itself
/// cannot be evaluated.
pub fn newton<F>(f: F, z0: DVector<f64>, tol: f64, max_iterations: usize) -> Result<NewtonOutcome>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut z = z0;
    let mut fz = f(&z)?;
    let mut iterations = 0;
    let outcome = |z, residual, iterations, converged| NewtonOutcome { z, residual, iterations, converged };
    loop {
        if fz.amax() <= tol {
            return Ok(outcome(z, fz, iterations, true));
        }
        if iterations == max_iterations {
            return Ok(outcome(z, fz, iterations, false));
        }
        iterations += 1;
        let Some(dz) = jacobian(&f, &z, &fz).ok().and_then(|jac| newton_direction(jac, &fz)) else {
            return Ok(outcome(z, fz, iterations, false));
        };
        let norm = fz.norm();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = &z + &dz * alpha;
            if let Ok(ft) = f(&trial) {
                if ft.norm() <= (1.0 - ARMIJO * alpha) * norm || ft.amax() <= tol {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, ft)) => {
                z = trial;
                fz = ft;
            }
            None => return Ok(outcome(z, fz, iterations, false)),
        }
    }
}
