//! Fixed-step classical Runge–Kutta.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// One RK4 step of an autonomous system.
pub fn rk4_step<F>(f: &F, x: &DVector<f64>, h: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let k1 = f(x)?;
    let k2 = f(&(x + &k1 * (0.5 * h)))?;
    let k3 = f(&(x + &k2 * (0.5 * h)))?;
    let k4 = f(&(x + &k3 * h))?;
    Ok(x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0))
}

/// Integrates `ẋ = f(x)` over `[0, horizon]` in `steps` equal steps and
/// returns all `steps + 1` states.
pub fn integrate<F>(f: F, x0: &DVector<f64>, horizon: f64, steps: usize) -> Result<Vec<DVector<f64>>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let h = horizon / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x0.clone());
    for i in 0..steps {
        let next = rk4_step(&f, &out[i], h)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: time_at(horizon, steps, i + 1) });
        }
        out.push(next);
    }
    Ok(out)
}

/// Grid time `T·i/N`.
pub fn time_at(horizon: f64, steps: usize, i: usize) -> f64 {
    horizon * i as f64 / steps as f64
}
