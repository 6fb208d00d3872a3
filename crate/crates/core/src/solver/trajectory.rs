//! Sampled solutions and the diagnostics computed from them.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::scenario::{Constraints, Scenario};
use super::variation::first_variation_residual;
use crate::dynamics::{first_integral, first_integral_scale};
use crate::error::{Error, Result};
use crate::geometry::{CurveJet, ManifoldModel, SE2_THETA};
use crate::navigation::NavigationField;
use crate::subriemannian::unicycle::unicycle_one_form;

/// A curve sampled on a uniform grid, with covariant jets and (for the
/// unicycle) the multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub jets: Vec<CurveJet>,
    pub lambda: Option<Vec<f64>>,
}

/// Maps an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let wrapped = theta - 2.0 * PI * ((theta - PI) / (2.0 * PI)).ceil();
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

/// Composite Simpson rule on a uniform grid; an odd number of intervals ends
/// with a 3/8 panel, a single interval falls back to the trapezoid.
pub fn simpson(values: &[f64], horizon: f64) -> f64 {
    let n = values.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let h = horizon / n as f64;
    if n == 1 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let even = if n.is_multiple_of(2) { n } else { n - 3 };
    let mut acc = 0.0;
    for k in (0..even).step_by(2) {
        acc += h / 3.0 * (values[k] + 4.0 * values[k + 1] + values[k + 2]);
    }
    if even < n {
        let v = &values[even..];
        acc += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
    }
    acc
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() < 2 || self.jets.len() != self.times.len() {
            return Err(Error::Validation("a trajectory needs at least two samples".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("time grid is not strictly increasing".into()));
        }
        if let Some(l) = &self.lambda {
            if l.len() != self.times.len() {
                return Err(Error::Validation("multiplier column has the wrong length".into()));
            }
        }
        Ok(())
    }

    /// Wraps the angle coordinates of every sample to `(−π, π]`.
    pub fn wrap_angles(&mut self, angle_coords: &[usize]) {
        for jet in &mut self.jets {
            for &i in angle_coords {
                jet.x[i] = wrap_angle(jet.x[i]);
            }
        }
    }
}

/// `J = ∫ ½(‖a‖² + σ‖u‖² + V(x)) dt` by composite Simpson.
pub fn evaluate_functional(
    traj: &Trajectory,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let integrand = traj
        .jets
        .iter()
        .map(|jet| {
            let v = nav.map(|n| n.value_at(&jet.x)).transpose()?.unwrap_or(0.0);
            Ok(0.5 * (chart.norm_squared(&jet.x, &jet.a) + sigma * chart.norm_squared(&jet.x, &jet.u) + v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(simpson(&integrand, traj.horizon()))
}

/// Largest boundary mismatch at either end. Angle differences are wrapped;
/// for the unicycle the velocity is compared along the target heading (the
/// lateral part is the constraint violation, reported separately).
pub fn boundary_residual(traj: &Trajectory, scen: &Scenario) -> f64 {
    let chart = scen.chart();
    let b = &scen.boundary;
    let ends = [(&traj.jets[0], &b.p0, &b.v0), (traj.jets.last().expect("non-empty"), &b.p_t, &b.v_t)];
    let mut worst = 0.0_f64;
    for (jet, p, v) in ends {
        for (i, target) in p.iter().enumerate() {
            let mut d = jet.x[i] - target;
            if chart.angle_coords().contains(&i) {
                d = wrap_angle(d);
            }
            worst = worst.max(d.abs());
        }
        if scen.constraints == Constraints::Unicycle {
            let (s, c) = p[SE2_THETA].sin_cos();
            let dl = (jet.u[0] - v[0]) * c + (jet.u[1] - v[1]) * s;
            worst = worst.max(dl.abs()).max((jet.u[SE2_THETA] - v[SE2_THETA]).abs());
        } else {
            for (i, target) in v.iter().enumerate() {
                worst = worst.max((jet.u[i] - target).abs());
            }
        }
    }
    worst
}

/// `|ẋ sin θ − ẏ cos θ|` at every sample.
pub fn constraint_violations(traj: &Trajectory) -> Vec<f64> {
    traj.jets
        .iter()
        .map(|jet| unicycle_one_form(jet.x[SE2_THETA]).dot(&Vector3::new(jet.u[0], jet.u[1], jet.u[2])).abs())
        .collect()
}

/// Smallest distance from the obstacle center over all samples.
pub fn min_center_distance(traj: &Trajectory, nav: &NavigationField) -> f64 {
    traj.jets.iter().map(|jet| nav.center_distance(&jet.x)).fold(f64::INFINITY, f64::min)
}

/// `max |I(t) − I(0)|` relative to the largest magnitude of its terms.
pub fn first_integral_drift(
    traj: &Trajectory,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let mut i0 = None;
    let mut drift = 0.0_f64;
    let mut scale = 0.0_f64;
    for jet in &traj.jets {
        let i = first_integral(chart, jet, sigma, nav)?;
        let base = *i0.get_or_insert(i);
        drift = drift.max((i - base).abs());
        scale = scale.max(first_integral_scale(chart, jet, sigma, nav)?);
    }
    Ok(if scale > 0.0 { drift / scale } else { drift })
}

/// Every residual reported for a trajectory; all of them are recomputable
/// from the stored samples alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(rename = "J")]
    pub functional: f64,
    pub boundary_residual: f64,
    pub max_constraint_violation: Option<f64>,
    pub min_obstacle_clearance: Option<f64>,
    pub first_integral_drift: f64,
    pub first_variation_residual: f64,
}

impl Diagnostics {
    pub fn compute(traj: &Trajectory, scen: &Scenario) -> Result<Self> {
        traj.validate()?;
        let chart = scen.chart();
        let nav = scen.navigation_field();
        let nav = nav.as_ref();
        let constrained = scen.constraints == Constraints::Unicycle;
        Ok(Self {
            functional: evaluate_functional(traj, &chart, scen.sigma, nav)?,
            boundary_residual: boundary_residual(traj, scen),
            max_constraint_violation: constrained.then(|| constraint_violations(traj).into_iter().fold(0.0, f64::max)),
            min_obstacle_clearance: nav.map(|n| min_center_distance(traj, n)),
            first_integral_drift: first_integral_drift(traj, &chart, scen.sigma, nav)?,
            first_variation_residual: first_variation_residual(
                traj,
                &chart,
                scen.sigma,
                nav,
                constrained,
                scen.solver.n_variations,
                scen.solver.seed,
            )?,
        })
    }
}
