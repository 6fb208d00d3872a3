//! Boundary-value solution by shooting with homotopy in the obstacle
//! strength.
//!
//! Every stage solves the terminal conditions with damped Newton; stages
//! ramp `τ_i = τ_start + (τ − τ_start)(i/n)²` and warm-start from the
//! previous stage. When the warm start would cross the obstacle under the new
//! potential, it is first bent away from the obstacle (see [`detour`]); if
//! Newton then fails, the bent guess is carried on to the next, stronger
//! stage.

pub mod integrate;
pub mod newton;
pub mod pathway;
pub mod scenario;
pub mod trajectory;
pub mod variation;

use nalgebra::DVector;

pub use pathway::{Pathway, Shooting};
pub use scenario::{Boundary, Constraints, ManifoldSpec, NavigationSpec, Scenario, SolverSettings};
pub use trajectory::{evaluate_functional, Diagnostics, Trajectory};

use crate::error::{Error, Result};
use crate::navigation::NavigationField;
use newton::newton;

/// Converged unknowns of a previous solve, used to seed the next one.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub unknowns: DVector<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub unknowns: DVector<f64>,
    pub converged: bool,
    pub newton_iterations: usize,
    /// Max-norm of the terminal residual at the returned unknowns.
    pub residual_norm: f64,
    /// Strengths of the homotopy stages that were attempted.
    pub stages: Vec<f64>,
    pub failure: Option<Error>,
}

impl Solution {
    pub fn warm_start(&self) -> WarmStart {
        WarmStart { unknowns: self.unknowns.clone(), tau: *self.stages.last().unwrap_or(&0.0) }
    }
}

/// Homotopy strengths from `start` to `target` in `n` stages, quadratic in
/// the stage index; a single stage when nothing changes.
pub fn homotopy_schedule(start: f64, target: f64, n: usize) -> Vec<f64> {
    if start == target {
        return vec![target];
    }
    (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            if i == n {
                target
            } else {
                start + (target - start) * s * s
            }
        })
        .collect()
}

pub fn solve(scen: &Scenario) -> Result<Solution> {
    solve_from(scen, None)
}

/// Solves `scen`, continuing from `warm` if given (otherwise from the
/// Hermite cubic at `τ = 0`).
pub fn solve_from(scen: &Scenario, warm: Option<&WarmStart>) -> Result<Solution> {
    scen.validate()?;
    let shoot = Shooting::from_scenario(scen);
    let full = scen.navigation_field();
    let settings = &scen.solver;
    let (mut z, tau_start) = match warm {
        Some(w) if w.unknowns.len() == shoot.unknowns() => (w.unknowns.clone(), w.tau),
        _ => (shoot.hermite_guess()?, 0.0),
    };
    let field = |tau: f64| full.as_ref().map(|f| f.clone().with_tau(tau));
    let schedule = match &full {
        Some(f) => homotopy_schedule(tau_start, f.tau, settings.continuation_steps),
        None => vec![0.0],
    };

    let mut iterations = 0;
    let mut previous: Option<NavigationField> = None;
    let mut attempted = Vec::with_capacity(schedule.len());
    let mut bent: Option<DVector<f64>> = None;
    for (stage, &tau) in schedule.iter().enumerate() {
        attempted.push(tau);
        let nav = field(tau);
        if let Some(target) = &nav {
            if !target.is_inert() && shoot.residual(&z, Some(target)).is_err() {
                if let Some(guess) = detour(&shoot, &z, previous.as_ref(), target) {
                    z = guess;
                    bent = Some(z.clone());
                }
            }
        }
        let outcome = match newton(
            |z| shoot.residual(z, nav.as_ref()),
            z.clone(),
            settings.newton_tol,
            settings.max_iterations,
        ) {
            Ok(o) => o,
            Err(e) => return partial(&shoot, &z, previous.as_ref(), iterations, attempted, e),
        };
        iterations += outcome.iterations;
        if !outcome.converged {
            // A weak barrier next to a detoured curve is the stiffest stage:
            // the extremal grazes the obstacle. Retry the detour under the
            // stronger potential of the next stage instead.
            if let (Some(guess), true) = (&bent, stage + 1 < schedule.len()) {
                z = guess.clone();
                continue;
            }
            let err = Error::NonConvergence { iterations: outcome.iterations, best_residual: outcome.norm() };
            return partial(&shoot, &outcome.z, nav.as_ref(), iterations, attempted, err);
        }
        z = outcome.z.clone();
        bent = None;
        previous = nav;
    }

    let states = shoot.integrate(&z, full.as_ref())?;
    let residual_norm = shoot.terminal_residual(states.last().expect("non-empty")).amax();
    Ok(Solution {
        trajectory: finish(&shoot, &states),
        unknowns: z,
        converged: true,
        newton_iterations: iterations,
        residual_norm,
        stages: attempted,
        failure: None,
    })
}

fn finish(shoot: &Shooting, states: &[DVector<f64>]) -> Trajectory {
    let mut traj = shoot.trajectory(states);
    traj.wrap_angles(shoot.chart.angle_coords());
    traj
}

/// Best available trajectory after a failed stage.
fn partial(
    shoot: &Shooting,
    z: &DVector<f64>,
    nav: Option<&NavigationField>,
    iterations: usize,
    stages: Vec<f64>,
    err: Error,
) -> Result<Solution> {
    let states = shoot.integrate(z, nav).map_err(|_| err.clone())?;
    let residual_norm = shoot.terminal_residual(states.last().expect("non-empty")).amax();
    Ok(Solution {
        trajectory: finish(shoot, &states),
        unknowns: z.clone(),
        converged: false,
        newton_iterations: iterations,
        residual_norm,
        stages,
        failure: Some(err),
    })
}

/// Number of times the detour amplitude is doubled before giving up.
const DETOUR_DOUBLINGS: usize = 8;

/// Bends the initial jet so that the curve passes the obstacle at 1.5 radii.
///
/// The curve integrated under `reference` is closest to the obstacle center
/// at `t*`; adding `c₁n` to `a(0)` and `−3c₁n/T` to `j(0)` shifts a free
/// cubic by `c₁t²(T − t)/(2T)` along `n`, the outward normal at `t*` (or
/// the left normal of the velocity when the curve runs through the center).
/// The amplitude is doubled until the curve integrates cleanly under
/// `target`.
pub fn detour(
    shoot: &Shooting,
    z: &DVector<f64>,
    reference: Option<&NavigationField>,
    target: &NavigationField,
) -> Option<DVector<f64>> {
    if matches!(shoot.pathway, Pathway::Unicycle(_)) {
        return None;
    }
    let states = shoot.integrate(z, reference).ok()?;
    let traj = shoot.trajectory(&states);
    let (px, py) = target.planar;
    let center = target.obstacle.center;
    let radius = target.obstacle.radius;
    let interior = 1..traj.len() - 1;
    let k = interior.min_by(|&a, &b| {
        let da = target.center_distance(&traj.jets[a].x);
        let db = target.center_distance(&traj.jets[b].x);
        da.total_cmp(&db)
    })?;
    let jet = &traj.jets[k];
    let (dx, dy) = (jet.x[px] - center[0], jet.x[py] - center[1]);
    let dist = dx.hypot(dy);
    let normal = if dist > 1e-9 * radius {
        [dx / dist, dy / dist]
    } else {
        let speed = jet.u[px].hypot(jet.u[py]);
        if speed == 0.0 {
            return None;
        }
        [-jet.u[py] / speed, jet.u[px] / speed]
    };
    let horizon = shoot.horizon;
    let t = traj.times[k];
    let offset = (1.5 * radius - dist).max(0.5 * radius);
    let mut c1 = offset * 2.0 * horizon / (t * t * (horizon - t));
    let base = shoot.initial_chart_jet(z);
    for _ in 0..DETOUR_DOUBLINGS {
        let mut jet = base.clone();
        for (axis, n) in [(px, normal[0]), (py, normal[1])] {
            jet.a[axis] += c1 * n;
            jet.j[axis] -= 3.0 * c1 / horizon * n;
        }
        let candidate = shoot.unknowns_from_chart_jet(&jet, z)?;
        if shoot.residual(&candidate, Some(target)).is_ok() {
            return Some(candidate);
        }
        c1 *= 2.0;
    }
    None
}
