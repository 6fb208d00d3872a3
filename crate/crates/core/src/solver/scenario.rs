//! Problem description read from a JSON document.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, SE2_THETA};
use crate::navigation::{CircleObstacle, NavigationField, DEFAULT_GUARD};
use crate::subriemannian::unicycle::unicycle_one_form;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Euclidean {
        dim: usize,
    },
    /// SE(2) integrated in the chart `(x, y, θ)`.
    Se2 {
        #[serde(default = "one")]
        mass: f64,
        #[serde(default = "one")]
        inertia: f64,
    },
    /// SE(2) integrated through the left-invariant reduced equations.
    Se2Reduced {
        #[serde(default = "one")]
        mass: f64,
        #[serde(default = "one")]
        inertia: f64,
    },
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        match self {
            ManifoldSpec::Euclidean { dim } => *dim,
            _ => 3,
        }
    }

    pub fn chart(&self) -> ManifoldModel {
        match *self {
            ManifoldSpec::Euclidean { dim } => ManifoldModel::euclidean(dim),
            ManifoldSpec::Se2 { mass, inertia } | ManifoldSpec::Se2Reduced { mass, inertia } => {
                ManifoldModel::se2(mass, inertia)
            }
        }
    }

    /// `(m, J)` for the SE(2) variants.
    pub fn rigid_body(&self) -> Option<(f64, f64)> {
        match *self {
            ManifoldSpec::Euclidean { .. } => None,
            ManifoldSpec::Se2 { mass, inertia } | ManifoldSpec::Se2Reduced { mass, inertia } => Some((mass, inertia)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NavigationSpec {
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_radius: Option<f64>,
    #[serde(default)]
    pub obstacle: CircleObstacle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub p0: Vec<f64>,
    pub v0: Vec<f64>,
    #[serde(rename = "pT")]
    pub p_t: Vec<f64>,
    #[serde(rename = "vT")]
    pub v_t: Vec<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraints {
    #[default]
    None,
    Unicycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub steps: usize,
    pub integrator_order: u32,
    pub newton_tol: f64,
    pub max_iterations: usize,
    pub continuation_steps: usize,
    pub guard_eps: f64,
    pub seed: u64,
    pub n_variations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            steps: 1000,
            integrator_order: 4,
            newton_tol: 1e-10,
            max_iterations: 50,
            continuation_steps: 10,
            guard_eps: DEFAULT_GUARD,
            seed: 0,
            n_variations: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub manifold: ManifoldSpec,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub navigation: Option<NavigationSpec>,
    pub boundary: Boundary,
    #[serde(default)]
    pub constraints: Constraints,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let scen: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scen.validate()?;
        Ok(scen)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn horizon(&self) -> f64 {
        self.boundary.horizon
    }

    pub fn chart(&self) -> ManifoldModel {
        self.manifold.chart()
    }

    /// Navigation field at full strength, if configured.
    pub fn navigation_field(&self) -> Option<NavigationField> {
        self.navigation.as_ref().map(|n| {
            let mut field =
                NavigationField::unit_circle(n.tau).with_obstacle(n.obstacle).with_guard(self.solver.guard_eps);
            if let Some(rc) = n.cutoff_radius {
                field = field.with_cutoff(rc);
            }
            field
        })
    }

    pub fn tau(&self) -> f64 {
        self.navigation.as_ref().map_or(0.0, |n| n.tau)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(invalid("manifold dimension must be positive"));
        }
        if let Some((m, j)) = self.manifold.rigid_body() {
            if !(m > 0.0 && m.is_finite() && j > 0.0 && j.is_finite()) {
                return Err(invalid(format!("mass and inertia must be positive, got m = {m}, J = {j}")));
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be a nonnegative number, got {}", self.sigma)));
        }
        let b = &self.boundary;
        if !(b.horizon > 0.0 && b.horizon.is_finite()) {
            return Err(invalid(format!("T must be positive, got {}", b.horizon)));
        }
        for (name, v) in [("p0", &b.p0), ("v0", &b.v0), ("pT", &b.p_t), ("vT", &b.v_t)] {
            if v.len() != n {
                return Err(invalid(format!("{name} has {} components, expected {n}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(format!("{name} has non-finite components")));
            }
        }
        self.validate_solver()?;
        self.validate_navigation()?;
        self.validate_constraints()
    }

    fn validate_solver(&self) -> Result<()> {
        let s = &self.solver;
        if s.steps < 2 {
            return Err(invalid("solver.steps must be at least 2"));
        }
        if s.integrator_order != 4 {
            return Err(invalid(format!("solver.integrator_order {} is not available (only 4)", s.integrator_order)));
        }
        if !(s.newton_tol > 0.0) || s.max_iterations == 0 || s.continuation_steps == 0 {
            return Err(invalid("newton_tol, max_iterations and continuation_steps must be positive"));
        }
        if !(s.guard_eps > 0.0) {
            return Err(invalid("guard_eps must be positive"));
        }
        if s.n_variations == 0 {
            return Err(invalid("n_variations must be at least 1"));
        }
        Ok(())
    }

    fn validate_navigation(&self) -> Result<()> {
        let Some(nav) = &self.navigation else {
            return Ok(());
        };
        if self.dim() < 2 {
            return Err(invalid("a navigation field needs at least two planar coordinates"));
        }
        if !(nav.tau >= 0.0 && nav.tau.is_finite()) {
            return Err(invalid(format!("tau must be a nonnegative number, got {}", nav.tau)));
        }
        let r = nav.obstacle.radius;
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("obstacle radius must be positive, got {r}")));
        }
        if let Some(rc) = nav.cutoff_radius {
            if !(rc > r) {
                return Err(invalid(format!("cutoff_radius {rc} must exceed the obstacle radius {r}")));
            }
        }
        if nav.tau > 0.0 {
            let field = self.navigation_field().expect("navigation present");
            for (name, p) in [("p0", &self.boundary.p0), ("pT", &self.boundary.p_t)] {
                let rho = field.rho(&nalgebra::DVector::from_column_slice(p));
                if !(rho > self.solver.guard_eps) {
                    return Err(invalid(format!("{name} = {p:?} lies inside the obstacle (|p − c|² − r² = {rho})")));
                }
            }
        }
        Ok(())
    }

    fn validate_constraints(&self) -> Result<()> {
        if self.constraints == Constraints::None {
            return Ok(());
        }
        if !matches!(self.manifold, ManifoldSpec::Se2 { .. }) {
            return Err(invalid("unicycle constraints require the se2 manifold"));
        }
        let b = &self.boundary;
        for (name, p, v) in [("v0", &b.p0, &b.v0), ("vT", &b.p_t, &b.v_t)] {
            let omega = unicycle_one_form(p[SE2_THETA]);
            let value = omega.x * v[0] + omega.y * v[1];
            if value.abs() > 1e-12 * (1.0 + v[0].abs() + v[1].abs()) {
                return Err(invalid(format!(
                    "{name} violates the rolling constraint: ω({name}) = ẋ sin θ − ẏ cos θ = {value} ≠ 0"
                )));
            }
        }
        Ok(())
    }
}
