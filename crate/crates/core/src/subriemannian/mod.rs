//! Velocity constraints `ω_j(ẋ) = 0` and the multiplier form of the
//! constrained Euler–Lagrange equation
//!
//! ```text
//! D⁴x/dt⁴ = −R(a, u)u + σa − ½ grad V + Σ λ′_j Y_j + Σ λ_j S_j(u)
//! ```
//!
//! where `Y_j = ω_j♯` and `⟨S_j(u), z⟩ = dω_j(u, z)`.

pub mod unicycle;

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::dynamics::{el_rhs, ElState};
use crate::error::{Error, Result};
use crate::geometry::{fd_step, CurveJet, ManifoldModel};
use crate::navigation::NavigationField;

pub type OneFormField = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
/// `(p, u) ↦ S(u)` at `p`.
pub type STensorField = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
struct Constraint {
    form: OneFormField,
    s_tensor: Option<STensorField>,
}

/// One-forms `ω_1..ω_k` on a chart, with optional analytic S-tensors.
#[derive(Clone)]
pub struct ConstraintSet {
    model: ManifoldModel,
    constraints: Vec<Constraint>,
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintSet").field("model", &self.model).field("len", &self.constraints.len()).finish()
    }
}

/// Lagrange multipliers and their time derivatives at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierState {
    pub lambda: DVector<f64>,
    pub lambda_prime: DVector<f64>,
}

impl MultiplierState {
    pub fn new(lambda: DVector<f64>, lambda_prime: DVector<f64>) -> Self {
        Self { lambda, lambda_prime }
    }

    pub fn scalar(lambda: f64, lambda_prime: f64) -> Self {
        Self::new(DVector::from_element(1, lambda), DVector::from_element(1, lambda_prime))
    }

    pub fn zeros(k: usize) -> Self {
        Self::new(DVector::zeros(k), DVector::zeros(k))
    }
}

impl ConstraintSet {
    pub fn new(model: ManifoldModel) -> Self {
        Self { model, constraints: Vec::new() }
    }

    /// Adds a one-form whose S-tensor is obtained from finite differences.
    pub fn with_form<F>(mut self, form: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        self.constraints.push(Constraint { form: Arc::new(form), s_tensor: None });
        self
    }

    /// Adds a one-form together with its analytic S-tensor.
    pub fn with_form_and_s<F, S>(mut self, form: F, s_tensor: S) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        S: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        self.constraints.push(Constraint { form: Arc::new(form), s_tensor: Some(Arc::new(s_tensor)) });
        self
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    fn check_index(&self, j: usize) -> Result<&Constraint> {
        self.constraints.get(j).ok_or(Error::DimensionMismatch { expected: self.constraints.len(), got: j + 1 })
    }

    /// Covector components of `ω_j` at `p`.
    pub fn one_form(&self, j: usize, p: &DVector<f64>) -> Result<DVector<f64>> {
        Ok((self.check_index(j)?.form)(p))
    }

    /// `(ω_j(u))_j`; zero for admissible velocities.
    pub fn constraint_residual(&self, jet: &CurveJet) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.constraints.iter().map(|c| (c.form)(&jet.x).dot(&jet.u)))
    }

    /// `Y_j = ω_j♯`.
    pub fn vector_field(&self, j: usize, p: &DVector<f64>) -> Result<DVector<f64>> {
        self.model.gradient(&self.one_form(j, p)?, p)
    }

    /// Central-difference partials `∂_i ω_k`, row `i`.
    fn form_partials(&self, j: usize, p: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        let c = self.check_index(j)?;
        Ok((0..p.len())
            .map(|i| {
                let h = fd_step(p, i);
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[i] += h;
                minus[i] -= h;
                ((c.form)(&plus) - (c.form)(&minus)) / (2.0 * h)
            })
            .collect())
    }

    /// The covector `dω_j(u, ·)`, with `dω(u, z) = Σ (∂_iω_k − ∂_kω_i) u^i z^k`.
    pub fn exterior_derivative_covector(&self, j: usize, p: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
        let d = self.form_partials(j, p)?;
        let n = p.len();
        Ok(DVector::from_fn(n, |k, _| (0..n).map(|i| (d[i][k] - d[k][i]) * u[i]).sum()))
    }

    /// `dω_j(u, z)` by finite differences of the one-form.
    pub fn exterior_derivative(&self, j: usize, p: &DVector<f64>, u: &DVector<f64>, z: &DVector<f64>) -> Result<f64> {
        Ok(self.exterior_derivative_covector(j, p, u)?.dot(z))
    }

    /// `S_j(u)` from the finite-difference exterior derivative, ignoring any
    /// analytic override.
    pub fn s_tensor_fd(&self, j: usize, p: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
        self.model.gradient(&self.exterior_derivative_covector(j, p, u)?, p)
    }

    pub fn s_tensor(&self, j: usize, p: &DVector<f64>, u: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.check_index(j)?.s_tensor {
            Some(s) => Ok(s(p, u)),
            None => self.s_tensor_fd(j, p, u),
        }
    }

    /// `Σ λ′_j Y_j + Σ λ_j S_j(u)` at the jet's base point.
    pub fn multiplier_force(&self, jet: &CurveJet, mult: &MultiplierState) -> Result<DVector<f64>> {
        if mult.lambda.len() != self.len() || mult.lambda_prime.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: mult.lambda.len() });
        }
        let mut out = DVector::zeros(jet.dim());
        for j in 0..self.len() {
            if mult.lambda_prime[j] != 0.0 {
                out += self.vector_field(j, &jet.x)? * mult.lambda_prime[j];
            }
            if mult.lambda[j] != 0.0 {
                out += self.s_tensor(j, &jet.x, &jet.u)? * mult.lambda[j];
            }
        }
        Ok(out)
    }

    /// Left-hand side of the abnormal-extremal condition; identical to
    /// [`Self::multiplier_force`].
    pub fn abnormal_residual(&self, jet: &CurveJet, mult: &MultiplierState) -> Result<DVector<f64>> {
        self.multiplier_force(jet, mult)
    }

    /// Constrained fourth covariant derivative: the unconstrained
    /// Euler–Lagrange right-hand side plus the multiplier force.
    pub fn constrained_el_rhs(
        &self,
        jet: &CurveJet,
        sigma: f64,
        nav: Option<&NavigationField>,
        mult: &MultiplierState,
    ) -> Result<DVector<f64>> {
        let free = el_rhs(&self.model, &ElState::new(jet, sigma, nav))?;
        Ok(free + self.multiplier_force(jet, mult)?)
    }
}
