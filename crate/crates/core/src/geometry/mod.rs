//! Chart-based Riemannian kernel.
//!
//! A [`ManifoldModel`] is a single coordinate chart carrying a metric field and,
//! optionally, an analytic Christoffel field. Everything else (Levi-Civita
//! connection, curvature, sharp map, covariant jets of curves) is derived from
//! those two fields here.
//!
//! Sign convention for the curvature tensor:
//! `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z`.

mod charts;
mod jet;

pub use charts::SE2_THETA;
pub use jet::CurveJet;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

pub type MetricField = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
pub type ChristoffelField = Arc<dyn Fn(&DVector<f64>) -> Christoffel + Send + Sync>;

/// Relative step used for every finite difference taken on chart fields.
pub const FD_REL_STEP: f64 = 1e-5;

/// Step for a central difference along coordinate `i` at `p`.
pub(crate) fn fd_step(p: &DVector<f64>, i: usize) -> f64 {
    FD_REL_STEP * (1.0 + p[i].abs())
}

/// Christoffel symbols `Γ^k_{ij}` of a connection at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    /// `Γ^k_{ij}`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let idx = self.idx(k, i, j);
        self.data[idx] = value;
    }

    /// Sets `Γ^k_{ij}` and `Γ^k_{ji}` together.
    pub fn set_symmetric(&mut self, k: usize, i: usize, j: usize, value: f64) {
        self.set(k, i, j, value);
        self.set(k, j, i, value);
    }

    /// Contraction `Γ^k_{ij} a^i b^j`.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut acc = 0.0;
            for i in 0..n {
                if a[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += self.get(k, i, j) * a[i] * b[j];
                }
            }
            acc
        })
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn torsion_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    fn axpy(&mut self, alpha: f64, other: &Christoffel) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    fn scaled_difference(plus: &Christoffel, minus: &Christoffel, inv: f64) -> Christoffel {
        Christoffel { dim: plus.dim, data: plus.data.iter().zip(&minus.data).map(|(a, b)| (a - b) * inv).collect() }
    }
}

/// A coordinate chart of a Riemannian manifold.
#[derive(Clone)]
pub struct ManifoldModel {
    name: String,
    dim: usize,
    metric: MetricField,
    christoffel: Option<ChristoffelField>,
    flat: bool,
    angle_coords: Vec<usize>,
}

impl fmt::Debug for ManifoldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_christoffel", &self.christoffel.is_some())
            .field("flat", &self.flat)
            .field("angle_coords", &self.angle_coords)
            .finish()
    }
}

impl ManifoldModel {
    /// A chart whose Christoffel symbols are obtained by central differences
    /// of `metric`.
    pub fn from_metric<F>(name: impl Into<String>, dim: usize, metric: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        assert!(dim > 0, "manifold dimension must be positive");
        Self {
            name: name.into(),
            dim,
            metric: Arc::new(metric),
            christoffel: None,
            flat: false,
            angle_coords: Vec::new(),
        }
    }

    /// Registers an analytic Christoffel field, used instead of finite differences.
    pub fn with_christoffel<F>(mut self, field: F) -> Self
    where
        F: Fn(&DVector<f64>) -> Christoffel + Send + Sync + 'static,
    {
        self.christoffel = Some(Arc::new(field));
        self
    }

    pub fn with_flat(mut self, flat: bool) -> Self {
        self.flat = flat;
        self
    }

    pub fn with_angle_coords(mut self, coords: Vec<usize>) -> Self {
        self.angle_coords = coords;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn angle_coords(&self) -> &[usize] {
        &self.angle_coords
    }

    pub fn has_analytic_christoffel(&self) -> bool {
        self.christoffel.is_some()
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn metric_at(&self, p: &DVector<f64>) -> DMatrix<f64> {
        (self.metric)(p)
    }

    /// Cholesky factor of the metric, or a degenerate-metric error.
    fn factor(&self, p: &DVector<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        self.check_dim(p)?;
        let g = self.metric_at(p);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMetric { point: p.iter().copied().collect() });
        }
        Cholesky::new(g).ok_or_else(|| Error::DegenerateMetric { point: p.iter().copied().collect() })
    }

    /// `⟨x, y⟩_p`.
    pub fn inner(&self, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (self.metric_at(p) * y).dot(x)
    }

    pub fn norm_squared(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        self.inner(p, x, x)
    }

    /// Index lowering `g·v`.
    pub fn flat_map(&self, p: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.metric_at(p) * v
    }

    /// Metric sharp `g⁻¹·dv`: the vector `w` with `⟨w, z⟩ = dv(z)` for every `z`.
    pub fn gradient(&self, dv: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(dv)?;
        Ok(self.factor(p)?.solve(dv))
    }

    /// Christoffel symbols of the Levi-Civita connection at `p`.
    pub fn levi_civita_christoffels(&self, p: &DVector<f64>) -> Result<Christoffel> {
        let chol = self.factor(p)?;
        if let Some(field) = &self.christoffel {
            return Ok(field(p));
        }
        let n = self.dim;
        // dg[l] = ∂_l g
        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|l| {
                let h = fd_step(p, l);
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[l] += h;
                minus[l] -= h;
                (self.metric_at(&plus) - self.metric_at(&minus)) / (2.0 * h)
            })
            .collect();
        let ginv = chol.inverse();
        let mut gamma = Christoffel::zeros(n);
        for i in 0..n {
            for j in i..n {
                // lowered symbols Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
                let lowered = DVector::from_fn(n, |l, _| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]));
                let raised = &ginv * lowered;
                for k in 0..n {
                    gamma.set_symmetric(k, i, j, raised[k]);
                }
            }
        }
        Ok(gamma)
    }

    /// Coordinate partials `∂_l Γ` for every `l`, by central differences.
    pub fn christoffel_partials(&self, p: &DVector<f64>) -> Result<Vec<Christoffel>> {
        (0..self.dim)
            .map(|l| {
                let h = fd_step(p, l);
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[l] += h;
                minus[l] -= h;
                let gp = self.levi_civita_christoffels(&plus)?;
                let gm = self.levi_civita_christoffels(&minus)?;
                Ok(Christoffel::scaled_difference(&gp, &gm, 0.5 / h))
            })
            .collect()
    }

    /// Directional derivative `u^l ∂_l Γ`.
    pub fn christoffel_derivative(&self, p: &DVector<f64>, u: &DVector<f64>) -> Result<Christoffel> {
        self.check_dim(u)?;
        let partials = self.christoffel_partials(p)?;
        Ok(contract_partials(&partials, u))
    }

    /// `R(X,Y)Z` at `p`.
    pub fn curvature(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        p: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        self.check_dim(z)?;
        if self.flat {
            self.factor(p)?;
            return Ok(DVector::zeros(self.dim));
        }
        let gamma = self.levi_civita_christoffels(p)?;
        let partials = self.christoffel_partials(p)?;
        let d_x = contract_partials(&partials, x);
        let d_y = contract_partials(&partials, y);
        // R^l = X^i Y^j Z^k (∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^m_jk Γ^l_im − Γ^m_ik Γ^l_jm)
        let derivative_part = d_x.contract(y, z) - d_y.contract(x, z);
        let algebraic_part = gamma.contract(x, &gamma.contract(y, z)) - gamma.contract(y, &gamma.contract(x, z));
        Ok(derivative_part + algebraic_part)
    }

    /// Covariant derivative along a curve: `DW/dt = Ẇ + Γ(u, W)`.
    pub fn covariant_derivative_along(
        &self,
        p: &DVector<f64>,
        u: &DVector<f64>,
        w: &DVector<f64>,
        w_dot: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if self.flat {
            return Ok(w_dot.clone());
        }
        let gamma = self.levi_civita_christoffels(p)?;
        Ok(w_dot + gamma.contract(u, w))
    }

    /// Builds the covariant jet of a curve from its raw coordinate derivatives.
    pub fn jets_from_coordinates(
        &self,
        x: &DVector<f64>,
        xd: &DVector<f64>,
        xdd: &DVector<f64>,
        xddd: &DVector<f64>,
    ) -> Result<CurveJet> {
        for v in [x, xd, xdd, xddd] {
            self.check_dim(v)?;
        }
        if self.flat {
            return Ok(CurveJet::new(x.clone(), xd.clone(), xdd.clone(), xddd.clone()));
        }
        let gamma = self.levi_civita_christoffels(x)?;
        let d_gamma = self.christoffel_derivative(x, xd)?;
        let a = xdd + gamma.contract(xd, xd);
        // ȧ = x⁽³⁾ + (∂_u Γ)(u,u) + 2Γ(ẍ,u)
        let a_dot = xddd + d_gamma.contract(xd, xd) + gamma.contract(xdd, xd) * 2.0;
        let j = a_dot + gamma.contract(xd, &a);
        Ok(CurveJet::new(x.clone(), xd.clone(), a, j))
    }

    /// Inverse of [`Self::jets_from_coordinates`]: returns `(ẋ, ẍ, x⁽³⁾)`.
    pub fn jets_to_coordinates(&self, jet: &CurveJet) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        for v in [&jet.x, &jet.u, &jet.a, &jet.j] {
            self.check_dim(v)?;
        }
        if self.flat {
            return Ok((jet.u.clone(), jet.a.clone(), jet.j.clone()));
        }
        let gamma = self.levi_civita_christoffels(&jet.x)?;
        let d_gamma = self.christoffel_derivative(&jet.x, &jet.u)?;
        let xdd = &jet.a - gamma.contract(&jet.u, &jet.u);
        let a_dot = &jet.j - gamma.contract(&jet.u, &jet.a);
        let xddd = a_dot - d_gamma.contract(&jet.u, &jet.u) - gamma.contract(&xdd, &jet.u) * 2.0;
        Ok((jet.u.clone(), xdd, xddd))
    }

    /// Covariant acceleration `ẍ + Γ(ẋ, ẋ)` of a curve with raw derivatives.
    pub fn covariant_acceleration(
        &self,
        x: &DVector<f64>,
        xd: &DVector<f64>,
        xdd: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if self.flat {
            return Ok(xdd.clone());
        }
        let gamma = self.levi_civita_christoffels(x)?;
        Ok(xdd + gamma.contract(xd, xd))
    }
}

fn contract_partials(partials: &[Christoffel], u: &DVector<f64>) -> Christoffel {
    let n = partials.len();
    let mut out = Christoffel::zeros(n);
    for (l, part) in partials.iter().enumerate() {
        if u[l] != 0.0 {
            out.axpy(u[l], part);
        }
    }
    out
}
