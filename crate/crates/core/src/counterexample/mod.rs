//! Closed-form non-radial solution family for `−Δu = f(u)` in `B_R` with
//! `∂u/∂ν + βu = 0` on `∂B_R`.
//!
//! With `a = |x₀| < R`, `α² = R² − a²` and `r = |x − x₀|` the solution is
//! `φ = (r² + α²)^(−βR)` and the nonlinearity is
//! `f(t) = c₁ t (c₂ t^p + c₃ t^(2p))` with `p = 1/(βR)`,
//! `c₁ = 2βR`, `c₂ = n − 2(βR + 1)`, `c₃ = 2(βR + 1)α²`.
//!
//! `φ`, `∇φ` and `Δφ` are evaluated from the geometry and `βR` directly,
//! while `f` only sees the stored coefficients. The two halves meet in
//! [`CounterexampleModel::pde_residual`], so a corrupted coefficient shows up
//! as a nonzero residual instead of cancelling out.

mod geometry;
mod scan;

use thiserror::Error;

pub use geometry::{BallGeometry, RobinParameter, BOUNDARY_TOL};
pub use scan::{
    check_superharmonic_constraint, superharmonic_threshold, ConstraintClass, NonlinearityMinimum, RadiusStats,
    SymmetryDiagnostics, SIGN_CHANGE_GRID, SIGN_CHANGE_TOL,
};

pub(crate) use geometry::{dot, norm};
pub(crate) use scan::fibonacci_sphere;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("radius must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
    #[error("offset centre has non-finite coordinates")]
    NonFiniteCenter,
    #[error("offset centre |x0| = {offset} must lie strictly inside the ball of radius {radius}")]
    OffsetOutsideBall { offset: f64, radius: f64 },
    #[error("Robin parameter beta must be positive and finite, got {0}")]
    NonPositiveBeta(f64),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point at distance {norm} from the origin is outside the closed ball of radius {radius}")]
    OutsideBall { norm: f64, radius: f64 },
    #[error("point at distance {norm} from the origin is not on the sphere of radius {radius}")]
    NotOnBoundary { norm: f64, radius: f64 },
    #[error("f is evaluated only for t > 0, got {0}")]
    NonPositiveArgument(f64),
}

impl ModelError {
    /// Stable short code, suitable for logs and CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::ZeroDimension => "zero-dimension",
            ModelError::NonPositiveRadius(_) => "non-positive-radius",
            ModelError::NonFiniteCenter => "non-finite-center",
            ModelError::OffsetOutsideBall { .. } => "offset-outside-ball",
            ModelError::NonPositiveBeta(_) => "non-positive-beta",
            ModelError::DimensionMismatch { .. } => "dimension-mismatch",
            ModelError::OutsideBall { .. } => "outside-ball",
            ModelError::NotOnBoundary { .. } => "not-on-boundary",
            ModelError::NonPositiveArgument(_) => "non-positive-argument",
        }
    }
}

/// Names a single stored quantity of a model, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    C1,
    C2,
    C3,
    AlphaSq,
    Exponent,
}

impl Coefficient {
    pub const ALL: [Coefficient; 5] = [
        Coefficient::C1,
        Coefficient::C2,
        Coefficient::C3,
        Coefficient::AlphaSq,
        Coefficient::Exponent,
    ];
}

/// `β` together with the derived constants of the solution family.
///
/// The free multiplicative constant in front of `φ` is fixed to 1; `f` is
/// only consistent with that choice.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleModel {
    geom: BallGeometry,
    beta: RobinParameter,
    c1: f64,
    c2: f64,
    c3: f64,
    alpha_sq: f64,
    p: f64,
}

impl CounterexampleModel {
    pub fn derive(geom: BallGeometry, beta: RobinParameter) -> Self {
        let beta_r = beta.value() * geom.radius();
        let alpha_sq = geom.alpha_sq();
        let n = geom.dim() as f64;
        Self {
            c1: 2.0 * beta_r,
            c2: -2.0 * (beta_r + 1.0) + n,
            c3: 2.0 * (beta_r + 1.0) * alpha_sq,
            alpha_sq,
            p: 1.0 / beta_r,
            geom,
            beta,
        }
    }

    /// Validates raw parameters and derives the model; `x₀ = a·e₁`.
    pub fn from_params(dim: usize, radius: f64, offset: f64, beta: f64) -> Result<Self, ModelError> {
        let geom = BallGeometry::on_axis(dim, radius, offset)?;
        let beta = RobinParameter::new(beta)?;
        Ok(Self::derive(geom, beta))
    }

    /// Copy of the model with one stored quantity shifted by `delta`.
    /// The result is deliberately inconsistent and exists to prove that the
    /// residual checks are not vacuous.
    pub fn perturbed(&self, which: Coefficient, delta: f64) -> Self {
        let mut m = self.clone();
        match which {
            Coefficient::C1 => m.c1 += delta,
            Coefficient::C2 => m.c2 += delta,
            Coefficient::C3 => m.c3 += delta,
            Coefficient::AlphaSq => m.alpha_sq += delta,
            Coefficient::Exponent => m.p += delta,
        }
        m
    }

    pub fn geometry(&self) -> &BallGeometry {
        &self.geom
    }

    pub fn dim(&self) -> usize {
        self.geom.dim()
    }

    pub fn beta(&self) -> f64 {
        self.beta.value()
    }

    /// `βR`, the (negated) exponent of `φ`.
    pub fn beta_r(&self) -> f64 {
        self.beta.value() * self.geom.radius()
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    /// `p = 1/(βR)`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `φ` as a function of the squared distance to `x₀`.
    pub fn phi_from_sq_distance(&self, r_sq: f64) -> f64 {
        (r_sq + self.alpha_sq).powf(-self.beta_r())
    }

    pub fn phi_at_distance(&self, r: f64) -> f64 {
        self.phi_from_sq_distance(r * r)
    }

    /// `φ'(r) = −2βR r (r² + α²)^(−βR−1)`.
    pub fn dphi_at_distance(&self, r: f64) -> f64 {
        let k = self.beta_r();
        -2.0 * k * r * (r * r + self.alpha_sq).powf(-k - 1.0)
    }

    /// `Δφ` as a function of the squared distance to `x₀`, in the bracket
    /// form that is regular at `r = 0`.
    pub fn laplacian_from_sq_distance(&self, r_sq: f64) -> f64 {
        let k = self.beta_r();
        let n = self.dim() as f64;
        let s = r_sq + self.alpha_sq;
        let bracket = n - 2.0 * (k + 1.0) + (k + 1.0) * 2.0 * self.alpha_sq / s;
        -2.0 * k * s.powf(-k - 1.0) * bracket
    }

    pub fn laplacian_at_distance(&self, r: f64) -> f64 {
        self.laplacian_from_sq_distance(r * r)
    }

    /// `f(φ(r))`; `φ` is strictly positive so this never fails.
    pub fn f_of_phi_at_distance(&self, r: f64) -> f64 {
        self.f_unchecked(self.phi_at_distance(r))
    }

    /// `φ` over all of ℝⁿ without the domain check, for stencils that verify
    /// their own clearance.
    pub fn phi_field(&self) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
        move |x| self.phi_from_sq_distance(self.geom.sq_distance_to_center(x))
    }

    pub fn phi(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.geom.check_in_closed_ball(x)?;
        Ok(self.phi_from_sq_distance(self.geom.sq_distance_to_center(x)))
    }

    /// `∇φ = φ'(r)(x − x₀)/r`, written without the division so that the
    /// centre returns the zero vector.
    pub fn grad_phi(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.geom.check_in_closed_ball(x)?;
        Ok(self.grad_unchecked(x))
    }

    fn grad_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let k = self.beta_r();
        let s = self.geom.sq_distance_to_center(x) + self.alpha_sq;
        let scale = -2.0 * k * s.powf(-k - 1.0);
        x.iter()
            .zip(self.geom.center())
            .map(|(xi, ci)| scale * (xi - ci))
            .collect()
    }

    pub fn laplacian_phi(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.geom.check_in_closed_ball(x)?;
        Ok(self.laplacian_from_sq_distance(self.geom.sq_distance_to_center(x)))
    }

    /// `f(t) = c₁ t (c₂ t^p + c₃ t^(2p))` for `t > 0`.
    pub fn f_eval(&self, t: f64) -> Result<f64, ModelError> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(ModelError::NonPositiveArgument(t));
        }
        Ok(self.f_unchecked(t))
    }

    /// `f` extended by its continuous limit `f(0) = 0`. Still rejects
    /// negative arguments.
    pub fn f_continuous(&self, t: f64) -> Result<f64, ModelError> {
        if t == 0.0 {
            return Ok(0.0);
        }
        self.f_eval(t)
    }

    fn f_unchecked(&self, t: f64) -> f64 {
        let tp = t.powf(self.p);
        self.c1 * t * (self.c2 * tp + self.c3 * tp * tp)
    }

    /// `−Δφ(x) − f(φ(x))` from the closed forms.
    pub fn pde_residual(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.geom.check_in_closed_ball(x)?;
        let r_sq = self.geom.sq_distance_to_center(x);
        let lap = self.laplacian_from_sq_distance(r_sq);
        let phi = self.phi_from_sq_distance(r_sq);
        Ok(-lap - self.f_unchecked(phi))
    }

    /// `∇φ·ν + βφ` at a boundary point, `ν = x/R`. Points within
    /// [`BOUNDARY_TOL`]`·R` of the sphere are projected onto it first.
    pub fn robin_residual(&self, x: &[f64]) -> Result<f64, ModelError> {
        let xb = self.geom.project_to_boundary(x)?;
        Ok(self.normal_derivative_unchecked(&xb)
            + self.beta() * self.phi_from_sq_distance(self.geom.sq_distance_to_center(&xb)))
    }

    /// `∂φ/∂ν` at a boundary point (projected as in [`Self::robin_residual`]).
    pub fn normal_derivative(&self, x: &[f64]) -> Result<f64, ModelError> {
        let xb = self.geom.project_to_boundary(x)?;
        Ok(self.normal_derivative_unchecked(&xb))
    }

    fn normal_derivative_unchecked(&self, xb: &[f64]) -> f64 {
        dot(&self.grad_unchecked(xb), xb) / self.geom.radius()
    }
}
