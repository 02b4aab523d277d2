//! Finite-difference oracle.
//!
//! Everything here works from point samples of a scalar field and the ball
//! radius; no closed-form derivative is consulted, except as the reference
//! value handed to [`convergence_order`].

mod audit;
mod sampling;

use thiserror::Error;

use crate::counterexample::{norm, ModelError, BOUNDARY_TOL};

pub use audit::{
    closed_form_audit, residual_audit, residual_audit_with_factor, ClosedFormReport, ParamsEcho, ResidualReport,
    DEFAULT_TOLERANCE_FACTOR,
};
pub use sampling::{boundary_points, sample_interior};

/// Differences whose magnitude is below this fraction of the reference value
/// are treated as roundoff.
pub const NOISE_FLOOR_REL: f64 = 1e-13;

/// Multiplier on `ε · Σ|wᵢ fᵢ|`, the roundoff level of a stencil sum.
const ROUNDOFF_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step h must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("stencil point {point:?} (offset {offset:+e} along {direction}) leaves the ball of radius {radius}")]
    StencilExitsBall {
        point: Vec<f64>,
        direction: String,
        offset: f64,
        radius: f64,
    },
    #[error("sampling margin {margin} leaves no room inside the ball of radius {radius}")]
    EmptyDomain { margin: f64, radius: f64 },
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("point at distance {norm} is not on the sphere of radius {radius}")]
    NotOnBoundary { norm: f64, radius: f64 },
    #[error("stencil order must be 2 or 4, got {0}")]
    UnsupportedOrder(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

impl TryFrom<u32> for StencilOrder {
    type Error = OracleError;

    fn try_from(v: u32) -> Result<Self, Self::Error> {
        match v {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            other => Err(OracleError::UnsupportedOrder(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConfig {
    pub h: f64,
    /// Combine the `h` and `h/2` estimates as `(4·D(h/2) − D(h))/3`.
    pub richardson: bool,
    pub order: StencilOrder,
}

impl StencilConfig {
    pub fn new(h: f64, order: StencilOrder, richardson: bool) -> Result<Self, OracleError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(OracleError::InvalidStep(h));
        }
        Ok(Self { h, richardson, order })
    }

    pub fn second_order(h: f64) -> Result<Self, OracleError> {
        Self::new(h, StencilOrder::Second, false)
    }

    pub fn with_step(self, h: f64) -> Self {
        Self { h, ..self }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(OracleError::InvalidStep(self.h));
        }
        Ok(())
    }
}

/// A stencil estimate and the roundoff level of the sum that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub noise: f64,
}

/// Central-difference Laplacian of `field` at `x`.
pub fn fd_laplacian<F>(field: F, radius: f64, x: &[f64], cfg: &StencilConfig) -> Result<f64, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    fd_laplacian_estimate(&field, radius, x, cfg).map(|e| e.value)
}

pub fn fd_laplacian_estimate<F>(field: &F, radius: f64, x: &[f64], cfg: &StencilConfig) -> Result<Estimate, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let reach = match cfg.order {
        StencilOrder::Second => 1,
        StencilOrder::Fourth => 2,
    };
    check_axis_clearance(radius, x, cfg.h, reach)?;
    let coarse = laplacian_once(field, x, cfg.h, cfg.order);
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = laplacian_once(field, x, 0.5 * cfg.h, cfg.order);
    Ok(richardson(coarse, fine))
}

/// Outward normal derivative at a boundary point from a one-sided stencil
/// along `−ν`: 3 points for order 2, 5 points for order 4.
pub fn fd_normal_derivative<F>(field: F, radius: f64, x: &[f64], cfg: &StencilConfig) -> Result<f64, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    fd_normal_derivative_estimate(&field, radius, x, cfg).map(|e| e.value)
}

pub fn fd_normal_derivative_estimate<F>(
    field: &F,
    radius: f64,
    x: &[f64],
    cfg: &StencilConfig,
) -> Result<Estimate, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let len = norm(x);
    if !((len - radius).abs() <= BOUNDARY_TOL * radius) || len == 0.0 {
        return Err(OracleError::NotOnBoundary { norm: len, radius });
    }
    let nu: Vec<f64> = x.iter().map(|v| v / len).collect();
    let xb: Vec<f64> = nu.iter().map(|v| v * radius).collect();
    let reach = match cfg.order {
        StencilOrder::Second => 2.0,
        StencilOrder::Fourth => 4.0,
    };
    // The inward chord through the ball has length 2R.
    if reach * cfg.h >= 2.0 * radius {
        let offset = -reach * cfg.h;
        return Err(OracleError::StencilExitsBall {
            point: xb.iter().zip(&nu).map(|(p, n)| p + offset * n).collect(),
            direction: "-nu".to_string(),
            offset,
            radius,
        });
    }
    let coarse = normal_once(field, &xb, &nu, cfg.h, cfg.order);
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = normal_once(field, &xb, &nu, 0.5 * cfg.h, cfg.order);
    Ok(richardson(coarse, fine))
}

/// Outcome of a three-level refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// `log₂(|e(h)| / |e(h/2)|)`.
    Observed { order: f64, errors: [f64; 3] },
    /// At least one error is at the roundoff floor; no order is reported.
    Indeterminate { errors: [f64; 3], floors: [f64; 3] },
}

impl OrderEstimate {
    pub fn order(&self) -> Option<f64> {
        match self {
            OrderEstimate::Observed { order, .. } => Some(*order),
            OrderEstimate::Indeterminate { .. } => None,
        }
    }
}

/// Observed convergence order of the Laplacian stencil at `x` against a
/// closed-form `reference`, using spacings `h`, `h/2`, `h/4` with
/// `h = cfg.h`.
pub fn convergence_order<F>(
    field: F,
    radius: f64,
    x: &[f64],
    cfg: &StencilConfig,
    reference: f64,
) -> Result<OrderEstimate, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    let mut errors = [0.0; 3];
    let mut floors = [0.0; 3];
    let rel_floor = NOISE_FLOOR_REL * reference.abs();
    for (k, scale) in [1.0, 0.5, 0.25].into_iter().enumerate() {
        let est = fd_laplacian_estimate(&field, radius, x, &cfg.with_step(cfg.h * scale))?;
        errors[k] = (est.value - reference).abs();
        floors[k] = est.noise.max(rel_floor);
    }
    if errors.iter().zip(&floors).any(|(e, f)| !(e > f)) {
        return Ok(OrderEstimate::Indeterminate { errors, floors });
    }
    Ok(OrderEstimate::Observed {
        order: (errors[0] / errors[1]).log2(),
        errors,
    })
}

fn richardson(coarse: Estimate, fine: Estimate) -> Estimate {
    Estimate {
        value: (4.0 * fine.value - coarse.value) / 3.0,
        noise: (4.0 * fine.noise + coarse.noise) / 3.0,
    }
}

fn check_axis_clearance(radius: f64, x: &[f64], h: f64, reach: i32) -> Result<(), OracleError> {
    let limit = radius * (1.0 + BOUNDARY_TOL);
    let mut p = x.to_vec();
    for axis in 0..x.len() {
        for k in (-reach..=reach).filter(|k| *k != 0) {
            let offset = k as f64 * h;
            p[axis] = x[axis] + offset;
            if !(norm(&p) <= limit) {
                return Err(OracleError::StencilExitsBall {
                    point: p,
                    direction: format!("e{}", axis + 1),
                    offset,
                    radius,
                });
            }
        }
        p[axis] = x[axis];
    }
    Ok(())
}

fn laplacian_once<F>(field: &F, x: &[f64], h: f64, order: StencilOrder) -> Estimate
where
    F: Fn(&[f64]) -> f64,
{
    let (offsets, weights, denom): (&[f64], &[f64], f64) = match order {
        StencilOrder::Second => (&[-1.0, 1.0], &[1.0, 1.0], 1.0),
        StencilOrder::Fourth => (&[-2.0, -1.0, 1.0, 2.0], &[-1.0, 16.0, 16.0, -1.0], 12.0),
    };
    let center_weight = match order {
        StencilOrder::Second => -2.0,
        StencilOrder::Fourth => -30.0,
    };
    let f0 = field(x);
    let inv = 1.0 / (denom * h * h);
    let mut p = x.to_vec();
    // Weights sum to zero, so differencing against f0 keeps constants exact.
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for axis in 0..x.len() {
        let mut axis_sum = 0.0;
        abs_sum += (center_weight * f0).abs();
        for (&k, &w) in offsets.iter().zip(weights) {
            p[axis] = x[axis] + k * h;
            let fk = field(&p);
            axis_sum += w * (fk - f0);
            abs_sum += (w * fk).abs();
        }
        p[axis] = x[axis];
        sum += axis_sum;
    }
    Estimate {
        value: sum * inv,
        noise: ROUNDOFF_FACTOR * f64::EPSILON * abs_sum * inv,
    }
}

fn normal_once<F>(field: &F, xb: &[f64], nu: &[f64], h: f64, order: StencilOrder) -> Estimate
where
    F: Fn(&[f64]) -> f64,
{
    // d/dν f(xb) ≈ Σ_k w_k f(xb − k h ν) / h
    let weights: &[f64] = match order {
        StencilOrder::Second => &[1.5, -2.0, 0.5],
        StencilOrder::Fourth => &[25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 0.25],
    };
    let f0 = field(xb);
    let mut sum = 0.0;
    let mut abs_sum = (weights[0] * f0).abs();
    for (k, &w) in weights.iter().enumerate().skip(1) {
        let p: Vec<f64> = xb.iter().zip(nu).map(|(x, n)| x - k as f64 * h * n).collect();
        let fk = field(&p);
        sum += w * (fk - f0);
        abs_sum += (w * fk).abs();
    }
    Estimate {
        value: sum / h,
        noise: ROUNDOFF_FACTOR * f64::EPSILON * abs_sum / h,
    }
}
