use rayon::prelude::*;
use serde::Serialize;

use super::{
    boundary_points, fd_laplacian_estimate, fd_normal_derivative_estimate, sample_interior, OracleError, StencilConfig,
    NOISE_FLOOR_REL,
};
use crate::counterexample::{ConstraintClass, CounterexampleModel};
use crate::numfmt::{json_f64, json_opt_f64, json_vec_f64};

/// Default `C / scale` in the pass threshold `C·h²`, where `scale` is the
/// largest `|Δφ|` seen on the interior samples.
pub const DEFAULT_TOLERANCE_FACTOR: f64 = 100.0;

/// Closed-form PDE residual bound, relative to `max(1, |Δφ|)`.
pub const CLOSED_FORM_PDE_TOL: f64 = 1e-10;
/// Closed-form Robin residual bound, relative to `max(1, βφ)`.
pub const CLOSED_FORM_ROBIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub n: usize,
    #[serde(serialize_with = "json_f64")]
    pub radius: f64,
    #[serde(serialize_with = "json_f64")]
    pub offset: f64,
    #[serde(serialize_with = "json_f64")]
    pub beta: f64,
}

impl ParamsEcho {
    pub fn of(model: &CounterexampleModel) -> Self {
        let g = model.geometry();
        Self {
            n: g.dim(),
            radius: g.radius(),
            offset: g.offset(),
            beta: model.beta(),
        }
    }
}

/// Finite-difference audit of a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub params: ParamsEcho,
    #[serde(serialize_with = "json_f64")]
    pub h: f64,
    pub stencil_order: u32,
    pub richardson: bool,
    pub n_interior: usize,
    pub n_boundary: usize,
    /// `max |−Δ_fd φ − f(φ)|` over the interior samples.
    #[serde(serialize_with = "json_f64")]
    pub max_pde_residual_fd: f64,
    #[serde(serialize_with = "json_vec_f64")]
    pub worst_interior_point: Vec<f64>,
    /// `max |∂ν,fd φ + βφ|` over the boundary samples.
    #[serde(serialize_with = "json_f64")]
    pub max_robin_residual_fd: f64,
    #[serde(serialize_with = "json_vec_f64")]
    pub worst_boundary_point: Vec<f64>,
    #[serde(serialize_with = "json_f64")]
    pub laplacian_scale: f64,
    #[serde(serialize_with = "json_f64")]
    pub tolerance: f64,
    /// `log₂` of the residual ratio between `h` and `h/2` (plain stencil);
    /// absent when the finer residual sits at the roundoff floor.
    #[serde(serialize_with = "json_opt_f64")]
    pub observed_order: Option<f64>,
    pub pass: bool,
}

struct InteriorSample {
    residual: f64,
    residual_plain: f64,
    residual_half: f64,
    noise_half: f64,
    laplacian: f64,
}

/// [`residual_audit_with_factor`] with [`DEFAULT_TOLERANCE_FACTOR`].
pub fn residual_audit(
    model: &CounterexampleModel,
    count: usize,
    cfg: &StencilConfig,
    seed: u64,
) -> Result<ResidualReport, OracleError> {
    residual_audit_with_factor(model, count, cfg, seed, DEFAULT_TOLERANCE_FACTOR)
}

/// Checks the PDE at `count` seeded interior points (margin `3h`) and the
/// Robin condition at deterministic boundary points, using only samples of
/// `φ` and the model's `f`. Passes when both maxima are at most
/// `factor · scale · h²`.
pub fn residual_audit_with_factor(
    model: &CounterexampleModel,
    count: usize,
    cfg: &StencilConfig,
    seed: u64,
    factor: f64,
) -> Result<ResidualReport, OracleError> {
    cfg.validate()?;
    let geom = model.geometry();
    let radius = geom.radius();
    let h = cfg.h;
    let interior = sample_interior(geom, count, 3.0 * h, seed)?;
    let boundary = boundary_points(geom, count, seed);
    let phi = model.phi_field();
    let plain = StencilConfig {
        richardson: false,
        ..*cfg
    };
    let half = plain.with_step(0.5 * h);

    let samples: Vec<InteriorSample> = interior
        .par_iter()
        .map(|x| -> Result<InteriorSample, OracleError> {
            let f_phi = model.f_eval(phi(x))?;
            let coarse = fd_laplacian_estimate(&phi, radius, x, &plain)?;
            let fine = fd_laplacian_estimate(&phi, radius, x, &half)?;
            let lap = if cfg.richardson {
                (4.0 * fine.value - coarse.value) / 3.0
            } else {
                coarse.value
            };
            Ok(InteriorSample {
                residual: (-lap - f_phi).abs(),
                residual_plain: (-coarse.value - f_phi).abs(),
                residual_half: (-fine.value - f_phi).abs(),
                noise_half: fine.noise,
                laplacian: coarse.value.abs(),
            })
        })
        .collect::<Result<_, _>>()?;

    let robin: Vec<f64> = boundary
        .par_iter()
        .map(|x| -> Result<f64, OracleError> {
            let d = fd_normal_derivative_estimate(&phi, radius, x, cfg)?;
            Ok((d.value + model.beta() * phi(x)).abs())
        })
        .collect::<Result<_, _>>()?;

    let (worst_i, max_pde) = argmax(samples.iter().map(|s| s.residual));
    let (worst_b, max_robin) = argmax(robin.iter().copied());
    let scale = samples.iter().map(|s| s.laplacian).fold(0.0, f64::max);
    let tolerance = factor * scale * h * h;

    // Order from the plain stencil at h and h/2.
    let plain_max_h = samples.iter().map(|s| s.residual_plain).fold(0.0, f64::max);
    let max_half = samples.iter().map(|s| s.residual_half).fold(0.0, f64::max);
    let floor = samples
        .iter()
        .map(|s| s.noise_half)
        .fold(NOISE_FLOOR_REL * scale, f64::max);
    let observed_order = (max_half > floor && plain_max_h > floor).then(|| (plain_max_h / max_half).log2());

    Ok(ResidualReport {
        params: ParamsEcho::of(model),
        h,
        stencil_order: cfg.order.as_u32(),
        richardson: cfg.richardson,
        n_interior: interior.len(),
        n_boundary: boundary.len(),
        max_pde_residual_fd: max_pde,
        worst_interior_point: interior[worst_i].clone(),
        max_robin_residual_fd: max_robin,
        worst_boundary_point: boundary.get(worst_b).cloned().unwrap_or_default(),
        laplacian_scale: scale,
        tolerance,
        observed_order,
        pass: max_pde <= tolerance && max_robin <= tolerance,
    })
}

/// First index of the largest value; NaN wins so that it cannot hide.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v.is_nan() {
            return (i, v);
        }
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        best.1 = 0.0;
    }
    best
}

/// Closed-form residuals at the same sample locations as the audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub n_interior: usize,
    pub n_boundary: usize,
    /// `max |−Δφ − f(φ)| / max(1, |Δφ|)`.
    #[serde(serialize_with = "json_f64")]
    pub max_pde_residual: f64,
    /// `max |∂νφ + βφ| / max(1, βφ)`.
    #[serde(serialize_with = "json_f64")]
    pub max_robin_residual: f64,
    pub constraint: ConstraintClass,
    pub pass: bool,
}

pub fn closed_form_audit(
    model: &CounterexampleModel,
    count: usize,
    margin: f64,
    seed: u64,
) -> Result<ClosedFormReport, OracleError> {
    let geom = model.geometry();
    let interior = sample_interior(geom, count, margin, seed)?;
    let boundary = boundary_points(geom, count, seed);
    let mut max_pde: f64 = 0.0;
    for x in &interior {
        let scale = model.laplacian_phi(x)?.abs().max(1.0);
        max_pde = max_pde.max(model.pde_residual(x)?.abs() / scale);
    }
    let mut max_robin: f64 = 0.0;
    for x in &boundary {
        let scale = (model.beta() * model.phi(x)?).max(1.0);
        max_robin = max_robin.max(model.robin_residual(x)?.abs() / scale);
    }
    Ok(ClosedFormReport {
        n_interior: interior.len(),
        n_boundary: boundary.len(),
        max_pde_residual: max_pde,
        max_robin_residual: max_robin,
        constraint: model.constraint_class(),
        pass: max_pde <= CLOSED_FORM_PDE_TOL && max_robin <= CLOSED_FORM_ROBIN_TOL,
    })
}
