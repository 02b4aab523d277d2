use super::ModelError;

/// Points within this fraction of `R` outside the sphere still count as
/// belonging to the closed ball, and are snapped onto `∂B_R` for boundary
/// evaluations.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// The ball `B_R ⊂ ℝⁿ` centred at the origin, together with the offset
/// centre `x₀` about which the solution is radial.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGeometry {
    radius: f64,
    center: Vec<f64>,
    offset: f64,
    offset_sq: f64,
}

impl BallGeometry {
    /// Builds the geometry from the ball radius and the offset centre. The
    /// dimension is the length of `center`.
    pub fn new(radius: f64, center: Vec<f64>) -> Result<Self, ModelError> {
        if center.is_empty() {
            return Err(ModelError::ZeroDimension);
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(ModelError::NonPositiveRadius(radius));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFiniteCenter);
        }
        let offset_sq: f64 = center.iter().map(|c| c * c).sum();
        let offset = offset_sq.sqrt();
        if offset >= radius {
            return Err(ModelError::OffsetOutsideBall { offset, radius });
        }
        Ok(Self {
            radius,
            center,
            offset,
            offset_sq,
        })
    }

    /// Geometry with `x₀ = offset · e₁`.
    pub fn on_axis(dim: usize, radius: f64, offset: f64) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        let mut center = vec![0.0; dim];
        center[0] = offset;
        Self::new(radius, center)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The offset centre `x₀`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `a = |x₀|`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `|x₀|²` summed from the coordinates.
    pub fn offset_sq(&self) -> f64 {
        self.offset_sq
    }

    /// `α² = R² − a²`, strictly positive.
    pub fn alpha_sq(&self) -> f64 {
        (self.radius - self.offset) * (self.radius + self.offset)
    }

    /// Largest distance from `x₀` to a point of the closed ball, `R + a`.
    pub fn max_distance(&self) -> f64 {
        self.radius + self.offset
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Rejects points outside the closed ball (with [`BOUNDARY_TOL`] slack).
    pub fn check_in_closed_ball(&self, x: &[f64]) -> Result<(), ModelError> {
        self.check_dim(x)?;
        let norm = norm(x);
        if !(norm <= self.radius * (1.0 + BOUNDARY_TOL)) {
            return Err(ModelError::OutsideBall {
                norm,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// Radially projects a near-boundary point onto `∂B_R`.
    pub fn project_to_boundary(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        let norm = norm(x);
        if !((norm - self.radius).abs() <= BOUNDARY_TOL * self.radius) || norm == 0.0 {
            return Err(ModelError::NotOnBoundary {
                norm,
                radius: self.radius,
            });
        }
        let scale = self.radius / norm;
        Ok(x.iter().map(|xi| xi * scale).collect())
    }

    /// `|x − x₀|²`.
    pub fn sq_distance_to_center(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum()
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Boundary parameter `β` in `∂u/∂ν + βu = 0`. Scales as 1/length.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RobinParameter(f64);

impl RobinParameter {
    pub fn new(beta: f64) -> Result<Self, ModelError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(ModelError::NonPositiveBeta(beta));
        }
        Ok(Self(beta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry_with_distinct_codes() {
        let e1 = BallGeometry::new(1.0, vec![1.5, 0.0]).unwrap_err();
        let e2 = BallGeometry::new(0.0, vec![0.0]).unwrap_err();
        let e3 = RobinParameter::new(0.0).unwrap_err();
        let e4 = BallGeometry::new(1.0, vec![]).unwrap_err();
        let codes = [e1.code(), e2.code(), e3.code(), e4.code()];
        for (i, a) in codes.iter().enumerate() {
            for b in &codes[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(matches!(e1, ModelError::OffsetOutsideBall { .. }));
    }

    #[test]
    fn offset_on_sphere_is_rejected() {
        assert!(BallGeometry::on_axis(2, 1.0, 1.0).is_err());
        assert!(BallGeometry::on_axis(2, 1.0, -1.0).is_err());
        assert!(BallGeometry::on_axis(2, 1.0, 0.999).is_ok());
    }

    #[test]
    fn alpha_sq_canonical() {
        let g = BallGeometry::on_axis(2, 1.0, 0.5).unwrap();
        assert_eq!(g.alpha_sq(), 0.75);
        assert_eq!(g.offset(), 0.5);
        assert_eq!(g.max_distance(), 1.5);
    }

    #[test]
    fn projection_snaps_and_rejects() {
        let g = BallGeometry::on_axis(2, 2.0, 0.5).unwrap();
        let p = g.project_to_boundary(&[2.0 + 1e-12, 0.0]).unwrap();
        assert_eq!(p, vec![2.0, 0.0]);
        assert!(matches!(
            g.project_to_boundary(&[1.9, 0.0]),
            Err(ModelError::NotOnBoundary { .. })
        ));
        assert!(matches!(
            g.check_in_closed_ball(&[0.0, 2.1]),
            Err(ModelError::OutsideBall { .. })
        ));
        assert!(matches!(
            g.check_in_closed_ball(&[0.0]),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nan_beta_rejected() {
        assert!(RobinParameter::new(f64::NAN).is_err());
        assert!(RobinParameter::new(-1.0).is_err());
    }
}
