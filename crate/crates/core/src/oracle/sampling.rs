use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::OracleError;
use crate::counterexample::{fibonacci_sphere, BallGeometry};

/// `count` seeded points, uniform in the ball `|x| ≤ R − margin`.
pub fn sample_interior(
    geom: &BallGeometry,
    count: usize,
    margin: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>, OracleError> {
    let radius = geom.radius();
    if !(margin >= 0.0 && margin < radius) {
        return Err(OracleError::EmptyDomain { margin, radius });
    }
    if count == 0 {
        return Err(OracleError::EmptySample);
    }
    let inner = radius - margin;
    let n = geom.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| {
            if n == 1 {
                return vec![inner * (2.0 * rng.random::<f64>() - 1.0)];
            }
            let dir = random_direction(&mut rng, n);
            let rho = inner * rng.random::<f64>().powf(1.0 / n as f64);
            dir.into_iter().map(|d| d * rho).collect()
        })
        .collect();
    Ok(points)
}

/// Deterministic points on `∂B_R`: `±R` for `n = 1`, `count` equi-angular
/// points for `n = 2`, a Fibonacci sphere for `n = 3`. For `n ≥ 4` the
/// directions are drawn from `seed`.
pub fn boundary_points(geom: &BallGeometry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let r = geom.radius();
    match geom.dim() {
        1 => vec![vec![-r], vec![r]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(count)
            .into_iter()
            .map(|p| p.iter().map(|v| r * v).collect())
            .collect(),
        n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            (0..count)
                .map(|_| random_direction(&mut rng, n).into_iter().map(|d| r * d).collect())
                .collect()
        }
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn interior_points_respect_margin_and_seed() {
        let g = BallGeometry::on_axis(2, 1.0, 0.5).unwrap();
        let pts = sample_interior(&g, 100, 0.01, 7).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|p| norm(p) <= 0.99));
        assert_eq!(pts, sample_interior(&g, 100, 0.01, 7).unwrap());
        assert_ne!(pts, sample_interior(&g, 100, 0.01, 8).unwrap());
    }

    #[test]
    fn empty_domain_and_empty_sample() {
        let g = BallGeometry::on_axis(2, 1.0, 0.5).unwrap();
        assert!(matches!(
            sample_interior(&g, 10, 1.5, 0),
            Err(OracleError::EmptyDomain { .. })
        ));
        assert!(matches!(
            sample_interior(&g, 10, 1.0, 0),
            Err(OracleError::EmptyDomain { .. })
        ));
        assert!(matches!(sample_interior(&g, 0, 0.1, 0), Err(OracleError::EmptySample)));
    }

    #[test]
    fn single_point_is_deterministic() {
        let g = BallGeometry::on_axis(3, 2.0, 0.1).unwrap();
        let a = sample_interior(&g, 1, 0.1, 42).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a, sample_interior(&g, 1, 0.1, 42).unwrap());
    }

    #[test]
    fn one_dimensional_interior() {
        let g = BallGeometry::on_axis(1, 1.0, 0.5).unwrap();
        let pts = sample_interior(&g, 500, 0.2, 1).unwrap();
        assert!(pts.iter().all(|p| p.len() == 1 && p[0].abs() <= 0.8));
        assert!(pts.iter().any(|p| p[0] < -0.5) && pts.iter().any(|p| p[0] > 0.5));
    }

    #[test]
    fn boundary_points_lie_on_sphere() {
        for n in 1..=5 {
            let g = BallGeometry::on_axis(n, 1.7, 0.2).unwrap();
            let pts = boundary_points(&g, 64, 3);
            assert!(!pts.is_empty());
            for p in &pts {
                assert_eq!(p.len(), n);
                assert!((norm(p) - 1.7).abs() < 1e-12);
            }
        }
    }
}
