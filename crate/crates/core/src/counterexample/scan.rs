//! Sign and symmetry scans over the solution family.

use std::f64::consts::PI;

use serde::Serialize;

use super::{BallGeometry, CounterexampleModel, RobinParameter};

/// Initial grid size for [`CounterexampleModel::sign_change_scan`].
pub const SIGN_CHANGE_GRID: usize = 10_000;
/// Absolute bracket width at which sign-change bisection stops.
pub const SIGN_CHANGE_TOL: f64 = 1e-10;

/// What the closed-form constraints say about the sign of `f ∘ φ` on the
/// whole ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintClass {
    /// `β` is at or below the dimension's threshold, so `f ∘ φ ≥ 0`.
    GuaranteedNonnegative,
    /// Above threshold. The constraint is only sufficient, so nothing is
    /// claimed about the sign.
    NotGuaranteed,
    /// `n = 1`: `f ∘ φ` changes sign for every admissible `β`.
    NeverNonnegative,
}

impl ConstraintClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintClass::GuaranteedNonnegative => "GuaranteedNonnegative",
            ConstraintClass::NotGuaranteed => "NotGuaranteed",
            ConstraintClass::NeverNonnegative => "NeverNonnegative",
        }
    }
}

/// Largest `β` for which `f ∘ φ ≥ 0` is guaranteed: `(R − a)/(R(R + a))`
/// for `n = 2`, `(n − 2)/(2R)` for `n ≥ 3`, none for `n = 1`.
pub fn superharmonic_threshold(geom: &BallGeometry) -> Option<f64> {
    let r = geom.radius();
    let a = geom.offset();
    match geom.dim() {
        1 => None,
        2 => Some((r - a) / (r * (r + a))),
        n => Some((n as f64 - 2.0) / (2.0 * r)),
    }
}

/// Classifies `(geom, β)` against the superharmonic constraint (inclusive).
pub fn check_superharmonic_constraint(geom: &BallGeometry, beta: RobinParameter) -> ConstraintClass {
    match superharmonic_threshold(geom) {
        None => ConstraintClass::NeverNonnegative,
        Some(t) if beta.value() <= t => ConstraintClass::GuaranteedNonnegative,
        Some(_) => ConstraintClass::NotGuaranteed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityMinimum {
    /// Distance from `x₀` where the minimum was found.
    pub radius: f64,
    /// `min f(φ(r))` over `r ∈ [0, R + a]`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusStats {
    pub radius: f64,
    /// `max φ − min φ` over the sampled directions.
    pub spread: f64,
    /// Mean-square deviation of `φ` from its angular average.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryDiagnostics {
    pub max_asymmetry: f64,
    pub asymmetry_radius: f64,
    /// Largest per-radius variance.
    pub radial_variance: f64,
    pub is_radial: bool,
    pub tolerance: f64,
    pub per_radius: Vec<RadiusStats>,
}

impl CounterexampleModel {
    pub fn constraint_class(&self) -> ConstraintClass {
        check_superharmonic_constraint(self.geometry(), self.beta)
    }

    /// Minimum of `r ↦ f(φ(r))` on `[0, R + a]`: dense sampling followed by
    /// golden-section refinement around the best sample. The refined value
    /// is only accepted when it improves on the grid.
    pub fn nonlinearity_min_scan(&self, samples: usize) -> NonlinearityMinimum {
        let samples = samples.max(2);
        let r_max = self.geometry().max_distance();
        let step = r_max / (samples - 1) as f64;
        let grid = |i: usize| if i + 1 == samples { r_max } else { i as f64 * step };

        let (best_i, best_v) = (0..samples)
            .map(|i| (i, self.f_of_phi_at_distance(grid(i))))
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });

        let lo = grid(best_i.saturating_sub(1));
        let hi = grid((best_i + 1).min(samples - 1));
        let (r, v) = golden_section_min(|r| self.f_of_phi_at_distance(r), lo, hi, 1e-13);
        if v < best_v {
            NonlinearityMinimum { radius: r, value: v }
        } else {
            NonlinearityMinimum {
                radius: grid(best_i),
                value: best_v,
            }
        }
    }

    /// Distances `r* ∈ (0, R + a)` where `f(φ(r))` changes sign, sorted.
    pub fn sign_change_scan(&self) -> Vec<f64> {
        self.sign_change_scan_with(SIGN_CHANGE_GRID, SIGN_CHANGE_TOL)
    }

    pub fn sign_change_scan_with(&self, grid_points: usize, tol: f64) -> Vec<f64> {
        let g = |r: f64| self.f_of_phi_at_distance(r);
        let n = grid_points.max(2);
        let r_max = self.geometry().max_distance();
        let step = r_max / (n - 1) as f64;
        let rs: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { r_max } else { i as f64 * step })
            .collect();
        let vals: Vec<f64> = rs.iter().map(|&r| g(r)).collect();

        // Consecutive nonzero samples of opposite sign bracket a root; exact
        // zeros in between are resolved to the middle of the zero run.
        let nonzero: Vec<usize> = (0..n).filter(|&i| vals[i] != 0.0).collect();
        let mut roots = Vec::new();
        for w in nonzero.windows(2) {
            let (i, j) = (w[0], w[1]);
            if vals[i].signum() == vals[j].signum() {
                continue;
            }
            if j == i + 1 {
                roots.push(bisect(&g, rs[i], rs[j], vals[i], tol));
            } else {
                roots.push(0.5 * (rs[i + 1] + rs[j - 1]));
            }
        }
        roots
    }

    /// Spread of `φ` over spheres `|x| = ρ` centred at the origin.
    ///
    /// Directions: `±1` for `n = 1`; `m` equi-angular directions starting at
    /// `e₁` for `n = 2`; for `n ≥ 3` the coordinate directions `±eᵢ` plus an
    /// `m`-point Fibonacci sphere in the first three coordinates.
    pub fn asymmetry_metric(&self, radii: &[f64], directions_per_radius: usize, tolerance: f64) -> SymmetryDiagnostics {
        let dirs = sphere_directions(self.dim(), directions_per_radius.max(2));
        let x0 = self.geometry().center();
        let a_sq = self.geometry().offset_sq();

        let mut per_radius = Vec::with_capacity(radii.len());
        for &rho in radii {
            // |ρd − x₀|² = ρ² − 2ρ d·x₀ + |x₀|², exact in ρ alone when x₀ = 0.
            let values: Vec<f64> = dirs
                .iter()
                .map(|d| {
                    let proj: f64 = d.iter().zip(x0).map(|(di, ci)| di * ci).sum();
                    let r_sq = (rho * rho - 2.0 * rho * proj + a_sq).max(0.0);
                    self.phi_from_sq_distance(r_sq)
                })
                .collect();
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            // Shifted by the first sample so that equal values give exactly 0.
            let count = values.len() as f64;
            let mean_shift = values.iter().map(|v| v - values[0]).sum::<f64>() / count;
            let variance = values
                .iter()
                .map(|v| {
                    let d = v - values[0] - mean_shift;
                    d * d
                })
                .sum::<f64>()
                / count;
            per_radius.push(RadiusStats {
                radius: rho,
                spread: max - min,
                variance,
            });
        }

        let (max_asymmetry, asymmetry_radius) =
            per_radius
                .iter()
                .fold((0.0, radii.first().copied().unwrap_or(0.0)), |acc, s| {
                    if s.spread > acc.0 {
                        (s.spread, s.radius)
                    } else {
                        acc
                    }
                });
        let radial_variance = per_radius.iter().map(|s| s.variance).fold(0.0, f64::max);
        SymmetryDiagnostics {
            max_asymmetry,
            asymmetry_radius,
            radial_variance,
            is_radial: max_asymmetry <= tolerance,
            tolerance,
            per_radius,
        }
    }
}

/// Unit directions used by [`CounterexampleModel::asymmetry_metric`].
pub(crate) fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        n => {
            let mut dirs = Vec::with_capacity(count + 2 * n);
            for axis in 0..n {
                for sign in [1.0, -1.0] {
                    let mut d = vec![0.0; n];
                    d[axis] = sign;
                    dirs.push(d);
                }
            }
            for p in fibonacci_sphere(count) {
                let mut d = vec![0.0; n];
                d[..3].copy_from_slice(&p);
                dirs.push(d);
            }
            dirs
        }
    }
}

/// `count` quasi-uniform points on the unit 2-sphere, polar axis `e₁`.
pub(crate) fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden_angle * k as f64;
            [z, rho * t.cos(), rho * t.sin()]
        })
        .collect()
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut g_lo: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_section_min(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    let candidates = [(lo, g(lo)), (x1, g1), (x2, g2), (hi, g(hi))];
    candidates
        .into_iter()
        .fold((lo, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
}
