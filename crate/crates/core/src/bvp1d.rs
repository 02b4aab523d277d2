//! `−u'' = f(u)` on `(−R, R)` with `∂u/∂ν + βu = 0` at `x = ±R`.
//!
//! The outward normal is `−1` at `−R` and `+1` at `R`, so the conditions read
//! `−u'(−R) + βu(−R) = 0` and `u'(R) + βu(R) = 0`. The solver shoots from the
//! left end: for a trial `s = u(−R)` the left condition fixes `u'(−R) = βs`,
//! the ODE is integrated with classical RK4 and Newton drives
//! `g(s) = u'(R) + βu(R)` to zero. Nonlinear problems can have several
//! solutions; the returned one is whichever lies in the basin of the seed.

use serde::Serialize;
use thiserror::Error;

use crate::numfmt::{json_f64, json_vec_f64};

pub const DEFAULT_STEPS: usize = 2000;
pub const MAX_NEWTON_ITERS: usize = 50;
pub const BLOWUP: f64 = 1e12;
/// Number of extra points at which `f` is probed on `[min u, max u]` when
/// checking the nonnegativity hypothesis.
pub const HYPOTHESIS_PROBES: usize = 1001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Bvp1dError {
    #[error("half-length R must be positive and finite, got {0}")]
    InvalidHalfLength(f64),
    #[error("Robin parameter beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("initial guess must be finite, got {0}")]
    InvalidGuess(f64),
    #[error("need at least 2 integration steps, got {0}")]
    TooFewSteps(usize),
    #[error("Newton did not converge after {iterations} iterations (last u(-R) = {shooting_param}, residual {last_residual:e})")]
    NoConvergence {
        iterations: usize,
        shooting_param: f64,
        last_residual: f64,
    },
    #[error("integration blew up at x = {x} (u = {u:e}) for u(-R) = {shooting_param}")]
    Divergence { x: f64, u: f64, shooting_param: f64 },
    #[error("problem does not claim f >= 0")]
    HypothesisNotClaimed,
    #[error("f({at}) = {value:e} < 0 on the solution range")]
    NegativeNonlinearity { at: f64, value: f64 },
    #[error("f vanishes identically on the solution range")]
    TrivialNonlinearity,
}

pub struct Bvp1dProblem<F> {
    half_length: f64,
    beta: f64,
    f: F,
    claims_nonnegative: bool,
}

impl<F: Fn(f64) -> f64> Bvp1dProblem<F> {
    pub fn new(half_length: f64, beta: f64, f: F) -> Result<Self, Bvp1dError> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Bvp1dError::InvalidHalfLength(half_length));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Bvp1dError::InvalidBeta(beta));
        }
        Ok(Self {
            half_length,
            beta,
            f,
            claims_nonnegative: false,
        })
    }

    /// Marks `f` as nonnegative on ℝ, the precondition of
    /// [`verify_symmetry_theorem`].
    pub fn claiming_nonnegative(mut self) -> Self {
        self.claims_nonnegative = true;
        self
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn claims_nonnegative(&self) -> bool {
        self.claims_nonnegative
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bvp1dSolution {
    #[serde(serialize_with = "json_vec_f64")]
    pub nodes: Vec<f64>,
    #[serde(serialize_with = "json_vec_f64")]
    pub u: Vec<f64>,
    #[serde(serialize_with = "json_vec_f64")]
    pub du: Vec<f64>,
    /// Converged `u(−R)`.
    #[serde(serialize_with = "json_f64")]
    pub shooting_param: f64,
    pub newton_iters: usize,
    /// `(−u'(−R) + βu(−R), u'(R) + βu(R))`.
    #[serde(serialize_with = "json_pair")]
    pub bc_residuals: (f64, f64),
}

fn json_pair<S: serde::Serializer>(p: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    json_vec_f64(&[p.0, p.1], s)
}

impl Bvp1dSolution {
    /// Cubic Hermite interpolant of `u` built from the stored `u` and `u'`.
    /// Abscissae outside `[−R, R]` are clamped to the nearest end.
    pub fn eval(&self, x: f64) -> f64 {
        let nodes = &self.nodes;
        let last = nodes.len() - 1;
        let x = x.clamp(nodes[0], nodes[last]);
        let k = match nodes.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.u[i],
            Err(i) => i.clamp(1, last) - 1,
        };
        let h = nodes[k + 1] - nodes[k];
        let t = (x - nodes[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[k]
            + (t3 - 2.0 * t2 + t) * h * self.du[k]
            + (-2.0 * t3 + 3.0 * t2) * self.u[k + 1]
            + (t3 - t2) * h * self.du[k + 1]
    }

    pub fn half_length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

/// [`solve_with_steps`] with [`DEFAULT_STEPS`] RK4 steps.
pub fn solve<F: Fn(f64) -> f64>(
    problem: &Bvp1dProblem<F>,
    init_guess: f64,
    tol: f64,
) -> Result<Bvp1dSolution, Bvp1dError> {
    solve_with_steps(problem, init_guess, tol, DEFAULT_STEPS)
}

/// Shooting solve with `steps` uniform RK4 steps (`steps + 1` nodes).
pub fn solve_with_steps<F: Fn(f64) -> f64>(
    problem: &Bvp1dProblem<F>,
    init_guess: f64,
    tol: f64,
    steps: usize,
) -> Result<Bvp1dSolution, Bvp1dError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Bvp1dError::InvalidTolerance(tol));
    }
    if !init_guess.is_finite() {
        return Err(Bvp1dError::InvalidGuess(init_guess));
    }
    if steps < 2 {
        return Err(Bvp1dError::TooFewSteps(steps));
    }
    let nodes = symmetric_nodes(problem.half_length, steps);
    let beta = problem.beta;
    let mismatch = |s: f64| -> Result<f64, Bvp1dError> {
        let (u, du) = integrate(problem, &nodes, s, None)?;
        Ok(du + beta * u)
    };

    let mut s = init_guess;
    let mut g = mismatch(s)?;
    let mut iters = 0;
    while !(g.abs() <= tol) {
        if iters == MAX_NEWTON_ITERS {
            return Err(Bvp1dError::NoConvergence {
                iterations: iters,
                shooting_param: s,
                last_residual: g,
            });
        }
        let ds = 1e-7f64.max(1e-7 * s.abs());
        let slope = (mismatch(s + ds)? - g) / ds;
        let next = s - g / slope;
        if !next.is_finite() {
            return Err(Bvp1dError::NoConvergence {
                iterations: iters,
                shooting_param: s,
                last_residual: g,
            });
        }
        s = next;
        g = mismatch(s)?;
        iters += 1;
    }

    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    let (u_end, du_end) = integrate(problem, &nodes, s, Some((&mut u, &mut du)))?;
    Ok(Bvp1dSolution {
        shooting_param: s,
        newton_iters: iters,
        bc_residuals: (-du[0] + beta * u[0], du_end + beta * u_end),
        nodes,
        u,
        du,
    })
}

/// `R(2i − N)/N`; mirrored nodes are exact negatives of each other.
fn symmetric_nodes(half_length: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| half_length * ((2 * i) as f64 - steps as f64) / steps as f64)
        .collect()
}

type Trace<'a> = Option<(&'a mut Vec<f64>, &'a mut Vec<f64>)>;

fn integrate<F: Fn(f64) -> f64>(
    problem: &Bvp1dProblem<F>,
    nodes: &[f64],
    s: f64,
    mut trace: Trace<'_>,
) -> Result<(f64, f64), Bvp1dError> {
    let f = |u: f64| (problem.f)(u);
    let mut u = s;
    let mut v = problem.beta * s;
    if let Some((us, vs)) = trace.as_mut() {
        us.push(u);
        vs.push(v);
    }
    for w in nodes.windows(2) {
        let h = w[1] - w[0];
        // y = (u, u'), y' = (u', −f(u))
        let (k1u, k1v) = (v, -f(u));
        let (k2u, k2v) = (v + 0.5 * h * k1v, -f(u + 0.5 * h * k1u));
        let (k3u, k3v) = (v + 0.5 * h * k2v, -f(u + 0.5 * h * k2u));
        let (k4u, k4v) = (v + h * k3v, -f(u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(u.abs() <= BLOWUP && v.is_finite()) {
            return Err(Bvp1dError::Divergence {
                x: w[1],
                u,
                shooting_param: s,
            });
        }
        if let Some((us, vs)) = trace.as_mut() {
            us.push(u);
            vs.push(v);
        }
    }
    Ok((u, v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport1d {
    /// `max |u(x) − u(−x)|` over the nodes.
    #[serde(serialize_with = "json_f64")]
    pub symmetry_defect: f64,
    /// `|u(R) − u(−R)|`.
    #[serde(serialize_with = "json_f64")]
    pub endpoint_defect: f64,
    #[serde(serialize_with = "json_f64")]
    pub min_value: f64,
    #[serde(serialize_with = "json_f64")]
    pub max_value: f64,
    #[serde(serialize_with = "json_f64")]
    pub argmax: f64,
    /// `u' < 0` at every node in `(0, R]`.
    pub monotone_decreasing_right: bool,
    /// `min u > 0`.
    pub positive: bool,
}

pub fn diagnose(solution: &Bvp1dSolution) -> SymmetryReport1d {
    let symmetry_defect = solution
        .nodes
        .iter()
        .zip(&solution.u)
        .map(|(&x, &u)| (u - solution.eval(-x)).abs())
        .fold(0.0, f64::max);
    let (argmax_i, max_value) =
        solution.u.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let min_value = solution.u.iter().copied().fold(f64::INFINITY, f64::min);
    let monotone_decreasing_right = solution
        .nodes
        .iter()
        .zip(&solution.du)
        .filter(|(x, _)| **x > 0.0)
        .all(|(_, d)| *d < 0.0);
    let last = solution.u.len() - 1;
    SymmetryReport1d {
        symmetry_defect,
        endpoint_defect: (solution.u[last] - solution.u[0]).abs(),
        min_value,
        max_value,
        argmax: solution.nodes[argmax_i],
        monotone_decreasing_right,
        positive: min_value > 0.0,
    }
}

/// Result of checking the 1D symmetry conclusions on a computed solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryTheoremCheck {
    pub report: SymmetryReport1d,
    #[serde(serialize_with = "json_f64")]
    pub shooting_param: f64,
    pub even: bool,
    pub positive: bool,
    pub monotone: bool,
    pub pass: bool,
}

/// Solves a problem whose `f` is claimed nonnegative and checks evenness
/// (defect `≤ symmetry_tol`), positivity, and `u' < 0` on `(0, R]`.
///
/// The claim is spot-checked by probing `f` at the nodes' values and on a
/// uniform grid over `[min u, max u]`; a negative value, or `f ≡ 0` there,
/// is reported as a hypothesis violation.
pub fn verify_symmetry_theorem<F: Fn(f64) -> f64>(
    problem: &Bvp1dProblem<F>,
    init_guess: f64,
    tol: f64,
    symmetry_tol: f64,
) -> Result<SymmetryTheoremCheck, Bvp1dError> {
    if !problem.claims_nonnegative {
        return Err(Bvp1dError::HypothesisNotClaimed);
    }
    let solution = solve(problem, init_guess, tol)?;
    let report = diagnose(&solution);
    check_nonnegative_on_range(problem, &solution, report.min_value, report.max_value)?;
    let even = report.symmetry_defect <= symmetry_tol;
    let positive = report.positive;
    let monotone = report.monotone_decreasing_right;
    Ok(SymmetryTheoremCheck {
        shooting_param: solution.shooting_param,
        even,
        positive,
        monotone,
        pass: even && positive && monotone,
        report,
    })
}

fn check_nonnegative_on_range<F: Fn(f64) -> f64>(
    problem: &Bvp1dProblem<F>,
    solution: &Bvp1dSolution,
    lo: f64,
    hi: f64,
) -> Result<(), Bvp1dError> {
    let grid = (0..HYPOTHESIS_PROBES).map(|i| lo + (hi - lo) * i as f64 / (HYPOTHESIS_PROBES - 1) as f64);
    let mut any_nonzero = false;
    for u in solution.u.iter().copied().chain(grid) {
        let value = problem.f(u);
        if value < 0.0 {
            return Err(Bvp1dError::NegativeNonlinearity { at: u, value });
        }
        any_nonzero |= value != 0.0;
    }
    if !any_nonzero {
        return Err(Bvp1dError::TrivialNonlinearity);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n1_f(u: f64) -> f64 {
        6.0 * u * u * (u - 1.0)
    }

    fn n1_phi(x: f64) -> f64 {
        1.0 / ((x - 0.5) * (x - 0.5) + 0.75)
    }

    #[test]
    fn constant_source_matches_quadratic() {
        let p = Bvp1dProblem::new(1.0, 1.0, |_| 1.0).unwrap();
        let sol = solve(&p, 1.0, 1e-12).unwrap();
        for (x, u) in sol.nodes.iter().zip(&sol.u) {
            assert!((u - (1.5 - 0.5 * x * x)).abs() < 1e-10);
        }
        assert!((sol.eval(0.0) - 1.5).abs() < 1e-10);
        assert!((sol.du[sol.du.len() - 1] + 1.0).abs() < 1e-10);
        assert!(sol.bc_residuals.0.abs() <= 1e-12 && sol.bc_residuals.1.abs() <= 1e-12);
    }

    #[test]
    fn zero_source_gives_zero() {
        let p = Bvp1dProblem::new(1.0, 1.0, |_| 0.0).unwrap();
        let sol = solve(&p, 0.5, 1e-12).unwrap();
        assert!(sol.u.iter().all(|u| u.abs() < 1e-12));
        let r = diagnose(&sol);
        assert!(!r.positive);
        assert!(r.symmetry_defect < 1e-12);
    }

    #[test]
    fn sign_changing_source_reproduces_asymmetric_solution() {
        let p = Bvp1dProblem::new(1.0, 1.0, n1_f).unwrap();
        let sol = solve(&p, 1.0 / 3.0, 1e-12).unwrap();
        let err = sol
            .nodes
            .iter()
            .zip(&sol.u)
            .map(|(&x, &u)| (u - n1_phi(x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let r = diagnose(&sol);
        assert!((r.endpoint_defect - 2.0 / 3.0).abs() < 1e-6);
        // φ(x) − φ(−x) = 2x/(x⁴ + x² + 1) peaks inside the interval.
        let sup = sol
            .nodes
            .iter()
            .map(|&x| (n1_phi(x) - n1_phi(-x)).abs())
            .fold(0.0, f64::max);
        assert!((r.symmetry_defect - sup).abs() < 1e-6);
        assert!(r.symmetry_defect > 0.8);
    }

    #[test]
    fn nodes_are_mirror_exact() {
        let nodes = symmetric_nodes(1.3, 2000);
        assert_eq!(nodes[0], -1.3);
        assert_eq!(nodes[2000], 1.3);
        assert_eq!(nodes[1000], 0.0);
        for i in 0..=2000 {
            assert_eq!(nodes[i], -nodes[2000 - i]);
        }
    }

    #[test]
    fn hermite_interpolation_is_exact_for_cubics() {
        let nodes = symmetric_nodes(1.0, 10);
        let u: Vec<f64> = nodes.iter().map(|x| x * x * x - x).collect();
        let du: Vec<f64> = nodes.iter().map(|x| 3.0 * x * x - 1.0).collect();
        let sol = Bvp1dSolution {
            nodes,
            u,
            du,
            shooting_param: 0.0,
            newton_iters: 0,
            bc_residuals: (0.0, 0.0),
        };
        for x in [-0.97, -0.33, 0.01, 0.55, 0.999] {
            assert!((sol.eval(x) - (x * x * x - x)).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            Bvp1dProblem::new(0.0, 1.0, |_| 1.0),
            Err(Bvp1dError::InvalidHalfLength(_))
        ));
        assert!(matches!(
            Bvp1dProblem::new(1.0, -1.0, |_| 1.0),
            Err(Bvp1dError::InvalidBeta(_))
        ));
        let p = Bvp1dProblem::new(1.0, 1.0, |_| 1.0).unwrap();
        assert!(matches!(solve(&p, 1.0, 0.0), Err(Bvp1dError::InvalidTolerance(_))));
        assert!(matches!(solve(&p, f64::NAN, 1e-8), Err(Bvp1dError::InvalidGuess(_))));
    }

    #[test]
    fn blow_up_is_reported() {
        let p = Bvp1dProblem::new(5.0, 1.0, |u: f64| -u.powi(3)).unwrap();
        assert!(matches!(solve(&p, 10.0, 1e-10), Err(Bvp1dError::Divergence { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        // Bratu-type source far above the fold: no solution exists.
        let p = Bvp1dProblem::new(1.0, 1.0, |u: f64| 10.0 * u.exp()).unwrap();
        match solve(&p, 0.0, 1e-12) {
            Err(Bvp1dError::NoConvergence { iterations, .. }) => assert!(iterations <= MAX_NEWTON_ITERS),
            Err(Bvp1dError::Divergence { .. }) => {}
            other => panic!("expected a solver failure, got {other:?}"),
        }
    }

    #[test]
    fn theorem_check_examples() {
        let p = Bvp1dProblem::new(1.0, 1.0, |_| 1.0).unwrap().claiming_nonnegative();
        assert!(verify_symmetry_theorem(&p, 1.0, 1e-12, 1e-8).unwrap().pass);

        let sq = Bvp1dProblem::new(1.0, 0.5, |u: f64| u.max(0.0).powi(2))
            .unwrap()
            .claiming_nonnegative();
        let check = verify_symmetry_theorem(&sq, 0.5, 1e-12, 1e-6).unwrap();
        assert!(check.pass, "{check:?}");
        assert!(check.shooting_param > 0.1);

        let bad = Bvp1dProblem::new(1.0, 1.0, n1_f).unwrap().claiming_nonnegative();
        assert!(matches!(
            verify_symmetry_theorem(&bad, 1.0 / 3.0, 1e-12, 1e-6),
            Err(Bvp1dError::NegativeNonlinearity { .. })
        ));

        let unclaimed = Bvp1dProblem::new(1.0, 1.0, |_| 1.0).unwrap();
        assert_eq!(
            verify_symmetry_theorem(&unclaimed, 1.0, 1e-12, 1e-8).unwrap_err(),
            Bvp1dError::HypothesisNotClaimed
        );

        let zero = Bvp1dProblem::new(1.0, 1.0, |_| 0.0).unwrap().claiming_nonnegative();
        assert_eq!(
            verify_symmetry_theorem(&zero, 0.5, 1e-12, 1e-8).unwrap_err(),
            Bvp1dError::TrivialNonlinearity
        );
    }
}
