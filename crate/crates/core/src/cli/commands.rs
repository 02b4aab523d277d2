use rayon::prelude::*;
use serde::Serialize;

use super::{CliError, Command, FSpec, Format, RunConfig};
use crate::bvp1d::{self, Bvp1dError, Bvp1dProblem, Bvp1dSolution, SymmetryReport1d, SymmetryTheoremCheck};
use crate::counterexample::{
    superharmonic_threshold, BallGeometry, ConstraintClass, CounterexampleModel, RobinParameter,
};
use crate::numfmt::{self, json_f64, json_opt_f64, json_vec_f64};
use crate::oracle::{closed_form_audit, residual_audit, ClosedFormReport, ParamsEcho, ResidualReport};

/// Evenness threshold used for the symmetry check in `solve1d`.
const SOLVE1D_SYMMETRY_TOL: f64 = 1e-8;
/// Grid cells with a guarantee must not dip below this.
const REGION_NEGATIVE_TOL: f64 = -1e-12;

/// Rendered output and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub pass: bool,
}

pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command {
        Command::Verify => verify(cfg),
        Command::Sweep => sweep(cfg),
        Command::Region => region(cfg),
        Command::Profile => profile(cfg),
        Command::Solve1d => solve1d(cfg),
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn geometry(cfg: &RunConfig, offset: f64) -> Result<BallGeometry, CliError> {
    match &cfg.x0 {
        Some(x0) => BallGeometry::new(cfg.radius, x0.clone()),
        None => BallGeometry::on_axis(cfg.dim, cfg.radius, offset),
    }
    .map_err(invalid)
}

fn single_model(cfg: &RunConfig) -> Result<CounterexampleModel, CliError> {
    if !cfg.offset.is_single() || !cfg.beta.is_single() {
        return Err(invalid(format!(
            "{} needs a single parameter point; use sweep or region for ranges",
            cfg.command.as_str()
        )));
    }
    grid(cfg).map(|mut cells| cells.remove(0))
}

/// Models for every (a, β) cell in row-major a-then-β order.
fn grid(cfg: &RunConfig) -> Result<Vec<CounterexampleModel>, CliError> {
    if cfg.x0.is_some() && !cfg.offset.is_single() {
        return Err(invalid("--x0 cannot be combined with an offset range"));
    }
    let mut cells = Vec::with_capacity(cfg.offset.count * cfg.beta.count);
    for a in cfg.offset.values() {
        let geom = geometry(cfg, a)?;
        for beta in cfg.beta.values() {
            let beta = RobinParameter::new(beta).map_err(invalid)?;
            cells.push(CounterexampleModel::derive(geom.clone(), beta));
        }
    }
    Ok(cells)
}

fn check_step(cfg: &RunConfig) -> Result<(), CliError> {
    let h = cfg.stencil.h;
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("--h must be positive, got {h}")));
    }
    if 4.0 * h >= cfg.radius {
        return Err(invalid(format!("--h = {h} is too large for R = {}", cfg.radius)));
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn bool01(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn opt_csv(x: Option<f64>) -> String {
    x.map(numfmt::csv).unwrap_or_default()
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
struct AuditCell {
    params: ParamsEcho,
    #[serde(serialize_with = "json_vec_f64")]
    center: Vec<f64>,
    constraint: ConstraintClass,
    #[serde(serialize_with = "json_opt_f64")]
    threshold: Option<f64>,
    closed_form: ClosedFormReport,
    oracle: ResidualReport,
    pass: bool,
}

const AUDIT_HEADER: &[&str] = &[
    "n",
    "R",
    "a",
    "beta",
    "h",
    "constraint",
    "max_pde_residual_closed",
    "max_robin_residual_closed",
    "max_pde_residual_fd",
    "max_robin_residual_fd",
    "tolerance_fd",
    "observed_order",
    "pass",
];

impl AuditCell {
    fn run(model: &CounterexampleModel, cfg: &RunConfig) -> Result<Self, CliError> {
        let margin = 3.0 * cfg.stencil.h;
        let closed_form = closed_form_audit(model, cfg.samples, margin, cfg.seed).map_err(invalid)?;
        let oracle = residual_audit(model, cfg.samples, &cfg.stencil, cfg.seed).map_err(invalid)?;
        Ok(Self {
            params: ParamsEcho::of(model),
            center: model.geometry().center().to_vec(),
            constraint: model.constraint_class(),
            threshold: superharmonic_threshold(model.geometry()),
            pass: closed_form.pass && oracle.pass,
            closed_form,
            oracle,
        })
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.params.n.to_string(),
            numfmt::csv(self.params.radius),
            numfmt::csv(self.params.offset),
            numfmt::csv(self.params.beta),
            numfmt::csv(self.oracle.h),
            self.constraint.as_str().to_string(),
            numfmt::csv(self.closed_form.max_pde_residual),
            numfmt::csv(self.closed_form.max_robin_residual),
            numfmt::csv(self.oracle.max_pde_residual_fd),
            numfmt::csv(self.oracle.max_robin_residual_fd),
            numfmt::csv(self.oracle.tolerance),
            opt_csv(self.oracle.observed_order),
            bool01(self.pass),
        ]
    }
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    command: &'static str,
    samples: usize,
    seed: u64,
    #[serde(flatten)]
    cell: &'a AuditCell,
}

fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    check_step(cfg)?;
    let model = single_model(cfg)?;
    let cell = AuditCell::run(&model, cfg)?;
    let text = match cfg.format {
        Format::Json => json(&VerifyJson {
            command: "verify",
            samples: cfg.samples,
            seed: cfg.seed,
            cell: &cell,
        }),
        Format::Csv => csv_table(AUDIT_HEADER, &[cell.csv_row()]),
    };
    Ok(Output { text, pass: cell.pass })
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepJson<'a> {
    command: &'static str,
    samples: usize,
    seed: u64,
    cells: &'a [AuditCell],
    pass: bool,
}

fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    check_step(cfg)?;
    let models = grid(cfg)?;
    let cells = models
        .par_iter()
        .map(|m| AuditCell::run(m, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = cells.iter().all(|c| c.pass);
    let text = match cfg.format {
        Format::Json => json(&SweepJson {
            command: "sweep",
            samples: cfg.samples,
            seed: cfg.seed,
            cells: &cells,
            pass,
        }),
        Format::Csv => {
            let rows: Vec<_> = cells.iter().map(AuditCell::csv_row).collect();
            csv_table(AUDIT_HEADER, &rows)
        }
    };
    Ok(Output { text, pass })
}

// ---------------------------------------------------------------- region

#[derive(Debug, Clone, Serialize)]
struct RegionRow {
    #[serde(serialize_with = "json_f64")]
    a: f64,
    #[serde(serialize_with = "json_f64")]
    beta: f64,
    #[serde(serialize_with = "json_opt_f64")]
    threshold: Option<f64>,
    guaranteed: bool,
    #[serde(serialize_with = "json_f64")]
    min_f_composed_phi: f64,
}

#[derive(Serialize)]
struct RegionJson<'a> {
    command: &'static str,
    n: usize,
    #[serde(serialize_with = "json_f64")]
    radius: f64,
    samples: usize,
    rows: &'a [RegionRow],
    pass: bool,
}

fn region(cfg: &RunConfig) -> Result<Output, CliError> {
    let models = grid(cfg)?;
    let rows: Vec<RegionRow> = models
        .par_iter()
        .map(|m| RegionRow {
            a: m.geometry().offset(),
            beta: m.beta(),
            threshold: superharmonic_threshold(m.geometry()),
            guaranteed: m.constraint_class() == ConstraintClass::GuaranteedNonnegative,
            min_f_composed_phi: m.nonlinearity_min_scan(cfg.samples).value,
        })
        .collect();
    let pass = rows
        .iter()
        .all(|r| !r.guaranteed || r.min_f_composed_phi >= REGION_NEGATIVE_TOL);
    let text = match cfg.format {
        Format::Json => json(&RegionJson {
            command: "region",
            n: cfg.dim,
            radius: cfg.radius,
            samples: cfg.samples,
            rows: &rows,
            pass,
        }),
        Format::Csv => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| {
                    vec![
                        numfmt::csv(r.a),
                        numfmt::csv(r.beta),
                        opt_csv(r.threshold),
                        bool01(r.guaranteed),
                        numfmt::csv(r.min_f_composed_phi),
                    ]
                })
                .collect();
            csv_table(&["a", "beta", "threshold", "guaranteed", "min_f_composed_phi"], &table)
        }
    };
    Ok(Output { text, pass })
}

// ---------------------------------------------------------------- profile

#[derive(Debug, Clone, Serialize)]
struct ProfileRow {
    curve: &'static str,
    #[serde(serialize_with = "json_f64")]
    x1: f64,
    #[serde(serialize_with = "json_f64")]
    x2: f64,
    #[serde(serialize_with = "json_f64")]
    r: f64,
    #[serde(serialize_with = "json_f64")]
    phi: f64,
    #[serde(serialize_with = "json_f64")]
    f_phi: f64,
    #[serde(serialize_with = "json_f64")]
    laplacian_phi: f64,
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    command: &'static str,
    params: ParamsEcho,
    #[serde(serialize_with = "json_f64")]
    circle_radius: f64,
    rows: &'a [ProfileRow],
}

fn profile_row(model: &CounterexampleModel, curve: &'static str, x: &[f64]) -> Result<ProfileRow, CliError> {
    let phi = model.phi(x).map_err(invalid)?;
    Ok(ProfileRow {
        curve,
        x1: x[0],
        x2: x.get(1).copied().unwrap_or(0.0),
        r: model.geometry().sq_distance_to_center(x).sqrt(),
        phi,
        f_phi: model.f_eval(phi).map_err(invalid)?,
        laplacian_phi: model.laplacian_phi(x).map_err(invalid)?,
    })
}

fn profile(cfg: &RunConfig) -> Result<Output, CliError> {
    let model = single_model(cfg)?;
    let geom = model.geometry();
    let n = geom.dim();
    let radius = geom.radius();
    let rho = cfg.circle_radius.unwrap_or(radius);
    if !(rho >= 0.0 && rho <= radius) {
        return Err(invalid(format!("--radius must lie in [0, R], got {rho}")));
    }
    let mut rows = Vec::new();

    // Angular sweep at |x| = rho in the (x1, x2) plane.
    let circle: Vec<Vec<f64>> = if n == 1 {
        vec![vec![rho], vec![-rho]]
    } else {
        (0..cfg.samples)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / cfg.samples as f64;
                let mut x = vec![0.0; n];
                x[0] = rho * t.cos();
                x[1] = rho * t.sin();
                x
            })
            .collect()
    };
    for x in &circle {
        rows.push(profile_row(&model, "circle", x)?);
    }

    // x0 + t e1 for t in [0, t_max], ending on the sphere.
    let c = geom.center();
    let c_sq: f64 = c.iter().map(|v| v * v).sum();
    let t_max = -c[0] + (c[0] * c[0] + radius * radius - c_sq).sqrt();
    let count = cfg.samples.max(2);
    for i in 0..count {
        let t = if i + 1 == count {
            t_max
        } else {
            t_max * i as f64 / (count - 1) as f64
        };
        let mut x = c.to_vec();
        x[0] += t;
        if i + 1 == count {
            x = geom.project_to_boundary(&x).map_err(invalid)?;
        }
        rows.push(profile_row(&model, "segment", &x)?);
    }

    let text = match cfg.format {
        Format::Json => json(&ProfileJson {
            command: "profile",
            params: ParamsEcho::of(&model),
            circle_radius: rho,
            rows: &rows,
        }),
        Format::Csv => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.curve.to_string(),
                        numfmt::csv(r.x1),
                        numfmt::csv(r.x2),
                        numfmt::csv(r.r),
                        numfmt::csv(r.phi),
                        numfmt::csv(r.f_phi),
                        numfmt::csv(r.laplacian_phi),
                    ]
                })
                .collect();
            csv_table(&["curve", "x1", "x2", "r", "phi", "f_phi", "laplacian_phi"], &table)
        }
    };
    Ok(Output { text, pass: true })
}

// ---------------------------------------------------------------- solve1d

#[derive(Serialize)]
struct Solve1dJson {
    command: &'static str,
    f: String,
    #[serde(serialize_with = "json_f64")]
    half_length: f64,
    #[serde(serialize_with = "json_f64")]
    beta: f64,
    #[serde(serialize_with = "json_f64")]
    init_guess: f64,
    #[serde(serialize_with = "json_f64")]
    tol: f64,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SymmetryReport1d>,
    /// Conclusions of the 1D symmetry result, when `f ≥ 0` is claimed.
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry_check: Option<SymmetryTheoremCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry_check_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<Bvp1dSolution>,
}

type BoxedF = Box<dyn Fn(f64) -> f64 + Sync>;

fn nonlinearity(cfg: &RunConfig, spec: FSpec) -> Result<(BoxedF, bool), CliError> {
    Ok(match spec {
        FSpec::Const(c) => (Box::new(move |_| c), c >= 0.0),
        FSpec::Power(k) => (Box::new(move |u: f64| u.max(0.0).powf(k)), true),
        FSpec::PaperN1 => {
            if !cfg.offset.is_single() || !cfg.beta.is_single() {
                return Err(invalid("paper-n1 needs a single (a, beta) point"));
            }
            let model = CounterexampleModel::from_params(1, cfg.radius, cfg.offset.lo, cfg.beta.lo).map_err(invalid)?;
            let f = move |u: f64| {
                if u > 0.0 {
                    model.f_eval(u).unwrap_or(f64::NAN)
                } else {
                    0.0
                }
            };
            (Box::new(f), false)
        }
    })
}

fn solve1d(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg
        .f
        .ok_or_else(|| invalid("solve1d needs --f (const:c, power:k or paper-n1)"))?;
    if !cfg.beta.is_single() {
        return Err(invalid("solve1d needs a single beta"));
    }
    let (f, nonneg) = nonlinearity(cfg, spec)?;
    let mut problem = Bvp1dProblem::new(cfg.radius, cfg.beta.lo, f).map_err(invalid)?;
    if nonneg {
        problem = problem.claiming_nonnegative();
    }

    let mut out = Solve1dJson {
        command: "solve1d",
        f: spec.to_string(),
        half_length: cfg.radius,
        beta: cfg.beta.lo,
        init_guess: cfg.seed_value,
        tol: cfg.tol,
        converged: false,
        error: None,
        report: None,
        symmetry_check: None,
        symmetry_check_skipped: None,
        solution: None,
    };
    let solution = match bvp1d::solve(&problem, cfg.seed_value, cfg.tol) {
        Ok(s) => s,
        Err(e @ (Bvp1dError::NoConvergence { .. } | Bvp1dError::Divergence { .. })) => {
            out.error = Some(e.to_string());
            let text = match cfg.format {
                Format::Json => json(&out),
                Format::Csv => csv_table(&["x", "u", "du"], &[]),
            };
            return Ok(Output { text, pass: false });
        }
        Err(e) => return Err(invalid(e)),
    };

    let text = match cfg.format {
        Format::Json => {
            out.converged = true;
            out.report = Some(bvp1d::diagnose(&solution));
            match bvp1d::verify_symmetry_theorem(&problem, cfg.seed_value, cfg.tol, SOLVE1D_SYMMETRY_TOL) {
                Ok(check) => out.symmetry_check = Some(check),
                Err(e) => out.symmetry_check_skipped = Some(e.to_string()),
            }
            out.solution = Some(solution);
            json(&out)
        }
        Format::Csv => {
            let rows: Vec<_> = (0..solution.nodes.len())
                .map(|i| {
                    vec![
                        numfmt::csv(solution.nodes[i]),
                        numfmt::csv(solution.u[i]),
                        numfmt::csv(solution.du[i]),
                    ]
                })
                .collect();
            csv_table(&["x", "u", "du"], &rows)
        }
    };
    Ok(Output { text, pass: true })
}
