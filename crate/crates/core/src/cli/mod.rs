//! Command-line front end.
//!
//! Every subcommand takes the same flag set; a flag given on the command
//! line wins over the same key in the `--config` file. Exit codes are
//! 0 (all checks passed), 1 (checks ran and failed) and 2 (invalid input).

mod commands;
pub mod parse;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::oracle::{StencilConfig, StencilOrder};
pub use commands::{execute, Output};
pub use parse::{FSpec, ParseError, Range};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{key}: {source}")]
    Value { key: String, source: ParseError },
    #[error("config file {path}: {source}")]
    Config { path: String, source: ParseError },
    #[error("cannot read config file {path}: {message}")]
    ConfigIo { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

#[derive(Parser, Debug)]
#[command(
    name = "robin-symmetry",
    version,
    about = "Audit explicit non-radial Robin–Poisson solutions and solve the 1D Robin problem"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Closed-form and finite-difference residual audit at one parameter point.
    Verify(Flags),
    /// Residual audit over an (a, beta) grid, one CSV row per cell.
    Sweep(Flags),
    /// Superharmonic classification and min f(phi) over an (a, beta) grid.
    Region(Flags),
    /// phi, f(phi) and the Laplacian on a circle and along a radial segment.
    Profile(Flags),
    /// Shooting solve of -u'' = f(u) on (-R, R) with Robin ends.
    Solve1d(Flags),
}

#[derive(Args, Debug, Clone, Default)]
struct Flags {
    /// Flat `key = value` file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimension.
    #[arg(long)]
    n: Option<String>,
    /// Ball radius.
    #[arg(long = "R", value_name = "R")]
    big_r: Option<String>,
    /// Offset |x0| along e1: a value or lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Explicit centre, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Robin parameter: a value or lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Finite-difference step.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// Stencil order, 2 or 4.
    #[arg(long)]
    order: Option<String>,
    /// Richardson-combine the h and h/2 stencils.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    richardson: Option<String>,
    /// Sample count (interior points, scan points or curve points).
    #[arg(long)]
    samples: Option<String>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Nonlinearity for solve1d: const:c, power:k or paper-n1.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Initial guess for u(-R) in solve1d.
    #[arg(long = "seed-value", allow_hyphen_values = true)]
    seed_value: Option<String>,
    /// Newton tolerance for solve1d.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    /// Circle radius for profile (defaults to R).
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Sweep,
    Region,
    Profile,
    Solve1d,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Region => "region",
            Command::Profile => "profile",
            Command::Solve1d => "solve1d",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::Verify => 1000,
            Command::Sweep => 200,
            Command::Region => 10_000,
            Command::Profile => 360,
            Command::Solve1d => 0,
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Verify | Command::Solve1d => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub radius: f64,
    pub offset: Range,
    /// Explicit centre; overrides `offset` and fixes `dim`.
    pub x0: Option<Vec<f64>>,
    pub beta: Range,
    pub stencil: StencilConfig,
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub f: Option<FSpec>,
    pub seed_value: f64,
    pub tol: f64,
    pub circle_radius: Option<f64>,
}

impl RunConfig {
    /// Defaults with the canonical parameter point.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            dim: 2,
            radius: 1.0,
            offset: Range::single(0.5),
            x0: None,
            beta: Range::single(0.25),
            stencil: StencilConfig {
                h: 1e-3,
                richardson: false,
                order: StencilOrder::Second,
            },
            samples: command.default_samples(),
            seed: 0,
            output: None,
            format: command.default_format(),
            f: None,
            seed_value: 1.0,
            tol: 1e-10,
            circle_radius: None,
        }
    }

    fn from_sources(command: Command, flags: &Flags, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let get =
            |key: &str, flag: &Option<String>| -> Option<String> { flag.clone().or_else(|| file.get(key).cloned()) };
        fn val<T>(key: &str, r: Result<T, ParseError>) -> Result<T, CliError> {
            r.map_err(|source| CliError::Value {
                key: format!("--{key}"),
                source,
            })
        }

        let mut cfg = Self::new(command);
        let dim = get("n", &flags.n)
            .map(|s| val("n", parse::parse_count(&s)))
            .transpose()?;
        if let Some(s) = get("R", &flags.big_r) {
            cfg.radius = val("R", parse::parse_f64(&s))?;
        }
        if let Some(s) = get("a", &flags.a) {
            cfg.offset = val("a", parse::parse_range(&s))?;
        }
        if let Some(s) = get("x0", &flags.x0) {
            let x0 = val("x0", parse::parse_vector(&s))?;
            if get("a", &flags.a).is_some() {
                return Err(CliError::Invalid("--a and --x0 are mutually exclusive".into()));
            }
            if let Some(n) = dim {
                if n != x0.len() {
                    return Err(CliError::Invalid(format!(
                        "--x0 has {} components but --n is {n}",
                        x0.len()
                    )));
                }
            }
            cfg.x0 = Some(x0);
        }
        cfg.dim = dim.or(cfg.x0.as_ref().map(Vec::len)).unwrap_or(cfg.dim);
        if let Some(s) = get("beta", &flags.beta) {
            cfg.beta = val("beta", parse::parse_range(&s))?;
        }
        if let Some(s) = get("h", &flags.h) {
            cfg.stencil.h = val("h", parse::parse_f64(&s))?;
        }
        if let Some(s) = get("order", &flags.order) {
            let k = val("order", parse::parse_count(&s))?;
            cfg.stencil.order = u32::try_from(k)
                .ok()
                .and_then(|k| StencilOrder::try_from(k).ok())
                .ok_or_else(|| CliError::Invalid(format!("--order must be 2 or 4, got {s}")))?;
        }
        if let Some(s) = get("richardson", &flags.richardson) {
            cfg.stencil.richardson = val("richardson", parse::parse_bool(&s))?;
        }
        if let Some(s) = get("samples", &flags.samples) {
            cfg.samples = val("samples", parse::parse_count(&s))?;
        }
        if let Some(s) = get("seed", &flags.seed) {
            cfg.seed = s
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("--seed: invalid integer `{s}`")))?;
        }
        if let Some(s) = get("out", &flags.out) {
            cfg.output = Some(PathBuf::from(s));
        }
        if let Some(s) = get("format", &flags.format) {
            cfg.format = match s.trim() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => {
                    return Err(CliError::Invalid(format!(
                        "--format must be csv or json, got `{other}`"
                    )))
                }
            };
        }
        if let Some(s) = get("f", &flags.f) {
            cfg.f = Some(val("f", parse::parse_f_spec(&s))?);
        }
        if let Some(s) = get("seed-value", &flags.seed_value) {
            cfg.seed_value = val("seed-value", parse::parse_f64(&s))?;
        }
        if let Some(s) = get("tol", &flags.tol) {
            cfg.tol = val("tol", parse::parse_f64(&s))?;
        }
        if let Some(s) = get("radius", &flags.radius) {
            cfg.circle_radius = Some(val("radius", parse::parse_f64(&s))?);
        }
        Ok(cfg)
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output to `--out` or `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    let (command, flags) = match cli.command {
        CliCommand::Verify(f) => (Command::Verify, f),
        CliCommand::Sweep(f) => (Command::Sweep, f),
        CliCommand::Region(f) => (Command::Region, f),
        CliCommand::Profile(f) => (Command::Profile, f),
        CliCommand::Solve1d(f) => (Command::Solve1d, f),
    };
    match resolve_and_execute(command, &flags, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn resolve_and_execute(command: Command, flags: &Flags, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigIo {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            parse::parse_config(&text).map_err(|source| CliError::Config {
                path: path.display().to_string(),
                source,
            })?
        }
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::from_sources(command, flags, &file)?;
    let output = execute(&cfg)?;
    write_output(&cfg, &output.text, stdout)?;
    Ok(if output.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn write_output(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Output {
            path: "stdout".into(),
            message: e.to_string(),
        }),
    }
}
