//! The `plap` command-line interface.
//!
//! Every command reads a JSON problem file and writes JSON or CSV to stdout
//! or `--out`. Exit codes: 0 ok, 1 usage or configuration error, 2 violated
//! hypotheses on `f`, 3 failed verification.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bifurcation::{bifurcation_table, structure, BifurcationTable};
use crate::error::Error;
use crate::nonlinearity::{Nonlinearity, NonlinearitySpec};
use crate::profile::{classify_regularity, reconstruct, verify, Profile, VerifyReport};
use crate::solver::{enumerate, find_descriptor, SolutionDescriptor};
use crate::timemap::{Numerics, Problem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

const MAX_DIAGRAM_N: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "Equilibria of the one-dimensional p-Laplacian eigenvalue problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the hypotheses on f.
    Validate,
    /// Bifurcation thresholds for n = 1..N.
    Diagram {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Enumerate solutions up to class j_max.
    Solve {
        #[arg(long, default_value_t = 4)]
        jmax: usize,
    },
    /// Sample the profile of one solution.
    Profile {
        #[arg(long)]
        id: String,
        /// Plateau lengths for flat-core solutions, comma separated.
        #[arg(long, value_delimiter = ',')]
        cores: Option<Vec<f64>>,
        #[arg(long, default_value_t = 8)]
        jmax: usize,
    },
    /// Check one solution, or all up to j_max, against the energy relation
    /// and a shooting trajectory.
    Verify {
        #[arg(long)]
        id: Option<String>,
        #[arg(long, default_value_t = 4)]
        jmax: usize,
    },
    /// Solution-set structure by class.
    Structure {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Critical points and smoothness of one solution.
    Regularity {
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = 8)]
        jmax: usize,
    },
}

/// Problem file contents. `q` may sit at the top level or inside
/// `nonlinearity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub numerics: Numerics,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisViolated(_) | Error::NoZeroFound { .. } => EXIT_HYPOTHESIS,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<(String, i32), Failure>;

impl Config {
    pub fn from_json(text: &str) -> std::result::Result<Self, Failure> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Failure::usage(format!("malformed config: {e}")))?;
        cfg.numerics.check()?;
        cfg.q()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn q(&self) -> std::result::Result<f64, Failure> {
        match (self.q, self.nonlinearity.q) {
            (Some(a), Some(b)) if a != b => Err(Failure::usage(format!("conflicting q values {a} and {b}"))),
            (Some(q), _) | (None, Some(q)) => Ok(q),
            (None, None) => Err(Failure::usage("q is missing")),
        }
    }

    pub fn nonlinearity(&self) -> std::result::Result<Nonlinearity, Failure> {
        Ok(Nonlinearity::from_spec(&self.nonlinearity, self.q()?)?)
    }

    pub fn problem(&self) -> std::result::Result<Problem, Failure> {
        let lambda = self.lambda.ok_or_else(|| Failure::usage("lambda is missing"))?;
        Ok(Problem::with_numerics(self.p, self.nonlinearity()?, lambda, self.numerics)?)
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn cmd_validate(cfg: &Config) -> CmdResult {
    let nl = Nonlinearity::new_unchecked(cfg.nonlinearity.family.clone(), cfg.q()?)?;
    let report = nl.validate();
    let code = if report.pass { EXIT_OK } else { EXIT_HYPOTHESIS };
    Ok((json(&report), code))
}

/// CSV rendering of a bifurcation table.
pub fn diagram_csv(table: &BifurcationTable) -> String {
    let mut out = String::from("n,lambda_tilde_plus,lambda_tilde_minus,lambda_star_plus,lambda_star_minus");
    if table.lambda_classical.is_some() {
        out.push_str(",lambda_n");
    }
    out.push('\n');
    let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map_or(String::new(), |v| num(v[i]));
    for i in 0..table.len() {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            i + 1,
            num(table.lambda_tilde_plus[i]),
            num(table.lambda_tilde_minus[i]),
            opt(&table.lambda_star_plus, i),
            opt(&table.lambda_star_minus, i)
        );
        if let Some(c) = &table.lambda_classical {
            let _ = write!(out, ",{}", num(c[i]));
        }
        out.push('\n');
    }
    out
}

pub fn cmd_diagram(cfg: &Config, n: usize, format: Format) -> CmdResult {
    if n == 0 || n > MAX_DIAGRAM_N {
        return Err(Failure::usage(format!("--n must lie in 1..={MAX_DIAGRAM_N}, got {n}")));
    }
    let table = bifurcation_table(&cfg.nonlinearity()?, cfg.p, n)?;
    let text = match format {
        Format::Csv => diagram_csv(&table),
        Format::Json => json(&table),
    };
    Ok((text, EXIT_OK))
}

pub fn cmd_solve(cfg: &Config, jmax: usize) -> CmdResult {
    let problem = cfg.problem()?;
    Ok((json(&enumerate(&problem, jmax)?), EXIT_OK))
}

fn lookup(problem: &Problem, id: &str, jmax: usize) -> std::result::Result<SolutionDescriptor, Failure> {
    find_descriptor(problem, id, jmax)?.ok_or_else(|| Failure::usage(format!("unknown descriptor id {id}")))
}

/// CSV rendering `x,phi,dphi` of a profile.
pub fn profile_csv(profile: &Profile) -> String {
    let mut out = String::from("x,phi,dphi\n");
    for i in 0..profile.x.len() {
        let _ = writeln!(out, "{},{},{}", num(profile.x[i]), num(profile.phi[i]), num(profile.dphi[i]));
    }
    out
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    #[serde(flatten)]
    sidecar: crate::profile::ProfileSidecar,
    x: &'a [f64],
    phi: &'a [f64],
    dphi: &'a [f64],
}

/// Returns the main output and, for CSV, the JSON sidecar.
pub fn cmd_profile(
    cfg: &Config,
    id: &str,
    cores: Option<&[f64]>,
    jmax: usize,
    format: Format,
) -> std::result::Result<(String, Option<String>), Failure> {
    let problem = cfg.problem()?;
    let d = lookup(&problem, id, jmax)?;
    let profile = reconstruct(&problem, &d, problem.numerics.grid, cores)?;
    Ok(match format {
        Format::Csv => (profile_csv(&profile), Some(json(&profile.sidecar()))),
        Format::Json => (
            json(&ProfileJson { sidecar: profile.sidecar(), x: &profile.x, phi: &profile.phi, dphi: &profile.dphi }),
            None,
        ),
    })
}

pub fn cmd_verify(cfg: &Config, id: Option<&str>, jmax: usize) -> CmdResult {
    let problem = cfg.problem()?;
    let targets = match id {
        Some(id) => vec![lookup(&problem, id, jmax)?],
        None => enumerate(&problem, jmax)?.descriptors,
    };
    let reports: Vec<VerifyReport> = targets.iter().map(|d| verify(&problem, d)).collect::<Result<_, _>>()?;
    let code = if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY };
    Ok((json(&reports), code))
}

pub fn cmd_structure(cfg: &Config, n: usize) -> CmdResult {
    if n == 0 || n > MAX_DIAGRAM_N {
        return Err(Failure::usage(format!("--n must lie in 1..={MAX_DIAGRAM_N}, got {n}")));
    }
    let problem = cfg.problem()?;
    Ok((json(&structure(&problem, n)?), EXIT_OK))
}

pub fn cmd_regularity(cfg: &Config, id: &str, jmax: usize) -> CmdResult {
    let problem = cfg.problem()?;
    let d = lookup(&problem, id, jmax)?;
    let profile = reconstruct(&problem, &d, problem.numerics.grid, None)?;
    Ok((json(&classify_regularity(&problem, &profile)), EXIT_OK))
}

fn write_out(path: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> std::result::Result<i32, Failure> {
    let path = cli.config.as_deref().ok_or_else(|| Failure::usage("--config is required"))?;
    let cfg = Config::load(path)?;
    let out = cli.out.as_deref();
    let (text, code) = match &cli.command {
        Command::Validate => cmd_validate(&cfg)?,
        Command::Diagram { n } => cmd_diagram(&cfg, *n, cli.format.unwrap_or(Format::Csv))?,
        Command::Solve { jmax } => cmd_solve(&cfg, *jmax)?,
        Command::Profile { id, cores, jmax } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let (main, sidecar) = cmd_profile(&cfg, id, cores.as_deref(), *jmax, format)?;
            if let (Some(sidecar), Some(p)) = (sidecar, out) {
                write_out(Some(&p.with_extension("json")), &sidecar)?;
            }
            (main, EXIT_OK)
        }
        Command::Verify { id, jmax } => cmd_verify(&cfg, id.as_deref(), *jmax)?,
        Command::Structure { n } => cmd_structure(&cfg, *n)?,
        Command::Regularity { id, jmax } => cmd_regularity(&cfg, id, *jmax)?,
    };
    write_out(out, &text)?;
    Ok(code)
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("plap: {}", f.message);
            f.code
        }
    }
}
