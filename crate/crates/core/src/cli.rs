//! File formats and command implementations behind the `hsie` binary.
//!
//! Exit codes: 0 success or pass, 1 input error, 2 diverging series,
//! 3 verification failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::kernel::u_from_psi;
use crate::poly::Poly;
use crate::quad::{QuadConfig, QuadError};
use crate::scalar::Scalar;
use crate::solvers::{self, Method, Problem, SolveError, Solution, Verdict};
use crate::verify::{self, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DIVERGING: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const DEFAULT_MAX_TERMS: usize = 25;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Half-width of the grid used for the float residual in solve reports.
const RESIDUAL_GRID_HALF_WIDTH: f64 = 0.9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("quadrature oracle: {0}")]
    Quad(#[from] QuadError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

/// Problem input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub alpha: Scalar,
    pub f_coeffs: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_coeffs: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
}

impl ProblemFile {
    pub fn problem(&self) -> Result<Problem, SolveError> {
        Problem::new(self.n, self.alpha.clone(), Poly::new(self.f_coeffs.clone()))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads and validates a problem file.
pub fn load_problem(path: &Path) -> Result<(ProblemFile, Problem), CliError> {
    let file: ProblemFile = read_json(path)?;
    let problem = file.problem().map_err(|e| CliError::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if let Some(tol) = file.tail_tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Invalid {
                path: path.to_path_buf(),
                message: format!("tail_tol must be positive (got {tol})"),
            });
        }
    }
    if file.max_terms == Some(0) {
        return Err(CliError::Invalid {
            path: path.to_path_buf(),
            message: "max_terms must be at least 1".into(),
        });
    }
    Ok((file, problem))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSummary {
    pub term_count: usize,
    pub terms: Vec<String>,
    pub term_norms: Vec<f64>,
    /// Non-finite ratios (after a zero term) are written as null.
    pub ratio_estimates: Vec<Option<f64>>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub grid_size: usize,
    pub sup_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&VerifyReport> for OracleCheck {
    fn from(r: &VerifyReport) -> Self {
        OracleCheck {
            grid_size: r.grid_size,
            sup_error: r.sup_error,
            tolerance: r.tolerance,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub n: usize,
    pub alpha: Scalar,
    pub method: Method,
    /// Exact ψ, lossless; this is what `verify` reads back.
    pub psi: Poly,
    pub psi_exact: Vec<String>,
    pub psi_float: Vec<f64>,
    pub u_description: String,
    pub residual_exact_is_zero: bool,
    pub residual_float_sup: f64,
    pub diagnostics: Option<DiagnosticsSummary>,
    pub oracle_check: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    pub max_terms: Option<usize>,
    pub tail_tol: Option<f64>,
    pub grid: usize,
    pub precision_bits: u32,
    pub oracle: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Wmpm,
            max_terms: None,
            tail_tol: None,
            grid: DEFAULT_GRID,
            precision_bits: DEFAULT_PRECISION_BITS,
            oracle: false,
        }
    }
}

/// Runs the chosen solver; returns the report and the exit code it implies.
pub fn run_solve(input: &Path, opts: &SolveOptions) -> Result<(SolutionReport, i32), CliError> {
    let (file, problem) = load_problem(input)?;
    let max_terms = opts.max_terms.or(file.max_terms).unwrap_or(DEFAULT_MAX_TERMS);
    let tail_tol = opts.tail_tol.or(file.tail_tol).unwrap_or(DEFAULT_TAIL_TOL);
    let solution = match opts.method {
        Method::Pm => solvers::pm_solve(&problem, max_terms, tail_tol),
        Method::Mpm => {
            let f1 = file.f1_coeffs.clone().ok_or_else(|| CliError::Invalid {
                path: input.to_path_buf(),
                message: "method mpm requires f1_coeffs".into(),
            })?;
            solvers::mpm_solve(&problem, &Poly::new(f1), max_terms, tail_tol)
        }
        Method::Wmpm => solvers::wmpm_solve(&problem)?,
    };
    let mut report = build_report(&problem, &solution, opts.grid, opts.precision_bits);
    let mut code = match report.diagnostics.as_ref().map(|d| d.verdict) {
        Some(Verdict::Diverging) if !report.residual_exact_is_zero => EXIT_DIVERGING,
        _ => EXIT_OK,
    };
    if opts.oracle {
        let check = verify::verify_solution(
            &problem,
            &solution.psi,
            opts.grid,
            opts.precision_bits,
            &QuadConfig::default(),
        )?;
        if !check.pass && code == EXIT_OK {
            code = EXIT_VERIFY_FAILED;
        }
        report.oracle_check = Some(OracleCheck::from(&check));
    }
    Ok((report, code))
}

pub fn build_report(
    problem: &Problem,
    solution: &Solution,
    grid_size: usize,
    precision_bits: u32,
) -> SolutionReport {
    let residual = solution.residual_poly.to_float(precision_bits);
    let residual_float_sup = verify::grid(RESIDUAL_GRID_HALF_WIDTH, grid_size)
        .into_iter()
        .map(|x| residual.eval(x).abs())
        .fold(0.0, f64::max);
    let diagnostics = solution.diagnostics.as_ref().map(|d| DiagnosticsSummary {
        term_count: d.terms.len(),
        terms: d.terms.iter().map(ToString::to_string).collect(),
        term_norms: d.term_norms.clone(),
        ratio_estimates: d
            .ratio_estimates
            .iter()
            .map(|&r| r.is_finite().then_some(r))
            .collect(),
        verdict: d.verdict,
    });
    SolutionReport {
        n: problem.n(),
        alpha: problem.alpha().clone(),
        method: solution.method,
        psi: solution.psi.clone(),
        psi_exact: solution.psi.coeffs().iter().map(ToString::to_string).collect(),
        psi_float: solution
            .psi
            .coeffs()
            .iter()
            .map(|c| c.to_f64(precision_bits))
            .collect(),
        u_description: u_from_psi(solution.psi.clone()).to_string(),
        residual_exact_is_zero: solution.residual_poly.is_zero(),
        residual_float_sup,
        diagnostics,
        oracle_check: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub n: usize,
    pub psi_exact: Vec<String>,
    #[serde(flatten)]
    pub report: VerifyReport,
}

#[derive(Deserialize)]
struct SolutionFile {
    psi: Poly,
}

/// Checks the ψ stored in a solution report against the problem, pointwise,
/// through the quadrature oracle.
pub fn run_verify(
    input: &Path,
    solution_path: &Path,
    grid_size: usize,
    precision_bits: u32,
) -> Result<(VerifyOutcome, i32), CliError> {
    let (_, problem) = load_problem(input)?;
    let solution: SolutionFile = read_json(solution_path)?;
    let report = verify::verify_solution(
        &problem,
        &solution.psi,
        grid_size,
        precision_bits,
        &QuadConfig::default(),
    )?;
    let code = if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok((
        VerifyOutcome {
            n: problem.n(),
            psi_exact: solution.psi.coeffs().iter().map(ToString::to_string).collect(),
            report,
        },
        code,
    ))
}

/// Serializes `value` as pretty JSON and moves it into place in one rename.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    serde_json::to_writer_pretty(&mut tmp, value).map_err(|e| io_err(e.into()))?;
    tmp.write_all(b"\n").map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn render_solution_text(report: &SolutionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method:    {}", report.method);
    let _ = writeln!(out, "n, alpha:  {}, {}", report.n, report.alpha);
    let _ = writeln!(out, "psi(x) =   {}", report.psi);
    let _ = writeln!(out, "u(x) =     {}", report.u_description);
    let floats: Vec<String> = report.psi_float.iter().map(|v| format!("{v:.12e}")).collect();
    let _ = writeln!(out, "psi float: [{}]", floats.join(", "));
    let _ = writeln!(
        out,
        "residual:  {} (float sup {:.3e})",
        if report.residual_exact_is_zero {
            "exactly zero"
        } else {
            "nonzero"
        },
        report.residual_float_sup
    );
    if let Some(d) = &report.diagnostics {
        let _ = writeln!(out, "series:    {} terms, {}", d.term_count, d.verdict);
        if let Some(last) = d.term_norms.last() {
            let _ = writeln!(out, "last term norm: {last:.3e}");
        }
    }
    if let Some(o) = &report.oracle_check {
        let _ = writeln!(
            out,
            "oracle:    sup error {:.3e} on {} points (tolerance {:.0e}) {}",
            o.sup_error,
            o.grid_size,
            o.tolerance,
            if o.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

pub fn render_verify_text(outcome: &VerifyOutcome) -> String {
    let r = &outcome.report;
    format!(
        "n = {}, psi = [{}]\nsup error {:.3e} at x = {:.3} over {} points on [-{w}, {w}] (tolerance {:.0e}): {}\n",
        outcome.n,
        outcome.psi_exact.join(", "),
        r.sup_error,
        r.worst_x,
        r.grid_size,
        r.tolerance,
        if r.pass { "PASS" } else { "FAIL" },
        w = r.half_width,
    )
}
