//! Perturbation solvers for `ψ = f + T[ψ]`.
//!
//! * [`pm_solve`]: classic perturbation, `ψ_0 = f`, `ψ_k = T[ψ_{k−1}]`.
//!   This term sequence is exactly the Adomian decomposition series.
//! * [`mpm_solve`]: modified perturbation with a split `f = f1 + f2`,
//!   `ψ_0 = f1`, `ψ_1 = f2 + T[ψ_0]`, then `ψ_k = T[ψ_{k−1}]` (modified ADM).
//! * [`wmpm_solve`]: weighted modified perturbation. The split is chosen so
//!   that `ψ_1 = 0`, which makes `ψ_0` the exact solution. For polynomial
//!   `f` of degree `m` the coefficients of `f1` solve the exact
//!   `(m+1)×(m+1)` system `(Id − M) b = a`, where column `j` of `M` holds
//!   the coefficients of `T[xʲ]`.

use serde::{Deserialize, Serialize};

use crate::kernel::{OperatorError, OperatorT};
use crate::linsolve::{self, LinearSolveError};
use crate::poly::Poly;
use crate::scalar::{Scalar, DEFAULT_PRECISION_BITS};

/// Consecutive ratio estimates above this mark a diverging series.
pub const DIVERGENCE_RATIO: f64 = 1.0 + 1e-9;
/// How many trailing ratios must exceed [`DIVERGENCE_RATIO`].
pub const DIVERGENCE_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("no unique polynomial solution for n = {n}, alpha = {alpha}: {source}")]
    Singular {
        n: usize,
        alpha: String,
        source: LinearSolveError,
    },
}

/// One instance of the equation: singularity order `n`, strength `α`, forcing `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    op: OperatorT,
    f: Poly,
}

impl Problem {
    pub fn new(n: usize, alpha: Scalar, f: Poly) -> Result<Self, SolveError> {
        Ok(Problem {
            op: OperatorT::new(n, alpha)?,
            f,
        })
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    pub fn alpha(&self) -> &Scalar {
        self.op.alpha()
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn operator(&self) -> &OperatorT {
        &self.op
    }

    pub fn residual(&self, psi: &Poly) -> Poly {
        self.op.residual(&self.f, psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pm,
    Mpm,
    Wmpm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Pm => "pm",
            Method::Mpm => "mpm",
            Method::Wmpm => "wmpm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The computed series terms and what they say about convergence.
///
/// `term_norms[k]` is the largest coefficient magnitude of `ψ_k`;
/// `ratio_estimates[k] = term_norms[k+1] / term_norms[k]` with IEEE
/// semantics (a zero norm followed by a nonzero one gives +∞).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDiagnostics {
    pub terms: Vec<Poly>,
    pub term_norms: Vec<f64>,
    pub ratio_estimates: Vec<f64>,
    pub verdict: Verdict,
}

impl SeriesDiagnostics {
    fn from_terms(terms: Vec<Poly>, tail_tol: f64) -> Self {
        let term_norms: Vec<f64> = terms
            .iter()
            .map(|t| t.max_abs_coeff(DEFAULT_PRECISION_BITS))
            .collect();
        let ratio_estimates: Vec<f64> = term_norms.windows(2).map(|w| w[1] / w[0]).collect();
        let verdict = classify(&term_norms, &ratio_estimates, tail_tol);
        SeriesDiagnostics {
            terms,
            term_norms,
            ratio_estimates,
            verdict,
        }
    }

    pub fn partial_sum(&self) -> Poly {
        self.terms.iter().fold(Poly::zero(), |acc, t| &acc + t)
    }
}

fn tail_small(norms: &[f64], tail_tol: f64) -> bool {
    match norms.iter().find(|&&v| v > 0.0) {
        None => true,
        Some(&first) => *norms.last().unwrap() <= tail_tol * first,
    }
}

fn classify(norms: &[f64], ratios: &[f64], tail_tol: f64) -> Verdict {
    if ratios.len() >= DIVERGENCE_WINDOW
        && ratios[ratios.len() - DIVERGENCE_WINDOW..]
            .iter()
            .all(|&r| r > DIVERGENCE_RATIO)
    {
        Verdict::Diverging
    } else if tail_small(norms, tail_tol) {
        Verdict::Converged
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub psi: Poly,
    pub method: Method,
    pub residual_poly: Poly,
    pub diagnostics: Option<SeriesDiagnostics>,
}

/// Iterates `ψ_k = T[ψ_{k−1}]` from the given leading terms until `max_terms`
/// terms exist, a term after `first_free` vanishes, or the tail drops below
/// `tail_tol` relative to the first nonzero term.
fn continue_series(
    op: &OperatorT,
    mut terms: Vec<Poly>,
    first_free: usize,
    max_terms: usize,
    tail_tol: f64,
) -> Vec<Poly> {
    let max_terms = max_terms.max(1);
    let mut first_norm = terms
        .iter()
        .map(|t| t.max_abs_coeff(DEFAULT_PRECISION_BITS))
        .find(|&v| v > 0.0)
        .unwrap_or(0.0);
    loop {
        let last = terms.last().unwrap();
        let idx = terms.len() - 1;
        let norm = last.max_abs_coeff(DEFAULT_PRECISION_BITS);
        if first_norm == 0.0 {
            first_norm = norm;
        }
        if idx >= first_free && last.is_zero() {
            break;
        }
        if first_norm > 0.0 && idx > 0 && norm <= tail_tol * first_norm {
            break;
        }
        if terms.len() >= max_terms {
            break;
        }
        let next = op.apply(last);
        terms.push(next);
    }
    terms
}

fn series_solution(p: &Problem, method: Method, terms: Vec<Poly>, tail_tol: f64) -> Solution {
    let diagnostics = SeriesDiagnostics::from_terms(terms, tail_tol);
    let psi = diagnostics.partial_sum();
    Solution {
        residual_poly: p.residual(&psi),
        psi,
        method,
        diagnostics: Some(diagnostics),
    }
}

/// Classic perturbation series truncated at `max_terms` terms.
pub fn pm_solve(p: &Problem, max_terms: usize, tail_tol: f64) -> Solution {
    let terms = continue_series(&p.op, vec![p.f.clone()], 0, max_terms, tail_tol);
    series_solution(p, Method::Pm, terms, tail_tol)
}

/// Modified perturbation series seeded by `f1`; `f2 = f − f1`.
pub fn mpm_solve(p: &Problem, f1: &Poly, max_terms: usize, tail_tol: f64) -> Solution {
    let f2 = &p.f - f1;
    let mut terms = vec![f1.clone()];
    if max_terms >= 2 {
        let psi1 = &f2 + &p.op.apply(f1);
        terms.push(psi1);
    }
    let terms = continue_series(&p.op, terms, 1, max_terms, tail_tol);
    series_solution(p, Method::Mpm, terms, tail_tol)
}

/// Exact solution by choosing `f1` so that `ψ_1 = 0`.
pub fn wmpm_solve(p: &Problem) -> Result<Solution, SolveError> {
    let Some(m) = p.f.degree() else {
        return Ok(Solution {
            psi: Poly::zero(),
            method: Method::Wmpm,
            residual_poly: Poly::zero(),
            diagnostics: None,
        });
    };
    let size = m + 1;
    let columns: Vec<Poly> = (0..size)
        .map(|j| p.op.apply(&Poly::monomial(Scalar::one(), j)))
        .collect();
    let matrix: Vec<Vec<Scalar>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let t = columns[j].coeff(i);
                    if i == j {
                        &Scalar::one() - &t
                    } else {
                        -t
                    }
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Scalar> = (0..size).map(|i| p.f.coeff(i)).collect();
    let b = linsolve::solve(matrix, rhs).map_err(|source| SolveError::Singular {
        n: p.n(),
        alpha: p.alpha().to_string(),
        source,
    })?;
    let psi = Poly::new(b);
    Ok(Solution {
        residual_poly: p.residual(&psi),
        psi,
        method: Method::Wmpm,
        diagnostics: None,
    })
}
