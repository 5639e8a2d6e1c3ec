//! Checks a candidate ψ against the original equation in u, using only the
//! numerical oracle for the singular integral.

use serde::Serialize;

use crate::kernel::WeightedSolution;
use crate::poly::Poly;
use crate::quad::{self, QuadConfig, QuadError};
use crate::solvers::Problem;

/// Half-width of the verification grid: the finite-difference stencil used
/// for n ≥ 3 needs extra room inside the quadrature guard.
pub fn grid_half_width(n: usize) -> f64 {
    if n == 2 {
        0.9
    } else {
        0.8
    }
}

/// Pass threshold on the sup of the pointwise equation residual.
pub fn tolerance(n: usize) -> f64 {
    if n == 2 {
        1e-4
    } else {
        1e-3
    }
}

/// `grid_size` equispaced points on `[−w, w]`; a single point sits at 0.
pub fn grid(half_width: f64, grid_size: usize) -> Vec<f64> {
    match grid_size {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..grid_size)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (grid_size - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub grid_size: usize,
    pub half_width: f64,
    pub sup_error: f64,
    pub worst_x: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `u(x) − √(1−x²) f(x) − (α/π) √(1−x²) FPₙ[u](x)` with `u = √(1−x²) ψ`.
///
/// For n = 2 the finite part comes from the ε-bracket definition applied to
/// u directly; for n ≥ 3 it is `(1/(n−1)!) dⁿ⁻¹/dxⁿ⁻¹` of the principal value.
pub fn equation_residual_at(
    problem: &Problem,
    u: &WeightedSolution,
    x: f64,
    precision_bits: u32,
    cfg: &QuadConfig,
) -> Result<f64, QuadError> {
    let n = problem.n();
    let alpha = problem.alpha().to_f64(precision_bits);
    let f = problem.f().to_float(precision_bits);
    let psi = u.psi().to_float(precision_bits);
    let fp = if n == 2 {
        quad::fp_integral_order2(|t| u.eval(t), x, cfg)?
    } else {
        let factorial: f64 = (1..n).map(|k| k as f64).product();
        quad::fp_integral_ordern(|t| psi.eval(t), x, n, cfg)? / factorial
    };
    let w = WeightedSolution::weight(x);
    Ok(u.eval(x) - w * f.eval(x) - alpha / std::f64::consts::PI * w * fp)
}

pub fn verify_solution(
    problem: &Problem,
    psi: &Poly,
    grid_size: usize,
    precision_bits: u32,
    cfg: &QuadConfig,
) -> Result<VerifyReport, QuadError> {
    let n = problem.n();
    let half_width = grid_half_width(n);
    let u = WeightedSolution::new(psi.clone());
    let points = grid(half_width, grid_size);
    let errors = std::thread::scope(|scope| {
        let workers = std::thread::available_parallelism().map_or(1, |c| c.get()).min(8);
        let chunk = points.len().div_ceil(workers).max(1);
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|xs| {
                let u = &u;
                scope.spawn(move || {
                    xs.iter()
                        .map(|&x| equation_residual_at(problem, u, x, precision_bits, cfg))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let (worst_x, sup_error) = points
        .iter()
        .zip(errors.iter().flatten())
        .map(|(&x, &e)| (x, e.abs()))
        .fold((0.0, 0.0), |acc, (x, e)| if e > acc.1 { (x, e) } else { acc });
    let tolerance = tolerance(n);
    Ok(VerifyReport {
        grid_size: points.len(),
        half_width,
        sup_error,
        worst_x,
        tolerance,
        pass: sup_error < tolerance,
    })
}
