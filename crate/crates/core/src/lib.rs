//! Exact perturbation solvers for second-kind hypersingular integral equations
//!
//! ```text
//! u(x) = √(1−x²) f(x) + (α/π) √(1−x²) FP∫_{−1}^{1} u(t)/(t−x)ⁿ dt,   −1 < x < 1,
//! ```
//!
//! with polynomial forcing `f`. Writing `u = √(1−x²) ψ` turns the equation
//! into `ψ = f + T[ψ]` where `T` maps polynomials to polynomials with
//! coefficients in ℚ(π); see [`kernel`]. The solvers in [`solvers`] work in
//! that exact field, and [`quad`] provides an independent numerical check
//! of the singular integrals.

pub mod cli;
pub mod kernel;
pub mod linsolve;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod solvers;
pub mod verify;

pub use kernel::{compute_i, gamma_ratio, u_from_psi, OperatorT, WeightedSolution};
pub use poly::Poly;
pub use quad::QuadConfig;
pub use scalar::{Rational, Scalar};
pub use solvers::{mpm_solve, pm_solve, wmpm_solve, Method, Problem, Solution, Verdict};
