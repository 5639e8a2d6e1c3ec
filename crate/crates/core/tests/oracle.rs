//! Closed-form moments against the brute-force quadrature oracle, and the
//! oracle against the Chebyshev identity that does not use the closed form.

use hsie::quad::{self, chebyshev_t, chebyshev_u, QuadConfig};
use hsie::{compute_i, OperatorT, Poly, Scalar};
use proptest::prelude::*;

const GRID: [f64; 7] = [0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75];

fn weight(t: f64) -> f64 {
    (1.0 - t * t).max(0.0).sqrt()
}

#[test]
fn closed_form_moments_match_pv_quadrature() {
    let cfg = QuadConfig::default();
    for j in 0..=8 {
        let ij = compute_i(j).to_float(128);
        for x in GRID {
            let exact = ij.eval(x);
            let numeric = quad::pv_integral(|t: f64| t.powi(j as i32), x, &cfg).unwrap();
            let tol = if exact.abs() < 1e-3 { 1e-8 } else { 1e-6 * exact.abs() };
            assert!((numeric - exact).abs() <= tol, "j={j} x={x}: {numeric} vs {exact}");
        }
    }
}

#[test]
fn pv_of_second_kind_chebyshev_is_first_kind() {
    // PV ∫ √(1−t²) U_k(t)/(t−x) dt = −π T_{k+1}(x)
    let cfg = QuadConfig::default();
    for k in 0..=6 {
        for x in GRID {
            let numeric = quad::pv_integral(|t| chebyshev_u(k, t), x, &cfg).unwrap();
            let exact = -std::f64::consts::PI * chebyshev_t(k + 1, x);
            assert!((numeric - exact).abs() <= 1e-6, "k={k} x={x}: {numeric} vs {exact}");
        }
    }
}

#[test]
fn ordern_matches_differentiated_moments() {
    let cfg = QuadConfig::default();
    for n in 2..=5usize {
        for j in 0..=6usize {
            let exact_poly = compute_i(j).derivative(n - 1).to_float(128);
            for x in [-0.8, -0.4, 0.0, 0.2, 0.6, 0.8] {
                let exact = exact_poly.eval(x);
                let numeric = quad::fp_integral_ordern(|t: f64| t.powi(j as i32), x, n, &cfg).unwrap();
                assert!(
                    (numeric - exact).abs() <= 1e-3 * exact.abs().max(1.0),
                    "n={n} j={j} x={x}: {numeric} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn operator_matches_oracle_pointwise() {
    // T[x²] for n = 2, α = 1 is −3x² + 1/2
    let cfg = QuadConfig::default();
    let op = OperatorT::new(2, Scalar::one()).unwrap();
    let t = op.apply(&Poly::monomial(Scalar::one(), 2));
    let x = 0.3;
    let numeric = quad::fp_integral_order2(|s: f64| weight(s) * s * s, x, &cfg).unwrap() / std::f64::consts::PI;
    assert!((numeric - t.eval_float(x)).abs() < 1e-8);
    assert!((t.eval_float(x) - (-3.0 * x * x + 0.5)).abs() < 1e-15);
}

#[test]
fn halving_smallest_epsilon_is_stable() {
    let base = QuadConfig::default();
    let mut finer = base.clone();
    let last = *finer.epsilon_sequence.last().unwrap();
    finer.epsilon_sequence.push(last / 2.0);
    finer.epsilon_sequence.remove(0);
    for (j, x) in [(0usize, 0.5), (3, -0.25), (8, 0.75)] {
        let a = quad::pv_integral(|t: f64| t.powi(j as i32), x, &base).unwrap();
        let b = quad::pv_integral(|t: f64| t.powi(j as i32), x, &finer).unwrap();
        assert!((a - b).abs() < 10.0 * 1e-6 * a.abs().max(1.0), "pv j={j}: {a} vs {b}");
        let u = |t: f64| weight(t) * t.powi(j as i32);
        let a = quad::fp_integral_order2(u, x, &base).unwrap();
        let b = quad::fp_integral_order2(u, x, &finer).unwrap();
        assert!((a - b).abs() < 10.0 * 1e-4 * a.abs().max(1.0), "fp j={j}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order2_bracket_agrees_with_differentiated_pv(
        cs in prop::collection::vec(-3.0f64..3.0, 1..=5),
        x in -0.8f64..0.8,
    ) {
        let cfg = QuadConfig::default();
        let psi = |t: f64| cs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let bracket = quad::fp_integral_order2(|t| weight(t) * psi(t), x, &cfg).unwrap();
        let derivative = quad::fp_integral_ordern(psi, x, 2, &cfg).unwrap();
        prop_assert!((bracket - derivative).abs() <= 1e-3 * bracket.abs().max(1.0),
            "{} vs {}", bracket, derivative);
    }
}
