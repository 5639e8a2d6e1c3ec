//! Brute-force numerical evaluation of the singular integrals.
//!
//! This module never uses the closed-form moments; it is the independent
//! check on them. Both integrals are computed literally from their limit
//! definitions:
//!
//! * principal value: `∫_{−1}^{x−ε} + ∫_{x+ε}^{1}` of `√(1−t²)ψ(t)/(t−x)`,
//! * Hadamard finite part (order 2): the same excluded integral of
//!   `u(t)/(t−x)²` minus `[u(x+ε) + u(x−ε)]/ε`,
//!
//! evaluated on a decreasing sequence of ε and extrapolated to ε = 0 with
//! Neville's scheme (Richardson extrapolation with orders 1, 2, 3, …).
//! The excluded integrals use composite Gauss–Legendre on panels that grow
//! geometrically away from the singularity; the outermost panel on each side
//! is mapped through `t = cos θ` so the square-root endpoint behavior becomes
//! smooth. Higher orders use central finite differences of the principal
//! value in x.

use std::f64::consts::PI;

/// Largest |x| accepted by the principal-value and order-2 evaluators.
pub const PV_GUARD: f64 = 0.9;
/// Largest |x| accepted by the order-n evaluator.
pub const ORDERN_GUARD: f64 = 0.8;
/// Base finite-difference step for the order-n evaluator.
pub const FD_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("non-finite integrand value at t = {0}")]
    NonFinite(f64),
    #[error("x = {x} outside the guard band |x| <= {guard}")]
    OutsideGuard { x: f64, guard: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("finite-part order {0} not supported (2..=5)")]
    UnsupportedOrder(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    /// Strictly decreasing exclusion radii.
    pub epsilon_sequence: Vec<f64>,
    /// Gauss–Legendre nodes per panel.
    pub panel_points: usize,
    /// Polynomial degree of the ε → 0 extrapolant.
    pub extrapolation_order: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            epsilon_sequence: (0..6).map(|k| 1e-2 / f64::powi(2.0, k)).collect(),
            panel_points: 24,
            extrapolation_order: 5,
        }
    }
}

impl QuadConfig {
    fn validate(&self, x: f64) -> Result<(), QuadError> {
        if self.epsilon_sequence.is_empty() {
            return Err(QuadError::InvalidConfig("empty epsilon sequence".into()));
        }
        if self.panel_points < 2 {
            return Err(QuadError::InvalidConfig("panel_points must be >= 2".into()));
        }
        if self
            .epsilon_sequence
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
        {
            return Err(QuadError::InvalidConfig(
                "epsilon sequence must be strictly decreasing".into(),
            ));
        }
        let limit = 0.5 * (1.0 - x.abs());
        let first = self.epsilon_sequence[0];
        let last = *self.epsilon_sequence.last().unwrap();
        if last.is_nan() || last <= 0.0 || first.is_nan() || first >= limit {
            return Err(QuadError::InvalidConfig(format!(
                "epsilon values must lie in (0, {limit})"
            )));
        }
        Ok(())
    }
}

fn check_guard(x: f64, guard: f64) -> Result<(), QuadError> {
    if x.is_finite() && x.abs() <= guard {
        Ok(())
    } else {
        Err(QuadError::OutsideGuard { x, guard })
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Panels {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Panels {
    fn new(points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        Panels { nodes, weights }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, g: &F) -> Result<f64, QuadError> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            let s = mid + half * z;
            let v = g(s);
            if !v.is_finite() {
                return Err(QuadError::NonFinite(s));
            }
            sum += w * v;
        }
        Ok(half * sum)
    }

    /// ∫_a^b F(t) dt with `t = cos θ`; `a` or `b` may be ±1.
    fn integrate_cos<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> Result<f64, QuadError> {
        let (th_lo, th_hi) = (b.acos(), a.acos());
        self.integrate(th_lo, th_hi, &|th: f64| {
            let v = f(th.cos()) * th.sin();
            if v.is_finite() {
                v
            } else {
                f64::NAN
            }
        })
        .map_err(|e| match e {
            QuadError::NonFinite(th) => QuadError::NonFinite(th.cos()),
            other => other,
        })
    }

    /// `∫_{−1}^{x−ε} F + ∫_{x+ε}^{1} F` on geometrically graded panels.
    fn excluded<F: Fn(f64) -> f64>(&self, f: &F, x: f64, eps: f64) -> Result<f64, QuadError> {
        let mut total = 0.0;
        for side in [1.0, -1.0] {
            let reach = 1.0 - side * x;
            let mut d = eps;
            loop {
                let next = 2.0 * d;
                // last panel: from the current point out to the endpoint
                if next >= 0.5 * reach {
                    let (a, b) = ordered_pair(x + side * d, side);
                    total += self.integrate_cos(a, b, f)?;
                    break;
                }
                let (a, b) = ordered_pair(x + side * d, x + side * next);
                total += self.integrate(a, b, f)?;
                d = next;
            }
        }
        Ok(total)
    }
}

fn ordered_pair(p: f64, q: f64) -> (f64, f64) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Neville extrapolation of `(h_i, v_i)` to h = 0.
fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m]);
        }
    }
    p[0]
}

fn extrapolated<G>(cfg: &QuadConfig, mut bracket: G) -> Result<f64, QuadError>
where
    G: FnMut(f64) -> Result<f64, QuadError>,
{
    let count = (cfg.extrapolation_order + 1).min(cfg.epsilon_sequence.len());
    let eps = &cfg.epsilon_sequence[..count];
    let values = eps
        .iter()
        .map(|&e| bracket(e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(extrapolate_to_zero(eps, &values))
}

/// `PV ∫_{−1}^{1} √(1−t²) ψ(t) / (t − x) dt`.
pub fn pv_integral<P: Fn(f64) -> f64>(psi: P, x: f64, cfg: &QuadConfig) -> Result<f64, QuadError> {
    check_guard(x, PV_GUARD)?;
    cfg.validate(x)?;
    let panels = Panels::new(cfg.panel_points);
    let integrand = |t: f64| (1.0 - t * t).max(0.0).sqrt() * psi(t) / (t - x);
    extrapolated(cfg, |eps| panels.excluded(&integrand, x, eps))
}

/// Hadamard finite part `FP ∫_{−1}^{1} u(t) / (t − x)² dt` from its
/// ε-bracket definition. `u` must vanish at ±1.
pub fn fp_integral_order2<U: Fn(f64) -> f64>(
    u: U,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, QuadError> {
    check_guard(x, PV_GUARD)?;
    cfg.validate(x)?;
    let panels = Panels::new(cfg.panel_points);
    let integrand = |t: f64| u(t) / ((t - x) * (t - x));
    extrapolated(cfg, |eps| {
        let boundary = (u(x + eps) + u(x - eps)) / eps;
        if !boundary.is_finite() {
            return Err(QuadError::NonFinite(x));
        }
        Ok(panels.excluded(&integrand, x, eps)? - boundary)
    })
}

/// `d^{n−1}/dx^{n−1} PV ∫ √(1−t²) ψ(t)/(t − x) dt` by a fourth-order central
/// stencil with step [`FD_STEP`]. The finite part of order n is this value
/// divided by (n−1)!; callers apply that factor.
pub fn fp_integral_ordern<P: Fn(f64) -> f64>(
    psi: P,
    x: f64,
    n: usize,
    cfg: &QuadConfig,
) -> Result<f64, QuadError> {
    fp_integral_ordern_with_error(psi, x, n, cfg).map(|(v, _)| v)
}

/// As [`fp_integral_ordern`], also returning |D(h) − D(h/2)| as an error estimate.
pub fn fp_integral_ordern_with_error<P: Fn(f64) -> f64>(
    psi: P,
    x: f64,
    n: usize,
    cfg: &QuadConfig,
) -> Result<(f64, f64), QuadError> {
    if !(2..=5).contains(&n) {
        return Err(QuadError::UnsupportedOrder(n));
    }
    check_guard(x, ORDERN_GUARD)?;
    let (offsets, weights, divisor_pow) = stencil(n - 1);
    let pv = |s: f64| pv_integral(&psi, s, cfg);
    let diff = |h: f64| -> Result<f64, QuadError> {
        let mut acc = 0.0;
        for (o, w) in offsets.iter().zip(weights) {
            if *w == 0.0 {
                continue;
            }
            acc += w * pv(x + *o as f64 * h)?;
        }
        Ok(acc / h.powi(divisor_pow))
    };
    let coarse = diff(FD_STEP)?;
    let fine = diff(0.5 * FD_STEP)?;
    Ok((coarse, (coarse - fine).abs()))
}

/// Fourth-order central stencils: (offsets, weights with the normalizing
/// constant folded in, power of h).
fn stencil(order: usize) -> (&'static [i32], &'static [f64], i32) {
    const O2: [i32; 5] = [-2, -1, 0, 1, 2];
    const O3: [i32; 7] = [-3, -2, -1, 0, 1, 2, 3];
    const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
    const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
    const D3: [f64; 7] = [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0];
    const D4: [f64; 7] = [
        -1.0 / 6.0,
        2.0,
        -13.0 / 2.0,
        28.0 / 3.0,
        -13.0 / 2.0,
        2.0,
        -1.0 / 6.0,
    ];
    match order {
        1 => (&O2, &D1, 1),
        2 => (&O2, &D2, 2),
        3 => (&O3, &D3, 3),
        4 => (&O3, &D4, 4),
        _ => unreachable!("order checked by caller"),
    }
}

/// Chebyshev polynomial of the first kind by three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        (a, b) = (b, 2.0 * x * b - a);
    }
    b
}

/// Chebyshev polynomial of the second kind by three-term recurrence.
pub fn chebyshev_u(k: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * x);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        (a, b) = (b, 2.0 * x * b - a);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // ∫ t^18 = 2/19 is exact for 10 nodes
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let v: Vec<f64> = h.iter().map(|h| 3.0 + 2.0 * h - h * h * h).collect();
        assert!((extrapolate_to_zero(&h, &v) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn pv_examples() {
        let v = pv_integral(|_| 1.0, 0.5, &cfg()).unwrap();
        assert!((v + PI / 2.0).abs() < 1e-9, "{v}");
        let v = pv_integral(|t| t, 0.0, &cfg()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-9, "{v}");
        let v = pv_integral(|_| 1.0, 0.0, &cfg()).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn fp_order2_examples() {
        let w = |t: f64| (1.0 - t * t).max(0.0).sqrt();
        for x in [-0.9, -0.3, 0.0, 0.45, 0.9] {
            let v = fp_integral_order2(w, x, &cfg()).unwrap();
            assert!((v + PI).abs() < 1e-4 * PI, "x={x}: {v}");
        }
        let v = fp_integral_order2(|t| w(t) * t, 0.0, &cfg()).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn fp_order2_example_one_balance() {
        let b0 = 4.0 * PI / (PI + 2.0);
        let u = |t: f64| b0 * (1.0 - t * t).max(0.0).sqrt();
        let x: f64 = 0.3;
        let fp = fp_integral_order2(u, x, &cfg()).unwrap();
        let rhs = 2.0 * PI + 0.5 * fp;
        assert!((rhs - b0).abs() < 1e-4 * b0, "{rhs} vs {b0}");
    }

    #[test]
    fn ordern_examples() {
        let v = fp_integral_ordern(|_| 1.0, 0.1, 2, &cfg()).unwrap();
        assert!((v + PI).abs() < 1e-3 * PI, "{v}");
        let x = 0.2;
        let v = fp_integral_ordern(|t| t * t, x, 3, &cfg()).unwrap();
        assert!((v + 6.0 * PI * x).abs() < 1e-3 * 6.0 * PI * x, "{v}");
        let v = fp_integral_ordern(|_| 1.0, 0.0, 4, &cfg()).unwrap();
        assert!(v.abs() < 1e-3, "{v}");
    }

    #[test]
    fn guards_and_config_errors() {
        assert!(matches!(
            pv_integral(|_| 1.0, 0.95, &cfg()),
            Err(QuadError::OutsideGuard { .. })
        ));
        assert!(matches!(
            fp_integral_ordern(|_| 1.0, 0.85, 3, &cfg()),
            Err(QuadError::OutsideGuard { .. })
        ));
        assert!(matches!(
            fp_integral_ordern(|_| 1.0, 0.0, 6, &cfg()),
            Err(QuadError::UnsupportedOrder(6))
        ));
        let bad = QuadConfig {
            epsilon_sequence: vec![1e-3, 1e-2],
            ..cfg()
        };
        assert!(matches!(
            pv_integral(|_| 1.0, 0.0, &bad),
            Err(QuadError::InvalidConfig(_))
        ));
        let too_wide = QuadConfig {
            epsilon_sequence: vec![0.2, 0.1],
            ..cfg()
        };
        assert!(pv_integral(|_| 1.0, 0.8, &too_wide).is_err());
        assert!(matches!(
            pv_integral(|t| if t > 0.5 { f64::NAN } else { 1.0 }, 0.0, &cfg()),
            Err(QuadError::NonFinite(_))
        ));
    }

    #[test]
    fn chebyshev_recurrences() {
        let x: f64 = 0.37;
        assert_eq!(chebyshev_t(0, x), 1.0);
        assert_eq!(chebyshev_u(0, x), 1.0);
        assert!((chebyshev_t(3, x) - (4.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
        assert!((chebyshev_u(2, x) - (4.0 * x * x - 1.0)).abs() < 1e-15);
        let th = x.acos();
        assert!((chebyshev_t(5, x) - (5.0 * th).cos()).abs() < 1e-14);
        assert!((chebyshev_u(5, x) - (6.0 * th).sin() / th.sin()).abs() < 1e-13);
    }
}
