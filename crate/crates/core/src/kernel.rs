//! Closed-form principal-value moments and the integral operator.
//!
//! For the weighted Cauchy moments
//!
//! ```text
//! I_j(x) = PV ∫_{-1}^{1} √(1−t²) tʲ / (t − x) dt
//! ```
//!
//! the closed form is `−π x^{j+1} + Σ_{i<j} g(i) x^{j−i−1}` with
//! `g(i) = (1+(−1)ⁱ)/4 · Γ(1/2)Γ((i+1)/2)/Γ((i+4)/2)`. Every `g(i)` is a
//! rational multiple of π, so the operator
//!
//! ```text
//! T[ψ](x) = α/(π (n−1)!) · d^{n−1}/dx^{n−1} PV ∫ √(1−t²) ψ(t)/(t − x) dt
//! ```
//!
//! maps polynomials over ℚ(π) to polynomials over ℚ(π) exactly. The
//! hypersingular equation in ψ reads `ψ = f + T[ψ]`.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::{FloatPoly, Poly};
use crate::scalar::{Rational, Scalar, DEFAULT_PRECISION_BITS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("singularity order n must be at least 2 (got {0})")]
    OrderTooSmall(usize),
    #[error("alpha must be a positive real (got {0})")]
    NonPositiveAlpha(String),
}

/// `g(i)` from the moment formula, exactly.
///
/// Odd `i` gives 0. For `i = 2r`, with `Γ(r+1/2) = √π · Π_{k<r}(k+1/2)`
/// and `Γ(r+2) = (r+1)!`, the value is `π/2 · Π_{k<r}(k+1/2) / (r+1)!`.
pub fn gamma_ratio(i: usize) -> Scalar {
    if i % 2 == 1 {
        return Scalar::zero();
    }
    let r = i / 2;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    // Γ(r + 1/2) / Γ(1/2)
    let half_int_gamma: Rational = (0..r)
        .map(|k| Rational::from_integer(BigInt::from(k)) + &half)
        .fold(Rational::one(), |acc, f| acc * f);
    let factorial: BigInt = (1..=r + 1).map(BigInt::from).product();
    let coeff = half_int_gamma * half / Rational::from_integer(factorial);
    &Scalar::from_rational(coeff) * &Scalar::pi()
}

/// Closed-form `I_j` as an exact polynomial of degree `j + 1`.
///
/// Results are memoized for the life of the process.
pub fn compute_i(j: usize) -> Poly {
    static TABLE: OnceLock<Mutex<Vec<Poly>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(Vec::new()));
    let mut table = table.lock().unwrap();
    while table.len() <= j {
        let next = moment_closed_form(table.len());
        table.push(next);
    }
    table[j].clone()
}

fn moment_closed_form(j: usize) -> Poly {
    let mut coeffs = vec![Scalar::zero(); j + 2];
    coeffs[j + 1] = -Scalar::pi();
    for i in 0..j {
        coeffs[j - i - 1] = gamma_ratio(i);
    }
    Poly::new(coeffs)
}

/// The operator `T` for fixed singularity order `n` and strength `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorT {
    n: usize,
    alpha: Scalar,
    // α / (π (n−1)!)
    prefactor: Scalar,
}

impl OperatorT {
    pub fn new(n: usize, alpha: Scalar) -> Result<Self, OperatorError> {
        if n < 2 {
            return Err(OperatorError::OrderTooSmall(n));
        }
        if !alpha.is_positive() {
            return Err(OperatorError::NonPositiveAlpha(alpha.to_string()));
        }
        let gamma_n: BigInt = (1..n).map(BigInt::from).product();
        let denom = &Scalar::pi() * &Scalar::from_rational(gamma_n.into());
        let prefactor = alpha
            .checked_div(&denom)
            .expect("π·(n−1)! is nonzero");
        Ok(OperatorT {
            n,
            alpha,
            prefactor,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    /// `T[ψ]`, the term added to `f` on the right-hand side.
    pub fn apply(&self, psi: &Poly) -> Poly {
        let moments = psi
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Poly::zero(), |acc, (j, c)| &acc + &compute_i(j).scale(c));
        moments.derivative(self.n - 1).scale(&self.prefactor)
    }

    /// `ψ − f − T[ψ]`; the zero polynomial certifies an exact solution.
    pub fn residual(&self, f: &Poly, psi: &Poly) -> Poly {
        &(psi - f) - &self.apply(psi)
    }
}

/// `u(x) = √(1−x²) ψ(x)`, kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSolution {
    psi: Poly,
    psi_float: FloatPoly,
}

impl WeightedSolution {
    pub fn new(psi: Poly) -> Self {
        let psi_float = psi.to_float(DEFAULT_PRECISION_BITS);
        WeightedSolution { psi, psi_float }
    }

    pub fn psi(&self) -> &Poly {
        &self.psi
    }

    /// `√(1−x²)`; exactly 0 at ±1 and NaN outside [−1, 1].
    pub fn weight(x: f64) -> f64 {
        if x.abs() == 1.0 {
            0.0
        } else {
            (1.0 - x * x).sqrt()
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = Self::weight(x);
        if w == 0.0 {
            return 0.0;
        }
        w * self.psi_float.eval(x)
    }
}

impl fmt::Display for WeightedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.psi.is_zero() {
            return f.write_str("0");
        }
        write!(f, "({})*sqrt(1-x^2)", self.psi)
    }
}

pub fn u_from_psi(psi: Poly) -> WeightedSolution {
    WeightedSolution::new(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_one_op() -> OperatorT {
        OperatorT::new(2, Scalar::pi_power(1, 2, 1)).unwrap()
    }

    #[test]
    fn gamma_ratio_values() {
        assert!(gamma_ratio(1).is_zero());
        assert!(gamma_ratio(7).is_zero());
        assert_eq!(gamma_ratio(0), Scalar::pi_power(1, 2, 1));
        assert_eq!(gamma_ratio(2), Scalar::pi_power(1, 8, 1));
        // (1/2)·Γ(1/2)Γ(5/2)/Γ(4) = (1/2)(3π/4)/6 = π/16
        assert_eq!(gamma_ratio(4), Scalar::pi_power(1, 16, 1));
    }

    #[test]
    fn first_moments() {
        let pi = Scalar::pi();
        assert_eq!(compute_i(0), Poly::monomial(-pi.clone(), 1));
        assert_eq!(
            compute_i(1),
            Poly::new(vec![Scalar::pi_power(1, 2, 1), Scalar::zero(), -pi.clone()])
        );
        assert_eq!(
            compute_i(2),
            Poly::new(vec![Scalar::zero(), Scalar::pi_power(1, 2, 1), Scalar::zero(), -pi])
        );
    }

    #[test]
    fn moment_structure() {
        for j in 0..=10 {
            let ij = compute_i(j);
            assert_eq!(ij.degree(), Some(j + 1));
            assert_eq!(ij.coeff(j + 1), -Scalar::pi());
            // I_j(−x) = (−1)^{j+1} I_j(x)
            let expected = if j % 2 == 0 { -&ij } else { ij.clone() };
            assert_eq!(ij.reflect(), expected, "parity of I_{j}");
        }
    }

    #[test]
    fn even_moment_shift_identity() {
        for k in 1..=8 {
            assert_eq!(compute_i(2 * k), &Poly::x() * &compute_i(2 * k - 1));
        }
    }

    #[test]
    fn apply_examples() {
        let op = example_one_op();
        let two_pi = Poly::constant(Scalar::pi_power(2, 1, 1));
        assert_eq!(op.apply(&two_pi), Poly::constant(Scalar::pi_power(-1, 1, 2)));
        assert!(op.apply(&Poly::zero()).is_zero());

        // n = 2: T[x²] = −3αx² + α/2
        for alpha in [Scalar::one(), Scalar::ratio(3, 7), Scalar::pi_power(2, 3, 1)] {
            let op = OperatorT::new(2, alpha.clone()).unwrap();
            let expected = Poly::new(vec![
                &alpha * &Scalar::ratio(1, 2),
                Scalar::zero(),
                &alpha * &Scalar::from_int(-3),
            ]);
            assert_eq!(op.apply(&Poly::monomial(Scalar::one(), 2)), expected);
        }
    }

    #[test]
    fn degree_law() {
        let alpha = Scalar::ratio(5, 2);
        for n in 2..=5 {
            let op = OperatorT::new(n, alpha.clone()).unwrap();
            for j in 0..=8usize {
                let t = op.apply(&Poly::monomial(Scalar::one(), j));
                if j + 2 >= n {
                    assert_eq!(t.degree(), Some(j + 2 - n), "n={n} j={j}");
                } else {
                    assert!(t.is_zero());
                }
            }
        }
    }

    #[test]
    fn residual_examples() {
        let op = example_one_op();
        let f = Poly::constant(Scalar::pi_power(2, 1, 1));
        let b0 = Scalar::pi_power(4, 1, 1)
            .checked_div(&(&Scalar::pi() + &Scalar::from_int(2)))
            .unwrap();
        assert!(op.residual(&f, &Poly::constant(b0)).is_zero());
        assert!(op.residual(&Poly::zero(), &Poly::zero()).is_zero());

        let op = OperatorT::new(2, Scalar::one()).unwrap();
        let one = Poly::constant(Scalar::one());
        assert_eq!(op.residual(&one, &one), one);
    }

    #[test]
    fn operator_validation() {
        assert_eq!(
            OperatorT::new(1, Scalar::one()),
            Err(OperatorError::OrderTooSmall(1))
        );
        assert!(matches!(
            OperatorT::new(2, Scalar::zero()),
            Err(OperatorError::NonPositiveAlpha(_))
        ));
        assert!(OperatorT::new(3, &Scalar::from_int(3) - &Scalar::pi()).is_err());
        assert!(OperatorT::new(3, &Scalar::pi() - &Scalar::from_int(3)).is_ok());
    }

    #[test]
    fn weighted_solution() {
        let b0 = Scalar::pi_power(4, 1, 1)
            .checked_div(&(&Scalar::pi() + &Scalar::from_int(2)))
            .unwrap();
        let u = u_from_psi(Poly::constant(b0.clone()));
        assert_eq!(u.to_string(), "(4*pi/(pi+2))*sqrt(1-x^2)");
        let x: f64 = 0.3;
        assert!((u.eval(x) - b0.to_f64(128) * (1.0 - x * x).sqrt()).abs() < 1e-15);
        assert_eq!(u.eval(1.0), 0.0);
        assert_eq!(u.eval(-1.0), 0.0);

        let zero = u_from_psi(Poly::zero());
        assert_eq!(zero.eval(0.4), 0.0);
        assert_eq!(zero.to_string(), "0");
        let one = u_from_psi(Poly::constant(Scalar::one()));
        assert_eq!(one.eval(1.0), 0.0);
        assert_eq!(one.eval(-1.0), 0.0);
        assert!(one.eval(1.5).is_nan());
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-9i64..=9, 1i64..=4, any::<bool>()), 0..=6).prop_map(|cs| {
            Poly::new(
                cs.into_iter()
                    .map(|(p, q, pi)| if pi { Scalar::pi_power(p, q, 1) } else { Scalar::ratio(p, q) })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn operator_is_linear(
            n in 2usize..=5,
            a in -5i64..=5, b in -5i64..=5,
            p in small_poly(), q in small_poly(),
        ) {
            let op = OperatorT::new(n, Scalar::ratio(3, 2)).unwrap();
            let a = Scalar::from_int(a);
            let b = Scalar::from_int(b);
            let lhs = op.apply(&(&p.scale(&a) + &q.scale(&b)));
            let rhs = &op.apply(&p).scale(&a) + &op.apply(&q).scale(&b);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
