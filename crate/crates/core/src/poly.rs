//! Dense univariate polynomials in x with [`Scalar`] coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize};

use crate::scalar::{Scalar, DEFAULT_PRECISION_BITS};

/// `coeffs[j]` is the coefficient of xʲ. The zero polynomial has no
/// coefficients and there are never trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// c·xʲ
    pub fn monomial(c: Scalar, j: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); j + 1];
        coeffs[j] = c;
        Poly::new(coeffs)
    }

    /// The identity polynomial x.
    pub fn x() -> Self {
        Poly::monomial(Scalar::one(), 1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of xʲ (zero past the degree).
    pub fn coeff(&self, j: usize) -> Scalar {
        self.coeffs.get(j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| c * a).collect())
    }

    /// Exact derivative of the given order.
    pub fn derivative(&self, order: usize) -> Poly {
        if order == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= order {
            return Poly::zero();
        }
        let coeffs = self.coeffs[order..]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                // (i+order)! / i!
                let falling: BigInt = ((i + 1)..=(i + order)).map(BigInt::from).product();
                c * &Scalar::from_rational(falling.into())
            })
            .collect();
        Poly::new(coeffs)
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Float Horner evaluation with coefficients projected at 128 bits.
    pub fn eval_float(&self, x: f64) -> f64 {
        FloatPoly::from_poly(self, DEFAULT_PRECISION_BITS).eval(x)
    }

    pub fn to_float(&self, precision_bits: u32) -> FloatPoly {
        FloatPoly::from_poly(self, precision_bits)
    }

    /// Largest coefficient magnitude after float projection; 0 for the zero polynomial.
    pub fn max_abs_coeff(&self, precision_bits: u32) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64(precision_bits).abs())
            .fold(0.0, f64::max)
    }

    /// p(−x)
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| if j % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            coeffs: Vec<Scalar>,
        }
        Ok(Poly::new(Repr::deserialize(deserializer)?.coeffs))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..len)
                .map(|j| match (self.coeffs.get(j), rhs.coeffs.get(j)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::new(coeffs)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

/// Renders as `c0 + c1*x + c2*x^2`, parenthesizing compound coefficients.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = c.to_string();
            let compound = cs.contains('+') || cs[1..].contains('-');
            let x_part = match j {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{j}"),
            };
            if x_part.is_empty() {
                if compound && self.coeffs.len() > 1 {
                    write!(f, "({cs})")?;
                } else {
                    f.write_str(&cs)?;
                }
            } else if c.is_one() {
                f.write_str(&x_part)?;
            } else if compound {
                write!(f, "({cs})*{x_part}")?;
            } else {
                write!(f, "{cs}*{x_part}")?;
            }
        }
        Ok(())
    }
}

/// Float image of a [`Poly`] for repeated numeric evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly {
    coeffs: Vec<f64>,
}

impl FloatPoly {
    pub fn from_poly(p: &Poly, precision_bits: u32) -> Self {
        FloatPoly {
            coeffs: p.coeffs.iter().map(|c| c.to_f64(precision_bits)).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_poly(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = int_poly(&[1, 1]);
        let q = int_poly(&[-1, -1]);
        assert!((&p + &q).is_zero());
        assert_eq!((&p + &q).degree(), None);
    }

    #[test]
    fn scaling() {
        assert_eq!(int_poly(&[0, 0, 1]).scale(&Scalar::from_int(2)), int_poly(&[0, 0, 2]));
        let pi = Scalar::pi();
        assert_eq!(
            int_poly(&[1, 1]).scale(&pi),
            Poly::new(vec![pi.clone(), pi.clone()])
        );
        assert!(int_poly(&[3, 4]).scale(&Scalar::zero()).is_zero());
    }

    #[test]
    fn derivative_of_i2() {
        // d/dx(−πx³ + (π/2)x) = −3πx² + π/2
        let i2 = Poly::new(vec![
            Scalar::zero(),
            Scalar::pi_power(1, 2, 1),
            Scalar::zero(),
            Scalar::pi_power(-1, 1, 1),
        ]);
        let expected = Poly::new(vec![
            Scalar::pi_power(1, 2, 1),
            Scalar::zero(),
            Scalar::pi_power(-3, 1, 1),
        ]);
        assert_eq!(i2.derivative(1), expected);
        assert!(Poly::x().derivative(2).is_zero());
        assert_eq!(i2.derivative(0), i2);
    }

    #[test]
    fn evaluation() {
        let minus_pi_x = Poly::monomial(-Scalar::pi(), 1);
        assert_eq!(minus_pi_x.eval(&Scalar::one()), -Scalar::pi());
        let i1 = Poly::new(vec![Scalar::pi_power(1, 2, 1), Scalar::zero(), -Scalar::pi()]);
        assert_eq!(i1.eval(&Scalar::zero()), Scalar::pi_power(1, 2, 1));
        assert!(Poly::zero().eval(&Scalar::pi()).is_zero());
        assert_eq!(Poly::zero().eval_float(0.3), 0.0);
        assert!((i1.eval_float(0.5) - (std::f64::consts::PI / 2.0 - std::f64::consts::PI / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn display() {
        let b0 = Scalar::pi_power(4, 1, 1)
            .checked_div(&(&Scalar::pi() + &Scalar::from_int(2)))
            .unwrap();
        assert_eq!(Poly::constant(b0.clone()).to_string(), "4*pi/(pi+2)");
        let p = Poly::new(vec![Scalar::ratio(1, 4), Scalar::zero(), Scalar::one()]);
        assert_eq!(p.to_string(), "1/4 + x^2");
        let q = Poly::new(vec![Scalar::zero(), b0, Scalar::pi_power(-3, 1, 1)]);
        assert_eq!(q.to_string(), "(4*pi/(pi+2))*x + -3*pi*x^2");
    }

    #[test]
    fn json_shape() {
        let p = Poly::new(vec![Scalar::one(), Scalar::zero()]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"coeffs":[{"num":[[1,1]],"den":[[1,1]]}]}"#);
        let back: Poly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let padded: Poly = serde_json::from_str(
            r#"{"coeffs":[{"num":[[1,1]],"den":[[1,1]]},{"num":[],"den":[[1,1]]}]}"#,
        )
        .unwrap();
        assert_eq!(padded.degree(), Some(0));
    }

    fn coeff() -> impl Strategy<Value = Scalar> {
        (-20i64..=20, 1i64..=5, 0usize..=2, any::<bool>()).prop_map(|(p, q, k, with_pi)| {
            if with_pi {
                Scalar::pi_power(p, q, k)
            } else {
                Scalar::ratio(p, q)
            }
        })
    }

    fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(coeff(), 0..=max_len).prop_map(Poly::new)
    }

    fn deg(p: &Poly) -> i64 {
        p.degree().map_or(-1, |d| d as i64)
    }

    proptest! {
        #[test]
        fn degree_laws(p in poly(6), q in poly(6), c in coeff()) {
            let sum = &p + &q;
            prop_assert!(deg(&sum) <= deg(&p).max(deg(&q)));
            if deg(&p) != deg(&q) {
                prop_assert_eq!(deg(&sum), deg(&p).max(deg(&q)));
            }
            let scaled = p.scale(&c);
            if c.is_zero() {
                prop_assert!(scaled.is_zero());
            } else {
                prop_assert_eq!(deg(&scaled), deg(&p));
            }
            if !p.is_zero() && !q.is_zero() {
                prop_assert_eq!(deg(&(&p * &q)), deg(&p) + deg(&q));
            }
        }

        #[test]
        fn derivative_composes(p in poly(13)) {
            prop_assert_eq!(p.derivative(1).derivative(1), p.derivative(2));
        }

        #[test]
        fn float_eval_matches_exact(
            cs in prop::collection::vec((-1_000_000i64..=1_000_000, 1i64..=7, 0usize..=2), 0..8),
            xn in -64i64..=64,
        ) {
            let p = Poly::new(cs.into_iter().map(|(a, b, k)| Scalar::pi_power(a, b, k)).collect());
            let x = Scalar::ratio(xn, 64);
            let exact = p.eval(&x).to_f64(128);
            let approx = p.eval_float(xn as f64 / 64.0);
            // relative to the Horner condition scale Σ|c_j||x|^j
            let xf = xn as f64 / 64.0;
            let cond: f64 = p.to_float(128).coeffs().iter().enumerate()
                .map(|(j, c)| c.abs() * xf.abs().powi(j as i32)).sum();
            prop_assert!((exact - approx).abs() <= 1e-12 * cond.max(f64::MIN_POSITIVE),
                "{} vs {}", exact, approx);
        }
    }
}
