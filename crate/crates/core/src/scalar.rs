//! Exact arithmetic in ℚ(π).
//!
//! A [`Scalar`] is a ratio of two polynomials in the symbol π with rational
//! coefficients. π is never replaced by a numeric value during exact
//! arithmetic; because it is transcendental, ℚ(π) is a field and the reduced
//! form (numerator and denominator coprime, denominator monic) is unique, so
//! equality is structural.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational, always kept reduced with a positive denominator.
pub type Rational = BigRational;

/// Default working precision for float projections.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithmeticError {
    #[error("division by zero")]
    DivisionByZero,
}

/// Polynomial in π with rational coefficients; `coeffs[i]` multiplies πⁱ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiPoly {
    coeffs: Vec<Rational>,
}

impl PiPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PiPoly { coeffs }
    }

    pub fn zero() -> Self {
        PiPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PiPoly::new(vec![c])
    }

    /// c·πᵏ
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        PiPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// True when the polynomial has no π-dependence (including zero).
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return PiPoly::zero();
        }
        PiPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => PiPoly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Euclidean division; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &PiPoly) -> (PiPoly, PiPoly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (PiPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (PiPoly::new(quot), PiPoly::new(rem))
    }

    /// Monic greatest common divisor over ℚ; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &PiPoly) -> PiPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Horner evaluation at a rational point.
    pub fn eval_rational(&self, at: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * at + c)
    }

    fn fmt_human(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let pi_part = match k {
                0 => String::new(),
                1 => "pi".to_string(),
                _ => format!("pi^{k}"),
            };
            if pi_part.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&pi_part);
            } else {
                out.push_str(&format!("{mag}*{pi_part}"));
            }
        }
        out
    }

    fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Add for &PiPoly {
    type Output = PiPoly;
    fn add(self, rhs: &PiPoly) -> PiPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        PiPoly::new(coeffs)
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, rhs: &PiPoly) -> PiPoly {
        self + &(-rhs)
    }
}

impl Mul for &PiPoly {
    type Output = PiPoly;
    fn mul(self, rhs: &PiPoly) -> PiPoly {
        if self.is_zero() || rhs.is_zero() {
            return PiPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PiPoly::new(coeffs)
    }
}

/// Element of ℚ(π) in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: PiPoly,
    den: PiPoly,
}

impl Scalar {
    /// Builds `num / den` and canonicalizes it.
    pub fn from_parts(num: PiPoly, den: PiPoly) -> Result<Self, ArithmeticError> {
        if den.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: PiPoly, den: PiPoly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Scalar::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lc = den.leading().unwrap().recip();
        Scalar {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        Scalar {
            num: PiPoly::zero(),
            den: PiPoly::constant(Rational::one()),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn pi() -> Self {
        Scalar {
            num: PiPoly::monomial(Rational::one(), 1),
            den: PiPoly::constant(Rational::one()),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar {
            num: PiPoly::constant(r),
            den: PiPoly::constant(Rational::one()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// p/q; panics when q = 0.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Convenience constructor for (p/q)·πᵏ.
    pub fn pi_power(p: i64, q: i64, k: usize) -> Self {
        Scalar {
            num: PiPoly::monomial(Rational::new(BigInt::from(p), BigInt::from(q)), k),
            den: PiPoly::constant(Rational::one()),
        }
    }

    pub fn num(&self) -> &PiPoly {
        &self.num
    }

    pub fn den(&self) -> &PiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.is_constant() && self.num.constant_term().is_one()
    }

    /// The rational value when the scalar does not depend on π.
    pub fn as_rational(&self) -> Option<Rational> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.constant_term())
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ArithmeticError> {
        if rhs.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        Ok(Self::canonical(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<Scalar, ArithmeticError> {
        Scalar::one().checked_div(self)
    }

    /// Float projection evaluated with π known to at least `precision_bits`
    /// bits; values below 53 are raised to 53.
    pub fn to_f64(&self, precision_bits: u32) -> f64 {
        if let Some(r) = self.as_rational() {
            return r.to_f64().unwrap_or(f64::NAN);
        }
        let bits = precision_bits.max(53);
        let mut guard = 64;
        let mut prev = self.eval_at_pi_approx(bits + guard);
        for _ in 0..16 {
            guard *= 2;
            let next = self.eval_at_pi_approx(bits + guard);
            if next == prev {
                break;
            }
            prev = next;
        }
        prev
    }

    fn eval_at_pi_approx(&self, bits: u32) -> f64 {
        let pi = pi_rational(bits);
        let n = self.num.eval_rational(&pi);
        let d = self.den.eval_rational(&pi);
        (n / d).to_f64().unwrap_or(f64::NAN)
    }

    /// Sign test for nonzero values, through the float projection.
    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.to_f64(DEFAULT_PRECISION_BITS) > 0.0
    }
}

/// Rational approximation of π with absolute error below 2^(-bits),
/// computed by Machin's formula in binary fixed point and cached per precision.
pub fn pi_rational(bits: u32) -> Rational {
    static CACHE: OnceLock<Mutex<HashMap<u32, Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&bits) {
        return v.clone();
    }
    let scale = bits as usize + 16;
    let one = BigInt::one() << scale;
    // π = 16·atan(1/5) − 4·atan(1/239)
    let fixed = atan_inv(5, &one) * 16 - atan_inv(239, &one) * 4;
    let value = Rational::new(fixed, one);
    cache.lock().unwrap().insert(bits, value.clone());
    value
}

/// atan(1/k) scaled by `one`, truncated series.
fn atan_inv(k: u64, one: &BigInt) -> BigInt {
    let k2 = BigInt::from(k * k);
    let mut power = one / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * i + 1);
        if i.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        i += 1;
    }
    sum
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::canonical(&self.num + &rhs.num, self.den.clone());
        }
        Scalar::canonical(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        Scalar::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

/// Human form: `4*pi/(pi+2)`, `-1/2*pi^2`, `(pi+1)/pi`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.fmt_human();
        if self.den.is_constant() {
            return f.write_str(&num);
        }
        let num = if self.num.term_count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = self.den.fmt_human();
        if self.den.term_count() > 1 || self.den.leading().is_some_and(|c| !c.is_one()) {
            write!(f, "{num}/({den})")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

// JSON: {"num": [[p,q], ...], "den": [[p,q], ...]}. Integers that do not fit
// in i64 are written as decimal strings.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Unsigned(u64),
    Big(String),
}

impl IntRepr {
    fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(n.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Unsigned(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|e| format!("invalid integer {s:?}: {e}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarRepr {
    num: Vec<(IntRepr, IntRepr)>,
    den: Vec<(IntRepr, IntRepr)>,
}

fn encode_poly(p: &PiPoly) -> Vec<(IntRepr, IntRepr)> {
    p.coeffs
        .iter()
        .map(|c| (IntRepr::from_big(c.numer()), IntRepr::from_big(c.denom())))
        .collect()
}

fn decode_poly(pairs: &[(IntRepr, IntRepr)]) -> Result<PiPoly, String> {
    let coeffs = pairs
        .iter()
        .map(|(p, q)| {
            let q = q.to_big()?;
            if q.is_zero() {
                return Err("zero denominator in rational coefficient".to_string());
            }
            Ok(Rational::new(p.to_big()?, q))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(PiPoly::new(coeffs))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            num: encode_poly(&self.num),
            den: encode_poly(&self.den),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ScalarRepr::deserialize(deserializer)?;
        let num = decode_poly(&repr.num).map_err(D::Error::custom)?;
        let den = decode_poly(&repr.den).map_err(D::Error::custom)?;
        Scalar::from_parts(num, den).map_err(|_| D::Error::custom("scalar denominator is zero"))
    }
}
