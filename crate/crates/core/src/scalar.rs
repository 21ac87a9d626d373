//! Exact scalars: arbitrary-precision rationals, optionally extended by a
//! single formal transcendental symbol `t`.
//!
//! The `t` variant only shows up in monodromy computations, where `t` stands
//! for the formal constant that multiplies every unipotent-defect drop of one
//! logarithm degree. Everything else stays in plain `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Arbitrary-precision rational, the base field of every computation.
pub type Rat = BigRational;

/// Build a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat_int(num: i64) -> Rat {
    BigRational::from_integer(BigInt::from(num))
}

/// An exact scalar: either a rational or a polynomial in the symbol `t` with
/// rational coefficients. The polynomial representation never carries a
/// leading zero and a constant polynomial collapses to `Rat`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rat),
    /// Coefficients by ascending power of `t`; always length >= 2.
    TPoly(Vec<Rat>),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(rat_int(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::Rat(r)
    }

    /// The symbol `t` itself.
    pub fn t() -> Self {
        Scalar::TPoly(vec![Rat::zero(), Rat::one()])
    }

    /// `t^k / c` for the monodromy expansion terms.
    pub fn t_pow_over(k: usize, c: Rat) -> Self {
        if k == 0 {
            return Scalar::Rat(Rat::one() / c);
        }
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = Rat::one() / c;
        Scalar::normalized(v)
    }

    fn normalized(mut v: Vec<Rat>) -> Self {
        while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        if v.len() == 1 {
            Scalar::Rat(v.pop().unwrap())
        } else if v.is_empty() {
            Scalar::zero()
        } else {
            Scalar::TPoly(v)
        }
    }

    fn coeffs(&self) -> Vec<Rat> {
        match self {
            Scalar::Rat(r) => vec![r.clone()],
            Scalar::TPoly(v) => v.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::TPoly(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    /// Degree in `t` (0 for plain rationals).
    pub fn t_degree(&self) -> usize {
        match self {
            Scalar::Rat(_) => 0,
            Scalar::TPoly(v) => v.len() - 1,
        }
    }

    /// The plain rational value, if this scalar does not involve `t`.
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::TPoly(_) => None,
        }
    }

    pub fn expect_rat(&self) -> &Rat {
        self.as_rat().expect("scalar unexpectedly involves the symbol t")
    }

    /// Multiplicative inverse. Only rationals (and only nonzero ones) are
    /// invertible; the `t`-polynomial ring is never divided by in any
    /// construction of the engine.
    pub fn inverse(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(r) if !r.is_zero() => Some(Scalar::Rat(r.recip())),
            _ => None,
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let a = self.coeffs();
                let b = rhs.coeffs();
                let n = a.len().max(b.len());
                let mut v = vec![Rat::zero(); n];
                for (i, c) in a.into_iter().enumerate() {
                    v[i] += c;
                }
                for (i, c) in b.into_iter().enumerate() {
                    v[i] += c;
                }
                Scalar::normalized(v)
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::TPoly(v) => Scalar::TPoly(v.iter().map(|c| -c).collect()),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => {
                let a = self.coeffs();
                let b = rhs.coeffs();
                let mut v = vec![Rat::zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        v[i + j] += x * y;
                    }
                }
                Scalar::normalized(v)
            }
        }
    }
}

impl Div<&Rat> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Rat) -> Scalar {
        assert!(!rhs.is_zero(), "division of a scalar by zero");
        match self {
            Scalar::Rat(a) => Scalar::Rat(a / rhs),
            Scalar::TPoly(v) => Scalar::TPoly(v.iter().map(|c| c / rhs).collect()),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

/// Render a rational as `p/q`, or just `p` when the denominator is one.
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p/q` or `p` into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

/// True when the rational is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Integer value of a rational known to be an integer.
pub fn to_integer(r: &Rat) -> BigInt {
    debug_assert!(is_integer(r));
    r.to_integer()
}

/// Integer value as i64 (panics on overflow; exponents in this engine are
/// small by construction).
pub fn to_i64(r: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    to_integer(r).to_i64().expect("exponent overflows i64")
}

/// Ceiling of a rational.
pub fn ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// `λ(λ+1)···(λ+n−1)`, the rising factorial over the rationals.
pub fn rising_factorial(base: &Rat, n: usize) -> Rat {
    let mut acc = Rat::one();
    let mut x = base.clone();
    for _ in 0..n {
        acc *= &x;
        x += Rat::one();
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", rat_string(r)),
            Scalar::TPoly(v) => {
                let mut first = true;
                for (k, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
                    } else if c.is_negative() {
                        write!(f, "-")?;
                    }
                    let a = c.abs();
                    match k {
                        0 => write!(f, "{}", rat_string(&a))?,
                        1 if a.is_one() => write!(f, "t")?,
                        1 => write!(f, "{}*t", rat_string(&a))?,
                        _ if a.is_one() => write!(f, "t^{}", k)?,
                        _ => write!(f, "{}*t^{}", rat_string(&a), k)?,
                    }
                    first = false;
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
