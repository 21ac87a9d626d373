//! Truncated formal power series in `b` over exact scalars.
//!
//! Every series knows the order through which its coefficients are
//! meaningful (`trunc`). Binary operations take the min of the operands'
//! truncation orders, so precision loss is explicit and absorbing.

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rat, Scalar};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Formal power series `c_0 + c_1 b + … + c_trunc b^trunc`, exact through
/// `b^trunc` and unknown beyond.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BSeries {
    coeffs: Vec<Scalar>,
    trunc: usize,
}

impl BSeries {
    /// Series from explicit coefficients; `coeffs` may be shorter than
    /// `trunc + 1`, missing entries are zero.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>, trunc: usize) -> Self {
        coeffs.truncate(trunc + 1);
        coeffs.resize(trunc + 1, Scalar::zero());
        BSeries { coeffs, trunc }
    }

    /// Series from rational coefficients given as integer pairs, handy in
    /// tests and parsers.
    pub fn from_rats(coeffs: &[Rat], trunc: usize) -> Self {
        Self::from_coeffs(coeffs.iter().cloned().map(Scalar::Rat).collect(), trunc)
    }

    pub fn zero(trunc: usize) -> Self {
        Self::from_coeffs(vec![], trunc)
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(Scalar::one(), trunc)
    }

    pub fn constant(c: Scalar, trunc: usize) -> Self {
        Self::from_coeffs(vec![c], trunc)
    }

    /// The monomial `c·b^n`.
    pub fn monomial(c: Scalar, n: usize, trunc: usize) -> Self {
        let mut v = vec![Scalar::zero(); n + 1];
        v[n] = c;
        Self::from_coeffs(v, trunc)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Coefficient of `b^n`; zero when `n` exceeds the truncation order
    /// (callers that care about validity must check `trunc` themselves).
    pub fn coeff(&self, n: usize) -> Scalar {
        self.coeffs.get(n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `b`-adic valuation through the truncation order; `None` when the
    /// series is zero as far as can be seen.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Restrict to a lower truncation order.
    pub fn truncated(&self, trunc: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), trunc.min(self.trunc))
    }

    /// Extend the truncation order, padding with zeros. Only correct when
    /// the series is known exactly (a polynomial), which is the caller's
    /// responsibility.
    pub fn padded_exact(&self, trunc: usize) -> Self {
        if trunc <= self.trunc {
            self.truncated(trunc)
        } else {
            Self::from_coeffs(self.coeffs.clone(), trunc)
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect(), self.trunc)
    }

    /// Multiply by `b^m`.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut v = vec![Scalar::zero(); m];
        v.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(v, self.trunc + m)
    }

    /// Divide by `b^m`; requires valuation >= m through trunc.
    pub fn shift_down(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Ok(self.clone());
        }
        if self.trunc < m {
            return Err(Error::PrecisionExhausted(format!(
                "cannot divide by b^{m}: series only known through b^{}",
                self.trunc
            )));
        }
        for n in 0..m.min(self.coeffs.len()) {
            if !self.coeffs[n].is_zero() {
                return Err(Error::PrecisionExhausted(format!(
                    "division by b^{m} of a series with valuation {n}"
                )));
            }
        }
        Ok(Self::from_coeffs(self.coeffs[m..].to_vec(), self.trunc - m))
    }

    /// Formal derivative; the truncation order drops by one.
    pub fn derivative(&self) -> Self {
        let t = self.trunc.saturating_sub(1);
        let v = (0..=t)
            .map(|n| &self.coeff(n + 1) * &Scalar::from_int((n + 1) as i64))
            .collect();
        Self::from_coeffs(v, t)
    }

    /// `b·S'`. The coefficient of `b^n` is `n·s_n`, so no precision is lost.
    pub fn b_derivative(&self) -> Self {
        let v = (0..=self.trunc)
            .map(|n| &self.coeff(n) * &Scalar::from_int(n as i64))
            .collect();
        Self::from_coeffs(v, self.trunc)
    }

    /// `b²·S'`. The coefficient of `b^n` is `(n−1)·s_{n−1}`, so the result
    /// is meaningful one order further than the input.
    pub fn b2_derivative(&self) -> Self {
        let t = self.trunc + 1;
        let v = (0..=t)
            .map(|n| {
                if n == 0 {
                    Scalar::zero()
                } else {
                    &self.coeff(n - 1) * &Scalar::from_int((n - 1) as i64)
                }
            })
            .collect();
        Self::from_coeffs(v, t)
    }

    /// Multiplicative inverse through the shared truncation order.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let inv0 = c0.inverse().ok_or(Error::NonInvertible)?;
        let mut v = vec![Scalar::zero(); self.trunc + 1];
        v[0] = inv0.clone();
        for n in 1..=self.trunc {
            let mut acc = Scalar::zero();
            for i in 1..=n {
                acc += &(&self.coeff(i) * &v[n - i]);
            }
            v[n] = &(-&acc) * &inv0;
        }
        Ok(Self::from_coeffs(v, self.trunc))
    }

    /// Equality through the shared truncation order.
    pub fn eq_through_min_trunc(&self, other: &Self) -> bool {
        let t = self.trunc.min(other.trunc);
        (0..=t).all(|n| self.coeff(n) == other.coeff(n))
    }
}

impl Add for &BSeries {
    type Output = BSeries;
    fn add(self, rhs: &BSeries) -> BSeries {
        let t = self.trunc.min(rhs.trunc);
        BSeries::from_coeffs((0..=t).map(|n| &self.coeff(n) + &rhs.coeff(n)).collect(), t)
    }
}

impl Sub for &BSeries {
    type Output = BSeries;
    fn sub(self, rhs: &BSeries) -> BSeries {
        let t = self.trunc.min(rhs.trunc);
        BSeries::from_coeffs((0..=t).map(|n| &self.coeff(n) - &rhs.coeff(n)).collect(), t)
    }
}

impl Neg for &BSeries {
    type Output = BSeries;
    fn neg(self) -> BSeries {
        BSeries::from_coeffs(self.coeffs.iter().map(|c| -c).collect(), self.trunc)
    }
}

impl Mul for &BSeries {
    type Output = BSeries;
    fn mul(self, rhs: &BSeries) -> BSeries {
        let t = self.trunc.min(rhs.trunc);
        let mut v = vec![Scalar::zero(); t + 1];
        for (i, x) in self.coeffs.iter().enumerate().take(t + 1) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if i + j > t {
                    break;
                }
                v[i + j] += &(x * y);
            }
        }
        BSeries::from_coeffs(v, t)
    }
}

/// Solution of the first-order equation `b·T' − m·T = rhs`.
#[derive(Clone, Debug)]
pub struct EulerSolution {
    /// The solution with the free coefficient set to zero.
    pub series: BSeries,
    /// Degree of the free coefficient slot, when `0 <= m <= trunc`.
    pub free_degree: Option<usize>,
}

/// Solve `b·T' − m·T = rhs` for `T ∈ C[[b]]`.
///
/// Coefficientwise `(n − m)·T_n = rhs_n`, so when `0 <= m <= trunc` the
/// coefficient of `b^m` in `rhs` must vanish; a nonzero value there is
/// returned as an obstruction, which is meaningful output in its own right.
pub fn solve_euler(m: i64, rhs: &BSeries) -> Result<EulerSolution> {
    let trunc = rhs.trunc();
    let mut v = vec![Scalar::zero(); trunc + 1];
    let mut free = None;
    for n in 0..=trunc {
        let d = n as i64 - m;
        if d == 0 {
            let obstruction = rhs.coeff(n);
            if !obstruction.is_zero() {
                return Err(Error::Obstruction {
                    degree: n,
                    value: obstruction.to_string(),
                });
            }
            free = Some(n);
        } else {
            v[n] = &rhs.coeff(n) / &rat_int(d);
        }
    }
    Ok(EulerSolution {
        series: BSeries::from_coeffs(v, trunc),
        free_degree: free,
    })
}

impl fmt::Display for BSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match n {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*b", c)?,
                _ => write!(f, "({})*b^{}", c, n)?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(b^{})", self, self.trunc + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn s(coeffs: &[i64], trunc: usize) -> BSeries {
        BSeries::from_rats(&coeffs.iter().map(|&n| rat_int(n)).collect::<Vec<_>>(), trunc)
    }

    #[test]
    fn mul_difference_of_squares() {
        // (1+b)(1−b) = 1 − b²
        let p = &s(&[1, 1], 8) * &s(&[1, -1], 8);
        assert_eq!(p, s(&[1, 0, -1], 8));
    }

    #[test]
    fn mul_identity() {
        let x = s(&[3, 0, 5, 7], 6);
        assert_eq!(&BSeries::one(6) * &x, x);
    }

    #[test]
    fn mul_direct_expansion() {
        // (1+3b)(1+2b) = 1 + 5b + 6b²
        let p = &s(&[1, 3], 5) * &s(&[1, 2], 5);
        assert_eq!(p, s(&[1, 5, 6], 5));
    }

    #[test]
    fn mul_absorbing_truncation() {
        let p = &s(&[1, 1], 3) * &s(&[1], 9);
        assert_eq!(p.trunc(), 3);
    }

    #[test]
    fn inverse_geometric() {
        // (1+b)^{-1} = 1 − b + b² − b³ + …
        let inv = s(&[1, 1], 5).inverse().unwrap();
        assert_eq!(inv, s(&[1, -1, 1, -1, 1, -1], 5));
    }

    #[test]
    fn inverse_of_one() {
        assert_eq!(BSeries::one(4).inverse().unwrap(), BSeries::one(4));
    }

    #[test]
    fn inverse_of_binomial_power() {
        // (1 + α b^p)^{-1} = Σ (−α)^m b^{pm}, here α = 2/3, p = 2.
        let a = rat(2, 3);
        let x = BSeries::from_coeffs(
            vec![Scalar::one(), Scalar::zero(), Scalar::Rat(a.clone())],
            8,
        );
        let inv = x.inverse().unwrap();
        for m in 0..=4 {
            let mut expect = Rat::from(rat_int(1));
            for _ in 0..m {
                expect *= -a.clone();
            }
            assert_eq!(inv.coeff(2 * m), Scalar::Rat(expect));
        }
        assert!(inv.coeff(1).is_zero() && inv.coeff(3).is_zero());
    }

    #[test]
    fn inverse_requires_unit() {
        assert!(matches!(s(&[0, 1], 3).inverse(), Err(Error::NonInvertible)));
    }

    #[test]
    fn derivative_examples() {
        // (b²)' = 2b; constants die; (1 + b + b³)' = 1 + 3b²
        assert_eq!(s(&[0, 0, 1], 4).derivative(), s(&[0, 2], 3));
        assert!(s(&[7], 4).derivative().is_zero());
        assert_eq!(s(&[1, 1, 0, 1], 5).derivative(), s(&[1, 0, 3], 4));
    }

    #[test]
    fn b2_derivative_gains_an_order() {
        let x = s(&[1, 2, 3], 2);
        let d = x.b2_derivative();
        assert_eq!(d.trunc(), 3);
        // b²(1 + 2b + 3b²)' = 2b² + 6b³
        assert_eq!(d, s(&[0, 0, 2, 6], 3));
    }

    #[test]
    fn euler_solved_off_resonance() {
        // m=1, rhs = 2b²: T = 2b², free slot at b¹.
        let sol = solve_euler(1, &s(&[0, 0, 2], 5)).unwrap();
        assert_eq!(sol.series, s(&[0, 0, 2], 5));
        assert_eq!(sol.free_degree, Some(1));
        // m=0, rhs = b: T = b.
        let sol = solve_euler(0, &s(&[0, 1], 5)).unwrap();
        assert_eq!(sol.series, s(&[0, 1], 5));
    }

    #[test]
    fn euler_obstruction() {
        // m=2, rhs = 1 + b²: coefficient of b² is nonzero.
        let err = solve_euler(2, &s(&[1, 0, 1], 5)).unwrap_err();
        match err {
            Error::Obstruction { degree, value } => {
                assert_eq!(degree, 2);
                assert_eq!(value, "1");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn euler_negative_m_has_no_obstruction() {
        let sol = solve_euler(-2, &s(&[3, 1], 5)).unwrap();
        assert_eq!(sol.free_degree, None);
        assert_eq!(sol.series.coeff(0), Scalar::Rat(rat(3, 2)));
    }
}
