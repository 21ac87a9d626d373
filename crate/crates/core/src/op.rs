//! The noncommutative operator algebra with the single relation
//! `a·b − b·a = b²`, represented in left normal form `Σ_j C_j(b)·a^j`.
//!
//! The relation implies `a·S(b) = S(b)·a + b²·S'(b)` for any series `S`, and
//! by induction `a^j·S = Σ_i binom(j,i)·D^i(S)·a^{j−i}` where `D(S) = b²·S'`.
//! All products are normalized through that rule.

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};
use crate::series::BSeries;
use crate::xi::XiElement;
use num_bigint::BigInt;
use std::fmt;

/// Operator in left normal form: `coeffs[j]` is the series left of `a^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct OpPoly {
    coeffs: Vec<BSeries>,
}

impl OpPoly {
    pub fn from_coeffs(coeffs: Vec<BSeries>) -> Self {
        let mut p = OpPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero(trunc: usize) -> Self {
        OpPoly {
            coeffs: vec![BSeries::zero(trunc)],
        }
    }

    pub fn one(trunc: usize) -> Self {
        OpPoly {
            coeffs: vec![BSeries::one(trunc)],
        }
    }

    /// The generator `a`.
    pub fn a(trunc: usize) -> Self {
        OpPoly {
            coeffs: vec![BSeries::zero(trunc), BSeries::one(trunc)],
        }
    }

    /// A pure series `S(b)` viewed as a degree-zero operator.
    pub fn series(s: BSeries) -> Self {
        OpPoly { coeffs: vec![s] }
    }

    /// The factor `a − μ·b`.
    pub fn linear_factor(mu: &Rat, trunc: usize) -> Self {
        OpPoly {
            coeffs: vec![
                BSeries::monomial(Scalar::Rat(-mu.clone()), 1, trunc),
                BSeries::one(trunc),
            ],
        }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().map(BSeries::is_zero).unwrap_or(false) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(BSeries::zero(0));
        }
    }

    /// Degree in `a`; zero operators report degree 0 alongside `is_zero`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BSeries::is_zero)
    }

    pub fn coeff(&self, j: usize) -> BSeries {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| BSeries::zero(self.min_trunc()))
    }

    pub fn coeffs(&self) -> &[BSeries] {
        &self.coeffs
    }

    pub fn min_trunc(&self) -> usize {
        self.coeffs.iter().map(BSeries::trunc).min().unwrap_or(0)
    }

    pub fn add(&self, rhs: &OpPoly) -> OpPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let t = self.min_trunc().min(rhs.min_trunc());
        let v = (0..n)
            .map(|j| &self.coeff(j).truncated(t) + &rhs.coeff(j).truncated(t))
            .collect();
        OpPoly::from_coeffs(v)
    }

    pub fn sub(&self, rhs: &OpPoly) -> OpPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let t = self.min_trunc().min(rhs.min_trunc());
        let v = (0..n)
            .map(|j| &self.coeff(j).truncated(t) - &rhs.coeff(j).truncated(t))
            .collect();
        OpPoly::from_coeffs(v)
    }

    pub fn scale(&self, s: &BSeries) -> OpPoly {
        OpPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Normalized product. Rewrites every `a^j·S(b)` through the commutation
    /// rule so that the result is again in left normal form.
    pub fn mul(&self, rhs: &OpPoly) -> OpPoly {
        let deg = self.degree() + rhs.degree();
        let t = self.min_trunc().min(rhs.min_trunc());
        let mut acc = vec![BSeries::zero(t); deg + 1];
        for (j, cj) in self.coeffs.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (m, em) in rhs.coeffs.iter().enumerate() {
                if em.is_zero() {
                    continue;
                }
                // a^j · E = Σ_i binom(j,i) D^i(E) a^{j−i}
                let mut d = em.clone();
                for i in 0..=j {
                    let binom = Scalar::Rat(Rat::from(binomial(j, i)));
                    let term = &(cj * &d.scale(&binom)).truncated(t);
                    acc[j - i + m] = &acc[j - i + m] + term;
                    if i < j {
                        d = d.b2_derivative();
                    }
                }
            }
        }
        OpPoly::from_coeffs(acc)
    }

    /// Euclidean division by `a − μ·b` on the right:
    /// `self = q·(a − μb) + r(b)` with `r` a pure series.
    pub fn divide_right(&self, mu: &Rat) -> (OpPoly, BSeries) {
        let t = self.min_trunc();
        let factor = OpPoly::linear_factor(mu, t);
        let mut rem = self.clone();
        let mut q = OpPoly::zero(t);
        while rem.degree() >= 1 {
            let e = rem.degree();
            let lead = rem.coeff(e);
            let mut step_coeffs = vec![BSeries::zero(t); e];
            step_coeffs[e - 1] = lead;
            let step = OpPoly::from_coeffs(step_coeffs);
            rem = rem.sub(&step.mul(&factor));
            q = q.add(&step);
            if rem.degree() >= e && !rem.coeff(e).is_zero() {
                unreachable!("division failed to reduce degree");
            }
        }
        (q, rem.coeff(0))
    }

    /// Apply to an element of `Ξ_λ`: `Σ C_j(b)·a^j(φ)`.
    pub fn apply_xi(&self, phi: &XiElement) -> XiElement {
        let mut power = phi.clone();
        let mut acc = power.scale_series(&self.coeff(0));
        for j in 1..=self.degree() {
            power = power.apply_a();
            acc = acc.add(&power.scale_series(&self.coeff(j)));
        }
        acc
    }

    /// The part of total weight `w`, where `a` and `b` both weigh 1:
    /// keeps `[b^{w−j}]C_j · b^{w−j} a^j`.
    pub fn weight_part(&self, w: usize) -> OpPoly {
        let t = self.min_trunc();
        let v = (0..=self.degree().min(w))
            .map(|j| BSeries::monomial(self.coeff(j).coeff(w - j), w - j, t))
            .collect();
        OpPoly::from_coeffs(v)
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match j {
                0 => write!(f, "[{}]", c)?,
                1 => write!(f, "[{}]*a", c)?,
                _ => write!(f, "[{}]*a^{}", c, j)?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// One factor of a standard word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordFactor {
    /// `a − μ·b`
    Linear(Rat),
    /// `S(b)^{-1}`, kept factored until expansion
    InverseSeries(BSeries),
    /// plain series multiplication
    Series(BSeries),
}

/// A product `(a − λ_1 b)·S_1^{-1}·(a − λ_2 b)·…·S_{k−1}^{-1}·(a − λ_k b)`
/// kept in factored form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardWord {
    factors: Vec<WordFactor>,
}

impl StandardWord {
    pub fn from_factors(factors: Vec<WordFactor>) -> Self {
        StandardWord { factors }
    }

    /// The standard word of a presentation-shaped pair: `lambdas` of length
    /// `k`, `series` of length `k−1` interleaved as inverses.
    pub fn standard(lambdas: &[Rat], series: &[BSeries]) -> Self {
        assert_eq!(lambdas.len(), series.len() + 1, "standard word shape");
        let mut factors = Vec::new();
        for (j, lam) in lambdas.iter().enumerate() {
            factors.push(WordFactor::Linear(lam.clone()));
            if j + 1 < lambdas.len() {
                factors.push(WordFactor::InverseSeries(series[j].clone()));
            }
        }
        StandardWord { factors }
    }

    pub fn factors(&self) -> &[WordFactor] {
        &self.factors
    }

    /// Expand into left normal form, normalized monic in `a` (the raw
    /// product has the unit `S_1^{-1}…S_{k−1}^{-1}` as leading coefficient;
    /// left multiplication by its inverse changes nothing about the left
    /// ideal). Fails when an inverted series has zero constant term.
    pub fn expand(&self, trunc: usize) -> Result<OpPoly> {
        let mut acc = OpPoly::one(trunc);
        for f in &self.factors {
            let factor = match f {
                WordFactor::Linear(mu) => OpPoly::linear_factor(mu, trunc),
                WordFactor::InverseSeries(s) => {
                    let s = s.padded_exact(trunc);
                    OpPoly::series(s.inverse().map_err(|_| Error::NonInvertible)?)
                }
                WordFactor::Series(s) => OpPoly::series(s.padded_exact(trunc)),
            };
            acc = acc.mul(&factor);
        }
        let lead = acc.coeff(acc.degree());
        if !lead.eq_through_min_trunc(&BSeries::one(lead.trunc())) {
            acc = acc.scale(&lead.inverse()?);
        }
        Ok(acc)
    }

    /// Apply the word to an element of `Ξ_λ` factor by factor, sharpest in
    /// precision (inverses are taken at the element's truncation).
    pub fn apply_xi(&self, phi: &XiElement) -> Result<XiElement> {
        let mut acc = phi.clone();
        for f in self.factors.iter().rev() {
            acc = match f {
                WordFactor::Linear(mu) => acc.apply_a_minus(mu),
                WordFactor::InverseSeries(s) => {
                    acc.scale_series(&s.padded_exact(acc.min_trunc()).inverse()?)
                }
                WordFactor::Series(s) => acc.scale_series(&s.padded_exact(acc.min_trunc())),
            };
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn srs(coeffs: &[i64], trunc: usize) -> BSeries {
        BSeries::from_rats(&coeffs.iter().map(|&n| rat_int(n)).collect::<Vec<_>>(), trunc)
    }

    /// Independent rewriting oracle: operators as formal sums of words in
    /// the letters a,b with rational coefficients, rewritten by
    /// `a·b -> b·a + b·b` until no `a` stands left of a `b`.
    mod oracle {
        use crate::scalar::Rat;
        use num_traits::Zero;
        use std::collections::BTreeMap;

        pub type Word = Vec<u8>; // 0 = a, 1 = b

        #[derive(Clone, Default, Debug, PartialEq)]
        pub struct Formal(pub BTreeMap<Word, Rat>);

        impl Formal {
            pub fn term(w: Word, c: Rat) -> Self {
                let mut m = BTreeMap::new();
                m.insert(w, c);
                Formal(m)
            }

            pub fn add(&self, rhs: &Formal) -> Formal {
                let mut m = self.0.clone();
                for (w, c) in &rhs.0 {
                    let e = m.entry(w.clone()).or_insert_with(Rat::zero);
                    *e += c;
                }
                m.retain(|_, c| !c.is_zero());
                Formal(m)
            }

            pub fn mul(&self, rhs: &Formal) -> Formal {
                let mut acc = Formal::default();
                for (w1, c1) in &self.0 {
                    for (w2, c2) in &rhs.0 {
                        let mut w = w1.clone();
                        w.extend_from_slice(w2);
                        acc = acc.add(&Formal::term(w, c1 * c2));
                    }
                }
                acc
            }

            /// Rewrite to normal order (all b's left of all a's).
            pub fn normalize(&self) -> Formal {
                let mut cur = self.clone();
                loop {
                    let mut next = Formal::default();
                    let mut changed = false;
                    for (w, c) in &cur.0 {
                        if let Some(i) = w.windows(2).position(|p| p == [0, 1]) {
                            changed = true;
                            // a b -> b a + b b
                            let mut w1 = w.clone();
                            w1[i] = 1;
                            w1[i + 1] = 0;
                            let mut w2 = w.clone();
                            w2[i] = 1;
                            w2[i + 1] = 1;
                            next = next
                                .add(&Formal::term(w1, c.clone()))
                                .add(&Formal::term(w2, c.clone()));
                        } else {
                            next = next.add(&Formal::term(w.clone(), c.clone()));
                        }
                    }
                    cur = next;
                    if !changed {
                        return cur;
                    }
                }
            }
        }
    }

    /// Convert a normal-ordered oracle element to an OpPoly.
    fn oracle_to_op(f: &oracle::Formal, trunc: usize) -> OpPoly {
        let mut coeffs: Vec<BSeries> = Vec::new();
        for (w, c) in &f.0 {
            let nb = w.iter().filter(|&&x| x == 1).count();
            let na = w.len() - nb;
            assert!(
                w.iter().skip_while(|&&x| x == 1).all(|&x| x == 0),
                "oracle word not normal ordered"
            );
            while coeffs.len() <= na {
                coeffs.push(BSeries::zero(trunc));
            }
            coeffs[na] =
                &coeffs[na] + &BSeries::monomial(Scalar::Rat(c.clone()), nb, trunc);
        }
        OpPoly::from_coeffs(coeffs)
    }

    fn factor_formal(mu: &Rat) -> oracle::Formal {
        use num_traits::One;
        oracle::Formal::term(vec![0], Rat::one())
            .add(&oracle::Formal::term(vec![1], -mu.clone()))
    }

    #[test]
    fn a_times_b_is_ba_plus_b2() {
        let t = 6;
        let a = OpPoly::a(t);
        let b = OpPoly::series(BSeries::monomial(Scalar::one(), 1, t));
        let p = a.mul(&b);
        // b·a + b²
        let expect = OpPoly::from_coeffs(vec![
            BSeries::monomial(Scalar::one(), 2, t),
            BSeries::monomial(Scalar::one(), 1, t),
        ]);
        assert_eq!(p, expect);
    }

    #[test]
    fn a_times_unit_series() {
        // a·(1+b) = (1+b)·a + b²
        let t = 6;
        let a = OpPoly::a(t);
        let s = OpPoly::series(srs(&[1, 1], t));
        let p = a.mul(&s);
        let expect = OpPoly::from_coeffs(vec![srs(&[0, 0, 1], t), srs(&[1, 1], t)]);
        assert_eq!(p, expect);
    }

    #[test]
    fn linear_product_matches_rewriting_oracle() {
        // (a − λb)(a − μb) for a couple of rational pairs, against the
        // independent rewriting oracle.
        let t = 6;
        for (lnum, lden, mnum, mden) in [(5, 2, 7, 2), (3, 4, -2, 1), (11, 3, 5, 6)] {
            let lam = rat(lnum, lden);
            let mu = rat(mnum, mden);
            let ours = OpPoly::linear_factor(&lam, t).mul(&OpPoly::linear_factor(&mu, t));
            let oracle = factor_formal(&lam).mul(&factor_formal(&mu)).normalize();
            assert_eq!(ours, oracle_to_op(&oracle, t));
            // and the closed form a² − (λ+μ)·b·a + (λμ−μ)·b²
            let expect = OpPoly::from_coeffs(vec![
                BSeries::monomial(Scalar::Rat(&lam * &mu - &mu), 2, t),
                BSeries::monomial(Scalar::Rat(-(&lam + &mu)), 1, t),
                BSeries::one(t),
            ]);
            assert_eq!(ours, expect);
        }
    }

    #[test]
    fn mul_alternating_sides_against_oracle() {
        // a²·b·a·b² against the oracle, exercising deeper rewriting.
        use num_traits::One;
        let t = 8;
        let a = OpPoly::a(t);
        let b = OpPoly::series(BSeries::monomial(Scalar::one(), 1, t));
        let ours = a.mul(&a).mul(&b).mul(&a).mul(&b).mul(&b);
        let fa = oracle::Formal::term(vec![0], Rat::one());
        let fb = oracle::Formal::term(vec![1], Rat::one());
        let oracle = fa.mul(&fa).mul(&fb).mul(&fa).mul(&fb).mul(&fb).normalize();
        assert_eq!(ours, oracle_to_op(&oracle, t));
    }

    #[test]
    fn divide_right_by_own_factor() {
        let t = 6;
        let mu = rat(7, 3);
        let x = OpPoly::linear_factor(&mu, t);
        let (q, r) = x.divide_right(&mu);
        assert_eq!(q, OpPoly::one(t));
        assert!(r.is_zero());
    }

    #[test]
    fn divide_right_degree_zero() {
        let t = 6;
        let x = OpPoly::series(srs(&[2, 0, 5], t));
        let (q, r) = x.divide_right(&rat(1, 2));
        assert!(q.is_zero());
        assert_eq!(r, srs(&[2, 0, 5], t));
    }

    #[test]
    fn divide_right_a_squared() {
        // a² = (a + μb)(a − μb) + μ(μ+1)b²
        let t = 6;
        for mu in [rat(3, 2), rat(-5, 4), rat_int(2)] {
            let a2 = OpPoly::a(t).mul(&OpPoly::a(t));
            let (q, r) = a2.divide_right(&mu);
            let expect_q = OpPoly::from_coeffs(vec![
                BSeries::monomial(Scalar::Rat(mu.clone()), 1, t),
                BSeries::one(t),
            ]);
            assert_eq!(q, expect_q);
            let c = &mu * (&mu + rat_int(1));
            assert_eq!(r, BSeries::monomial(Scalar::Rat(c), 2, t));
            // reconstruction through op multiplication
            let back = q.mul(&OpPoly::linear_factor(&mu, t)).add(&OpPoly::series(r));
            assert_eq!(back, a2);
        }
    }

    #[test]
    fn commutation_of_linear_factor_with_b_power() {
        // (a−λb)·b^m = b^m·a + (m−λ)·b^{m+1}
        let t = 8;
        let lam = rat(5, 2);
        for m in 0..4usize {
            let lhs = OpPoly::linear_factor(&lam, t)
                .mul(&OpPoly::series(BSeries::monomial(Scalar::one(), m, t)));
            let expect = OpPoly::from_coeffs(vec![
                BSeries::monomial(Scalar::Rat(rat_int(m as i64) - &lam), m + 1, t),
                BSeries::monomial(Scalar::one(), m, t),
            ]);
            assert_eq!(lhs, expect);
        }
    }

    #[test]
    fn word_expand_rank_one() {
        let t = 6;
        let w = StandardWord::standard(&[rat(3, 4)], &[]);
        let p = w.expand(t).unwrap();
        assert_eq!(p, OpPoly::linear_factor(&rat(3, 4), t));
    }

    #[test]
    fn word_expand_rank_two_trivial_series() {
        let t = 6;
        let l1 = rat(5, 2);
        let l2 = rat(7, 2);
        let w = StandardWord::standard(&[l1.clone(), l2.clone()], &[BSeries::one(t)]);
        let p = w.expand(t).unwrap();
        assert_eq!(
            p,
            OpPoly::linear_factor(&l1, t).mul(&OpPoly::linear_factor(&l2, t))
        );
    }

    #[test]
    fn word_expand_monic_and_weight_part() {
        let t = 10;
        let lambdas = [rat(4, 1), rat(4, 1), rat(5, 1)];
        let series = [srs(&[1, 2], t), srs(&[1, 0, 3], t)];
        let w = StandardWord::standard(&lambdas, &series);
        let p = w.expand(t).unwrap();
        assert_eq!(p.degree(), 3);
        assert!(p.coeff(3).eq_through_min_trunc(&BSeries::one(t)));
        // weight-3 homogeneous part equals the plain product of the linear factors
        let homog = p.weight_part(3);
        let plain = OpPoly::linear_factor(&lambdas[0], t)
            .mul(&OpPoly::linear_factor(&lambdas[1], t))
            .mul(&OpPoly::linear_factor(&lambdas[2], t));
        for j in 0..=3 {
            assert_eq!(homog.coeff(j).coeff(3 - j), plain.coeff(j).coeff(3 - j));
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn mul_is_associative(
            c1 in -4i64..5, c2 in -4i64..5, c3 in -4i64..5,
            d1 in 0usize..3, d2 in 0usize..3, d3 in 0usize..3,
        ) {
            let t = 10;
            let mk = |c: i64, d: usize| {
                let mut coeffs = vec![BSeries::zero(t); d + 1];
                coeffs[d] = BSeries::one(t);
                coeffs[0] = &coeffs[0] + &srs(&[c, 1], t);
                OpPoly::from_coeffs(coeffs)
            };
            let (x, y, z) = (mk(c1, d1), mk(c2, d2), mk(c3, d3));
            let left = x.mul(&y).mul(&z);
            let right = x.mul(&y.mul(&z));
            proptest::prop_assert_eq!(left, right);
        }

        #[test]
        fn divide_right_reconstructs(
            c0 in -4i64..5, c1 in -4i64..5, c2 in -4i64..5,
            mun in -6i64..7, mud in 1i64..4,
        ) {
            let t = 9;
            let x = OpPoly::from_coeffs(vec![
                srs(&[c0, 1, 2], t),
                srs(&[c1, 3], t),
                srs(&[c2], t),
                BSeries::one(t),
            ]);
            let mu = rat(mun, mud);
            let (q, r) = x.divide_right(&mu);
            let back = q.mul(&OpPoly::linear_factor(&mu, t)).add(&OpPoly::series(r));
            proptest::prop_assert_eq!(back, x);
        }
    }
}
