//! Theme presentations: standard bases, fundamental invariants, canonical
//! forms, Bernstein elements, quotients and submodules, twisted duality.
//!
//! A presentation stores the Jordan-Hölder data `λ_1, …, λ_k` together with
//! the connecting series `S_1, …, S_{k−1}`; the standard basis relations are
//!
//!   a·e_{j+1} = λ_{j+1}·b·e_{j+1} + S_j·e_j,       a·e_1 = λ_1·b·e_1,
//!
//! matching the annihilator word
//! `(a − λ_1 b)·S_1^{-1}·(a − λ_2 b)·…·S_{k−1}^{-1}·(a − λ_k b)`.

use crate::error::{Error, Result};
use crate::op::{OpPoly, StandardWord, WordFactor};
use crate::scalar::{ceil, is_integer, rat_int, rat_string, Rat, Scalar};
use crate::series::BSeries;
use crate::xi::{solve_shift, XiElement};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The discrete data `λ_1` and `p_1, …, p_{k−1}` with
/// `λ_{j+1} = λ_j + p_j − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalInvariants {
    pub lambda1: Rat,
    pub ps: Vec<usize>,
}

impl FundamentalInvariants {
    pub fn rank(&self) -> usize {
        self.ps.len() + 1
    }

    pub fn lambdas(&self) -> Vec<Rat> {
        let mut out = vec![self.lambda1.clone()];
        for &p in &self.ps {
            let next = out.last().unwrap() + rat_int(p as i64) - rat_int(1);
            out.push(next);
        }
        out
    }

    /// Working truncation order: the span of the `λ`'s plus the `p`'s plus
    /// headroom linear in the rank. Every obstruction degree arising in the
    /// constructions is bounded by the λ-span plus the rank, so this is
    /// safely past all of them; solvers re-run 8 orders higher to confirm.
    pub fn default_trunc(&self) -> usize {
        let lambdas = self.lambdas();
        let span = lambdas.last().unwrap() - &self.lambda1;
        let span_ceil = ceil(&span).to_usize().unwrap_or(0);
        let psum: usize = self.ps.iter().sum();
        span_ceil + psum + 2 * self.rank() + 8
    }
}

/// Extra precision margin used by stabilization re-runs.
pub const STABILIZATION_MARGIN: usize = 8;

/// Representative of the class of `x` in `(0, 1] + Z`.
pub fn lambda_class(x: &Rat) -> Rat {
    let m = ceil(x) - 1;
    x - Rat::from_integer(m)
}

/// Integer offset of `x` above its class representative.
pub fn class_offset(x: &Rat) -> i64 {
    use crate::scalar::to_i64;
    to_i64(&(x - lambda_class(x)))
}

/// A standard form of a theme.
#[derive(Clone, PartialEq, Eq)]
pub struct ThemePresentation {
    lambdas: Vec<Rat>,
    s: Vec<BSeries>,
}

/// One failed structural check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LambdaBound { j: usize, lambda: Rat, bound: i64 },
    ConstantTermNotOne { j: usize },
    VanishingPCoefficient { j: usize, p: usize },
    PCoefficientUnknown { j: usize, p: usize, trunc: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LambdaBound { j, lambda, bound } => write!(
                f,
                "lambda_{j} = {} must exceed {bound}",
                rat_string(lambda)
            ),
            Violation::ConstantTermNotOne { j } => {
                write!(f, "S_{j} must have constant term 1")
            }
            Violation::VanishingPCoefficient { j, p } => {
                write!(f, "coefficient of b^{p} in S_{j} must not vanish")
            }
            Violation::PCoefficientUnknown { j, p, trunc } => write!(
                f,
                "coefficient of b^{p} in S_{j} is beyond the truncation order {trunc}"
            ),
        }
    }
}

/// Outcome of `validate`: the list of violated invariants.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ThemePresentation {
    /// Presentation from its Jordan-Hölder numbers and connecting series.
    /// The gaps `λ_{j+1} − λ_j + 1` must be natural integers.
    pub fn new(lambdas: Vec<Rat>, s: Vec<BSeries>) -> Result<Self> {
        if lambdas.is_empty() {
            if !s.is_empty() {
                return Err(Error::InvalidInput("series without lambdas".into()));
            }
            return Ok(ThemePresentation { lambdas, s });
        }
        if s.len() + 1 != lambdas.len() {
            return Err(Error::InvalidInput(format!(
                "rank {} needs {} connecting series, got {}",
                lambdas.len(),
                lambdas.len() - 1,
                s.len()
            )));
        }
        for w in lambdas.windows(2) {
            let gap = &w[1] - &w[0] + rat_int(1);
            if !is_integer(&gap) || gap.is_negative() {
                return Err(Error::InvalidInput(format!(
                    "lambda gap {} is not a natural integer minus one",
                    rat_string(&gap)
                )));
            }
        }
        Ok(ThemePresentation { lambdas, s })
    }

    pub fn from_invariants(inv: &FundamentalInvariants, s: Vec<BSeries>) -> Result<Self> {
        Self::new(inv.lambdas(), s)
    }

    /// The rank-one theme `E_λ`.
    pub fn rank_one(lambda: Rat) -> Self {
        ThemePresentation {
            lambdas: vec![lambda],
            s: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Rat] {
        &self.lambdas
    }

    pub fn series(&self) -> &[BSeries] {
        &self.s
    }

    pub fn invariants(&self) -> FundamentalInvariants {
        FundamentalInvariants {
            lambda1: self.lambdas[0].clone(),
            ps: self.ps(),
        }
    }

    /// The gaps `p_j = λ_{j+1} − λ_j + 1`.
    pub fn ps(&self) -> Vec<usize> {
        self.lambdas
            .windows(2)
            .map(|w| {
                let gap = &w[1] - &w[0] + rat_int(1);
                crate::scalar::to_i64(&gap) as usize
            })
            .collect()
    }

    /// Class representative `λ ∈ (0,1]` of the presentation.
    pub fn lambda_class(&self) -> Rat {
        lambda_class(&self.lambdas[0])
    }

    pub fn min_trunc(&self) -> usize {
        self.s
            .iter()
            .map(BSeries::trunc)
            .min()
            .unwrap_or(usize::MAX >> 1)
    }

    /// Re-truncate or zero-pad all series. Padding is exact only when the
    /// series are polynomials known exactly, which holds for file input and
    /// canonical forms.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        ThemePresentation {
            lambdas: self.lambdas.clone(),
            s: self.s.iter().map(|x| x.padded_exact(trunc)).collect(),
        }
    }

    /// Check every structural invariant, reporting all failures.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let k = self.rank() as i64;
        for (idx, lam) in self.lambdas.iter().enumerate() {
            let j = idx as i64 + 1;
            let bound = k - j;
            if lam <= &rat_int(bound) {
                d.violations.push(Violation::LambdaBound {
                    j: idx + 1,
                    lambda: lam.clone(),
                    bound,
                });
            }
        }
        let ps = self.ps();
        for (idx, s) in self.s.iter().enumerate() {
            if !s.constant_term().is_one() {
                d.violations.push(Violation::ConstantTermNotOne { j: idx + 1 });
            }
            let p = ps[idx];
            if p > s.trunc() {
                d.violations.push(Violation::PCoefficientUnknown {
                    j: idx + 1,
                    p,
                    trunc: s.trunc(),
                });
            } else if s.coeff(p).is_zero() {
                d.violations.push(Violation::VanishingPCoefficient { j: idx + 1, p });
            }
        }
        d
    }

    /// The annihilator word of the standard generator.
    pub fn word(&self) -> StandardWord {
        StandardWord::standard(&self.lambdas, &self.s)
    }

    /// Presentation of the normal submodule `F_j` (basis `e_1, …, e_j`).
    pub fn submodule(&self, j: usize) -> Self {
        assert!(j <= self.rank());
        ThemePresentation {
            lambdas: self.lambdas[..j].to_vec(),
            s: self.s[..j.saturating_sub(1)].to_vec(),
        }
    }

    /// Presentation of the quotient `E/F_j`; the connecting series between
    /// `e_{j+1}` and `e_j` is dropped.
    pub fn quotient(&self, j: usize) -> Self {
        assert!(j <= self.rank());
        ThemePresentation {
            lambdas: self.lambdas[j..].to_vec(),
            s: if j >= self.s.len() {
                Vec::new()
            } else {
                self.s[j..].to_vec()
            },
        }
    }

    /// Action of `a` on a coordinate vector in the standard basis:
    /// `a·(Σ w_i e_{i+1})` has coordinate
    /// `λ_{i+1}·b·w_i + b²·w_i' + S_{i+1}·w_{i+1}` at index `i`.
    pub fn apply_a_coords(&self, coords: &[BSeries]) -> Vec<BSeries> {
        let k = self.rank();
        (0..k)
            .map(|i| {
                let w = &coords[i];
                let mut out = &w
                    .shift_up(1)
                    .scale(&Scalar::Rat(self.lambdas[i].clone()))
                    + &w.b2_derivative();
                if i + 1 < k {
                    let t = out.trunc().min(coords[i + 1].trunc());
                    out = &out
                        + &(&self.s[i].padded_exact(t) * &coords[i + 1].truncated(t));
                }
                out
            })
            .collect()
    }

    /// Apply a word, factor by factor from the right, to a coordinate
    /// vector.
    pub fn apply_word_coords(
        &self,
        factors: &[WordFactor],
        coords: &[BSeries],
    ) -> Result<Vec<BSeries>> {
        let mut cur: Vec<BSeries> = coords.to_vec();
        for f in factors.iter().rev() {
            cur = match f {
                WordFactor::Linear(mu) => {
                    let applied = self.apply_a_coords(&cur);
                    applied
                        .into_iter()
                        .zip(cur.iter())
                        .map(|(aw, w)| {
                            &aw - &w.shift_up(1).scale(&Scalar::Rat(mu.clone()))
                        })
                        .collect()
                }
                WordFactor::InverseSeries(s) => {
                    let t = cur.iter().map(BSeries::trunc).min().unwrap_or(0);
                    let inv = s.padded_exact(t).inverse()?;
                    cur.iter().map(|w| w * &inv).collect()
                }
                WordFactor::Series(s) => {
                    let t = cur.iter().map(BSeries::trunc).min().unwrap_or(0);
                    let ss = s.padded_exact(t);
                    cur.iter().map(|w| w * &ss).collect()
                }
            };
        }
        Ok(cur)
    }

    /// Exact equality of the finite data: same `λ`'s and the same series
    /// through the shared truncation order.
    pub fn eq_through_trunc(&self, other: &Self) -> bool {
        self.lambdas == other.lambdas
            && self
                .s
                .iter()
                .zip(other.s.iter())
                .all(|(x, y)| x.eq_through_min_trunc(y))
    }

    /// Stable text key of a canonical form: the invariants plus the series
    /// coefficients on their V-space supports.
    pub fn canonical_key(&self) -> String {
        let inv = self.invariants();
        let mut out = format!("l1={};p={:?}", rat_string(&inv.lambda1), inv.ps);
        for (idx, s) in self.s.iter().enumerate() {
            let v = vspace(&inv, idx + 1);
            out.push_str(&format!(";S{}=", idx + 1));
            for &e in &v.exponents {
                out.push_str(&format!("{}:{},", e, s.coeff(e)));
            }
        }
        out
    }
}

impl fmt::Debug for ThemePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theme[")?;
        for (i, l) in self.lambdas.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", rat_string(l))?;
        }
        write!(f, "]")?;
        for (i, s) in self.s.iter().enumerate() {
            write!(f, " S{}={}", i + 1, s)?;
        }
        Ok(())
    }
}

/// The finite-dimensional space `V_j` of canonical-form coefficients:
/// monomial exponents `{0, …, k−j−1}`, plus `q_j = p_j + … + p_{j+h}` (`h`
/// minimal with `q_j >= k−j`) when the full tail sum reaches `k−j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSpace {
    pub j: usize,
    pub exponents: Vec<usize>,
    pub q: Option<usize>,
}

pub fn vspace(inv: &FundamentalInvariants, j: usize) -> VSpace {
    let k = inv.rank();
    assert!(j >= 1 && j <= k - 1, "vspace index out of range");
    let tail: usize = inv.ps[j - 1..].iter().sum();
    let mut exponents: Vec<usize> = (0..k - j).collect();
    let mut q = None;
    if tail >= k - j {
        let mut acc = 0;
        for &p in &inv.ps[j - 1..] {
            acc += p;
            if acc >= k - j {
                break;
            }
        }
        exponents.push(acc);
        q = Some(acc);
    }
    VSpace { j, exponents, q }
}

/// Action of a standard word on `E_{λ} = C[[b]]·e_λ`, where each factor
/// `a − ν·b` acts as `w ↦ b²·w' + (λ−ν)·b·w`.
pub fn word_apply_rank_one(factors: &[WordFactor], base: &Rat, w: &BSeries) -> Result<BSeries> {
    let mut cur = w.clone();
    for f in factors.iter().rev() {
        cur = match f {
            WordFactor::Linear(nu) => {
                &cur.b2_derivative() + &cur.shift_up(1).scale(&Scalar::Rat(base - nu))
            }
            WordFactor::InverseSeries(s) => &cur * &s.padded_exact(cur.trunc()).inverse()?,
            WordFactor::Series(s) => &cur * &s.padded_exact(cur.trunc()),
        };
    }
    Ok(cur)
}

/// Solve `T·e_λ = S·e_λ + P·(z·e_λ)` with `S` supported on the given
/// exponents; the unique split realizing `E_λ = P·E_λ ⊕ V·e_λ`.
///
/// Works by valuation-triangular elimination: the image columns `P(b^q)`
/// lead at degree `q + r` except at the finitely many exceptional
/// valuations where the leading term dies, which is exactly where the extra
/// `V`-exponent steps in.
pub fn decompose_against(
    factors: &[WordFactor],
    base: &Rat,
    t_series: &BSeries,
    vexps: &[usize],
) -> Result<(BSeries, BSeries)> {
    let trunc = t_series.trunc();
    let r = factors
        .iter()
        .filter(|f| matches!(f, WordFactor::Linear(_)))
        .count();
    let qmax = trunc.saturating_sub(r);
    // columns: V monomials first, then the images P(b^q)
    let mut columns: Vec<BSeries> = Vec::new();
    for &e in vexps {
        columns.push(BSeries::monomial(Scalar::one(), e, trunc));
    }
    for q in 0..=qmax {
        let img = word_apply_rank_one(
            factors,
            base,
            &BSeries::monomial(Scalar::one(), q, trunc),
        )?;
        columns.push(img.truncated(trunc));
    }
    let coeffs = express_in_columns(&columns, t_series).ok_or_else(|| {
        Error::PrecisionExhausted("direct-sum split failed within the truncation order".into())
    })?;
    let mut s = BSeries::zero(trunc);
    for (i, &e) in vexps.iter().enumerate() {
        s = &s + &BSeriesHelpers::monomial_scalar(&coeffs[i], e, trunc);
    }
    let mut z = BSeries::zero(qmax);
    for q in 0..=qmax {
        z = &z + &BSeriesHelpers::monomial_scalar(&coeffs[vexps.len() + q], q, qmax);
    }
    Ok((s, z))
}

struct BSeriesHelpers;
impl BSeriesHelpers {
    fn monomial_scalar(c: &Scalar, e: usize, trunc: usize) -> BSeries {
        BSeries::monomial(c.clone(), e, trunc)
    }
}

/// Express `target` as a scalar combination of the columns, eliminating by
/// leading degree. Returns the coefficients, or `None` if the target is not
/// in the span through its truncation order.
fn express_in_columns(columns: &[BSeries], target: &BSeries) -> Option<Vec<Scalar>> {
    let n = columns.len();
    // working columns with their combination bookkeeping
    let mut work: Vec<(BSeries, Vec<Scalar>)> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut combo = vec![Scalar::zero(); n];
            combo[i] = Scalar::one();
            (c.clone(), combo)
        })
        .collect();
    // echelon by leading degree
    let mut pivots: Vec<(usize, BSeries, Vec<Scalar>)> = Vec::new(); // (lead, col, combo)
    'outer: while let Some(pos) = work.iter().position(|(c, _)| !c.is_zero()) {
        let (mut col, mut combo) = work.swap_remove(pos);
        loop {
            let lead = match col.valuation() {
                Some(v) => v,
                None => continue 'outer,
            };
            if let Some((_, pc, pcombo)) = pivots.iter().find(|(l, _, _)| *l == lead) {
                let f = &col.coeff(lead) * &pc.coeff(lead).inverse()?;
                col = &col - &pc.scale(&f);
                for (i, c) in pcombo.iter().enumerate() {
                    combo[i] = &combo[i] - &(&f * c);
                }
            } else {
                pivots.push((lead, col, combo));
                continue 'outer;
            }
        }
    }
    // reduce target
    let mut t = target.clone();
    let mut solution = vec![Scalar::zero(); n];
    while let Some(lead) = t.valuation() {
        let (_, pc, pcombo) = pivots.iter().find(|(l, _, _)| *l == lead)?;
        let f = &t.coeff(lead) * &pc.coeff(lead).inverse()?;
        t = &t - &pc.scale(&f);
        for (i, c) in pcombo.iter().enumerate() {
            solution[i] = &solution[i] + &(&f * c);
        }
    }
    Some(solution)
}

/// Result of extracting a presentation from a generator in `Ξ_λ`.
pub struct Extraction {
    pub presentation: ThemePresentation,
    /// Embedded standard basis `ê_1, …, ê_k` realizing the presentation,
    /// with `ê_k` the normalized input generator.
    pub chain: Vec<XiElement>,
    /// Unit `U` with `input = U·ê_k`.
    pub unit: BSeries,
}

/// Read a standard form off a generator: the top log coefficient's
/// valuation gives `λ_k`, peeling `(a − λ_k b)` descends one rank, and the
/// connecting series is the unit normalizing what remains.
pub fn from_generator(phi: &XiElement) -> Result<Extraction> {
    let d = phi
        .log_degree()
        .ok_or_else(|| Error::InvalidInput("zero generator".into()))?;
    let lambda = phi.lambda().clone();
    let top = phi.comp(d);
    let m = top.valuation().ok_or_else(|| {
        Error::PrecisionExhausted("top log coefficient vanishes through trunc".into())
    })?;
    let unit = top.shift_down(m)?;
    let lam_top = &lambda + &rat_int(m as i64);
    let phihat = phi.scale_series(&unit.inverse()?);
    if d == 0 {
        return Ok(Extraction {
            presentation: ThemePresentation::rank_one(lam_top),
            chain: vec![phihat],
            unit,
        });
    }
    let theta = phihat.apply_a_minus(&lam_top);
    if theta.log_degree() != Some(d - 1) {
        return Err(Error::NotATheme(format!(
            "peeling (a − {}·b) did not drop the log degree by one",
            rat_string(&lam_top)
        )));
    }
    let sub = from_generator(&theta)?;
    let c = sub.unit.constant_term();
    let c_inv = c.inverse().ok_or(Error::NonInvertible)?;
    let s_top = sub.unit.scale(&c_inv);
    let mut lambdas = sub.presentation.lambdas().to_vec();
    lambdas.push(lam_top);
    let mut series = sub.presentation.series().to_vec();
    series.push(s_top);
    let mut chain: Vec<XiElement> = sub.chain.iter().map(|x| x.scale(&c)).collect();
    chain.push(phihat);
    let presentation =
        ThemePresentation::new(lambdas, series).map_err(|e| Error::NotATheme(e.to_string()))?;
    Ok(Extraction {
        presentation,
        chain,
        unit,
    })
}

/// Embed a presentation back into `Ξ_λ`: returns the standard basis chain
/// `ê_1, …, ê_k`; the last element generates the presented theme.
pub fn embed_chain(pres: &ThemePresentation, trunc: usize) -> Result<Vec<XiElement>> {
    let k = pres.rank();
    if k == 0 {
        return Err(Error::InvalidInput("cannot embed the empty theme".into()));
    }
    let lambda = pres.lambda_class();
    let m1 = class_offset(&pres.lambdas()[0]);
    let mut chain = vec![XiElement::basis(lambda.clone(), 0, m1 as usize, trunc + k)];
    for j in 2..=k {
        let s = pres.series()[j - 2].padded_exact(chain[j - 2].min_trunc());
        let theta = chain[j - 2].scale_series(&s);
        let q = class_offset(&pres.lambdas()[j - 1]);
        let psi = solve_shift(q as usize, &theta)?;
        chain.push(psi);
    }
    Ok(chain)
}

/// The generator alone.
pub fn embed_in_xi(pres: &ThemePresentation, trunc: usize) -> Result<XiElement> {
    Ok(embed_chain(pres, trunc)?.pop().unwrap())
}

/// The homogeneous Bernstein element `a^k − Σ_j σ_j·b^{k−j}·a^j`, extracted
/// as the weight-`k` part of the expanded annihilator word.
pub fn bernstein_element(pres: &ThemePresentation, trunc: usize) -> Result<OpPoly> {
    let k = pres.rank();
    let p = pres.word().expand(trunc.max(k))?;
    Ok(p.weight_part(k))
}

/// Roots of `B̃(x) = Σ_j c_j·x(x+1)…(x+j−1)` where the homogeneous element
/// is `Σ_j c_j·b^{k−j}·a^j`; returned sorted with multiplicity. These are
/// the numbers `λ_j − (k−j)`; the Bernstein polynomial proper is
/// `(−1)^k·B̃(−x)`, so "geometric" means every returned root is positive.
pub fn bernstein_roots(pres: &ThemePresentation, trunc: usize) -> Result<Vec<Rat>> {
    let k = pres.rank();
    let element = bernstein_element(pres, trunc)?;
    // B̃ as a dense polynomial in x
    let mut poly = vec![Rat::zero(); k + 1];
    for j in 0..=k {
        let c = element.coeff(j).coeff(k - j);
        let c = c
            .as_rat()
            .ok_or_else(|| Error::InvalidInput("bernstein data involves t".into()))?
            .clone();
        if c.is_zero() {
            continue;
        }
        // rising factorial x(x+1)…(x+j−1)
        let mut rf = vec![Rat::one()];
        for i in 0..j {
            rf = poly_mul_linear(&rf, &rat_int(i as i64));
        }
        for (d, a) in rf.iter().enumerate() {
            poly[d] += &c * a;
        }
    }
    trim_poly(&mut poly);
    // candidate roots live in the class of λ, between λ_1 − (k−1) and λ_k
    let lambda = pres.lambda_class();
    let lo = class_offset(pres.lambdas().first().unwrap()) - k as i64 + 1;
    let hi = class_offset(pres.lambdas().last().unwrap());
    let mut roots = Vec::new();
    for t in lo..=hi {
        let cand = &lambda + &rat_int(t);
        loop {
            if poly.len() <= 1 {
                break;
            }
            if !poly_eval(&poly, &cand).is_zero() {
                break;
            }
            poly = poly_deflate(&poly, &cand);
            roots.push(cand.clone());
        }
    }
    if poly.len() > 1 {
        return Err(Error::NotATheme(
            "Bernstein polynomial has roots outside the λ-class window".into(),
        ));
    }
    roots.sort();
    Ok(roots)
}

fn poly_mul_linear(p: &[Rat], shift: &Rat) -> Vec<Rat> {
    // p(x)·(x + shift)
    let mut out = vec![Rat::zero(); p.len() + 1];
    for (d, c) in p.iter().enumerate() {
        out[d + 1] += c;
        out[d] += c * shift;
    }
    out
}

fn trim_poly(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_deflate(p: &[Rat], root: &Rat) -> Vec<Rat> {
    // divide by (x − root), exact
    let mut out = vec![Rat::zero(); p.len() - 1];
    let mut carry = Rat::zero();
    for d in (0..p.len() - 1).rev() {
        carry = &p[d + 1] + &(&carry * root);
        out[d] = carry.clone();
    }
    out
}

/// Canonicalization: every connecting series lands in its `V_j` span; the
/// presented theme is unchanged (the standard generator moves inside the
/// module).
pub fn canonical_form(pres: &ThemePresentation) -> Result<ThemePresentation> {
    Ok(canonical_form_with_change(pres)?.0)
}

/// Canonical form together with the coordinates, in the input standard
/// basis, of the generator realizing it.
pub fn canonical_form_with_change(
    pres: &ThemePresentation,
) -> Result<(ThemePresentation, Vec<BSeries>)> {
    let k = pres.rank();
    let trunc = pres.min_trunc().min(1 << 20);
    if k <= 1 {
        return Ok((pres.clone(), vec![BSeries::one(trunc)]));
    }
    let quotient = pres.quotient(1);
    let (qcan, qchange) = canonical_form_with_change(&quotient)?;
    // lift the quotient generator into E with zero e_1-coordinate
    let mut coords: Vec<BSeries> = Vec::with_capacity(k);
    coords.push(BSeries::zero(trunc));
    coords.extend(qchange.iter().map(|c| c.truncated(trunc)));
    let factors = qcan.word().factors().to_vec();
    let image = pres.apply_word_coords(&factors, &coords)?;
    for (i, w) in image.iter().enumerate().skip(1) {
        if !w.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "lifted generator image has residue on e_{} through trunc",
                i + 1
            )));
        }
    }
    let t_series = image[0].clone();
    let c = t_series.constant_term();
    let c_inv = c.inverse().ok_or(Error::NonInvertible)?;
    let t_norm = t_series.scale(&c_inv);
    let inv = pres.invariants();
    let v = vspace(&inv, 1);
    let (s1, z) = decompose_against(&factors, &pres.lambdas()[0], &t_norm, &v.exponents)?;
    // new generator ê = ẽ − (c·z)·e_1
    coords[0] = &coords[0] - &z.scale(&c);
    let mut series = vec![s1];
    series.extend(qcan.series().iter().cloned());
    let out = ThemePresentation::new(pres.lambdas().to_vec(), series)?;
    Ok((out, coords))
}

/// Twisted dual `E* ⊗ E_δ`: invariants reverse to `δ−λ_k, …, δ−λ_1` and the
/// connecting series reverse in order (the dual basis reverses the flag and
/// a sign normalization restores unit constant terms).
pub fn dual_twist(pres: &ThemePresentation, delta: &Rat) -> Result<ThemePresentation> {
    let k = pres.rank();
    let lam_k = pres
        .lambdas()
        .last()
        .ok_or_else(|| Error::InvalidInput("empty theme".into()))?;
    let bound = lam_k + rat_int(k as i64 - 1);
    if delta <= &bound {
        return Err(Error::DeltaTooSmall {
            delta: rat_string(delta),
            bound: rat_string(&bound),
        });
    }
    let lambdas: Vec<Rat> = pres.lambdas().iter().rev().map(|l| delta - l).collect();
    let series: Vec<BSeries> = pres.series().iter().rev().cloned().collect();
    ThemePresentation::new(lambdas, series)
}

/// Tensor by the rank-one module of exponent `δ`: all invariants shift by
/// `δ`, the series are untouched.
pub fn tensor_rank1(pres: &ThemePresentation, delta: &Rat) -> Result<ThemePresentation> {
    let k = pres.rank() as i64;
    let new_l1 = &pres.lambdas()[0] + delta;
    if new_l1 <= rat_int(k - 1) {
        return Err(Error::ShiftTooNegative {
            delta: rat_string(delta),
            new_lambda1: rat_string(&new_l1),
        });
    }
    let lambdas = pres.lambdas().iter().map(|l| l + delta).collect();
    ThemePresentation::new(lambdas, pres.series().to_vec())
}

/// The parameter of a rank-two theme with `p_1 >= 1`: the coefficient of
/// `b^{p_1}` in the connecting series.
pub fn rank2_parameter(pres: &ThemePresentation) -> Result<Scalar> {
    if pres.rank() != 2 {
        return Err(Error::WrongRank(format!(
            "parameter defined for rank 2, got {}",
            pres.rank()
        )));
    }
    let p1 = pres.ps()[0];
    if p1 == 0 {
        return Err(Error::WrongRank("parameter requires p_1 >= 1".into()));
    }
    if p1 > pres.series()[0].trunc() {
        return Err(Error::PrecisionExhausted(
            "parameter coefficient beyond truncation".into(),
        ));
    }
    Ok(pres.series()[0].coeff(p1))
}

/// Serialized presentation: all scalars as exact rational strings.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PresentationFile {
    pub lambda1: String,
    pub p: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<String>>,
    pub trunc: usize,
}

impl PresentationFile {
    pub fn from_presentation(pres: &ThemePresentation, trunc: usize) -> Self {
        PresentationFile {
            lambda1: rat_string(&pres.lambdas()[0]),
            p: pres.ps(),
            s: pres
                .series()
                .iter()
                .map(|s| (0..=trunc.min(s.trunc())).map(|n| s.coeff(n).to_string()).collect())
                .collect(),
            trunc,
        }
    }

    pub fn to_presentation(&self) -> Result<ThemePresentation> {
        let lambda1 = crate::scalar::parse_rat(&self.lambda1)
            .ok_or_else(|| Error::InvalidInput(format!("bad rational {}", self.lambda1)))?;
        let inv = FundamentalInvariants {
            lambda1,
            ps: self.p.clone(),
        };
        let series = self
            .s
            .iter()
            .map(|coeffs| {
                let rats: Option<Vec<Rat>> =
                    coeffs.iter().map(|c| crate::scalar::parse_rat(c)).collect();
                rats.map(|r| BSeries::from_rats(&r, self.trunc))
                    .ok_or_else(|| Error::InvalidInput("bad series coefficient".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        ThemePresentation::from_invariants(&inv, series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn srs(coeffs: &[i64], trunc: usize) -> BSeries {
        BSeries::from_rats(&coeffs.iter().map(|&n| rat_int(n)).collect::<Vec<_>>(), trunc)
    }

    fn pres(l1: Rat, ps: &[usize], s: Vec<BSeries>) -> ThemePresentation {
        ThemePresentation::from_invariants(
            &FundamentalInvariants {
                lambda1: l1,
                ps: ps.to_vec(),
            },
            s,
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        // rank 1, λ₁ = 3/4: valid
        assert!(ThemePresentation::rank_one(rat(3, 4)).validate().is_valid());
        // k=2, λ₁=5/2, p₁=2, S₁ = 1+b: coefficient of b² vanishes
        let bad = pres(rat(5, 2), &[2], vec![srs(&[1, 1], 8)]);
        let d = bad.validate();
        assert!(!d.is_valid());
        assert!(matches!(
            d.violations[0],
            Violation::VanishingPCoefficient { j: 1, p: 2 }
        ));
        // k=3, λ₁=3/2 must exceed 2
        let bad = pres(rat(3, 2), &[2, 2], vec![srs(&[1, 0, 1], 8), srs(&[1, 0, 1], 8)]);
        assert!(bad
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, Violation::LambdaBound { j: 1, .. })));
    }

    #[test]
    fn lambda_class_decomposition() {
        assert_eq!(lambda_class(&rat(5, 2)), rat(1, 2));
        assert_eq!(class_offset(&rat(5, 2)), 2);
        assert_eq!(lambda_class(&rat_int(3)), rat_int(1));
        assert_eq!(class_offset(&rat_int(3)), 2);
        assert_eq!(lambda_class(&rat(-1, 4)), rat(3, 4));
        assert_eq!(class_offset(&rat(-1, 4)), -1);
    }

    #[test]
    fn vspace_examples() {
        // k=2, j=1, p₁=0: tail 0 < 1 → {0}
        let v = vspace(
            &FundamentalInvariants {
                lambda1: rat(5, 2),
                ps: vec![0],
            },
            1,
        );
        assert_eq!(v.exponents, vec![0]);
        // k=3, p=(1,1), j=1: q₁ = 2 → {0,1,2}
        let v = vspace(
            &FundamentalInvariants {
                lambda1: rat_int(3),
                ps: vec![1, 1],
            },
            1,
        );
        assert_eq!(v.exponents, vec![0, 1, 2]);
        assert_eq!(v.q, Some(2));
        // k=4, p=(3,2,2), j=1: q₁ = 3 → {0,1,2,3}
        let v = vspace(
            &FundamentalInvariants {
                lambda1: rat_int(4),
                ps: vec![3, 2, 2],
            },
            1,
        );
        assert_eq!(v.exponents, vec![0, 1, 2, 3]);
        assert_eq!(v.q, Some(3));
    }

    #[test]
    fn quotient_and_submodule_slices() {
        let p = pres(
            rat(7, 2),
            &[1, 2],
            vec![srs(&[1, 5], 8), srs(&[1, 0, 7], 8)],
        );
        // j=0: trivial submodule, full quotient
        assert_eq!(p.submodule(0).rank(), 0);
        assert!(p.quotient(0).eq_through_trunc(&p));
        // F₂ of rank 3 keeps (λ₁; p₁) and S₁
        let f2 = p.submodule(2);
        assert_eq!(f2.lambdas(), &[rat(7, 2), rat(7, 2)]);
        assert!(f2.series()[0].eq_through_min_trunc(&srs(&[1, 5], 8)));
        // E/F₁ drops the connecting series S₁
        let q = p.quotient(1);
        assert_eq!(q.lambdas(), &[rat(7, 2), rat(9, 2)]);
        assert!(q.series()[0].eq_through_min_trunc(&srs(&[1, 0, 7], 8)));
    }

    #[test]
    fn exp_multiset_is_union_over_jh_quotients() {
        let p = pres(
            rat(7, 2),
            &[1, 2],
            vec![srs(&[1, 5], 10), srs(&[1, 0, 7], 10)],
        );
        let mut union: Vec<Rat> = Vec::new();
        for j in 1..=p.rank() {
            // F_j / F_{j−1} is the rank-one module of exponent λ_j
            let fj = p.submodule(j);
            union.push(fj.lambdas().last().unwrap().clone());
        }
        union.sort();
        let mut lambdas = p.lambdas().to_vec();
        lambdas.sort();
        assert_eq!(union, lambdas);
    }

    #[test]
    fn from_generator_rank_one() {
        let t = 10;
        let phi = XiElement::basis(rat(3, 4), 0, 0, t);
        let ex = from_generator(&phi).unwrap();
        assert_eq!(ex.presentation.rank(), 1);
        assert_eq!(ex.presentation.lambdas(), &[rat(3, 4)]);
    }

    #[test]
    fn from_generator_rank_two_standard() {
        // φ = b²·e_{λ,1} − b·e_{λ,0} over λ = 1/2 presents (λ₁ = 5/2; p₁ = 1)
        // with parameter 1; this is the formal-model shape of the classical
        // rank-two generator with its constant −1/n.
        let t = 14;
        let lam = rat(1, 2);
        let phi = XiElement::basis(lam.clone(), 1, 2, t)
            .add(&XiElement::basis(lam.clone(), 0, 1, t).scale(&Scalar::from_int(-1)));
        let ex = from_generator(&phi).unwrap();
        assert_eq!(ex.presentation.lambdas(), &[rat(5, 2), rat(5, 2)]);
        assert_eq!(ex.presentation.ps(), vec![1]);
        assert_eq!(rank2_parameter(&ex.presentation).unwrap(), Scalar::one());
    }

    #[test]
    fn embed_then_extract_round_trip() {
        let t = 24;
        let p = pres(
            rat(5, 2),
            &[1],
            vec![BSeries::from_rats(&[rat_int(1), rat(2, 3)], t)],
        );
        let phi = embed_in_xi(&p, t).unwrap();
        let ex = from_generator(&phi).unwrap();
        assert_eq!(ex.presentation.lambdas(), p.lambdas());
        assert_eq!(
            rank2_parameter(&ex.presentation).unwrap(),
            Scalar::Rat(rat(2, 3))
        );
        // rank oracle: the generated module has the presented rank
        let g = crate::xi::generate_module(&phi).unwrap();
        assert_eq!(g.rank, 2);
    }

    #[test]
    fn embed_rank_one_is_shifted_basis() {
        let t = 8;
        let p = ThemePresentation::rank_one(rat(7, 2));
        let phi = embed_in_xi(&p, t).unwrap();
        assert_eq!(phi.log_degree(), Some(0));
        assert_eq!(phi.comp(0).valuation(), Some(3));
    }

    #[test]
    fn word_annihilates_embedded_generator() {
        let t = 26;
        let p = pres(
            rat_int(3),
            &[2, 1],
            vec![srs(&[1, 0, 4], t), srs(&[1, 2], t)],
        );
        let phi = embed_in_xi(&p, t).unwrap();
        let img = p.word().apply_xi(&phi).unwrap();
        assert!(img.is_zero(), "annihilator word must kill the generator: {img:?}");
    }

    #[test]
    fn bernstein_examples() {
        let t = 12;
        // E_λ: element a − λb, root {λ}
        let p1 = ThemePresentation::rank_one(rat(3, 4));
        let roots = bernstein_roots(&p1, t).unwrap();
        assert_eq!(roots, vec![rat(3, 4)]);
        // k=2, (λ₁; p₁): roots {λ₁−1, λ₂}
        let p2 = pres(rat(5, 2), &[2], vec![srs(&[1, 0, 3], t)]);
        let roots = bernstein_roots(&p2, t).unwrap();
        assert_eq!(roots, vec![rat(3, 2), rat(7, 2)]);
        // geometric condition: all B̃-roots positive
        assert!(roots.iter().all(|r| r.is_positive()));
    }

    #[test]
    fn bernstein_element_matches_rising_factorial_oracle() {
        // Independent oracle: evaluate the homogeneous element on pure
        // powers of a rank-one chain, where a acts as (μ+r)·b on b^r·e_μ,
        // and compare with the product form over the invariants.
        let t = 16;
        let p = pres(
            rat_int(3),
            &[1, 2],
            vec![srs(&[1, 7], t), srs(&[1, 0, -2], t)],
        );
        let elt = bernstein_element(&p, t).unwrap();
        let k = p.rank();
        let eval = |mu: &Rat| -> Rat {
            // Σ_j c_j · μ(μ+1)…(μ+j−1), c_j the coefficient of b^{k−j} a^j
            let mut acc = Rat::zero();
            for j in 0..=k {
                let c = elt.coeff(j).coeff(k - j);
                let c = c.as_rat().unwrap().clone();
                acc += c * crate::scalar::rising_factorial(mu, j);
            }
            acc
        };
        for (j, lam) in p.lambdas().iter().enumerate() {
            let root = lam - &rat_int((k - (j + 1)) as i64);
            assert!(eval(&root).is_zero(), "λ_{} − (k−j) must be a root", j + 1);
        }
        let roots = bernstein_roots(&p, t).unwrap();
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn bernstein_roots_stable_under_generator_change() {
        let t = 26;
        let p = pres(rat(5, 2), &[2], vec![srs(&[1, 1, 3], t)]);
        let chain = embed_chain(&p, t).unwrap();
        let phi = chain.last().unwrap();
        // change the generator by a unit and an F_{k−1}-perturbation
        let changed = phi
            .scale_series(&srs(&[1, 2, -1], t))
            .add(&chain[0].scale_series(&srs(&[3, 1], t)));
        let ex = from_generator(&changed).unwrap();
        assert_eq!(
            bernstein_roots(&ex.presentation, t).unwrap(),
            bernstein_roots(&p, t).unwrap()
        );
    }

    #[test]
    fn decompose_reconstructs() {
        let t = 18;
        let mut rng = StdRng::seed_from_u64(5);
        let p = pres(
            rat_int(3),
            &[1, 1],
            vec![srs(&[1, 2, 1], t), srs(&[1, 1], t)],
        );
        let q = p.quotient(1);
        let factors = q.word().factors().to_vec();
        let v = vspace(&p.invariants(), 1);
        for _ in 0..6 {
            let coeffs: Vec<Rat> = (0..=6)
                .map(|i| {
                    if i == 0 {
                        Rat::one()
                    } else {
                        rat(rng.gen_range(-3..4), 1)
                    }
                })
                .collect();
            let t_series = BSeries::from_rats(&coeffs, t);
            let (s, z) = decompose_against(&factors, &p.lambdas()[0], &t_series, &v.exponents)
                .unwrap();
            // support of s inside the V exponents
            for n in 0..=s.trunc() {
                if !s.coeff(n).is_zero() {
                    assert!(v.exponents.contains(&n));
                }
            }
            // reconstruction: S + P·z = T
            let pz = word_apply_rank_one(&factors, &p.lambdas()[0], &z).unwrap();
            let back = &s.truncated(pz.trunc()) + &pz;
            assert!(back.eq_through_min_trunc(&t_series));
        }
    }

    #[test]
    fn decompose_t_equal_one() {
        let t = 14;
        let p = pres(rat_int(3), &[1, 1], vec![srs(&[1], t), srs(&[1, 1], t)]);
        let q = p.quotient(1);
        let v = vspace(&p.invariants(), 1);
        let (s, z) =
            decompose_against(q.word().factors(), &p.lambdas()[0], &BSeries::one(t), &v.exponents)
                .unwrap();
        assert!(s.eq_through_min_trunc(&BSeries::one(t)));
        assert!(z.is_zero());
    }

    #[test]
    fn canonical_form_drops_irrelevant_coefficients() {
        // k=2, p₁=2, S₁ = 1 + x₁·b + α·b²: the x₁ coefficient is irrelevant
        // and the canonical form is 1 + α·b².
        let t = 16;
        let p = pres(rat(5, 2), &[2], vec![srs(&[1, 4, 7], t)]);
        let c = canonical_form(&p).unwrap();
        assert_eq!(c.series()[0].coeff(0), Scalar::one());
        assert!(c.series()[0].coeff(1).is_zero());
        assert_eq!(c.series()[0].coeff(2), Scalar::from_int(7));
        for n in 3..=c.series()[0].trunc() {
            assert!(c.series()[0].coeff(n).is_zero());
        }
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let t = 18;
        let p = pres(
            rat_int(3),
            &[1, 1],
            vec![srs(&[1, 2, 5], t), srs(&[1, 2], t)],
        );
        let c1 = canonical_form(&p).unwrap();
        let c2 = canonical_form(&c1).unwrap();
        assert!(c1.eq_through_trunc(&c2));
        assert!(c1.validate().is_valid());
    }

    #[test]
    fn canonical_change_is_a_generator_with_same_annihilator() {
        let t = 20;
        let p = pres(
            rat_int(3),
            &[1, 1],
            vec![srs(&[1, 2, 5, 1], t), srs(&[1, 2, 3], t)],
        );
        let (can, coords) = canonical_form_with_change(&p).unwrap();
        // top coordinate is a unit
        assert!(!coords.last().unwrap().constant_term().is_zero());
        // the canonical word annihilates the moved generator inside the
        // original presentation
        let img = p.apply_word_coords(can.word().factors(), &coords).unwrap();
        for w in &img {
            assert!(w.is_zero(), "canonical word must annihilate the new generator");
        }
    }

    #[test]
    fn dual_twist_examples() {
        let t = 10;
        // k=1: invariants δ−λ₁
        let p = ThemePresentation::rank_one(rat(3, 4));
        let d = dual_twist(&p, &rat_int(2)).unwrap();
        assert_eq!(d.lambdas(), &[rat(5, 4)]);
        // k=2, (5/2, 7/2), δ=13/2 → (3, 4)
        let p = pres(rat(5, 2), &[2], vec![srs(&[1, 0, 3], t)]);
        let d = dual_twist(&p, &rat(13, 2)).unwrap();
        assert_eq!(d.lambdas(), &[rat_int(3), rat_int(4)]);
        // rank-2 parameter preserved
        assert_eq!(rank2_parameter(&d).unwrap(), Scalar::from_int(3));
        // δ too small is rejected
        assert!(matches!(
            dual_twist(&p, &rat_int(4)),
            Err(Error::DeltaTooSmall { .. })
        ));
        // double twist restores the presentation on the nose
        let dd = dual_twist(&d, &rat(13, 2)).unwrap();
        assert!(dd.eq_through_trunc(&p));
    }

    #[test]
    fn tensor_shift_examples() {
        let t = 10;
        let p = pres(rat(5, 2), &[2], vec![srs(&[1, 0, 3], t)]);
        // δ = 0 is the identity
        assert!(tensor_rank1(&p, &rat_int(0)).unwrap().eq_through_trunc(&p));
        // E_λ ⊗ E_μ ≃ E_{λ+μ}
        let e = ThemePresentation::rank_one(rat(3, 4));
        let shifted = tensor_rank1(&e, &rat(1, 2)).unwrap();
        assert_eq!(shifted.lambdas(), &[rat(5, 4)]);
        // parameter unchanged
        let sh = tensor_rank1(&p, &rat_int(2)).unwrap();
        assert_eq!(rank2_parameter(&sh).unwrap(), Scalar::from_int(3));
        // dropping below the bound is rejected
        assert!(matches!(
            tensor_rank1(&p, &rat_int(-2)),
            Err(Error::ShiftTooNegative { .. })
        ));
    }

    #[test]
    fn rank2_parameter_ignores_lower_terms() {
        let t = 10;
        let p = pres(rat(5, 2), &[2], vec![srs(&[1, 9, 4], t)]);
        assert_eq!(rank2_parameter(&p).unwrap(), Scalar::from_int(4));
        // invariant under canonicalization
        let c = canonical_form(&p).unwrap();
        assert_eq!(rank2_parameter(&c).unwrap(), Scalar::from_int(4));
        // wrong rank
        assert!(matches!(
            rank2_parameter(&ThemePresentation::rank_one(rat(1, 2))),
            Err(Error::WrongRank(_))
        ));
    }

    #[test]
    fn presentation_file_round_trip() {
        let t = 12;
        let p = pres(
            rat(5, 2),
            &[3, 2, 2],
            vec![
                srs(&[1, 0, 0, 7], t),
                srs(&[1, 2, 3], t),
                srs(&[1, 0, -5], t),
            ],
        );
        let f = PresentationFile::from_presentation(&p, t);
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"lambda1\":\"5/2\""));
        let back: PresentationFile = serde_json::from_str(&json).unwrap();
        let q = back.to_presentation().unwrap();
        assert!(p.eq_through_trunc(&q));
    }

    #[test]
    fn filtration_matches_embedded_submodule() {
        // the normal rank-j submodule from the presentation equals the
        // intersection filtration of the embedded module, as C[[b]]-spans
        let t = 22;
        let p = pres(
            rat_int(3),
            &[2, 1],
            vec![srs(&[1, 1, 2], t), srs(&[1, 3], t)],
        );
        let chain = embed_chain(&p, t).unwrap();
        let g = crate::xi::generate_module(chain.last().unwrap()).unwrap();
        for j in 1..=3usize {
            let (fbasis, _) = crate::xi::filtration_member(&g, j).unwrap();
            let n_comps = 3;
            let to_cols = |xs: &[XiElement]| -> Vec<Vec<BSeries>> {
                xs.iter()
                    .map(|x| (0..n_comps).map(|c| x.comp(c)).collect())
                    .collect()
            };
            let fcols = to_cols(&fbasis);
            let ccols = to_cols(&chain[..j]);
            // mutual containment of spans
            assert!(
                crate::linalg::solve_in_span(&fcols, &ccols).is_some(),
                "chain elements must lie in the filtration span at j={j}"
            );
            assert!(
                crate::linalg::solve_in_span(&ccols, &fcols).is_some(),
                "filtration must lie in the chain span at j={j}"
            );
        }
    }
}
