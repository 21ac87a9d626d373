//! Hom spaces, endomorphisms, invariance, isomorphism and Ext dimensions.
//!
//! Every existence question reduces to the same triangular system: an
//! element `x = σ·b^{μ_k−λ_k}·e_k + Σ W_j·e_j` of the target annihilated by
//! the source's standard word. Peeling the top factor turns that into a
//! solution `y` of the one-rank-down pair plus a chain of first-order
//! solves for the `W_j`, whose resonant coefficients are steered to kill
//! the obstruction slots. The solver runs that chain with symbolic
//! parameters (the mixing coefficients of the sub-solution space, the
//! leading scalar and the free resonant constants) and collects the
//! obstruction slots as linear equations; a failure certificate is the
//! first equation that closes the system inconsistently.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rat_int, rat_string, Rat, Scalar};
use crate::series::BSeries;
use crate::theme::{
    canonical_form, lambda_class, rank2_parameter, ThemePresentation, STABILIZATION_MARGIN,
};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// parametric scalars and series

/// Affine-linear form `c + Σ coeff_p·x_p` over the rationals.
#[derive(Clone, Debug, PartialEq)]
struct Lin {
    c: Rat,
    terms: BTreeMap<usize, Rat>,
}

impl Lin {
    fn zero() -> Self {
        Lin {
            c: Rat::zero(),
            terms: BTreeMap::new(),
        }
    }

    fn from_rat(c: Rat) -> Self {
        Lin {
            c,
            terms: BTreeMap::new(),
        }
    }

    fn param(p: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, Rat::from_integer(1.into()));
        Lin {
            c: Rat::zero(),
            terms,
        }
    }

    fn is_zero(&self) -> bool {
        self.c.is_zero() && self.terms.is_empty()
    }

    fn add(&self, rhs: &Lin) -> Lin {
        let mut terms = self.terms.clone();
        for (p, v) in &rhs.terms {
            let e = terms.entry(*p).or_insert_with(Rat::zero);
            *e += v;
        }
        terms.retain(|_, v| !v.is_zero());
        Lin {
            c: &self.c + &rhs.c,
            terms,
        }
    }

    fn sub(&self, rhs: &Lin) -> Lin {
        self.add(&rhs.scale(&rat_int(-1)))
    }

    fn scale(&self, f: &Rat) -> Lin {
        if f.is_zero() {
            return Lin::zero();
        }
        Lin {
            c: &self.c * f,
            terms: self.terms.iter().map(|(p, v)| (*p, v * f)).collect(),
        }
    }

    fn eval(&self, values: &[Rat]) -> Rat {
        let mut acc = self.c.clone();
        for (p, v) in &self.terms {
            acc += v * &values[*p];
        }
        acc
    }
}

/// Series with affine-linear coefficients.
#[derive(Clone, Debug)]
struct LinSeries {
    coeffs: Vec<Lin>,
}

impl LinSeries {
    fn zero(trunc: usize) -> Self {
        LinSeries {
            coeffs: vec![Lin::zero(); trunc + 1],
        }
    }

    fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn coeff(&self, n: usize) -> Lin {
        self.coeffs.get(n).cloned().unwrap_or_else(Lin::zero)
    }

    fn param_monomial(p: usize, degree: usize, trunc: usize) -> Self {
        let mut s = LinSeries::zero(trunc);
        s.coeffs[degree] = Lin::param(p);
        s
    }

    fn add(&self, rhs: &LinSeries) -> Self {
        let t = self.trunc().min(rhs.trunc());
        LinSeries {
            coeffs: (0..=t).map(|n| self.coeff(n).add(&rhs.coeff(n))).collect(),
        }
    }

    fn sub(&self, rhs: &LinSeries) -> Self {
        let t = self.trunc().min(rhs.trunc());
        LinSeries {
            coeffs: (0..=t).map(|n| self.coeff(n).sub(&rhs.coeff(n))).collect(),
        }
    }

    /// Product with a plain series (coefficients stay affine-linear).
    fn mul_plain(&self, s: &BSeries) -> Result<Self> {
        let t = self.trunc().min(s.trunc());
        let mut out = vec![Lin::zero(); t + 1];
        for (i, c) in self.coeffs.iter().enumerate().take(t + 1) {
            if c.is_zero() {
                continue;
            }
            for j in 0..=(t - i) {
                let f = s.coeff(j);
                let f = f
                    .as_rat()
                    .ok_or_else(|| Error::InvalidInput("hom solver needs rational data".into()))?
                    .clone();
                if f.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&c.scale(&f));
            }
        }
        Ok(LinSeries { coeffs: out })
    }

    fn eval(&self, values: &[Rat]) -> BSeries {
        BSeries::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| Scalar::Rat(c.eval(values)))
                .collect(),
            self.trunc(),
        )
    }
}

/// Rational series times one parameter.
fn series_times_param(s: &BSeries, p: usize, trunc: usize) -> Result<LinSeries> {
    let mut out = LinSeries::zero(trunc.min(s.trunc()));
    for n in 0..=out.trunc() {
        let c = s.coeff(n);
        let c = c
            .as_rat()
            .ok_or_else(|| Error::InvalidInput("hom solver needs rational data".into()))?;
        if !c.is_zero() {
            out.coeffs[n] = Lin::param(p).scale(c);
        }
    }
    Ok(out)
}

/// Incremental affine system kept in echelon form.
struct AffineSystem {
    /// rows: (coefficients, rhs, pivot column).
    rows: Vec<(Vec<Rat>, Rat, usize)>,
    width: usize,
}

impl AffineSystem {
    fn new() -> Self {
        AffineSystem {
            rows: Vec::new(),
            width: 0,
        }
    }

    fn widen(&mut self, w: usize) {
        if w > self.width {
            self.width = w;
            for (coeffs, _, _) in self.rows.iter_mut() {
                coeffs.resize(w, Rat::zero());
            }
        }
    }

    /// Add `form = 0`. On inconsistency returns the nonzero residual.
    fn add_equation(&mut self, form: &Lin) -> std::result::Result<(), Rat> {
        let needed = form.terms.keys().max().map(|p| p + 1).unwrap_or(0);
        self.widen(needed);
        let mut coeffs = vec![Rat::zero(); self.width];
        for (p, v) in &form.terms {
            coeffs[*p] = v.clone();
        }
        let mut rhs = -form.c.clone();
        for (rc, rr, rp) in &self.rows {
            if !coeffs[*rp].is_zero() {
                let f = coeffs[*rp].clone();
                for (i, c) in rc.iter().enumerate() {
                    coeffs[i] -= &f * c;
                }
                rhs -= &f * rr;
            }
        }
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                let lead = coeffs[p].clone();
                for c in coeffs.iter_mut() {
                    *c = &*c / &lead;
                }
                let rhs = rhs / lead;
                self.rows.push((coeffs, rhs, p));
                Ok(())
            }
            None => {
                if rhs.is_zero() {
                    Ok(())
                } else {
                    Err(rhs)
                }
            }
        }
    }

    /// Particular solution with every free parameter set to zero.
    fn particular(&self, nparams: usize) -> Vec<Rat> {
        let mut values = vec![Rat::zero(); nparams.max(self.width)];
        let mut rows: Vec<_> = self.rows.iter().collect();
        rows.sort_by_key(|(_, _, p)| std::cmp::Reverse(*p));
        for (coeffs, rhs, p) in rows {
            let mut v = rhs.clone();
            for (i, c) in coeffs.iter().enumerate() {
                if i != *p && !c.is_zero() {
                    v -= c * &values[i];
                }
            }
            values[*p] = v;
        }
        values
    }
}

// ---------------------------------------------------------------------------
// solutions and certificates

/// Image data of an `Ã`-linear map between presented themes.
#[derive(Clone, Debug)]
pub struct HomSolution {
    /// Coordinates of the image of the source's standard generator in the
    /// target's standard basis (length = target rank).
    pub image: Vec<BSeries>,
    /// Rank of the map.
    pub rank: usize,
    /// Leading scalar on `b^{μ_k−λ_k}·e_k`; nonzero for full-rank maps.
    pub sigma: Rat,
}

/// Certificate that the constructive chain cannot produce a full-rank map:
/// the first linear slot that closed the system inconsistently.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ObstructionCert {
    /// Standard-basis level of the first blocked equation.
    pub level: usize,
    /// `b`-degree of the blocked coefficient.
    pub degree: usize,
    /// Residual value at that slot, as an exact rational string.
    pub value: String,
    /// Human-readable reason.
    pub reason: String,
}

enum Outcome {
    Found(HomSolution),
    Obstructed(ObstructionCert),
}

fn class_gap(mu: &Rat, lam: &Rat) -> Option<i64> {
    let d = mu - lam;
    if crate::scalar::is_integer(&d) {
        Some(crate::scalar::to_i64(&d))
    } else {
        None
    }
}

/// Full-rank solution of `P_src·x = 0` in the target, both of rank `r`.
fn full_rank_solution(
    src: &ThemePresentation,
    dst: &ThemePresentation,
    trunc: usize,
) -> Result<Outcome> {
    let r = src.rank();
    debug_assert_eq!(r, dst.rank());
    // necessary condition: μ_j >= λ_j for all j
    for j in 0..r {
        match class_gap(&src.lambdas()[j], &dst.lambdas()[j]) {
            Some(d) if d >= 0 => {}
            Some(d) => {
                return Ok(Outcome::Obstructed(ObstructionCert {
                    level: j + 1,
                    degree: 0,
                    value: d.to_string(),
                    reason: format!(
                        "necessary condition fails: mu_{} - lambda_{} = {} < 0",
                        j + 1,
                        j + 1,
                        d
                    ),
                }));
            }
            None => {
                return Ok(Outcome::Obstructed(ObstructionCert {
                    level: j + 1,
                    degree: 0,
                    value: "non-integer".into(),
                    reason: "lambda classes differ".into(),
                }));
            }
        }
    }
    if r == 1 {
        let d = class_gap(&src.lambdas()[0], &dst.lambdas()[0]).unwrap() as usize;
        return Ok(Outcome::Found(HomSolution {
            image: vec![BSeries::monomial(Scalar::one(), d, trunc)],
            rank: 1,
            sigma: rat_int(1),
        }));
    }

    let sub_src = src.submodule(r - 1);
    let sub_dst = dst.submodule(r - 1);
    let ybasis = hom_basis(&sub_src, &sub_dst, trunc)?;

    // parameters: 0 = σ, then the mixing coefficients, then the free
    // resonant constants created level by level
    let mut next_param = 1;
    let mix: Vec<usize> = ybasis
        .iter()
        .map(|_| {
            let p = next_param;
            next_param += 1;
            p
        })
        .collect();
    let mut system = AffineSystem::new();
    let sigma_one = Lin::param(0).sub(&Lin::from_rat(rat_int(1)));
    system
        .add_equation(&sigma_one)
        .expect("fresh system accepts sigma = 1");

    let nu_r = class_gap(&src.lambdas()[r - 1], &dst.lambdas()[r - 1]).unwrap();
    debug_assert!(nu_r >= 0);
    let t_top = src.series()[r - 2].padded_exact(trunc);

    // parametric coordinates of y = Σ t_i·y_i on e_1..e_{r−1}
    let y_coords: Vec<LinSeries> = (0..r - 1)
        .map(|h| {
            let mut acc = LinSeries::zero(trunc);
            for (i, sol) in ybasis.iter().enumerate() {
                acc = acc.add(&series_times_param(
                    &sol.image[h].padded_exact(trunc),
                    mix[i],
                    trunc,
                )?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    // W_r = σ·b^{ν_r}; solve downwards for W_{r−1}, …, W_1
    let mut w_above = LinSeries::param_monomial(0, nu_r as usize, trunc);
    let mut ws: Vec<LinSeries> = vec![LinSeries::zero(0); r - 1];
    for h in (1..=r - 1).rev() {
        let s_h = dst.series()[h - 1].padded_exact(trunc);
        let rhs = y_coords[h - 1]
            .mul_plain(&t_top)?
            .sub(&w_above.mul_plain(&s_h)?);
        let m_h = class_gap(&src.lambdas()[r - 1], &dst.lambdas()[h - 1]).unwrap();
        // constant-term slot
        if let Err(residual) = system.add_equation(&rhs.coeff(0)) {
            return Ok(Outcome::Obstructed(ObstructionCert {
                level: h,
                degree: 0,
                value: rat_string(&residual),
                reason: format!("constant-term slot blocked at level {h}"),
            }));
        }
        // resonant slot at degree m_h + 1
        if m_h >= 0 {
            let slot = (m_h + 1) as usize;
            if slot > rhs.trunc() {
                return Err(Error::PrecisionExhausted(format!(
                    "obstruction slot b^{slot} beyond truncation {}",
                    rhs.trunc()
                )));
            }
            if let Err(residual) = system.add_equation(&rhs.coeff(slot)) {
                return Ok(Outcome::Obstructed(ObstructionCert {
                    level: h,
                    degree: slot,
                    value: rat_string(&residual),
                    reason: format!("resonant slot b^{slot} blocked at level {h}"),
                }));
            }
        }
        // solve b²W' − m_h·b·W = rhs coefficientwise: (n−m_h)·W_n = rhs_{n+1}
        let wt = rhs.trunc() - 1;
        let mut w = LinSeries::zero(wt);
        for n in 0..=wt {
            let d = n as i64 - m_h;
            if d == 0 {
                let p = next_param;
                next_param += 1;
                w.coeffs[n] = Lin::param(p);
            } else {
                w.coeffs[n] = rhs.coeff(n + 1).scale(&(rat_int(1) / rat_int(d)));
            }
        }
        ws[h - 1] = w.clone();
        w_above = w;
    }

    let values = system.particular(next_param);
    let mut image: Vec<BSeries> = ws.iter().map(|w| w.eval(&values)).collect();
    image.push(BSeries::monomial(
        Scalar::Rat(values[0].clone()),
        nu_r as usize,
        trunc,
    ));
    // independent verification: the source word annihilates the image
    let img = dst.apply_word_coords(src.word().factors(), &image)?;
    for (i, w) in img.iter().enumerate() {
        if !w.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "solver residue on e_{} through trunc; raise the working order",
                i + 1
            )));
        }
    }
    Ok(Outcome::Found(HomSolution {
        image,
        rank: r,
        sigma: values[0].clone(),
    }))
}

/// Basis of the solution space of `P_src·x = 0` in the target: one element
/// per realized rank level (each level contributes at most one dimension).
/// A rank-`j` map factors through the source's rank-`j` quotient into the
/// target's rank-`j` submodule.
fn hom_basis(
    src: &ThemePresentation,
    dst: &ThemePresentation,
    trunc: usize,
) -> Result<Vec<HomSolution>> {
    let ks = src.rank();
    let kd = dst.rank();
    let mut out = Vec::new();
    for j in 1..=ks.min(kd) {
        let q = src.quotient(ks - j);
        let s = dst.submodule(j);
        if let Outcome::Found(sol) = full_rank_solution(&q, &s, trunc)? {
            let mut image = sol.image;
            image.resize(kd, BSeries::zero(trunc));
            out.push(HomSolution {
                image,
                rank: j,
                sigma: sol.sigma,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// public decision procedures

/// Outcome of an injection search, with stabilization metadata.
#[derive(Clone, Debug)]
pub struct InjectionReport {
    pub solution: Option<HomSolution>,
    pub obstruction: Option<ObstructionCert>,
    /// The C-codimension of the image in the target — only on success;
    /// equals `Σ_j (μ_j − λ_j)`.
    pub cokernel_dim: Option<usize>,
    pub trunc_used: usize,
    pub stabilized: bool,
}

impl InjectionReport {
    pub fn found(&self) -> bool {
        self.solution.is_some()
    }
}

fn injection_once(
    src: &ThemePresentation,
    dst: &ThemePresentation,
    trunc: usize,
) -> Result<InjectionReport> {
    let src = src.with_trunc(trunc);
    let dst = dst.with_trunc(trunc);
    match full_rank_solution(&src, &dst, trunc)? {
        Outcome::Found(sol) => {
            // image-module determinant valuation = C-codimension
            let r = dst.rank();
            let mut cols = Vec::with_capacity(r);
            let mut cur = sol.image.clone();
            for _ in 0..r {
                cols.push(cur.clone());
                cur = dst.apply_a_coords(&cur);
            }
            let mat: Vec<Vec<BSeries>> = (0..r)
                .map(|row| (0..r).map(|c| cols[c][row].clone()).collect())
                .collect();
            let (val, _) = linalg::det_certificate(&mat)?;
            Ok(InjectionReport {
                solution: Some(sol),
                obstruction: None,
                cokernel_dim: Some(val),
                trunc_used: trunc,
                stabilized: false,
            })
        }
        Outcome::Obstructed(cert) => Ok(InjectionReport {
            solution: None,
            obstruction: Some(cert),
            cokernel_dim: None,
            trunc_used: trunc,
            stabilized: false,
        }),
    }
}

/// Search for an `Ã`-linear injection between equal-rank themes of the same
/// λ-class. Success is verified by applying the source word to the witness;
/// failure carries the first blocked slot and every answer is re-derived at
/// a higher truncation to set the `stabilized` flag.
pub fn find_injection(
    src: &ThemePresentation,
    dst: &ThemePresentation,
) -> Result<InjectionReport> {
    if src.rank() != dst.rank() {
        return Err(Error::InvalidInput(format!(
            "injection search needs equal ranks, got {} and {}",
            src.rank(),
            dst.rank()
        )));
    }
    if src.rank() == 0 {
        return Err(Error::InvalidInput("empty themes".into()));
    }
    if lambda_class(&src.lambdas()[0]) != lambda_class(&dst.lambdas()[0]) {
        return Err(Error::InvalidInput("different lambda classes".into()));
    }
    let t0 = src
        .invariants()
        .default_trunc()
        .max(dst.invariants().default_trunc());
    let first = injection_once(src, dst, t0)?;
    let second = injection_once(src, dst, t0 + STABILIZATION_MARGIN)?;
    let stable = first.found() == second.found()
        && first.cokernel_dim == second.cokernel_dim
        && match (&first.obstruction, &second.obstruction) {
            (Some(a), Some(b)) => a.level == b.level && a.degree == b.degree,
            (None, None) => true,
            _ => false,
        };
    Ok(InjectionReport {
        stabilized: stable,
        trunc_used: t0,
        ..first
    })
}

/// One realized endomorphism rank level with its witness.
#[derive(Clone, Debug)]
pub struct EndLevel {
    pub rank: usize,
    /// Witness injection `E/F_{k−j} → F_j`; `None` for the identity level.
    pub witness: Option<HomSolution>,
}

/// Endomorphism algebra data: the dimension and the realized rank flag.
#[derive(Clone, Debug)]
pub struct EndReport {
    pub dimension: usize,
    pub levels: Vec<EndLevel>,
    pub trunc_used: usize,
    pub stabilized: bool,
}

fn end_levels_once(pres: &ThemePresentation, trunc: usize) -> Result<Vec<EndLevel>> {
    let k = pres.rank();
    let pres = pres.with_trunc(trunc);
    let mut levels = Vec::new();
    for j in 1..k {
        let q = pres.quotient(k - j);
        let s = pres.submodule(j);
        match full_rank_solution(&q, &s, trunc)? {
            Outcome::Found(sol) => levels.push(EndLevel {
                rank: j,
                witness: Some(sol),
            }),
            Outcome::Obstructed(_) => {}
        }
    }
    // the identity always realizes rank k
    levels.push(EndLevel {
        rank: k,
        witness: None,
    });
    Ok(levels)
}

/// `dim_C End(E) = 1 + #{j < k : E/F_{k−j} injects into F_j}`, with the
/// realized rank flag.
pub fn end_dimension(pres: &ThemePresentation) -> Result<EndReport> {
    let t0 = pres.invariants().default_trunc();
    let first = end_levels_once(pres, t0)?;
    let second = end_levels_once(pres, t0 + STABILIZATION_MARGIN)?;
    let ranks: Vec<usize> = first.iter().map(|l| l.rank).collect();
    let ranks2: Vec<usize> = second.iter().map(|l| l.rank).collect();
    Ok(EndReport {
        dimension: first.len(),
        levels: first,
        trunc_used: t0,
        stabilized: ranks == ranks2,
    })
}

/// Invariance decision: a rank-`k` theme is invariant when it has an
/// endomorphism of rank `k−1`, i.e. its top quotient injects into `F_{k−1}`.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// Coordinates, in the presentation's own standard basis, of an element
    /// of `F_{k−1} \ F_{k−2}` annihilated by the quotient word.
    pub witness: Option<Vec<BSeries>>,
    pub obstruction: Option<ObstructionCert>,
    pub trunc_used: usize,
    pub stabilized: bool,
}

pub fn is_invariant(pres: &ThemePresentation) -> Result<InvarianceReport> {
    let k = pres.rank();
    if k == 0 {
        return Err(Error::InvalidInput("empty theme".into()));
    }
    let t0 = pres.invariants().default_trunc();
    if k == 1 {
        return Ok(InvarianceReport {
            invariant: true,
            witness: Some(vec![BSeries::zero(t0)]),
            obstruction: None,
            trunc_used: t0,
            stabilized: true,
        });
    }
    let report = find_injection(&pres.quotient(1), &pres.submodule(k - 1))?;
    Ok(InvarianceReport {
        invariant: report.found(),
        witness: report.solution.map(|s| s.image),
        obstruction: report.obstruction,
        trunc_used: report.trunc_used,
        stabilized: report.stabilized,
    })
}

/// Three-valued isomorphism decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsoDecision {
    Isomorphic,
    NotIsomorphic,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct IsoReport {
    pub decision: IsoDecision,
    pub reason: String,
    /// On success by search: coordinates expressing a generator with the
    /// second theme's annihilator inside the first theme.
    pub witness: Option<HomSolution>,
    pub obstruction: Option<ObstructionCert>,
    pub trunc_used: usize,
    pub stabilized: bool,
}

/// Decide isomorphism: differing invariants or flag parameters are
/// decisive; invariant (or more generally property-U) themes compare by
/// their unique canonical forms; otherwise a generator-change search is
/// attempted and an unresolved failure is reported as `Unknown`, never
/// guessed.
pub fn isomorphic(a: &ThemePresentation, b: &ThemePresentation) -> Result<IsoReport> {
    let t0 = a
        .invariants()
        .default_trunc()
        .max(b.invariants().default_trunc());
    if a.rank() != b.rank() || a.lambdas() != b.lambdas() {
        return Ok(IsoReport {
            decision: IsoDecision::NotIsomorphic,
            reason: "fundamental invariants differ".into(),
            witness: None,
            obstruction: None,
            trunc_used: t0,
            stabilized: true,
        });
    }
    let a = a.with_trunc(t0);
    let b = b.with_trunc(t0);
    // rank-two subquotients along the flag are isomorphism invariants
    let k = a.rank();
    for j in 1..k {
        let sa = subquotient_pair(&a, j);
        let sb = subquotient_pair(&b, j);
        if sa.ps()[0] >= 1 {
            let pa = rank2_parameter(&sa)?;
            let pb = rank2_parameter(&sb)?;
            if pa != pb {
                return Ok(IsoReport {
                    decision: IsoDecision::NotIsomorphic,
                    reason: format!(
                        "rank-2 subquotient parameter at level {j} differs: {pa} vs {pb}"
                    ),
                    witness: None,
                    obstruction: None,
                    trunc_used: t0,
                    stabilized: true,
                });
            }
        }
    }
    let inv_a = is_invariant(&a)?;
    let inv_b = is_invariant(&b)?;
    if inv_a.invariant != inv_b.invariant {
        return Ok(IsoReport {
            decision: IsoDecision::NotIsomorphic,
            reason: "one theme is invariant, the other is not".into(),
            witness: None,
            obstruction: None,
            trunc_used: t0,
            stabilized: inv_a.stabilized && inv_b.stabilized,
        });
    }
    let decisive_canonical = if inv_a.invariant {
        true
    } else {
        matches!(property_u(&a)?.value, UValue::True)
            && matches!(property_u(&b)?.value, UValue::True)
    };
    // generator-change search: find b's annihilator realized inside a
    let search = find_injection(&b, &a)?;
    if decisive_canonical {
        let ca = canonical_form(&a)?;
        let cb = canonical_form(&b)?;
        let equal = ca.canonical_key() == cb.canonical_key();
        return Ok(IsoReport {
            decision: if equal {
                IsoDecision::Isomorphic
            } else {
                IsoDecision::NotIsomorphic
            },
            reason: if equal {
                "canonical forms coincide (unique for this class)".into()
            } else {
                "canonical forms differ and are unique for this class".into()
            },
            witness: if equal { search.solution } else { None },
            obstruction: if equal { None } else { search.obstruction },
            trunc_used: t0,
            stabilized: search.stabilized,
        });
    }
    match search.solution {
        Some(sol) => Ok(IsoReport {
            decision: IsoDecision::Isomorphic,
            reason: "generator change found and verified".into(),
            witness: Some(sol),
            obstruction: None,
            trunc_used: t0,
            stabilized: search.stabilized,
        }),
        None => Ok(IsoReport {
            decision: IsoDecision::Unknown,
            reason: "generator-change search blocked; class is outside the decided cases".into(),
            witness: None,
            obstruction: search.obstruction,
            trunc_used: t0,
            stabilized: search.stabilized,
        }),
    }
}

/// The rank-two subquotient `F_{j+1}/F_{j−1}`.
fn subquotient_pair(pres: &ThemePresentation, j: usize) -> ThemePresentation {
    pres.submodule(j + 1).quotient(j - 1)
}

/// Ext dimensions by truncated linear algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtReport {
    pub ext0: usize,
    pub ext1: usize,
    pub trunc_used: usize,
    pub stabilized: bool,
}

fn ext_once(e: &ThemePresentation, f: &ThemePresentation, trunc: usize) -> Result<(usize, usize)> {
    let e = e.with_trunc(trunc);
    let f = f.with_trunc(trunc);
    let ke = e.rank();
    let kf = f.rank();
    let factors = e.word().factors().to_vec();
    // degree window: monomial inputs b^n·e_j and outputs truncated at n_out;
    // the word raises valuation by at least ke
    let n_out = trunc.saturating_sub(ke + 2);
    let mut columns: Vec<Vec<Rat>> = Vec::new();
    let mut inputs: Vec<(usize, usize)> = Vec::new();
    for j in 0..kf {
        for n in 0..=n_out {
            let mut coords = vec![BSeries::zero(trunc); kf];
            coords[j] = BSeries::monomial(Scalar::one(), n, trunc);
            let img = f.apply_word_coords(&factors, &coords)?;
            let mut col = Vec::with_capacity(kf * (n_out + 1));
            for c in &img {
                for d in 0..=n_out {
                    let v = c.coeff(d);
                    col.push(
                        v.as_rat()
                            .ok_or_else(|| Error::InvalidInput("ext needs rational data".into()))?
                            .clone(),
                    );
                }
            }
            columns.push(col);
            inputs.push((j, n));
        }
    }
    let rank = qrank(&columns);
    let ext1 = kf * (n_out + 1) - rank;
    // kernel: restrict inputs so that a would-be kernel vector must have
    // its image vanish over a margin of ke extra orders
    let keep: Vec<usize> = inputs
        .iter()
        .enumerate()
        .filter(|(_, (_, n))| *n + ke <= n_out)
        .map(|(i, _)| i)
        .collect();
    let restricted: Vec<Vec<Rat>> = keep.iter().map(|&i| columns[i].clone()).collect();
    let ext0 = restricted.len() - qrank(&restricted);
    Ok((ext0, ext1))
}

/// Column rank of a rational matrix.
fn qrank(columns: &[Vec<Rat>]) -> usize {
    let mut cols: Vec<Vec<Rat>> = columns.to_vec();
    let rows = cols.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    let mut done = 0;
    for row in 0..rows {
        if done == cols.len() {
            break;
        }
        let pivot = (done..cols.len()).find(|&c| !cols[c][row].is_zero());
        let Some(pc) = pivot else { continue };
        cols.swap(done, pc);
        let lead = cols[done][row].clone();
        let (head, tail) = cols.split_at_mut(done + 1);
        let pivot_col = &head[done];
        for col in tail.iter_mut() {
            if col[row].is_zero() {
                continue;
            }
            let fac = &col[row] / &lead;
            for r in row..rows {
                let sub = &fac * &pivot_col[r];
                col[r] -= sub;
            }
        }
        rank += 1;
        done += 1;
    }
    rank
}

/// `dim Ext⁰` and `dim Ext¹` of a pair of themes, as kernel and cokernel of
/// the first word acting on the second theme, with a stabilization re-run
/// 16 orders higher.
pub fn ext_dimensions(e: &ThemePresentation, f: &ThemePresentation) -> Result<ExtReport> {
    let t0 = e
        .invariants()
        .default_trunc()
        .max(f.invariants().default_trunc());
    let (a0, a1) = ext_once(e, f, t0)?;
    let (b0, b1) = ext_once(e, f, t0 + 16)?;
    Ok(ExtReport {
        ext0: a0,
        ext1: a1,
        trunc_used: t0,
        stabilized: (a0, a1) == (b0, b1),
    })
}

/// Three-valued answer for the uniqueness property of canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum UValue {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct UReport {
    pub value: UValue,
    pub reason: String,
}

/// Decide whether the canonical form of the theme is unique.
///
/// Rules: rank at most 2 and invariant themes always are; a non-invariant
/// theme with `p_{k−1} != 0` never is; with `p_{k−1} = 0` the question
/// descends to `E/F_1` — uniqueness there with a scalar endomorphism
/// algebra lifts, failure there is inherited, anything else is undecided.
pub fn property_u(pres: &ThemePresentation) -> Result<UReport> {
    let k = pres.rank();
    if k <= 2 {
        return Ok(UReport {
            value: UValue::True,
            reason: "rank at most 2".into(),
        });
    }
    if is_invariant(pres)?.invariant {
        return Ok(UReport {
            value: UValue::True,
            reason: "invariant theme: canonical form is unique".into(),
        });
    }
    let ps = pres.ps();
    if ps[k - 2] != 0 {
        return Ok(UReport {
            value: UValue::False,
            reason: format!("not invariant and p_{} = {} is nonzero", k - 1, ps[k - 2]),
        });
    }
    let q = pres.quotient(1);
    let uq = property_u(&q)?;
    match uq.value {
        UValue::False => Ok(UReport {
            value: UValue::False,
            reason: "a quotient already fails uniqueness".into(),
        }),
        UValue::True => {
            if end_dimension(&q)?.dimension == 1 {
                Ok(UReport {
                    value: UValue::True,
                    reason: "quotient has unique canonical form and scalar endomorphisms".into(),
                })
            } else {
                Ok(UReport {
                    value: UValue::Unknown,
                    reason: "outside the decided cases".into(),
                })
            }
        }
        UValue::Unknown => Ok(UReport {
            value: UValue::Unknown,
            reason: "quotient undecided".into(),
        }),
    }
}
