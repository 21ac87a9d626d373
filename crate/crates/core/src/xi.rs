//! The modules `Ξ_λ^{(N)}` of formal multivalued expansions.
//!
//! `Ξ_λ` is the free module `⊕_j C[[b]]·e_{λ,j}` where `e_{λ,j}` stands for
//! `s^{λ−1}(Log s)^j / j!`. The normalization by `1/j!` makes the action of
//! `a` exactly
//!
//!   a·e_{λ,0} = λ·b·e_{λ,0},     a·e_{λ,j} = λ·b·e_{λ,j} + b·e_{λ,j−1},
//!
//! combined with `a·S(b) = S(b)·a + b²·S'(b)` on coefficients.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rat_int, Rat, Scalar};
use crate::series::{solve_euler, BSeries};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::fmt;

/// Element of `Ξ_λ`: `Σ_j comps[j]·e_{λ,j}` with `0 < λ <= 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct XiElement {
    lambda: Rat,
    comps: Vec<BSeries>,
}

impl XiElement {
    pub fn new(lambda: Rat, comps: Vec<BSeries>) -> Self {
        assert!(
            lambda.is_positive() && lambda <= Rat::one(),
            "lambda must lie in (0,1]"
        );
        assert!(!comps.is_empty(), "at least the log-degree-0 component");
        XiElement { lambda, comps }
    }

    /// The basis element `b^m·e_{λ,j}`.
    pub fn basis(lambda: Rat, j: usize, m: usize, trunc: usize) -> Self {
        let mut comps = vec![BSeries::zero(trunc); j + 1];
        comps[j] = BSeries::monomial(Scalar::one(), m, trunc);
        XiElement::new(lambda, comps)
    }

    pub fn zero(lambda: Rat, trunc: usize) -> Self {
        XiElement::new(lambda, vec![BSeries::zero(trunc)])
    }

    pub fn lambda(&self) -> &Rat {
        &self.lambda
    }

    pub fn comps(&self) -> &[BSeries] {
        &self.comps
    }

    pub fn comp(&self, j: usize) -> BSeries {
        self.comps
            .get(j)
            .cloned()
            .unwrap_or_else(|| BSeries::zero(self.min_trunc()))
    }

    pub fn min_trunc(&self) -> usize {
        self.comps.iter().map(BSeries::trunc).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(BSeries::is_zero)
    }

    /// Largest `j` with a nonzero coefficient through trunc; `None` for the
    /// zero element.
    pub fn log_degree(&self) -> Option<usize> {
        self.comps.iter().rposition(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &XiElement) -> XiElement {
        assert_eq!(self.lambda, rhs.lambda, "mixed lambda classes");
        let n = self.comps.len().max(rhs.comps.len());
        let comps = (0..n).map(|j| &self.comp(j) + &rhs.comp(j)).collect();
        XiElement::new(self.lambda.clone(), comps)
    }

    pub fn sub(&self, rhs: &XiElement) -> XiElement {
        assert_eq!(self.lambda, rhs.lambda, "mixed lambda classes");
        let n = self.comps.len().max(rhs.comps.len());
        let comps = (0..n).map(|j| &self.comp(j) - &rhs.comp(j)).collect();
        XiElement::new(self.lambda.clone(), comps)
    }

    pub fn scale_series(&self, s: &BSeries) -> XiElement {
        XiElement::new(self.lambda.clone(), self.comps.iter().map(|c| c * s).collect())
    }

    pub fn scale(&self, c: &Scalar) -> XiElement {
        XiElement::new(self.lambda.clone(), self.comps.iter().map(|x| x.scale(c)).collect())
    }

    /// The action of `a`. Component `j` of the result is
    /// `λ·b·c_j + b²·c_j' + b·c_{j+1}`; all three pieces are meaningful one
    /// order past the input truncation, so no precision is lost.
    pub fn apply_a(&self) -> XiElement {
        let lam = Scalar::Rat(self.lambda.clone());
        let comps = (0..self.comps.len())
            .map(|j| {
                let c = self.comp(j);
                let mut out = &c.shift_up(1).scale(&lam) + &c.b2_derivative();
                if j + 1 < self.comps.len() {
                    out = &out + &self.comps[j + 1].shift_up(1);
                }
                out
            })
            .collect();
        XiElement::new(self.lambda.clone(), comps)
    }

    /// `(a − ν·b)·self`.
    pub fn apply_a_minus(&self, nu: &Rat) -> XiElement {
        let shifted = XiElement::new(
            self.lambda.clone(),
            self.comps
                .iter()
                .map(|c| c.shift_up(1).scale(&Scalar::Rat(nu.clone())))
                .collect(),
        );
        self.apply_a().sub(&shifted)
    }

    /// Truncate all components to a common order.
    pub fn truncated(&self, trunc: usize) -> XiElement {
        XiElement::new(
            self.lambda.clone(),
            self.comps.iter().map(|c| c.truncated(trunc)).collect(),
        )
    }

    /// Minimal `b`-adic valuation across components; `None` when zero.
    pub fn valuation(&self) -> Option<usize> {
        self.comps.iter().filter_map(BSeries::valuation).min()
    }

    /// The unipotent monodromy defect. With `t` standing for the formal
    /// constant of one monodromy turn, component `i` of the result is
    /// `Σ_{j>i} t^{j−i}/(j−i)! · c_j`; the log degree strictly drops.
    pub fn monodromy_defect(&self) -> XiElement {
        let n = self.comps.len();
        let comps = (0..n)
            .map(|i| {
                let mut acc = BSeries::zero(self.comp(i).trunc());
                let mut fact = Rat::one();
                for j in (i + 1)..n {
                    fact *= rat_int((j - i) as i64);
                    let coef = Scalar::t_pow_over(j - i, fact.clone());
                    acc = &acc + &self.comps[j].scale(&coef);
                }
                acc
            })
            .collect();
        XiElement::new(self.lambda.clone(), comps)
    }
}

impl fmt::Debug for XiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Xi[λ={}](", crate::scalar::rat_string(&self.lambda))?;
        for (j, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write!(f, " ({})·e{} ", c, j)?;
        }
        write!(f, ")")
    }
}

/// Element of `Ξ = ⊕_λ Ξ_λ`: finitely many nonzero λ-components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiSum {
    parts: BTreeMap<Rat, XiElement>,
}

impl XiSum {
    pub fn new() -> Self {
        XiSum {
            parts: BTreeMap::new(),
        }
    }

    pub fn from_parts(parts: Vec<XiElement>) -> Self {
        let mut sum = XiSum::new();
        for p in parts {
            sum.add_part(p);
        }
        sum
    }

    pub fn add_part(&mut self, p: XiElement) {
        if p.is_zero() {
            return;
        }
        let lam = p.lambda().clone();
        match self.parts.remove(&lam) {
            Some(prev) => {
                let s = prev.add(&p);
                if !s.is_zero() {
                    self.parts.insert(lam, s);
                }
            }
            None => {
                self.parts.insert(lam, p);
            }
        }
    }

    pub fn parts(&self) -> &BTreeMap<Rat, XiElement> {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn apply_a(&self) -> XiSum {
        XiSum {
            parts: self
                .parts
                .iter()
                .map(|(l, p)| (l.clone(), p.apply_a()))
                .collect(),
        }
    }

    /// Rank of the module generated by this element over all λ-components,
    /// read from the stacked coefficient matrix of the iterates.
    pub fn generated_rank(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let bound: usize = self
            .parts
            .values()
            .map(|p| p.log_degree().map(|d| d + 1).unwrap_or(0))
            .sum();
        let mut cols = Vec::new();
        let mut cur = self.clone();
        for _ in 0..bound {
            let mut col = Vec::new();
            for (lam, tmpl) in &self.parts {
                let part = cur.parts.get(lam);
                for j in 0..tmpl.comps().len() {
                    col.push(part.map(|p| p.comp(j)).unwrap_or_else(|| {
                        BSeries::zero(tmpl.min_trunc())
                    }));
                }
            }
            cols.push(col);
            cur = cur.apply_a();
        }
        linalg::column_rank(&cols)
    }
}

impl Default for XiSum {
    fn default() -> Self {
        Self::new()
    }
}

/// The submodule generated by one element, with its free basis
/// `φ, a·φ, …, a^{k−1}·φ` and the minimal relation expressing `a^k·φ`.
#[derive(Clone, Debug)]
pub struct GeneratedModule {
    pub generator: XiElement,
    pub rank: usize,
    pub basis: Vec<XiElement>,
    /// `a^k·φ = Σ_j relation[j]·a^j·φ`.
    pub relation: Vec<BSeries>,
    /// Valuation of the basis determinant and its leading unit's constant
    /// term: the freeness certificate.
    pub det_valuation: usize,
    pub det_unit_constant: Scalar,
}

impl GeneratedModule {
    /// Coefficient matrix of the basis: rows are log components, columns the
    /// iterates.
    #[allow(dead_code)]
    fn basis_matrix(&self) -> Vec<Vec<BSeries>> {
        (0..self.rank)
            .map(|j| (0..self.rank).map(|i| self.basis[i].comp(j)).collect())
            .collect()
    }

    /// The Bernstein element of the module, read from the initial parts of
    /// the relation: `a^k − Σ_j σ_j·b^{k−j}·a^j` with `σ_j` the coefficient
    /// of `b^{k−j}` in the relation series.
    pub fn bernstein_sigma(&self) -> Vec<Scalar> {
        let k = self.rank;
        (0..k).map(|j| self.relation[j].coeff(k - j)).collect()
    }
}

/// Generate `Ã·φ` for a single-λ element: rank `log_degree + 1`, basis the
/// `a`-iterates, relation solved by Cramer over `C[[b]]`.
pub fn generate_module(phi: &XiElement) -> Result<GeneratedModule> {
    let d = phi
        .log_degree()
        .ok_or_else(|| Error::InvalidInput("cannot generate a module from zero".into()))?;
    let k = d + 1;
    let mut basis = vec![phi.clone()];
    for _ in 1..k {
        basis.push(basis.last().unwrap().apply_a());
    }
    let top = basis.last().unwrap().apply_a();
    let mat: Vec<Vec<BSeries>> = (0..k)
        .map(|j| (0..k).map(|i| basis[i].comp(j)).collect())
        .collect();
    let rhs: Vec<BSeries> = (0..k).map(|j| top.comp(j)).collect();
    let (det_val, unit) = linalg::det_certificate(&mat)?;
    let relation = linalg::cramer_solve(&mat, &rhs)?;
    Ok(GeneratedModule {
        generator: phi.clone(),
        rank: k,
        basis,
        relation,
        det_valuation: det_val,
        det_unit_constant: unit.constant_term(),
    })
}

/// Basis of the normal rank-`j` submodule `F_j = Ã·φ ∩ Ξ_λ^{(j−1)}`,
/// obtained by eliminating the top log component level by level.
/// Also certifies `F_j ⊆ b^{k−j}·Ξ^{(j−1)}`.
pub fn filtration_member(module: &GeneratedModule, j: usize) -> Result<(Vec<XiElement>, bool)> {
    let k = module.rank;
    if j == 0 {
        return Ok((Vec::new(), true));
    }
    if j > k {
        return Err(Error::InvalidInput(format!(
            "filtration index {j} exceeds rank {k}"
        )));
    }
    let mut level: Vec<XiElement> = module.basis.clone();
    for ell in (j + 1..=k).rev() {
        // eliminate log component ell−1 from the current basis of F_ell
        let tops: Vec<BSeries> = level.iter().map(|x| x.comp(ell - 1)).collect();
        let pivot = tops
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| (i, v)))
            .min_by_key(|&(_, v)| v)
            .ok_or_else(|| {
                Error::PrecisionExhausted(format!(
                    "no visible top coefficient at log level {}",
                    ell - 1
                ))
            })?;
        let (pi, pv) = pivot;
        let punit_inv = tops[pi].shift_down(pv)?.inverse()?;
        let eliminator = level[pi].clone();
        let mut next = Vec::with_capacity(ell - 1);
        for (i, x) in level.into_iter().enumerate() {
            if i == pi {
                continue;
            }
            let q = &tops[i].shift_down(pv)? * &punit_inv;
            next.push(x.sub(&eliminator.scale_series(&q)));
        }
        level = next;
    }
    let depth_ok = level
        .iter()
        .all(|x| x.valuation().map(|v| v >= k - j).unwrap_or(true));
    Ok((level, depth_ok))
}

/// Split a multi-λ element into its λ-components and generate each part.
pub fn component_split(phi: &XiSum) -> Result<BTreeMap<Rat, GeneratedModule>> {
    if phi.is_zero() {
        return Err(Error::InvalidInput("cannot split the zero element".into()));
    }
    phi.parts()
        .iter()
        .map(|(lam, part)| Ok((lam.clone(), generate_module(part)?)))
        .collect()
}

/// Solution of `(a − (λ+q)·b)·ψ = θ` for `θ ∈ b·Ξ_λ^{(j)}`.
///
/// The image of `Ξ_λ^{(j)}` misses exactly the coefficient of
/// `b^{q+1}·e_{λ,j}`; a nonzero coefficient `ρ` there is absorbed by the
/// component `ρ·b^q·e_{λ,j+1}` of the solution. Solving proceeds from the
/// top log component down; the resonant coefficient of each component is
/// forced by the solvability of the next one, and the one genuinely free
/// slot (the kernel `C·b^q·e_{λ,0}`) is normalized to zero.
pub fn solve_shift(q: usize, theta: &XiElement) -> Result<XiElement> {
    for (jj, c) in theta.comps().iter().enumerate() {
        if let Some(v) = c.valuation() {
            if v == 0 {
                return Err(Error::NotInImage(format!(
                    "component {jj} has a constant term; target must lie in b·Ξ"
                )));
            }
        }
    }
    let j = match theta.log_degree() {
        Some(d) => d,
        None => return Ok(XiElement::zero(theta.lambda().clone(), theta.min_trunc())),
    };
    let top_absorb = theta.comp(j).coeff(q + 1);
    let mut comps_rev: Vec<BSeries> = Vec::new(); // ψ_j down to ψ_0
    // forced resonant coefficients: [b^q]ψ_h = [b^{q+1}]θ_{h−1} for h >= 1
    let mut psi_above: Option<BSeries> = None;
    for h in (0..=j).rev() {
        let mut rhs = theta.comp(h);
        if h == j && !top_absorb.is_zero() {
            rhs = &rhs - &BSeries::monomial(top_absorb.clone(), q + 1, rhs.trunc());
        }
        if let Some(up) = &psi_above {
            rhs = &rhs - &up.shift_up(1);
        }
        // b²ψ' − q·b·ψ = rhs  ⇔  b·ψ' − q·ψ = rhs/b
        let reduced = rhs.shift_down(1)?;
        let sol = solve_euler(q as i64, &reduced)?;
        let mut psi_h = sol.series;
        if h >= 1 {
            let forced = theta.comp(h - 1).coeff(q + 1);
            if !forced.is_zero() {
                psi_h = &psi_h + &BSeries::monomial(forced, q, psi_h.trunc());
            }
        }
        psi_above = Some(psi_h.clone());
        comps_rev.push(psi_h);
    }
    let mut comps: Vec<BSeries> = comps_rev.into_iter().rev().collect();
    if !top_absorb.is_zero() {
        let t = comps.iter().map(BSeries::trunc).min().unwrap_or(0);
        comps.push(BSeries::monomial(top_absorb, q, t));
    }
    Ok(XiElement::new(theta.lambda().clone(), comps))
}
