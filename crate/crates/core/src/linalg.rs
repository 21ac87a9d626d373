//! Linear algebra over truncated power series.
//!
//! Reduction over `C[[b]]` works by valuation pivoting: the pivot is an
//! entry of minimal `b`-adic valuation, so every other entry in its row is
//! divisible by it and elimination stays inside the ring. Division by `b^v`
//! costs `v` orders of precision, which the per-series truncation tracking
//! makes visible instead of silent.

use crate::error::{Error, Result};
use crate::series::BSeries;

/// Determinant of a square matrix of series, by expansion along the first
/// remaining row with memoization over column subsets.
pub fn det(mat: &[Vec<BSeries>]) -> BSeries {
    let n = mat.len();
    assert!(n > 0 && mat.iter().all(|r| r.len() == n), "square matrix");
    let trunc = mat
        .iter()
        .flat_map(|r| r.iter().map(BSeries::trunc))
        .min()
        .unwrap();
    let mut memo: std::collections::HashMap<u32, BSeries> = std::collections::HashMap::new();
    let full: u32 = (1 << n) - 1;
    det_rec(mat, full, 0, trunc, &mut memo)
}

fn det_rec(
    mat: &[Vec<BSeries>],
    cols: u32,
    row: usize,
    trunc: usize,
    memo: &mut std::collections::HashMap<u32, BSeries>,
) -> BSeries {
    if cols == 0 {
        return BSeries::one(trunc);
    }
    if let Some(d) = memo.get(&cols) {
        return d.clone();
    }
    let mut acc = BSeries::zero(trunc);
    let mut sign = false;
    for c in 0..mat.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = &mat[row][c];
        if !entry.is_zero() {
            let sub = det_rec(mat, cols & !(1 << c), row + 1, trunc, memo);
            let term = &(entry * &sub);
            acc = if sign { &acc - term } else { &acc + term };
        }
        sign = !sign;
    }
    let acc = acc.truncated(trunc);
    memo.insert(cols, acc.clone());
    acc
}

/// Solve `M·x = y` over `C[[b]]` by Cramer's rule. The determinant must be
/// nonzero through the truncation order; each quotient must be an honest
/// power series (valuation of the numerator at least that of the
/// determinant), otherwise the system has no solution in the ring.
pub fn cramer_solve(mat: &[Vec<BSeries>], rhs: &[BSeries]) -> Result<Vec<BSeries>> {
    let n = mat.len();
    let d = det(mat);
    let v = d.valuation().ok_or_else(|| {
        Error::PrecisionExhausted("singular series matrix (determinant zero through trunc)".into())
    })?;
    let unit_inv = d.shift_down(v)?.inverse()?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = mat.to_vec();
        for (r, row) in m.iter_mut().enumerate() {
            row[i] = rhs[r].clone();
        }
        let di = det(&m);
        let xi = &di.shift_down(v)? * &unit_inv;
        out.push(xi);
    }
    Ok(out)
}

/// Valuation and leading unit certificate of a determinant: the claim
/// "these columns are a free basis" is backed by `det = b^v · unit`.
pub fn det_certificate(mat: &[Vec<BSeries>]) -> Result<(usize, BSeries)> {
    let d = det(mat);
    let v = d
        .valuation()
        .ok_or_else(|| Error::PrecisionExhausted("determinant vanishes through trunc".into()))?;
    Ok((v, d.shift_down(v)?))
}

/// Column vectors over `C[[b]]`, reduced by valuation pivoting.
/// Returns the rank visible through the truncation orders.
pub fn column_rank(columns: &[Vec<BSeries>]) -> usize {
    let mut cols: Vec<Vec<BSeries>> = columns.to_vec();
    let rows = match cols.first() {
        Some(c) => c.len(),
        None => return 0,
    };
    let mut used_rows = vec![false; rows];
    let mut rank = 0;
    loop {
        // pivot: entry of minimal valuation among unused rows
        let mut best: Option<(usize, usize, usize)> = None;
        for (ci, col) in cols.iter().enumerate() {
            for (ri, e) in col.iter().enumerate() {
                if used_rows[ri] {
                    continue;
                }
                if let Some(v) = e.valuation() {
                    if best.map(|(_, _, bv)| v < bv).unwrap_or(true) {
                        best = Some((ci, ri, v));
                    }
                }
            }
        }
        let Some((pc, pr, pv)) = best else {
            return rank;
        };
        rank += 1;
        used_rows[pr] = true;
        let pivot_col = cols.swap_remove(pc);
        let pivot_unit_inv = match pivot_col[pr].shift_down(pv).and_then(|u| u.inverse()) {
            Ok(u) => u,
            Err(_) => return rank, // precision gone; report what is certain
        };
        for col in cols.iter_mut() {
            if col[pr].is_zero() {
                continue;
            }
            let q = match col[pr].shift_down(pv) {
                Ok(q) => &q * &pivot_unit_inv,
                Err(_) => return rank,
            };
            for (ri, e) in col.iter_mut().enumerate() {
                *e = &*e - &(&q * &pivot_col[ri]);
            }
        }
        if cols.is_empty() {
            return rank;
        }
    }
}

/// Express each `target` vector in the `C[[b]]`-span of `columns`, if
/// possible. Returns the coefficients in column order.
///
/// Forward elimination keeps, for every pivot, the reduced column together
/// with its expression in the original columns; pivot columns vanish at all
/// earlier pivot rows, so targets reduce by a straight triangular pass.
pub fn solve_in_span(
    columns: &[Vec<BSeries>],
    target: &[Vec<BSeries>],
) -> Option<Vec<Vec<BSeries>>> {
    let n = columns.len();
    let rows = columns.first()?.len();
    let combo_trunc = columns
        .iter()
        .flat_map(|c| c.iter().map(BSeries::trunc))
        .min()?;
    // working columns with combination bookkeeping over the originals
    let mut work: Vec<(Vec<BSeries>, Vec<BSeries>)> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut combo = vec![BSeries::zero(combo_trunc); n];
            combo[i] = BSeries::one(combo_trunc);
            (c.clone(), combo)
        })
        .collect();
    let mut pivots: Vec<(usize, usize, Vec<BSeries>, Vec<BSeries>)> = Vec::new();
    let mut used_rows = vec![false; rows];
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (ci, (col, _)) in work.iter().enumerate() {
            for (ri, e) in col.iter().enumerate() {
                if used_rows[ri] {
                    continue;
                }
                if let Some(v) = e.valuation() {
                    if best.map(|(_, _, bv)| v < bv).unwrap_or(true) {
                        best = Some((ci, ri, v));
                    }
                }
            }
        }
        let Some((pc, pr, pv)) = best else { break };
        used_rows[pr] = true;
        let (pcol, pcombo) = work.swap_remove(pc);
        let unit_inv = pcol[pr].shift_down(pv).ok()?.inverse().ok()?;
        for (col, combo) in work.iter_mut() {
            if col[pr].is_zero() {
                continue;
            }
            let q = &col[pr].shift_down(pv).ok()? * &unit_inv;
            for (ri, e) in col.iter_mut().enumerate() {
                *e = &*e - &(&q * &pcol[ri]);
            }
            for (i, e) in combo.iter_mut().enumerate() {
                *e = &*e - &(&q * &pcombo[i]);
            }
        }
        pivots.push((pr, pv, pcol, pcombo));
    }
    let mut out = Vec::with_capacity(target.len());
    for t0 in target {
        let mut residual = t0.clone();
        let mut coeffs = vec![BSeries::zero(combo_trunc); n];
        for (pr, pv, pcol, pcombo) in &pivots {
            if residual[*pr].is_zero() {
                continue;
            }
            let unit_inv = pcol[*pr].shift_down(*pv).ok()?.inverse().ok()?;
            let q = &residual[*pr].shift_down(*pv).ok()? * &unit_inv;
            for (ri, e) in residual.iter_mut().enumerate() {
                *e = &*e - &(&q * &pcol[ri]);
            }
            for (i, e) in coeffs.iter_mut().enumerate() {
                *e = &*e + &(&q * &pcombo[i]);
            }
        }
        if residual.iter().any(|e| !e.is_zero()) {
            return None;
        }
        out.push(coeffs);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn s(coeffs: &[i64], trunc: usize) -> BSeries {
        BSeries::from_rats(&coeffs.iter().map(|&n| rat_int(n)).collect::<Vec<_>>(), trunc)
    }

    #[test]
    fn det_two_by_two() {
        let m = vec![
            vec![s(&[1], 6), s(&[0, 1], 6)],
            vec![s(&[0, 2], 6), s(&[1, 1], 6)],
        ];
        // (1)(1+b) − (b)(2b) = 1 + b − 2b²
        assert_eq!(det(&m), s(&[1, 1, -2], 6));
    }

    #[test]
    fn cramer_round_trip() {
        let m = vec![
            vec![s(&[1, 1], 8), s(&[0, 1], 8)],
            vec![s(&[0, 0, 3], 8), s(&[2], 8)],
        ];
        let x = vec![s(&[1, 2], 8), s(&[0, 5], 8)];
        let rhs: Vec<BSeries> = (0..2)
            .map(|r| &(&m[r][0] * &x[0]) + &(&m[r][1] * &x[1]))
            .collect();
        let sol = cramer_solve(&m, &rhs).unwrap();
        for i in 0..2 {
            assert!(sol[i].eq_through_min_trunc(&x[i]));
        }
    }

    #[test]
    fn rank_detects_dependence() {
        let c1 = vec![s(&[1], 6), s(&[0, 1], 6)];
        let c2 = vec![s(&[0, 2], 6), s(&[0, 0, 2], 6)]; // 2b · c1
        let c3 = vec![s(&[0, 0, 1], 6), s(&[1], 6)];
        assert_eq!(column_rank(&[c1.clone(), c2.clone()]), 1);
        assert_eq!(column_rank(&[c1, c2, c3]), 2);
    }

    #[test]
    fn span_membership() {
        let c1 = vec![s(&[1], 8), s(&[0, 1], 8)];
        let c2 = vec![s(&[0, 1], 8), s(&[1], 8)];
        // target = (1+b)c1 + b²c2
        let t = vec![
            &(&s(&[1, 1], 8) * &c1[0]) + &(&s(&[0, 0, 1], 8) * &c2[0]),
            &(&s(&[1, 1], 8) * &c1[1]) + &(&s(&[0, 0, 1], 8) * &c2[1]),
        ];
        let sol = solve_in_span(&[c1, c2], &[t]).unwrap();
        assert!(sol[0][0].eq_through_min_trunc(&s(&[1, 1], 8)));
        assert!(sol[0][1].eq_through_min_trunc(&s(&[0, 0, 1], 8)));
        // and something outside the span
        let bad = vec![s(&[1], 8), s(&[1], 8)];
        let c1 = vec![s(&[0, 1], 8), BSeries::zero(8)];
        assert!(solve_in_span(&[c1], &[bad]).is_none());
    }
}
