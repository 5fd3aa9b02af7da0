//! Local membership along a curve, decided exactly.
//!
//! After pulling back along a curve, "is this vector in the module" becomes
//! a question over the local ring of t-polynomials with parameter-fraction
//! coefficients. Every nonzero element there factors as `t^ord * unit`, so
//! finitely generated submodules diagonalize by unimodular row/column
//! operations with minimal-order pivots (Smith reduction over a valuation
//! ring); against a diagonal matrix, membership is a per-row comparison of
//! vanishing orders. The reduction is fully symbolic: parameters are never
//! specialized, and every coefficient assumed nonzero along the way is
//! recorded as a genericity condition.
//!
//! The Smith form decides; a separate greedy order-by-order elimination
//! produces the human-readable residual (which combination was tried and
//! which row obstructs), matching how one would do the computation by hand.

use crate::error::Result;
use crate::mat::Mat;
use crate::poly::Polynomial;
use crate::ratfun::RatFun;
use crate::scalar::{FieldScalar, RingScalar};
use crate::tpoly::{CurvePoly, TPoly};

/// Outcome of a curve-local membership test.
#[derive(Debug, Clone)]
pub struct CurveMembershipReport {
    pub member: bool,
    /// diagonal entries sorted by vanishing order, as many as the matrix
    /// rank; made monic (`t^ord * (1 + ...)`) when the test fails, since
    /// only failure reports are ever displayed
    pub diag: Vec<CurvePoly>,
    /// the transformed right-hand side, aligned with `diag` (entries past
    /// the rank must vanish for membership)
    pub transformed: Vec<CurvePoly>,
    /// first row (0-based, in the sorted diagonal order) violating the
    /// order comparison, if any
    pub failing_row: Option<usize>,
    /// how many orders of vanishing the failing row is short
    pub deficit: Option<usize>,
    /// parameter expressions assumed nonzero during the reduction
    pub genericity: Vec<Polynomial>,
}

fn record_genericity(conds: &mut Vec<Polynomial>, f: &RatFun) {
    for part in [f.numer(), f.denom()] {
        if !part.is_constant() {
            let norm = part.normalized_assoc();
            if !conds.contains(&norm) {
                conds.push(norm);
            }
        }
    }
}

/// Diagonalization of `a` over the local ring at `t = 0`, tracking only
/// the row transform (that is all membership needs): returns
/// `(diag, u, cap)` with `u a v = diag` modulo degrees above `cap` for some
/// unimodular `v`, plus the genericity conditions incurred.
///
/// Every nonzero element of the local ring factors as `t^ord * unit`, so
/// the minimal-order entry of the remaining block divides all of it, and a
/// fraction-free cross-multiplication by the pivot unit clears its row and
/// column with no remainder cascades and no denominators. (Euclidean
/// reduction by leading terms is correct here too, but its remainder
/// sequences suffer exponential coefficient growth.) Arithmetic is
/// truncated above `cap`; any failure the caller reports compares orders
/// strictly below the cap and is therefore sound at every resolution.
fn smith_rows(
    a: &Mat<CurvePoly>,
    cap: usize,
    conds: &mut Vec<Polynomial>,
) -> (Vec<CurvePoly>, Mat<CurvePoly>) {
    let rows = a.rows();
    let cols = a.cols();
    let proto = if rows * cols > 0 {
        a.at(0, 0).proto().clone()
    } else {
        unreachable!("empty matrix in smith_rows")
    };
    let zero = TPoly::zero(proto.clone());
    let one = TPoly::constant(proto.one_like());
    // everything is computed modulo degrees above the cap, so drop higher
    // terms of the input right away
    let mut m = a.map(|e| e.truncate(cap));
    let mut u = Mat::filled(rows, rows, zero.clone());
    for i in 0..rows {
        u.set(i, i, one.clone());
    }

    let mut corner = 0usize;
    while corner < rows && corner < cols {
        // pivot: minimal vanishing order in the remaining block
        let mut pivot: Option<(usize, usize, usize)> = None;
        for i in corner..rows {
            for j in corner..cols {
                if let Some(o) = m.at(i, j).ord() {
                    if pivot.map_or(true, |(_, _, po)| o < po) {
                        pivot = Some((i, j, o));
                    }
                }
            }
        }
        let Some((pi, pj, po)) = pivot else {
            break; // remaining block is zero
        };
        if po > cap {
            break; // below the resolution of the reduction
        }
        // move the pivot to the corner
        if pi != corner {
            for j in 0..cols {
                let x = m.at(corner, j).clone();
                let y = m.at(pi, j).clone();
                m.set(corner, j, y);
                m.set(pi, j, x);
            }
            for j in 0..rows {
                let x = u.at(corner, j).clone();
                let y = u.at(pi, j).clone();
                u.set(corner, j, y);
                u.set(pi, j, x);
            }
        }
        if pj != corner {
            for i in 0..rows {
                let x = m.at(i, corner).clone();
                let y = m.at(i, pj).clone();
                m.set(i, corner, y);
                m.set(i, pj, x);
            }
        }
        let pivot_entry = m.at(corner, corner).clone();
        // the pivot leads with this coefficient precisely when it is nonzero
        record_genericity(conds, &pivot_entry.coeff(po));
        // pivot = t^po * punit with punit a unit at t = 0; every other entry
        // of the block has order >= po, so `e / t^po` is a plain shift
        let (_, punit) = pivot_entry.split_local();
        let shift_down = |e: &CurvePoly| TPoly::new(e.proto().clone(), e.coeffs()[po..].to_vec());
        // fraction-free clearing: `row_i <- punit * row_i - (e / t^po) * row_corner`
        // scales row_i by the unit punit (invertible over the local ring, so the
        // span is unchanged) and zeroes the column entry exactly, with no
        // division and hence no denominator growth in the coefficients
        for i in corner + 1..rows {
            if m.at(i, corner).is_zero() {
                continue;
            }
            let q = shift_down(m.at(i, corner));
            for j in 0..cols {
                let v = (&(&punit * m.at(i, j)) - &(&q * m.at(corner, j))).truncate(cap);
                m.set(i, j, v);
            }
            for j in 0..rows {
                let v = (&(&punit * u.at(i, j)) - &(&q * u.at(corner, j))).truncate(cap);
                u.set(i, j, v);
            }
        }
        // columns likewise: `col_j <- punit * col_j - (e / t^po) * col_corner`
        // (invertible column mixing, so the column span is unchanged)
        for j in corner + 1..cols {
            if m.at(corner, j).is_zero() {
                continue;
            }
            let q = shift_down(m.at(corner, j));
            for i in 0..rows {
                let v = (&(&punit * m.at(i, j)) - &(&q * m.at(i, corner))).truncate(cap);
                m.set(i, j, v);
            }
        }
        corner += 1;
    }

    // raw diagonal: unit multiples only matter for display, not for the
    // order comparison, and scaling `u` here would drag rational-function
    // denominators through everything downstream
    let diag: Vec<CurvePoly> = (0..corner).map(|i| m.at(i, i).clone()).collect();
    (diag, u)
}

/// Is `v` in the column span of `a` over the local ring at `t = 0`?
///
/// `cap` is the order resolution: all arithmetic is truncated above `t^cap`.
/// A reported failure only ever compares orders strictly below the cap, so it
/// is sound at any resolution; raising the cap can only turn a `member = true`
/// answer (which the caller must treat as "no obstruction found") into a
/// failure, never the other way around.
pub fn curve_membership(
    v: &[CurvePoly],
    a: &Mat<CurvePoly>,
    cap: usize,
) -> Result<CurveMembershipReport> {
    assert_eq!(v.len(), a.rows(), "vector/matrix height mismatch");
    let mut conds = Vec::new();
    let (diag, u) = smith_rows(a, cap, &mut conds);
    let s = diag.len();
    let rows = a.rows();

    // u v, the transformed right-hand side (truncated like the reduction:
    // anything above the cap is noise from the truncated transform)
    let vt: Vec<CurvePoly> = v.iter().map(|x| x.truncate(cap)).collect();
    let mut transformed: Vec<CurvePoly> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut acc = if let Some(first) = vt.first() {
            TPoly::zero(first.proto().clone())
        } else {
            unreachable!("empty vector")
        };
        for (j, vj) in vt.iter().enumerate() {
            acc = &acc + &(u.at(i, j) * vj);
        }
        transformed.push(acc.truncate(cap));
    }

    // sort the pivot rows by vanishing order of the diagonal for stable output
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by_key(|&i| (diag[i].ord_or_inf(), i));
    let diag: Vec<CurvePoly> = order.iter().map(|&i| diag[i].clone()).collect();
    let mut sorted_t: Vec<CurvePoly> = order.iter().map(|&i| transformed[i].clone()).collect();
    sorted_t.extend(transformed[s..].iter().cloned());
    let transformed = sorted_t;

    let mut failing_row = None;
    let mut deficit = None;
    for i in 0..rows {
        if i < s {
            let need = diag[i].ord_or_inf();
            let have = transformed[i].ord_or_inf();
            if have < need {
                // the failure stands exactly where this coefficient is nonzero
                record_genericity(&mut conds, &transformed[i].coeff(have));
                failing_row = Some(i);
                deficit = Some(need - have);
                break;
            }
        } else if !transformed[i].is_zero() {
            let o = transformed[i].ord_or_inf();
            record_genericity(&mut conds, &transformed[i].coeff(o));
            failing_row = Some(i);
            deficit = None; // no finite order can repair a rank failure
            break;
        }
    }
    let diag = if failing_row.is_some() {
        diag.iter()
            .map(|d| {
                let o = d.ord().expect("diagonal entries are nonzero");
                d.scale(&d.coeff(o).inv().expect("nonzero trailing coefficient"))
            })
            .collect()
    } else {
        diag
    };
    Ok(CurveMembershipReport {
        member: failing_row.is_none(),
        diag,
        transformed,
        failing_row,
        deficit,
        genericity: conds,
    })
}

/// Step record of the greedy display reduction: which multiples of which
/// columns were subtracted at one t-order.
#[derive(Debug, Clone)]
pub struct GreedyStep {
    pub order: usize,
    /// (column index, scalar coefficient, t-power shift)
    pub used: Vec<(usize, RatFun, usize)>,
}

/// Human-readable reduction transcript.
#[derive(Debug, Clone)]
pub struct GreedyReport {
    pub steps: Vec<GreedyStep>,
    pub residual: Vec<CurvePoly>,
    /// order at which the reduction got stuck (`None`: reduced to zero or
    /// hit the jet cap)
    pub stuck_order: Option<usize>,
    /// row of the first nonzero residual entry when stuck
    pub failing_row: Option<usize>,
    pub genericity: Vec<Polynomial>,
}

/// Order-by-order elimination for display. At each t-order, solves for the
/// constant multiples of columns that cancel the current lowest slice.
/// When the slice system is inconsistent, solves its restriction to the
/// pivot rows (the canonical "eliminate what you can" step) and stops,
/// leaving the residual supported on the obstructing rows.
pub fn greedy_reduce(v: &[CurvePoly], a: &Mat<CurvePoly>, jet_cap: usize) -> GreedyReport {
    let rows = a.rows();
    let cols = a.cols();
    assert_eq!(v.len(), rows);
    let proto = v
        .first()
        .map(|x| x.proto().clone())
        .expect("nonempty vector");
    let mut conds = Vec::new();
    let mut r: Vec<CurvePoly> = v.to_vec();
    let mut steps = Vec::new();

    let col_ords: Vec<Option<usize>> = (0..cols)
        .map(|j| (0..rows).filter_map(|i| a.at(i, j).ord()).min())
        .collect();

    loop {
        let Some(o) = r.iter().filter_map(|x| x.ord()).min() else {
            return GreedyReport {
                steps,
                residual: r,
                stuck_order: None,
                failing_row: None,
                genericity: conds,
            };
        };
        if o > jet_cap {
            return GreedyReport {
                steps,
                residual: r,
                stuck_order: None,
                failing_row: None,
                genericity: conds,
            };
        }
        // usable columns: those reaching order o, shifted by t^(o - ord)
        let usable: Vec<usize> = (0..cols)
            .filter(|&j| col_ords[j].map_or(false, |co| co <= o))
            .collect();
        let target: Vec<RatFun> = r.iter().map(|x| x.coeff(o)).collect();
        if usable.is_empty() {
            let failing = r
                .iter()
                .position(|x| x.ord() == Some(o))
                .expect("order attained");
            return GreedyReport {
                steps,
                residual: r,
                stuck_order: Some(o),
                failing_row: Some(failing),
                genericity: conds,
            };
        }
        // slice matrix: initial coefficient vectors of the usable columns
        let slice = Mat::from_rows(
            (0..rows)
                .map(|i| {
                    usable
                        .iter()
                        .map(|&j| a.at(i, j).coeff(col_ords[j].unwrap()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular");
        match solve_with_conds(&slice, &target, &mut conds) {
            Some(x) => {
                let shift: Vec<usize> = usable.iter().map(|&j| o - col_ords[j].unwrap()).collect();
                apply_combination(&mut r, a, &usable, &x, &shift, &proto);
                steps.push(GreedyStep {
                    order: o,
                    used: usable
                        .iter()
                        .zip(&x)
                        .zip(&shift)
                        .filter(|((_, c), _)| !RingScalar::is_zero(*c))
                        .map(|((&j, c), &s)| (j, c.clone(), s))
                        .collect(),
                });
            }
            None => {
                // partial elimination on the pivot rows, then stop
                let (_, prow, _) = slice.rank_profile();
                let sub = slice.submatrix(&prow, &(0..usable.len()).collect::<Vec<_>>());
                let sub_t: Vec<RatFun> = prow.iter().map(|&i| target[i].clone()).collect();
                if let Some(x) = solve_with_conds(&sub, &sub_t, &mut conds) {
                    let shift: Vec<usize> =
                        usable.iter().map(|&j| o - col_ords[j].unwrap()).collect();
                    apply_combination(&mut r, a, &usable, &x, &shift, &proto);
                    steps.push(GreedyStep {
                        order: o,
                        used: usable
                            .iter()
                            .zip(&x)
                            .zip(&shift)
                            .filter(|((_, c), _)| !RingScalar::is_zero(*c))
                            .map(|((&j, c), &s)| (j, c.clone(), s))
                            .collect(),
                    });
                }
                let failing = r.iter().position(|x| x.ord() == Some(o));
                return GreedyReport {
                    steps,
                    residual: r,
                    stuck_order: Some(o),
                    failing_row: failing,
                    genericity: conds,
                };
            }
        }
    }
}

fn apply_combination(
    r: &mut [CurvePoly],
    a: &Mat<CurvePoly>,
    usable: &[usize],
    x: &[RatFun],
    shift: &[usize],
    proto: &RatFun,
) {
    for (idx, &j) in usable.iter().enumerate() {
        if RingScalar::is_zero(&x[idx]) {
            continue;
        }
        let factor = TPoly::monomial(x[idx].clone(), shift[idx]);
        for (i, entry) in r.iter_mut().enumerate() {
            *entry = &*entry - &(&factor * a.at(i, j));
        }
    }
    let _ = proto;
}

/// Gaussian solve over the parameter-fraction field, recording which
/// parameter expressions were inverted.
fn solve_with_conds(
    a: &Mat<RatFun>,
    b: &[RatFun],
    conds: &mut Vec<Polynomial>,
) -> Option<Vec<RatFun>> {
    let rows = a.rows();
    let cols = a.cols();
    let proto = b
        .first()
        .map(|v| v.zero_like())
        .or_else(|| (rows * cols > 0).then(|| a.at(0, 0).zero_like()))?;
    let mut m = Mat::filled(rows, cols + 1, proto.clone());
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, a.at(i, j).clone());
        }
        m.set(i, cols, b[i].clone());
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for j in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m.at(i, j).is_zero()) else {
            continue;
        };
        for col in 0..=cols {
            let x = m.at(rank, col).clone();
            let y = m.at(p, col).clone();
            m.set(rank, col, y);
            m.set(p, col, x);
        }
        let piv = m.at(rank, j).clone();
        record_genericity(conds, &piv);
        let inv = piv.inv().expect("nonzero pivot");
        for col in j..=cols {
            let v = m.at(rank, col).clone() * inv.clone();
            m.set(rank, col, v);
        }
        for i in 0..rows {
            if i == rank || m.at(i, j).is_zero() {
                continue;
            }
            let f = m.at(i, j).clone();
            for col in j..=cols {
                let v = m.at(i, col).clone() - f.clone() * m.at(rank, col).clone();
                m.set(i, col, v);
            }
        }
        pivots.push(j);
        rank += 1;
    }
    for i in rank..rows {
        if !m.at(i, cols).is_zero() {
            return None;
        }
    }
    let mut x = vec![proto; cols];
    for (r0, &j) in pivots.iter().enumerate() {
        x[j] = m.at(r0, cols).clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::tpoly::tpoly_from_poly;
    use crate::vars::VarRegistry;
    use std::sync::Arc;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &["a", "b"]).unwrap()
    }

    fn tp(reg: &Arc<VarRegistry>, s: &str) -> CurvePoly {
        tpoly_from_poly(&parse_polynomial(reg, s).unwrap()).unwrap()
    }

    fn mat(reg: &Arc<VarRegistry>, rows: &[&[&str]]) -> Mat<CurvePoly> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|s| tp(reg, s)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn diagonal_order_checks() {
        let r = reg();
        let a = mat(&r, &[&["t", "0"], &["0", "t^2"]]);
        let ok = curve_membership(&[tp(&r, "t^2"), tp(&r, "t^2")], &a, 12).unwrap();
        assert!(ok.member);
        assert_eq!(ok.diag.len(), 2);

        let out = curve_membership(&[tp(&r, "1"), tp(&r, "0")], &a, 12).unwrap();
        assert!(!out.member);
        assert_eq!(out.failing_row, Some(0));
        assert_eq!(out.deficit, Some(1));
    }

    #[test]
    fn rank_deficient_rows_must_vanish() {
        let r = reg();
        let a = mat(&r, &[&["t"], &["t"]]);
        // (t, t) is a multiple of the column: in
        assert!(curve_membership(&[tp(&r, "t"), tp(&r, "t")], &a, 12).unwrap().member);
        // (t, t^2) is not
        let rep = curve_membership(&[tp(&r, "t"), tp(&r, "t^2")], &a, 12).unwrap();
        assert!(!rep.member);
        assert_eq!(rep.failing_row, Some(1));
        assert_eq!(rep.deficit, None);
    }

    #[test]
    fn unimodular_mixing_does_not_fool_it() {
        let r = reg();
        // columns (t, t) and (0, t^3): membership needs order geq 1 on the
        // difference of rows
        let a = mat(&r, &[&["t", "0"], &["t", "t^3"]]);
        assert!(curve_membership(&[tp(&r, "t"), tp(&r, "t + t^3")], &a, 12).unwrap().member);
        let rep = curve_membership(&[tp(&r, "t"), tp(&r, "t + t^2")], &a, 12).unwrap();
        assert!(!rep.member);
    }

    #[test]
    fn genericity_conditions_recorded() {
        let r = reg();
        let a = mat(&r, &[&["a*t"]]);
        let rep = curve_membership(&[tp(&r, "t")], &a, 12).unwrap();
        assert!(rep.member);
        assert_eq!(rep.genericity, vec![parse_polynomial(&r, "a").unwrap()]);
        // (a - b) shows up when it must be inverted
        let a2 = mat(&r, &[&["a*t - b*t"]]);
        let rep2 = curve_membership(&[tp(&r, "t")], &a2, 12).unwrap();
        assert!(rep2.member);
        assert_eq!(rep2.genericity, vec![parse_polynomial(&r, "a - b").unwrap()]);
    }

    #[test]
    fn greedy_reduces_and_reports_sticking_point() {
        let r = reg();
        let a = mat(&r, &[&["t", "0"], &["0", "t^2"]]);
        // reducible case: drives the residual to zero
        let rep = greedy_reduce(&[tp(&r, "t^2"), tp(&r, "t^2")], &a, 12);
        assert!(rep.residual.iter().all(|x| x.is_zero()));
        assert_eq!(rep.stuck_order, None);

        // stuck case: the second row cannot be reached at order 1
        let a2 = mat(&r, &[&["t", "0"], &["0", "t^2"]]);
        let rep2 = greedy_reduce(&[tp(&r, "t"), tp(&r, "t")], &a2, 12);
        assert_eq!(rep2.stuck_order, Some(1));
        assert_eq!(rep2.failing_row, Some(1));
        assert!(rep2.residual[0].is_zero());
        assert_eq!(rep2.residual[1], tp(&r, "t"));
    }

    #[test]
    fn greedy_partial_elimination_matches_pivot_rows() {
        let r = reg();
        // one column (1-slice (1,1)), target slice (1, 2): pivot row 0
        // eliminates the first row, leaving the obstruction on row 1
        let a = mat(&r, &[&["t"], &["t"]]);
        let rep = greedy_reduce(&[tp(&r, "t"), tp(&r, "2*t")], &a, 12);
        assert_eq!(rep.stuck_order, Some(1));
        assert!(rep.residual[0].is_zero());
        assert_eq!(rep.residual[1], tp(&r, "t"));
        assert_eq!(rep.steps.len(), 1);
        assert_eq!(rep.steps[0].used.len(), 1);
    }
}
