//! Exact monomial integral closure via Newton polyhedra.
//!
//! For a monomial ideal, the integral closure is combinatorial: a monomial
//! lies in the closure exactly when its exponent vector lies in the convex
//! hull of the generator exponents plus the non-negative orthant. Both
//! directions are certified here — membership by an explicit convex
//! combination (phase-1 simplex over the rationals, Bland's rule, so the
//! search is finite and exact), and non-membership by a separating weight
//! vector, which doubles as a monomial curve exhibiting the order
//! obstruction.

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::mat::Mat;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Decides feasibility of `{x >= 0 : A x = b}` exactly. Returns a basic
/// feasible solution on success.
pub fn lp_feasible(a: &Mat<Rat>, b: &[Rat]) -> Option<Vec<Rat>> {
    let k = a.rows();
    let nv = a.cols();
    assert_eq!(b.len(), k);
    if k == 0 {
        return Some(vec![Rat::zero(); nv]);
    }

    // tableau rows: [A | I | b], with rows flipped so b >= 0
    let width = nv + k + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(k);
    for i in 0..k {
        let flip = b[i] < Rat::zero();
        let mut row: Vec<Rat> = Vec::with_capacity(width);
        for j in 0..nv {
            let v = a.at(i, j).clone();
            row.push(if flip { -v } else { v });
        }
        for j in 0..k {
            row.push(if j == i { Rat::one() } else { Rat::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }

    // phase-1 objective: minimize the sum of artificials. Reduced-cost row
    // r_j = c_j - sum_i t[i][j] (artificial basis costs are 1); the last
    // cell tracks minus the current artificial sum.
    let mut r: Vec<Rat> = vec![Rat::zero(); width];
    for j in 0..width {
        let mut acc = if (nv..nv + k).contains(&j) { Rat::one() } else { Rat::zero() };
        for row in &t {
            acc -= row[j].clone();
        }
        r[j] = acc;
    }
    let mut basis: Vec<usize> = (nv..nv + k).collect();
    let mut dead = vec![false; width - 1];

    loop {
        // Bland: smallest live column with negative reduced cost
        let Some(pc) = (0..width - 1).find(|&j| !dead[j] && r[j] < Rat::zero()) else {
            break;
        };
        // ratio test; Bland tie-break on the smallest basis index
        let mut best: Option<(Rat, usize)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[pc] <= Rat::zero() {
                continue;
            }
            let ratio = row[width - 1].clone() / row[pc].clone();
            let better = match &best {
                None => true,
                Some((br, bi)) => {
                    ratio < *br || (ratio == *br && basis[i] < basis[*bi])
                }
            };
            if better {
                best = Some((ratio, i));
            }
        }
        let Some((_, pr)) = best else {
            // an improving ray in a bounded-below phase-1 problem cannot
            // exist; reaching this means the tableau is corrupt
            unreachable!("phase-1 simplex found an unbounded direction");
        };
        // pivot
        let piv = t[pr][pc].clone();
        for v in t[pr].iter_mut() {
            *v /= piv.clone();
        }
        for i in 0..k {
            if i == pr || t[i][pc].is_zero() {
                continue;
            }
            let f = t[i][pc].clone();
            for j in 0..width {
                let delta = f.clone() * t[pr][j].clone();
                t[i][j] -= delta;
            }
        }
        if !r[pc].is_zero() {
            let f = r[pc].clone();
            for j in 0..width {
                let delta = f.clone() * t[pr][j].clone();
                r[j] -= delta;
            }
        }
        let leaving = basis[pr];
        if leaving >= nv {
            dead[leaving] = true;
        }
        basis[pr] = pc;
    }

    if !r[width - 1].is_zero() {
        return None; // artificial sum cannot reach zero
    }
    let mut x = vec![Rat::zero(); nv];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < nv {
            x[bj] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

/// Is `v` in `conv(exps) + R_{>=0}^d`? Returns the convex weights on
/// success.
pub fn hull_membership(v: &[u32], exps: &[Vec<u32>]) -> Option<Vec<Rat>> {
    if exps.is_empty() {
        return None;
    }
    let d = v.len();
    let m = exps.len();
    // variables: lambda_1..lambda_m, slack_1..slack_d
    // constraints: sum_i lambda_i e_ij + s_j = v_j; sum_i lambda_i = 1
    let mut data = Vec::with_capacity((d + 1) * (m + d));
    for j in 0..d {
        for e in exps {
            data.push(Rat::from_integer(e[j].into()));
        }
        for jj in 0..d {
            data.push(if jj == j { Rat::one() } else { Rat::zero() });
        }
    }
    for _ in 0..m {
        data.push(Rat::one());
    }
    for _ in 0..d {
        data.push(Rat::zero());
    }
    let a = Mat::new(d + 1, m + d, data).expect("shape");
    let mut b: Vec<Rat> = v.iter().map(|&x| Rat::from_integer(x.into())).collect();
    b.push(Rat::one());
    lp_feasible(&a, &b).map(|x| x[..m].to_vec())
}

/// For `v` outside the hull, an integer weight vector `c >= 0` with
/// `c . e_i >= c . v + 1` (after scaling) for every generator exponent.
/// Interpreted as t-degrees of a monomial curve, it certifies the order
/// obstruction. Returns `None` when `v` is inside (no separator exists).
pub fn separating_weights(v: &[u32], exps: &[Vec<u32>]) -> Option<Vec<BigInt>> {
    let d = v.len();
    let m = exps.len();
    if m == 0 {
        // empty ideal: every direction separates; pick all-ones
        return Some(vec![BigInt::one(); d]);
    }
    // variables: c_1..c_d, surplus u_1..u_m
    // constraints: c . (e_i - v) - u_i = 1
    let mut data = Vec::with_capacity(m * (d + m));
    for (i, e) in exps.iter().enumerate() {
        for j in 0..d {
            let diff = BigInt::from(e[j]) - BigInt::from(v[j]);
            data.push(Rat::from_integer(diff));
        }
        for ii in 0..m {
            data.push(if ii == i { -Rat::one() } else { Rat::zero() });
        }
    }
    let a = Mat::new(m, d + m, data).expect("shape");
    let b = vec![Rat::one(); m];
    let x = lp_feasible(&a, &b)?;
    // scale the rational weights to integers
    let mut denom_lcm = BigInt::one();
    for c in &x[..d] {
        denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
    }
    Some(
        x[..d]
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect(),
    )
}

/// The exponent vector of a monomial polynomial (single term, any nonzero
/// coefficient). Errors on anything else.
pub fn monomial_exponent(p: &Polynomial) -> Result<Monomial> {
    if p.n_terms() != 1 {
        return Err(Error::NotMonomial);
    }
    let (m, _) = p.terms().next().expect("one term");
    Ok(m.clone())
}

/// Integral closure of a monomial ideal: the minimal monomial generators
/// of the set of lattice points in `conv(exponents) + orthant`.
pub fn monomial_closure(ideal: &Ideal) -> Result<Ideal> {
    let reg = ideal.registry();
    if ideal.is_zero() {
        return Ok(Ideal::zero(reg));
    }
    let full_exps: Vec<Monomial> =
        ideal.gens().iter().map(monomial_exponent).collect::<Result<_>>()?;

    // restrict to the slots that actually occur: minimal closure
    // generators are supported there
    let mut slots: Vec<usize> = Vec::new();
    for m in &full_exps {
        for (slot, &e) in m.0.iter().enumerate() {
            if e > 0 && !slots.contains(&slot) {
                slots.push(slot);
            }
        }
    }
    slots.sort_unstable();
    if slots.is_empty() {
        // a unit generator: the ideal is the whole ring
        return Ok(Ideal::unit(reg));
    }
    let exps: Vec<Vec<u32>> = full_exps
        .iter()
        .map(|m| slots.iter().map(|&s| m.0[s] as u32).collect())
        .collect();
    let d = slots.len();
    let maxes: Vec<u32> = (0..d)
        .map(|j| exps.iter().map(|e| e[j]).max().unwrap_or(0))
        .collect();
    let min_total: u32 = exps.iter().map(|e| e.iter().sum()).min().unwrap_or(0);

    // enumerate the candidate box by total degree, keeping only elements
    // not above an already-kept generator; those get the LP test
    let mut box_points: Vec<Vec<u32>> = vec![vec![]];
    for &mx in &maxes {
        let mut next = Vec::with_capacity(box_points.len() * (mx as usize + 1));
        for p in &box_points {
            for e in 0..=mx {
                let mut q = p.clone();
                q.push(e);
                next.push(q);
            }
        }
        box_points = next;
    }
    box_points.sort_by_key(|p| (p.iter().sum::<u32>(), p.clone()));

    let mut kept: Vec<Vec<u32>> = Vec::new();
    for cand in &box_points {
        let total: u32 = cand.iter().sum();
        if total < min_total {
            continue;
        }
        if kept
            .iter()
            .any(|k| k.iter().zip(cand).all(|(a, b)| a <= b))
        {
            continue; // already generated
        }
        let inside = exps
            .iter()
            .any(|e| e.iter().zip(cand).all(|(a, b)| a <= b))
            || hull_membership(cand, &exps).is_some();
        if inside {
            kept.push(cand.clone());
        }
    }

    let n_slots = reg.n_slots();
    let gens = kept
        .into_iter()
        .map(|e| {
            let mut exp = vec![0u16; n_slots];
            for (j, &slot) in slots.iter().enumerate() {
                exp[slot] = e[j] as u16;
            }
            Polynomial::monomial(reg, Monomial(exp), Rat::one())
        })
        .collect();
    Ideal::new(reg, gens)
}
