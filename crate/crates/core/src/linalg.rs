//! Exact linear solving over a field.
//!
//! The membership routines reduce "is this element a combination of these
//! generators" questions to (often large, very sparse in content but dense in
//! layout) rational linear systems; all we need from this module is a single
//! exact solution or a proof of inconsistency.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::FieldScalar;

/// Solves `A x = b` exactly. Returns `Ok(Some(x))` for one solution (free
/// variables set to zero), `Ok(None)` if the system is inconsistent.
pub fn solve<F: FieldScalar>(a: &Mat<F>, b: &[F]) -> Result<Option<Vec<F>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let rows = a.rows();
    let cols = a.cols();
    let Some(proto) = b.first().map(|v| v.zero_like()).or_else(|| {
        (rows * cols > 0).then(|| a.at(0, 0).zero_like())
    }) else {
        // no equations: the empty assignment works
        return Ok(Some(Vec::new()));
    };

    // augmented matrix [A | b]
    let mut m = Mat::filled(rows, cols + 1, proto.clone());
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, a.at(i, j).clone());
        }
        m.set(i, cols, b[i].clone());
    }

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for j in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m.at(i, j).is_zero()) else {
            continue;
        };
        if p != rank {
            for col in 0..=cols {
                let tmp = m.at(rank, col).clone();
                let other = m.at(p, col).clone();
                m.set(rank, col, other);
                m.set(p, col, tmp);
            }
        }
        let inv = m.at(rank, j).inv().expect("nonzero pivot");
        for col in j..=cols {
            let v = m.at(rank, col).clone() * inv.clone();
            m.set(rank, col, v);
        }
        for i in 0..rows {
            if i == rank || m.at(i, j).is_zero() {
                continue;
            }
            let factor = m.at(i, j).clone();
            for col in j..=cols {
                let v = m.at(i, col).clone() - factor.clone() * m.at(rank, col).clone();
                m.set(i, col, v);
            }
        }
        pivot_cols.push(j);
        rank += 1;
    }

    // inconsistency: a zero row with nonzero right-hand side
    for i in rank..rows {
        if !m.at(i, cols).is_zero() {
            return Ok(None);
        }
    }

    let mut x = vec![proto; cols];
    for (r, &j) in pivot_cols.iter().enumerate() {
        x[j] = m.at(r, cols).clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn rmat(entries: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            entries
                .iter()
                .map(|row| row.iter().map(|&v| Rat::from_integer(v.into())).collect())
                .collect(),
        )
        .unwrap()
    }

    fn rvec(entries: &[i64]) -> Vec<Rat> {
        entries.iter().map(|&v| Rat::from_integer(v.into())).collect()
    }

    #[test]
    fn unique_solution() {
        let a = rmat(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &rvec(&[5, 10])).unwrap().unwrap();
        assert_eq!(x, rvec(&[1, 3]));
    }

    #[test]
    fn underdetermined_picks_free_vars_zero() {
        let a = rmat(&[&[1, 1, 1]]);
        let x = solve(&a, &rvec(&[3])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), rvec(&[3]));
        assert_eq!(x[1], Rat::from_integer(0.into()));
        assert_eq!(x[2], Rat::from_integer(0.into()));
    }

    #[test]
    fn inconsistent_detected() {
        let a = rmat(&[&[1, 2], &[2, 4]]);
        assert!(solve(&a, &rvec(&[1, 3])).unwrap().is_none());
        // but the consistent right-hand side works
        assert!(solve(&a, &rvec(&[1, 2])).unwrap().is_some());
    }

    #[test]
    fn overdetermined_consistent() {
        let a = rmat(&[&[1, 0], &[0, 1], &[1, 1]]);
        let x = solve(&a, &rvec(&[2, 3, 5])).unwrap().unwrap();
        assert_eq!(x, rvec(&[2, 3]));
        assert!(solve(&a, &rvec(&[2, 3, 6])).unwrap().is_none());
    }

    #[test]
    fn empty_system() {
        let a = Mat::<Rat>::from_rows(vec![]).unwrap();
        assert_eq!(solve(&a, &[]).unwrap(), Some(vec![]));
    }
}
