//! Dense matrices over an arbitrary ring scalar, with the minor machinery
//! the saturation tests are built on.
//!
//! Determinants are computed by Laplace expansion along rows with
//! memoization over column subsets, which reuses shared cofactors across all
//! minors of a size and avoids the division that fraction-free elimination
//! would need. Matrices here are small (a handful of rows), so the
//! `O(2^n n)` subset dynamics is cheap even with polynomial entries.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{FieldScalar, RingScalar};
use crate::Rat;
use itertools::Itertools;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T: RingScalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingScalar> Mat<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: 0 });
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    /// Side-by-side concatenation; row counts must agree.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut data = Vec::with_capacity((self.cols + other.cols) * self.rows);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Mat { rows: self.rows, cols: self.cols + other.cols, data })
    }

    /// Inserts a column at position `j`, shifting later columns right.
    pub fn insert_col(&self, j: usize, col: &[T]) -> Result<Self> {
        if col.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: col.len() });
        }
        assert!(j <= self.cols);
        let mut data = Vec::with_capacity((self.cols + 1) * self.rows);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[..j]);
            data.push(col[i].clone());
            data.extend_from_slice(&self.row(i)[j..]);
        }
        Ok(Mat { rows: self.rows, cols: self.cols + 1, data })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.at(i, j).clone());
            }
        }
        Mat { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn map<U: RingScalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        if self.data.is_empty() && rhs.data.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let proto = self
            .data
            .first()
            .or_else(|| rhs.data.first())
            .expect("nonempty operand")
            .zero_like();
        let mut out = Mat::filled(self.rows, rhs.cols, proto);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = out.at(i, j).zero_like();
                for l in 0..self.cols {
                    acc = acc + self.at(i, l).clone() * rhs.at(l, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for j in 0..self.cols {
                    acc = acc + self.at(i, j).clone() * v[j].clone();
                }
                acc
            })
            .collect())
    }

    /// Determinant of a square matrix by memoized Laplace expansion.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        assert!(n > 0, "determinant of an empty matrix");
        assert!(n <= 20, "determinant dimension too large for subset expansion");
        let zero = self.data[0].zero_like();
        let one = self.data[0].one_like();
        // dp[mask]: determinant of the submatrix on rows 0..popcount(mask)
        // and the column set `mask`.
        let mut dp: Vec<Option<T>> = vec![None; 1usize << n];
        dp[0] = Some(one);
        for mask in 1usize..(1 << n) {
            let r = (mask.count_ones() as usize) - 1;
            let mut acc = zero.clone();
            // expanding along row r: the term at column position `pos`
            // carries (-1)^(r + pos)
            let mut sign_negative = r % 2 == 1;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let entry = self.at(r, j);
                if !entry.is_zero() {
                    let sub = dp[mask & !(1 << j)].as_ref().expect("filled in order").clone();
                    let term = entry.clone() * sub;
                    acc = if sign_negative { acc - term } else { acc + term };
                }
                sign_negative = !sign_negative;
            }
            dp[mask] = Some(acc);
        }
        dp[(1 << n) - 1].take().unwrap()
    }

    /// Determinant of the submatrix selected by `idx` (which must be square).
    pub fn minor(&self, idx: &KIndex) -> Result<T> {
        idx.validate(self.rows, self.cols)?;
        Ok(self.submatrix(&idx.rows, &idx.cols).det())
    }

    /// All `k x k` minors in lexicographic order of (rows, cols).
    pub fn minors(&self, k: usize) -> Result<Vec<(KIndex, T)>> {
        if k == 0 || k > self.rows || k > self.cols {
            return Err(Error::MinorSize { k, rows: self.rows, cols: self.cols });
        }
        let mut out = Vec::new();
        for rows in k_subsets(self.rows, k) {
            for cols in k_subsets(self.cols, k) {
                let d = self.submatrix(&rows, &cols).det();
                out.push((KIndex { rows: rows.clone(), cols }, d));
            }
        }
        Ok(out)
    }
}

impl<F: FieldScalar> Mat<F> {
    /// Rank over a field by Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.rank_profile().0
    }

    /// Rank together with one witness: pivot rows and columns (each sorted
    /// ascending) selecting a nonsingular `rank x rank` submatrix.
    pub fn rank_profile(&self) -> (usize, Vec<usize>, Vec<usize>) {
        let mut m = self.clone();
        // original index of the row currently stored at each position
        let mut perm: Vec<usize> = (0..m.rows).collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for j in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&i| !m.at(i, j).is_zero()) else {
                continue;
            };
            if pivot != rank {
                perm.swap(rank, pivot);
                for col in 0..m.cols {
                    let tmp = m.at(rank, col).clone();
                    let other = m.at(pivot, col).clone();
                    m.set(rank, col, other);
                    m.set(pivot, col, tmp);
                }
            }
            let inv = m.at(rank, j).inv().expect("nonzero pivot");
            for i in (rank + 1)..m.rows {
                if m.at(i, j).is_zero() {
                    continue;
                }
                let factor = m.at(i, j).clone() * inv.clone();
                for col in j..m.cols {
                    let v = m.at(i, col).clone() - factor.clone() * m.at(rank, col).clone();
                    m.set(i, col, v);
                }
            }
            pivot_cols.push(j);
            rank += 1;
        }
        let mut pivot_rows = perm[..rank].to_vec();
        pivot_rows.sort_unstable();
        (rank, pivot_rows, pivot_cols)
    }
}

impl Mat<Polynomial> {
    /// Entry-wise evaluation at a rational point (one value per slot).
    pub fn eval(&self, point: &[Rat]) -> Result<Mat<Rat>> {
        let mut data = Vec::with_capacity(self.data.len());
        for p in &self.data {
            data.push(p.eval(point));
        }
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }
}

/// Row/column selection for a minor: strictly increasing 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KIndex {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl KIndex {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let idx = KIndex { rows, cols };
        if idx.rows.len() != idx.cols.len() {
            return Err(Error::DimensionMismatch {
                expected: idx.rows.len(),
                found: idx.cols.len(),
            });
        }
        if !strictly_increasing(&idx.rows) || !strictly_increasing(&idx.cols) {
            return Err(Error::InvalidArgument(
                "minor indices must be strictly increasing".into(),
            ));
        }
        Ok(idx)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows.len() != self.cols.len()
            || !strictly_increasing(&self.rows)
            || !strictly_increasing(&self.cols)
            || self.rows.last().map_or(false, |&i| i >= rows)
            || self.cols.last().map_or(false, |&j| j >= cols)
        {
            return Err(Error::IndexOutOfRange {
                what: "minor index",
                index: self.rows.last().copied().unwrap_or(0).max(
                    self.cols.last().copied().unwrap_or(0),
                ),
                len: rows.max(cols),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for KIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rows[{}] cols[{}]",
            self.rows.iter().map(|i| i.to_string()).join(","),
            self.cols.iter().map(|j| j.to_string()).join(",")
        )
    }
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// All strictly increasing `k`-element index vectors into `0..n`,
/// in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::vars::VarRegistry;

    fn rmat(entries: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            entries
                .iter()
                .map(|row| row.iter().map(|&v| Rat::from_integer(v.into())).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(rmat(&[&[7]]).det(), Rat::from_integer(7.into()));
        assert_eq!(rmat(&[&[1, 2], &[3, 4]]).det(), Rat::from_integer((-2).into()));
        // Vandermonde on 1, 2, 3: product of differences = 2
        let v = rmat(&[&[1, 1, 1], &[1, 2, 4], &[1, 3, 9]]);
        assert_eq!(v.det(), Rat::from_integer(2.into()));
        // singular
        assert_eq!(rmat(&[&[1, 2], &[2, 4]]).det(), Rat::from_integer(0.into()));
    }

    #[test]
    fn symbolic_determinant_expands() {
        let reg = VarRegistry::new(&["x", "y"], &[]).unwrap();
        let p = |s: &str| parse_polynomial(&reg, s).unwrap();
        let m = Mat::from_rows(vec![
            vec![p("x"), p("y")],
            vec![p("y"), p("x")],
        ])
        .unwrap();
        assert_eq!(m.det(), p("x^2 - y^2"));
        // alternating: equal rows kill the determinant
        let eq = Mat::from_rows(vec![vec![p("x"), p("y")], vec![p("x"), p("y")]]).unwrap();
        assert!(eq.det().is_zero());
    }

    #[test]
    fn minors_and_kindex() {
        let m = rmat(&[&[1, 2, 3], &[4, 5, 6]]);
        let minors = m.minors(2).unwrap();
        assert_eq!(minors.len(), 3);
        let dets: Vec<i64> = minors
            .iter()
            .map(|(_, d)| {
                assert!(d.is_integer());
                i64::try_from(d.to_integer()).unwrap()
            })
            .collect();
        assert_eq!(dets, vec![-3, -6, -3]);
        assert_eq!(minors[0].0, KIndex::new(vec![0, 1], vec![0, 1]).unwrap());
        assert!(KIndex::new(vec![1, 0], vec![0, 1]).is_err());
        assert!(KIndex::new(vec![0], vec![0, 1]).is_err());
        assert!(m.minors(3).is_err());
        assert_eq!(
            m.minor(&KIndex::new(vec![0, 1], vec![0, 2]).unwrap()).unwrap(),
            Rat::from_integer((-6).into())
        );
    }

    #[test]
    fn rank_over_a_field() {
        assert_eq!(rmat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(rmat(&[&[1, 2], &[3, 4]]).rank(), 2);
        assert_eq!(rmat(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(rmat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn rank_profile_returns_a_nonsingular_witness() {
        let m = rmat(&[&[0, 0, 1], &[0, 0, 2], &[3, 0, 0]]);
        let (rank, rows, cols) = m.rank_profile();
        assert_eq!(rank, 2);
        assert_eq!(rows.len(), 2);
        assert_eq!(cols.len(), 2);
        assert!(!m.submatrix(&rows, &cols).det().is_zero());
        let (r0, rows0, cols0) = rmat(&[&[0, 0], &[0, 0]]).rank_profile();
        assert_eq!((r0, rows0, cols0), (0, vec![], vec![]));
    }

    #[test]
    fn stacking_and_products() {
        let a = rmat(&[&[1, 0], &[0, 1]]);
        let b = rmat(&[&[2], &[3]]);
        let c = a.hstack(&b).unwrap();
        assert_eq!(c.cols(), 3);
        assert_eq!(*c.at(1, 2), Rat::from_integer(3.into()));
        let with = a.insert_col(0, &[Rat::from_integer(5.into()), Rat::from_integer(6.into())])
            .unwrap();
        assert_eq!(*with.at(0, 0), Rat::from_integer(5.into()));
        assert_eq!(*with.at(0, 1), Rat::from_integer(1.into()));
        let prod = rmat(&[&[1, 2], &[3, 4]]).matmul(&rmat(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(prod, rmat(&[&[2, 1], &[4, 3]]));
        let v = rmat(&[&[1, 2], &[3, 4]])
            .mul_vec(&[Rat::from_integer(1.into()), Rat::from_integer(1.into())])
            .unwrap();
        assert_eq!(v, vec![Rat::from_integer(3.into()), Rat::from_integer(7.into())]);
    }

    #[test]
    fn k_subset_order() {
        assert_eq!(
            k_subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(k_subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}
