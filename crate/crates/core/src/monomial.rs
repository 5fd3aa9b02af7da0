//! Monomials as exponent vectors with the graded reverse-lexicographic order.
//!
//! A monomial stores one exponent per registry slot. `Ord` implements
//! degrevlex: compare total degrees first; on a tie the monomial whose
//! exponent vector has the *smaller* entry at the rightmost differing slot is
//! the larger monomial. With slots ordered `x, y`, this yields
//! `x^2 > x y > y^2`.

use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(n_slots: usize) -> Self {
        Monomial(vec![0; n_slots])
    }

    pub fn var(slot: usize, n_slots: usize) -> Self {
        let mut e = vec![0; n_slots];
        e[slot] = 1;
        Monomial(e)
    }

    pub fn n_slots(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn deg_in(&self, slot: usize) -> u16 {
        self.0[slot]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Componentwise quotient, `None` when `other` does not divide `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.try_div(self).is_some()
    }

    /// Degree summed over an arbitrary set of slots.
    pub fn degree_over(&self, slots: &[usize]) -> u32 {
        slots.iter().map(|&s| self.0[s] as u32).sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            match a.cmp(b) {
                Ordering::Equal => {}
                // smaller exponent at the rightmost difference wins
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn degrevlex_two_vars() {
        // x^2 > x y > y^2 > x > y > 1
        let order = [
            m(&[2, 0]),
            m(&[1, 1]),
            m(&[0, 2]),
            m(&[1, 0]),
            m(&[0, 1]),
            m(&[0, 0]),
        ];
        for w in order.windows(2) {
            assert!(w[0] > w[1], "{:?} should exceed {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn degrevlex_three_vars_classic() {
        // In three variables degrevlex ranks x z < y^2 (both degree 2):
        // rightmost difference is the z slot where x z has the larger entry.
        assert!(m(&[1, 0, 1]) < m(&[0, 2, 0]));
        // and x y > z^2
        assert!(m(&[1, 1, 0]) > m(&[0, 0, 2]));
    }

    #[test]
    fn division() {
        let a = m(&[2, 1]);
        let b = m(&[1, 1]);
        assert_eq!(a.try_div(&b), Some(m(&[1, 0])));
        assert_eq!(b.try_div(&a), None);
        assert!(b.divides(&a));
        assert_eq!(a.mul(&b), m(&[3, 2]));
    }
}
