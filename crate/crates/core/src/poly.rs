//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by degrevlex-ordered monomials, so a
//! polynomial has exactly one representation: no zero coefficients, iteration
//! in a fixed order, structural equality. All arithmetic is exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::vars::{VarKind, VarRegistry};
use crate::Rat;

#[derive(Debug, Clone)]
pub struct Polynomial {
    reg: Arc<VarRegistry>,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Polynomial { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(reg: &Arc<VarRegistry>, c: Rat) -> Self {
        let mut p = Self::zero(reg);
        p.add_term(Monomial::one(reg.n_slots()), c);
        p
    }

    pub fn one(reg: &Arc<VarRegistry>) -> Self {
        Self::constant(reg, Rat::one())
    }

    pub fn from_int(reg: &Arc<VarRegistry>, n: i64) -> Self {
        Self::constant(reg, Rat::from_integer(n.into()))
    }

    pub fn var(reg: &Arc<VarRegistry>, slot: usize) -> Self {
        assert!(slot < reg.n_slots(), "slot out of range");
        let mut p = Self::zero(reg);
        p.add_term(Monomial::var(slot, reg.n_slots()), Rat::one());
        p
    }

    /// Variable by name; errors on unknown identifiers.
    pub fn named_var(reg: &Arc<VarRegistry>, name: &str) -> Result<Self> {
        let slot = reg
            .slot_of(name)
            .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
        Ok(Self::var(reg, slot))
    }

    pub fn monomial(reg: &Arc<VarRegistry>, m: Monomial, c: Rat) -> Self {
        assert_eq!(m.n_slots(), reg.n_slots());
        let mut p = Self::zero(reg);
        p.add_term(m, c);
        p
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// Adds `c * m` in place, dropping the term if the sum cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms.values().next().map_or(false, |c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    /// The constant value when `is_constant`, otherwise `None`.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            Some(Rat::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Constant (degree-zero) coefficient.
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&Monomial::one(self.reg.n_slots()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending degrevlex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Terms in descending (leading-first) order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, slot: usize) -> u16 {
        self.terms.keys().map(|m| m.deg_in(slot)).max().unwrap_or(0)
    }

    /// Zero is homogeneous by convention.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// The homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        let mut out = Self::zero(&self.reg);
        for (m, c) in &self.terms {
            if m.total_degree() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn occurring_slots(&self) -> Vec<usize> {
        let n = self.reg.n_slots();
        let mut seen = vec![false; n];
        for m in self.terms.keys() {
            for (slot, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    seen[slot] = true;
                }
            }
        }
        (0..n).filter(|&s| seen[s]).collect()
    }

    pub fn involves(&self, slot: usize) -> bool {
        self.terms.keys().any(|m| m.deg_in(slot) > 0)
    }

    /// True when only space variables and parameters occur (no primes, no t).
    pub fn is_base_ring(&self) -> bool {
        self.occurring_slots()
            .iter()
            .all(|&s| matches!(self.reg.kind_of(s), VarKind::Space(_) | VarKind::Param(_)))
    }

    /// True when only parameters and `t` occur.
    pub fn is_curve_ring(&self) -> bool {
        self.occurring_slots()
            .iter()
            .all(|&s| matches!(self.reg.kind_of(s), VarKind::Param(_) | VarKind::Curve))
    }

    /// True when only parameters occur.
    pub fn is_param_only(&self) -> bool {
        self.occurring_slots()
            .iter()
            .all(|&s| matches!(self.reg.kind_of(s), VarKind::Param(_)))
    }

    fn assert_same_reg(&self, other: &Polynomial) {
        assert!(self.reg.same(&other.reg), "registry mismatch in polynomial arithmetic");
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        let mut out = Self::zero(&self.reg);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        let mut out = Self::zero(&self.reg);
        for (mm, a) in &self.terms {
            out.terms.insert(mm.mul(m), a * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Self::one(&self.reg);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Relabels exponents slot-wise; used for the copy-swapping substitutions.
    pub(crate) fn map_slots(&self, f: impl Fn(usize) -> usize) -> Polynomial {
        let n = self.reg.n_slots();
        let mut out = Self::zero(&self.reg);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; n];
            for (slot, &exp) in m.0.iter().enumerate() {
                if exp > 0 {
                    let target = f(slot);
                    e[target] = e[target].checked_add(exp).expect("exponent overflow");
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Full evaluation at a rational point (one value per slot).
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.reg.n_slots());
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (slot, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[slot];
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitution where every target is a polynomial. Every occurring
    /// variable must be mapped (identity entries are fine).
    pub fn substitute_poly(&self, map: &BTreeMap<usize, Polynomial>) -> Result<Polynomial> {
        for &slot in &self.occurring_slots() {
            if !map.contains_key(&slot) {
                return Err(Error::UnmappedVariable(self.reg.name_of(slot).to_string()));
            }
        }
        let mut powers: BTreeMap<usize, Vec<Polynomial>> = BTreeMap::new();
        let mut acc = Self::zero(&self.reg);
        for (m, c) in &self.terms {
            let mut term = Self::constant(&self.reg, c.clone());
            for (slot, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let target = &map[&slot];
                self.assert_same_reg(target);
                let cache = powers.entry(slot).or_insert_with(|| vec![Self::one(&self.reg)]);
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * target;
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// The positive rational `c` such that `self / c` has coprime integer
    /// coefficients; 1 for the zero polynomial.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        Rat::new(num_gcd, den_lcm)
    }

    /// Canonical associate: integer-primitive with positive leading
    /// coefficient. Zero stays zero.
    pub fn normalized_assoc(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.assert_same_reg(divisor);
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (dm, dc) = divisor.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.reg);
        while !rem.is_zero() {
            let (lm, lc) = rem.leading().unwrap();
            let qm = lm.try_div(&dm)?;
            let qc = lc / &dc;
            let piece = divisor.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
            rem = &rem - &piece;
        }
        Some(quot)
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.reg.same(&other.reg) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Hash for Polynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // registry intentionally excluded: mixed-registry collections are not used
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only to fix canonical generator lists: compare leading
/// terms downward, then coefficients.
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb).then_with(|| ca.cmp(cb)) {
                    Ordering::Equal => {}
                    ord => return ord,
                },
            }
        }
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let mut out = Polynomial::zero(&self.reg);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_reg(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_reg(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_reg(rhs);
        let mut out = Polynomial::zero(&self.reg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul);

impl std::ops::Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl crate::scalar::RingScalar for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(&self.reg)
    }
    fn one_like(&self) -> Self {
        Polynomial::one(&self.reg)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg2() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &[]).unwrap()
    }

    fn int(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn arithmetic_and_canonical_form() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let p = &(&x * &x) - &(&y * &y);
        let q = &(&x - &y) * &(&x + &y);
        assert_eq!(p, q);
        let cancel = &p - &p;
        assert!(cancel.is_zero());
        assert_eq!(cancel.n_terms(), 0);
    }

    #[test]
    fn degrees_and_homogeneity() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let p = &(&x * &y) + &x.pow(2);
        assert_eq!(p.total_degree(), 2);
        assert!(p.is_homogeneous());
        let q = &p + &Polynomial::one(&reg);
        assert!(!q.is_homogeneous());
        assert_eq!(q.homogeneous_part(0), Polynomial::one(&reg));
        assert_eq!(q.homogeneous_part(2), p);
        assert!(Polynomial::zero(&reg).is_homogeneous());
    }

    #[test]
    fn leading_term_is_degrevlex_max() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        // x^2 + x y + y^2: leading must be x^2
        let p = &(&x.pow(2) + &(&x * &y)) + &y.pow(2);
        let (m, _) = p.leading().unwrap();
        let mut exps = vec![0u16; reg.n_slots()];
        exps[0] = 2;
        assert_eq!(m, &Monomial(exps));
    }

    #[test]
    fn content_and_normalization() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let p = &x.scale(&Rat::new(4.into(), 6.into())) + &y.scale(&int(2));
        // content of (2/3) x + 2 y is 2/3
        assert_eq!(p.content(), Rat::new(2.into(), 3.into()));
        let n = p.normalized_assoc();
        assert_eq!(n, &x + &y.scale(&int(3)));
        let neg = (-&n).normalized_assoc();
        assert_eq!(neg, n);
        assert!(Polynomial::zero(&reg).normalized_assoc().is_zero());
    }

    #[test]
    fn exact_division() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.div_exact(&(&x + &y)), Some(&x - &y));
        assert_eq!(p.div_exact(&x), None);
        let two = Polynomial::from_int(&reg, 2);
        assert_eq!(p.div_exact(&two).unwrap().scale(&int(2)), p);
    }

    #[test]
    fn substitution_with_identity_entries() {
        let reg = VarRegistry::new(&["x", "y"], &["a"]).unwrap();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let a = Polynomial::var(&reg, reg.param_slot(0));
        let t = Polynomial::var(&reg, reg.curve_slot());
        let p = &(&x * &x) + &y; // x^2 + y
        let mut map = BTreeMap::new();
        map.insert(0, t.clone());
        map.insert(1, &a * &t);
        let out = p.substitute_poly(&map).unwrap();
        assert_eq!(out, &(&t * &t) + &(&a * &t));
        // unmapped occurring variable errors
        let mut partial = BTreeMap::new();
        partial.insert(0, t.clone());
        assert!(matches!(p.substitute_poly(&partial), Err(Error::UnmappedVariable(_))));
    }

    #[test]
    fn evaluation() {
        let reg = reg2();
        let x = Polynomial::var(&reg, 0);
        let y = Polynomial::var(&reg, 1);
        let p = &(&x * &y) + &Polynomial::one(&reg);
        // slots: x, y, x', y', t
        let point = vec![int(2), int(3), int(0), int(0), int(0)];
        assert_eq!(p.eval(&point), int(7));
    }
}
