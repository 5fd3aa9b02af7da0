//! Finitely generated ideals, kept in a canonical form.
//!
//! Generators are stored primitive (integer coefficients with content 1 and
//! positive leading coefficient), with zeros dropped, duplicates removed,
//! and a fixed ordering — so structurally equal ideals compare equal and
//! serialized output is reproducible. Note this is generator-list equality,
//! not ideal equality; deciding the latter is the membership engine's job.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::vars::VarRegistry;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct Ideal {
    reg: Arc<VarRegistry>,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(reg: &Arc<VarRegistry>, gens: Vec<Polynomial>) -> Result<Self> {
        for g in &gens {
            if !g.registry().same(reg) {
                return Err(Error::RegistryMismatch);
            }
        }
        let mut canon: Vec<Polynomial> = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.normalized_assoc())
            .collect();
        canon.sort_by(|a, b| b.cmp(a));
        canon.dedup();
        Ok(Ideal { reg: reg.clone(), gens: canon })
    }

    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Ideal { reg: reg.clone(), gens: Vec::new() }
    }

    pub fn unit(reg: &Arc<VarRegistry>) -> Self {
        Ideal { reg: reg.clone(), gens: vec![Polynomial::one(reg)] }
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// True when some generator is a nonzero constant (so the ideal is the
    /// whole ring); the converse needs membership machinery.
    pub fn contains_unit_trivially(&self) -> bool {
        self.gens.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        if !self.reg.same(&other.reg) {
            return Err(Error::RegistryMismatch);
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(&self.reg, gens)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        if !self.reg.same(&other.reg) {
            return Err(Error::RegistryMismatch);
        }
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a * b);
            }
        }
        Ideal::new(&self.reg, gens)
    }

    /// `I^k`, with `I^0` the unit ideal (also for the zero ideal).
    pub fn power(&self, k: usize) -> Ideal {
        let mut acc = Ideal::unit(&self.reg);
        for _ in 0..k {
            acc = acc.product(self).expect("same registry");
        }
        acc
    }

    /// Scales every generator by a polynomial: `p * I`.
    pub fn scale(&self, p: &Polynomial) -> Result<Ideal> {
        if !self.reg.same(p.registry()) {
            return Err(Error::RegistryMismatch);
        }
        Ideal::new(&self.reg, self.gens.iter().map(|g| g * p).collect())
    }
}

impl std::fmt::Display for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.gens.is_empty() {
            return f.write_str("ideal(0)");
        }
        f.write_str("ideal(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn setup() -> (Arc<VarRegistry>, impl Fn(&str) -> Polynomial) {
        let reg = VarRegistry::new(&["x", "y"], &[]).unwrap();
        let r = reg.clone();
        (reg, move |s: &str| parse_polynomial(&r, s).unwrap())
    }

    #[test]
    fn canonical_form_dedups_and_normalizes() {
        let (reg, p) = setup();
        let i = Ideal::new(&reg, vec![p("2*x"), p("-x"), p("0"), p("y^2 - y^2")]).unwrap();
        assert_eq!(i.gens(), &[p("x")]);
        let j = Ideal::new(&reg, vec![p("1/3*x")]).unwrap();
        assert_eq!(i, j);
        assert!(Ideal::new(&reg, vec![p("0")]).unwrap().is_zero());
    }

    #[test]
    fn generator_order_is_stable() {
        let (reg, p) = setup();
        let a = Ideal::new(&reg, vec![p("x"), p("y"), p("x^2")]).unwrap();
        let b = Ideal::new(&reg, vec![p("y"), p("x^2"), p("x")]).unwrap();
        assert_eq!(a.gens(), b.gens());
        // descending: higher degree first, then the variable order
        assert_eq!(a.gens(), &[p("x^2"), p("x"), p("y")]);
    }

    #[test]
    fn sums_products_powers() {
        let (reg, p) = setup();
        let i = Ideal::new(&reg, vec![p("x"), p("y")]).unwrap();
        let sq = i.product(&i).unwrap();
        assert_eq!(sq.gens(), &[p("x^2"), p("x*y"), p("y^2")]);
        assert_eq!(i.power(2), sq);
        assert_eq!(i.power(0), Ideal::unit(&reg));
        assert_eq!(Ideal::zero(&reg).power(0), Ideal::unit(&reg));
        assert!(Ideal::zero(&reg).power(3).is_zero());
        let s = i.sum(&Ideal::new(&reg, vec![p("x - y")]).unwrap()).unwrap();
        assert_eq!(s.gens().len(), 3);
        let scaled = i.scale(&p("x")).unwrap();
        assert_eq!(scaled.gens(), &[p("x^2"), p("x*y")]);
    }

    #[test]
    fn unit_detection_and_display() {
        let (reg, p) = setup();
        assert!(Ideal::unit(&reg).contains_unit_trivially());
        assert!(Ideal::new(&reg, vec![p("3")]).unwrap().contains_unit_trivially());
        assert!(!Ideal::new(&reg, vec![p("x + 1")]).unwrap().contains_unit_trivially());
        let i = Ideal::new(&reg, vec![p("x"), p("y")]).unwrap();
        assert_eq!(i.to_string(), "ideal(x, y)");
        assert_eq!(Ideal::zero(&reg).to_string(), "ideal(0)");
    }
}
