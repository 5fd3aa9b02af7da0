//! Rational functions: reduced fractions of polynomials.
//!
//! Canonical form: numerator and denominator coprime, denominator
//! integer-primitive with positive leading coefficient (so the denominator of
//! a polynomial is literally `1`). Equality is structural on that form.
//!
//! The same type serves two roles: general substitution results, and the
//! coefficient field of truncated t-series, where numerator and denominator
//! involve parameters only.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gcd::poly_gcd;
use crate::poly::Polynomial;
use crate::scalar::{FieldScalar, RingScalar};
use crate::vars::VarRegistry;
use crate::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Polynomial,
    den: Polynomial,
}

impl RatFun {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFun { den: Polynomial::one(num.registry()), num };
        }
        // constant denominator: just rescale, no gcd needed
        if let Some(c) = den.constant_value() {
            let num = num.scale(&c.recip());
            return RatFun { den: Polynomial::one(num.registry()), num };
        }
        let g = poly_gcd(&num, &den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        // scale so the denominator is its own canonical associate
        let den_norm = den.normalized_assoc();
        let unit = den
            .leading()
            .map(|(_, c)| c.clone())
            .unwrap()
            / den_norm.leading().map(|(_, c)| c.clone()).unwrap();
        RatFun { num: num.scale(&unit.recip()), den: den_norm }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.registry());
        RatFun { num: p, den }
    }

    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Self::from_poly(Polynomial::zero(reg))
    }

    pub fn one(reg: &Arc<VarRegistry>) -> Self {
        Self::from_poly(Polynomial::one(reg))
    }

    pub fn constant(reg: &Arc<VarRegistry>, c: Rat) -> Self {
        Self::from_poly(Polynomial::constant(reg, c))
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.num.registry()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the fraction is a polynomial (denominator 1).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// True when numerator and denominator involve parameters only.
    pub fn is_param_only(&self) -> bool {
        self.num.is_param_only() && self.den.is_param_only()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }
}

impl std::ops::Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFun::reduced(num, den)
    }
}

impl std::ops::Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFun::reduced(num, den)
    }
}

impl std::ops::Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        RatFun::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl std::ops::Div for &RatFun {
    type Output = RatFun;
    fn div(self, rhs: &RatFun) -> RatFun {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFun::reduced(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl std::ops::Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for RatFun {
            type Output = RatFun;
            fn $method(self, rhs: RatFun) -> RatFun {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl std::ops::Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

impl RingScalar for RatFun {
    fn zero_like(&self) -> Self {
        RatFun::zero(self.registry())
    }
    fn one_like(&self) -> Self {
        RatFun::one(self.registry())
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
}

impl FieldScalar for RatFun {
    fn inv(&self) -> Option<Self> {
        self.recip().ok()
    }
}

impl std::fmt::Display for RatFun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.n_terms() <= 1 && self.den.n_terms() <= 1 {
            write!(f, "{}/{}", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Substitution with rational-function targets; every occurring variable of
/// `p` must be mapped (identity entries included by the caller).
pub fn substitute(
    p: &Polynomial,
    map: &std::collections::BTreeMap<usize, RatFun>,
) -> Result<RatFun> {
    // fast path: all targets polynomial
    if map.values().all(|f| f.is_polynomial()) {
        let poly_map = map
            .iter()
            .map(|(&s, f)| (s, f.numer().clone()))
            .collect::<std::collections::BTreeMap<_, _>>();
        return Ok(RatFun::from_poly(p.substitute_poly(&poly_map)?));
    }
    let reg = p.registry();
    for &slot in &p.occurring_slots() {
        if !map.contains_key(&slot) {
            return Err(Error::UnmappedVariable(reg.name_of(slot).to_string()));
        }
    }
    let mut acc = RatFun::zero(reg);
    for (m, c) in p.terms() {
        let mut term = RatFun::constant(reg, c.clone());
        for (slot, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                term = &term * &map[&slot];
            }
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use std::collections::BTreeMap;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &["a", "b"]).unwrap()
    }

    fn p(src: &str) -> Polynomial {
        parse_polynomial(&reg(), src).unwrap()
    }

    fn rf(n: &str, d: &str) -> RatFun {
        RatFun::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn reduction_is_canonical() {
        assert_eq!(rf("x^2 - y^2", "x + y"), RatFun::from_poly(p("x - y")));
        assert_eq!(rf("2*x", "4*y"), rf("x", "2*y"));
        assert_eq!(rf("x", "-y"), rf("-x", "y"));
        assert!(rf("0", "x").is_zero());
        assert!(RatFun::new(p("x"), p("0")).is_err());
    }

    #[test]
    fn field_arithmetic() {
        let f = rf("1", "x");
        let g = rf("1", "y");
        assert_eq!(&f + &g, rf("x + y", "x*y"));
        assert_eq!(&f * &g, rf("1", "x*y"));
        assert_eq!(&f / &g, rf("y", "x"));
        assert_eq!(&(&f - &f) + &g, g);
        assert_eq!(f.recip().unwrap(), RatFun::from_poly(p("x")));
    }

    #[test]
    fn substitution_cancels() {
        // (a*t)/a with a symbolic: substitute x -> a, y -> a gives x/y -> 1
        let target = p("x");
        let mut map = BTreeMap::new();
        map.insert(0usize, rf("a", "1"));
        let out = substitute(&target, &map).unwrap();
        assert_eq!(out, RatFun::from_poly(p("a")));

        let q = p("x*y");
        let mut map2 = BTreeMap::new();
        map2.insert(0usize, rf("1", "a"));
        map2.insert(1usize, rf("a", "1"));
        assert_eq!(substitute(&q, &map2).unwrap(), RatFun::one(&reg()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(rf("x", "1").to_string(), "x");
        assert_eq!(rf("x", "y").to_string(), "x/y");
        assert_eq!(rf("x + y", "x*y").to_string(), "(x + y)/(x*y)");
    }
}
