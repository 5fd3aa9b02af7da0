//! Polynomials in the curve variable `t` over a coefficient field.
//!
//! This is the arithmetic that curve pullbacks land in: the coefficient field
//! is generically the rational functions in the symbolic parameters, but the
//! code is written against `FieldScalar` so tests can use plain rationals.
//! Since several of our fields carry context, a `TPoly` keeps a zero
//! prototype coefficient around to mint neutral elements.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::ratfun::RatFun;
use crate::scalar::{FieldScalar, RingScalar};

#[derive(Debug, Clone)]
pub struct TPoly<F: FieldScalar> {
    proto: F,
    coeffs: Vec<F>,
}

impl<F: FieldScalar> TPoly<F> {
    pub fn new(proto: F, coeffs: Vec<F>) -> Self {
        let proto = proto.zero_like();
        let mut p = TPoly { proto, coeffs };
        p.trim();
        p
    }

    pub fn zero(proto: F) -> Self {
        TPoly { proto: proto.zero_like(), coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        let proto = c.zero_like();
        Self::new(proto, vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        let proto = c.zero_like();
        let mut coeffs = vec![proto.clone(); k];
        coeffs.push(c);
        Self::new(proto, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn proto(&self) -> &F {
        &self.proto
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `t`; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// t-adic order (index of the lowest nonzero coefficient); `None` for zero.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Order with zero mapped to `usize::MAX`, convenient for comparisons.
    pub fn ord_or_inf(&self) -> usize {
        self.ord().unwrap_or(usize::MAX)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.proto.clone())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Splits into `t^ord * unit` where the unit has a nonzero constant term.
    /// Panics on zero.
    pub fn split_local(&self) -> (usize, TPoly<F>) {
        let ord = self.ord().expect("split_local of zero");
        (ord, TPoly::new(self.proto.clone(), self.coeffs[ord..].to_vec()))
    }

    pub fn mul_t_pow(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.proto.clone(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TPoly { proto: self.proto.clone(), coeffs }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(
            self.proto.clone(),
            self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        )
    }

    /// Drops all terms of degree above `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let keep = self.coeffs.iter().take(n + 1).cloned().collect();
        Self::new(self.proto.clone(), keep)
    }

    /// Monic associate (leading coefficient 1); zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division: `self = q * rhs + r` with `deg r < deg rhs`.
    pub fn divmod(&self, rhs: &Self) -> (Self, Self) {
        assert!(!rhs.is_zero(), "division by zero t-polynomial");
        let db = rhs.degree().unwrap();
        let lb = rhs.leading_coeff().unwrap().clone();
        let mut r = self.clone();
        let mut q = TPoly::zero(self.proto.clone());
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let factor = r.leading_coeff().unwrap().clone() / lb.clone();
            let shift = dr - db;
            q = &q + &TPoly::monomial(factor.clone(), shift);
            r = &r - &rhs.scale(&factor).mul_t_pow(shift);
        }
        (q, r)
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of a unit (nonzero constant term) as a power series, with all
    /// terms of degree above `n` dropped; `None` when the constant term is
    /// zero.
    pub fn inv_unit_trunc(&self, n: usize) -> Option<Self> {
        let c0 = self.coeff(0);
        if RingScalar::is_zero(&c0) {
            return None;
        }
        let c0i = c0.inv()?;
        let mut out: Vec<F> = Vec::with_capacity(n + 1);
        out.push(c0i.clone());
        for k in 1..=n {
            let mut acc = self.proto.clone();
            for i in 1..=k {
                let ci = self.coeff(i);
                if RingScalar::is_zero(&ci) {
                    continue;
                }
                acc = acc + ci * out[k - i].clone();
            }
            out.push(-(c0i.clone() * acc));
        }
        Some(TPoly::new(self.proto.clone(), out))
    }

    /// Exact division in the local ring at `t = 0`, truncated above degree
    /// `n`: when `ord(self) >= ord(rhs)` the quotient `q` satisfies
    /// `self = q * rhs` up to terms of degree above `n`. `None` when the
    /// orders make the division leave the local ring (or `rhs` is zero).
    pub fn div_local_trunc(&self, rhs: &Self, n: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(TPoly::zero(self.proto.clone()));
        }
        let (po, punit) = match rhs.ord() {
            Some(o) => (o, TPoly::new(self.proto.clone(), rhs.coeffs[o..].to_vec())),
            None => return None,
        };
        let so = self.ord().expect("nonzero checked above");
        if so < po {
            return None;
        }
        let sunit = TPoly::new(self.proto.clone(), self.coeffs[so..].to_vec());
        let inv = punit.inv_unit_trunc(n)?;
        Some((&sunit * &inv).truncate(n).mul_t_pow(so - po).truncate(n))
    }
}

impl<F: FieldScalar> PartialEq for TPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: FieldScalar> std::ops::Add for &TPoly<F> {
    type Output = TPoly<F>;
    fn add(self, rhs: &TPoly<F>) -> TPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        TPoly::new(self.proto.clone(), coeffs)
    }
}

impl<F: FieldScalar> std::ops::Sub for &TPoly<F> {
    type Output = TPoly<F>;
    fn sub(self, rhs: &TPoly<F>) -> TPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        TPoly::new(self.proto.clone(), coeffs)
    }
}

impl<F: FieldScalar> std::ops::Mul for &TPoly<F> {
    type Output = TPoly<F>;
    fn mul(self, rhs: &TPoly<F>) -> TPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero(self.proto.clone());
        }
        let mut coeffs =
            vec![self.proto.clone(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        TPoly::new(self.proto.clone(), coeffs)
    }
}

impl<F: FieldScalar> std::ops::Neg for &TPoly<F> {
    type Output = TPoly<F>;
    fn neg(self) -> TPoly<F> {
        TPoly::new(self.proto.clone(), self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<F: FieldScalar> std::ops::Add for TPoly<F> {
    type Output = TPoly<F>;
    fn add(self, rhs: TPoly<F>) -> TPoly<F> {
        &self + &rhs
    }
}
impl<F: FieldScalar> std::ops::Sub for TPoly<F> {
    type Output = TPoly<F>;
    fn sub(self, rhs: TPoly<F>) -> TPoly<F> {
        &self - &rhs
    }
}
impl<F: FieldScalar> std::ops::Mul for TPoly<F> {
    type Output = TPoly<F>;
    fn mul(self, rhs: TPoly<F>) -> TPoly<F> {
        &self * &rhs
    }
}
impl<F: FieldScalar> std::ops::Neg for TPoly<F> {
    type Output = TPoly<F>;
    fn neg(self) -> TPoly<F> {
        -&self
    }
}

impl<F: FieldScalar> RingScalar for TPoly<F> {
    fn zero_like(&self) -> Self {
        TPoly::zero(self.proto.clone())
    }
    fn one_like(&self) -> Self {
        TPoly::constant(self.proto.one_like())
    }
    fn is_zero(&self) -> bool {
        TPoly::is_zero(self)
    }
}

impl<F: FieldScalar + std::fmt::Display> std::fmt::Display for TPoly<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let (negative, body) = if cs.contains(' ') {
                (false, format!("({cs})"))
            } else if let Some(rest) = cs.strip_prefix('-') {
                (true, rest.to_string())
            } else {
                (false, cs)
            };
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            match i {
                0 => write!(f, "{body}")?,
                1 if body == "1" => write!(f, "t")?,
                1 => write!(f, "{body}*t")?,
                _ if body == "1" => write!(f, "t^{i}")?,
                _ => write!(f, "{body}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// The concrete instantiation used by curve pullbacks: coefficients are
/// rational functions in the parameters.
pub type CurvePoly = TPoly<RatFun>;

/// Reads a polynomial that involves only `t` and parameters into a `TPoly`
/// with parameter-only coefficients.
pub fn tpoly_from_poly(p: &Polynomial) -> Result<CurvePoly> {
    if !p.is_curve_ring() {
        return Err(Error::NotCurvePolynomial);
    }
    let reg = p.registry();
    let t = reg.curve_slot();
    let proto = RatFun::zero(reg);
    let deg = p.degree_in(t) as usize;
    let mut parts = vec![Polynomial::zero(reg); deg + 1];
    for (m, c) in p.terms() {
        let e = m.deg_in(t) as usize;
        let mut stripped = m.clone();
        stripped.0[t] = 0;
        parts[e].add_term(stripped, c.clone());
    }
    Ok(TPoly::new(proto, parts.into_iter().map(RatFun::from_poly).collect()))
}

/// Truncated series expansion of a rational function of `t` and parameters.
///
/// Requires the denominator not to vanish at `t = 0` (as a rational function
/// of the parameters). Returns the jet of order `n`: all terms through `t^n`.
pub fn jet_truncate(f: &RatFun, n: usize) -> Result<CurvePoly> {
    let num = tpoly_from_poly(f.numer())?;
    let den = tpoly_from_poly(f.denom())?;
    let d0 = den.coeff(0);
    if RingScalar::is_zero(&d0) {
        return Err(Error::DenominatorVanishesAtZero);
    }
    let inv_d0 = d0.inv().unwrap();
    // series inverse of den up to t^n
    let mut inv = vec![inv_d0.clone()];
    for k in 1..=n {
        let mut acc = den.proto().clone();
        for j in 1..=k {
            acc = acc + den.coeff(j) * inv[k - j].clone();
        }
        inv.push(-(acc * inv_d0.clone()));
    }
    let inv = TPoly::new(den.proto().clone(), inv);
    Ok((&num * &inv).truncate(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::vars::VarRegistry;
    use crate::Rat;
    use std::sync::Arc;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &["a", "b"]).unwrap()
    }

    fn rat(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn tp(coeffs: &[i64]) -> TPoly<Rat> {
        TPoly::new(Rat::from_integer(0.into()), coeffs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn basic_arithmetic_and_orders() {
        let a = tp(&[0, 1, 2]); // t + 2 t^2
        let b = tp(&[1, 1]); // 1 + t
        assert_eq!(&a * &b, tp(&[0, 1, 3, 2]));
        assert_eq!(a.ord(), Some(1));
        assert_eq!(b.ord(), Some(0));
        assert_eq!(TPoly::<Rat>::zero(rat(0)).ord(), None);
        assert_eq!(a.degree(), Some(2));
        let (o, unit) = a.split_local();
        assert_eq!(o, 1);
        assert_eq!(unit, tp(&[1, 2]));
    }

    #[test]
    fn divmod_and_gcd() {
        let a = tp(&[-1, 0, 1]); // t^2 - 1
        let b = tp(&[1, 1]); // t + 1
        let (q, r) = a.divmod(&b);
        assert_eq!(q, tp(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&b), b.monic());
        let c = tp(&[2, 2]); // 2 t + 2
        assert_eq!(a.gcd(&c), tp(&[1, 1]));
    }

    #[test]
    fn jets_match_long_division() {
        let r = reg();
        // 1/(1 - t), order 3 -> 1 + t + t^2 + t^3
        let f = RatFun::new(
            parse_polynomial(&r, "1").unwrap(),
            parse_polynomial(&r, "1 - t").unwrap(),
        )
        .unwrap();
        let jet = jet_truncate(&f, 3).unwrap();
        let expected = TPoly::new(
            RatFun::zero(&r),
            (0..4).map(|_| RatFun::one(&r)).collect(),
        );
        assert_eq!(jet, expected);

        // t^2/(1 + t), order 2 -> t^2
        let g = RatFun::new(
            parse_polynomial(&r, "t^2").unwrap(),
            parse_polynomial(&r, "1 + t").unwrap(),
        )
        .unwrap();
        let jet2 = jet_truncate(&g, 2).unwrap();
        assert_eq!(jet2, TPoly::monomial(RatFun::one(&r), 2));

        // (a*t)/a, order 1 -> t (parameter cancellation)
        let h = RatFun::new(
            parse_polynomial(&r, "a*t").unwrap(),
            parse_polynomial(&r, "a").unwrap(),
        )
        .unwrap();
        assert_eq!(jet_truncate(&h, 1).unwrap(), TPoly::monomial(RatFun::one(&r), 1));

        // pole at t = 0 is rejected
        let bad = RatFun::new(
            parse_polynomial(&r, "1").unwrap(),
            parse_polynomial(&r, "t").unwrap(),
        )
        .unwrap();
        assert!(matches!(jet_truncate(&bad, 2), Err(Error::DenominatorVanishesAtZero)));

        // space variables are not part of the curve subring
        let off = RatFun::from_poly(parse_polynomial(&r, "x + t").unwrap());
        assert!(matches!(jet_truncate(&off, 2), Err(Error::NotCurvePolynomial)));
    }

    #[test]
    fn jet_is_multiplicative_modulo_truncation() {
        let r = reg();
        let f = RatFun::new(
            parse_polynomial(&r, "1 + a*t").unwrap(),
            parse_polynomial(&r, "1 - t").unwrap(),
        )
        .unwrap();
        let g = RatFun::new(
            parse_polynomial(&r, "t").unwrap(),
            parse_polynomial(&r, "1 + b*t^2").unwrap(),
        )
        .unwrap();
        let n = 6;
        let lhs = jet_truncate(&(&f * &g), n).unwrap();
        let rhs = (&jet_truncate(&f, n).unwrap() * &jet_truncate(&g, n).unwrap()).truncate(n);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display() {
        assert_eq!(tp(&[1, -2, 1]).to_string(), "t^2 - 2*t + 1");
        assert_eq!(tp(&[0, -1]).to_string(), "-t");
        assert_eq!(tp(&[0, 0, 3]).to_string(), "3*t^2");
        assert_eq!(tp(&[]).to_string(), "0");
        assert_eq!(tp(&[0, 1]).to_string(), "t");
    }
}
