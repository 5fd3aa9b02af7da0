//! Multivariate polynomial gcd over the rationals.
//!
//! Classic primitive-PRS scheme: strip rational content, pick the highest
//! occurring slot as the main variable, recurse on coefficient contents and
//! run a pseudo-remainder sequence on the primitive parts, taking primitive
//! parts each round to keep growth down. Plenty fast at the sizes this crate
//! works with, and exact.

use crate::poly::Polynomial;

/// Normalized gcd (integer-primitive, positive leading coefficient).
/// `gcd(0, 0) = 0`; gcd with a single zero argument is the other argument
/// normalized.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.normalized_assoc();
    }
    if b.is_zero() {
        return a.normalized_assoc();
    }
    gcd_rec(&a.normalized_assoc(), &b.normalized_assoc())
}

fn gcd_rec(a: &Polynomial, b: &Polynomial) -> Polynomial {
    debug_assert!(!a.is_zero() && !b.is_zero());
    let main = match a.occurring_slots().into_iter().chain(b.occurring_slots()).max() {
        None => return Polynomial::one(a.registry()), // both nonzero constants
        Some(s) => s,
    };
    let ua = to_univar(a, main);
    let ub = to_univar(b, main);
    let cont_a = list_content(&ua);
    let cont_b = list_content(&ub);
    let g_cont = poly_gcd(&cont_a, &cont_b);
    let pa = divide_out(&ua, &cont_a);
    let pb = divide_out(&ub, &cont_b);

    let (mut f1, mut f2) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    loop {
        let r = prem(&f1, &f2, main);
        if r.is_empty() {
            let pp = divide_out(&f2, &list_content(&f2));
            let h = from_univar(&pp, main, a);
            return (&g_cont * &h).normalized_assoc();
        }
        f1 = f2;
        f2 = divide_out(&r, &list_content(&r));
    }
}

/// Coefficients by degree in `slot` (index = degree); the coefficients have
/// the `slot` exponent cleared. Trailing entry is nonzero.
fn to_univar(p: &Polynomial, slot: usize) -> Vec<Polynomial> {
    let deg = p.degree_in(slot) as usize;
    let mut out = vec![Polynomial::zero(p.registry()); deg + 1];
    for (m, c) in p.terms() {
        let e = m.deg_in(slot) as usize;
        let mut stripped = m.clone();
        stripped.0[slot] = 0;
        out[e].add_term(stripped, c.clone());
    }
    out
}

fn from_univar(coeffs: &[Polynomial], slot: usize, proto: &Polynomial) -> Polynomial {
    let reg = proto.registry();
    let x = Polynomial::var(reg, slot);
    let mut acc = Polynomial::zero(reg);
    for (e, c) in coeffs.iter().enumerate() {
        acc = &acc + &(c * &x.pow(e as u32));
    }
    acc
}

fn list_content(coeffs: &[Polynomial]) -> Polynomial {
    let mut c = Polynomial::zero(coeffs[0].registry());
    for q in coeffs {
        if !q.is_zero() {
            c = poly_gcd(&c, q);
        }
        if c.is_one() {
            break;
        }
    }
    c
}

fn divide_out(coeffs: &[Polynomial], divisor: &Polynomial) -> Vec<Polynomial> {
    coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                c.clone()
            } else {
                c.div_exact(divisor).expect("content must divide every coefficient")
            }
        })
        .collect()
}

fn trim(mut v: Vec<Polynomial>) -> Vec<Polynomial> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Pseudo-remainder of `a` by `b` viewed as univariate lists in `slot`.
/// Each reduction step multiplies through by the leading coefficient of `b`,
/// which is harmless inside a primitive PRS.
fn prem(a: &[Polynomial], b: &[Polynomial], _slot: usize) -> Vec<Polynomial> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = trim(a.to_vec());
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for item in r.iter_mut() {
            *item = &*item * lb;
        }
        for j in 0..=db {
            r[dr - db + j] = &r[dr - db + j] - &(&b[j] * &lr);
        }
        debug_assert!(r[dr].is_zero());
        r = trim(r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::vars::VarRegistry;
    use std::sync::Arc;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &["a", "b"]).unwrap()
    }

    fn p(src: &str) -> Polynomial {
        parse_polynomial(&reg(), src).unwrap()
    }

    #[test]
    fn univariate_cases() {
        assert_eq!(poly_gcd(&p("x^2 - 1"), &p("x^2 - 2*x + 1")), p("x - 1"));
        assert_eq!(poly_gcd(&p("x^3"), &p("x^2")), p("x^2"));
        assert_eq!(poly_gcd(&p("x + 1"), &p("x - 1")), p("1"));
        assert_eq!(poly_gcd(&p("6*x"), &p("4*x^2")), p("x"));
        assert_eq!(poly_gcd(&p("0"), &p("-2*x")), p("x"));
        assert_eq!(poly_gcd(&p("0"), &p("0")), p("0"));
    }

    #[test]
    fn multivariate_cases() {
        assert_eq!(
            poly_gcd(&p("(x + y)*(x - y)"), &p("(x + y)^2")),
            p("x + y")
        );
        assert_eq!(
            poly_gcd(&p("x^2*y - y^3"), &p("x^2 + 2*x*y + y^2")),
            p("x + y")
        );
        assert_eq!(poly_gcd(&p("x*y"), &p("x + y")), p("1"));
        // mixed parameter/space factors
        assert_eq!(
            poly_gcd(&p("(a - b)*x*t"), &p("(a - b)*y")),
            p("a - b")
        );
    }

    #[test]
    fn sign_and_content_normalization() {
        assert_eq!(poly_gcd(&p("-2*x - 2*y"), &p("-4*x - 4*y")), p("x + y"));
        assert_eq!(poly_gcd(&p("1/2*x"), &p("1/3*x")), p("x"));
    }

    #[test]
    fn product_property_samples() {
        // gcd(c*u, c*v) == c (up to normalization) when gcd(u, v) == 1
        for (u, v, c) in [
            ("x + 1", "y - 2", "x*y + 3"),
            ("x^2 + y", "x - y", "x + y + 1"),
            ("a*x + b", "t + 1", "x*y - a"),
        ] {
            let (u, v, c) = (p(u), p(v), p(c));
            let g = poly_gcd(&(&u * &c), &(&v * &c));
            assert_eq!(g, c.normalized_assoc(), "failed for c = {c}");
        }
    }
}
