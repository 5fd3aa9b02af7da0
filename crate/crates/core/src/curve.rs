//! Curves through the origin of the product space, and pullbacks along them.
//!
//! A curve substitutes every space and primed variable by a polynomial in
//! `t` (coefficients may involve the symbolic parameters) vanishing at
//! `t = 0`. Pulling back polynomials, vectors, and generator matrices along
//! a curve turns closure questions into order-of-vanishing questions in one
//! variable, which is where all the certified-out witnesses come from.
//!
//! "For every analytic curve" is not finitely testable; the engines sample
//! a deterministic family (a linear diagonal family with symbolic
//! coefficients when parameters are available, plus monomial-support curves
//! with random rational coefficients) and treat failures as certificates,
//! never treating survival as proof.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::parse::parse_polynomial;
use crate::poly::Polynomial;
use crate::tpoly::{tpoly_from_poly, CurvePoly};
use crate::vars::VarRegistry;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    reg: Arc<VarRegistry>,
    /// substitution per space/primed slot, in slot order
    subs: Vec<Polynomial>,
}

impl Curve {
    /// Builds a curve from substitutions for all space and primed slots
    /// (indexed `0..2n`). Each must involve only `t` and parameters and
    /// vanish at `t = 0`.
    pub fn new(reg: &Arc<VarRegistry>, subs: Vec<Polynomial>) -> Result<Self> {
        let n2 = 2 * reg.dim();
        if subs.len() != n2 {
            return Err(Error::CurveIncomplete);
        }
        for (slot, s) in subs.iter().enumerate() {
            if !s.registry().same(reg) {
                return Err(Error::RegistryMismatch);
            }
            if !s.is_curve_ring() {
                return Err(Error::NotCurvePolynomial);
            }
            let t_slot = reg.curve_slot();
            let centered = s.terms().all(|(m, _)| m.deg_in(t_slot) > 0);
            if !centered {
                return Err(Error::CurveNotCentered { var: reg.name_of(slot).to_string() });
            }
        }
        Ok(Curve { reg: reg.clone(), subs })
    }

    /// Builds a curve from a name-keyed map (missing variables error).
    pub fn from_named(reg: &Arc<VarRegistry>, map: &BTreeMap<String, Polynomial>) -> Result<Self> {
        let mut subs = Vec::with_capacity(2 * reg.dim());
        for slot in 0..2 * reg.dim() {
            let name = reg.name_of(slot);
            let sub = map.get(name).ok_or(Error::CurveIncomplete)?;
            subs.push(sub.clone());
        }
        if map.len() != 2 * reg.dim() {
            return Err(Error::InvalidArgument(
                "curve substitutions mention variables outside the registry".into(),
            ));
        }
        Curve::new(reg, subs)
    }

    /// Reads the JSON curve format:
    /// `{"subs": {"x": "t", "x'": "t", ...}, "params": ["a"]}`.
    pub fn from_json(reg: &Arc<VarRegistry>, value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("curve file must be a JSON object".into()))?;
        if let Some(params) = obj.get("params") {
            let list = params.as_array().ok_or_else(|| {
                Error::InvalidArgument("curve \"params\" must be an array of names".into())
            })?;
            for p in list {
                let name = p.as_str().ok_or_else(|| {
                    Error::InvalidArgument("curve \"params\" entries must be strings".into())
                })?;
                let slot = reg
                    .slot_of(name)
                    .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
                if !matches!(reg.kind_of(slot), crate::vars::VarKind::Param(_)) {
                    return Err(Error::InvalidArgument(format!(
                        "curve parameter {name:?} is not a parameter of the module"
                    )));
                }
            }
        }
        let subs = obj
            .get("subs")
            .and_then(|s| s.as_object())
            .ok_or_else(|| Error::InvalidArgument("curve file needs a \"subs\" object".into()))?;
        let mut map = BTreeMap::new();
        for (name, expr) in subs {
            let src = expr.as_str().ok_or_else(|| {
                Error::InvalidArgument(format!("substitution for {name:?} must be a string"))
            })?;
            map.insert(name.clone(), parse_polynomial(reg, src)?);
        }
        Curve::from_named(reg, &map)
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// The substitution for a space or primed slot.
    pub fn sub(&self, slot: usize) -> &Polynomial {
        &self.subs[slot]
    }

    pub fn is_zero_curve(&self) -> bool {
        self.subs.iter().all(|s| s.is_zero())
    }

    /// A canonical, order-stable serialization (used to pick deterministic
    /// witnesses and to print them).
    pub fn canonical_string(&self) -> String {
        let parts: Vec<String> = (0..self.subs.len())
            .map(|slot| format!("{} -> {}", self.reg.name_of(slot), self.subs[slot]))
            .collect();
        parts.join("; ")
    }

    /// Entry-wise substitution. The input must not already involve `t`.
    pub fn pullback_poly(&self, p: &Polynomial) -> Result<Polynomial> {
        if !p.registry().same(&self.reg) {
            return Err(Error::RegistryMismatch);
        }
        if p.involves(self.reg.curve_slot()) {
            return Err(Error::InvalidArgument(
                "cannot pull back a polynomial that already involves t".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for slot in p.occurring_slots() {
            if slot < 2 * self.reg.dim() {
                map.insert(slot, self.subs[slot].clone());
            } else {
                map.insert(slot, Polynomial::var(&self.reg, slot));
            }
        }
        p.substitute_poly(&map)
    }

    pub fn pullback_vector(&self, v: &[Polynomial]) -> Result<Vec<Polynomial>> {
        v.iter().map(|e| self.pullback_poly(e)).collect()
    }

    pub fn pullback_mat(&self, m: &Mat<Polynomial>) -> Result<Mat<Polynomial>> {
        let mut rows = Vec::with_capacity(m.rows());
        for row in m.iter_rows() {
            rows.push(row.iter().map(|e| self.pullback_poly(e)).collect::<Result<Vec<_>>>()?);
        }
        Mat::from_rows(rows)
    }

    /// Pullback straight into t-polynomials with parameter-fraction
    /// coefficients.
    pub fn pullback_vector_tpoly(&self, v: &[Polynomial]) -> Result<Vec<CurvePoly>> {
        self.pullback_vector(v)?.iter().map(tpoly_from_poly).collect()
    }

    pub fn pullback_mat_tpoly(&self, m: &Mat<Polynomial>) -> Result<Mat<CurvePoly>> {
        let pulled = self.pullback_mat(m)?;
        let mut rows = Vec::with_capacity(pulled.rows());
        for row in pulled.iter_rows() {
            rows.push(row.iter().map(tpoly_from_poly).collect::<Result<Vec<_>>>()?);
        }
        Mat::from_rows(rows)
    }

    /// Order of vanishing of `p` along the curve (`None` for identically
    /// zero pullback).
    pub fn ord_of(&self, p: &Polynomial) -> Result<Option<usize>> {
        Ok(tpoly_from_poly(&self.pullback_poly(p)?)?.ord())
    }
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

/// Configuration of the finite curve family the closure engines sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    /// t-degree cap for monomial-support curves.
    pub max_degree: usize,
    /// cap on the number of monomial-support curves.
    pub count: usize,
    /// include the linear diagonal family (the strongest known witnesses).
    pub include_diagonal: bool,
    pub seed: u64,
    /// extra user-supplied curves, tested first.
    pub user_curves: Vec<Curve>,
}

impl Default for CurveFamily {
    fn default() -> Self {
        CurveFamily {
            max_degree: 3,
            count: 64,
            include_diagonal: true,
            seed: 0,
            user_curves: Vec::new(),
        }
    }
}

impl CurveFamily {
    /// A smaller family for use inside inner loops.
    pub fn quick(seed: u64) -> Self {
        CurveFamily { max_degree: 2, count: 16, include_diagonal: true, seed, user_curves: Vec::new() }
    }

    /// Materializes the deterministic curve list for a registry.
    pub fn realize(&self, reg: &Arc<VarRegistry>) -> Vec<Curve> {
        let mut curves = self.user_curves.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x43_55_52_56);
        if self.include_diagonal {
            curves.extend(diagonal_curves(reg, &mut rng));
        }
        curves.extend(monomial_curves(reg, self.max_degree, self.count, &mut rng));
        curves
    }
}

/// The linear diagonal family: first coordinate `t` in both copies, the
/// others `alpha_i t` / `beta_i t`. Symbolic parameters are used when the
/// registry provides enough of them (first half as alphas, second half as
/// betas); otherwise random rational slopes, which still witness failures
/// soundly because the curve is stored with its concrete coefficients.
pub fn diagonal_curves(reg: &Arc<VarRegistry>, rng: &mut impl Rng) -> Vec<Curve> {
    let n = reg.dim();
    let t = Polynomial::var(reg, reg.curve_slot());
    if n == 1 {
        // both copies t, and a split version with distinct speeds
        let same = Curve::new(reg, vec![t.clone(), t.clone()]).expect("valid");
        let split = Curve::new(reg, vec![t.clone(), t.pow(2)]).expect("valid");
        return vec![same, split];
    }
    let needed = 2 * (n - 1);
    let mut slopes = Vec::with_capacity(needed);
    if reg.n_params() >= needed {
        for i in 0..needed {
            slopes.push(Polynomial::var(reg, reg.param_slot(i)));
        }
    } else {
        let mut used = std::collections::BTreeSet::new();
        while slopes.len() < needed {
            let v: i64 = rng.gen_range(2..=40);
            if used.insert(v) {
                slopes.push(Polynomial::from_int(reg, v));
            }
        }
    }
    let mut subs = Vec::with_capacity(2 * n);
    subs.push(t.clone());
    for s in &slopes[..n - 1] {
        subs.push(s * &t);
    }
    subs.push(t.clone());
    for s in &slopes[n - 1..] {
        subs.push(s * &t);
    }
    vec![Curve::new(reg, subs).expect("valid diagonal curve")]
}

/// Monomial-support curves: every space and primed variable maps to
/// `gamma * t^d` with `1 <= d <= max_degree` and a random nonzero rational
/// slope. Exponent patterns are enumerated lexicographically; when there
/// are more than `count`, a seeded sample is drawn (sorted back into
/// enumeration order, so the list is deterministic).
pub fn monomial_curves(
    reg: &Arc<VarRegistry>,
    max_degree: usize,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<Curve> {
    let n2 = 2 * reg.dim();
    let max_degree = max_degree.max(1);
    let total = (max_degree as u128).pow(n2 as u32);
    let picks: Vec<u128> = if total <= count as u128 {
        (0..total).collect()
    } else {
        // sample distinct pattern indices
        let mut set = std::collections::BTreeSet::new();
        while set.len() < count {
            let idx = rng.gen_range(0..total);
            set.insert(idx);
        }
        set.into_iter().collect()
    };
    let t = Polynomial::var(reg, reg.curve_slot());
    let mut out = Vec::with_capacity(picks.len());
    for idx in picks {
        // decode mixed-radix: slot s gets degree 1 + digit
        let mut rem = idx;
        let mut subs = Vec::with_capacity(n2);
        for _ in 0..n2 {
            let d = 1 + (rem % max_degree as u128) as u32;
            rem /= max_degree as u128;
            let mut gamma: i64 = rng.gen_range(-9..=9);
            if gamma == 0 {
                gamma = 1;
            }
            subs.push(&Polynomial::from_int(reg, gamma) * &t.pow(d));
        }
        out.push(Curve::new(reg, subs).expect("valid monomial curve"));
    }
    out
}

/// Minimum vanishing order of an ideal's generators along a curve
/// (`None` when every generator pulls back to zero).
pub fn ideal_min_ord(curve: &Curve, gens: &[Polynomial]) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for g in gens {
        if let Some(o) = curve.ord_of(g)? {
            best = Some(best.map_or(o, |b| b.min(o)));
        }
    }
    Ok(best)
}
