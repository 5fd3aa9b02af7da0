//! Three-valued integral closure tests with replayable evidence.
//!
//! Every test returns a [`Verdict`]: membership in the closure certified by
//! an explicit algebraic identity, non-membership certified by a concrete
//! obstruction (a rank jump, a graded gap, or a curve along which the
//! vanishing order is too small), or `Unknown` with the list of strategies
//! exhausted. Certificates and witnesses carry enough data to be replayed
//! independently of the search that found them.
//!
//! Pipelines:
//! - ideals: exact membership, then Newton-polyhedron analysis when
//!   everything is monomial (exact in both directions), then a family of
//!   test curves;
//! - modules: generic rank comparison, exact membership, reduction to
//!   ideals of maximal minors, then curve tests decided by Smith reduction
//!   of the pulled-back matrix.

use crate::curve::{ideal_min_ord, Curve, CurveFamily};
use crate::error::{Error, Result};
use crate::genmodule::GenModule;
use crate::ideal::Ideal;
use crate::mat::{k_subsets, KIndex};
use crate::membership;
use crate::newton;
use crate::poly::Polynomial;
use crate::snf;
use crate::vars::{VarKind, VarRegistry};
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of a membership or closure test.
#[derive(Debug, Clone)]
pub enum Verdict {
    CertifiedIn(InCertificate),
    CertifiedOut(OutWitness),
    Unknown(UnknownReport),
}

impl Verdict {
    pub fn is_in(&self) -> bool {
        matches!(self, Verdict::CertifiedIn(_))
    }
    pub fn is_out(&self) -> bool {
        matches!(self, Verdict::CertifiedOut(_))
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    /// Short human-readable label with the top-level evidence kind.
    pub fn describe(&self) -> String {
        match self {
            Verdict::CertifiedIn(c) => format!("certified in ({})", c.kind()),
            Verdict::CertifiedOut(w) => format!("certified out ({})", w.kind()),
            Verdict::Unknown(u) => {
                if u.tried.is_empty() {
                    "unknown".to_string()
                } else {
                    format!("unknown (tried: {})", u.tried.join("; "))
                }
            }
        }
    }
}

/// Positive evidence: how the element sits inside (the closure of) the
/// ideal or module.
#[derive(Debug, Clone)]
pub enum InCertificate {
    /// the target is zero
    ZeroTarget,
    /// exact combination `target = sum cofactor_j * generator_j`
    Combination { cofactors: Vec<(usize, Polynomial)> },
    /// local-ring combination `unit * target = sum cofactor_j * generator_j`
    /// with `unit` nonvanishing at the origin
    UnitCombination {
        unit: Polynomial,
        cofactors: Vec<(usize, Polynomial)>,
    },
    /// per term of the target: convex multipliers placing its exponent in
    /// the Newton region of the (monomial) generators
    NewtonHull {
        per_term: Vec<(Polynomial, Vec<(usize, Rat)>)>,
    },
    /// module closure via maximal minors: every minor involving the target
    /// column lies in the closure of the base minor ideal
    MinorsReduction {
        k: usize,
        children: Vec<(Polynomial, InCertificate)>,
    },
    /// inherited from a containing/contained test, with the reason
    Bracketed {
        reason: String,
        inner: Box<InCertificate>,
    },
}

impl InCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            InCertificate::ZeroTarget => "zero target",
            InCertificate::Combination { .. } => "combination",
            InCertificate::UnitCombination { .. } => "unit combination",
            InCertificate::NewtonHull { .. } => "newton hull",
            InCertificate::MinorsReduction { .. } => "minors reduction",
            InCertificate::Bracketed { .. } => "bracketed",
        }
    }
}

/// Negative evidence: a concrete obstruction to membership in the closure.
#[derive(Debug, Clone)]
pub enum OutWitness {
    /// the ideal/module is zero and the target is not
    ZeroSpan,
    /// adjoining the target raises the generic rank
    RankJump { base: usize, augmented: usize },
    /// graded refutation: the degree-d piece admits no combination
    /// (valid for plain membership, not for closure)
    HomogeneousGap { degree: usize },
    /// along this curve the target vanishes to lower order than every
    /// generator (`span_ord = None` means all generators vanish
    /// identically on the curve)
    CurveOrder {
        curve: Curve,
        target_ord: usize,
        span_ord: Option<usize>,
    },
    /// Smith reduction along this curve leaves an unreachable residual
    CurveResidual {
        curve: Curve,
        failing_row: usize,
        deficit: Option<usize>,
        residual: Vec<String>,
        genericity: Vec<Polynomial>,
        /// parameter values at which the failure was confirmed exactly
        specialization: Vec<(String, Rat)>,
    },
    /// a maximal minor involving the target column escapes the closure of
    /// the base minor ideal
    MinorsChild {
        generator: Polynomial,
        inner: Box<OutWitness>,
    },
    /// inherited from a containing/contained test, with the reason
    Bracketed {
        reason: String,
        inner: Box<OutWitness>,
    },
}

impl OutWitness {
    pub fn kind(&self) -> &'static str {
        match self {
            OutWitness::ZeroSpan => "zero span",
            OutWitness::RankJump { .. } => "rank jump",
            OutWitness::HomogeneousGap { .. } => "homogeneous gap",
            OutWitness::CurveOrder { .. } => "curve order",
            OutWitness::CurveResidual { .. } => "curve residual",
            OutWitness::MinorsChild { .. } => "minors child",
            OutWitness::Bracketed { .. } => "bracketed",
        }
    }
}

/// What was attempted before giving up.
#[derive(Debug, Clone, Default)]
pub struct UnknownReport {
    pub tried: Vec<String>,
}

impl UnknownReport {
    pub fn new(tried: Vec<String>) -> Self {
        UnknownReport { tried }
    }
    pub fn push(&mut self, s: impl Into<String>) {
        self.tried.push(s.into());
    }
}

/// Tuning knobs for the closure pipelines.
#[derive(Debug, Clone)]
pub struct ClosureOptions {
    /// cofactor degree bound for the membership stage
    pub degree_bound: Option<usize>,
    /// jet/greedy order cap for curve-local displays
    pub jet_order: usize,
    /// family of test curves
    pub curves: CurveFamily,
    /// maximal number of minors pushed through the ideal pipeline in the
    /// module test (0 disables the stage)
    pub minors_budget: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            degree_bound: None,
            jet_order: 12,
            curves: CurveFamily::default(),
            minors_budget: 64,
        }
    }
}

impl ClosureOptions {
    /// Smaller curve family and no minors stage, for bulk property
    /// testing where each child test would multiply the cost.
    pub fn quick(seed: u64) -> Self {
        ClosureOptions {
            degree_bound: Some(2),
            curves: CurveFamily::quick(seed),
            minors_budget: 0,
            ..ClosureOptions::default()
        }
    }
}

/// Is `p` in the integral closure of the ideal?
pub fn closure_test_ideal(p: &Polynomial, ideal: &Ideal, opts: &ClosureOptions) -> Result<Verdict> {
    let mut tried = Vec::new();

    // stage 1: exact membership
    match membership::ideal_membership(p, ideal, opts.degree_bound)? {
        v @ Verdict::CertifiedIn(_) => return Ok(v),
        Verdict::CertifiedOut(OutWitness::ZeroSpan) => {
            // closure of the zero ideal is zero
            return Ok(Verdict::CertifiedOut(OutWitness::ZeroSpan));
        }
        Verdict::CertifiedOut(_) => {
            // refutes plain membership only; the closure can still contain p
            tried.push("exact membership (not a plain member)".to_string());
        }
        Verdict::Unknown(u) => {
            tried.extend(u.tried.into_iter().map(|s| format!("membership: {s}")));
        }
    }

    // stage 2: monomial Newton region (exact in both directions)
    if let Some(verdict) = monomial_stage(p, ideal)? {
        return Ok(verdict);
    }
    tried.push("newton region (input not monomial or witness unconfirmed)".to_string());

    // stage 3: curve family; the first obstruction in family order wins
    // (user curves, then diagonal, then monomial — the list is
    // deterministic for a fixed seed)
    let reg = p.registry();
    let curves = opts.curves.realize(reg);
    for curve in &curves {
        let Some(t_ord) = curve.ord_of(p)? else {
            continue; // p vanishes on the curve: no obstruction here
        };
        let span_ord = ideal_min_ord(curve, ideal.gens())?;
        let beaten = match span_ord {
            Some(s) => t_ord < s,
            None => true, // every generator vanishes identically
        };
        if beaten {
            return Ok(Verdict::CertifiedOut(OutWitness::CurveOrder {
                curve: curve.clone(),
                target_ord: t_ord,
                span_ord,
            }));
        }
    }
    tried.push(format!("curve family ({} curves, no obstruction)", curves.len()));

    Ok(Verdict::Unknown(UnknownReport::new(tried)))
}

/// Is the vector `h` in the integral closure of the column module of `m`?
pub fn closure_test_module(
    h: &[Polynomial],
    m: &GenModule,
    opts: &ClosureOptions,
) -> Result<Verdict> {
    if h.len() != m.p() {
        return Err(Error::DimensionMismatch {
            expected: m.p(),
            found: h.len(),
        });
    }
    let mut tried = Vec::new();

    // stage 0: adjoining h must not raise the generic rank
    let base_rank = m.generic_rank();
    let aug = m.augment(h)?;
    let aug_rank = aug.generic_rank();
    if aug_rank > base_rank {
        return Ok(Verdict::CertifiedOut(OutWitness::RankJump {
            base: base_rank,
            augmented: aug_rank,
        }));
    }

    // stage 1: exact membership
    match membership::module_membership(h, m, opts.degree_bound)? {
        v @ Verdict::CertifiedIn(_) => return Ok(v),
        Verdict::CertifiedOut(OutWitness::ZeroSpan) => {
            return Ok(Verdict::CertifiedOut(OutWitness::ZeroSpan));
        }
        Verdict::CertifiedOut(_) => {
            tried.push("exact membership (not a plain member)".to_string());
        }
        Verdict::Unknown(u) => {
            tried.extend(u.tried.into_iter().map(|s| format!("membership: {s}")));
        }
    }

    // stage 2: reduction to maximal minors
    if opts.minors_budget > 0 && base_rank > 0 {
        match minors_stage(m, &aug, base_rank, opts)? {
            MinorsOutcome::Decided(v) => return Ok(v),
            MinorsOutcome::Open(note) => tried.push(note),
        }
    }

    // stage 3: curve tests via Smith reduction; the first obstruction in
    // family order wins (user curves, then diagonal, then monomial)
    let reg = m.registry();
    let curves = opts.curves.realize(reg);
    for curve in &curves {
        if let Some(w) = curve_module_obstruction(h, m, curve, opts)? {
            return Ok(Verdict::CertifiedOut(w));
        }
    }
    tried.push(format!("curve family ({} curves, no obstruction)", curves.len()));

    Ok(Verdict::Unknown(UnknownReport::new(tried)))
}

// ---------------------------------------------------------------------------
// monomial stage

/// When the ideal is monomial and the target's terms are monomials, the
/// closure is the monomial ideal of lattice points in the Newton region, so
/// the test is exact: In with hull multipliers, or Out with a monomial
/// curve built from separating weights.
fn monomial_stage(p: &Polynomial, ideal: &Ideal) -> Result<Option<Verdict>> {
    if p.is_zero() || ideal.gens().is_empty() {
        return Ok(None); // handled upstream
    }
    if !ideal.gens().iter().all(|g| g.n_terms() == 1) {
        return Ok(None);
    }
    let reg = p.registry();
    // stick to the space/primed block: separating weights are realized as
    // monomial curves, which cannot touch parameter slots
    if !p.is_base_ring() || !ideal.gens().iter().all(|g| g.is_base_ring()) {
        return Ok(None);
    }
    let gen_exps: Vec<Vec<u32>> = ideal
        .gens()
        .iter()
        .map(|g| {
            let m = newton::monomial_exponent(g)?;
            Ok(m.0.iter().map(|&e| e as u32).collect())
        })
        .collect::<Result<_>>()?;

    let mut per_term: Vec<(Polynomial, Vec<(usize, Rat)>)> = Vec::new();
    let mut out_term: Option<Vec<u32>> = None;
    for (mono, coef) in p.terms() {
        let v: Vec<u32> = mono.0.iter().map(|&e| e as u32).collect();
        match newton::hull_membership(&v, &gen_exps) {
            Some(lambdas) => {
                let support: Vec<(usize, Rat)> = lambdas
                    .into_iter()
                    .enumerate()
                    .filter(|(_, l)| !l.is_zero())
                    .collect();
                per_term.push((
                    Polynomial::monomial(reg, mono.clone(), coef.clone()),
                    support,
                ));
            }
            None => {
                out_term = Some(v);
                break;
            }
        }
    }
    let Some(v) = out_term else {
        return Ok(Some(Verdict::CertifiedIn(InCertificate::NewtonHull {
            per_term,
        })));
    };

    // Out: realize separating weights as a monomial curve and verify
    let Some(weights) = newton::separating_weights(&v, &gen_exps) else {
        return Ok(None); // numerical safety: fall through to curves
    };
    if let Some(w) = realize_separation(p, ideal, &weights)? {
        return Ok(Some(Verdict::CertifiedOut(w)));
    }
    Ok(None)
}

/// Turns nonnegative separating weights into a strictly positive exponent
/// vector whose monomial curve provably beats the ideal, verifying the
/// order inequality exactly (and retrying with perturbations if term
/// collisions on the target spoil a candidate).
fn realize_separation(
    p: &Polynomial,
    ideal: &Ideal,
    weights: &[BigInt],
) -> Result<Option<OutWitness>> {
    let reg = p.registry();
    let n_geo = 2 * reg.dim(); // space + primed slots need positive exponents
    let mut rng = ChaCha8Rng::seed_from_u64(0x4E57_544F);
    // scale must dominate any perturbation's effect on the separation gap
    let max_total: u64 = p
        .terms()
        .map(|(m, _)| m.total_degree() as u64)
        .chain(ideal.gens().iter().map(|g| g.total_degree() as u64))
        .max()
        .unwrap_or(1)
        .max(1);
    for attempt in 0..8u32 {
        let range = 4u64 << attempt;
        let scale = BigInt::from(2 * max_total * range + 1);
        let mut exps: Vec<u64> = Vec::with_capacity(n_geo);
        let mut ok = true;
        for slot in 0..n_geo {
            let base = if slot < weights.len() {
                (&weights[slot] * &scale).to_u64()
            } else {
                Some(0)
            };
            let Some(base) = base else {
                ok = false;
                break;
            };
            let jitter = rng.gen_range(1..=range);
            let e = base + jitter;
            if e > u16::MAX as u64 {
                ok = false;
                break;
            }
            exps.push(e);
        }
        if !ok {
            continue;
        }
        let t = Polynomial::var(reg, reg.curve_slot());
        let subs: Vec<Polynomial> = exps.iter().map(|&e| t.pow(e as u32)).collect();
        let curve = Curve::new(reg, subs)?;
        let Some(t_ord) = curve.ord_of(p)? else {
            continue;
        };
        let span_ord = ideal_min_ord(&curve, ideal.gens())?;
        let beaten = span_ord.map_or(true, |s| t_ord < s);
        if beaten {
            return Ok(Some(OutWitness::CurveOrder {
                curve,
                target_ord: t_ord,
                span_ord,
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// minors stage

enum MinorsOutcome {
    Decided(Verdict),
    Open(String),
}

/// Reduce `h in closure(M)` to ideal-closure tests: every maximal minor of
/// `[h | M]` that involves the `h` column must lie in the closure of the
/// maximal minor ideal of `M`. A certified escape refutes membership; full
/// success certifies it.
fn minors_stage(
    m: &GenModule,
    aug: &GenModule,
    k: usize,
    opts: &ClosureOptions,
) -> Result<MinorsOutcome> {
    let p = m.p();
    let r = m.n_cols();
    if k > p || k == 0 || k - 1 > r {
        return Ok(MinorsOutcome::Open("minors reduction (rank shape unusable)".into()));
    }
    let count = binomial(p, k).saturating_mul(binomial(r, k - 1));
    if count > opts.minors_budget {
        return Ok(MinorsOutcome::Open(format!(
            "minors reduction skipped ({count} minors over budget {})",
            opts.minors_budget
        )));
    }
    let base = m.minor_ideal(k)?;
    if base.is_zero() {
        return Ok(MinorsOutcome::Open("minors reduction (base minor ideal is zero)".into()));
    }
    let amat = aug.matrix();
    // child options without a minors stage of their own
    let child_opts = ClosureOptions {
        minors_budget: 0,
        ..opts.clone()
    };
    let mut children: Vec<(Polynomial, InCertificate)> = Vec::new();
    let mut any_unknown = false;
    for rows in k_subsets(p, k) {
        for tail in k_subsets(r, k - 1) {
            let mut cols = vec![0usize];
            cols.extend(tail.iter().map(|&j| j + 1));
            let idx = KIndex::new(rows.clone(), cols)?;
            let minor = amat.minor(&idx)?;
            if minor.is_zero() {
                continue;
            }
            match closure_test_ideal(&minor, &base, &child_opts)? {
                Verdict::CertifiedIn(c) => children.push((minor, c)),
                Verdict::CertifiedOut(w) => {
                    return Ok(MinorsOutcome::Decided(Verdict::CertifiedOut(
                        OutWitness::MinorsChild {
                            generator: minor,
                            inner: Box::new(w),
                        },
                    )));
                }
                Verdict::Unknown(_) => {
                    any_unknown = true;
                }
            }
        }
    }
    if any_unknown {
        return Ok(MinorsOutcome::Open(
            "minors reduction (some minors undecided)".into(),
        ));
    }
    Ok(MinorsOutcome::Decided(Verdict::CertifiedIn(
        InCertificate::MinorsReduction { k, children },
    )))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// curve stage for modules

/// Obstruction (if any) to `h in closure(M)` along one curve, decided by
/// Smith reduction over the local ring of the curve parameter. Symbolic
/// failures are confirmed at an exact parameter specialization before
/// being reported as witnesses.
fn curve_module_obstruction(
    h: &[Polynomial],
    m: &GenModule,
    curve: &Curve,
    opts: &ClosureOptions,
) -> Result<Option<OutWitness>> {
    let v = curve.pullback_vector_tpoly(h)?;
    if v.iter().all(|x| x.is_zero()) {
        return Ok(None);
    }
    let a = curve.pullback_mat_tpoly(m.matrix())?;
    let report = snf::curve_membership(&v, &a, opts.jet_order)?;
    if report.member {
        return Ok(None);
    }
    let reg = m.registry();
    // display residual from the greedy reduction
    let greedy = snf::greedy_reduce(&v, &a, opts.jet_order);
    let residual: Vec<String> = greedy.residual.iter().map(|x| x.to_string()).collect();
    let mut genericity = report.genericity.clone();
    for g in &greedy.genericity {
        if !genericity.contains(g) {
            genericity.push(g.clone());
        }
    }

    let params_involved = !genericity.is_empty()
        || curve_uses_params(curve, reg)
        || h.iter().any(involves_params)
        || m.matrix().iter_rows().flatten().any(|e| involves_params(e));
    let mut specialization: Vec<(String, Rat)> = Vec::new();
    if params_involved && reg.n_params() > 0 {
        match confirm_specialized(h, m, curve, &genericity, opts.jet_order)? {
            Some(assign) => specialization = assign,
            None => return Ok(None), // could not confirm concretely
        }
    }
    Ok(Some(OutWitness::CurveResidual {
        curve: curve.clone(),
        failing_row: greedy.failing_row.or(report.failing_row).unwrap_or(0),
        deficit: report.deficit,
        residual,
        genericity,
        specialization,
    }))
}

fn involves_params(p: &Polynomial) -> bool {
    let reg = p.registry();
    p.occurring_slots()
        .into_iter()
        .any(|s| matches!(reg.kind_of(s), VarKind::Param(_)))
}

fn curve_uses_params(curve: &Curve, reg: &Arc<VarRegistry>) -> bool {
    (0..2 * reg.dim()).any(|s| involves_params(curve.sub(s)))
}

/// Substitute exact rational values for the parameters (avoiding zeros of
/// the genericity conditions) and re-run the curve test; returns the
/// assignment if the failure persists.
fn confirm_specialized(
    h: &[Polynomial],
    m: &GenModule,
    curve: &Curve,
    conds: &[Polynomial],
    cap: usize,
) -> Result<Option<Vec<(String, Rat)>>> {
    let reg = m.registry();
    let np = reg.n_params();
    let primes: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    'assign: for shift in 0..6usize {
        let vals: Vec<Rat> = (0..np)
            .map(|i| Rat::from_integer(primes[(i + shift) % primes.len()].into()))
            .collect();
        // all recorded conditions must be nonzero at the assignment
        let mut point = vec![Rat::zero(); reg.n_slots()];
        for (i, v) in vals.iter().enumerate() {
            point[reg.param_slot(i)] = v.clone();
        }
        for c in conds {
            if c.eval(&point).is_zero() {
                continue 'assign;
            }
        }
        let map = param_substitution(reg, &vals);
        let hs: Vec<Polynomial> = h
            .iter()
            .map(|p| p.substitute_poly(&map))
            .collect::<Result<_>>()?;
        let cols: Vec<Vec<Polynomial>> = (0..m.n_cols())
            .map(|j| m.col(j).iter().map(|p| p.substitute_poly(&map)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let ms = GenModule::new(reg, cols)?;
        let subs: Vec<Polynomial> = (0..2 * reg.dim())
            .map(|s| curve.sub(s).substitute_poly(&map))
            .collect::<Result<_>>()?;
        let sc = Curve::new(reg, subs)?;
        let v = sc.pullback_vector_tpoly(&hs)?;
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let a = sc.pullback_mat_tpoly(ms.matrix())?;
        let rep = snf::curve_membership(&v, &a, cap)?;
        if !rep.member {
            let named: Vec<(String, Rat)> = (0..np)
                .map(|i| (reg.name_of(reg.param_slot(i)).to_string(), vals[i].clone()))
                .collect();
            return Ok(Some(named));
        }
    }
    Ok(None)
}

/// Substitution map sending each parameter slot to a constant and every
/// other slot to itself.
fn param_substitution(reg: &Arc<VarRegistry>, vals: &[Rat]) -> BTreeMap<usize, Polynomial> {
    let mut map = BTreeMap::new();
    for s in 0..reg.n_slots() {
        map.insert(s, Polynomial::var(reg, s));
    }
    for (i, v) in vals.iter().enumerate() {
        map.insert(reg.param_slot(i), Polynomial::constant(reg, v.clone()));
    }
    map
}

// ---------------------------------------------------------------------------
// certificate replay

/// Re-verifies a positive certificate against the ideal it certifies.
/// `NewtonHull` and `MinorsReduction` certify closure membership; the
/// others certify plain (or local) membership, which implies it.
pub fn verify_ideal_certificate(p: &Polynomial, ideal: &Ideal, cert: &InCertificate) -> bool {
    let cols: Vec<Vec<Polynomial>> = ideal.gens().iter().map(|g| vec![g.clone()]).collect();
    verify_vector_certificate(std::slice::from_ref(p), &cols, cert)
}

/// Re-verifies a positive certificate against the module it certifies.
pub fn verify_module_certificate(h: &[Polynomial], m: &GenModule, cert: &InCertificate) -> bool {
    let cols: Vec<Vec<Polynomial>> = (0..m.n_cols()).map(|j| m.col(j).to_vec()).collect();
    match cert {
        InCertificate::MinorsReduction { k, children } => {
            verify_minors_reduction(h, m, *k, children)
        }
        _ => verify_vector_certificate(h, &cols, cert),
    }
}

fn verify_vector_certificate(
    target: &[Polynomial],
    cols: &[Vec<Polynomial>],
    cert: &InCertificate,
) -> bool {
    match cert {
        InCertificate::ZeroTarget => target.iter().all(|p| p.is_zero()),
        InCertificate::Combination { cofactors } => {
            membership::verify_combination(target, cols, cofactors)
        }
        InCertificate::UnitCombination { unit, cofactors } => {
            if unit.constant_term().is_zero() {
                return false;
            }
            let scaled: Vec<Polynomial> = target.iter().map(|t| unit * t).collect();
            membership::verify_combination(&scaled, cols, cofactors)
        }
        InCertificate::NewtonHull { per_term } => verify_newton_hull(target, cols, per_term),
        InCertificate::MinorsReduction { .. } => false, // needs the module form
        InCertificate::Bracketed { inner, .. } => {
            verify_vector_certificate(target, cols, inner)
        }
    }
}

fn verify_newton_hull(
    target: &[Polynomial],
    cols: &[Vec<Polynomial>],
    per_term: &[(Polynomial, Vec<(usize, Rat)>)],
) -> bool {
    if target.len() != 1 || cols.iter().any(|c| c.len() != 1) {
        return false;
    }
    let p = &target[0];
    // the listed terms must sum to the target
    let mut acc = Polynomial::zero(p.registry());
    for (t, _) in per_term {
        acc = &acc + t;
    }
    if &acc != p {
        return false;
    }
    for (t, lambdas) in per_term {
        let Ok(v) = newton::monomial_exponent(t) else {
            return false;
        };
        let mut total = Rat::zero();
        let width = v.0.len();
        let mut combo = vec![Rat::zero(); width];
        for (j, l) in lambdas {
            if l.is_negative() {
                return false;
            }
            let Some(col) = cols.get(*j) else {
                return false;
            };
            let Ok(e) = newton::monomial_exponent(&col[0]) else {
                return false;
            };
            total = total + l.clone();
            for (s, &es) in e.0.iter().enumerate() {
                combo[s] = combo[s].clone() + l * &Rat::from_integer(es.into());
            }
        }
        if !total.is_one() {
            return false;
        }
        for (s, c) in combo.iter().enumerate() {
            if c > &Rat::from_integer(v.0[s].into()) {
                return false;
            }
        }
    }
    true
}

fn verify_minors_reduction(
    h: &[Polynomial],
    m: &GenModule,
    k: usize,
    children: &[(Polynomial, InCertificate)],
) -> bool {
    let Ok(base) = m.minor_ideal(k) else {
        return false;
    };
    let Ok(aug) = m.augment(h) else { return false };
    let amat = aug.matrix();
    let p = m.p();
    let r = m.n_cols();
    if k == 0 || k > p || k - 1 > r {
        return false;
    }
    // collect the nonzero h-involving minors and match them to children
    let mut expected: Vec<Polynomial> = Vec::new();
    for rows in k_subsets(p, k) {
        for tail in k_subsets(r, k - 1) {
            let mut cols = vec![0usize];
            cols.extend(tail.iter().map(|&j| j + 1));
            let Ok(idx) = KIndex::new(rows.clone(), cols) else {
                return false;
            };
            let Ok(minor) = amat.minor(&idx) else { return false };
            if !minor.is_zero() {
                expected.push(minor);
            }
        }
    }
    if expected.len() != children.len() {
        return false;
    }
    for ((minor, cert), exp) in children.iter().zip(&expected) {
        if minor != exp {
            return false;
        }
        if !verify_ideal_certificate(minor, &base, cert) {
            return false;
        }
    }
    true
}

/// Replays a negative witness for an ideal-closure claim.
pub fn verify_ideal_witness(p: &Polynomial, ideal: &Ideal, witness: &OutWitness) -> bool {
    match witness {
        OutWitness::ZeroSpan => !p.is_zero() && ideal.gens().is_empty(),
        OutWitness::CurveOrder {
            curve,
            target_ord,
            span_ord,
        } => {
            let Ok(Some(t)) = curve.ord_of(p) else {
                return false;
            };
            if t != *target_ord {
                return false;
            }
            let Ok(s) = ideal_min_ord(curve, ideal.gens()) else {
                return false;
            };
            if s != *span_ord {
                return false;
            }
            span_ord.map_or(true, |s| *target_ord < s)
        }
        OutWitness::Bracketed { inner, .. } => verify_ideal_witness(p, ideal, inner),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_polynomial, parse_vector};
    use std::sync::Arc;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["x", "y"], &[]).unwrap()
    }

    fn pp(r: &Arc<VarRegistry>, s: &str) -> Polynomial {
        parse_polynomial(r, s).unwrap()
    }

    fn ideal(r: &Arc<VarRegistry>, gens: &[&str]) -> Ideal {
        Ideal::new(r, gens.iter().map(|s| pp(r, s)).collect()).unwrap()
    }

    #[test]
    fn membership_implies_closure() {
        let r = reg();
        let i = ideal(&r, &["x^2", "y^2"]);
        let v = closure_test_ideal(&pp(&r, "x^2 + y^2"), &i, &ClosureOptions::default()).unwrap();
        assert!(v.is_in());
    }

    #[test]
    fn newton_in_certificate_replays() {
        let r = reg();
        let i = ideal(&r, &["x^2", "y^2"]);
        let p = pp(&r, "x*y");
        let v = closure_test_ideal(&p, &i, &ClosureOptions::default()).unwrap();
        let Verdict::CertifiedIn(cert) = &v else {
            panic!("xy must be in the closure of <x^2, y^2>: {v:?}");
        };
        assert_eq!(cert.kind(), "newton hull");
        assert!(verify_ideal_certificate(&p, &i, cert));
    }

    #[test]
    fn newton_out_witness_replays() {
        let r = reg();
        let i = ideal(&r, &["x^2", "x*y^2"]);
        // y is far outside the Newton region
        let p = pp(&r, "y");
        let v = closure_test_ideal(&p, &i, &ClosureOptions::default()).unwrap();
        let Verdict::CertifiedOut(w) = &v else {
            panic!("y must escape: {v:?}");
        };
        assert!(verify_ideal_witness(&p, &i, w), "witness must replay: {w:?}");
    }

    #[test]
    fn mixed_target_against_monomial_ideal() {
        let r = reg();
        let i = ideal(&r, &["x^2", "y^2"]);
        // both terms inside the region
        let v = closure_test_ideal(&pp(&r, "x*y + y^2"), &i, &ClosureOptions::default()).unwrap();
        assert!(v.is_in());
        // one term outside
        let v = closure_test_ideal(&pp(&r, "x*y + x"), &i, &ClosureOptions::default()).unwrap();
        assert!(v.is_out());
    }

    #[test]
    fn closure_strictness_example() {
        let r = reg();
        // x*y is in the closure but not in the ideal <x^2, y^2> itself
        let i = ideal(&r, &["x^2", "y^2"]);
        let member = membership::ideal_membership(&pp(&r, "x*y"), &i, None).unwrap();
        assert!(!member.is_in());
        let closed = closure_test_ideal(&pp(&r, "x*y"), &i, &ClosureOptions::default()).unwrap();
        assert!(closed.is_in());
    }

    #[test]
    fn zero_ideal_closure_is_zero() {
        let r = reg();
        let v = closure_test_ideal(&pp(&r, "x"), &Ideal::zero(&r), &ClosureOptions::default())
            .unwrap();
        assert!(matches!(v, Verdict::CertifiedOut(OutWitness::ZeroSpan)));
    }

    #[test]
    fn rank_jump_is_detected() {
        let r = reg();
        // M = column (x, y): rank 1; h = (y, x) has augmented rank 2
        let m = GenModule::new(&r, vec![parse_vector(&r, "(x, y)").unwrap()]).unwrap();
        let h = parse_vector(&r, "(y, x)").unwrap();
        let v = closure_test_module(&h, &m, &ClosureOptions::default()).unwrap();
        assert!(matches!(
            v,
            Verdict::CertifiedOut(OutWitness::RankJump { base: 1, augmented: 2 })
        ));
    }

    #[test]
    fn module_membership_short_circuits() {
        let r = reg();
        let m = GenModule::new(
            &r,
            vec![
                parse_vector(&r, "(x, y)").unwrap(),
                parse_vector(&r, "(0, x)").unwrap(),
                parse_vector(&r, "(y, 0)").unwrap(),
            ],
        )
        .unwrap();
        let h = parse_vector(&r, "(x + y, y)").unwrap();
        let v = closure_test_module(&h, &m, &ClosureOptions::default()).unwrap();
        assert!(v.is_in());
        if let Verdict::CertifiedIn(cert) = &v {
            assert!(verify_module_certificate(&h, &m, cert));
        }
    }

    #[test]
    fn curve_obstruction_for_modules() {
        let r = reg();
        // M generated by (x, 0) and (y, 0): second coordinate unreachable
        let m = GenModule::new(
            &r,
            vec![
                parse_vector(&r, "(x, 0)").unwrap(),
                parse_vector(&r, "(y, 0)").unwrap(),
            ],
        )
        .unwrap();
        let h = parse_vector(&r, "(0, x)").unwrap();
        let v = closure_test_module(&h, &m, &ClosureOptions::default()).unwrap();
        // rank jumps from 1 to 2: certified out
        assert!(v.is_out());
    }

    #[test]
    fn minors_reduction_certifies_scaled_columns() {
        let r = reg();
        // h = x * g1 is a member; the more interesting case x*y*(columns)
        // exercises the reduction when membership alone already decides;
        // force the minors path by testing a closure-only member:
        // M = <(x^2, 0), (0, y^2)> (rank 2), h = (x*y^2, 0)?? rank jump no,
        // membership yes (divisible). Use h = (x^2*y, x*y^2):
        let m = GenModule::new(
            &r,
            vec![
                parse_vector(&r, "(x^2, 0)").unwrap(),
                parse_vector(&r, "(0, y^2)").unwrap(),
            ],
        )
        .unwrap();
        let h = parse_vector(&r, "(x^2*y, x*y^2)").unwrap();
        let v = closure_test_module(&h, &m, &ClosureOptions::default()).unwrap();
        assert!(v.is_in(), "plain membership: {v:?}");
    }

    #[test]
    fn describe_is_stable() {
        let r = reg();
        let i = ideal(&r, &["x^2", "y^2"]);
        let v = closure_test_ideal(&pp(&r, "x*y"), &i, &ClosureOptions::default()).unwrap();
        assert_eq!(v.describe(), "certified in (newton hull)");
    }
}
