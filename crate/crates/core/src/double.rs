//! The double construction: pulled-back vectors on the product space, the
//! doubled module with its three generator families, the diagonal ideal,
//! and the tilde block that exposes the doubled matrix's triangular form.
//!
//! The product space never appears as a separate ring: every registry
//! already carries a primed copy of each space variable, so the two
//! projection pullbacks are just slot relabelings — `pi1` fixes a base
//! polynomial, `pi2` moves it onto the primed block.

use crate::error::{Error, Result};
use crate::genmodule::{vec_zero, GenModule};
use crate::ideal::Ideal;
use crate::mat::{KIndex, Mat};
use crate::poly::Polynomial;
use crate::vars::VarRegistry;
use std::sync::Arc;

/// Which generator family presents the doubled module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Doubled generators plus `(0, (z_i - z_i') * (g_j o pi2))`.
    B,
    /// Doubled generators plus `((z_i - z_i') * (g_j o pi1), 0)`.
    BPrime,
    /// Doubled generators plus `(z_i * g_j)_D`.
    BDoublePrime,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::B => "B",
            Family::BPrime => "B'",
            Family::BDoublePrime => "B''",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Family::B),
            "B'" | "b'" | "Bp" | "bp" => Ok(Family::BPrime),
            "B''" | "b''" | "Bpp" | "bpp" => Ok(Family::BDoublePrime),
            _ => Err(Error::InvalidArgument(format!(
                "unknown generator family {s:?} (expected B, B' or B'')"
            ))),
        }
    }
}

/// Pullback along the first projection. The identity on base polynomials;
/// rejects input already involving primed or curve variables.
pub fn pi1(p: &Polynomial) -> Result<Polynomial> {
    if !p.is_base_ring() {
        return Err(Error::NotBaseRing);
    }
    Ok(p.clone())
}

/// Pullback along the second projection: every space variable moves to its
/// primed copy (parameters stay put).
pub fn pi2(p: &Polynomial) -> Result<Polynomial> {
    if !p.is_base_ring() {
        return Err(Error::NotBaseRing);
    }
    let reg = p.registry().clone();
    let n = reg.dim();
    Ok(p.map_slots(|slot| if slot < n { reg.primed_slot(slot) } else { slot }))
}

/// The involution exchanging the two copies (`z_i <-> z_i'`).
pub fn swap_primes(p: &Polynomial) -> Polynomial {
    let reg = p.registry().clone();
    let n = reg.dim();
    p.map_slots(move |slot| {
        if slot < n {
            reg.primed_slot(slot)
        } else if (n..2 * n).contains(&slot) {
            slot - n
        } else {
            slot
        }
    })
}

/// `h_D = (h o pi1, h o pi2)`: the doubled vector of length `2p`.
pub fn double_vector(h: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let mut out = Vec::with_capacity(2 * h.len());
    for e in h {
        out.push(pi1(e)?);
    }
    for e in h {
        out.push(pi2(e)?);
    }
    Ok(out)
}

/// `z_i - z_i'`, the `i`-th diagonal generator.
pub fn diagonal_gen(reg: &Arc<VarRegistry>, i: usize) -> Polynomial {
    &Polynomial::var(reg, reg.space_slot(i)) - &Polynomial::var(reg, reg.primed_slot(i))
}

/// The ideal of the diagonal: `(z_1 - z_1', ..., z_n - z_n')`.
pub fn diagonal_ideal(reg: &Arc<VarRegistry>) -> Ideal {
    Ideal::new(reg, (0..reg.dim()).map(|i| diagonal_gen(reg, i)).collect())
        .expect("same registry")
}

/// Where a doubled-module column came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColTag {
    /// `(g_j)_D`.
    Doubled { j: usize },
    /// The family-dependent second-block column built from generator `j`
    /// and coordinate `i`.
    Second { j: usize, i: usize },
}

/// The doubled module `M_D` presented by one of the generator families.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledModule {
    module: GenModule,
    tags: Vec<ColTag>,
    family: Family,
}

impl DoubledModule {
    pub fn module(&self) -> &GenModule {
        &self.module
    }

    pub fn tags(&self) -> &[ColTag] {
        &self.tags
    }

    pub fn family(&self) -> Family {
        self.family
    }
}

/// Builds `M_D` from a base module. Column order: the `r` doubled
/// generators first, then the second block with the generator index outer
/// and the coordinate index inner (`(j, i)` at position `r + j*n + i`).
pub fn double_module(m: &GenModule, family: Family) -> Result<DoubledModule> {
    let reg = m.registry();
    let n = reg.dim();
    let p = m.p();
    let r = m.n_cols();
    let mut cols = Vec::with_capacity(r * (n + 1));
    let mut tags = Vec::with_capacity(r * (n + 1));
    for j in 0..r {
        cols.push(double_vector(&m.col(j))?);
        tags.push(ColTag::Doubled { j });
    }
    for j in 0..r {
        let g = m.col(j);
        for i in 0..n {
            let delta = diagonal_gen(reg, i);
            let col = match family {
                Family::B => {
                    let mut c = vec_zero(reg, p);
                    c.extend(g.iter().map(|e| &delta * &pi2(e).expect("base entry")));
                    c
                }
                Family::BPrime => {
                    let mut c: Vec<Polynomial> =
                        g.iter().map(|e| &delta * &pi1(e).expect("base entry")).collect();
                    c.extend(vec_zero(reg, p));
                    c
                }
                Family::BDoublePrime => {
                    let zi = Polynomial::var(reg, reg.space_slot(i));
                    let scaled: Vec<Polynomial> = g.iter().map(|e| &zi * e).collect();
                    double_vector(&scaled)?
                }
            };
            cols.push(col);
            tags.push(ColTag::Second { j, i });
        }
    }
    Ok(DoubledModule { module: GenModule::new(reg, cols)?, tags, family })
}

/// The `p x (n*r)` tilde block: column `(j, i)` is
/// `(z_i - z_i') * (g_j o pi2)`, ordered `j`-major. Together with the base
/// matrix this realizes the doubled matrix's triangular form
/// `[[M, 0], [M', tilde]]` for family B.
pub fn tilde_matrix(m: &GenModule) -> Result<Mat<Polynomial>> {
    let reg = m.registry();
    let n = reg.dim();
    let p = m.p();
    let r = m.n_cols();
    let mut rows = vec![Vec::with_capacity(n * r); p];
    for j in 0..r {
        let g = m.col(j);
        for i in 0..n {
            let delta = diagonal_gen(reg, i);
            for (l, e) in g.iter().enumerate() {
                rows[l].push(&delta * &pi2(e)?);
            }
        }
    }
    Mat::from_rows(rows)
}

/// The determinant-product subideal of the `2k`-minors of the doubled
/// matrix: generated by all products `det(M_IJ) * det(tilde_KL)`.
pub fn script_i_2k(m: &GenModule, k: usize) -> Result<Ideal> {
    let reg = m.registry();
    if m.is_zero() {
        // every minor vanishes; skip the enumeration
        if k == 0 || k > m.p().min(m.n_cols()) {
            return Err(Error::MinorSize { k, rows: m.p(), cols: m.n_cols() });
        }
        return Ok(Ideal::zero(reg));
    }
    let base_minors = m.matrix().minors(k)?;
    let tilde = tilde_matrix(m)?;
    let tilde_minors = tilde.minors(k)?;
    let mut gens = Vec::with_capacity(base_minors.len() * tilde_minors.len());
    for (_, a) in &base_minors {
        if a.is_zero() {
            continue;
        }
        for (_, b) in &tilde_minors {
            if b.is_zero() {
                continue;
            }
            gens.push(a * b);
        }
    }
    Ideal::new(reg, gens)
}

/// Realizes `(z_{t_1}-z_{t_1}') ... (z_{t_k}-z_{t_k}') * det(M_{I_u J_u}) *
/// det(M'_{I_v J_v})` as a single `2k x 2k` minor of the family-B doubled
/// matrix, returning the selecting index and the determinant.
///
/// Rows are `I_u` in the top copy and `I_v` in the bottom copy; columns are
/// `J_u` among the doubled generators and, for each `s`, the second-block
/// column `(j, i) = ((J_v)_s, t_s)`. The top-right block of the selection
/// is zero, so the determinant factors as the base minor times the tilde
/// minor, and pulling the diagonal factors out of the tilde columns leaves
/// exactly the primed minor — with no residual sign, because the second
/// block is ordered generator-major.
pub fn det_product_minor(
    m: &GenModule,
    ts: &[usize],
    u: &KIndex,
    v: &KIndex,
) -> Result<(KIndex, Polynomial)> {
    let idx = det_product_index(m.p(), m.n_cols(), m.registry().dim(), ts, u, v)?;
    let doubled = double_module(m, Family::B)?;
    let det = doubled.module().matrix().minor(&idx)?;
    Ok((idx, det))
}

/// The index half of [`det_product_minor`], for callers that already hold
/// the doubled matrix. `p`, `r`, `n` describe the base module.
pub fn det_product_index(
    p: usize,
    r: usize,
    n: usize,
    ts: &[usize],
    u: &KIndex,
    v: &KIndex,
) -> Result<KIndex> {
    let k = u.k();
    if v.k() != k || ts.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: v.k().max(ts.len()) });
    }
    u.validate(p, r)?;
    v.validate(p, r)?;
    if ts.iter().any(|&t| t >= n) {
        return Err(Error::IndexOutOfRange {
            what: "coordinate index",
            index: *ts.iter().max().unwrap(),
            len: n,
        });
    }
    let rows: Vec<usize> =
        u.rows.iter().copied().chain(v.rows.iter().map(|&i| p + i)).collect();
    let cols: Vec<usize> = u
        .cols
        .iter()
        .copied()
        .chain(v.cols.iter().zip(ts).map(|(&j, &t)| r + j * n + t))
        .collect();
    KIndex::new(rows, cols)
}

/// Writes `a o pi2 - a o pi1` over the diagonal generators: returns
/// `q_1, ..., q_n` with `a' - a = sum_i (z_i' - z_i) * q_i`, by telescoping
/// one variable at a time (each divided difference divides exactly).
pub fn diagonal_divided_differences(a: &Polynomial) -> Result<Vec<Polynomial>> {
    if !a.is_base_ring() {
        return Err(Error::NotBaseRing);
    }
    let reg = a.registry().clone();
    let n = reg.dim();
    // mixed(i): the first i space variables unprimed, the rest primed
    // (parameters never move)
    let mixed = |i: usize| -> Polynomial {
        a.map_slots(|slot| {
            if slot >= i && slot < n {
                reg.primed_slot(slot)
            } else {
                slot
            }
        })
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // mixed(i) - mixed(i+1) differs only in variable i: divisible by z_i' - z_i
        let num = &mixed(i) - &mixed(i + 1);
        let den = -diagonal_gen(a.registry(), i);
        let q = if num.is_zero() {
            Polynomial::zero(a.registry())
        } else {
            num.div_exact(&den).expect("divided difference divides exactly")
        };
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmodule::{vec_add, vec_scale};
    use crate::parse::{parse_polynomial, parse_vector};

    fn setup() -> (Arc<VarRegistry>, impl Fn(&str) -> Polynomial) {
        let reg = VarRegistry::new(&["x", "y"], &[]).unwrap();
        let r = reg.clone();
        (reg, move |s: &str| parse_polynomial(&r, s).unwrap())
    }

    fn example_module(reg: &Arc<VarRegistry>) -> GenModule {
        let col = |s: &str| parse_vector(reg, s).unwrap();
        GenModule::new(reg, vec![col("(x, y)"), col("(0, x)"), col("(y, 0)")]).unwrap()
    }

    #[test]
    fn projections_and_doubled_vectors() {
        let (reg, p) = setup();
        let h = parse_vector(&reg, "(x, 3*y)").unwrap();
        let hd = double_vector(&h).unwrap();
        assert_eq!(hd, vec![p("x"), p("3*y"), p("x'"), p("3*y'")]);
        assert_eq!(pi2(&p("x^2 - y")).unwrap(), p("x'^2 - y'"));
        assert_eq!(pi1(&p("x^2 - y")).unwrap(), p("x^2 - y"));
        assert!(pi2(&p("x'")).is_err());
        assert_eq!(swap_primes(&p("x*y' + x'")), p("x'*y + x"));
        // additivity
        let g = parse_vector(&reg, "(y^2, x - 1)").unwrap();
        assert_eq!(
            double_vector(&vec_add(&g, &h)).unwrap(),
            vec_add(&double_vector(&g).unwrap(), &double_vector(&h).unwrap())
        );
    }

    #[test]
    fn family_b_block_structure() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        let d = double_module(&m, Family::B).unwrap();
        let dm = d.module();
        assert_eq!(dm.p(), 4);
        assert_eq!(dm.n_cols(), 9);
        assert_eq!(d.tags()[0], ColTag::Doubled { j: 0 });
        assert_eq!(d.tags()[3], ColTag::Second { j: 0, i: 0 });
        assert_eq!(d.tags()[8], ColTag::Second { j: 2, i: 1 });
        // block form [[M, 0], [M', tilde]]
        let tilde = tilde_matrix(&m).unwrap();
        for l in 0..2 {
            for j in 0..3 {
                assert_eq!(dm.matrix().at(l, j), m.matrix().at(l, j));
                assert_eq!(
                    dm.matrix().at(2 + l, j),
                    &pi2(m.matrix().at(l, j)).unwrap()
                );
            }
            for c in 0..6 {
                assert!(dm.matrix().at(l, 3 + c).is_zero());
                assert_eq!(dm.matrix().at(2 + l, 3 + c), tilde.at(l, c));
            }
        }
    }

    #[test]
    fn other_families() {
        let (reg, p) = setup();
        let m = example_module(&reg);
        let bp = double_module(&m, Family::BPrime).unwrap();
        assert_eq!(bp.module().n_cols(), 9);
        // second-block column (j=0, i=0): ((x-x') * (x, y), 0)
        let col = bp.module().col(3);
        assert_eq!(col[0], p("x^2 - x*x'"));
        assert_eq!(col[1], p("x*y - x'*y"));
        assert!(col[2].is_zero() && col[3].is_zero());

        let bpp = double_module(&m, Family::BDoublePrime).unwrap();
        // second-block column (j=0, i=1): (y * (x, y))_D
        let col = bpp.module().col(4);
        assert_eq!(col, parse_vector(&reg, "(x*y, y^2, x'*y', y'^2)").unwrap());
    }

    #[test]
    fn diagonal_ideal_shape() {
        let (reg, p) = setup();
        let i = diagonal_ideal(&reg);
        assert_eq!(i, Ideal::new(&reg, vec![p("x - x'"), p("y - y'")]).unwrap());
        let sq = i.power(2);
        assert_eq!(sq.gens().len(), 3);
        let reg1 = VarRegistry::new(&["z"], &[]).unwrap();
        assert_eq!(diagonal_ideal(&reg1).gens().len(), 1);
    }

    #[test]
    fn tilde_block() {
        let (reg, p) = setup();
        let m = example_module(&reg);
        let tilde = tilde_matrix(&m).unwrap();
        assert_eq!((tilde.rows(), tilde.cols()), (2, 6));
        // column (j=0, i=0): (x - x') * (x', y')
        assert_eq!(*tilde.at(0, 0), p("x*x' - x'^2"));
        assert_eq!(*tilde.at(1, 0), p("x*y' - x'*y'"));
        // column (j=0, i=1): (y - y') * (x', y')
        assert_eq!(*tilde.at(0, 1), p("x'*y - x'*y'"));
        // every entry carries a diagonal factor
        for row in tilde.iter_rows() {
            for (c, e) in row.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let i = c % 2;
                let delta = diagonal_gen(&reg, i);
                assert!(e.div_exact(&delta).is_some());
            }
        }
        // zero module: tilde block is all zeros
        let zero = GenModule::new(&reg, vec![vec![p("0"), p("0")]]).unwrap();
        let zt = tilde_matrix(&zero).unwrap();
        assert!(zt.iter_rows().all(|r| r.iter().all(|e| e.is_zero())));
    }

    #[test]
    fn script_ideal_generators_are_doubled_minors() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        let script = script_i_2k(&m, 2).unwrap();
        assert!(!script.is_zero());
        // each generator det(M_IJ) * det(tilde_KL) appears as an honest
        // 2k x 2k minor of [M_D]: rows I + (p+K), cols J + (r + L)
        let doubled = double_module(&m, Family::B).unwrap();
        let tilde = tilde_matrix(&m).unwrap();
        let base_minors = m.matrix().minors(2).unwrap();
        let tilde_minors = tilde.minors(2).unwrap();
        let mut seen = 0;
        for (ij, a) in &base_minors {
            for (kl, b) in &tilde_minors {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let rows: Vec<usize> =
                    ij.rows.iter().copied().chain(kl.rows.iter().map(|&i| i + 2)).collect();
                let cols: Vec<usize> =
                    ij.cols.iter().copied().chain(kl.cols.iter().map(|&j| j + 3)).collect();
                let idx = KIndex::new(rows, cols).unwrap();
                let minor = doubled.module().matrix().minor(&idx).unwrap();
                assert_eq!(&minor, &(a * b));
                seen += 1;
            }
        }
        assert!(seen > 0);
        // the products generate the script ideal we constructed
        let regen = Ideal::new(
            &reg,
            base_minors
                .iter()
                .flat_map(|(_, a)| tilde_minors.iter().map(move |(_, b)| a * b))
                .collect(),
        )
        .unwrap();
        assert_eq!(script, regen);
    }

    #[test]
    fn zero_module_script_ideal() {
        let (reg, p) = setup();
        let zero = GenModule::new(&reg, vec![vec![p("0"), p("0")]]).unwrap();
        assert!(script_i_2k(&zero, 1).unwrap().is_zero());
        assert!(script_i_2k(&zero, 2).is_err());
    }

    #[test]
    fn det_product_is_a_single_minor() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        let u = KIndex::new(vec![0, 1], vec![0, 1]).unwrap();
        let v = KIndex::new(vec![0, 1], vec![1, 2]).unwrap();
        for ts in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let (idx, det) = det_product_minor(&m, &ts, &u, &v).unwrap();
            let expected = &(&(&diagonal_gen(&reg, ts[0]) * &diagonal_gen(&reg, ts[1]))
                * &m.matrix().minor(&u).unwrap())
                * &pi2(&m.matrix().minor(&v).unwrap()).unwrap();
            assert_eq!(det, expected);
            assert_eq!(idx.k(), 4);
        }
        // mismatched sizes are rejected
        let w = KIndex::new(vec![0], vec![0]).unwrap();
        assert!(det_product_minor(&m, &[0, 1], &u, &w).is_err());
    }

    #[test]
    fn divided_differences_telescope() {
        let (reg, p) = setup();
        for src in ["x^2*y + 3*x", "x^3 - y^3", "5", "x*y - y^2 + 1"] {
            let a = p(src);
            let qs = diagonal_divided_differences(&a).unwrap();
            let mut acc = &pi2(&a).unwrap() - &pi1(&a).unwrap();
            for (i, q) in qs.iter().enumerate() {
                acc = &acc - &(&(-diagonal_gen(&reg, i)) * q);
            }
            assert!(acc.is_zero(), "telescoping failed for {src}");
        }
    }

    #[test]
    fn scaling_identity() {
        // (alpha h)_D = (alpha o pi1) h_D - (0, (alpha o pi1 - alpha o pi2)(h o pi2))
        let (reg, p) = setup();
        let alpha = p("x*y - 2");
        let h = parse_vector(&reg, "(x, y^2)").unwrap();
        let lhs = double_vector(&vec_scale(&alpha, &h)).unwrap();
        let a1 = pi1(&alpha).unwrap();
        let a2 = pi2(&alpha).unwrap();
        let term1 = vec_scale(&a1, &double_vector(&h).unwrap());
        let diff = &a1 - &a2;
        let mut corr = vec_zero(&reg, 2);
        corr.extend(h.iter().map(|e| &diff * &pi2(e).unwrap()));
        let rhs = crate::genmodule::vec_sub(&term1, &corr);
        assert_eq!(lhs, rhs);
    }
}
