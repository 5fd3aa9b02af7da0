//! Submodules of a free module, presented by a matrix of column generators,
//! together with their minor ideals, generic rank, and cofactor functionals.

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::mat::{KIndex, Mat};
use crate::poly::Polynomial;
use crate::vars::VarRegistry;
use crate::Rat;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A finitely generated submodule of `O^p`, stored as the `p x r` matrix
/// whose columns are the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GenModule {
    reg: Arc<VarRegistry>,
    mat: Mat<Polynomial>,
}

impl GenModule {
    pub fn new(reg: &Arc<VarRegistry>, cols: Vec<Vec<Polynomial>>) -> Result<Self> {
        let p = cols.first().map_or(0, |c| c.len());
        if p == 0 {
            return Err(Error::InvalidArgument(
                "a module needs at least one generator with positive length".into(),
            ));
        }
        for c in &cols {
            if c.len() != p {
                return Err(Error::DimensionMismatch { expected: p, found: c.len() });
            }
            for entry in c {
                if !entry.registry().same(reg) {
                    return Err(Error::RegistryMismatch);
                }
            }
        }
        let mut rows = vec![Vec::with_capacity(cols.len()); p];
        for c in &cols {
            for (i, entry) in c.iter().enumerate() {
                rows[i].push(entry.clone());
            }
        }
        Ok(GenModule { reg: reg.clone(), mat: Mat::from_rows(rows)? })
    }

    pub fn from_mat(reg: &Arc<VarRegistry>, mat: Mat<Polynomial>) -> Result<Self> {
        if mat.rows() == 0 {
            return Err(Error::InvalidArgument("a module needs a positive ambient rank".into()));
        }
        for row in mat.iter_rows() {
            for entry in row {
                if !entry.registry().same(reg) {
                    return Err(Error::RegistryMismatch);
                }
            }
        }
        Ok(GenModule { reg: reg.clone(), mat })
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// Ambient rank: the length of each generator column.
    pub fn p(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.mat.cols()
    }

    pub fn matrix(&self) -> &Mat<Polynomial> {
        &self.mat
    }

    pub fn col(&self, j: usize) -> Vec<Polynomial> {
        self.mat.col(j)
    }

    pub fn cols(&self) -> Vec<Vec<Polynomial>> {
        (0..self.n_cols()).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter_rows().all(|row| row.iter().all(|e| e.is_zero()))
    }

    /// Indices of all-zero generator columns. Harmless for every minor
    /// ideal, but usually a sign of a malformed input, so callers can warn.
    pub fn zero_column_lint(&self) -> Vec<usize> {
        (0..self.n_cols())
            .filter(|&j| self.col(j).iter().all(|e| e.is_zero()))
            .collect()
    }

    /// The ideal generated by all `k x k` minors of the generator matrix.
    pub fn minor_ideal(&self, k: usize) -> Result<Ideal> {
        let minors = self.mat.minors(k)?;
        Ideal::new(&self.reg, minors.into_iter().map(|(_, d)| d).collect())
    }

    /// Prepends `h` as a new first column: the module generated by `h`
    /// together with this module.
    pub fn augment(&self, h: &[Polynomial]) -> Result<GenModule> {
        for entry in h {
            if !entry.registry().same(&self.reg) {
                return Err(Error::RegistryMismatch);
            }
        }
        Ok(GenModule { reg: self.reg.clone(), mat: self.mat.insert_col(0, h)? })
    }

    /// The generic rank: the largest `k` with a nonzero `k x k` minor,
    /// i.e. the rank of the generator matrix over the fraction field.
    pub fn generic_rank(&self) -> usize {
        self.generic_rank_with_witness().0
    }

    /// Generic rank plus a witness minor of that size with nonzero
    /// determinant (`None` only for rank 0).
    ///
    /// Strategy: evaluation at sample points yields a nonsingular starting
    /// minor (a nonzero value of a determinant certifies the symbolic
    /// determinant is nonzero). From there, grow the witness one bordered
    /// minor at a time; once every bordering determinant vanishes
    /// symbolically, the rank is exact, because a nonsingular `k x k` block
    /// all of whose borders are singular spans every remaining row.
    pub fn generic_rank_with_witness(&self) -> (usize, Option<KIndex>) {
        let rows = self.mat.rows();
        let cols = self.mat.cols();
        if cols == 0 || self.is_zero() {
            return (0, None);
        }
        // Deterministic sample points: correctness never depends on them
        // (they only pick a good starting witness), so a fixed seed keeps
        // runs reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(0x4C_49_50_53);
        let points: Vec<Vec<Rat>> = (0..3).map(|_| random_point(&self.reg, &mut rng)).collect();
        let evals: Vec<Mat<Rat>> = points
            .iter()
            .filter_map(|pt| self.mat.eval(pt).ok())
            .collect();

        let (mut wit_rows, mut wit_cols): (Vec<usize>, Vec<usize>) = evals
            .iter()
            .map(|m| m.rank_profile())
            .max_by_key(|(r, _, _)| *r)
            .map(|(_, r, c)| (r, c))
            .unwrap_or_default();

        if wit_rows.is_empty() {
            // every sample evaluation was degenerate: seed with any nonzero
            // entry (one exists, the zero module was handled above)
            'seed: for i in 0..rows {
                for j in 0..cols {
                    if !self.mat.at(i, j).is_zero() {
                        wit_rows = vec![i];
                        wit_cols = vec![j];
                        break 'seed;
                    }
                }
            }
        }

        let max_rank = rows.min(cols);
        loop {
            let k = wit_rows.len();
            if k == max_rank {
                break;
            }
            let mut grew = false;
            'grow: for i in 0..rows {
                if wit_rows.contains(&i) {
                    continue;
                }
                for j in 0..cols {
                    if wit_cols.contains(&j) {
                        continue;
                    }
                    let mut r2 = wit_rows.clone();
                    let mut c2 = wit_cols.clone();
                    r2.push(i);
                    r2.sort_unstable();
                    c2.push(j);
                    c2.sort_unstable();
                    // fast path: a nonzero value at any sample point
                    // certifies the bordered minor is nonzero
                    let numeric_hit = evals
                        .iter()
                        .any(|m| !m.submatrix(&r2, &c2).det().is_zero());
                    if numeric_hit || !self.mat.submatrix(&r2, &c2).det().is_zero() {
                        wit_rows = r2;
                        wit_cols = c2;
                        grew = true;
                        break 'grow;
                    }
                }
            }
            if !grew {
                break;
            }
        }

        let idx = KIndex::new(wit_rows, wit_cols).expect("sorted witness");
        (idx.k(), Some(idx))
    }
}

/// A random rational point with one coordinate per registry slot.
pub fn random_point(reg: &Arc<VarRegistry>, rng: &mut impl Rng) -> Vec<Rat> {
    (0..reg.n_slots())
        .map(|_| {
            let mut v: i64 = rng.gen_range(-99..=99);
            if v == 0 {
                v = 17;
            }
            Rat::from_integer(v.into())
        })
        .collect()
}

/// Element-wise helpers for module vectors (columns of generator matrices).
pub fn vec_zero(reg: &Arc<VarRegistry>, p: usize) -> Vec<Polynomial> {
    vec![Polynomial::zero(reg); p]
}

pub fn vec_is_zero(v: &[Polynomial]) -> bool {
    v.iter().all(|e| e.is_zero())
}

pub fn vec_add(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Polynomial, v: &[Polynomial]) -> Vec<Polynomial> {
    v.iter().map(|x| c * x).collect()
}

/// A row functional `psi`: pairs with length-`p` vectors via
/// `psi . h = sum_i psi_i h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    reg: Arc<VarRegistry>,
    comps: Vec<Polynomial>,
}

impl Functional {
    pub fn new(reg: &Arc<VarRegistry>, comps: Vec<Polynomial>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidArgument("a functional needs positive length".into()));
        }
        for c in &comps {
            if !c.registry().same(reg) {
                return Err(Error::RegistryMismatch);
            }
        }
        Ok(Functional { reg: reg.clone(), comps })
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn p(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// `psi . h`.
    pub fn apply(&self, h: &[Polynomial]) -> Result<Polynomial> {
        if h.len() != self.comps.len() {
            return Err(Error::DimensionMismatch { expected: self.comps.len(), found: h.len() });
        }
        let mut acc = Polynomial::zero(&self.reg);
        for (c, v) in self.comps.iter().zip(h) {
            acc = &acc + &(c * v);
        }
        Ok(acc)
    }

    /// The ideal `psi . M`, generated by the pairings with M's columns.
    pub fn image(&self, m: &GenModule) -> Result<Ideal> {
        if m.p() != self.comps.len() {
            return Err(Error::DimensionMismatch { expected: self.comps.len(), found: m.p() });
        }
        let gens: Result<Vec<Polynomial>> =
            (0..m.n_cols()).map(|j| self.apply(&m.col(j))).collect();
        Ideal::new(&self.reg, gens?)
    }
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The cofactor functional of an augmented minor.
///
/// `idx` indexes the augmented matrix `[h | M]` and must select the first
/// column (`cols[0] == 0`); the remaining columns refer to M's columns
/// shifted down by one. The functional's component at row `I[l]` is the
/// `(l, 0)`-cofactor of the selected minor — these do not involve `h`, and
/// pairing with any `h` reproduces `det([h | M]_idx)` exactly.
pub fn cofactor_functional(m: &GenModule, idx: &KIndex) -> Result<Functional> {
    if idx.cols.first() != Some(&0) {
        return Err(Error::InvalidArgument(
            "cofactor functionals need a minor whose first column is the augmented one".into(),
        ));
    }
    idx.validate(m.p(), m.n_cols() + 1)?;
    let k = idx.k();
    let m_cols: Vec<usize> = idx.cols[1..].iter().map(|&j| j - 1).collect();
    let reg = m.registry();
    let mut comps = vec![Polynomial::zero(reg); m.p()];
    for (l, &row) in idx.rows.iter().enumerate() {
        let other_rows: Vec<usize> = idx
            .rows
            .iter()
            .copied()
            .filter(|&r| r != row)
            .collect();
        let cof = if k == 1 {
            Polynomial::one(reg)
        } else {
            m.matrix().submatrix(&other_rows, &m_cols).det()
        };
        comps[row] = if l % 2 == 0 { cof } else { -&cof };
    }
    Functional::new(reg, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn minor_ideals() {
        let (reg, p) = setup();
        let m = example_module(&reg);
        let i2 = m.minor_ideal(2).unwrap();
        assert_eq!(i2, Ideal::new(&reg, vec![p("x^2"), p("x*y"), p("y^2")]).unwrap());
        let i1 = m.minor_ideal(1).unwrap();
        assert_eq!(i1, Ideal::new(&reg, vec![p("x"), p("y")]).unwrap());
        assert!(m.minor_ideal(3).is_err());

        let diag = GenModule::new(
            &reg,
            vec![
                parse_vector(&reg, "(x, 0)").unwrap(),
                parse_vector(&reg, "(0, y)").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(diag.minor_ideal(2).unwrap(), Ideal::new(&reg, vec![p("x*y")]).unwrap());
    }

    #[test]
    fn augmentation() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        let h = parse_vector(&reg, "(x, 3*y)").unwrap();
        let am = m.augment(&h).unwrap();
        assert_eq!(am.n_cols(), 4);
        assert_eq!(am.col(0), h);
        assert_eq!(am.col(1), m.col(0));
        // the Example: I_2(h, M) = I_2(M)
        assert_eq!(am.minor_ideal(2).unwrap(), m.minor_ideal(2).unwrap());
        // a zero column adds no minors
        let zero = vec![Polynomial::zero(&reg), Polynomial::zero(&reg)];
        let az = m.augment(&zero).unwrap();
        assert_eq!(az.minor_ideal(2).unwrap(), m.minor_ideal(2).unwrap());
        assert_eq!(az.zero_column_lint(), vec![0]);
        assert!(m.augment(&[Polynomial::zero(&reg)]).is_err());
    }

    #[test]
    fn generic_rank_small_cases() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        assert_eq!(m.generic_rank(), 2);
        let (k, wit) = m.generic_rank_with_witness();
        assert_eq!(k, 2);
        let wit = wit.unwrap();
        assert!(!m.matrix().minor(&wit).unwrap().is_zero());

        let single = GenModule::new(&reg, vec![parse_vector(&reg, "(x, y)").unwrap()]).unwrap();
        assert_eq!(single.generic_rank(), 1);

        let zero = GenModule::new(
            &reg,
            vec![vec![Polynomial::zero(&reg), Polynomial::zero(&reg)]],
        )
        .unwrap();
        assert_eq!(zero.generic_rank(), 0);

        // proportional columns: rank 1 even though there are two generators
        let prop = GenModule::new(
            &reg,
            vec![
                parse_vector(&reg, "(x, y)").unwrap(),
                parse_vector(&reg, "(x^2, x*y)").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(prop.generic_rank(), 1);
    }

    #[test]
    fn rank_stability_for_a_member() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        // h = x * (first column) + (second column) is a member
        let h = parse_vector(&reg, "(x^2, x*y + x)").unwrap();
        assert_eq!(m.augment(&h).unwrap().generic_rank(), m.generic_rank());
        // and a generic non-member does not raise the rank past p
        let h2 = parse_vector(&reg, "(1, 0)").unwrap();
        assert_eq!(m.augment(&h2).unwrap().generic_rank(), 2);
    }

    #[test]
    fn cofactor_functional_reproduces_determinants() {
        let (reg, p) = setup();
        let m = example_module(&reg);
        // minor on rows {0,1}, augmented columns {0,1}: second column is
        // M's column 0 = (x, y)
        let idx = KIndex::new(vec![0, 1], vec![0, 1]).unwrap();
        let psi = cofactor_functional(&m, &idx).unwrap();
        assert_eq!(psi.comps(), &[p("y"), p("-x")]);
        let h = parse_vector(&reg, "(x, 3*y)").unwrap();
        assert_eq!(psi.apply(&h).unwrap(), p("-2*x*y"));
        // cross-check against the augmented minor itself
        let am = m.augment(&h).unwrap();
        assert_eq!(am.matrix().minor(&idx).unwrap(), p("-2*x*y"));
        // psi . M lands in I_2(M)
        let img = psi.image(&m).unwrap();
        assert_eq!(img, Ideal::new(&reg, vec![p("x^2"), p("y^2")]).unwrap());
        // zero pairs to zero
        let z = vec![Polynomial::zero(&reg), Polynomial::zero(&reg)];
        assert!(psi.apply(&z).unwrap().is_zero());
    }

    #[test]
    fn cofactor_functional_k1_is_projection() {
        let (reg, p) = setup();
        let m = example_module(&reg);
        let idx = KIndex::new(vec![1], vec![0]).unwrap();
        let psi = cofactor_functional(&m, &idx).unwrap();
        assert_eq!(psi.comps(), &[p("0"), p("1")]);
        let h = parse_vector(&reg, "(x, 3*y)").unwrap();
        assert_eq!(psi.apply(&h).unwrap(), p("3*y"));
    }

    #[test]
    fn cofactor_functional_rejects_bad_minors() {
        let (reg, _) = setup();
        let m = example_module(&reg);
        // first column not selected
        let idx = KIndex::new(vec![0, 1], vec![1, 2]).unwrap();
        assert!(cofactor_functional(&m, &idx).is_err());
        // column out of range for the augmented matrix
        let idx = KIndex::new(vec![0, 1], vec![0, 4]).unwrap();
        assert!(cofactor_functional(&m, &idx).is_err());
    }

    #[test]
    fn functional_linearity() {
        let (reg, p) = setup();
        let psi = Functional::new(&reg, vec![p("y"), p("-x")]).unwrap();
        let g = parse_vector(&reg, "(x^2, y)").unwrap();
        let h = parse_vector(&reg, "(y, x)").unwrap();
        let alpha = p("x + 2");
        let combo: Vec<Polynomial> = g
            .iter()
            .zip(&h)
            .map(|(a, b)| &(&alpha * a) + b)
            .collect();
        let lhs = psi.apply(&combo).unwrap();
        let rhs = &(&alpha * &psi.apply(&g).unwrap()) + &psi.apply(&h).unwrap();
        assert_eq!(lhs, rhs);
    }
}
