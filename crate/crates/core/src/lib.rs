//! Exact symbolic computation for the Lipschitz-style saturations of a
//! module of vector fields over a polynomial ring.
//!
//! Everything is computed over the rationals — polynomial arithmetic,
//! linear algebra, minors, curve pullbacks — with no floating point and
//! no Groebner engine. Verdicts are three-valued: a membership claim is
//! either *certified in* (with a replayable combination, Newton-hull
//! datum or minor reduction), *certified out* (with a replayable witness
//! such as a rank jump or a test curve along which orders fail), or
//! *unknown* (with a list of what was tried). Certificates and witnesses
//! can be re-verified independently of the search that produced them.
//!
//! The library is organised around:
//!
//! - [`poly`], [`ideal`], [`genmodule`]: polynomials over a fixed
//!   variable registry, ideals with canonical generator lists, and
//!   submodules of a free module presented by generator matrices;
//! - [`double`]: the doubled ring with primed variables, doubles of
//!   elements and modules, diagonal ideals, and the determinantal
//!   identities connecting minors of doubled matrices to products of
//!   minors;
//! - [`membership`], [`closure`]: exact membership over the polynomial
//!   ring and integral-closure tests driven by Newton polyhedra and
//!   families of test curves;
//! - [`saturation`]: the three saturations, their chain reconciliation,
//!   the structural inclusion lemmas with constructed certificates, and
//!   the two-hypothesis criterion under which the saturations agree;
//! - [`suite`]: a seeded randomized property suite over small random
//!   modules.

pub mod closure;
pub mod curve;
pub mod double;
pub mod error;
pub mod gcd;
pub mod genmodule;
pub mod ideal;
pub mod linalg;
pub mod mat;
pub mod membership;
pub mod monomial;
pub mod newton;
pub mod parse;
pub mod poly;
pub mod ratfun;
pub mod saturation;
pub mod scalar;
pub mod snf;
pub mod suite;
pub mod tpoly;
pub mod vars;

/// The exact coefficient field: arbitrary-precision rationals.
pub type Rat = num_rational::BigRational;

pub use closure::{ClosureOptions, InCertificate, OutWitness, UnknownReport, Verdict};
pub use curve::{Curve, CurveFamily};
pub use double::{double_module, double_vector, diagonal_ideal, DoubledModule, Family};
pub use error::{Error, Result};
pub use genmodule::{cofactor_functional, Functional, GenModule};
pub use ideal::Ideal;
pub use mat::{k_subsets, KIndex, Mat};
pub use parse::{parse_polynomial, parse_vector};
pub use poly::Polynomial;
pub use ratfun::RatFun;
pub use saturation::{
    inclusion_lemma_check, prop417_check, sat1_test, sat2_test, sat3_test, sat_report,
    InclusionLemma, InclusionReport, LemmaReport, Prop417Report, SatOptions, SatReport,
};
pub use suite::{run_suite, SuiteConfig, SuiteReport};
pub use tpoly::{CurvePoly, TPoly};
pub use vars::VarRegistry;
