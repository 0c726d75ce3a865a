//! Exact symbolic engine for the SUSY W-algebras attached to the principal
//! odd nilpotent of gl(n+1|n).
//!
//! The crate builds, over exact rational arithmetic in the level `k`:
//!
//! * the basic Lie superalgebra gl(n+1|n) with its principal osp(1|2)
//!   embedding and rescaled supertrace form ([`liesuper`]),
//! * the SUSY lambda-bracket calculus for the associated current/charged-ghost
//!   complex ([`lca`], [`engine`]),
//! * the BRST differential and its cohomology identities ([`brst`]),
//! * the free generators `W_0, ..., W_{2n+1}` of the W-algebra as coefficients
//!   of a non-commutative column determinant, together with closedness,
//!   leading-term and Miura checks ([`wgen`]),
//! * a canonical text/JSON representation with a parser ([`exprio`]).
//!
//! ## Design
//!
//! All expressions are stored canonically: right-nested normally-ordered
//! words, sorted by a fixed total order on generator symbols, with
//! quasi-commutativity / quasi-associativity corrections applied eagerly.
//! Equality of canonical forms is therefore structural equality, and every
//! verification in the crate reduces to an exact comparison with zero.
//! Coefficients are polynomials in the level `k` over `BigRational`;
//! no floating point is used anywhere.

pub mod brst;
pub mod engine;
pub mod exprio;
pub mod lca;
pub mod liesuper;
pub mod report;
pub mod wgen;

pub use brst::{complex, identity_suite, Complex};
pub use engine::{Algebra, DerivGen, Expression, Family, Generator, KPoly, Monomial, RawTerm};
pub use lca::{BracketTable, LambdaPoly, Sector};
pub use liesuper::{BasisElem, FormMode, LieElem, PrincipalData};
pub use report::{Report, ReportItem};
pub use wgen::{w_context, walgebra_suite, WContext};

/// Exact rational scalar used throughout the crate.
pub type Rat = num::BigRational;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A matrix index or rank parameter is outside the valid range.
    #[error("{0}")]
    BadIndex(String),
    /// An operation that requires homogeneous input received a mixed one.
    #[error("non-homogeneous input: {0}")]
    NonHomogeneous(String),
    /// An element required to lie in the non-positive part of the grading
    /// has components of positive grade.
    #[error("{0}")]
    PositiveGrade(String),
    /// An n-th product was requested outside the supported range.
    #[error("{0}")]
    BadProduct(String),
    /// Text could not be parsed as an expression.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        /// 1-based line of the offending token.
        line: usize,
        /// 1-based column of the offending token.
        col: usize,
        /// Explanation of what was expected.
        msg: String,
    },
    /// An expression mixes generator families from different sectors, or
    /// uses a family the current context does not provide.
    #[error("{0}")]
    Sector(String),
}

/// Convenience alias for crate results.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Construct an exact rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Construct the exact rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// `(-1)^e` as a rational.
pub(crate) fn sgn(e: i64) -> Rat {
    if e.rem_euclid(2) == 1 {
        rat(-1)
    } else {
        rat(1)
    }
}
