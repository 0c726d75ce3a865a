//! The normally-ordered calculus: canonical expressions, the bracket and
//! normally-ordered product engine, Jacobi-defect machinery, raw (unreduced)
//! terms, and the axiom verification suite.

pub mod algebra;
pub mod expr;
pub mod jacobi;
pub mod raw;
pub mod suite;

pub use algebra::{factorial, Algebra};
pub use expr::{DerivGen, Expression, Family, Generator, KPoly, Monomial};
pub use jacobi::LambdaPoly2;
pub use raw::{raw_of_expression, RawTerm};
pub use suite::axiom_suite;
