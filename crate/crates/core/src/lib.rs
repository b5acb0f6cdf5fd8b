//! Exact Frölicher–Nijenhuis calculus on Lie algebroids with polynomial
//! coefficients.

pub mod algebroid;
pub mod connections;
pub mod error;
pub mod fncalc;
pub mod oracle;
pub mod random;
pub mod scalars;
pub mod vforms;

pub use algebroid::{Algebroid, Section, StructureEntry, Target, ValidationReport, VectorBundle};
pub use connections::{ChristoffelEntry, Connection, CurvatureTensor};
pub use error::{Error, Result};
pub use fncalc::{
    cov_phi, default_connection, deform, fn_bracket, fn_bracket_default, lie_deriv, nijenhuis,
    r_extended, Deformation, GradedOperator,
};
pub use scalars::{parse_rational, Monomial, Poly, Rational};
pub use vforms::{insert, wedge, MultiIndex, VForm};
