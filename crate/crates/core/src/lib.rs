//! Exact symbolic toolkit for the jet correspondence of variations of Hodge
//! structure.
//!
//! Starting from algebraic connection data `(H, F, ∇)` on an affine chart the
//! crate computes flat-frame derivative polynomials, jet evaluation maps,
//! the torsor evaluation map, germ transport matrices and differential
//! constraint tests. All arithmetic is over Q and exact.

pub mod connection;
pub mod constraints;
pub mod correspondence;
pub mod error;
pub mod gcd;
pub mod ideal;
pub mod jets;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;

pub use connection::{curvature, hyperelliptic_data, validate, AlgebraicData, Chart, CurvatureMatrix};
pub use constraints::{
    constraint_test, germ_contained, germ_quotient_dimension, hilbert_count, in_gl_orbit, jet_in_variety,
    ConstraintVariety, GermIdeal, OrbitResult,
};
pub use correspondence::{
    alpha, apply_transition, apply_transition_jet, beta, compute_xi, matrix_jet_inverse, pullback_function_germ,
    tau_germ, GermMatrix, MatrixJet, XiTable,
};
pub use error::{Error, Result};
pub use ideal::{GroebnerBasis, Ideal};
pub use jets::{compose_poly, compose_ratfunc, Jet, RationalMap};
pub use linalg::QMatrix;
pub use poly::{vars, ExactPoly, MonomialOrder, Vars};
pub use ratfunc::ExactRatFunc;
pub use rational::Rational;
pub use series::TruncatedSeries;
