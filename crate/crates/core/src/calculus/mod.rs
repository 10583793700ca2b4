//! Polynomials, scaled monomials, simplex decompositions and quadrature.

pub mod decompose;
pub mod field;
pub mod monomials;
pub mod polynomial;
pub mod quadrature;

pub use decompose::{
    cell_integral_exact, decompose_cell, decompose_face, domain_integral_exact, integrate, integrate_vector,
    quadrature_rule, Entity, Tetrahedron, Triangle,
};
pub use field::{FnField, ScalarField, VectorField};
pub use monomials::{
    decompose_constant_vector, decompose_in_plane, graded_lex, InPlaneAffine, RotDecomposition, ScaledMonomialBasis,
};
pub use polynomial::{PolyVector, Polynomial};
pub use quadrature::QuadratureRule;
