//! Simple Lie algebras, finite-order automorphisms and derived invariants.

mod algebra;
mod automorphism;
mod invariants;

pub use algebra::{BasisKind, Series, SimpleLieAlgebra, Weight};
pub use automorphism::{default_omega, is_primitive_root, omega_exponent, Automorphism};
pub use invariants::{
    casimir_tensor, critical_level, element_f, lambda0_roots, lambda0_trace, scalar_k,
    DualBasisPair,
};
