//! Verma modules over g and g^σ, their tensor product and its Π₀-weight blocks.

mod tensor;
mod triangular;
mod verma;

pub use tensor::{BlockOperator, Key, RealizedElement, State, TensorModule, WeightBlock};
pub use triangular::{Role, TriangularAlgebra};
pub use verma::{Monomial, Sparse, VermaModule};
