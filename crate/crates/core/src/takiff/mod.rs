//! Truncated current algebras, degree-2 enveloping-algebra elements and the
//! Segal–Sugawara identity.

mod modes;
pub mod residue;
mod series;
mod uelement;

pub use modes::{CurrentAlgebra, Mode, Orders, Site};
pub use uelement::UElement;
