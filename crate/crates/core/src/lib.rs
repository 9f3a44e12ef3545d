//! Cyclotomic Gaudin models with an irregular singularity at infinity: Lie
//! algebra data, Hamiltonians on tensor products of Verma modules, and the
//! Bethe ansatz, all checked numerically.
//!
//! The guide in `book/` walks through the modules in order.

pub mod bethe;
pub mod error;
pub mod hamiltonians;
pub mod lie;
pub mod linalg;
pub mod rep;
pub mod run;
pub mod takiff;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/currents.md")]
    mod currents {}
    #[doc = include_str!("../../../book/src/modules.md")]
    mod modules {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    mod hamiltonians {}
    #[doc = include_str!("../../../book/src/bethe.md")]
    mod bethe {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
