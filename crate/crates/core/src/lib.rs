//! Exact, machine-checkable certificates for the homological
//! characterisations of amenability.
//!
//! The crate builds the bounded cochain complex, the ℓ¹ and uniformly finite
//! chain complexes and the duality pairing between them over free groups,
//! free abelian groups and finite groups. On the non-amenable side it
//! verifies the boundary-flow cycle on the Cayley tree of `F_2` whose pairing
//! with the Johnson cocycle is `2`; on the amenable side it produces Følner
//! sets and decides the Block–Weinberger class of finite groups by exact
//! elimination. All arithmetic is exact rational arithmetic.

pub mod amenability;
pub mod cli;
pub mod complexes;
pub mod error;
pub mod functions;
pub mod groups;
pub mod pairing;
pub mod rational;
pub mod sample;
pub mod witnesses;

pub use error::{Error, Result};
pub use rational::Rational;
