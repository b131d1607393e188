//! Genus counts for orders in products of integer matrix rings, computed by
//! finite double-coset enumeration, and their application to a catalog of
//! small stable polyhedral atoms.
//!
//! Modules, bottom-up:
//!
//! * [`finite_ring`]: residues, units, gcd and Euler's totient.
//! * [`matrix_mod`]: matrices over `Z/m`, `GL(r, Z/m)`, and the image of `GL(r, Z)`.
//! * [`coset`]: explicit finite groups and double-coset partitions.
//! * [`order_genus`]: order specs, subring closures, and the genus engine.
//! * [`atoms`]: Moore, Chang and `A(v)` atoms with their genera.
//! * [`checks`]: the bundled self-check suite.

pub mod atoms;
pub mod checks;
pub mod coset;
pub mod error;
pub mod finite_ring;
pub mod matrix_mod;
pub mod order_genus;

pub use atoms::{Atom, AtomKind, EndoDescription};
pub use coset::{FiniteGroup, Verification};
pub use error::{Error, Limits, Result};
pub use finite_ring::{gcd, totient, units, Residue};
pub use matrix_mod::{elementary_generators, enumerate_gl, stable_image, MatModM};
pub use order_genus::{
    genus, genus_pullback_formula, genus_relative, pullback_spec, subring_closure, subring_units,
    GenusResult, OrderSpec,
};
