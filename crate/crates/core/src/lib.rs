//! Combinatorics and numerics of the tensor HCIZ integral
//! `∫ dU exp(t·Tr(A U B U*))` over `U = U₁⊗…⊗U_D` with independent Haar factors.
//!
//! The crate is organised bottom-up:
//!
//! * [`perm`] — permutations, tuples of permutations, set partitions, the
//!   non-crossing order and the Moebius function of the non-crossing lattice;
//! * [`graphs`] — edge-colored graphs attached to tuples and pairs of tuples:
//!   face counts, degrees, genus, melonic tests, `Δ`, `Box`, chain-quadrangle
//!   reduction;
//! * [`coeff`] — exact leading-order cumulant coefficients and an exact
//!   Weingarten oracle;
//! * [`regimes`] — scaling ansätze, the regime classifier, leading-order
//!   predicates and enumerations, brute-force oracles;
//! * [`tensors`] — dense operators, trace invariants, state constructors and
//!   the scaling fit;
//! * [`montecarlo`] — Haar sampling and cumulant estimation.

pub mod coeff;
pub mod error;
pub mod exact;
pub mod graphs;
pub mod montecarlo;
pub mod perm;
pub mod regimes;
pub mod tensors;

pub use error::{Error, Result};
pub use exact::ExactRational;
pub use perm::{PermTuple, Permutation, SetPartition};

#[cfg(test)]
mod tests;
