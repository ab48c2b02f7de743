//! Principal Chebotarev densities.
//!
//! The crate computes, for a Galois extension `K/k` with Hilbert class field
//! `H`, the density of primes of `k` with a prescribed Frobenius class in
//! `Gal(K/k)` whose primes above factor into principal ideals of a bounded
//! order. Densities are computed exactly from the group extension
//! `1 -> Cl_K -> Gal(H/k) -> Gal(K/k) -> 1` and empirically by scanning primes
//! in concrete number fields, and a bounded prime scan certifies (under GRH)
//! that this extension does not split.

pub mod abelian;
pub mod arith;
pub mod corpus;
pub mod density;
pub mod extension;
pub mod numberfield;
pub mod verifier;
