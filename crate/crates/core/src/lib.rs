//! Exact-arithmetic toolkit for finite-dimensional algebraic structures
//! presented by structure tensors: invariant fields, automorphism Lie
//! algebras, polynomial identity spaces, and cocycle invariants.

pub mod autlie;
pub mod closure;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod morphcalc;
pub mod nt;
pub mod perm;
pub mod poly;
pub mod scalars;
pub mod structures;
pub mod tensors;
pub mod traceinv;

pub use error::{CoreError, Result};
