//! Exact computational toolkit for word growth in quotients of free groups.
//!
//! The toolkit works with a free group of rank `m`, a homomorphism onto the
//! integers, and pluggable word-problem oracles for quotients `G`. On top of
//! those it builds:
//!
//! * good-word enumeration and counting ([`words`]),
//! * shortest-relation (girth) certification by meet-in-the-middle search
//!   ([`quotient`]),
//! * the edge-flow representation of words over the Cayley graph of `G`,
//!   which separates elements modulo the derived subgroup of the kernel
//!   ([`magnus`]),
//! * exact sphere/ball enumeration plus self-avoiding-path and distinctness
//!   experiments ([`growth`]),
//! * closed-form growth lower bounds and their validity predicates
//!   ([`bounds`]).

pub mod bounds;
pub mod config;
pub mod error;
pub mod growth;
pub mod magnus;
pub mod quotient;
pub mod words;

pub use error::{Error, Result};
