//! Exact q-series engine and verifier for Beck's partition statistics.
//!
//! `NT(m,j,n)` is the total number of parts over partitions of `n` whose rank
//! is `m` mod `j`; `M_ω(m,j,n)` is the total number of ones over partitions of
//! `n` whose crank is `m` mod `j`. The crate expands the generating functions
//! behind these statistics exactly and checks the mod-5 and mod-7 identities,
//! congruences and parity densities that relate them.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fps;
pub mod identities;
pub mod partitions;
pub mod qseries;
pub mod ring;

pub use error::{Error, Result};
pub use fps::{Fps, Series};
pub use ring::{Coeff, Cyclo, CycloElem, Gf2, Rational, RingTag};
