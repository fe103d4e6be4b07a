//! Exact enumeration of Hamiltonian path configurations on planar bicubic
//! and cubic maps, together with the tools that turn the counts into
//! growth-rate and exponent estimates.
//!
//! Two independent counting engines are provided: a left-to-right
//! [`transfer`] matrix over encoded arch stacks, and the [`updown`]
//! factorization that sums products of one-sided arch counts over vertex
//! orientations. [`cubic`] holds the uncolored closed forms used as exact
//! oracles.
//!
//! Sequence acceleration lives in [`extrapolate`]. The exponent formulas it
//! is compared against live in [`kpz`].

pub mod arch;
pub mod cubic;
pub mod ensemble;
pub mod error;
pub mod extrapolate;
pub mod golden;
pub mod kpz;
pub mod real;
pub mod sequence;
pub mod transfer;
pub mod updown;

pub use arch::{catalan, count_one_sided, Color, ColorSeq};
pub use ensemble::{EnsembleId, EnsembleSpec, EnsembleTag};
pub use error::{Error, Result};
pub use extrapolate::{Estimate, Quantity};
pub use real::Real;
pub use sequence::{CountSequence, Method};
