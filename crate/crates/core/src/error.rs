use thiserror::Error;

use crate::ensemble::EnsembleId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{engine} does not support ensemble {ensemble}")]
    UnsupportedEnsemble { engine: &'static str, ensemble: EnsembleId },

    #[error("ensemble {ensemble} is defined for N >= {min}, got N = {n}")]
    SizeBelowMinimum { ensemble: EnsembleId, n: usize, min: usize },

    #[error("raw count {raw} of {ensemble} at N = {n} is not divisible by {divisor}")]
    Indivisible { ensemble: EnsembleId, n: usize, raw: String, divisor: u64 },

    #[error("arch stack depth {depth} exceeds the {limit}-arch limit of the state encoding")]
    StackTooDeep { depth: usize, limit: usize },

    #[error("sequence has {got} terms, {need} required")]
    TooFewTerms { got: usize, need: usize },

    #[error("sequence term at N = {n} is zero")]
    ZeroTerm { n: i64 },

    #[error("logarithm argument at N = {n} is not positive")]
    NonPositiveLog { n: i64 },

    #[error("acceleration order {k} needs at least {need} terms, sequence has {got}")]
    OrderTooLarge { k: usize, need: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
