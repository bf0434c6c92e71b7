//! Exact finite joint distributions.
//!
//! Probabilities are kept as integer weights over a common denominator, so
//! every independence and functional-dependence decision reduces to integer
//! identities. Entropy is computed in `f64` but only for reporting and for
//! entropic-vector export.

mod dist;
mod io;
mod model;

pub use dist::{DerivedVar, JointDistribution, Variable};
pub use io::{AtomRecord, DistFile, VariableRecord};
pub use model::{FunctionalModel, ModelVar};

use thiserror::Error;

/// Arbitrary precision rational used at the API boundary.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has cardinality 0")]
    ZeroCardinality(String),
    #[error("atom {atom} has {got} values, expected {expected}")]
    Arity { atom: usize, got: usize, expected: usize },
    #[error("atom {atom}: value {value} out of range for `{var}` (cardinality {cardinality})")]
    ValueOutOfRange {
        atom: usize,
        var: String,
        value: u32,
        cardinality: u32,
    },
    #[error("atom {0} has a negative probability")]
    NegativeProbability(usize),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("common denominator {0} does not fit in 64 bits")]
    DenominatorTooLarge(String),
    #[error("variable set must be nonempty")]
    EmptySet,
    #[error("table for `{name}` has {got} entries, expected {expected}")]
    TableSize {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("would enumerate {needed} atoms, cap is {cap}")]
    AtomCap { needed: u128, cap: u128 },
    #[error("malformed probability `{0}`")]
    BadProbability(String),
}

/// Exhaustive list of nonempty subsets of `0..k` in binary-counter order:
/// subset number `m` (1-based) contains element `i` iff bit `i` of `m` is set.
pub fn subset_order(k: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(k < 32, "subset enumeration limited to k < 32");
    (1u32..(1u32 << k)).map(move |m| (0..k).filter(|i| m >> i & 1 == 1).collect())
}

/// Entropic vector of `order`, indexed by [`subset_order`].
pub fn entropic_vector(d: &JointDistribution, order: &[&str]) -> Result<Vec<f64>, DistError> {
    for (i, a) in order.iter().enumerate() {
        if order[..i].contains(a) {
            return Err(DistError::DuplicateVariable(a.to_string()));
        }
        d.index_of(a)?;
    }
    subset_order(order.len())
        .map(|s| {
            let names: Vec<&str> = s.iter().map(|&i| order[i]).collect();
            d.entropy(&names)
        })
        .collect()
}
