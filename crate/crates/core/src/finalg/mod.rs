//! Finite fields GF(p) and GF(p²), dense matrices over them, finite groups
//! by Cayley table, abelian groups with their endomorphisms, and the left
//! regular representation.

mod abelian;
mod field;
mod group;
mod lrr;
mod matrix;

pub use abelian::{brute_force_endos, enumerate_endos, enumerate_endos_capped, AbelianGroup, Endo, ENDO_ORDER_CAP};
pub use field::Field;
pub use group::{check_relations, goal_is_identity, CayleyFile, CayleyGroup};
pub use lrr::{completion_map, lrr, lrr_rank_check, RankEntry, RankReport};
pub use matrix::{Echelon, FieldMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("{0} is not a supported prime")]
    NotPrime(u32),
    #[error("malformed field spec `{0}` (expected gf(p) or gf(p^2))")]
    FieldSpec(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid element: {0}")]
    Element(String),
    #[error("invalid group: {0}")]
    Group(String),
    #[error("endomorphisms act on different groups")]
    GroupMismatch,
    #[error("map is not additive at ({a}, {b})")]
    NotAdditive { a: u32, b: u32 },
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("no completion: {0}")]
    Completion(String),
}
