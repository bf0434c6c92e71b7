//! Exact conditional-independence predicates, finite-field and group
//! kernels, network-coding gadgets, and the compilers that turn group word
//! problems into network-coding and CI-implication instances.

pub mod exactprob;
pub mod finalg;
pub mod labeling;
pub mod predicates;
pub mod netmodel;
pub mod gadgets;
pub mod reduction;
