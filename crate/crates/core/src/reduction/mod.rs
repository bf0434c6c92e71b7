//! Compilers from group word problems to CI-implication and
//! network-coding instances, and witness construction for the latter.

mod ci;
mod witness;
mod words;

pub use ci::{
    check_ci_statements, ci_census, ci_to_entropic, ci_witness_model, cmi_expansion, compile_ci, eval_entropic, render,
    CIInstance, CIStatement, EntropicExport, EntropicTerm, VarWitness,
};
pub use witness::{
    build_witness, build_witness_forced, compile_network, network_census, verify_witness, CompiledNetwork, Witness,
    WitnessReport, WitnessSpec, WitnessSpecFile, DISTRIBUTION_ATOM_CAP,
};
pub use words::{
    add_group_inverses, normalize, GeneralBlock, GeneralWordProblem, Goal, ParsedWordProblem, Word, WordProblemFile,
    WordProblemInstance,
};

use thiserror::Error;

use crate::exactprob::DistError;
use crate::finalg::AlgError;
use crate::gadgets::GadgetError;
use crate::labeling::LabelError;
use crate::netmodel::NetError;
use crate::predicates::PredError;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0}")]
    BadIndex(String),
    #[error("empty word in {0}")]
    EmptyWord(String),
    #[error("assignment: {0}")]
    Assignment(String),
    #[error("x1 is the identity; the goal already holds and no completion map exists")]
    IdentityGoal,
    #[error("assignment violates relation {0}")]
    Relations(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Pred(#[from] PredError),
}
