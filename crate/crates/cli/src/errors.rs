use std::process::ExitCode;

use netci::exactprob::DistError;
use netci::finalg::AlgError;
use netci::gadgets::GadgetError;
use netci::labeling::LabelError;
use netci::netmodel::NetError;
use netci::predicates::PredError;
use netci::reduction::ReductionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Budget or atom cap refusal; says nothing about the answer.
    Refused,
    Malformed,
}

impl Status {
    pub fn from_bool(holds: bool) -> Status {
        if holds {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn code(self) -> ExitCode {
        ExitCode::from(match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Refused => 2,
            Status::Malformed => 3,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Refused => "refused",
            Status::Malformed => "malformed",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: impl Into<String>) -> CliError {
        CliError { status: Status::Malformed, message: message.into() }
    }

    fn new(cap: bool, message: String) -> CliError {
        CliError { status: if cap { Status::Refused } else { Status::Malformed }, message }
    }
}

fn dist_cap(e: &DistError) -> bool {
    matches!(e, DistError::AtomCap { .. })
}

fn alg_cap(e: &AlgError) -> bool {
    matches!(e, AlgError::Cap(_))
}

pub fn is_cap(e: &NetError) -> bool {
    match e {
        NetError::TooLarge(_) => true,
        NetError::Dist(d) => dist_cap(d),
        NetError::Alg(a) => alg_cap(a),
        _ => false,
    }
}

fn label_cap(e: &LabelError) -> bool {
    match e {
        LabelError::Dist(d) => dist_cap(d),
        LabelError::Alg(a) => alg_cap(a),
        _ => false,
    }
}

fn pred_cap(e: &PredError) -> bool {
    match e {
        PredError::Dist(d) => dist_cap(d),
        PredError::Alg(a) => alg_cap(a),
        _ => false,
    }
}

fn gadget_cap(e: &GadgetError) -> bool {
    match e {
        GadgetError::Dist(d) => dist_cap(d),
        GadgetError::Alg(a) => alg_cap(a),
        GadgetError::Net(n) => is_cap(n),
        _ => false,
    }
}

fn reduction_cap(e: &ReductionError) -> bool {
    match e {
        ReductionError::Gadget(g) => gadget_cap(g),
        ReductionError::Net(n) => is_cap(n),
        ReductionError::Alg(a) => alg_cap(a),
        ReductionError::Dist(d) => dist_cap(d),
        ReductionError::Label(l) => label_cap(l),
        ReductionError::Pred(p) => pred_cap(p),
        _ => false,
    }
}

macro_rules! from_core {
    ($($t:ty => $cap:expr),* $(,)?) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::new($cap(&e), e.to_string())
            }
        })*
    };
}

from_core! {
    DistError => dist_cap,
    AlgError => alg_cap,
    NetError => is_cap,
    LabelError => label_cap,
    PredError => pred_cap,
    GadgetError => gadget_cap,
    ReductionError => reduction_cap,
}
