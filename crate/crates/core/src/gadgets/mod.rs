//! Constraint-level subnetworks over the base network's `A1, A2, A3` and a
//! compiler from constraint lists to [`Network`]s.
//!
//! Every generated signal also carries a [`Formula`] describing what it
//! transmits in the linear witness, so the same fragment can be checked
//! symbolically (rank containment), on a group distribution, or compiled
//! into a network and handed to the netmodel backends.

mod catalog;
mod expr;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

pub use catalog::{
    base_network, chk_gadget, comp_gadget, conv13_gadget, conv32_gadget, end_gadget, icomp_gadget, id_pin_gadget,
    iend_gadget, ieq_gadget, inv_gadget, Sig,
};
pub use expr::{element_of, endo_matrix, EndoEnv, EndoExpr, Formula, GroupEnv, MatrixEnv, Term};

use crate::exactprob::{DerivedVar, DistError, JointDistribution};
use crate::finalg::AlgError;
use crate::netmodel::{Edge, LinearCode, Message, NetError, Network, Node};
use crate::predicates::PredicateReport;

/// The source messages every gadget reads.
pub const MESSAGES: [&str; 3] = ["A1", "A2", "A3"];

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("unresolved import `{name}` in `{scope}`")]
    UnresolvedImport { name: String, scope: String },
    #[error("signal `{0}` is generated more than once")]
    DuplicateGeneration(String),
    #[error("unsupported check target `{0}`")]
    UnsupportedTarget(String),
    #[error("invalid index pair ({0},{1})")]
    IndexPair(u8, u8),
    #[error("no formula for signal `{0}`")]
    MissingFormula(String),
    #[error("{0}")]
    Env(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintKind {
    /// A node with access to `access` emits `signal`.
    Generate {
        signal: String,
        access: Vec<String>,
        /// Edge exponent; the compile default when unset.
        exponent: Option<u8>,
    },
    /// A node with access to `access` must decode `messages`.
    Demand { messages: Vec<String>, access: Vec<String> },
    /// `signal` is generated from `access` and then checked to equal
    /// `target` up to relabeling.
    DerivedEq { signal: String, target: String, access: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Constraint {
    /// Dotted path of the gadget instance that emitted this constraint.
    pub scope: String,
    #[serde(flatten)]
    pub kind: ConstraintKind,
}

/// A list of coding constraints plus the witness formula of every signal
/// it generates.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Fragment {
    pub prefix: String,
    pub exports: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub formulas: BTreeMap<String, Formula>,
    /// Gadget instances by kind, nested ones included.
    pub census: BTreeMap<String, usize>,
    #[serde(skip)]
    stack: Vec<(String, BTreeMap<String, usize>)>,
}

impl Fragment {
    pub fn new(prefix: impl Into<String>) -> Fragment {
        let prefix = prefix.into();
        Fragment {
            stack: vec![(prefix.clone(), BTreeMap::new())],
            prefix,
            ..Default::default()
        }
    }

    pub(crate) fn path(&self) -> &str {
        self.stack.last().map_or(self.prefix.as_str(), |s| s.0.as_str())
    }

    /// Runs `f` inside a child scope named after `kind`; repeated kinds
    /// under one parent get `_2`, `_3`, … suffixes.
    pub(crate) fn within<R>(&mut self, kind: &str, f: impl FnOnce(&mut Fragment) -> R) -> R {
        *self.census.entry(kind.to_string()).or_default() += 1;
        let child = {
            let (path, counts) = self.stack.last_mut().expect("root scope");
            let c = counts.entry(kind.to_string()).or_default();
            *c += 1;
            let name = if *c == 1 { kind.to_string() } else { format!("{kind}_{c}") };
            if path.is_empty() {
                name
            } else {
                format!("{path}.{name}")
            }
        };
        self.stack.push((child, BTreeMap::new()));
        let r = f(self);
        self.stack.pop();
        r
    }

    fn push(&mut self, kind: ConstraintKind) {
        let scope = self.path().to_string();
        self.constraints.push(Constraint { scope, kind });
    }

    /// Generates a fresh signal `<path>.<role>`.
    pub(crate) fn generate(&mut self, role: &str, access: &[&str], formula: Formula) -> String {
        let name = format!("{}.{role}", self.path());
        self.generate_named(&name, access, formula, None);
        name
    }

    pub fn generate_named(&mut self, name: &str, access: &[&str], formula: Formula, exponent: Option<u8>) {
        self.push(ConstraintKind::Generate {
            signal: name.to_string(),
            access: access.iter().map(|s| s.to_string()).collect(),
            exponent,
        });
        self.formulas.insert(name.to_string(), formula);
    }

    pub(crate) fn demand(&mut self, messages: &[&str], access: &[&str]) {
        self.push(ConstraintKind::Demand {
            messages: messages.iter().map(|s| s.to_string()).collect(),
            access: access.iter().map(|s| s.to_string()).collect(),
        });
    }

    pub(crate) fn derived_eq(&mut self, role: &str, target: &str, access: &[&str], formula: Formula) -> Result<String, GadgetError> {
        chk_demands(target, "")?;
        *self.census.entry("derived_eq".into()).or_default() += 1;
        *self.census.entry("chk".into()).or_default() += 1;
        let name = format!("{}.{role}", self.path());
        self.push(ConstraintKind::DerivedEq {
            signal: name.clone(),
            target: target.to_string(),
            access: access.iter().map(|s| s.to_string()).collect(),
        });
        self.formulas.insert(name.clone(), formula);
        Ok(name)
    }

    /// Signals read by the fragment but generated elsewhere.
    pub fn imports(&self) -> Vec<String> {
        let generated: BTreeSet<&str> = self.constraints.iter().filter_map(|c| generated_signal(&c.kind)).collect();
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            let chk_reads = matches!(c.kind, ConstraintKind::DerivedEq { .. }).then(|| "A123".to_string());
            for a in access_of(&c.kind).iter().chain(&chk_reads) {
                if !MESSAGES.contains(&a.as_str()) && !generated.contains(a.as_str()) {
                    out.insert(a.clone());
                }
            }
        }
        out.into_iter().collect()
    }

    /// Nodes this fragment compiles to.
    pub fn node_count(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| match c.kind {
                ConstraintKind::DerivedEq { .. } => 4,
                _ => 1,
            })
            .sum()
    }
}

fn generated_signal(k: &ConstraintKind) -> Option<&str> {
    match k {
        ConstraintKind::Generate { signal, .. } | ConstraintKind::DerivedEq { signal, .. } => Some(signal),
        ConstraintKind::Demand { .. } => None,
    }
}

fn access_of(k: &ConstraintKind) -> &[String] {
    match k {
        ConstraintKind::Generate { access, .. }
        | ConstraintKind::Demand { access, .. }
        | ConstraintKind::DerivedEq { access, .. } => access,
    }
}

/// Demands checking `x ι= target` for a pairwise sum `target = A_a + A_b`
/// with `c` the remaining index: `A_a ← {A_b, x}`, `A_b ← {A_a, x}`,
/// `A_c ← {A123, x}`.
pub(crate) fn chk_demands(target: &str, x: &str) -> Result<[(String, [String; 2]); 3], GadgetError> {
    let (a, b) = match target {
        "A12" => (1, 2),
        "A13" => (1, 3),
        "A23" => (2, 3),
        _ => return Err(GadgetError::UnsupportedTarget(target.to_string())),
    };
    let c = 6 - a - b;
    let s = |i: u8| format!("A{i}");
    Ok([
        (s(a), [s(b), x.to_string()]),
        (s(b), [s(a), x.to_string()]),
        (s(c), ["A123".to_string(), x.to_string()]),
    ])
}

enum NodeSpec {
    Generate { signal: String, access: Vec<String>, exponent: Option<u8> },
    Demand { messages: Vec<String>, access: Vec<String> },
}

fn flatten(fragments: &[Fragment]) -> Result<Vec<(String, NodeSpec)>, GadgetError> {
    let mut out = Vec::new();
    for c in fragments.iter().flat_map(|f| &f.constraints) {
        match &c.kind {
            ConstraintKind::Generate { signal, access, exponent } => out.push((
                c.scope.clone(),
                NodeSpec::Generate { signal: signal.clone(), access: access.clone(), exponent: *exponent },
            )),
            ConstraintKind::Demand { messages, access } => out.push((
                c.scope.clone(),
                NodeSpec::Demand { messages: messages.clone(), access: access.clone() },
            )),
            ConstraintKind::DerivedEq { signal, target, access } => {
                out.push((
                    c.scope.clone(),
                    NodeSpec::Generate { signal: signal.clone(), access: access.clone(), exponent: None },
                ));
                let scope = format!("{}.chk", c.scope);
                for (m, acc) in chk_demands(target, signal)? {
                    out.push((scope.clone(), NodeSpec::Demand { messages: vec![m], access: acc.to_vec() }));
                }
            }
        }
    }
    Ok(out)
}

/// Compiles fragments into a network with messages `A1, A2, A3`.
///
/// Each `Generate` and `Demand` becomes one node (a `DerivedEq` becomes a
/// `Generate` node plus the three check demands). Each use of a signal is
/// its own edge `"<signal>-><node>"`. Messages and edges get `exponent`
/// unless a `Generate` sets its own.
pub fn compile(fragments: &[Fragment], exponent: u8) -> Result<Network, GadgetError> {
    let specs = flatten(fragments)?;
    let mut generator: BTreeMap<&str, String> = BTreeMap::new();
    let mut edge_exp: BTreeMap<&str, u8> = BTreeMap::new();
    let mut ids = Vec::with_capacity(specs.len());
    let mut per_scope: BTreeMap<&str, usize> = BTreeMap::new();
    for (scope, s) in &specs {
        let id = match s {
            NodeSpec::Generate { signal, exponent: e, .. } => {
                let id = format!("gen:{signal}");
                if MESSAGES.contains(&signal.as_str()) || generator.insert(signal, id.clone()).is_some() {
                    return Err(GadgetError::DuplicateGeneration(signal.clone()));
                }
                edge_exp.insert(signal, e.unwrap_or(exponent));
                id
            }
            NodeSpec::Demand { .. } => {
                let k = per_scope.entry(scope).or_default();
                *k += 1;
                format!("dem:{scope}#{k}")
            }
        };
        ids.push(id);
    }
    let mut nodes = Vec::with_capacity(specs.len());
    let mut edges = Vec::new();
    for ((scope, s), id) in specs.iter().zip(&ids) {
        let (access, demands) = match s {
            NodeSpec::Generate { access, .. } => (access, Vec::new()),
            NodeSpec::Demand { messages, access } => (access, messages.clone()),
        };
        let mut has = Vec::new();
        let mut seen = BTreeSet::new();
        for a in access {
            if !seen.insert(a) {
                continue;
            }
            if MESSAGES.contains(&a.as_str()) {
                has.push(a.clone());
                continue;
            }
            let tail = generator.get(a.as_str()).ok_or_else(|| GadgetError::UnresolvedImport {
                name: a.clone(),
                scope: scope.clone(),
            })?;
            edges.push(Edge {
                id: format!("{a}->{id}"),
                tail: tail.clone(),
                head: id.clone(),
                exponent: edge_exp[a.as_str()],
                signal: Some(a.clone()),
            });
        }
        nodes.push(Node { id: id.clone(), has, demands });
    }
    let net = Network {
        messages: MESSAGES.iter().map(|m| Message { name: m.to_string(), exponent }).collect(),
        nodes,
        edges,
    };
    let defects = net.validate();
    if !defects.is_empty() {
        return Err(NetError::Invalid(defects).into());
    }
    Ok(net)
}

/// All formulas of the given fragments.
pub fn merged_formulas(fragments: &[Fragment]) -> BTreeMap<String, Formula> {
    fragments.iter().flat_map(|f| f.formulas.clone()).collect()
}

/// `A1, A2, A3` uniform on the group with every formula signal derived.
pub fn fragment_distribution(fragments: &[Fragment], env: &GroupEnv) -> Result<JointDistribution, GadgetError> {
    let n = env.group.order() as u32;
    let derived = merged_formulas(fragments)
        .into_iter()
        .map(|(name, f)| {
            Ok(DerivedVar {
                table: env.formula_table(&f)?,
                name,
                cardinality: n,
            })
        })
        .collect::<Result<Vec<_>, GadgetError>>()?;
    Ok(JointDistribution::uniform_functional(&[("A1", n), ("A2", n), ("A3", n)], derived)?)
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Checks every constraint of the fragments directly on a distribution
/// that contains all their signals.
pub fn check_constraints(fragments: &[Fragment], d: &JointDistribution) -> Result<PredicateReport, GadgetError> {
    let name = "coding constraints";
    let fd = |y: &[&str], x: &[&str], scope: &str| -> Result<Option<PredicateReport>, GadgetError> {
        Ok((!d.is_function_of(y, x)?)
            .then(|| PredicateReport::fail(name, format!("{scope}: ({}) ι≤ ({})", y.join(" "), x.join(" ")))))
    };
    for c in fragments.iter().flat_map(|f| &f.constraints) {
        let failed = match &c.kind {
            ConstraintKind::Generate { signal, access, .. } => fd(&[signal], &refs(access), &c.scope)?,
            ConstraintKind::Demand { messages, access } => fd(&refs(messages), &refs(access), &c.scope)?,
            ConstraintKind::DerivedEq { signal, target, access } => match fd(&[signal], &refs(access), &c.scope)? {
                Some(r) => Some(r),
                None => {
                    let mut r = None;
                    for (m, acc) in chk_demands(target, signal)? {
                        r = fd(&[&m], &refs(&acc), &format!("{}.chk", c.scope))?;
                        if r.is_some() {
                            break;
                        }
                    }
                    r
                }
            },
        };
        if let Some(r) = failed {
            return Ok(r);
        }
    }
    Ok(PredicateReport::pass(name))
}

/// Linear code on a compiled network in which every edge carries its
/// signal's formula, evaluated through `env`. Each message is one block of
/// dimension `env.dim`.
pub fn witness_code(
    net: &Network,
    formulas: &BTreeMap<String, Formula>,
    env: &MatrixEnv,
    q: u64,
) -> Result<LinearCode, GadgetError> {
    let mut cache: BTreeMap<&str, crate::finalg::FieldMatrix> = BTreeMap::new();
    let mut edges = BTreeMap::new();
    for e in &net.edges {
        let sig = e.signal.as_deref().ok_or_else(|| GadgetError::MissingFormula(e.id.clone()))?;
        if !cache.contains_key(sig) {
            let f = formulas.get(sig).ok_or_else(|| GadgetError::MissingFormula(sig.to_string()))?;
            cache.insert(sig, env.formula_matrix(f)?);
        }
        edges.insert(e.id.clone(), cache[sig].clone());
    }
    Ok(LinearCode {
        field: env.field.clone(),
        q,
        message_dims: net.messages.iter().map(|m| (m.name.clone(), env.dim)).collect(),
        edges,
    })
}
