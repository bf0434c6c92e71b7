//! Networks, codes and the coding constraint.
//!
//! A network is a DAG multigraph whose nodes may access some source
//! messages directly and may demand others. Every message and edge carries
//! an alphabet exponent `m ∈ {1, 2}`: with base alphabet size `q` it holds
//! `q^m` values, so an exponent-2 edge stands for two parallel unit edges.

mod code;
mod linear;
mod solve;

pub use code::{eval_code, product_code, to_joint_dist, Code, CodeReport, Evaluator};
pub use linear::{verify_linear, verify_linear_distribution, LinearCode, LinearCodeFile, LinearEval, NodeRankDiagnosis};
pub use solve::{brute_force_solve, counting_precheck, sweep_powers, SolveOptions, SolveOutcome, DEFAULT_BUDGET};

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactprob::DistError;
use crate::finalg::AlgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("invalid network: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("no table for edge `{0}`")]
    MissingTable(String),
    #[error("table for edge `{edge}` has {got} entries, expected {expected}")]
    TableSize { edge: String, got: usize, expected: usize },
    #[error("edge `{edge}`: value {value} exceeds alphabet {alphabet}")]
    TableValue { edge: String, value: u64, alphabet: u64 },
    #[error("alphabet size must be at least 2 (got {0})")]
    Alphabet(u64),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Dimension(String),
    #[error("{0}")]
    TooLarge(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

fn one() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub name: String,
    #[serde(default = "one")]
    pub exponent: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    /// Messages the node reads directly.
    #[serde(default)]
    pub has: Vec<String>,
    #[serde(default)]
    pub demands: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    #[serde(default = "one")]
    pub exponent: u8,
    /// Name of the signal the edge is meant to carry, when the network was
    /// compiled from constraints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub messages: Vec<Message>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Index structure of a validated network.
///
/// Table domains are laid out as the tail node's `has` messages (in the
/// node's order) followed by its in-edges (in declaration order), mixed
/// radix with the first component most significant.
#[derive(Clone, Debug)]
pub struct Layout {
    pub node_index: HashMap<String, usize>,
    pub edge_index: HashMap<String, usize>,
    pub message_index: HashMap<String, usize>,
    pub node_has: Vec<Vec<usize>>,
    pub node_demands: Vec<Vec<usize>>,
    pub node_in: Vec<Vec<usize>>,
    pub node_out: Vec<Vec<usize>>,
    /// Nodes in topological order, ties broken by declaration order.
    pub node_order: Vec<usize>,
    /// Edges sorted by the topological position of their tail, then by
    /// declaration order.
    pub edge_order: Vec<usize>,
}

impl Network {
    pub fn from_json(s: &str) -> Result<Network, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn message(&self, name: &str) -> Option<&Message> {
        self.messages.iter().find(|m| m.name == name)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Structural defects; an empty list means the network is well formed.
    /// Whether demands can actually be met is left to the solvers.
    pub fn validate(&self) -> Vec<String> {
        let mut defects = Vec::new();
        let mut seen = BTreeSet::new();
        for m in &self.messages {
            if !seen.insert(m.name.as_str()) {
                defects.push(format!("duplicate message `{}`", m.name));
            }
            if !(1..=2).contains(&m.exponent) {
                defects.push(format!("message `{}` has exponent {} (must be 1 or 2)", m.name, m.exponent));
            }
        }
        let mut nodes = BTreeSet::new();
        for n in &self.nodes {
            if !nodes.insert(n.id.as_str()) {
                defects.push(format!("duplicate node `{}`", n.id));
            }
            for m in n.has.iter().chain(&n.demands) {
                if !seen.contains(m.as_str()) {
                    defects.push(format!("node `{}` references unknown message `{m}`", n.id));
                }
            }
        }
        let mut edges = BTreeSet::new();
        for e in &self.edges {
            if !edges.insert(e.id.as_str()) {
                defects.push(format!("duplicate edge `{}`", e.id));
            }
            if !nodes.contains(e.tail.as_str()) {
                defects.push(format!("edge `{}` has missing tail `{}`", e.id, e.tail));
            }
            if !nodes.contains(e.head.as_str()) {
                defects.push(format!("edge `{}` has missing head `{}`", e.id, e.head));
            }
            if !(1..=2).contains(&e.exponent) {
                defects.push(format!("edge `{}` has exponent {} (must be 1 or 2)", e.id, e.exponent));
            }
        }
        if defects.is_empty() && self.topological_order().is_none() {
            defects.push("graph contains a directed cycle".to_string());
        }
        defects
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let idx: HashMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut succ = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            let (t, h) = (*idx.get(e.tail.as_str())?, *idx.get(e.head.as_str())?);
            indeg[h] += 1;
            succ[t].push(h);
        }
        let mut ready: BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &h in &succ[v] {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    pub fn layout(&self) -> Result<Layout, NetError> {
        let defects = self.validate();
        if !defects.is_empty() {
            return Err(NetError::Invalid(defects));
        }
        let node_index: HashMap<String, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let edge_index = self.edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let message_index: HashMap<String, usize> =
            self.messages.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let node_has = self
            .nodes
            .iter()
            .map(|n| n.has.iter().map(|m| message_index[m]).collect())
            .collect();
        let node_demands = self
            .nodes
            .iter()
            .map(|n| n.demands.iter().map(|m| message_index[m]).collect())
            .collect();
        let mut node_in = vec![Vec::new(); self.nodes.len()];
        let mut node_out = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            node_out[node_index[&e.tail]].push(i);
            node_in[node_index[&e.head]].push(i);
        }
        let node_order = self.topological_order().expect("validated");
        let mut pos = vec![0; self.nodes.len()];
        for (p, &v) in node_order.iter().enumerate() {
            pos[v] = p;
        }
        let mut edge_order: Vec<usize> = (0..self.edges.len()).collect();
        edge_order.sort_by_key(|&i| (pos[node_index[&self.edges[i].tail]], i));
        Ok(Layout {
            node_index,
            edge_index,
            message_index,
            node_has,
            node_demands,
            node_in,
            node_out,
            node_order,
            edge_order,
        })
    }

    /// Graphviz rendering. Demands are listed in node labels and exponent-2
    /// edges are drawn doubled.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph network {\n  rankdir=LR;\n");
        for m in &self.messages {
            let _ = writeln!(s, "  \"msg:{0}\" [shape=plaintext,label=\"{0} (m={1})\"];", m.name, m.exponent);
        }
        for n in &self.nodes {
            let mut label = n.id.clone();
            if !n.demands.is_empty() {
                let _ = write!(label, "\\ndemands {{{}}}", n.demands.join(","));
            }
            let _ = writeln!(s, "  \"{}\" [shape=box,label=\"{}\"];", n.id, label);
            for m in &n.has {
                let _ = writeln!(s, "  \"msg:{m}\" -> \"{}\" [style=dotted];", n.id);
            }
        }
        for e in &self.edges {
            let label = e.signal.as_deref().unwrap_or(&e.id);
            let style = if e.exponent == 2 { ",color=\"black:black\"" } else { ",style=dashed" };
            let _ = writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"{}];", e.tail, e.head, label, style);
        }
        s.push_str("}\n");
        s
    }

    /// The classical butterfly: two sources, a shared bottleneck edge and
    /// two sinks each demanding the message of the opposite source.
    pub fn butterfly() -> Network {
        let msg = |n: &str| Message { name: n.into(), exponent: 1 };
        let node = |id: &str, has: &[&str], demands: &[&str]| Node {
            id: id.into(),
            has: has.iter().map(|s| s.to_string()).collect(),
            demands: demands.iter().map(|s| s.to_string()).collect(),
        };
        let edge = |id: &str, t: &str, h: &str| Edge {
            id: id.into(),
            tail: t.into(),
            head: h.into(),
            exponent: 1,
            signal: None,
        };
        Network {
            messages: vec![msg("M1"), msg("M2")],
            nodes: vec![
                node("s1", &["M1"], &[]),
                node("s2", &["M2"], &[]),
                node("mid", &[], &[]),
                node("relay", &[], &[]),
                node("t1", &[], &["M2"]),
                node("t2", &[], &["M1"]),
            ],
            edges: vec![
                edge("s1-t1", "s1", "t1"),
                edge("s1-mid", "s1", "mid"),
                edge("s2-mid", "s2", "mid"),
                edge("s2-t2", "s2", "t2"),
                edge("mid-relay", "mid", "relay"),
                edge("relay-t1", "relay", "t1"),
                edge("relay-t2", "relay", "t2"),
            ],
        }
    }
}

/// `base^exp` if it fits in a `u64`.
pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}
